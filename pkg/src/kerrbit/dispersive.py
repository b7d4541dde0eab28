"""Closed-form dispersive quantities for a ladder qubit driven through a Kerr resonator.

Conventions, with Delta_{i,d} = omega_{i+1} - omega_i - omega_d and
Delta_{i,r} = omega_{i+1} - omega_i - omega_r:

    Lambda_i = -g_i / Delta_{i,d}          X_i = -g_i Lambda_i = g_i^2 / Delta_{i,d}
    S_i      = -(X_i - X_{i-1})            (per-photon qubit shift)
    g2_i     = Lambda_i Lambda_{i+1} (Delta_{i+1,d} - Delta_{i,d})
    Lambda2_i = -g2_i / (Delta_{i+1,d} + Delta_{i,d}),  X2_i = -g2_i Lambda2_i
    K_i      = K1_i - X2_i + X2_{i-2}      (per-photon-squared shift)

with K1_i the two-photon-free part. Ladder edges carry Lambda_{-1} = X_{-1} = 0
and Lambda_{M-1} = X_{M-1} = 0; two-photon quantities vanish for i > M-3.
Everything is stateless and expressed in angular frequency (rad/s).
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ResonanceGuard, TwoPhotonResonanceGuard
from .transmon import MHZ, QubitSpec

DEFAULT_GUARD = MHZ * 1.0  # 2*pi*1 MHz


@dataclass(frozen=True)
class DriveContext:
    """Drive and resonator parameters (rad/s)."""

    omega_d: float
    omega_r: float
    kappa: float
    K: float
    eps_d: float = 0.0

    def __post_init__(self):
        if self.kappa <= 0:
            raise ValueError("kappa must be positive")
        if self.eps_d < 0:
            raise ValueError("drive amplitude must be nonnegative")

    @property
    def reduced_detuning(self):
        """Omega = 2 (omega_r - omega_d) / kappa."""
        return 2.0 * (self.omega_r - self.omega_d) / self.kappa


def detunings(spec: QubitSpec, omega: float) -> np.ndarray:
    """Delta_i = omega_{i+1} - omega_i - omega, length M-1."""
    return spec.transitions() - omega


def _check_guard(deltas, guard, exc=ResonanceGuard):
    for i, dd in enumerate(deltas):
        if abs(dd) < guard:
            raise exc(i, dd, guard)


def _at(arr, i):
    """Ladder-edge convention: quantities vanish outside their index range."""
    return arr[i] if 0 <= i < arr.size else 0.0


@dataclass(frozen=True)
class DispersiveCoefficients:
    """All per-level closed-form quantities at one drive frequency."""

    omega_d: float
    delta_d: np.ndarray      # length M-1
    lam: np.ndarray          # length M-1
    X: np.ndarray            # length M-1
    S: np.ndarray            # length M
    K1: np.ndarray           # length M
    K: np.ndarray            # length M
    g2: np.ndarray           # length M (zero for i >= M-2)
    X2: np.ndarray           # length M

    @property
    def M(self):
        return self.S.size

    def chi(self):
        """Low-photon cavity pull S_1 - S_0."""
        return self.S[1] - self.S[0]


def coefficients(spec: QubitSpec, omega_d: float,
                 guard: float = DEFAULT_GUARD) -> DispersiveCoefficients:
    """Evaluate every coefficient; raises inside the guard bands."""
    M = spec.M
    g = np.asarray(spec.couplings)
    dd = detunings(spec, omega_d)
    _check_guard(dd, guard)
    lam = -g / dd
    X = -g * lam

    g2 = np.zeros(M)
    X2 = np.zeros(M)
    if M >= 3:
        two_ph = dd[1:] + dd[:-1]
        _check_guard(two_ph, guard, TwoPhotonResonanceGuard)
        g2[:M - 2] = lam[:-1] * lam[1:] * (dd[1:] - dd[:-1])
        X2[:M - 2] = g2[:M - 2] ** 2 / two_ph

    S = np.empty(M)
    K1 = np.empty(M)
    for i in range(M):
        Xi, Xm1 = _at(X, i), _at(X, i - 1)
        Li, Lm1 = _at(lam, i), _at(lam, i - 1)
        S[i] = -(Xi - Xm1)
        K1[i] = (
            -S[i] * (Li ** 2 + Lm1 ** 2)
            - 0.25 * (3.0 * _at(X, i + 1) * Li ** 2 - Xi * _at(lam, i + 1) ** 2)
            + 0.25 * (3.0 * _at(X, i - 2) * Lm1 ** 2 - Xm1 * _at(lam, i - 2) ** 2)
        )
    Kfull = np.array([K1[i] - _at(X2, i) + _at(X2, i - 2) for i in range(M)])
    return DispersiveCoefficients(omega_d=omega_d, delta_d=dd, lam=lam, X=X,
                                  S=S, K1=K1, K=Kfull, g2=g2, X2=X2)


def stark_linear(spec, omega_d, guard=DEFAULT_GUARD) -> np.ndarray:
    """Per-photon qubit shifts S_i; S_0 = -X_0."""
    return coefficients(spec, omega_d, guard).S


def kerr_quadratic(spec, omega_d, guard=DEFAULT_GUARD):
    """Per-photon-squared shifts: (two-photon-free K1_i, full K_i)."""
    c = coefficients(spec, omega_d, guard)
    return c.K1, c.K


def two_photon_coupling(spec, omega_d, guard=DEFAULT_GUARD) -> np.ndarray:
    return coefficients(spec, omega_d, guard).g2


def multilevel_pull(spec: QubitSpec, omega_r: float, guard=DEFAULT_GUARD):
    """Low-power dressed pull S_i = g_{i-1}^2/Delta_{i-1,r} - g_i^2/Delta_{i,r}
    and chi = S_1 - S_0."""
    M = spec.M
    g = np.asarray(spec.couplings)
    dr = detunings(spec, omega_r)
    _check_guard(dr, guard)
    X = g ** 2 / dr
    S = np.array([_at(X, i - 1) - _at(X, i) for i in range(M)])
    return S, S[1] - S[0]


def purcell_rates(spec: QubitSpec, omega_r: float, kappa: float,
                  guard=DEFAULT_GUARD) -> np.ndarray:
    """Decay rate kappa * g_i^2 / Delta_{i,r}^2 of the i -> i-1 ladder channel
    for each transition i = 0..M-2 (rate of level i+1 through transition i)."""
    dr = detunings(spec, omega_r)
    _check_guard(dr, guard)
    g = np.asarray(spec.couplings)
    return kappa * g ** 2 / dr ** 2


def lamb_shift_and_pull(spec: QubitSpec, ctx: DriveContext, alpha,
                        guard=DEFAULT_GUARD):
    """Field-dependent Lamb shifts L_i, pulls S_i = -(L_{i+1} - L_i), and the
    fully shifted qubit frequencies.

    `alpha` is the mean field the qubit experiences: a scalar applied to every
    level, or one value per level for state-conditioned evaluation. Returns
    (L, S_pull, omega_eff) with omega_eff_i = omega_i + S_i|a|^2 + K_i|a|^4 + L_i.
    """
    M = spec.M
    c = coefficients(spec, ctx.omega_d, guard)
    a2 = np.abs(np.broadcast_to(np.asarray(alpha, dtype=complex), (M,))) ** 2
    w = np.asarray(spec.level_freqs)
    omega_r_k = ctx.omega_r + 2.0 * ctx.K * a2          # Kerr-shifted, per level
    w_stark = w + c.S * a2 + c.K1 * a2 ** 2             # two-photon-free shift
    L = np.zeros(M)
    g = np.asarray(spec.couplings)
    for i in range(M - 1):
        den = w_stark[i + 1] - w_stark[i] - omega_r_k[i]
        if abs(den) < guard:
            raise ResonanceGuard(i, den, guard)
        L[i] = g[i] ** 2 / den
    S_pull = np.array([-(_at(L, i + 1) - _at(L, i)) for i in range(M)])
    omega_eff = w + c.S * a2 + c.K * a2 ** 2 + L
    return L, S_pull, omega_eff


def landau_zener(g: float, v: float) -> float:
    """Unwanted-transition probability 1 - exp(-2 pi g^2 / v) for a crossing
    swept at rate v (rad/s per second); g in rad/s."""
    if v <= 0:
        raise ValueError("sweep rate must be positive")
    return 1.0 - float(np.exp(-2.0 * np.pi * g * g / v))


@dataclass(frozen=True)
class ValidityReport:
    """Graded dispersive-frame diagnostics; never raises."""

    lam_abs: np.ndarray
    xi_abs: np.ndarray
    xi2_abs: np.ndarray
    verdict: str

    @property
    def valid(self):
        return self.verdict == "dispersive-valid"


def dispersive_validity(spec: QubitSpec, ctx: DriveContext, alphas,
                        lam_limit=0.1, xi_limit=0.3) -> ValidityReport:
    """Frame-displacement diagnostics xi_i = Lambda_i alpha_i and the
    two-photon analogue, with a graded verdict."""
    M = spec.M
    al = np.broadcast_to(np.asarray(alphas, dtype=complex), (M,))
    g = np.asarray(spec.couplings)
    dd = detunings(spec, ctx.omega_d)
    with np.errstate(divide="ignore"):
        lam = np.where(dd != 0, -g / np.where(dd != 0, dd, 1.0), np.inf)
    xi = np.abs(lam * al[:M - 1])
    g2 = np.zeros(max(M - 2, 0))
    xi2 = np.zeros(max(M - 2, 0))
    if M >= 3:
        two_ph = dd[1:] + dd[:-1]
        g2 = lam[:-1] * lam[1:] * (dd[1:] - dd[:-1])
        with np.errstate(divide="ignore", invalid="ignore"):
            xi2 = np.abs(np.where(two_ph != 0,
                                  -g2 * al[:M - 2] * al[1:M - 1]
                                  / np.where(two_ph != 0, two_ph, 1.0),
                                  np.inf))
    lam_abs = np.abs(lam)
    if np.all(lam_abs < lam_limit) and np.all(xi < xi_limit):
        verdict = "dispersive-valid"
    elif np.all(lam_abs < 5 * lam_limit) and np.all(xi < 2 * xi_limit):
        verdict = "strained"
    else:
        verdict = "breakdown"
    return ValidityReport(lam_abs=lam_abs, xi_abs=xi, xi2_abs=xi2, verdict=verdict)
