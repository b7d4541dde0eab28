"""Steady states and bifurcation thresholds of the driven Kerr resonator.

The qubit-state-conditioned field obeys

    -eps_d = (omega_r - omega_d - i kappa/2) a + K |a|^2 a + (S_i + (4/3!) K_i |a|^2) a

which reduces, with delta_i = omega_r - omega_d + S_i and
K_eff_i = K + (2/3) K_i, to a real cubic in n = |a|^2:

    eps_d^2 = n [ (delta_i + K_eff_i n)^2 + kappa^2/4 ].

Bistability requires the effective reduced detuning |2 delta_i / kappa| > sqrt(3)
with delta_i and K_eff_i of opposite sign; the fold points of the cubic give the
switching thresholds eps_L < eps_H.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .dispersive import DispersiveCoefficients, DriveContext, coefficients
from .errors import NotBistable
from .transmon import QubitSpec

SQRT3 = float(np.sqrt(3.0))


@dataclass(frozen=True)
class SteadyStateSolution:
    level: int
    branch: str            # "L" | "H" | "unstable"
    alpha: complex
    n: float
    eps_d: float
    omega_d: float


@dataclass(frozen=True)
class BifurcationThresholds:
    level: int
    eps_L: float
    eps_H: float
    Omega: float           # bare reduced detuning 2(omega_r - omega_d)/kappa
    Omega_eff: float       # with the per-photon shift folded in
    bistable: bool
    n_fold_low: float
    n_fold_high: float


def _effective(spec_or_coeffs, ctx: DriveContext, level: int):
    """(delta_i, K_eff_i) for the given qubit level."""
    if isinstance(spec_or_coeffs, DispersiveCoefficients):
        c = spec_or_coeffs
    elif isinstance(spec_or_coeffs, QubitSpec):
        c = coefficients(spec_or_coeffs, ctx.omega_d)
    elif spec_or_coeffs is None:
        return ctx.omega_r - ctx.omega_d, ctx.K
    else:
        raise TypeError(f"expected QubitSpec or DispersiveCoefficients, "
                        f"got {type(spec_or_coeffs)}")
    delta = ctx.omega_r - ctx.omega_d + c.S[level]
    k_eff = ctx.K + (4.0 / 6.0) * c.K[level]
    return delta, k_eff


def _cubic_roots(delta, k_eff, kappa, eps_d):
    """Real positive roots of eps^2 = n[(delta + k n)^2 + kappa^2/4], ascending."""
    if eps_d == 0:
        return [0.0]
    if k_eff == 0.0:
        return [eps_d ** 2 / (delta ** 2 + kappa ** 2 / 4)]
    coeff = [k_eff ** 2, 2.0 * delta * k_eff, delta ** 2 + kappa ** 2 / 4,
             -eps_d ** 2]
    roots = np.roots(coeff)
    real = sorted(float(r.real) for r in roots
                  if abs(r.imag) <= 1e-9 * max(1.0, abs(r)) and r.real > 0)
    # Newton polish against the cubic
    out = []
    for n in real:
        for _ in range(3):
            f = ((delta + k_eff * n) ** 2 + kappa ** 2 / 4) * n - eps_d ** 2
            df = (delta + k_eff * n) ** 2 + kappa ** 2 / 4 \
                + 2.0 * k_eff * n * (delta + k_eff * n)
            if df == 0:
                break
            n -= f / df
        out.append(n)
    return out


def steady_amplitudes(spec_or_coeffs, ctx: DriveContext, level: int
                      ) -> list[SteadyStateSolution]:
    """All steady-state field solutions for the qubit held in `level`.

    One or three solutions; with three, the middle-|a|^2 root is the unstable
    branch (slope criterion d eps^2/dn < 0).
    """
    delta, k_eff = _effective(spec_or_coeffs, ctx, level)
    ns = _cubic_roots(delta, k_eff, ctx.kappa, ctx.eps_d)
    labels = ["L"] if len(ns) == 1 else ["L", "unstable", "H"]
    if len(ns) == 2:      # tangency; treat the outer root as H
        labels = ["L", "H"]
    sols = []
    for n, lab in zip(ns, labels):
        denom = delta + k_eff * n - 1j * ctx.kappa / 2.0
        alpha = -ctx.eps_d / denom
        sols.append(SteadyStateSolution(level=level, branch=lab, alpha=alpha,
                                        n=n, eps_d=ctx.eps_d,
                                        omega_d=ctx.omega_d))
    return sols


def _fold_points(delta, k_eff, kappa):
    """Roots of d(eps^2)/dn = 3k^2 n^2 + 4 delta k n + delta^2 + kappa^2/4."""
    disc = delta ** 2 - 0.75 * kappa ** 2
    if disc <= 0:
        return None
    s = np.sqrt(disc)
    n1 = (-2.0 * delta - s) / (3.0 * k_eff)
    n2 = (-2.0 * delta + s) / (3.0 * k_eff)
    lo, hi = sorted((n1, n2))
    if lo <= 0:
        return None
    return lo, hi


def _bisect_slope(delta, k_eff, kappa, lo, hi, rtol=1e-6):
    """Refine a sign change of d(eps^2)/dn inside [lo, hi] by bisection."""
    def slope(n):
        u = delta + k_eff * n
        return u * u + kappa ** 2 / 4 + 2.0 * k_eff * n * u

    flo = slope(lo)
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if slope(mid) * flo >= 0:
            lo = mid
        else:
            hi = mid
        if hi - lo <= rtol * hi:
            break
    return 0.5 * (lo + hi)


def thresholds(spec_or_coeffs, ctx: DriveContext, level: int,
               refine_rtol: float = 1e-6) -> BifurcationThresholds:
    """Switching thresholds eps_L < eps_H from the fold points of the cubic."""
    delta, k_eff = _effective(spec_or_coeffs, ctx, level)
    omega_eff = 2.0 * delta / ctx.kappa
    omega_bare = ctx.reduced_detuning
    if abs(omega_eff) <= SQRT3 or delta * k_eff >= 0:
        raise NotBistable(
            f"level {level}: Omega_eff = {omega_eff:.3f} "
            f"(critical sqrt(3) = {SQRT3:.3f}), delta*K_eff = {delta * k_eff:.3e}")
    folds = _fold_points(delta, k_eff, ctx.kappa)
    if folds is None:
        raise NotBistable(f"level {level}: no positive fold points")
    lo, hi = folds
    eps_pad = 0.25 * (hi - lo)
    lo = _bisect_slope(delta, k_eff, ctx.kappa, max(lo - eps_pad, 1e-12),
                       lo + eps_pad, refine_rtol)
    hi = _bisect_slope(delta, k_eff, ctx.kappa, hi - eps_pad, hi + eps_pad,
                       refine_rtol)

    def eps_at(n):
        return float(np.sqrt(n * ((delta + k_eff * n) ** 2 + ctx.kappa ** 2 / 4)))

    return BifurcationThresholds(level=level, eps_L=eps_at(hi), eps_H=eps_at(lo),
                                 Omega=omega_bare, Omega_eff=omega_eff,
                                 bistable=True, n_fold_low=lo, n_fold_high=hi)


def response_curve(ctx: DriveContext, omega_grid, eps_list,
                   spec_or_coeffs=None, level: int = 0):
    """|alpha| branches versus reduced detuning for each drive amplitude.

    Sweeps the bare reduced detuning Omega = 2(omega_r - omega_d)/kappa by
    moving omega_r at fixed omega_d. Returns
    {eps: [(Omega, [amplitudes ascending]), ...]}.
    """
    out = {}
    for eps in eps_list:
        rows = []
        for om in omega_grid:
            ctx_i = DriveContext(omega_d=ctx.omega_d,
                                 omega_r=ctx.omega_d + 0.5 * om * ctx.kappa,
                                 kappa=ctx.kappa, K=ctx.K, eps_d=eps)
            delta, k_eff = _effective(spec_or_coeffs, ctx_i, level)
            ns = _cubic_roots(delta, k_eff, ctx.kappa, eps)
            rows.append((float(om), [float(np.sqrt(n)) for n in ns]))
        out[float(eps)] = rows
    return out
