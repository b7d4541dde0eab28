"""Multi-level qubit specifications.

Either explicit frequency/coupling lists, or a transmon built by diagonalizing
the Cooper-pair-box Hamiltonian 4*E_C*(n - n_g)^2 - E_J*cos(phi) in the charge
basis at n_g = 0. Couplings follow the charge matrix elements:
g_i = g_ref * |<i+1|n|i>| / |<1|n|0>|_ref, with the reference element evaluated
at the reference Josephson energy (the zero-flux bias point).
"""
from __future__ import annotations

import warnings
from dataclasses import dataclass, replace

import numpy as np

from .errors import BasisTooSmall, InvalidSpec

TWOPI = 2.0 * np.pi
MHZ = TWOPI * 1e6  # rad/s per MHz of ordinary frequency


@dataclass(frozen=True)
class QubitSpec:
    """M-level qubit: eigenfrequencies (rad/s, omega_0 = 0) and ladder couplings."""

    level_freqs: tuple
    couplings: tuple
    label: str = ""

    def __post_init__(self):
        w = np.asarray(self.level_freqs, dtype=float)
        g = np.asarray(self.couplings, dtype=float)
        if w.size < 2:
            raise InvalidSpec("need at least two levels")
        if g.size != w.size - 1:
            raise InvalidSpec(f"{w.size} levels require {w.size - 1} couplings, got {g.size}")
        if abs(w[0]) > 1e-9 * max(1.0, abs(w).max()):
            raise InvalidSpec("lowest level frequency must be zero")
        if not np.all(np.diff(w) > 0):
            raise InvalidSpec("level frequencies must be strictly increasing")
        if np.any(g <= 0):
            raise InvalidSpec("couplings must be positive")
        t = np.diff(w)
        if t.size > 1:
            dec, inc = np.all(np.diff(t) < 0), np.all(np.diff(t) > 0)
            if not (dec or inc):
                raise InvalidSpec("transition frequencies must be strictly monotone")
        object.__setattr__(self, "level_freqs", tuple(float(x) for x in w))
        object.__setattr__(self, "couplings", tuple(float(x) for x in g))

    @property
    def M(self):
        return len(self.level_freqs)

    def transitions(self):
        """omega_{i+1} - omega_i, length M-1 (rad/s)."""
        return np.diff(np.asarray(self.level_freqs))

    def truncated(self, M: int) -> "QubitSpec":
        if not 2 <= M <= self.M:
            raise InvalidSpec(f"cannot truncate {self.M} levels to {M}")
        return QubitSpec(self.level_freqs[:M], self.couplings[:M - 1], self.label)

    def freqs_mhz(self):
        return np.asarray(self.level_freqs) / MHZ

    def couplings_mhz(self):
        return np.asarray(self.couplings) / MHZ


def explicit_spec(level_freqs, couplings, label="explicit") -> QubitSpec:
    """Validated pass-through construction; inputs in rad/s."""
    return QubitSpec(tuple(level_freqs), tuple(couplings), label)


def explicit_spec_mhz(level_freqs_mhz, couplings_mhz, label="explicit") -> QubitSpec:
    return explicit_spec([f * MHZ for f in level_freqs_mhz],
                         [g * MHZ for g in couplings_mhz], label)


@dataclass(frozen=True)
class TransmonParams:
    """Charge-basis transmon model, energies in MHz (ordinary frequency).

    E_J_ref is the bias point at which g_ref is the 0<->1 coupling; it defaults
    to E_J so an untuned transmon is its own reference.
    """

    E_C: float = 300.0
    E_J: float = 25000.0
    g_ref: float = 15.0
    M: int = 5
    charge_basis_size: int = 41
    E_J_ref: float | None = None

    def __post_init__(self):
        if self.charge_basis_size % 2 == 0:
            raise ValueError("charge_basis_size must be odd")
        if self.charge_basis_size < 4 * self.M + 1:
            raise ValueError(
                f"charge_basis_size {self.charge_basis_size} < 4*M+1 = {4 * self.M + 1}"
            )
        if self.E_J / self.E_C <= 20:
            warnings.warn(f"E_J/E_C = {self.E_J / self.E_C:.1f} below the "
                          "transmon regime sanity bound of 20")
        if self.E_J_ref is None:
            object.__setattr__(self, "E_J_ref", self.E_J)


def _charge_basis_eig(E_C, E_J, size):
    ncut = size // 2
    n = np.arange(-ncut, ncut + 1, dtype=float)
    H = np.diag(4.0 * E_C * n ** 2)
    off = -0.5 * E_J * np.ones(size - 1)
    H += np.diag(off, 1) + np.diag(off, -1)
    evals, evecs = np.linalg.eigh(H)
    return evals, evecs, n


def _levels_and_elements(E_C, E_J, M, size):
    evals, evecs, n = _charge_basis_eig(E_C, E_J, size)
    freqs = evals[:M] - evals[0]
    elems = np.array([abs(evecs[:, i + 1] @ (n * evecs[:, i])) for i in range(M - 1)])
    return freqs, elems


def transmon_spectrum(params: TransmonParams) -> QubitSpec:
    """Exact charge-basis spectrum and matrix-element-scaled couplings."""
    freqs, elems = _levels_and_elements(
        params.E_C, params.E_J, params.M, params.charge_basis_size)
    # convergence: growing the basis must not move the retained levels
    freqs2, _ = _levels_and_elements(
        params.E_C, params.E_J, params.M, 2 * params.charge_basis_size + 1)
    if np.abs(freqs - freqs2).max() > 1e-3:  # 1 kHz in MHz units
        raise BasisTooSmall(
            f"levels move by {np.abs(freqs - freqs2).max():.2e} MHz when the "
            f"charge basis is doubled; increase charge_basis_size")
    ref_elem = _levels_and_elements(
        params.E_C, params.E_J_ref, 2, params.charge_basis_size)[1][0]
    g = params.g_ref * elems / ref_elem
    return QubitSpec(tuple(freqs * MHZ), tuple(g * MHZ),
                     label=f"transmon EC={params.E_C:g} EJ={params.E_J:g}")


def tune_to_frequency(params: TransmonParams, target_w10: float,
                      E_J_max: float = 80000.0) -> TransmonParams:
    """Bisection on E_J until the 0->1 transition hits target_w10 (rad/s).

    Matches within 1 kHz. The coupling reference point E_J_ref is preserved.
    """
    target_mhz = target_w10 / MHZ

    def w10(ej):
        return _levels_and_elements(params.E_C, ej, 2, params.charge_basis_size)[0][1]

    lo, hi = 20.0 * params.E_C, E_J_max
    if not (w10(lo) <= target_mhz <= w10(hi)):
        raise ValueError(
            f"target {target_mhz:.1f} MHz unreachable for E_J in "
            f"[{lo:.0f}, {hi:.0f}] MHz")
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if w10(mid) < target_mhz:
            lo = mid
        else:
            hi = mid
        if hi - lo < 1e-9 * hi:
            break
    tuned = 0.5 * (lo + hi)
    if abs(w10(tuned) - target_mhz) > 1e-3:  # 1 kHz
        raise ValueError("bisection failed to reach the target within 1 kHz")
    return replace(params, E_J=tuned, E_J_ref=params.E_J_ref)


def paper_transmon(M: int = 5) -> QubitSpec:
    """The reference transmon used throughout: E_C = 300 MHz, zero-flux
    E_J = 25 GHz and g01 = 15 MHz, flux-tuned so the 0->1 transition is 6 GHz."""
    base = TransmonParams(E_C=300.0, E_J=25000.0, g_ref=15.0, M=M)
    tuned = tune_to_frequency(base, 6000.0 * MHZ)
    return transmon_spectrum(tuned)
