"""Exact-diagonalization extraction of per-photon and per-photon-squared shifts.

Diagonalizes the undriven ladder Hamiltonian sum_i w_i |i><i| + w_r a^dag a +
sum_i g_i (a^dag |i><i+1| + h.c.) with no Kerr term. The coupling conserves the
total excitation C = qubit_index + fock_index, so the matrix is block diagonal
with blocks of at most M states; diagonalizing the blocks is the full, exact
diagonalization of the truncated Hamiltonian. Eigenstates are assigned to the
bare state of maximum overlap, and the resonator frequency for qubit state i,
w_{r,i}(n) = E_{i,n+1} - E_{i,n}, is fit with a quadratic polynomial in n.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import InsufficientPoints
from .transmon import QubitSpec


@dataclass
class DressedLadder:
    """Energies E[i, n] (rad/s) and bare-state overlaps of the dressed ladder."""

    omega_r: float
    energies: np.ndarray           # (M, n_max+1), NaN where unassigned
    overlaps: np.ndarray           # (M, n_max+1) squared overlap with |i,n>
    ambiguous: list = field(default_factory=list)  # (i, n) with overlap^2 <= 0.5

    @property
    def n_max(self):
        return self.energies.shape[1] - 1


def dressed_energies(spec: QubitSpec, omega_r: float, n_fit: int = 5,
                     n_fock: int | None = None) -> DressedLadder:
    """Dressed ladder for n = 0..n_fit+1 by exact blockwise diagonalization.

    n_fock defaults to n_fit + 15 and must be at least n_fit + 10 so the
    retained rungs are converged.
    """
    M = spec.M
    if n_fock is None:
        n_fock = n_fit + 15
    if n_fock < n_fit + 10:
        raise ValueError(f"n_fock = {n_fock} < n_fit + 10 = {n_fit + 10}")
    w = np.asarray(spec.level_freqs)
    g = np.asarray(spec.couplings)

    n_keep = n_fit + 1
    energies = np.full((M, n_keep + 1), np.nan)
    overlaps = np.zeros((M, n_keep + 1))
    ambiguous = []

    for C in range(n_fock + M - 1):
        qs = [i for i in range(M) if 0 <= C - i < n_fock]
        if not qs:
            continue
        dim = len(qs)
        H = np.zeros((dim, dim))
        for a_, i in enumerate(qs):
            H[a_, a_] = w[i] + (C - i) * omega_r
        for a_ in range(dim - 1):
            i = qs[a_]           # couples |i, C-i> <-> |i+1, C-i-1|
            el = g[i] * np.sqrt(C - i)
            H[a_, a_ + 1] = el
            H[a_ + 1, a_] = el
        evals, evecs = np.linalg.eigh(H)
        for k in range(dim):
            a_ = int(np.argmax(np.abs(evecs[:, k])))
            i, n = qs[a_], C - qs[a_]
            if n > n_keep:
                continue
            o2 = float(evecs[a_, k] ** 2)
            if o2 <= 0.5:
                ambiguous.append((i, n))
                continue
            energies[i, n] = evals[k]
            overlaps[i, n] = o2
    return DressedLadder(omega_r=omega_r, energies=energies,
                         overlaps=overlaps, ambiguous=ambiguous)


@dataclass(frozen=True)
class ExtractedCoefficients:
    S_num: np.ndarray
    K_num: np.ndarray
    curvature: np.ndarray   # quadratic fit coefficient c2, a breakdown flag
    min_overlap: np.ndarray


def extract_coefficients(ladder: DressedLadder, omega_r: float
                         ) -> ExtractedCoefficients:
    """Quadratic fit of w_{r,i}(n) = c0 + c1 n + c2 n^2 over n = 0..n_max-1.

    With E_{i,n} ~ const + (w_r + S_i) n + K_i n^2 the discrete derivative is
    c0 + c1 n with c0 = w_r + S_i + K_i and c1 = 2 K_i, hence
    S_i = c0 - w_r - c1/2 and K_i = c1/2 (the c1/2 undoes the (2n+1) offset).
    """
    M, cols = ladder.energies.shape
    n_pts = cols - 1
    if n_pts < 5:
        raise InsufficientPoints(f"need rungs n = 0..5, have 0..{n_pts}")
    S = np.full(M, np.nan)
    Kn = np.full(M, np.nan)
    curv = np.full(M, np.nan)
    omin = np.zeros(M)
    ns = np.arange(n_pts)
    for i in range(M):
        wr_n = ladder.energies[i, 1:] - ladder.energies[i, :-1]
        good = ~np.isnan(wr_n)
        if good.sum() < 5:
            raise InsufficientPoints(
                f"level {i}: only {int(good.sum())} usable rungs (ambiguous ladder)")
        c2, c1, c0 = np.polyfit(ns[good], wr_n[good], 2)
        S[i] = c0 - omega_r - 0.5 * c1
        Kn[i] = 0.5 * c1
        curv[i] = c2
        omin[i] = ladder.overlaps[i][~np.isnan(ladder.energies[i])].min()
    return ExtractedCoefficients(S_num=S, K_num=Kn, curvature=curv,
                                 min_overlap=omin)


def numeric_shifts(spec: QubitSpec, omega_r: float, n_fit: int = 5):
    """Convenience: dressed ladder + extraction in one call."""
    ladder = dressed_energies(spec, omega_r, n_fit)
    return extract_coefficients(ladder, omega_r)
