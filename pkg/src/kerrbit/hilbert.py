"""Truncated qubit ⊗ Fock Hilbert-space primitives.

Basis ordering is qubit-major and fixed: basis index = qubit_index * N + fock_index,
so qubit dissipators are block-banded. Operators are built sparse (CSR); density
matrices are dense.
"""
from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field

import numpy as np
import scipy.sparse as sp

from .errors import NormalizationWarning, TruncationOverflow

M_BOUNDS = (2, 10)
N_BOUNDS = (8, 512)


@dataclass(frozen=True)
class HilbertLayout:
    """Truncation of the qubit ⊗ resonator space.

    M qubit levels, N Fock levels; total dimension M*N.
    """

    M: int
    N: int

    def __post_init__(self):
        if not (M_BOUNDS[0] <= self.M <= M_BOUNDS[1]):
            raise ValueError(f"qubit level count M={self.M} outside {M_BOUNDS}")
        if not (N_BOUNDS[0] <= self.N <= N_BOUNDS[1]):
            raise ValueError(f"Fock truncation N={self.N} outside {N_BOUNDS}")

    @property
    def dim(self):
        return self.M * self.N

    def index(self, i, n):
        """Flat basis index of |qubit i, fock n>."""
        if not (0 <= i < self.M and 0 <= n < self.N):
            raise IndexError(f"state ({i},{n}) outside layout {self.M}x{self.N}")
        return i * self.N + n

    def fock_numbers(self):
        """Photon number of each flat basis state."""
        return np.tile(np.arange(self.N), self.M)

    def qubit_indices(self):
        return np.repeat(np.arange(self.M), self.N)


def annihilation(layout: HilbertLayout) -> sp.csr_matrix:
    """Resonator lowering operator a ⊗ 1_qubit, sqrt(n) on the Fock sub-diagonal."""
    a_f = sp.diags(np.sqrt(np.arange(1, layout.N)), 1)
    return sp.kron(sp.identity(layout.M), a_f, format="csr")


def number_operator(layout: HilbertLayout) -> sp.csr_matrix:
    return sp.diags(layout.fock_numbers().astype(float), 0, format="csr")


def kerr_operator(layout: HilbertLayout) -> sp.csr_matrix:
    """a†a†aa, diagonal n(n-1)."""
    n = layout.fock_numbers().astype(float)
    return sp.diags(n * (n - 1.0), 0, format="csr")


def qubit_projector(layout: HilbertLayout, i: int, j: int) -> sp.csr_matrix:
    """|i><j| ⊗ 1_Fock."""
    if not (0 <= i < layout.M and 0 <= j < layout.M):
        raise IndexError(f"projector indices ({i},{j}) outside M={layout.M}")
    proj = sp.csr_matrix(([1.0], ([i], [j])), shape=(layout.M, layout.M))
    return sp.kron(proj, sp.identity(layout.N), format="csr")


def coherent_vector(layout: HilbertLayout, alpha: complex) -> np.ndarray:
    """Normalized truncated coherent state on the resonator factor (length N).

    Requires |alpha|^2 < N/2 so the Poisson tail fits the truncation; raises
    TruncationOverflow when more than 1e-6 of the weight is lost.
    """
    vec = coherent_amplitudes(layout.N, alpha)
    lost = 1.0 - float(np.vdot(vec, vec).real)
    if lost > 1e-6:
        raise TruncationOverflow(
            f"coherent state |alpha|^2={abs(alpha)**2:.2f} loses {lost:.2e} "
            f"of its weight at N={layout.N}"
        )
    return vec / np.linalg.norm(vec)


def coherent_amplitudes(N: int, alpha: complex) -> np.ndarray:
    """Unnormalized projection of |alpha> on the first N Fock states."""
    n = np.arange(N)
    # log-domain to avoid overflow of alpha^n / sqrt(n!)
    if alpha == 0:
        vec = np.zeros(N, dtype=complex)
        vec[0] = 1.0
        return vec
    logmag = n * math.log(abs(alpha)) - 0.5 * np.cumsum(
        np.concatenate(([0.0], np.log(np.arange(1, N))))
    ) - 0.5 * abs(alpha) ** 2
    phase = np.exp(1j * n * np.angle(alpha))
    return np.exp(logmag) * phase


@dataclass
class DensityMatrix:
    """Dense density matrix over a HilbertLayout, tagged with its time (s)."""

    layout: HilbertLayout
    data: np.ndarray
    time: float = 0.0

    def __post_init__(self):
        d = self.layout.dim
        if self.data.shape != (d, d):
            raise ValueError(f"density matrix shape {self.data.shape} != ({d},{d})")

    @property
    def trace(self) -> float:
        return float(np.trace(self.data).real)

    def validate(self, trace_tol=1e-6, herm_tol=1e-10, eig_tol=1e-6):
        """Check trace, hermiticity and (spot-check) positivity."""
        if abs(self.trace - 1.0) > trace_tol:
            raise ValueError(f"trace deviation {abs(self.trace - 1.0):.2e}")
        herm = np.abs(self.data - self.data.conj().T).max()
        if herm > herm_tol * max(1.0, np.abs(self.data).max()):
            raise ValueError(f"hermiticity deviation {herm:.2e}")
        lo = float(np.linalg.eigvalsh(self.data)[0])
        if lo < -eig_tol:
            raise ValueError(f"negative eigenvalue {lo:.2e}")
        return self

    def qubit_populations(self) -> np.ndarray:
        diag = np.diag(self.data).real
        return diag.reshape(self.layout.M, self.layout.N).sum(axis=1)

    def photon_populations(self) -> np.ndarray:
        diag = np.diag(self.data).real
        return diag.reshape(self.layout.M, self.layout.N).sum(axis=0)

    def reduced_resonator(self) -> np.ndarray:
        """Partial trace over the qubit; N x N resonator state."""
        d4 = self.data.reshape(self.layout.M, self.layout.N,
                               self.layout.M, self.layout.N)
        return np.einsum("inim->nm", d4)

    def reduced_qubit(self) -> np.ndarray:
        d4 = self.data.reshape(self.layout.M, self.layout.N,
                               self.layout.M, self.layout.N)
        return np.einsum("injn->ij", d4)


def expectation(rho: DensityMatrix | np.ndarray, op) -> complex:
    """Tr(rho A) for dense rho and dense/sparse A."""
    mat = rho.data if isinstance(rho, DensityMatrix) else rho
    if sp.issparse(op):
        if op.shape[1] != mat.shape[0]:
            raise ValueError(f"dimension mismatch {op.shape} vs {mat.shape}")
        return complex((op @ mat).diagonal().sum())
    op = np.asarray(op)
    if op.shape[1] != mat.shape[0]:
        raise ValueError(f"dimension mismatch {op.shape} vs {mat.shape}")
    return complex(np.einsum("ij,ji->", op, mat))


def phase_grid(extent: float, npts: int = 101):
    """Square grid of coherent-state amplitudes covering [-extent, extent]^2.

    Returns (alphas 2D complex, cell area).
    """
    x = np.linspace(-extent, extent, npts)
    dx = x[1] - x[0]
    re, im = np.meshgrid(x, x, indexing="ij")
    return re + 1j * im, dx * dx


def q_function(rho: DensityMatrix | np.ndarray, alphas: np.ndarray,
               cell_area: float | None = None,
               weight_tol: float = 0.999) -> np.ndarray:
    """Husimi Q(alpha) = <alpha| rho_res |alpha> / pi on a grid of amplitudes.

    `rho` may be a full DensityMatrix (the qubit is traced out) or an N x N
    resonator matrix. Values are >= 0 for any positive semidefinite state.
    When `cell_area` is given, warns if the grid captures less than
    `weight_tol` of the total weight.
    """
    if isinstance(rho, DensityMatrix):
        red = rho.reduced_resonator()
    else:
        red = np.asarray(rho)
    N = red.shape[0]
    flat = np.asarray(alphas, dtype=complex).ravel()
    # rows of V: unnormalized truncated coherent amplitudes; exact because the
    # state has no weight beyond the truncation
    n = np.arange(N)
    logfact = np.cumsum(np.concatenate(([0.0], np.log(np.arange(1, N)))))
    mag = np.abs(flat)
    zero = mag == 0
    logmag = np.log(np.where(zero, 1.0, mag))  # placeholder rows fixed below
    expo = np.outer(logmag, n) - 0.5 * logfact[None, :] - 0.5 * (mag ** 2)[:, None]
    V = np.exp(expo) * np.exp(1j * np.outer(np.angle(flat), n))
    V[zero, :] = 0.0
    V[zero, 0] = 1.0
    T = red @ V.conj().T
    q = np.einsum("kn,nk->k", V, T).real / np.pi
    q = q.reshape(np.shape(alphas))
    if cell_area is not None:
        total = float(q.sum() * cell_area)
        if total < weight_tol:
            warnings.warn(
                f"phase-space grid captures only {total:.4f} of the state",
                NormalizationWarning,
            )
    return q
