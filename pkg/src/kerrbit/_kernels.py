"""Low-level kernels for the master-equation right-hand side.

All products are left CSR-times-dense; right multiplications are obtained from
hermiticity of the density matrix (rho A = (A^dag rho)^dag). numba is used when
available, with equivalent numpy/scipy fallbacks.
"""
from __future__ import annotations

import numpy as np

try:
    from numba import njit

    HAVE_NUMBA = True
except ImportError:  # pragma: no cover - numba is an optional accelerator
    HAVE_NUMBA = False

    def njit(*args, **kwargs):
        def wrap(f):
            return f
        if args and callable(args[0]):
            return args[0]
        return wrap


@njit(cache=True)
def _spmm_acc(data, indices, indptr, B, out, scale):
    """out += scale * (A @ B) for CSR A with given data arrays."""
    nrow = indptr.size - 1
    ncol = B.shape[1]
    for r in range(nrow):
        for p in range(indptr[r], indptr[r + 1]):
            v = scale * data[p]
            c = indices[p]
            for k in range(ncol):
                out[r, k] += v * B[c, k]


@njit(cache=True)
def _acc_minus_dagger(W, out, fac):
    """out += fac * (W - W^dag)."""
    n = W.shape[0]
    for r in range(n):
        for c in range(n):
            out[r, c] += fac * (W[r, c] - np.conj(W[c, r]))


@njit(cache=True)
def _acc_plus_dagger(W, out, fac):
    """out += fac * (W + W^dag)."""
    n = W.shape[0]
    for r in range(n):
        for c in range(n):
            out[r, c] += fac * (W[r, c] + np.conj(W[c, r]))


@njit(cache=True)
def _dagger(W, out):
    n = W.shape[0]
    for r in range(n):
        for c in range(n):
            out[r, c] = np.conj(W[c, r])


@njit(cache=True)
def _phase_mul(base, freqs, t, out):
    """out = base * exp(1j * freqs * t)."""
    for p in range(base.size):
        ang = freqs[p] * t
        out[p] = base[p] * complex(np.cos(ang), np.sin(ang))


def spmm_acc(data, indices, indptr, B, out, scale=1.0 + 0.0j):
    if HAVE_NUMBA:
        _spmm_acc(data, indices, indptr, B, out, scale)
    else:
        import scipy.sparse as sp

        A = sp.csr_matrix((data, indices, indptr), shape=(out.shape[0], out.shape[0]))
        out += scale * (A @ B)


def acc_minus_dagger(W, out, fac):
    if HAVE_NUMBA:
        _acc_minus_dagger(W, out, fac)
    else:
        out += fac * (W - W.conj().T)


def acc_plus_dagger(W, out, fac):
    if HAVE_NUMBA:
        _acc_plus_dagger(W, out, fac)
    else:
        out += fac * (W + W.conj().T)


def dagger(W, out):
    if HAVE_NUMBA:
        _dagger(W, out)
    else:
        np.conjugate(W.T, out=out)


def phase_mul(base, freqs, t, out):
    if HAVE_NUMBA:
        _phase_mul(base, freqs, t, out)
    else:
        np.multiply(base, np.exp(1j * freqs * t), out=out)
