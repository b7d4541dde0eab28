"""Time evolution of the driven dissipative qubit-resonator density matrix.

The master equation

    drho/dt = -i [H(t), rho] + kappa D[a] rho + gamma sum_i D[(g_i/g_0) |i><i+1|] rho

is integrated in the frame rotating at the drive frequency for both subsystems,
where H(t) = sum_i (w_i - i w_d) |i><i| + (w_r - w_d) a^dag a + (K/2) a^dag a^dag a a
+ sum_i g_i (a^dag |i><i+1| + h.c.) + eps(t) (a + a^dag). Only the envelope
eps(t) is time dependent.

Numerically, the static part of H conserves the total excitation number and is
diagonalized exactly blockwise; the default integrator propagates the density
matrix with adaptive embedded Runge-Kutta 4(5) in the interaction picture of
that static part, where every operator stays sparse and only picks up
per-element phase factors. "rk45-bare" integrates in the plain rotating frame
instead (slower, used for cross-validation). The d^2 state is always propagated
through sparse left-multiplications; no superoperator is ever materialized.
"""
from __future__ import annotations

from dataclasses import dataclass, field, replace

import numpy as np
import scipy.sparse as sp
from scipy.integrate import solve_ivp

from . import _kernels as K_
from .dispersive import DriveContext
from .errors import StepSizeUnderflow, TruncationOverflow
from .hilbert import (DensityMatrix, HilbertLayout, annihilation,
                      kerr_operator, number_operator, qubit_projector)
from .transmon import QubitSpec

TOL_BOUNDS = (1e-12, 1e-4)
TRACE_TOL = 1e-6
TRUNCATION_TOL = 1e-4


@dataclass(frozen=True)
class IntegratorOptions:
    rel_tol: float = 1e-7
    abs_tol: float = 1e-9
    max_step: float | None = None
    method: str = "rk45"        # "rk45" | "rk45-bare"

    def __post_init__(self):
        for name, v in (("rel_tol", self.rel_tol), ("abs_tol", self.abs_tol)):
            if not (TOL_BOUNDS[0] <= v <= TOL_BOUNDS[1]):
                raise ValueError(f"{name}={v} outside {TOL_BOUNDS}")
        if self.method not in ("rk45", "rk45-bare"):
            raise ValueError(f"unknown method {self.method!r}")


@dataclass(frozen=True)
class ConstantEnvelope:
    eps: float

    def __call__(self, t):
        return self.eps


@dataclass(frozen=True)
class SimulationConfig:
    layout: HilbertLayout
    spec: QubitSpec
    ctx: DriveContext
    gamma: float = 0.0                       # 0<->1 decay rate (1/s)
    envelope: object = None                  # callable t -> eps (rad/s)
    integrator: IntegratorOptions = field(default_factory=IntegratorOptions)
    t_final: float = 2e-6
    observe_times: tuple | None = None       # defaults to 32 uniform intervals

    def __post_init__(self):
        if self.spec.M != self.layout.M:
            raise ValueError(f"spec has {self.spec.M} levels, layout {self.layout.M}")
        if self.gamma < 0:
            raise ValueError("gamma must be nonnegative")
        if self.t_final <= 0:
            raise ValueError("t_final must be positive")
        if self.envelope is None:
            object.__setattr__(self, "envelope", ConstantEnvelope(self.ctx.eps_d))

    def schedule(self):
        if self.observe_times is not None:
            ts = np.asarray(self.observe_times, dtype=float)
            ts = ts[(ts > 0) & (ts <= self.t_final)]
            return np.unique(np.concatenate([ts, [self.t_final]]))
        return np.linspace(0.0, self.t_final, 33)[1:]


@dataclass
class Trajectory:
    times: np.ndarray
    n_phot: np.ndarray
    a_mean: np.ndarray
    populations: np.ndarray     # (T, M)
    trace_dev: np.ndarray
    final: DensityMatrix

    @property
    def n_final(self):
        return float(self.n_phot[-1])


def basis_density(layout: HilbertLayout, level: int, fock: int = 0) -> DensityMatrix:
    rho = np.zeros((layout.dim, layout.dim), dtype=complex)
    k = layout.index(level, fock)
    rho[k, k] = 1.0
    return DensityMatrix(layout=layout, data=rho, time=0.0)


def build_hamiltonian(config: SimulationConfig, t: float) -> sp.csr_matrix:
    """Rotating-frame Hamiltonian at time t, including the drive envelope."""
    lay, spec, ctx = config.layout, config.spec, config.ctx
    H = _static_hamiltonian(lay, spec, ctx)
    a = annihilation(lay)
    eps = float(config.envelope(t))
    return (H + eps * (a + a.conj().T)).tocsr()


def _static_hamiltonian(lay, spec, ctx):
    w = np.asarray(spec.level_freqs)
    H = sp.csr_matrix((lay.dim, lay.dim), dtype=complex)
    for i in range(lay.M):
        H = H + (w[i] - i * ctx.omega_d) * qubit_projector(lay, i, i)
    H = H + (ctx.omega_r - ctx.omega_d) * number_operator(lay) \
        + 0.5 * ctx.K * kerr_operator(lay)
    a = annihilation(lay)
    for i in range(lay.M - 1):
        H = H + spec.couplings[i] * (
            a.conj().T @ qubit_projector(lay, i, i + 1)
            + a @ qubit_projector(lay, i + 1, i))
    return H.tocsr()


class _PhasedOp:
    """CSR operator whose data acquire exp(i*freq*t) in the interaction picture."""

    def __init__(self, op: sp.csr_matrix, site_energy: np.ndarray | None):
        op = op.tocsr().copy()
        op.sort_indices()
        coo = op.tocoo()
        order = np.lexsort((coo.col, coo.row))
        self.indices = op.indices
        self.indptr = op.indptr
        self.base = coo.data[order].astype(complex).copy()
        if site_energy is None:
            self.freqs = None
        else:
            self.freqs = (site_energy[coo.row] - site_energy[coo.col])[order].copy()
        self.buf = self.base.copy()

    def data_at(self, t):
        if self.freqs is None:
            return self.base
        K_.phase_mul(self.base, self.freqs, t, self.buf)
        return self.buf


class _Engine:
    """Prepared operators and the RHS for one SimulationConfig."""

    def __init__(self, config: SimulationConfig):
        self.config = config
        lay, spec, ctx = config.layout, config.spec, config.ctx
        self.d = lay.dim
        self.dressed = config.integrator.method == "rk45"
        H0 = _static_hamiltonian(lay, spec, ctx)
        a = annihilation(lay)
        X = (a + a.conj().T).tocsr()

        collapse = [(ctx.kappa, a)]
        if config.gamma > 0:
            g = np.asarray(spec.couplings)
            for i in range(lay.M - 1):
                weight = g[i] / g[0]
                collapse.append((config.gamma,
                                 (weight * qubit_projector(lay, i, i + 1)).tocsr()))
        anti = sp.csr_matrix((self.d, self.d), dtype=complex)
        for rate, c in collapse:
            anti = anti + rate * (c.conj().T @ c)

        if self.dressed:
            E, V = _block_eigh(lay, H0)
            self.E, self.V = E, V
            self.Vh = V.conj().T.tocsr()
            site = E
            tr = lambda op: (self.Vh @ op @ V).tocsr()
            self.H_static = None   # fully absorbed into the frame
        else:
            self.E, self.V, self.Vh = None, None, None
            site = None
            tr = lambda op: op.tocsr()
            self.H_static = _PhasedOp(H0, None)

        self.X = _PhasedOp(tr(X), site)
        self.sandwich = [(rate, _PhasedOp(tr(c), site)) for rate, c in collapse]
        self.anti = _PhasedOp(tr(anti), site)
        self.fock = lay.fock_numbers().astype(float)
        self.a_bare = a
        # work buffers
        self._W = np.empty((self.d, self.d), dtype=complex)
        self._T = np.empty((self.d, self.d), dtype=complex)
        self._out = np.empty((self.d, self.d), dtype=complex)

    # frame maps -------------------------------------------------------
    def to_frame(self, rho_bare, t=0.0):
        if not self.dressed:
            return np.array(rho_bare, dtype=complex)
        rho = self.Vh @ rho_bare @ self.V
        if t != 0.0:
            ph = np.exp(1j * self.E * t)
            rho = ph[:, None] * rho * ph.conj()[None, :]
        return np.asarray(rho)

    def to_bare(self, rho_frame, t):
        if not self.dressed:
            return np.array(rho_frame, dtype=complex)
        ph = np.exp(-1j * self.E * t)
        return np.asarray(self.V @ (ph[:, None] * rho_frame * ph.conj()[None, :])
                          @ self.Vh)

    # right-hand side ----------------------------------------------------
    def rhs(self, t, y):
        rho = y.reshape(self.d, self.d)
        out = self._out
        out[:] = 0.0
        W, T = self._W, self._T

        # -i [H(t), rho];  in the dressed frame H(t) is just the drive term
        eps = complex(self.config.envelope(t))
        W[:] = 0.0
        if eps != 0:
            K_.spmm_acc(self.X.data_at(t), self.X.indices, self.X.indptr,
                        rho, W, eps)
        if self.H_static is not None:
            K_.spmm_acc(self.H_static.data_at(t), self.H_static.indices,
                        self.H_static.indptr, rho, W, 1.0 + 0.0j)
        K_.acc_minus_dagger(W, out, -1.0j)

        # sandwich terms rate * C rho C^dag = rate * C (C rho)^dag
        for rate, c in self.sandwich:
            W[:] = 0.0
            K_.spmm_acc(c.data_at(t), c.indices, c.indptr, rho, W, 1.0 + 0.0j)
            K_.dagger(W, T)
            K_.spmm_acc(c.data_at(t), c.indices, c.indptr, T, out,
                        complex(rate))

        # -1/2 {A(t), rho} with A = sum rate C^dag C (hermitian)
        W[:] = 0.0
        K_.spmm_acc(self.anti.data_at(t), self.anti.indices, self.anti.indptr,
                    rho, W, 1.0 + 0.0j)
        K_.acc_plus_dagger(W, out, -0.5)
        return out.ravel().copy()

    # observables ----------------------------------------------------------
    def observe(self, rho_frame, t):
        rho = self.to_bare(rho_frame, t)
        diag = np.diag(rho).real
        lay = self.config.layout
        pops_fock = diag.reshape(lay.M, lay.N).sum(axis=0)
        n_phot = float((self.fock * diag).sum())
        a_mean = complex((self.a_bare @ rho).diagonal().sum())
        pops_q = diag.reshape(lay.M, lay.N).sum(axis=1)
        trace = float(diag.sum())
        top2 = float(pops_fock[-1] + pops_fock[-2])
        return rho, n_phot, a_mean, pops_q, trace, top2


def _block_eigh(lay: HilbertLayout, H0: sp.csr_matrix):
    """Exact eigendecomposition of the excitation-conserving static Hamiltonian.

    Returns (E, V) with V sparse (block columns), H0 = V diag(E) V^dag.
    """
    M, N = lay.M, lay.N
    d = lay.dim
    Hl = H0.tolil()
    E = np.zeros(d)
    rows, cols, vals = [], [], []
    for C in range(N + M - 1):
        idxs = [i * N + (C - i) for i in range(M) if 0 <= C - i < N]
        sub = np.array([[complex(Hl[r, c]) for c in idxs] for r in idxs])
        if np.abs(sub.imag).max(initial=0.0) > 0:
            raise ValueError("static Hamiltonian blocks must be real symmetric")
        ev, evec = np.linalg.eigh(sub.real)
        for k, col in enumerate(idxs):
            E[col] = ev[k]
            for j, row in enumerate(idxs):
                if evec[j, k] != 0.0:
                    rows.append(row)
                    cols.append(col)
                    vals.append(evec[j, k])
    V = sp.csr_matrix((vals, (rows, cols)), shape=(d, d))
    return E, V


def evolve(config: SimulationConfig, rho0: DensityMatrix | np.ndarray | None = None,
           initial_level: int = 0) -> Trajectory:
    """Integrate the master equation and return scheduled observables.

    rho0 defaults to |initial_level> ⊗ vacuum. Raises TruncationOverflow when
    the top two Fock levels accumulate more than 1e-4 population at any output
    time, and StepSizeUnderflow if the integrator fails to advance.
    """
    lay = config.layout
    if rho0 is None:
        rho0 = basis_density(lay, initial_level)
    mat = rho0.data if isinstance(rho0, DensityMatrix) else np.asarray(rho0)
    if mat.shape != (lay.dim, lay.dim):
        raise ValueError(f"rho0 shape {mat.shape} != ({lay.dim},{lay.dim})")

    eng = _Engine(config)
    opts = config.integrator
    times = config.schedule()
    y = eng.to_frame(mat).ravel()

    out_t, out_n, out_a, out_p, out_tr = [], [], [], [], []
    t_prev = 0.0
    rho_bare = None
    for t_next in times:
        sol = solve_ivp(eng.rhs, (t_prev, t_next), y, method="RK45",
                        rtol=opts.rel_tol, atol=opts.abs_tol,
                        max_step=opts.max_step or np.inf,
                        t_eval=(t_next,), dense_output=False)
        if sol.status != 0 or not sol.success:
            raise StepSizeUnderflow(
                f"integration failed in [{t_prev:.3e}, {t_next:.3e}] s: {sol.message}")
        y = sol.y[:, -1]
        rho_bare, n_phot, a_mean, pops, trace, top2 = eng.observe(
            y.reshape(lay.dim, lay.dim), t_next)
        if top2 > TRUNCATION_TOL:
            raise TruncationOverflow(
                f"top two Fock levels hold {top2:.2e} population at "
                f"t = {t_next:.3e} s (N = {lay.N})")
        out_t.append(t_next)
        out_n.append(n_phot)
        out_a.append(a_mean)
        out_p.append(pops)
        out_tr.append(abs(trace - 1.0))
        t_prev = t_next

    final = DensityMatrix(layout=lay, data=rho_bare, time=float(times[-1]))
    return Trajectory(times=np.asarray(out_t), n_phot=np.asarray(out_n),
                      a_mean=np.asarray(out_a), populations=np.asarray(out_p),
                      trace_dev=np.asarray(out_tr), final=final)


def steady_photon_number(config: SimulationConfig, initial_level: int,
                         max_retries: int = 2) -> float:
    """<a^dag a> after evolving from |initial_level> ⊗ vacuum for t_final.

    On TruncationOverflow the Fock truncation is enlarged by 40% (at most
    max_retries times) and the run repeated.
    """
    cfg = config
    for attempt in range(max_retries + 1):
        try:
            return evolve(cfg, initial_level=initial_level).n_final
        except TruncationOverflow:
            if attempt == max_retries:
                raise
            new_n = min(int(np.ceil(cfg.layout.N * 1.4 / 8) * 8), 512)
            if new_n == cfg.layout.N:
                raise
            cfg = replace(cfg, layout=HilbertLayout(cfg.layout.M, new_n))
    raise AssertionError("unreachable")
