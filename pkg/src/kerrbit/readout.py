"""Sample-and-hold bifurcation readout: pulse shapes, Q-function classification,
error probabilities, and the grid optimizer.

The pulse ramps linearly to a sample amplitude eps_s over sigma, holds it for
t_s, steps down by d_eps over a fixed 10 ns edge, and holds the lower plateau
until sigma + t_s + t_hold. At the end of the hold the resonator Q function is
split at a radius between the semiclassical L and H amplitudes; the weight
beyond the radius is the switching probability.
"""
from __future__ import annotations

from dataclasses import dataclass, field, replace

import numpy as np

from .dispersive import DriveContext, coefficients
from .errors import NotBistable, PeaksUnresolved
from .hilbert import DensityMatrix, phase_grid, q_function
from .lindblad import SimulationConfig, Trajectory, evolve
from .semiclassical import steady_amplitudes
from .transmon import QubitSpec

STEP_DOWN_EDGE = 10e-9  # fixed step-down edge duration (s)


@dataclass(frozen=True)
class PulseProgram:
    """Sample-and-hold envelope parameters (durations s, amplitudes rad/s)."""

    sigma: float
    eps_s: float
    t_s: float
    d_eps: float
    t_hold: float = 500e-9

    def __post_init__(self):
        if min(self.sigma, self.t_s, self.t_hold) < 0:
            raise ValueError("durations must be nonnegative")
        if not (0 <= self.d_eps < self.eps_s):
            raise ValueError("step-down must satisfy 0 <= d_eps < eps_s")
        if self.t_hold > 0 and self.t_hold < STEP_DOWN_EDGE:
            raise ValueError("hold must be at least the 10 ns step-down edge")

    @property
    def duration(self):
        return self.sigma + self.t_s + self.t_hold

    @property
    def eps_hold(self):
        return self.eps_s - self.d_eps

    def envelope(self) -> "SampleHoldEnvelope":
        return SampleHoldEnvelope(self)


@dataclass(frozen=True)
class SampleHoldEnvelope:
    """Piecewise-linear drive amplitude; continuous everywhere."""

    program: PulseProgram

    def knots(self):
        p = self.program
        t_step = p.sigma + p.t_s
        return (np.array([0.0, p.sigma, t_step, t_step + STEP_DOWN_EDGE,
                          p.sigma + p.t_s + p.t_hold]),
                np.array([0.0, p.eps_s, p.eps_s, p.eps_hold, p.eps_hold]))

    def __call__(self, t):
        tk, ek = self.knots()
        return np.interp(t, tk, ek, left=0.0, right=ek[-1])


@dataclass
class ClassifyResult:
    p_switch: float
    r_star: float
    n_peaks: int
    peak_separation: float
    grid_weight: float
    q_grid: np.ndarray | None = None


@dataclass
class ReadoutOutcome:
    p_given: dict            # {(j, i): P(assign j | prepared i)}
    p_error: float
    r_star: float
    h_maps_to: int           # qubit label assigned to the latched (H) outcome
    diagnostics: dict = field(default_factory=dict)


def classification_radius(spec: QubitSpec, ctx: DriveContext, eps_hold: float,
                          levels=(0, 1)) -> float:
    """(|alpha_L| + |alpha_H|)/2 at the hold amplitude, averaged over the
    readout levels that are bistable there."""
    ctx_h = replace(ctx, eps_d=eps_hold)
    lows, highs = [], []
    for lev in levels:
        sols = steady_amplitudes(spec, ctx_h, lev)
        branches = {s.branch: abs(s.alpha) for s in sols}
        if "L" in branches:
            lows.append(branches["L"])
        if "H" in branches:
            highs.append(branches["H"])
    if not lows or not highs:
        raise NotBistable(
            f"hold amplitude {eps_hold:.3e} rad/s is outside the hysteresis "
            f"window for levels {levels}")
    return 0.5 * (float(np.mean(lows)) + float(np.mean(highs)))


def classify(rho: DensityMatrix, r_star: float, grid_extent: float,
             n_grid: int = 101, keep_grid: bool = False) -> ClassifyResult:
    """Switching probability: normalized Q weight at |alpha| > r_star."""
    alphas, cell = phase_grid(grid_extent, n_grid)
    q = q_function(rho, alphas, cell_area=cell)
    q = np.clip(q, 0.0, None)
    total = float(q.sum() * cell)
    radii = np.abs(alphas)
    outside = float(q[radii > r_star].sum() * cell)
    p_switch = outside / total if total > 0 else 0.0

    n_peaks, sep = _peak_diagnostics(q, alphas)
    if n_peaks < 2:
        inner = 1.0 - p_switch
        if min(inner, p_switch) > 0.02 and sep < 2.0 * (2 * grid_extent / (n_grid - 1)):
            raise PeaksUnresolved(
                f"single Q peak spans the classification radius r*={r_star:.2f}")
    return ClassifyResult(p_switch=p_switch, r_star=r_star, n_peaks=n_peaks,
                          peak_separation=sep, grid_weight=total,
                          q_grid=q if keep_grid else None)


def _peak_diagnostics(q, alphas):
    """Count local maxima above 5% of the global maximum."""
    qm = q.max()
    if qm <= 0:
        return 0, 0.0
    core = q[1:-1, 1:-1]
    neigh = np.stack([q[:-2, 1:-1], q[2:, 1:-1], q[1:-1, :-2], q[1:-1, 2:],
                      q[:-2, :-2], q[:-2, 2:], q[2:, :-2], q[2:, 2:]])
    is_peak = (core >= neigh.max(axis=0)) & (core > 0.05 * qm)
    ii, jj = np.nonzero(is_peak)
    if ii.size == 0:
        return 0, 0.0
    pos = alphas[1:-1, 1:-1][ii, jj]
    # merge plateau-adjacent peaks
    uniq = []
    for p in pos:
        if all(abs(p - u) > 1e-9 for u in uniq):
            uniq.append(p)
    if len(uniq) < 2:
        return len(uniq), 0.0
    vals = core[ii, jj]
    top = np.argsort(vals)[::-1][:2]
    return len(uniq), float(abs(pos[top[0]] - pos[top[1]]))


def measure(config: SimulationConfig, program: PulseProgram, initial_level: int,
            n_grid: int = 101, keep_grid: bool = False):
    """Run the pulsed readout for one prepared level; returns (ClassifyResult,
    Trajectory)."""
    traj = _pulse_trajectory(config, program, initial_level)
    return _classify_final(config, program, traj, n_grid, keep_grid), traj


def _pulse_trajectory(config: SimulationConfig, program: PulseProgram,
                      initial_level: int) -> Trajectory:
    cfg = replace(config, envelope=program.envelope(), t_final=program.duration,
                  observe_times=_pulse_schedule(program))
    return evolve(cfg, initial_level=initial_level)


def _pulse_schedule(program: PulseProgram):
    marks = [program.sigma, program.sigma + program.t_s, program.duration]
    fill = np.linspace(0.0, program.duration, 17)[1:]
    return tuple(np.unique(np.concatenate([marks, fill])))


def _classify_final(config, program, traj, n_grid=101, keep_grid=False):
    r_star = classification_radius(config.spec, config.ctx, program.eps_hold)
    ctx_h = replace(config.ctx, eps_d=program.eps_hold)
    highs = [abs(s.alpha) for lev in (0, 1)
             for s in steady_amplitudes(config.spec, ctx_h, lev)
             if s.branch == "H"]
    extent = 1.2 * max(highs)
    return classify(traj.final, r_star, extent, n_grid=n_grid,
                    keep_grid=keep_grid)


def switching_order(spec: QubitSpec, ctx: DriveContext) -> int:
    """Qubit label that latches (reaches H) first as the drive grows: the level
    with the lower bifurcation threshold."""
    from .semiclassical import thresholds

    eps_h = {}
    for lev in (0, 1):
        eps_h[lev] = thresholds(spec, ctx, lev).eps_H
    return 0 if eps_h[0] < eps_h[1] else 1


def error_probability(config: SimulationConfig, program: PulseProgram,
                      h_label: int | None = None) -> ReadoutOutcome:
    """Worst-case assignment error over preparations {0, 1}.

    The latched (H) resonator outcome is mapped to the qubit label that
    switches first at this operating point (computed, never hard-coded),
    unless `h_label` overrides it.
    """
    if h_label is None:
        h_label = switching_order(config.spec, config.ctx)
    p_given = {}
    diagnostics = {}
    r_star = None
    for prep in (0, 1):
        res, _ = measure(config, program, prep)
        r_star = res.r_star
        p_h = res.p_switch
        p_given[(h_label, prep)] = p_h
        p_given[(1 - h_label, prep)] = 1.0 - p_h
        diagnostics[prep] = {"n_peaks": res.n_peaks,
                             "grid_weight": res.grid_weight}
    p_error = max(p_given[(1, 0)], p_given[(0, 1)])
    return ReadoutOutcome(p_given=p_given, p_error=p_error, r_star=r_star,
                          h_maps_to=h_label, diagnostics=diagnostics)


@dataclass
class OptimizeResult:
    t_s: float
    best: PulseProgram
    p_error: float
    outcome: ReadoutOutcome
    failures: list


def optimize(config: SimulationConfig, t_s_list, sigma_list, d_eps_list,
             eps_s_list, t_hold: float = 500e-9):
    """Exhaustive grid search; per t_s, the argmin-P_error program.

    Ties break to the smallest sigma, then the smallest eps_s. Grid points that
    fail (truncation, unresolved peaks) are recorded, not fatal. The sample
    trajectory for one (sigma, eps_s) is shared across t_s snapshots and
    step-down depths where possible by rerunning only the hold segment.
    """
    h_label = switching_order(config.spec, config.ctx)
    results = {float(ts): None for ts in t_s_list}
    failures = []
    for eps_s in eps_s_list:
        for sigma in sigma_list:
            for t_s in t_s_list:
                for d_eps in d_eps_list:
                    prog = PulseProgram(sigma=float(sigma), eps_s=float(eps_s),
                                        t_s=float(t_s), d_eps=float(d_eps),
                                        t_hold=t_hold)
                    try:
                        out = error_probability(config, prog, h_label=h_label)
                    except Exception as exc:  # record and continue
                        failures.append((prog, repr(exc)))
                        continue
                    cur = results[float(t_s)]
                    cand = (out.p_error, prog.sigma, prog.eps_s)
                    if cur is None or cand < (cur.p_error, cur.best.sigma,
                                              cur.best.eps_s):
                        results[float(t_s)] = OptimizeResult(
                            t_s=float(t_s), best=prog, p_error=out.p_error,
                            outcome=out, failures=[])
    for ts, res in results.items():
        if res is not None:
            res.failures = [f for f in failures if f[0].t_s == ts]
    return results
