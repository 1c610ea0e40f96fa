"""Monte Carlo wave-function simulation of the full two-atom system.

Unravels the Bloch equation into pure-state trajectories with photon
emission records, converts records to moving-window intensity traces,
classifies intensity periods, and estimates telegraph statistics -- the
end-to-end verification path that bypasses the analytic theory.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.linalg import expm

from .kernels import get_backend
from .model import (
    G, DickeOperators, DipoleCoupling, ModelParams, build_operators,
    single_atom_intensity,
)
from .telegraph import EstimatedStatistics, PeriodSequence, estimate_statistics

CHANNEL_NAMES = ("plus", "minus")


@dataclass(frozen=True)
class TrajectoryConfig:
    """One trajectory run: physics, duration, step and stream seed."""

    params: ModelParams
    coupling: DipoleCoupling
    total_time: float
    dt: float = 0.01
    seed: int = 0
    initial_state: np.ndarray | None = None  # default |g>
    n_bisect: int = 10  # jump-time resolution dt / 2^n_bisect

    def __post_init__(self):
        if self.total_time <= 0:
            raise ValueError("total_time must be positive")
        limit = 0.05 / max(self.params.a3, self.params.omega3)
        if self.dt > limit:
            raise ValueError(f"dt = {self.dt} too coarse; need dt <= {limit}")
        if not 0 <= self.seed < 2**64:
            raise ValueError("seed must fit in uint64")
        if self.n_bisect < 1:
            raise ValueError("n_bisect must be >= 1")

    def state0(self) -> np.ndarray:
        if self.initial_state is None:
            psi = np.zeros(9, dtype=complex)
            psi[G] = 1.0
            return psi
        psi = np.asarray(self.initial_state, dtype=complex)
        if psi.shape != (9,):
            raise ValueError("initial_state must be a 9-vector")
        return psi / np.linalg.norm(psi)


@dataclass(frozen=True)
class EmissionRecord:
    """Ordered photon emission times with jump-channel labels."""

    times: np.ndarray
    channels: np.ndarray  # 0 = plus, 1 = minus
    total_time: float

    def __post_init__(self):
        t = np.asarray(self.times, dtype=float)
        if len(t) and (np.any(np.diff(t) <= 0) or t[0] <= 0 or t[-1] > self.total_time):
            raise ValueError("emission times must be strictly increasing in "
                             "(0, total_time]")

    def __len__(self) -> int:
        return len(self.times)

    def to_text(self) -> str:
        lines = [f"# total_time={self.total_time:.12g}"]
        for t, c in zip(self.times, self.channels):
            lines.append(f"{t:.12g} {CHANNEL_NAMES[c]}")
        return "\n".join(lines) + "\n"

    @classmethod
    def from_text(cls, text: str) -> "EmissionRecord":
        lines = text.strip().splitlines()
        if not lines or not lines[0].startswith("# total_time="):
            raise ValueError("missing '# total_time=' header")
        total_time = float(lines[0].split("=", 1)[1])
        times, chans = [], []
        for line in lines[1:]:
            if not line or line.startswith("#"):
                continue
            t, name = line.split()
            times.append(float(t))
            chans.append(CHANNEL_NAMES.index(name))
        return cls(np.array(times), np.array(chans, dtype=np.int8), total_time)


@dataclass(frozen=True)
class IntensityTrace:
    """Moving-window emission rate on a regular grid.

    values[k] counts emissions in [times[k], times[k] + window) / window.
    """

    times: np.ndarray
    values: np.ndarray
    window: float
    grid_step: float

    @property
    def span(self) -> float:
        return float(self.times[-1] + self.grid_step) if len(self.times) else 0.0

    def to_text(self) -> str:
        lines = [f"# window={self.window:.12g} grid_step={self.grid_step:.12g}"]
        lines += [f"{t:.12g} {v:.12g}" for t, v in zip(self.times, self.values)]
        return "\n".join(lines) + "\n"

    @classmethod
    def from_text(cls, text: str) -> "IntensityTrace":
        lines = text.strip().splitlines()
        head = dict(tok.split("=") for tok in lines[0].lstrip("# ").split())
        times, values = [], []
        for line in lines[1:]:
            t, v = line.split()
            times.append(float(t))
            values.append(float(v))
        return cls(times=np.array(times), values=np.array(values),
                   window=float(head["window"]),
                   grid_step=float(head["grid_step"]))


def _propagators(ops: DickeOperators, dt: float, n_bisect: int):
    h = ops.h_cond
    u_full = np.ascontiguousarray(expm(-1j * h * dt))
    u_frac = np.ascontiguousarray(
        [expm(-1j * h * (dt / 2.0 ** (k + 1))) for k in range(n_bisect)])
    return u_full, u_frac


def _stream(seed: int, index: int) -> np.random.Generator:
    # counter-based Philox keyed by (seed, trajectory index): reproducible
    # regardless of scheduling order
    return np.random.Generator(np.random.Philox(key=(seed << 64) + index))


def run_trajectory(config: TrajectoryConfig, index: int = 0,
                   backend: str | None = None,
                   _return_state: bool = False):
    """Simulate one quantum trajectory; returns its EmissionRecord.

    Pure-state evolution under the non-Hermitian H_cond with norm-threshold
    jump detection; at each jump the channel is drawn from the weighted
    R+/R- jump norms and the state reset and renormalized.
    """
    ops = build_operators(config.params, config.coupling)
    ops.require_positive_channels()
    u_full, u_frac = _propagators(ops, config.dt, config.n_bisect)
    gen = _stream(config.seed, index)
    mod, _ = get_backend(backend)
    times, channels, psi = mod.evolve(
        u_full, u_frac, ops.rplus, ops.rminus,
        ops.gamma_plus, ops.gamma_minus,
        config.state0(), config.total_time, config.dt, gen.random)
    record = EmissionRecord(times=times, channels=channels,
                            total_time=config.total_time)
    if _return_state:
        return record, psi / np.linalg.norm(psi)
    return record


def final_state(config: TrajectoryConfig, index: int = 0,
                backend: str | None = None) -> np.ndarray:
    """Normalized conditional state at total_time (for ensemble checks)."""
    _, psi = run_trajectory(config, index, backend, _return_state=True)
    return psi


def ensemble_density_matrix(config: TrajectoryConfig, n_traj: int,
                            backend: str | None = None) -> np.ndarray:
    """Ensemble average of |psi><psi| over n_traj trajectories."""
    acc = np.zeros((9, 9), dtype=complex)
    for k in range(n_traj):
        psi = final_state(config, index=k, backend=backend)
        acc += np.outer(psi, psi.conj())
    return acc / n_traj


def intensity_trace(record: EmissionRecord, dt_w: float,
                    grid_divisor: int = 8) -> IntensityTrace:
    """Sliding-count intensity on a grid of step dt_w / grid_divisor."""
    if dt_w <= 0:
        raise ValueError("dt_w must be positive")
    if grid_divisor < 4:
        raise ValueError("grid_divisor must be >= 4")
    step = dt_w / grid_divisor
    n_pts = int(np.floor((record.total_time - dt_w) / step)) + 1
    if n_pts <= 0:
        raise ValueError("record shorter than one window")
    starts = np.arange(n_pts) * step
    lo = np.searchsorted(record.times, starts, side="left")
    hi = np.searchsorted(record.times, starts + dt_w, side="left")
    return IntensityTrace(times=starts, values=(hi - lo) / dt_w,
                          window=dt_w, grid_step=step)


def default_thresholds(params: ModelParams) -> tuple[float, float]:
    """(0.5, 1.5) x the single-atom light-period emission rate."""
    i1 = single_atom_intensity(params)
    return 0.5 * i1, 1.5 * i1


def classify_periods(trace: IntensityTrace,
                     thresholds: tuple[float, float],
                     hysteresis: int = 2) -> PeriodSequence:
    """Hysteresis classification of the trace into periods of level 0/1/2.

    The state switches only after `hysteresis` consecutive grid points in
    the band of a new level (1 = plain thresholding); the period boundary
    is placed at the first of those points.
    """
    t1, t2 = thresholds
    if not t1 < t2:
        raise ValueError("thresholds must satisfy t1 < t2")
    if hysteresis < 1:
        raise ValueError("hysteresis must be >= 1")
    lv = np.digitize(trace.values, [t1, t2]).astype(np.int8)
    levels, starts = [], []
    cur = int(lv[0])
    levels.append(cur)
    starts.append(float(trace.times[0]))
    pend_level = -1
    pend_count = 0
    pend_at = 0.0
    for k in range(1, len(lv)):
        v = int(lv[k])
        if v == cur:
            pend_level = -1
            pend_count = 0
            continue
        if v != pend_level:
            pend_level = v
            pend_count = 1
            pend_at = float(trace.times[k])
        else:
            pend_count += 1
        if pend_count >= hysteresis:
            cur = v
            levels.append(cur)
            starts.append(pend_at)
            pend_level = -1
            pend_count = 0
    starts = np.array(starts)
    bounds = np.append(starts, trace.span)
    return PeriodSequence(levels=np.array(levels, dtype=np.int8),
                          starts=starts, durations=np.diff(bounds),
                          total_time=trace.span)


def simulate_period_statistics(config: TrajectoryConfig, n_traj: int,
                               dt_w: float, dt_dj: float,
                               grid_divisor: int = 8,
                               hysteresis: int = 2,
                               backend: str | None = None) -> EstimatedStatistics:
    """Full pipeline: trajectories -> traces -> periods -> statistics."""
    seqs = []
    for k in range(n_traj):
        rec = run_trajectory(config, index=k, backend=backend)
        tr = intensity_trace(rec, dt_w, grid_divisor)
        seqs.append(classify_periods(tr, default_thresholds(config.params),
                                     hysteresis))
    return estimate_statistics(seqs, dt_dj)
