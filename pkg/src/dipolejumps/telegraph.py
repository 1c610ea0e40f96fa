"""Three-step telegraph statistics of the fluorescence periods.

Closed-form occurrence rates, mean durations and double-jump rates from the
four transition rates; corrections for the finite averaging window that
censors short periods; and a continuous-time Markov-chain simulator used as
an internal oracle for both.
"""
from __future__ import annotations

import warnings
from dataclasses import dataclass, field

import numpy as np

from .rates import TransitionRates


class EstimationError(ValueError):
    """Not enough data to estimate period statistics."""


@dataclass(frozen=True)
class TelegraphModel:
    """Rates plus the two observation windows.

    dt_dj is the double-jump window Delta T_DJ, dt_w the moving averaging
    window Delta T_w; periods shorter than about cutoff_fraction * dt_w are
    overlooked (censoring cutoff dtau).
    """

    rates: TransitionRates
    dt_dj: float
    dt_w: float
    cutoff_fraction: float = 2.0 / 3.0

    def __post_init__(self):
        if self.dt_dj <= self.dt_w:
            raise ValueError(
                f"dt_dj ({self.dt_dj}) must be larger than dt_w ({self.dt_w})")
        if not 0.5 <= self.cutoff_fraction <= 0.8:
            raise ValueError("cutoff_fraction outside the validated [0.5, 0.8]")

    @property
    def dtau(self) -> float:
        return self.cutoff_fraction * self.dt_w


@dataclass(frozen=True)
class TelegraphStatistics:
    """Period occurrence rates, mean durations, double-jump rates.

    n_dj uses the exact exponential window factor, n_dj_lin the linearized
    form; *_cor are the averaging-window corrected variants (equal to the
    ideal values when dtau = 0).
    """

    n0: float
    n1: float
    n2: float
    t0: float
    t1: float
    t2: float
    n_dj_up: float
    n_dj_down: float
    n_dj: float
    n_dj_lin: float
    n2_cor: float
    t0_cor: float
    t1_cor: float
    t2_cor: float
    n_dj_cor: float
    dtau: float = 0.0
    notes: tuple = ()


def ideal_statistics(rates: TransitionRates, dt_dj: float) -> TelegraphStatistics:
    """Telegraph statistics without any averaging-window correction.

    T0 = 1/p01, T1 = 1/(p10+p12), T2 = 1/p21; occurrence rates follow from
    the branching ratios out of the single-intensity periods, and the
    up/down double-jump rates are equal by construction.
    """
    p01, p10, p12, p21 = rates.as_tuple()
    if min(p01, p10, p12, p21) <= 0:
        raise ValueError("all four transition rates must be positive")
    s = p01 * p21 + p21 * p10 + p01 * p12
    n0 = p01 * p21 * p10 / s
    n2 = p01 * p21 * p12 / s
    n1 = n0 + n2
    t0, t1, t2 = 1.0 / p01, 1.0 / (p10 + p12), 1.0 / p21
    window = 1.0 - np.exp(-(p10 + p12) * dt_dj)
    # up and down rates share one expression (n2 p10 = n0 p12 identically)
    n_dj_down = p01 * p21 * p12 * p10 / s / (p10 + p12) * window
    n_dj_up = n_dj_down
    n_dj_lin = 2.0 * p01 * p10 * p12 * p21 / s * dt_dj
    return TelegraphStatistics(
        n0=n0, n1=n1, n2=n2, t0=t0, t1=t1, t2=t2,
        n_dj_up=n_dj_up, n_dj_down=n_dj_down, n_dj=n_dj_up + n_dj_down,
        n_dj_lin=n_dj_lin,
        n2_cor=n2, t0_cor=t0, t1_cor=t1, t2_cor=t2,
        n_dj_cor=n_dj_up + n_dj_down, dtau=0.0,
    )


def window_corrected_statistics(model: TelegraphModel) -> TelegraphStatistics:
    """Statistics corrected for periods censored by the averaging window.

    n2_cor = n2 exp(-p21 dtau); the corrected double-jump rate inserts
    n2_cor into the downward-jump formula and doubles it (up equals down).
    The corrected mean durations add dtau * (1 + merge term) to the ideal
    values.
    """
    p01, p10, p12, p21 = model.rates.as_tuple()
    ideal = ideal_statistics(model.rates, model.dt_dj)
    dtau = model.dtau
    notes = []
    for name, t in (("t0", ideal.t0), ("t1", ideal.t1), ("t2", ideal.t2)):
        if dtau / t >= 0.2:
            notes.append(f"dtau/{name} = {dtau / t:.2f} >= 0.2; correction "
                         "formulas are first order in dtau")
    if notes:
        warnings.warn("; ".join(notes), stacklevel=2)
    n2_cor = ideal.n2 * np.exp(-p21 * dtau)
    window = 1.0 - np.exp(-(p10 + p12) * model.dt_dj)
    n_dj_down_cor = n2_cor * p10 / (p10 + p12) * window
    t1_cor = ideal.t1 + dtau * (1.0 + (p01 * p10 + p12 * p21) / (p10 + p12) ** 2)
    t0_cor = ideal.t0 + dtau * (1.0 + p10 / p01)
    t2_cor = ideal.t2 + dtau * (1.0 + p12 / p21)
    return TelegraphStatistics(
        n0=ideal.n0, n1=ideal.n1, n2=ideal.n2,
        t0=ideal.t0, t1=ideal.t1, t2=ideal.t2,
        n_dj_up=ideal.n_dj_up, n_dj_down=ideal.n_dj_down, n_dj=ideal.n_dj,
        n_dj_lin=ideal.n_dj_lin,
        n2_cor=n2_cor, t0_cor=t0_cor, t1_cor=t1_cor, t2_cor=t2_cor,
        n_dj_cor=2.0 * n_dj_down_cor, dtau=dtau, notes=tuple(notes),
    )


@dataclass(frozen=True)
class PeriodSequence:
    """Classified intensity periods: level in {0, 1, 2}, start, duration."""

    levels: np.ndarray
    starts: np.ndarray
    durations: np.ndarray
    total_time: float

    def __post_init__(self):
        object.__setattr__(self, "levels", np.asarray(self.levels, dtype=np.int8))
        object.__setattr__(self, "starts", np.asarray(self.starts, dtype=float))
        object.__setattr__(self, "durations", np.asarray(self.durations, dtype=float))

    def __len__(self) -> int:
        return len(self.levels)

    def interior(self) -> "PeriodSequence":
        """Drop the partial first and last periods."""
        if len(self) <= 2:
            return PeriodSequence(self.levels[:0], self.starts[:0],
                                  self.durations[:0], self.total_time)
        return PeriodSequence(self.levels[1:-1], self.starts[1:-1],
                              self.durations[1:-1], self.total_time)

    def to_text(self) -> str:
        lines = [f"{int(l)} {s:.12g} {d:.12g}"
                 for l, s, d in zip(self.levels, self.starts, self.durations)]
        return "\n".join(lines) + ("\n" if lines else "")

    @classmethod
    def from_text(cls, text: str, total_time: float | None = None) -> "PeriodSequence":
        levels, starts, durs = [], [], []
        for line in text.strip().splitlines():
            if not line or line.startswith("#"):
                continue
            l, s, d = line.split()
            levels.append(int(l)); starts.append(float(s)); durs.append(float(d))
        if total_time is None:
            total_time = (starts[-1] + durs[-1]) if starts else 0.0
        return cls(np.array(levels), np.array(starts), np.array(durs), total_time)


def simulate_telegraph(rates: TransitionRates, total_time: float,
                       seed: int, start_level: int = 1) -> PeriodSequence:
    """Continuous-time Markov chain over intensity levels {0, 1, 2}.

    Exponential holding times 1/p01, 1/(p10+p12), 1/p21 and branching
    p10 : p12 out of level 1; direct 0<->2 transitions never occur.
    Holding times beyond total_time are truncated.  p12 = 0 (never reach
    level 2) and p10 = 0 are tolerated.
    """
    p01, p10, p12, p21 = rates.as_tuple()
    if p01 <= 0 or p21 <= 0 or p10 + p12 <= 0 or p10 < 0 or p12 < 0:
        raise ValueError("rates must be positive (p10/p12 may be zero singly)")
    rng = np.random.Generator(np.random.Philox(key=seed))
    hold = {0: p01, 1: p10 + p12, 2: p21}
    branch10 = p10 / (p10 + p12)
    levels, starts, durs = [], [], []
    t = 0.0
    level = start_level
    while t < total_time:
        dur = rng.exponential(1.0 / hold[level])
        dur = min(dur, total_time - t)
        levels.append(level); starts.append(t); durs.append(dur)
        t += dur
        if level == 0:
            level = 1
        elif level == 2:
            level = 1
        else:
            level = 0 if rng.random() < branch10 else 2
    return PeriodSequence(np.array(levels), np.array(starts), np.array(durs),
                          total_time)


def count_double_jumps(seq: PeriodSequence, dt_dj: float) -> tuple[int, int]:
    """(upward, downward) double jumps: 0->1->2 / 2->1->0 with the
    intermediate level-1 period shorter than dt_dj."""
    lv, du = seq.levels, seq.durations
    up = down = 0
    for k in range(1, len(lv) - 1):
        if lv[k] != 1 or du[k] >= dt_dj:
            continue
        if lv[k - 1] == 0 and lv[k + 1] == 2:
            up += 1
        elif lv[k - 1] == 2 and lv[k + 1] == 0:
            down += 1
    return up, down


def censor_periods(seq: PeriodSequence, dtau: float) -> PeriodSequence:
    """Delete periods of duration <= dtau and merge equal-level neighbors.

    Models what a moving averaging window does to the record: short periods
    are invisible, so the periods they used to separate fuse (the invisible
    gap itself is dropped from the merged duration, matching the
    convolution picture of the correction theory).
    """
    keep = seq.durations > dtau
    levels, starts, durs = [], [], []
    for l, s, d in zip(seq.levels[keep], seq.starts[keep], seq.durations[keep]):
        if levels and levels[-1] == l:
            durs[-1] += d
        else:
            levels.append(int(l)); starts.append(float(s)); durs.append(float(d))
    return PeriodSequence(np.array(levels, dtype=np.int8), np.array(starts),
                          np.array(durs), seq.total_time)


@dataclass(frozen=True)
class EstimatedStatistics:
    """Empirical telegraph statistics with standard errors.

    Field-for-field comparable with TelegraphStatistics; counts retained
    for rate inference.  Rates are per unit observed (interior) time.
    """

    n0: float
    n1: float
    n2: float
    t0: float
    t1: float
    t2: float
    n_dj_up: float
    n_dj_down: float
    n_dj: float
    n0_err: float
    n1_err: float
    n2_err: float
    t0_err: float
    t1_err: float
    t2_err: float
    n_dj_err: float
    counts: dict = field(default_factory=dict)
    observed_time: float = 0.0


def estimate_statistics(sequences: list[PeriodSequence],
                        dt_dj: float) -> EstimatedStatistics:
    """Empirical T_i, n_i and double-jump rates from classified sequences.

    Partial periods at each record's boundaries are discarded.  Counting
    errors are Poisson; duration errors are sample standard errors.
    """
    interior = [s.interior() for s in sequences]
    n_total = sum(len(s) for s in interior)
    if n_total < 100:
        raise EstimationError(f"only {n_total} interior periods; need >= 100")
    obs_time = float(sum(s.durations.sum() for s in interior))
    durs = {lv: np.concatenate([s.durations[s.levels == lv] for s in interior])
            for lv in (0, 1, 2)}
    t_mean, t_err, n_rate, n_err, counts = {}, {}, {}, {}, {}
    for lv in (0, 1, 2):
        d = durs[lv]
        counts[lv] = len(d)
        if len(d) == 0:
            t_mean[lv] = np.nan
            t_err[lv] = np.nan
        else:
            t_mean[lv] = float(d.mean())
            t_err[lv] = float(d.std(ddof=1) / np.sqrt(len(d))) if len(d) > 1 else np.nan
        n_rate[lv] = counts[lv] / obs_time
        n_err[lv] = np.sqrt(max(counts[lv], 1)) / obs_time
    up = down = 0
    for s in interior:
        u, d = count_double_jumps(s, dt_dj)
        up += u
        down += d
    n_dj = (up + down) / obs_time
    return EstimatedStatistics(
        n0=n_rate[0], n1=n_rate[1], n2=n_rate[2],
        t0=t_mean[0], t1=t_mean[1], t2=t_mean[2],
        n_dj_up=up / obs_time, n_dj_down=down / obs_time, n_dj=n_dj,
        n0_err=n_err[0], n1_err=n_err[1], n2_err=n_err[2],
        t0_err=t_err[0], t1_err=t_err[1], t2_err=t_err[2],
        n_dj_err=np.sqrt(max(up + down, 1)) / obs_time,
        counts={"periods0": counts[0], "periods1": counts[1],
                "periods2": counts[2], "dj_up": up, "dj_down": down},
        observed_time=obs_time,
    )


def infer_rates(est: EstimatedStatistics, dtau: float,
                iterations: int = 40) -> TransitionRates:
    """Back out transition rates from censored period statistics.

    Inverts the window-corrected duration formulas together with the
    censored branching ratio n0_rec/n2_rec = (p10/p12) exp(-(p01-p21) dtau)
    by fixed-point iteration.  With dtau = 0 this reduces to the naive
    moment estimator.
    """
    t0h, t1h, t2h = est.t0, est.t1, est.t2
    c0, c2 = est.counts["periods0"], est.counts["periods2"]
    if min(c0, c2) == 0:
        raise EstimationError("need recorded periods of every level")
    ratio_rec = c0 / c2
    p01 = 1.0 / max(t0h - dtau, 1e-12)
    lam1 = 1.0 / max(t1h - dtau, 1e-12)
    p21 = 1.0 / max(t2h - dtau, 1e-12)
    p10 = lam1 * ratio_rec / (1.0 + ratio_rec)
    p12 = lam1 - p10
    for _ in range(iterations):
        ratio = ratio_rec * np.exp((p01 - p21) * dtau)
        p10 = lam1 * ratio / (1.0 + ratio)
        p12 = lam1 - p10
        p01 = (1.0 + p10 * dtau) / (t0h - dtau)
        p21 = (1.0 + p12 * dtau) / (t2h - dtau)
        q = (p01 * p10 + p12 * p21) / lam1**2
        lam1 = 1.0 / (t1h - dtau * (1.0 + q))
    return TransitionRates(p01=p01, p10=p10, p12=p12, p21=p21,
                           provenance="CensoredInference")
