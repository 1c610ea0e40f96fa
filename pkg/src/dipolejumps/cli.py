"""Command-line front end: parameter sweeps over atomic distance, one-shot
rate queries, critical detunings, and generator diagnostics.

Sweep output is CSV (one row per distance); a JSON summary goes to stdout.
Config files are flat key=value lines with '#' comments.
"""
from __future__ import annotations

import argparse
import concurrent.futures
import json
import sys
import time
from dataclasses import dataclass

import numpy as np

from .bloch import l0_eigenvalues
from .model import DipoleCoupling, Geometry, ModelParams, compute_c3
from .rates import CRITICAL_QUANTITIES, RootNotFound, critical_detuning, \
    rates_exact, rates_first_order
from .telegraph import TelegraphModel, estimate_statistics, \
    ideal_statistics, simulate_telegraph, window_corrected_statistics
from .trajectory import TrajectoryConfig, simulate_period_statistics

SCHEMA = "dipolejumps-sweep-v1"
UNTRUSTED_BELOW = 0.5  # wavelengths; telegraph description degrades below

ANALYTIC_COLUMNS = (
    "r", "re_c3", "im_c3", "untrusted",
    "p01", "p10", "p12_first", "p21_first", "p12_exact", "p21_exact",
    "t0", "t1", "t2", "t0_cor", "t1_cor", "t2_cor",
    "n0", "n1", "n2", "n2_cor", "n_dj", "n_dj_lin", "n_dj_cor",
)
MC_COLUMNS = (
    "t0_mc", "t0_mc_err", "t1_mc", "t1_mc_err", "t2_mc", "t2_mc_err",
    "n0_mc", "n0_mc_err", "n1_mc", "n1_mc_err", "n2_mc", "n2_mc_err",
    "n_dj_mc", "n_dj_mc_err", "n_dj_up_mc", "n_dj_down_mc",
)

MODES = ("analytic", "telegraph-mc", "full-mc")


class ConfigError(ValueError):
    pass


@dataclass(frozen=True)
class SweepConfig:
    a3: float
    omega2: float
    omega3: float
    delta2: float
    theta3: float
    r_min: float
    r_max: float
    r_steps: int
    dt_w: float
    dt_dj: float
    mode: str
    total_time: float
    trajectories: int
    seed: int
    dt: float
    grid_divisor: int
    cutoff_fraction: float
    output: str | None

    def params(self) -> ModelParams:
        return ModelParams(omega2=self.omega2, omega3=self.omega3,
                           delta2=self.delta2, a3=self.a3)

    def r_grid(self) -> np.ndarray:
        return np.linspace(self.r_min, self.r_max, self.r_steps)


_DEFAULTS = {
    "a3": 1.0, "delta2": 0.0, "theta3": float(np.pi / 2),
    "dt_w": 114.0, "dt_dj": 160.0, "total_time": 0.0, "trajectories": 1,
    "seed": 0, "dt": 0.01, "grid_divisor": 8, "cutoff_fraction": 2.0 / 3.0,
    "output": None,
}
_REQUIRED = {"omega2", "omega3", "r_min", "r_max", "r_steps", "mode"}
_MODE_REQUIRED = {
    "analytic": set(),
    "telegraph-mc": {"total_time", "seed"},
    "full-mc": {"total_time", "seed", "trajectories"},
}
_INT_KEYS = {"r_steps", "trajectories", "seed", "grid_divisor"}
_STR_KEYS = {"mode", "output"}


def parse_config(path: str) -> SweepConfig:
    raw = {}
    with open(path) as fh:
        for lineno, line in enumerate(fh, 1):
            line = line.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise ConfigError(f"{path}:{lineno}: expected key=value")
            key, val = (s.strip() for s in line.split("=", 1))
            raw[key] = val
    known = _REQUIRED | set(_DEFAULTS)
    unknown = set(raw) - known
    if unknown:
        raise ConfigError(f"unknown config keys: {sorted(unknown)}")
    missing = _REQUIRED - set(raw)
    if missing:
        raise ConfigError(f"missing required keys: {sorted(missing)}")
    mode = raw["mode"]
    if mode not in MODES:
        raise ConfigError(f"mode must be one of {MODES}, got {mode!r}")
    missing = _MODE_REQUIRED[mode] - set(raw)
    if missing:
        raise ConfigError(f"mode {mode} requires keys: {sorted(missing)}")
    vals = dict(_DEFAULTS)
    for key, s in raw.items():
        if key in _STR_KEYS:
            vals[key] = s
        elif key in _INT_KEYS:
            vals[key] = int(s)
        else:
            vals[key] = float(s)
    cfg = SweepConfig(**vals)
    ok = (cfg.r_steps == 1) or (cfg.r_min < cfg.r_max and cfg.r_steps >= 2)
    if not ok:
        raise ConfigError("need r_min < r_max with r_steps >= 2, or r_steps = 1")
    return cfg


def _analytic_row(cfg: SweepConfig, r: float) -> dict:
    params = cfg.params()
    coupling = compute_c3(Geometry(r=r, theta3=cfg.theta3), a3=cfg.a3)
    first = rates_first_order(params, coupling)
    exact = rates_exact(params, coupling)
    model = TelegraphModel(rates=exact, dt_dj=cfg.dt_dj, dt_w=cfg.dt_w,
                           cutoff_fraction=cfg.cutoff_fraction)
    st = window_corrected_statistics(model)
    return {
        "r": r, "re_c3": coupling.c3.real, "im_c3": coupling.c3.imag,
        "untrusted": int(r < UNTRUSTED_BELOW),
        "p01": exact.p01, "p10": exact.p10,
        "p12_first": first.p12, "p21_first": first.p21,
        "p12_exact": exact.p12, "p21_exact": exact.p21,
        "t0": st.t0, "t1": st.t1, "t2": st.t2,
        "t0_cor": st.t0_cor, "t1_cor": st.t1_cor, "t2_cor": st.t2_cor,
        "n0": st.n0, "n1": st.n1, "n2": st.n2, "n2_cor": st.n2_cor,
        "n_dj": st.n_dj, "n_dj_lin": st.n_dj_lin, "n_dj_cor": st.n_dj_cor,
    }


def _mc_row(cfg: SweepConfig, point_index: int, r: float) -> dict:
    row = _analytic_row(cfg, r)
    params = cfg.params()
    coupling = compute_c3(Geometry(r=r, theta3=cfg.theta3), a3=cfg.a3)
    if cfg.mode == "telegraph-mc":
        exact = rates_exact(params, coupling)
        seq = simulate_telegraph(exact, cfg.total_time,
                                 seed=cfg.seed * 1000003 + point_index)
        est = estimate_statistics([seq], cfg.dt_dj)
    else:
        tcfg = TrajectoryConfig(params=params, coupling=coupling,
                                total_time=cfg.total_time, dt=cfg.dt,
                                seed=cfg.seed * 1000003 + point_index)
        est = simulate_period_statistics(tcfg, cfg.trajectories, cfg.dt_w,
                                         cfg.dt_dj, cfg.grid_divisor)
    row.update({
        "t0_mc": est.t0, "t0_mc_err": est.t0_err,
        "t1_mc": est.t1, "t1_mc_err": est.t1_err,
        "t2_mc": est.t2, "t2_mc_err": est.t2_err,
        "n0_mc": est.n0, "n0_mc_err": est.n0_err,
        "n1_mc": est.n1, "n1_mc_err": est.n1_err,
        "n2_mc": est.n2, "n2_mc_err": est.n2_err,
        "n_dj_mc": est.n_dj, "n_dj_mc_err": est.n_dj_err,
        "n_dj_up_mc": est.n_dj_up, "n_dj_down_mc": est.n_dj_down,
    })
    return row


def _fmt(v) -> str:
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    return f"{v:.10g}"


def run_sweep(cfg: SweepConfig, out_path: str, jobs: int = 1) -> dict:
    t_start = time.time()
    columns = ANALYTIC_COLUMNS if cfg.mode == "analytic" \
        else ANALYTIC_COLUMNS + MC_COLUMNS
    grid = cfg.r_grid()
    if cfg.mode == "analytic":
        rows = [_analytic_row(cfg, r) for r in grid]
    elif jobs <= 1:
        rows = [_mc_row(cfg, k, r) for k, r in enumerate(grid)]
    else:
        with concurrent.futures.ProcessPoolExecutor(max_workers=jobs) as pool:
            futs = {pool.submit(_mc_row, cfg, k, r): k
                    for k, r in enumerate(grid)}
            rows = [None] * len(grid)
            for fut, k in futs.items():
                rows[k] = fut.result()
    rows = sorted(rows, key=lambda d: d["r"])
    with open(out_path, "w") as fh:
        fh.write(f"# schema: {SCHEMA}\n")
        fh.write(",".join(columns) + "\n")
        for row in rows:
            fh.write(",".join(_fmt(row[c]) for c in columns) + "\n")

    re_c3 = np.array([row["re_c3"] for row in rows])
    ndj = np.array([row["n_dj"] for row in rows])
    n2 = np.array([row["n2"] for row in rows])
    summary = {
        "schema": SCHEMA, "mode": cfg.mode, "rows": len(rows),
        "output": out_path, "elapsed_s": round(time.time() - t_start, 3),
        "ndj_min": float(ndj.min()), "ndj_max": float(ndj.max()),
    }
    if len(rows) >= 3 and np.std(re_c3) > 0:
        summary["ndj_rec3_corr"] = float(np.corrcoef(ndj, re_c3)[0, 1])
        summary["n2_rec3_corr"] = float(np.corrcoef(n2, re_c3)[0, 1])
    return summary


def _cmd_sweep(args) -> int:
    cfg = parse_config(args.config)
    out = args.out or cfg.output
    if not out:
        print("error: no output path (set output= in the config or pass --out)",
              file=sys.stderr)
        return 2
    summary = run_sweep(cfg, out, jobs=args.jobs)
    print(json.dumps(summary))
    return 0


def _cmd_rates(args) -> int:
    params = ModelParams(omega2=args.omega2, omega3=args.omega3,
                         delta2=args.delta2, a3=args.a3)
    coupling = DipoleCoupling(complex(args.re_c3, args.im_c3))
    first = rates_first_order(params, coupling)
    exact = rates_exact(params, coupling)
    st = ideal_statistics(exact, dt_dj=args.dt_dj)
    out = {
        "first_order": {"p01": first.p01, "p10": first.p10,
                        "p12": first.p12, "p21": first.p21},
        "exact": {"p01": exact.p01, "p10": exact.p10,
                  "p12": exact.p12, "p21": exact.p21},
        "telegraph": {"t0": st.t0, "t1": st.t1, "t2": st.t2,
                      "n0": st.n0, "n1": st.n1, "n2": st.n2,
                      "n_dj": st.n_dj, "n_dj_lin": st.n_dj_lin,
                      "dt_dj": args.dt_dj},
    }
    print(json.dumps(out, indent=2))
    return 0


def _cmd_critical(args) -> int:
    cfg = parse_config(args.config)
    params = cfg.params()
    out = {}
    for which in CRITICAL_QUANTITIES:
        try:
            out[which] = critical_detuning(params, which)
        except RootNotFound as exc:
            out[which] = None
            out[f"{which}_error"] = str(exc)
    print(json.dumps(out, indent=2))
    return 0


def _cmd_eigs(args) -> int:
    params = ModelParams(omega2=args.omega2, omega3=args.omega3,
                         delta2=args.delta2, a3=args.a3)
    coupling = DipoleCoupling(complex(args.re_c3, args.im_c3))
    w = l0_eigenvalues(params, coupling)
    print(json.dumps({"eigenvalues": [[v.real, v.imag] for v in w]}))
    return 0


def main(argv: list[str] | None = None) -> int:
    ap = argparse.ArgumentParser(
        prog="dipolejumps",
        description="Fluorescence statistics of two dipole-interacting atoms")
    sub = ap.add_subparsers(dest="command", required=True)

    sp = sub.add_parser("sweep", help="parameter sweep over atomic distance")
    sp.add_argument("config")
    sp.add_argument("--jobs", type=int, default=1, help="parallel workers for MC modes")
    sp.add_argument("--out", default=None, help="CSV output path (overrides config)")
    sp.set_defaults(func=_cmd_sweep)

    rp = sub.add_parser("rates", help="one-shot analytic rates")
    rp.add_argument("--a3", type=float, default=1.0)
    rp.add_argument("--omega2", type=float, required=True)
    rp.add_argument("--omega3", type=float, required=True)
    rp.add_argument("--delta2", type=float, default=0.0)
    rp.add_argument("--re-c3", type=float, default=0.0, dest="re_c3")
    rp.add_argument("--im-c3", type=float, default=0.0, dest="im_c3")
    rp.add_argument("--dt-dj", type=float, default=160.0, dest="dt_dj")
    rp.set_defaults(func=_cmd_rates)

    cp = sub.add_parser("critical-detunings",
                        help="detunings where cooperative effects vanish")
    cp.add_argument("config")
    cp.set_defaults(func=_cmd_critical)

    ep = sub.add_parser("eigs", help="eigenvalues of the omega2=0 generator")
    ep.add_argument("--a3", type=float, default=1.0)
    ep.add_argument("--omega2", type=float, default=0.0)
    ep.add_argument("--omega3", type=float, required=True)
    ep.add_argument("--delta2", type=float, default=0.0)
    ep.add_argument("--re-c3", type=float, default=0.0, dest="re_c3")
    ep.add_argument("--im-c3", type=float, default=0.0, dest="im_c3")
    ep.set_defaults(func=_cmd_eigs)

    args = ap.parse_args(argv)
    try:
        return args.func(args)
    except (ConfigError, ValueError, RuntimeError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
