"""Fluorescence statistics of two dipole-interacting three-level atoms.

Closed-form transition rates between dark / single / double intensity
periods, double-jump and period statistics with averaging-window
corrections, and Monte Carlo wave-function simulation of the full system.
"""

from .model import (
    BASIS, DipoleCoupling, Geometry, ModelParams, RegimeError, DickeOperators,
    build_operators, compute_c3, reset_map,
)
from .bloch import (
    BlochGenerator, SubspaceId, make_generator, perturbed_state, propagate,
    quasi_stationary_state,
)
from .rates import (
    TransitionRates, critical_detuning, rates_exact, rates_first_order,
    solve_coherences, solve_e2_coherences,
)
from .telegraph import (
    EstimatedStatistics, PeriodSequence, TelegraphModel, TelegraphStatistics,
    censor_periods, count_double_jumps, estimate_statistics, ideal_statistics,
    infer_rates, simulate_telegraph, window_corrected_statistics,
)
from .trajectory import (
    EmissionRecord, IntensityTrace, TrajectoryConfig, classify_periods,
    default_thresholds, ensemble_density_matrix, intensity_trace,
    run_trajectory, simulate_period_statistics,
)
from .kernels import HAVE_COMPILED, active_backend_name

__version__ = "0.1.0"
