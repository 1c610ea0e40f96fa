"""Transition rates between the three intensity subspaces.

Two routes are provided and cross-checked: closed first-order-in-C3
formulas, and an exact-in-C3 numeric solve of the 8x8 inner-outer
coherence system plus the 2x2 e2-coherence systems.  The 8x8 matrix is
both transcribed as a fixture and regenerated from the operator matrix
elements; construction fails if the two disagree.
"""
from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np

from .model import (
    A12, A13, A23, E3, G, S12, S13, S23, SQRT2, DickeOperators,
    DipoleCoupling, ModelParams, build_operators,
)

# <x| rho1 |y> pairs of the 8-vector, in the frozen ordering
COHERENCE_PAIRS = (
    (S12, G), (S12, S13), (S12, E3),
    (S23, G), (S23, S13), (S23, E3),
    (A12, A13), (A23, A13),
)

TRANSCRIPTION_TOL = 1e-12


class DetuningPoleError(ValueError):
    """First-order denominator vanishes at this detuning."""


class IllConditionedSystem(RuntimeError):
    """Coherence system is numerically near-singular."""


class RootNotFound(RuntimeError):
    """No sign change of the Re C3 coefficient in the search interval."""


@dataclass(frozen=True)
class TransitionRates:
    """Inter-period rates in units of A3; p02 = p20 = 0 structurally."""

    p01: float
    p10: float
    p12: float
    p21: float
    provenance: str = "ExactSolve"  # or "FirstOrderC3"

    def as_tuple(self) -> tuple[float, float, float, float]:
        return (self.p01, self.p10, self.p12, self.p21)


@dataclass(frozen=True)
class CoherenceSystem:
    """(A - i delta2) matrix and both drive vectors, frozen ordering."""

    a_matrix: np.ndarray       # the delta2-free 8x8 matrix A
    shifted: np.ndarray        # A - i delta2 * 1
    drive_a1: np.ndarray       # inner-subspace initial state
    drive_a2: np.ndarray       # outer-subspace initial state


def _a_matrix_fixture(a3: float, om3: float, c3: complex) -> np.ndarray:
    """Verbatim transcription of the displayed 8x8 matrix."""
    rc = c3.real
    cc = np.conj(c3)
    s2 = SQRT2
    return np.array([
        [0, -1j*om3/s2, 0, 1j*om3/2, -(a3+rc)/s2, 0, 0, (rc-a3)/s2],
        [-1j*om3/s2, (a3+cc)/2, -1j*om3/s2, 0, 1j*om3/2, -(a3+rc)/s2, 0, 0],
        [0, -1j*om3/s2, a3, 0, 0, 1j*om3/2, 0, 0],
        [1j*om3/2, 0, 0, a3/2, -1j*om3/s2, 0, 0, 0],
        [0, 1j*om3/2, 0, -1j*om3/s2, a3 + cc/2, -1j*om3/s2, 0, 0],
        [0, 0, 1j*om3/2, 0, -1j*om3/s2, 3*a3/2, 0, 0],
        [0, 0, 0, 0, 0, -(a3-rc)/s2, (a3-cc)/2, -1j*om3/2],
        [0, 0, 0, 0, 0, 0, -1j*om3/2, a3 - cc/2],
    ], dtype=complex)


def _regenerate_system(ops: DickeOperators,
                       rho_inner: np.ndarray,
                       rho_outer: np.ndarray) -> CoherenceSystem:
    """Build the coherence system from operator matrix elements.

    The stationarity condition, taken between <x_i0| and |y_j0>, reads
    0 = drive + sum_ij M[(i0 j0), (i j)] rho1_ij with A - i delta2 = -M.
    """
    h0, h1 = ops.h0, ops.h1
    rp, rm = ops.rplus, ops.rminus
    gp, gm = ops.gamma_plus, ops.gamma_minus
    n = len(COHERENCE_PAIRS)
    m = np.zeros((n, n), dtype=complex)
    for r, (i0, j0) in enumerate(COHERENCE_PAIRS):
        for c, (i, j) in enumerate(COHERENCE_PAIRS):
            val = 0.0 + 0.0j
            if j == j0:
                val += -1j * h0[i0, i]
            if i == i0:
                val += 1j * np.conj(h0[j0, j])
            val += gp * rp[i0, i] * np.conj(rp[j0, j])
            val += gm * rm[i0, i] * np.conj(rm[j0, j])
            m[r, c] = val
    shifted = -m
    a_matrix = shifted + 1j * ops.params.delta2 * np.eye(n)

    inner_h1 = rho_inner @ h1
    h1_outer = h1 @ rho_outer
    a1 = np.array([1j * inner_h1[i0, j0] for (i0, j0) in COHERENCE_PAIRS])
    a2 = np.array([-1j * h1_outer[i0, j0] for (i0, j0) in COHERENCE_PAIRS])
    return CoherenceSystem(a_matrix=a_matrix, shifted=shifted, drive_a1=a1, drive_a2=a2)


def build_coherence_system(params: ModelParams,
                           coupling: DipoleCoupling) -> CoherenceSystem:
    """Regenerated system, verified entrywise against the transcription."""
    from .bloch import SubspaceId, quasi_stationary_state

    ops = build_operators(params, coupling)
    rho_in = quasi_stationary_state(SubspaceId.INNER, params, coupling)
    rho_out = quasi_stationary_state(SubspaceId.OUTER, params, coupling)
    sys_ = _regenerate_system(ops, rho_in, rho_out)
    fixture = _a_matrix_fixture(params.a3, params.omega3, coupling.c3)
    diff = np.abs(sys_.a_matrix - fixture).max()
    if diff > TRANSCRIPTION_TOL:
        raise AssertionError(
            f"regenerated coherence matrix deviates from transcription by {diff:.3e}")
    return sys_


def solve_coherences(params: ModelParams, coupling: DipoleCoupling,
                     drive_kind: str) -> np.ndarray:
    """Solve (A - i delta2) rho~ = a for a in {a1, a2}."""
    if drive_kind not in ("a1", "a2"):
        raise ValueError("drive_kind must be 'a1' or 'a2'")
    sys_ = build_coherence_system(params, coupling)
    cond = np.linalg.cond(sys_.shifted)
    if cond > 1e8:
        raise IllConditionedSystem(
            f"coherence system condition number {cond:.3e} exceeds 1e8")
    a = sys_.drive_a1 if drive_kind == "a1" else sys_.drive_a2
    rho = np.linalg.solve(sys_.shifted, a)
    resid = np.linalg.norm(sys_.shifted @ rho - a)
    if resid > 1e-10 * max(np.linalg.norm(a), 1e-300):
        raise IllConditionedSystem(f"solve residual {resid:.3e}")
    return rho


def solve_e2_coherences(params: ModelParams,
                        initial: "SubspaceId") -> tuple[complex, complex]:
    """(<s12|rho1|e2>, <s23|rho1|e2>) from the C3-free 2x2 system.

    For an outer initial state the inhomogeneity vanishes, hence p20 = 0.
    """
    from .bloch import SubspaceId, quasi_stationary_state

    a3, om3, om2, d2 = params.a3, params.omega3, params.omega2, params.delta2
    # -M for x in {s12, s23}, y = e2; R+/- annihilate e2, no C3 anywhere
    bmat = np.array([[1j * d2, 1j * om3 / 2.0],
                     [1j * om3 / 2.0, a3 / 2.0 + 1j * d2]], dtype=complex)
    if initial is SubspaceId.INNER:
        rho_in = quasi_stationary_state(SubspaceId.INNER, params, DipoleCoupling(0j))
        rhs = np.array([
            1j * SQRT2 * om2 / 2.0 * rho_in[S12, S12],
            1j * SQRT2 * om2 / 2.0 * rho_in[S23, S12],
        ])
    elif initial is SubspaceId.DARK:
        rhs = np.array([-1j * SQRT2 * om2 / 2.0, 0.0])
    else:
        return (0.0 + 0.0j, 0.0 + 0.0j)
    v = np.linalg.solve(bmat, rhs)
    return (complex(v[0]), complex(v[1]))


def _first_order_denominator(a3: float, om3: float, d2: float) -> float:
    return om3**4 - 8.0 * d2**2 * om3**2 + 4.0 * a3**2 * d2**2 + 16.0 * d2**4


def p12_c3_coefficient(a3: float, om3: float, d2: float) -> float:
    """Coefficient of Re C3 in the first-order p12, without omega2^2."""
    den = _first_order_denominator(a3, om3, d2)
    return (2.0 * a3**2 * om3**2 * (om3**4 - 4.0 * a3**2 * d2**2 - 16.0 * d2**4)
            / ((a3**2 + 2.0 * om3**2) * den**2))


def p21_c3_coefficient(a3: float, om3: float, d2: float) -> float:
    """Coefficient of Re C3 in the first-order p21, without omega2^2."""
    den = _first_order_denominator(a3, om3, d2)
    num = (a3**4 * om3**4 + 4.0 * a3**2 * om3**6
           - 12.0 * a3**2 * d2**2 * om3**4 - 64.0 * a3**2 * d2**6
           - 4.0 * a3**6 * d2**2 - 32.0 * a3**4 * d2**4
           - 64.0 * d2**4 * om3**4 + 16.0 * d2**2 * om3**6)
    return 4.0 * a3**2 * om3**2 * num / ((a3**2 + 2.0 * om3**2) ** 3 * den**2)


def rates_first_order(params: ModelParams,
                      coupling: DipoleCoupling) -> TransitionRates:
    """Closed-form rates, first order in C3; only Re C3 enters."""
    a3, om3, om2, d2 = params.a3, params.omega3, params.omega2, params.delta2
    rc = coupling.c3.real
    den = _first_order_denominator(a3, om3, d2)
    if abs(den) < 1e-9 * a3**4:
        raise DetuningPoleError(
            f"first-order denominator {den:.3e} too close to zero; "
            f"use rates_exact at this detuning")
    den10 = (om3**2 - 4.0 * d2**2) ** 2 + 4.0 * d2**2 * a3**2
    p12 = om2**2 * (a3 * om3**2 / den + rc * p12_c3_coefficient(a3, om3, d2))
    p10 = om2**2 * a3 * om3**2 * (a3**2 + 4.0 * d2**2) / ((a3**2 + 2.0 * om3**2) * den10)
    p01 = 2.0 * om2**2 * a3 * om3**2 / den10
    p21 = om2**2 * (2.0 * a3 * om3**2 * (a3**2 + 4.0 * d2**2)
                    / (den * (a3**2 + 2.0 * om3**2))
                    + rc * p21_c3_coefficient(a3, om3, d2))
    return TransitionRates(p01=p01, p10=p10, p12=p12, p21=p21,
                           provenance="FirstOrderC3")


def rates_exact(params: ModelParams, coupling: DipoleCoupling) -> TransitionRates:
    """Rates exact in C3 (second order in omega2) from the linear solves.

    p12 = omega2 Im{sqrt(2) r1 + r5 + r8} of the a1 solve, p21 the negated
    analogue of the a2 solve; p10/p01 from the e2-coherence systems.
    """
    from .bloch import SubspaceId

    om2 = params.omega2
    r1 = solve_coherences(params, coupling, "a1")
    r2 = solve_coherences(params, coupling, "a2")
    p12 = om2 * (SQRT2 * r1[0] + r1[4] + r1[7]).imag
    p21 = -om2 * (SQRT2 * r2[0] + r2[4] + r2[7]).imag
    v_in, _ = solve_e2_coherences(params, SubspaceId.INNER)
    p10 = SQRT2 * om2 * v_in.imag
    v_dark, _ = solve_e2_coherences(params, SubspaceId.DARK)
    p01 = -SQRT2 * om2 * v_dark.imag
    if min(p01, p10, p12, p21) < 0:
        warnings.warn("negative transition rate; parameters are outside the "
                      "validated regime", stacklevel=2)
    return TransitionRates(p01=p01, p10=p10, p12=p12, p21=p21,
                           provenance="ExactSolve")


CRITICAL_QUANTITIES = ("p12", "p21", "double_jump", "t1", "t2")


def _re_c3_coefficient(params: ModelParams, which: str, d2: float) -> float:
    """d(quantity)/d(ReC3) at ReC3 = 0, closed form for p12/p21 and a
    symmetric difference for derived quantities."""
    from .telegraph import ideal_statistics

    a3, om3 = params.a3, params.omega3
    if which == "p12":
        return p12_c3_coefficient(a3, om3, d2)
    if which == "p21":
        return p21_c3_coefficient(a3, om3, d2)
    p = ModelParams(omega2=params.omega2, omega3=om3, delta2=d2, a3=a3)
    h = 1e-3 * a3

    def quantity(rc):
        rates = rates_first_order(p, DipoleCoupling(complex(rc, 0.0)))
        if which == "t1":
            return 1.0 / (rates.p10 + rates.p12)
        if which == "t2":
            return 1.0 / rates.p21
        return ideal_statistics(rates, dt_dj=1.0).n_dj_lin

    return (quantity(h) - quantity(-h)) / (2.0 * h)


def critical_detuning(params: ModelParams, which: str,
                      search_max: float | None = None,
                      tol: float = 1e-8) -> float:
    """Detuning at which the Re C3 dependence of `which` vanishes.

    Bracketing scan on [0, 2 A3] followed by bisection to `tol`.
    """
    if which not in CRITICAL_QUANTITIES:
        raise ValueError(f"which must be one of {CRITICAL_QUANTITIES}")
    hi = 2.0 * params.a3 if search_max is None else search_max

    def f(d2):
        return _re_c3_coefficient(params, which, d2)

    grid = np.linspace(0.0, hi, 257)
    vals = [f(d) for d in grid]
    bracket = None
    for k in range(len(grid) - 1):
        if vals[k] == 0.0:
            return float(grid[k])
        if vals[k] * vals[k + 1] < 0.0:
            bracket = (grid[k], grid[k + 1])
            break
    if bracket is None:
        raise RootNotFound(f"no sign change of the {which} coefficient in "
                           f"[0, {hi}]")
    lo, hi = bracket
    flo = f(lo)
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        fm = f(mid)
        if fm == 0.0:
            return mid
        if flo * fm < 0.0:
            hi = mid
        else:
            lo, flo = mid, fm
    return 0.5 * (lo + hi)
