"""Physical model of two dipole-interacting V-configuration atoms.

Everything is expressed in units of the strong-transition Einstein
coefficient A3: rates and frequencies in A3, times in 1/A3, distances in
wavelengths of the strong transition.  The two-atom state space is the
9-dimensional Dicke basis with the frozen ordering

    [g, s12, a12, s13, a13, s23, a23, e2, e3]

where |g> = |11>, |e2> = |22>, |e3> = |33>, |s_jk> = (|jk>+|kj>)/sqrt(2)
and |a_jk> = -i(|jk>-|kj>)/sqrt(2).
"""
from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np

BASIS = ("g", "s12", "a12", "s13", "a13", "s23", "a23", "e2", "e3")
G, S12, A12, S13, A13, S23, A23, E2, E3 = range(9)

DARK_STATES = (E2,)
INNER_STATES = (S12, A12, S23, A23)
OUTER_STATES = (G, S13, A13, E3)

SQRT2 = float(np.sqrt(2.0))


class RegimeError(ValueError):
    """Parameters outside the regime where the model is meaningful."""


@dataclass(frozen=True)
class ModelParams:
    """Laser and decay parameters.

    omega2/omega3 are the Rabi frequencies of the weak (1-2) and strong
    (1-3) transitions, delta2 the weak-laser detuning.  The weak Einstein
    coefficient a2 and the strong-laser detuning delta3 are fixed to zero.
    """

    omega2: float
    omega3: float
    delta2: float = 0.0
    a3: float = 1.0
    a2: float = 0.0
    delta3: float = 0.0

    def __post_init__(self):
        if self.a3 <= 0:
            raise ValueError(f"a3 must be positive, got {self.a3}")
        if self.omega2 < 0:
            raise ValueError(f"omega2 must be >= 0, got {self.omega2}")
        if self.omega3 <= 0:
            raise ValueError(f"omega3 must be positive, got {self.omega3}")
        if self.a2 != 0.0:
            raise ValueError("a2 is fixed to 0 in this model")
        if self.delta3 != 0.0:
            raise ValueError("delta3 is fixed to 0 in this model")
        # weak-driving regime; violation degrades the telegraph picture but
        # does not invalidate the operators themselves
        if self.omega2 > 0.1 * self.omega3 or self.omega2 > 0.1 * self.omega3**2 / self.a3:
            warnings.warn(
                f"omega2={self.omega2} outside the weak-driving regime "
                f"(needs omega2 <= 0.1*omega3 and <= 0.1*omega3^2/a3)",
                stacklevel=2,
            )


@dataclass(frozen=True)
class Geometry:
    """Atom pair geometry.  r in units of lambda31, theta3 in radians."""

    r: float
    theta3: float = float(np.pi / 2)
    lambda31: float = 1.0

    def __post_init__(self):
        if self.r <= 0:
            raise ValueError(f"separation r must be positive, got {self.r}")
        if not 0.0 <= self.theta3 <= np.pi:
            raise ValueError(f"theta3 must lie in [0, pi], got {self.theta3}")
        if self.lambda31 <= 0:
            raise ValueError("lambda31 must be positive")


@dataclass(frozen=True)
class DipoleCoupling:
    """Complex dipole-dipole coupling constants, in units of A3.

    c2 vanishes identically because a2 = 0.
    """

    c3: complex
    c2: complex = 0.0 + 0.0j

    def __post_init__(self):
        if self.c2 != 0:
            raise ValueError("c2 is fixed to 0 (a2 = 0)")


def compute_c3(geometry: Geometry, a3: float = 1.0) -> DipoleCoupling:
    """Distance-dependent coupling constant of the strong transition.

    C3 = (3 A3/2) e^{i k r} [ (1-cos^2 t)/(i k r)
                              + (1/(kr)^2 - 1/(i (kr)^3))(1 - 3 cos^2 t) ]
    with k = 2 pi / lambda31 and t the dipole angle theta3.
    """
    kr = 2.0 * np.pi * geometry.r / geometry.lambda31
    c2t = np.cos(geometry.theta3) ** 2
    val = 1.5 * a3 * np.exp(1j * kr) * (
        (1.0 - c2t) / (1j * kr)
        + (1.0 / kr**2 - 1.0 / (1j * kr**3)) * (1.0 - 3.0 * c2t)
    )
    return DipoleCoupling(c3=complex(val))


@dataclass(frozen=True)
class DickeOperators:
    """Conditional Hamiltonian and jump operators in the Dicke basis.

    h0: H0_cond/hbar (depends on omega3, delta2, c3), h1: H1_cond/hbar
    (linear in omega2, Hermitian).  rplus/rminus are the symmetric and
    antisymmetric jump operators with channel rates gamma_plus/minus =
    a3 +/- Re c3.
    """

    h0: np.ndarray
    h1: np.ndarray
    rplus: np.ndarray
    rminus: np.ndarray
    gamma_plus: float
    gamma_minus: float
    params: ModelParams
    coupling: DipoleCoupling

    @property
    def h_cond(self) -> np.ndarray:
        return self.h0 + self.h1

    def require_positive_channels(self):
        if self.gamma_minus < 0 or self.gamma_plus < 0:
            raise RegimeError(
                f"|Re C3| = {abs(self.coupling.c3.real)} exceeds A3 = "
                f"{self.params.a3}; jump-channel rates are not both positive"
            )


def build_operators(params: ModelParams, coupling: DipoleCoupling) -> DickeOperators:
    """Populate h0, h1, R+ and R- for the given parameters."""
    a3, om3, om2, d2 = params.a3, params.omega3, params.omega2, params.delta2
    c3 = coupling.c3

    h0 = np.zeros((9, 9), dtype=complex)
    # anti-Hermitian decay part, (1/2i) * diag(...)
    h0[S23, S23] += a3 / 2j
    h0[A23, A23] += a3 / 2j
    h0[S13, S13] += (a3 + c3) / 2j
    h0[A13, A13] += (a3 - c3) / 2j
    h0[E3, E3] += 2.0 * a3 / 2j
    # strong drive
    drive = np.zeros((9, 9), dtype=complex)
    drive[G, S13] = SQRT2 * om3
    drive[S13, E3] = SQRT2 * om3
    drive[S12, S23] = om3
    drive[A12, A23] = -om3
    h0 += (drive + drive.conj().T) / 2.0
    # weak-laser detuning block
    h0[E2, E2] += -2.0 * d2
    for k in INNER_STATES:
        h0[k, k] += -d2

    h1 = np.zeros((9, 9), dtype=complex)
    weak = np.zeros((9, 9), dtype=complex)
    weak[G, S12] = SQRT2 * om2
    weak[S12, E2] = SQRT2 * om2
    weak[S13, S23] = om2
    weak[A13, A23] = om2
    h1 += (weak + weak.conj().T) / 2.0

    rplus = np.zeros((9, 9))
    rplus[G, S13] = 1.0
    rplus[S13, E3] = 1.0
    rplus[S12, S23] = 1.0 / SQRT2
    rplus[A12, A23] = -1.0 / SQRT2

    rminus = np.zeros((9, 9))
    rminus[G, A13] = 1.0
    rminus[A13, E3] = 1.0
    rminus[S12, A23] = 1.0 / SQRT2
    rminus[A12, S23] = 1.0 / SQRT2

    return DickeOperators(
        h0=h0, h1=h1, rplus=rplus, rminus=rminus,
        gamma_plus=a3 + c3.real, gamma_minus=a3 - c3.real,
        params=params, coupling=coupling,
    )


def reset_map(ops: DickeOperators, rho: np.ndarray) -> np.ndarray:
    """R(rho) = gamma+ R+ rho R+^T + gamma- R- rho R-^T.

    The trace of the result is the instantaneous photon emission rate.
    """
    rp, rm = ops.rplus, ops.rminus
    return (ops.gamma_plus * rp @ rho @ rp.T
            + ops.gamma_minus * rm @ rho @ rm.T)


def swap_operator() -> np.ndarray:
    """Atom-interchange operator: +1 on symmetric states, -1 on a_jk."""
    s = np.ones(9)
    for k in (A12, A13, A23):
        s[k] = -1.0
    return np.diag(s)


def product_to_dicke() -> np.ndarray:
    """Unitary T with T[p, d] = <p|d>, product basis |11>,|12>,...,|33>.

    Columns follow the frozen Dicke ordering; rho_dicke = T^dag rho_prod T.
    """
    T = np.zeros((9, 9), dtype=complex)

    def pidx(j, k):
        return (j - 1) * 3 + (k - 1)

    T[pidx(1, 1), G] = 1.0
    T[pidx(2, 2), E2] = 1.0
    T[pidx(3, 3), E3] = 1.0
    for (j, k), s_col, a_col in (((1, 2), S12, A12), ((1, 3), S13, A13), ((2, 3), S23, A23)):
        T[pidx(j, k), s_col] = 1.0 / SQRT2
        T[pidx(k, j), s_col] = 1.0 / SQRT2
        # |a_jk> = -i(|jk> - |kj>)/sqrt(2)
        T[pidx(j, k), a_col] = -1j / SQRT2
        T[pidx(k, j), a_col] = 1j / SQRT2
    return T


def single_atom_steady_state(params: ModelParams) -> np.ndarray:
    """Steady state of one driven 1-3 two-level atom at zero detuning.

    2x2 matrix in the (|1>, |3>) basis; excited population
    omega3^2/(a3^2 + 2 omega3^2).
    """
    a3, om3 = params.a3, params.omega3
    den = a3**2 + 2.0 * om3**2
    return np.array(
        [[(a3**2 + om3**2) / den, 1j * om3 * a3 / den],
         [-1j * om3 * a3 / den, om3**2 / den]], dtype=complex)


def single_atom_intensity(params: ModelParams) -> float:
    """Photon emission rate of one atom during its light period."""
    a3, om3 = params.a3, params.omega3
    return a3 * om3**2 / (a3**2 + 2.0 * om3**2)


def format_matrix(m: np.ndarray) -> str:
    """Plain-text debug dump: one row per line, 're,im' pairs."""
    m = np.asarray(m, dtype=complex)
    lines = []
    for row in m:
        lines.append(" ".join(f"{v.real:.17g},{v.imag:.17g}" for v in row))
    return "\n".join(lines) + "\n"


def parse_matrix(text: str) -> np.ndarray:
    """Inverse of format_matrix."""
    rows = []
    for line in text.strip().splitlines():
        rows.append([complex(*map(float, tok.split(","))) for tok in line.split()])
    return np.array(rows, dtype=complex)
