"""Bloch generator, quasi-stationary subspace states, and time propagation.

The generator L(rho) = -i[H_cond rho - rho H_cond^dag] + R(rho) splits into
L0 (weak laser off) and the omega2-linear drive part.  L0 conserves the
populations of the dark, inner and outer subspaces separately -- and, on the
inner subspace, also which atom is shelved -- so its kernel is
four-dimensional.  The resolvent step (epsilon - L0)^{-1} is evaluated as a
least-squares solve followed by removal of the four kernel modes.
"""
from __future__ import annotations

import enum
from dataclasses import dataclass, field

import numpy as np
from scipy.integrate import solve_ivp

from .model import (
    A12, A13, A23, DARK_STATES, E2, E3, G, INNER_STATES, OUTER_STATES, S12,
    S13, S23, DickeOperators, DipoleCoupling, ModelParams, build_operators,
    product_to_dicke, single_atom_steady_state,
)


class NumericalFailure(RuntimeError):
    """A solve left residuals beyond its contract."""


class SubspaceId(enum.Enum):
    DARK = 0
    INNER = 1
    OUTER = 2

    @property
    def level(self) -> int:
        """Fluorescence intensity associated with the subspace."""
        return {SubspaceId.DARK: 0, SubspaceId.INNER: 1, SubspaceId.OUTER: 2}[self]

    @property
    def states(self) -> tuple:
        return {
            SubspaceId.DARK: DARK_STATES,
            SubspaceId.INNER: INNER_STATES,
            SubspaceId.OUTER: OUTER_STATES,
        }[self]

    def projector(self) -> np.ndarray:
        p = np.zeros((9, 9))
        for k in self.states:
            p[k, k] = 1.0
        return p


@dataclass
class BlochGenerator:
    """L applied matrix-free; materialized as 81x81 on demand."""

    ops: DickeOperators
    _mat_full: np.ndarray = field(default=None, repr=False)
    _mat_zero: np.ndarray = field(default=None, repr=False)

    def apply(self, rho: np.ndarray) -> np.ndarray:
        h = self.ops.h_cond
        out = -1j * (h @ rho - rho @ h.conj().T)
        rp, rm = self.ops.rplus, self.ops.rminus
        out += self.ops.gamma_plus * rp @ rho @ rp.T
        out += self.ops.gamma_minus * rm @ rho @ rm.T
        return out

    def apply_zero(self, rho: np.ndarray) -> np.ndarray:
        """L0: the omega2 = 0 part."""
        h = self.ops.h0
        out = -1j * (h @ rho - rho @ h.conj().T)
        rp, rm = self.ops.rplus, self.ops.rminus
        out += self.ops.gamma_plus * rp @ rho @ rp.T
        out += self.ops.gamma_minus * rm @ rho @ rm.T
        return out

    def apply_drive(self, rho: np.ndarray) -> np.ndarray:
        """L_{omega2}: -i[h1, rho]."""
        h1 = self.ops.h1
        return -1j * (h1 @ rho - rho @ h1)

    def _materialize(self, h: np.ndarray) -> np.ndarray:
        i9 = np.eye(9)
        m = -1j * (np.kron(h, i9) - np.kron(i9, h.conj()))
        rp, rm = self.ops.rplus, self.ops.rminus
        m = m + self.ops.gamma_plus * np.kron(rp, rp) + self.ops.gamma_minus * np.kron(rm, rm)
        return m

    def matrix(self) -> np.ndarray:
        """81x81 matrix of L acting on row-major flattened rho."""
        if self._mat_full is None:
            self._mat_full = self._materialize(self.ops.h_cond)
        return self._mat_full

    def matrix_zero(self) -> np.ndarray:
        if self._mat_zero is None:
            self._mat_zero = self._materialize(self.ops.h0)
        return self._mat_zero


def make_generator(params: ModelParams, coupling: DipoleCoupling) -> BlochGenerator:
    return BlochGenerator(build_operators(params, coupling))


def quasi_stationary_state(sub: SubspaceId, params: ModelParams,
                           coupling: DipoleCoupling) -> np.ndarray:
    """Omega2 = 0 equilibrium of L0 on one subspace (closed forms).

    Dark: |e2><e2|.  Inner: equal mixture of (driven atom) x (shelved atom),
    independent of C3.  Outer: the closed form in terms of A3, Omega3, C3,
    normalized to unit trace.
    """
    a3, om3 = params.a3, params.omega3
    rho = np.zeros((9, 9), dtype=complex)
    if sub is SubspaceId.DARK:
        rho[E2, E2] = 1.0
        return rho
    if sub is SubspaceId.INNER:
        den = a3**2 + 2.0 * om3**2
        for k in (S12, A12):
            rho[k, k] = (a3**2 + om3**2) / (2.0 * den)
        for k in (S23, A23):
            rho[k, k] = om3**2 / (2.0 * den)
        coh = 1j * om3 * a3 / (2.0 * den)
        rho[S12, S23] = coh
        rho[S23, S12] = np.conj(coh)
        rho[A12, A23] = -coh
        rho[A23, A12] = -np.conj(coh)
        return rho
    c3 = coupling.c3
    rho[G, G] = (a3**2 + om3**2) ** 2 + a3**2 * abs(c3) ** 2 + 2.0 * a3**3 * c3.real
    gs = 1j * np.sqrt(2) * a3 * om3 * (a3**2 + om3**2 + a3 * c3)
    rho[G, S13] = gs
    rho[S13, G] = np.conj(gs)
    ge = -a3 * om3**2 * (a3 + c3)
    rho[G, E3] = ge
    rho[E3, G] = np.conj(ge)
    rho[S13, S13] = om3**2 * (2.0 * a3**2 + om3**2)
    rho[E3, E3] = om3**4
    rho[A13, A13] = om3**4
    se = 1j * np.sqrt(2) * a3 * om3**3
    rho[S13, E3] = se
    rho[E3, S13] = np.conj(se)
    tr = np.trace(rho).real
    if tr <= 0:
        raise AssertionError("outer-state normalization vanished; omega3 > 0 required")
    return rho / tr


def _shelved_branch_difference(params: ModelParams) -> tuple[np.ndarray, np.ndarray]:
    """Fourth kernel pair: (rho_ss x |2><2| - |2><2| x rho_ss)/2 and the
    branch-population difference observable, biorthonormal against the
    three subspace pairs."""
    T = product_to_dicke()
    rss = single_atom_steady_state(params)
    shelf = np.zeros((3, 3), dtype=complex)
    shelf[1, 1] = 1.0  # |2><2|
    act = np.zeros((3, 3), dtype=complex)
    act[0, 0], act[0, 2], act[2, 0], act[2, 2] = rss[0, 0], rss[0, 1], rss[1, 0], rss[1, 1]
    rho_prod = 0.5 * (np.kron(act, shelf) - np.kron(shelf, act))
    rho_diff = T.conj().T @ rho_prod @ T

    w_prod = np.zeros((9, 9), dtype=complex)
    proj13 = np.diag([1.0, 0.0, 1.0])  # atom in {1,3}
    w_prod += np.kron(proj13, shelf)   # branch: second atom shelved
    w_prod -= np.kron(shelf, proj13)
    w_diff = T.conj().T @ w_prod @ T
    return rho_diff, w_diff


def kernel_modes(params: ModelParams,
                 coupling: DipoleCoupling) -> list[tuple[np.ndarray, np.ndarray]]:
    """Biorthonormal (right, left) pairs spanning the kernel of L0."""
    pairs = [
        (quasi_stationary_state(SubspaceId.DARK, params, coupling),
         SubspaceId.DARK.projector().astype(complex)),
        (quasi_stationary_state(SubspaceId.INNER, params, coupling),
         SubspaceId.INNER.projector().astype(complex)),
        (quasi_stationary_state(SubspaceId.OUTER, params, coupling),
         SubspaceId.OUTER.projector().astype(complex)),
        _shelved_branch_difference(params),
    ]
    return pairs


def perturbed_state(sub: SubspaceId, params: ModelParams,
                    coupling: DipoleCoupling) -> np.ndarray:
    """First-order correction rho1 = (eps - L0)^{-1} L_{omega2} rho0.

    Least-squares solve on the 81-dimensional operator space; the four
    kernel modes of L0 are projected out of the solution, which realizes
    the eps -> +0 limit.  Trace-free and linear in omega2.
    """
    gen = make_generator(params, coupling)
    rho0 = quasi_stationary_state(sub, params, coupling)
    b = gen.apply_drive(rho0)
    bnorm = np.linalg.norm(b)
    if bnorm == 0.0:
        return np.zeros((9, 9), dtype=complex)

    modes = kernel_modes(params, coupling)
    resid = max(abs(np.trace(w @ b)) for _, w in modes) / bnorm
    if resid > 1e-8:
        raise NumericalFailure(
            f"drive term has kernel component (relative residual {resid:.2e})")

    l0 = gen.matrix_zero()
    x, *_ = np.linalg.lstsq(l0, -b.flatten(), rcond=1e-9)
    rho1 = x.reshape(9, 9)
    for r, w in modes:
        rho1 = rho1 - np.trace(w @ rho1) * r
    rho1 = 0.5 * (rho1 + rho1.conj().T)
    check = np.linalg.norm(gen.apply_zero(rho1) + b) / bnorm
    if check > 1e-8:
        raise NumericalFailure(f"resolvent solve residual {check:.2e}")
    return rho1


def propagate(rho: np.ndarray, t: float, generator: BlochGenerator) -> np.ndarray:
    """rho(t) = exp(L t) rho by adaptive RK45, rtol 1e-9 / atol 1e-12.

    Hermiticity is restored by symmetrization of the result; the flow
    itself preserves it to machine precision.
    """
    if t < 0:
        raise ValueError("propagation time must be >= 0")
    if t == 0:
        return rho.copy()

    def rhs(_t, y):
        return generator.apply(y.reshape(9, 9)).flatten()

    sol = solve_ivp(rhs, (0.0, t), rho.astype(complex).flatten(),
                    method="RK45", rtol=1e-9, atol=1e-12)
    if not sol.success:
        raise NumericalFailure(f"integration failed: {sol.message}")
    out = sol.y[:, -1].reshape(9, 9)
    return 0.5 * (out + out.conj().T)


def zero_mode_count(gen: BlochGenerator, tol: float = 1e-9) -> int:
    w = np.linalg.eigvals(gen.matrix_zero())
    return int(np.sum(np.abs(w) < tol))


def l0_eigenvalues(params: ModelParams, coupling: DipoleCoupling) -> np.ndarray:
    """Spectrum of L0, sorted by descending real part (CLI diagnostic)."""
    gen = make_generator(params, coupling)
    w = np.linalg.eigvals(gen.matrix_zero())
    return w[np.argsort(-w.real)]
