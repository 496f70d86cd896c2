"""Synthetic quadratic minimax problems with known constants and saddle points."""
from __future__ import annotations

import numpy as np
from scipy.optimize import brentq

from ..core import PrimalDualPoint, ProblemConstants, UsageError, make_rng
from ..projections import FeasibleSet, whole_space
from .base import FiniteSumProblem


def _jacobians(A, B, C):
    top = np.concatenate([A, B], axis=2)
    bottom = np.concatenate([np.transpose(B, (0, 2, 1)), -C], axis=2)
    return np.concatenate([top, bottom], axis=1)


def exact_average_smoothness(A, B, C) -> float:
    """``sqrt(lambda_max(mean_i J_i^T J_i))`` for the component Jacobians ``J_i``."""
    J = _jacobians(np.asarray(A), np.asarray(B), np.asarray(C))
    gram = np.einsum("nki,nkj->ij", J, J) / J.shape[0]
    return float(np.sqrt(max(np.linalg.eigvalsh(gram)[-1], 0.0)))


class QuadraticProblem(FiniteSumProblem):
    """Components ``f_i = x'A_i x/2 + x'B_i y - y'C_i y/2 + a_i'x - c_i'y``.

    Arrays are stacked along the first axis: ``A`` is ``(n, dx, dx)``, ``B`` is
    ``(n, dx, dy)``, ``C`` is ``(n, dy, dy)``, ``a`` is ``(n, dx)`` and ``c`` is
    ``(n, dy)``. ``L`` defaults to the exact average-smoothness constant.
    """

    def __init__(self, A, B, C, a=None, c=None, *, mu_x: float, mu_y: float,
                 L: float | None = None, x_set: FeasibleSet | None = None,
                 y_set: FeasibleSet | None = None):
        self.A = np.asarray(A, dtype=float)
        self.B = np.asarray(B, dtype=float)
        self.C = np.asarray(C, dtype=float)
        self.n, self.dx, self.dy = self.B.shape
        if self.A.shape != (self.n, self.dx, self.dx) or self.C.shape != (self.n, self.dy, self.dy):
            raise UsageError("inconsistent component matrix shapes")
        self.a = np.zeros((self.n, self.dx)) if a is None else np.asarray(a, dtype=float).reshape(self.n, self.dx)
        self.c = np.zeros((self.n, self.dy)) if c is None else np.asarray(c, dtype=float).reshape(self.n, self.dy)
        self.A_mean = self.A.mean(axis=0)
        self.B_mean = self.B.mean(axis=0)
        self.C_mean = self.C.mean(axis=0)
        self.a_mean = self.a.mean(axis=0)
        self.c_mean = self.c.mean(axis=0)
        self.x_set = x_set or whole_space()
        self.y_set = y_set or whole_space()
        if L is None:
            L = exact_average_smoothness(self.A, self.B, self.C)
        self.constants = ProblemConstants(self.n, float(L), float(mu_x), float(mu_y))

    def value(self, x, y) -> float:
        x = np.atleast_1d(x)
        y = np.atleast_1d(y)
        return float(0.5 * x @ self.A_mean @ x + x @ self.B_mean @ y
                     - 0.5 * y @ self.C_mean @ y + self.a_mean @ x - self.c_mean @ y)

    def component_partials(self, i, x, y):
        gx = self.A[i] @ x + self.B[i] @ y + self.a[i]
        gy = self.B[i].T @ x - self.C[i] @ y - self.c[i]
        return gx, gy

    def partials(self, x, y):
        gx = self.A_mean @ x + self.B_mean @ y + self.a_mean
        gy = self.B_mean.T @ x - self.C_mean @ y - self.c_mean
        return gx, gy

    def component_operators(self, z):
        x, y = self.split(z)
        gx = np.einsum("nij,j->ni", self.A, x) + np.einsum("nij,j->ni", self.B, y) + self.a
        gy = np.einsum("nji,j->ni", self.B, x) - np.einsum("nij,j->ni", self.C, y) - self.c
        return np.concatenate([gx, -gy], axis=1)

    @property
    def unconstrained(self) -> bool:
        return not (self.x_set.bounded or self.y_set.bounded)


def _psd_off_direction(rng, n, d):
    """Random PSD matrices sharing the null direction ``e_1`` (for ``d >= 2``)."""
    G = rng.standard_normal((n, d, d)) / np.sqrt(d)
    S = np.einsum("nki,nkj->nij", G, G)
    S[:, 0, :] = 0.0
    S[:, :, 0] = 0.0
    return S


def make_quadratic_scsc(dims, n: int, mu_x: float, mu_y: float, target_L: float, seed=0,
                        linear_scale: float = 1.0) -> QuadraticProblem:
    """Random strongly-convex-strongly-concave quadratic with prescribed constants.

    ``A_i = mu_x I + s S_i`` and ``C_i = mu_y I + s T_i`` with PSD ``S_i, T_i`` that
    all vanish along the first coordinate, so the mean blocks have smallest
    eigenvalues exactly ``mu_x`` and ``mu_y`` (when the block dimension exceeds
    one). The coupling ``B_i`` is Gaussian. The scale ``s`` is solved for so the
    exact average-smoothness constant equals ``target_L``.
    """
    dx, dy = (int(d) for d in dims)
    if dx < 1 or dy < 1 or n < 1:
        raise UsageError("dimensions and n must be >= 1")
    if not (mu_x > 0 and mu_y > 0 and target_L > max(mu_x, mu_y)):
        raise UsageError("need target_L > max(mu_x, mu_y) > 0")
    rng = make_rng(seed)
    S = _psd_off_direction(rng, n, dx)
    T = _psd_off_direction(rng, n, dy)
    B0 = rng.standard_normal((n, dx, dy)) / np.sqrt(max(dx, dy))
    a = linear_scale * rng.standard_normal((n, dx))
    c = linear_scale * rng.standard_normal((n, dy))
    Ix = np.broadcast_to(np.eye(dx), (n, dx, dx))
    Iy = np.broadcast_to(np.eye(dy), (n, dy, dy))

    def blocks(s):
        return mu_x * Ix + s * S, s * B0, mu_y * Iy + s * T

    def excess(s):
        return exact_average_smoothness(*blocks(s)) - target_L

    hi = 1.0
    while excess(hi) < 0:
        hi *= 2.0
    s = brentq(excess, 0.0, hi, xtol=1e-15, rtol=1e-15)
    A, B, C = blocks(s)
    return QuadraticProblem(A.copy(), B.copy(), C.copy(), a, c, mu_x=mu_x, mu_y=mu_y,
                            L=exact_average_smoothness(A, B, C))


def quadratic_saddle_oracle(problem: QuadraticProblem) -> PrimalDualPoint:
    """Saddle point of an unconstrained quadratic via its linear KKT system."""
    if not problem.unconstrained:
        raise UsageError("the saddle oracle needs unconstrained feasible sets")
    K = np.block([[problem.A_mean, problem.B_mean], [-problem.B_mean.T, problem.C_mean]])
    rhs = np.concatenate([-problem.a_mean, -problem.c_mean])
    if np.linalg.cond(K) > 1e14:
        raise UsageError("singular saddle system")
    z = np.linalg.solve(K, rhs)
    return PrimalDualPoint.from_flat(z, problem.dx)
