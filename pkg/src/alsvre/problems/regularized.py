"""Problem transforms: quadratic regularization and the x/y role swap."""
from __future__ import annotations

import numpy as np

from ..core import ProblemConstants, UsageError
from .base import FiniteSumProblem


class RegularizedProblem(FiniteSumProblem):
    """``f(x, y) + w_x ||x - x0||^2 - w_y ||y - y0||^2`` added to every component."""

    def __init__(self, inner: FiniteSumProblem, w_x: float, x0, w_y: float = 0.0, y0=None,
                 constants: ProblemConstants | None = None):
        self.inner = inner
        self.n, self.dx, self.dy = inner.n, inner.dx, inner.dy
        self.x_set, self.y_set = inner.x_set, inner.y_set
        self.w_x = float(w_x)
        self.w_y = float(w_y)
        self.x0 = np.broadcast_to(np.asarray(x0, dtype=float), (self.dx,)).copy()
        self.y0 = np.zeros(self.dy) if y0 is None else np.broadcast_to(
            np.asarray(y0, dtype=float), (self.dy,)).copy()
        self._shift_diag = np.concatenate([np.full(self.dx, 2 * self.w_x), np.full(self.dy, 2 * self.w_y)])
        self._shift_offset = -self._shift_diag * np.concatenate([self.x0, self.y0])
        self.constants = constants or inner.constants

    def value(self, x, y) -> float:
        dx = np.asarray(x) - self.x0
        dy = np.asarray(y) - self.y0
        return self.inner.value(x, y) + self.w_x * float(dx @ dx) - self.w_y * float(dy @ dy)

    def component_partials(self, i, x, y):
        gx, gy = self.inner.component_partials(i, x, y)
        return gx + 2 * self.w_x * (x - self.x0), gy - 2 * self.w_y * (y - self.y0)

    def partials(self, x, y):
        gx, gy = self.inner.partials(x, y)
        return gx + 2 * self.w_x * (x - self.x0), gy - 2 * self.w_y * (y - self.y0)

    def _shift(self, z):
        return self._shift_diag * z + self._shift_offset

    def operator(self, z):
        return self.inner.operator(z) + self._shift(z)

    def component_operator(self, i, z):
        return self.inner.component_operator(i, z) + self._shift(z)

    def component_operator_diff(self, i, z1, z2):
        return self.inner.component_operator_diff(i, z1, z2) + self._shift_diag * (z1 - z2)

    def component_operators(self, z):
        return self.inner.component_operators(z) + self._shift(z)

    def sparse_parts(self):
        parts = self.inner.sparse_parts()
        if parts is None:
            return None
        diag, offset = parts
        return diag + self._shift_diag, offset + self._shift_offset

    def component_sparse(self, i, z):
        return self.inner.component_sparse(i, z)


class TransposedProblem(FiniteSumProblem):
    """``f'(x', y') = -f(y', x')``: same saddle with the blocks swapped."""

    def __init__(self, inner: FiniteSumProblem):
        self.inner = inner
        self.n, self.dx, self.dy = inner.n, inner.dy, inner.dx
        self.x_set, self.y_set = inner.y_set, inner.x_set
        c = inner.constants
        self.constants = ProblemConstants(c.n, c.L, c.mu_y, c.mu_x)

    def to_inner(self, z):
        """Flat point of this problem -> flat point of the inner problem."""
        return np.concatenate([z[self.dx:], z[:self.dx]])

    def from_inner(self, g):
        return np.concatenate([g[self.inner.dx:], g[:self.inner.dx]])

    def value(self, x, y) -> float:
        return -self.inner.value(y, x)

    def component_partials(self, i, x, y):
        gx, gy = self.inner.component_partials(i, y, x)
        return -gy, -gx

    def partials(self, x, y):
        gx, gy = self.inner.partials(y, x)
        return -gy, -gx

    def operator(self, z):
        return self.from_inner(self.inner.operator(self.to_inner(z)))

    def component_operator(self, i, z):
        return self.from_inner(self.inner.component_operator(i, self.to_inner(z)))

    def component_operator_diff(self, i, z1, z2):
        return self.from_inner(self.inner.component_operator_diff(i, self.to_inner(z1), self.to_inner(z2)))

    def component_diff_sq_norms(self, z1, z2):
        return self.inner.component_diff_sq_norms(self.to_inner(z1), self.to_inner(z2))


def _diameter(fset, dim, given, name):
    D = fset.diameter(dim) if given is None else float(given)
    if not np.isfinite(D) or D <= 0:
        raise UsageError(f"{name} must be a finite positive diameter (bounded feasible set)")
    return D


def wrap_strongly_concave(inner: FiniteSumProblem, eps: float, Dx: float | None = None,
                          x0=None) -> RegularizedProblem:
    """Add ``eps/(4 Dx^2) ||x - x0||^2`` so a (0, mu_y) problem becomes strongly convex.

    An ``eps/2``-saddle point of the result is an ``eps``-saddle point of ``inner``.
    """
    Dx = _diameter(inner.x_set, inner.dx, Dx, "Dx")
    L = inner.constants.L
    if not 0 < eps <= 4 * L * Dx ** 2:
        raise UsageError(f"eps must satisfy 0 < eps <= 4*L*Dx^2 = {4 * L * Dx ** 2:g}")
    x0 = inner.x_set.center(inner.dx) if x0 is None else x0
    w = eps / (4 * Dx ** 2)
    c = inner.constants
    return RegularizedProblem(inner, w, x0, constants=ProblemConstants(c.n, 2 * L, w, c.mu_y))


def wrap_both(inner: FiniteSumProblem, eps: float, Dx: float | None = None, Dy: float | None = None,
              x0=None, y0=None) -> RegularizedProblem:
    """Add ``eps/(8 Dx^2) ||x - x0||^2 - eps/(8 Dy^2) ||y - y0||^2`` to a convex-concave problem."""
    Dx = _diameter(inner.x_set, inner.dx, Dx, "Dx")
    Dy = _diameter(inner.y_set, inner.dy, Dy, "Dy")
    L = inner.constants.L
    bound = 4 * L * min(Dx ** 2, Dy ** 2)
    if not 0 < eps <= bound:
        raise UsageError(f"eps must satisfy 0 < eps <= 4*L*min(Dx^2, Dy^2) = {bound:g}")
    x0 = inner.x_set.center(inner.dx) if x0 is None else x0
    y0 = inner.y_set.center(inner.dy) if y0 is None else y0
    wx = eps / (8 * Dx ** 2)
    wy = eps / (8 * Dy ** 2)
    c = inner.constants
    return RegularizedProblem(inner, wx, x0, wy, y0, constants=ProblemConstants(c.n, 2 * L, wx, wy))
