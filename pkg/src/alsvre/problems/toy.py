"""Small closed-form families used by examples and verification suites."""
from __future__ import annotations

import numpy as np

from ..core import ProblemConstants, UsageError
from .base import FiniteSumProblem


class CoordinateSquares(FiniteSumProblem):
    """``g_i(z) = (sqrt(n) L / 2) (e_i' z)^2`` on ``z in R^n``.

    Each component is ``sqrt(n) L``-smooth while the family is only
    ``L``-average smooth. ``z`` is split into ``x`` (first ``dx`` coordinates)
    and ``y`` so it fits the minimax interface; only gradient norms matter here.
    """

    def __init__(self, n: int, L: float = 1.0, dx: int | None = None):
        if n < 2:
            raise UsageError("need n >= 2 so both blocks are nonempty")
        self.n = n
        self.dx = n // 2 if dx is None else int(dx)
        self.dy = n - self.dx
        self.scale = np.sqrt(n) * L
        self.constants = ProblemConstants(n, float(L))

    def value(self, x, y) -> float:
        z = self.join(x, y)
        return float(0.5 * self.scale * np.mean(z ** 2))

    def component_partials(self, i, x, y):
        grad = np.zeros(self.n)
        grad[i] = self.scale * self.join(x, y)[i]
        return grad[:self.dx], grad[self.dx:]

    def component_diff_sq_norms(self, z1, z2):
        return (self.scale * (z1 - z2)) ** 2


class LinearComponents(FiniteSumProblem):
    """Identical linear components ``f_i = u'x - w'y``: zero curvature."""

    def __init__(self, n: int, u, w):
        self.n = n
        self.u = np.atleast_1d(np.asarray(u, dtype=float))
        self.w = np.atleast_1d(np.asarray(w, dtype=float))
        self.dx, self.dy = self.u.size, self.w.size
        self.constants = ProblemConstants(n, 1.0)

    def value(self, x, y) -> float:
        return float(self.u @ x - self.w @ y)

    def component_partials(self, i, x, y):
        return self.u.copy(), -self.w.copy()
