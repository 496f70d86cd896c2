"""Power allocation against a jammer: ``f = -(1/n) sum_i log(1 + b_i x_i / (a_i + y_i))``."""
from __future__ import annotations

import numpy as np

from ..core import ProblemConstants, UsageError, estimate_average_smoothness, make_rng
from ..projections import nonneg_ball, simplex_sum
from .base import FiniteSumProblem


class WirelessProblem(FiniteSumProblem):
    """Component ``i`` touches only the coordinate pair ``(x_i, y_i)``.

    ``x`` lives in ``{||x|| <= R, x >= 0}`` and ``y`` in ``{1'y = n, y >= 0}``.
    The raw problem is declared ``(0, 0)``-convex-concave; ``L`` is estimated
    over the feasible sets unless given.
    """

    def __init__(self, a, b, R: float = 1.0, L: float | None = None):
        a = np.asarray(a, dtype=float).ravel()
        b = np.asarray(b, dtype=float).ravel()
        if a.shape != b.shape or a.size == 0:
            raise UsageError("a and b must be nonempty vectors of equal length")
        if np.any(b <= 0):
            raise UsageError("b must be positive")
        if np.any(a < 0):
            raise UsageError("a must be nonnegative")
        if not R > 0:
            raise UsageError("R must be positive")
        self.a, self.b, self.R = a, b, float(R)
        self.n = self.dx = self.dy = a.size
        self.x_set = nonneg_ball(R)
        self.y_set = simplex_sum(self.n)
        self._diag = np.zeros(2 * self.n)
        self._offset = np.zeros(2 * self.n)
        self.constants = ProblemConstants(self.n, 1.0)
        if L is None:
            L = estimate_average_smoothness(self, num_pairs=64, radius=1.0, seed=0)
        self.constants = ProblemConstants(self.n, float(L))

    def value(self, x, y) -> float:
        x = np.asarray(x, dtype=float)
        y = np.asarray(y, dtype=float)
        return float(-np.mean(np.log1p(self.b * x / (self.a + y))))

    def _pair_partials(self, x, y, a, b):
        inner = a + y + b * x
        gx = -b / inner
        gy = -1.0 / inner + 1.0 / (a + y)
        return gx, gy

    def component_partials(self, i, x, y):
        px, py = self._pair_partials(x[i], y[i], self.a[i], self.b[i])
        gx = np.zeros(self.n)
        gy = np.zeros(self.n)
        gx[i] = px
        gy[i] = py
        return gx, gy

    def partials(self, x, y):
        gx, gy = self._pair_partials(np.asarray(x), np.asarray(y), self.a, self.b)
        return gx / self.n, gy / self.n

    def sparse_parts(self):
        return self._diag, self._offset

    def component_sparse(self, i, z):
        px, py = self._pair_partials(z[i], z[self.n + i], self.a[i], self.b[i])
        return np.array([i, self.n + i]), np.array([px, -py])

    def component_operator(self, i, z):
        out = np.zeros(self.dim)
        idx, vals = self.component_sparse(i, z)
        out[idx] = vals
        return out

    def component_diff_sq_norms(self, z1, z2):
        x1, y1 = self.split(z1)
        x2, y2 = self.split(z2)
        gx1, gy1 = self._pair_partials(x1, y1, self.a, self.b)
        gx2, gy2 = self._pair_partials(x2, y2, self.a, self.b)
        return (gx1 - gx2) ** 2 + (gy1 - gy2) ** 2


def make_wireless(a, b, R: float = 1.0, L: float | None = None) -> WirelessProblem:
    return WirelessProblem(a, b, R, L=L)


def gen_wireless_channels(n: int, lo: float, hi: float, seed=0) -> np.ndarray:
    """Noise levels ``a`` drawn uniformly from ``[lo, hi]^n``."""
    if n < 1 or not hi >= lo:
        raise UsageError("need n >= 1 and hi >= lo")
    return make_rng(seed).uniform(lo, hi, size=n)


def gen_wireless(n: int, R: float = 1.0, lo: float = 0.0, hi: float = 10.0, seed=0) -> WirelessProblem:
    """Random instance with ``b = 1`` and ``a ~ U[lo, hi]^n``."""
    return WirelessProblem(gen_wireless_channels(n, lo, hi, seed), np.ones(n), R)
