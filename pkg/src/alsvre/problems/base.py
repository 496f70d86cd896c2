"""Finite-sum minimax problem interface: ``min_x max_y (1/n) sum_i f_i(x, y)``."""
from __future__ import annotations

import numpy as np

from ..core import ProblemConstants, UsageError
from ..projections import FeasibleSet, whole_space


class FiniteSumProblem:
    """Base class for finite-sum problems.

    Subclasses set ``n``, ``dx``, ``dy``, ``x_set``, ``y_set`` and ``constants``
    and implement :meth:`value` and :meth:`component_partials`. Everything the
    solvers touch is expressed on the flat vector ``z = (x, y)`` through the
    operator convention ``g(z) = (grad_x f, -grad_y f)``.

    Problems whose component operators share an affine part and differ only on
    a fixed sparse index set can expose that through :meth:`sparse_parts` and
    :meth:`component_sparse`; solvers then build variance-reduction
    corrections without materialising dense component gradients.

    Instances are treated as immutable once built.
    """

    n: int
    dx: int
    dy: int
    x_set: FeasibleSet = whole_space()
    y_set: FeasibleSet = whole_space()
    constants: ProblemConstants

    @property
    def dim(self) -> int:
        return self.dx + self.dy

    # -- subclass hooks -------------------------------------------------
    def value(self, x, y) -> float:
        raise NotImplementedError

    def component_partials(self, i: int, x, y):
        """``(grad_x f_i, grad_y f_i)`` at ``(x, y)``."""
        raise NotImplementedError

    def partials(self, x, y):
        gx = np.zeros(self.dx)
        gy = np.zeros(self.dy)
        for i in range(self.n):
            a, b = self.component_partials(i, x, y)
            gx += a
            gy += b
        return gx / self.n, gy / self.n

    def sparse_parts(self):
        """``(diag, offset)`` of the shared affine part, or ``None``."""
        return None

    def component_sparse(self, i: int, z):
        """``(idx, vals)`` with ``g_i(z) = diag*z + offset + scatter(idx, vals)``."""
        raise NotImplementedError

    # -- flat-vector helpers ------------------------------------------------
    def split(self, z):
        return z[:self.dx], z[self.dx:]

    def join(self, x, y) -> np.ndarray:
        return np.concatenate([np.atleast_1d(x), np.atleast_1d(y)]).astype(float)

    def project(self, z) -> np.ndarray:
        x, y = self.split(np.asarray(z, dtype=float))
        return np.concatenate([self.x_set.project(x), self.y_set.project(y)])

    @property
    def center(self) -> np.ndarray:
        return np.concatenate([self.x_set.center(self.dx), self.y_set.center(self.dy)])

    def objective(self, z) -> float:
        x, y = self.split(np.asarray(z, dtype=float))
        return self.value(x, y)

    def operator(self, z) -> np.ndarray:
        x, y = self.split(z)
        gx, gy = self.partials(x, y)
        return np.concatenate([gx, -gy])

    def component_operator(self, i: int, z) -> np.ndarray:
        x, y = self.split(z)
        gx, gy = self.component_partials(i, x, y)
        return np.concatenate([gx, -gy])

    def component_operator_diff(self, i: int, z1, z2) -> np.ndarray:
        parts = self.sparse_parts()
        if parts is None:
            return self.component_operator(i, z1) - self.component_operator(i, z2)
        diag, _ = parts
        out = diag * (z1 - z2)
        idx, v1 = self.component_sparse(i, z1)
        _, v2 = self.component_sparse(i, z2)
        out[idx] += v1 - v2
        return out

    def component_operators(self, z) -> np.ndarray:
        """All ``g_i(z)`` stacked as an ``(n, dim)`` array."""
        return np.stack([self.component_operator(i, z) for i in range(self.n)])

    def component_diff_sq_norms(self, z1, z2) -> np.ndarray:
        """``||g_i(z1) - g_i(z2)||^2`` for every component."""
        d = self.component_operators(z1) - self.component_operators(z2)
        return np.einsum("ij,ij->i", d, d)

    def check_point(self, z) -> np.ndarray:
        z = np.asarray(z, dtype=float)
        if z.shape != (self.dim,):
            raise UsageError(f"point has shape {z.shape}, problem expects ({self.dim},)")
        return z
