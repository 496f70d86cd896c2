"""Square-loss AUC maximization written as a finite-sum minimax problem.

Primal ``x = [theta; u; v]`` in ``R^{d+2}``, dual ``y`` scalar; both unconstrained.
Each labelled row ``(a_i, b_i)`` contributes

    lam/2 ||x||^2 - p(1-p) y^2
      + p ((theta'a_i - v)^2 + 2(1+y) theta'a_i)        if b_i = -1
      + (1-p) ((theta'a_i - u)^2 - 2(1+y) theta'a_i)    if b_i = +1

with ``p`` the fraction of positive rows.
"""
from __future__ import annotations

import numpy as np
from scipy import sparse

from ..core import ProblemConstants, UsageError, estimate_average_smoothness
from .base import FiniteSumProblem


class AucProblem(FiniteSumProblem):
    def __init__(self, features, labels, lam: float, L: float | None = None):
        X = sparse.csr_matrix(features, dtype=float)
        b = np.asarray(labels, dtype=float).ravel()
        if X.shape[0] == 0 or X.shape[0] != b.size:
            raise UsageError("need one label per (nonempty) row")
        if not lam > 0:
            raise UsageError("lambda must be positive")
        n_pos = int(np.sum(b > 0))
        if n_pos == 0 or n_pos == b.size:
            raise UsageError("AUC needs both labels present (p_hat in (0, 1))")
        self.X = X
        self.labels = np.where(b > 0, 1.0, -1.0)
        self.pos = self.labels > 0
        self.lam = float(lam)
        self.n, self.d = X.shape
        self.p_hat = n_pos / self.n
        self.dx = self.d + 2
        self.dy = 1
        self.row_sq_norms = np.asarray(X.multiply(X).sum(axis=1)).ravel()
        p = self.p_hat
        self._diag = np.concatenate([np.full(self.dx, self.lam), [2.0 * p * (1.0 - p)]])
        self._offset = np.zeros(self.dim)
        # estimate once with placeholder constants; the estimator only needs gradients
        self.constants = ProblemConstants(self.n, 1.0, self.lam, 2.0 * p * (1.0 - p))
        if L is None:
            L = estimate_average_smoothness(self, num_pairs=64, radius=1.0, seed=0)
        self.constants = ProblemConstants(self.n, float(L), self.lam, 2.0 * p * (1.0 - p))

    # per-row scalar pieces: theta coefficient, u/v partials, data part of the y partial
    def _pieces(self, s, u, v, y, pos):
        p = self.p_hat
        coef = np.where(pos, (1 - p) * (2 * (s - u) - 2 * (1 + y)), p * (2 * (s - v) + 2 * (1 + y)))
        du = np.where(pos, -2 * (1 - p) * (s - u), 0.0)
        dv = np.where(pos, 0.0, -2 * p * (s - v))
        dy = np.where(pos, -2 * (1 - p) * s, 2 * p * s)
        return coef, du, dv, dy

    def _unpack(self, x, y):
        x = np.asarray(x, dtype=float)
        return x[:self.d], x[self.d], x[self.d + 1], float(np.asarray(y).ravel()[0])

    def value(self, x, y) -> float:
        theta, u, v, yy = self._unpack(x, y)
        p = self.p_hat
        s = self.X @ theta
        neg = p * ((s - v) ** 2 + 2 * (1 + yy) * s)
        pos = (1 - p) * ((s - u) ** 2 - 2 * (1 + yy) * s)
        data = np.where(self.pos, pos, neg).mean()
        return float(0.5 * self.lam * np.dot(x, x) - p * (1 - p) * yy ** 2 + data)

    def component_partials(self, i, x, y):
        theta, u, v, yy = self._unpack(x, y)
        row = self.X.getrow(i)
        s = float(row.data @ theta[row.indices])
        coef, du, dv, dy = (float(t) for t in self._pieces(s, u, v, yy, bool(self.pos[i])))
        gx = self.lam * np.asarray(x, dtype=float).copy()
        gx[row.indices] += coef * row.data
        gx[self.d] += du
        gx[self.d + 1] += dv
        gy = np.array([-2 * self.p_hat * (1 - self.p_hat) * yy + dy])
        return gx, gy

    def partials(self, x, y):
        theta, u, v, yy = self._unpack(x, y)
        s = self.X @ theta
        coef, du, dv, dy = self._pieces(s, u, v, yy, self.pos)
        gx = self.lam * np.asarray(x, dtype=float).copy()
        gx[:self.d] += self.X.T @ coef / self.n
        gx[self.d] += du.mean()
        gx[self.d + 1] += dv.mean()
        gy = np.array([-2 * self.p_hat * (1 - self.p_hat) * yy + dy.mean()])
        return gx, gy

    def sparse_parts(self):
        return self._diag, self._offset

    def component_sparse(self, i, z):
        theta, u, v, yy = self._unpack(z[:self.dx], z[self.dx:])
        lo, hi = self.X.indptr[i], self.X.indptr[i + 1]
        cols = self.X.indices[lo:hi]
        data = self.X.data[lo:hi]
        s = float(data @ theta[cols])
        coef, du, dv, dy = (float(t) for t in self._pieces(s, u, v, yy, bool(self.pos[i])))
        idx = np.concatenate([cols, [self.d, self.d + 1, self.dx]])
        # operator convention negates the y partial
        vals = np.concatenate([coef * data, [du, dv, -dy]])
        return idx, vals

    def component_operator(self, i, z):
        idx, vals = self.component_sparse(i, z)
        out = self._diag * z
        out[idx] += vals
        return out

    def component_diff_sq_norms(self, z1, z2):
        t1, u1, v1, y1 = self._unpack(z1[:self.dx], z1[self.dx:])
        t2, u2, v2, y2 = self._unpack(z2[:self.dx], z2[self.dx:])
        s1, s2 = self.X @ t1, self.X @ t2
        c1, du1, dv1, dy1 = self._pieces(s1, u1, v1, y1, self.pos)
        c2, du2, dv2, dy2 = self._pieces(s2, u2, v2, y2, self.pos)
        lam = self.lam
        dtheta = t1 - t2
        dc = c1 - c2
        theta_part = (lam ** 2 * np.dot(dtheta, dtheta) + 2 * lam * dc * (self.X @ dtheta)
                      + dc ** 2 * self.row_sq_norms)
        mu_y = 2 * self.p_hat * (1 - self.p_hat)
        return (theta_part + (lam * (u1 - u2) + du1 - du2) ** 2 + (lam * (v1 - v2) + dv1 - dv2) ** 2
                + (mu_y * (y1 - y2) - (dy1 - dy2)) ** 2)


def make_auc(rows, lam: float = 1e-10, dim: int | None = None, L: float | None = None) -> AucProblem:
    """Build the AUC problem from parsed LIBSVM rows."""
    from ..data_io import rows_to_csr

    rows = list(rows)
    if not rows:
        raise UsageError("no data rows")
    X, labels = rows_to_csr(rows, dim)
    return AucProblem(X, labels, lam, L=L)
