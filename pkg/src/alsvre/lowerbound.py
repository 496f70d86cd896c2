"""Adversarial finite-sum instances with closed-form saddles and zero-chain auditing.

The chain instance stacks ``n`` copies of the bilinear-quadratic function

    H(x, y) = (alpha/2) ||x||^2 + x'(B y - c) - (alpha/2) ||y||^2

on disjoint coordinate blocks (component ``i`` sees only block ``i``), where ``B``
is lower bidiagonal with ones on the diagonal, ``-1`` below it and last diagonal
entry ``sqrt(alpha * omega)``. A first-order query of component ``i`` can extend
the nonzero prefix of block ``i`` by at most one coordinate.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .core import Oracle, PrimalDualPoint, ProblemConstants, UsageError
from .problems.base import FiniteSumProblem


class HardChainInstance(FiniteSumProblem):
    """``f(x, y) = (1/n) sum_i lambda_h H(U_i x, U_i y)`` with blocks of size ``d``.

    Only ``(alpha_h, lambda_h, d, n)`` are stored; block gradients use the
    bidiagonal structure of ``B`` directly.
    """

    def __init__(self, alpha_h: float, lambda_h: float, d: int, n: int):
        if not alpha_h > 0 or not lambda_h > 0:
            raise UsageError("alpha_h and lambda_h must be positive")
        if d < 1 or n < 1:
            raise UsageError("d and n must be >= 1")
        self.alpha_h = float(alpha_h)
        self.lambda_h = float(lambda_h)
        self.d = int(d)
        self.n = int(n)
        self.dx = self.dy = self.n * self.d
        a = self.alpha_h
        self.omega = (math.sqrt(a * a + 4.0) - a) / 2.0
        self.q_h = (2.0 + a * a - a * math.sqrt(a * a + 4.0)) / 2.0
        self.last_diag = math.sqrt(a * self.omega)
        L = self.lambda_h * math.sqrt((8.0 + 2.0 * a * a) / self.n)
        mu = self.lambda_h * a / self.n
        self.constants = ProblemConstants(self.n, L, mu, mu)

    def B_matrix(self) -> np.ndarray:
        B = np.eye(self.d) - np.eye(self.d, k=-1)
        B[-1, -1] = self.last_diag
        return B

    def _B(self, v):
        # v has shape (..., d)
        out = v.copy()
        out[..., 1:] -= v[..., :-1]
        out[..., -1] += (self.last_diag - 1.0) * v[..., -1]
        return out

    def _Bt(self, v):
        out = v.copy()
        out[..., :-1] -= v[..., 1:]
        out[..., -1] = self.last_diag * v[..., -1]
        return out

    def _block_grads(self, xb, yb):
        gx = self.alpha_h * xb + self._B(yb)
        gx[..., 0] -= self.omega
        gy = self._Bt(xb) - self.alpha_h * yb
        return gx, gy

    def _blocks(self, v):
        return np.asarray(v, dtype=float).reshape(self.n, self.d)

    def value(self, x, y) -> float:
        xb, yb = self._blocks(x), self._blocks(y)
        c_term = self.omega * xb[:, 0]
        H = (0.5 * self.alpha_h * np.sum(xb ** 2, axis=1) + np.sum(xb * self._B(yb), axis=1) - c_term
             - 0.5 * self.alpha_h * np.sum(yb ** 2, axis=1))
        return float(self.lambda_h * H.mean())

    def component_partials(self, i, x, y):
        gx = np.zeros(self.dx)
        gy = np.zeros(self.dy)
        sl = slice(i * self.d, (i + 1) * self.d)
        bx, by = self._block_grads(np.asarray(x[sl], dtype=float), np.asarray(y[sl], dtype=float))
        gx[sl] = self.lambda_h * bx
        gy[sl] = self.lambda_h * by
        return gx, gy

    def partials(self, x, y):
        gx, gy = self._block_grads(self._blocks(x), self._blocks(y))
        scale = self.lambda_h / self.n
        return scale * gx.ravel(), scale * gy.ravel()

    def sparse_parts(self):
        return np.zeros(self.dim), np.zeros(self.dim)

    def component_sparse(self, i, z):
        lo, hi = i * self.d, (i + 1) * self.d
        bx, by = self._block_grads(z[lo:hi], z[self.dx + lo:self.dx + hi])
        idx = np.concatenate([np.arange(lo, hi), self.dx + np.arange(lo, hi)])
        return idx, self.lambda_h * np.concatenate([bx, -by])

    def component_operator(self, i, z):
        out = np.zeros(self.dim)
        idx, vals = self.component_sparse(i, z)
        out[idx] = vals
        return out

    def component_operators(self, z):
        xb, yb = self._blocks(z[:self.dx]), self._blocks(z[self.dx:])
        bx, by = self._block_grads(xb, yb)
        out = np.zeros((self.n, self.dim))
        for i in range(self.n):
            lo, hi = i * self.d, (i + 1) * self.d
            out[i, lo:hi] = self.lambda_h * bx[i]
            out[i, self.dx + lo:self.dx + hi] = -self.lambda_h * by[i]
        return out

    def component_diff_sq_norms(self, z1, z2):
        dz = z1 - z2
        bx, by = self._block_grads(self._blocks(dz[:self.dx]), self._blocks(dz[self.dx:]))
        # the constant c cancels in differences but _block_grads subtracts it once
        bx[:, 0] += self.omega
        return self.lambda_h ** 2 * (np.sum(bx ** 2, axis=1) + np.sum(by ** 2, axis=1))


def chain_parameters(L: float, mu: float, n: int, eps: float):
    """``(alpha, lambda, d)`` making the chain ``(mu, mu)``-convex-concave and ``L``-average smooth."""
    if not (mu > 0 and L > 0 and n >= 1):
        raise UsageError("need L > 0, mu > 0, n >= 1")
    if not L / mu > math.sqrt(10 * n):
        raise UsageError("the chain construction requires L/mu > sqrt(10 n)")
    if not 0 < eps < 0.5 * math.exp(-5):
        raise UsageError("the chain construction requires 0 < eps < exp(-5)/2")
    alpha = math.sqrt(8 * n / ((L / mu) ** 2 - 2 * n))
    lam = n * mu / alpha
    d = math.floor(math.log(1.0 / (2.0 * eps)) / alpha) - 4
    if d < 1:
        raise UsageError("eps too large for a nonempty chain (d < 1)")
    return alpha, lam, d


def build_hard_chain(L: float, mu: float, n: int, eps: float) -> HardChainInstance:
    alpha, lam, d = chain_parameters(L, mu, n, eps)
    return HardChainInstance(alpha, lam, d, n)


def chain_block_saddle(alpha_h: float, d: int):
    """Saddle ``(x*, y*)`` of a single ``H`` block."""
    a = alpha_h
    omega = (math.sqrt(a * a + 4.0) - a) / 2.0
    q = (2.0 + a * a - a * math.sqrt(a * a + 4.0)) / 2.0
    x = q ** np.arange(1, d + 1, dtype=float)
    y = omega * x.copy()
    y[-1] /= math.sqrt(1.0 - q)
    return x, y


def hard_chain_saddle(inst: HardChainInstance) -> PrimalDualPoint:
    x, y = chain_block_saddle(inst.alpha_h, inst.d)
    return PrimalDualPoint(np.tile(x, inst.n), np.tile(y, inst.n))


def block_relative_distance(inst: HardChainInstance, z, block: int = 0) -> float:
    """``(||x_b - x*||^2 + ||y_b - y*||^2) / (||x*||^2 + ||y*||^2)`` for one block."""
    z = np.asarray(z, dtype=float)
    xs, ys = chain_block_saddle(inst.alpha_h, inst.d)
    sl = slice(block * inst.d, (block + 1) * inst.d)
    xb, yb = z[:inst.dx][sl], z[inst.dx:][sl]
    return float((np.sum((xb - xs) ** 2) + np.sum((yb - ys) ** 2)) / (xs @ xs + ys @ ys))


class SeparableHardInstance(FiniteSumProblem):
    """``f_i = (mu/2)||x||^2 + (sqrt(n) Lh/2)(x_i - 1)^2 - (mu/2)||y||^2 - (sqrt(n) Lh/2)(y_i - 1)^2``."""

    def __init__(self, n: int, mu: float, L_hat: float, L: float | None = None):
        if n < 1 or mu < 0 or not L_hat > 0:
            raise UsageError("need n >= 1, mu >= 0, L_hat > 0")
        self.n = self.dx = self.dy = int(n)
        self.mu = float(mu)
        self.L_hat = float(L_hat)
        self.weight = math.sqrt(n) * self.L_hat
        L = math.sqrt(2.0 * (self.L_hat ** 2 + self.mu ** 2)) if L is None else float(L)
        self.constants = ProblemConstants(self.n, L, self.mu, self.mu)
        self._diag = np.full(2 * self.n, self.mu)

    def value(self, x, y) -> float:
        x = np.asarray(x, dtype=float)
        y = np.asarray(y, dtype=float)
        return float(0.5 * self.mu * (x @ x - y @ y)
                     + 0.5 * self.L_hat / math.sqrt(self.n) * (np.sum((x - 1) ** 2) - np.sum((y - 1) ** 2)))

    def component_partials(self, i, x, y):
        gx = self.mu * np.asarray(x, dtype=float)
        gy = -self.mu * np.asarray(y, dtype=float)
        gx[i] += self.weight * (x[i] - 1.0)
        gy[i] -= self.weight * (y[i] - 1.0)
        return gx, gy

    def partials(self, x, y):
        x = np.asarray(x, dtype=float)
        y = np.asarray(y, dtype=float)
        w = self.weight / self.n
        return self.mu * x + w * (x - 1.0), -self.mu * y - w * (y - 1.0)

    def sparse_parts(self):
        return self._diag, np.zeros(2 * self.n)

    def component_sparse(self, i, z):
        return (np.array([i, self.n + i]),
                self.weight * np.array([z[i] - 1.0, z[self.n + i] - 1.0]))

    def component_operator(self, i, z):
        out = self._diag * z
        out[i] += self.weight * (z[i] - 1.0)
        out[self.n + i] += self.weight * (z[self.n + i] - 1.0)
        return out

    def component_diff_sq_norms(self, z1, z2):
        dz = z1 - z2
        dx, dy = dz[:self.n], dz[self.n:]
        base = self.mu ** 2 * float(dz @ dz)
        cross = 2 * self.mu * self.weight * (dx ** 2 + dy ** 2) + self.weight ** 2 * (dx ** 2 + dy ** 2)
        return base + cross

    @property
    def component_smoothness(self) -> float:
        """Per-component Lipschitz constant ``mu + sqrt(n) Lh``."""
        return self.mu + self.weight


def build_separable(L: float, mu: float, n: int) -> SeparableHardInstance:
    if not (L > 0 and mu >= 0 and L > 2 * mu):
        raise UsageError("the separable construction requires L/mu > 2")
    return SeparableHardInstance(n, mu, math.sqrt(L * L / 2.0 - mu * mu), L=L)


def separable_saddle(inst: SeparableHardInstance) -> PrimalDualPoint:
    v = inst.L_hat / (inst.L_hat + math.sqrt(inst.n) * inst.mu)
    return PrimalDualPoint(np.full(inst.n, v), np.full(inst.n, v))


def _prefix_support(v: np.ndarray) -> int:
    nz = np.flatnonzero(v)
    return int(nz[-1]) + 1 if nz.size else 0


@dataclass
class ZeroChainReport:
    passed: bool
    steps: int
    violation: dict | None = None
    max_support: list = field(default_factory=list)


def zero_chain_audit(inst: HardChainInstance, z0, steps) -> ZeroChainReport:
    """Check that no block's nonzero prefix outgrows its query count.

    ``steps`` is an iterable of ``(z_t, queried)`` pairs where ``queried`` lists
    the component indices queried since the previous iterate. The count
    ``k_i(t)`` of queries to component ``i`` bounds the nonzero prefix of both
    ``U_i x_t`` and ``U_i y_t``.
    """
    z0 = np.asarray(z0, dtype=float)
    if np.any(z0 != 0.0):
        raise UsageError("zero-chain audit needs a trace started at the origin")
    counts = np.zeros(inst.n, dtype=int)
    max_support = [0] * inst.n
    t = 0
    for t, (z, queried) in enumerate(steps, start=1):
        for i in queried:
            counts[int(i)] += 1
        z = np.asarray(z, dtype=float)
        xb = z[:inst.dx].reshape(inst.n, inst.d)
        yb = z[inst.dx:].reshape(inst.n, inst.d)
        for i in range(inst.n):
            for side, block in (("x", xb[i]), ("y", yb[i])):
                s = _prefix_support(block)
                max_support[i] = max(max_support[i], s)
                if s > counts[i]:
                    return ZeroChainReport(False, t, {"t": t, "block": i, "side": side,
                                                      "support": s, "allowed": int(counts[i])},
                                           max_support)
    return ZeroChainReport(True, t, None, max_support)


def record_trace(inst: HardChainInstance, run, **kwargs):
    """Run ``run(problem, z0, oracle=..., callback=..., **kwargs)`` from the origin.

    Returns ``(z0, steps)`` ready for :func:`zero_chain_audit`.
    """
    log: list = []
    oracle = Oracle(inst, log=log)
    steps = []
    cursor = [0]

    def callback(_, z):
        steps.append((np.array(z, copy=True), list(log[cursor[0]:])))
        cursor[0] = len(log)

    z0 = np.zeros(inst.dim)
    run(inst, z0, oracle=oracle, callback=callback, **kwargs)
    return z0, steps
