"""Loopless stochastic variance-reduced extragradient."""
from __future__ import annotations

import math
from dataclasses import asdict, dataclass

import numpy as np

from ..core import NumericalError, Oracle, PrimalDualPoint, UsageError, make_rng
from .trace import SolverTrace, _Recorder


@dataclass(frozen=True)
class LsvreParams:
    tau: float
    p: float
    T: int
    seed: int = 0

    def __post_init__(self):
        if not self.tau > 0:
            raise UsageError("tau must be positive")
        if not 0 < self.p <= 1:
            raise UsageError("p must lie in (0, 1]")
        if self.T < 0:
            raise UsageError("T must be >= 0")

    @property
    def alpha(self) -> float:
        return 1.0 - self.p


def lsvre_default_params(problem, T: int = 1000, seed: int = 0) -> LsvreParams:
    """``p = 1/(2n)`` and ``tau = 1/(4 sqrt(n) L)``."""
    n, L = problem.constants.n, problem.constants.L
    return LsvreParams(tau=1.0 / (4.0 * math.sqrt(n) * L), p=1.0 / (2.0 * n), T=T, seed=seed)


def _lsvre_loop(problem, z, tau, p, T, rng, oracle, budget=None, on_step=None):
    """Run up to ``T`` iterations from ``z`` with snapshot ``w = z``.

    Returns ``(z, iterations, refreshes)``. The snapshot gradient costs ``n``
    up front and after every refresh; each iteration costs 2 more.
    """
    alpha = 1.0 - p
    n = problem.n
    w = z.copy()
    gw = oracle.full(w)
    refreshes = 0
    t = 0
    while t < T and (budget is None or oracle.calls < budget):
        z_bar = alpha * z + (1.0 - alpha) * w
        z_half = problem.project(z_bar - tau * gw)
        i = int(rng.integers(n))
        z = problem.project(z_bar - tau * (gw + oracle.component_diff(i, z_half, w)))
        if not np.all(np.isfinite(z)):
            raise NumericalError(f"iterate became non-finite at iteration {t + 1}")
        if rng.random() < p:
            w = z.copy()
            gw = oracle.full(w)
            refreshes += 1
        t += 1
        if on_step is not None:
            on_step(t, z)
    return z, t, refreshes


def lsvre_run(problem, z0, params: LsvreParams, trace_every: int = 1, metrics=None,
              budget_sfo: int | None = None, oracle: Oracle | None = None,
              callback=None) -> SolverTrace:
    """Run ``params.T`` iterations (or until the SFO budget is spent) from ``z0``.

    ``z0`` is projected onto the feasible sets first; the snapshot starts at ``z0``.
    """
    oracle = oracle or Oracle(problem)
    z = problem.project(problem.check_point(z0))
    rng = make_rng(params.seed)
    trace = SolverTrace(problem.n, params.seed, {"solver": "lsvre", **asdict(params)})
    rec = _Recorder(trace, trace_every, metrics)
    rec(0, z, oracle.calls)

    def on_step(t, zt):
        if callback is not None:
            callback(t, zt)
        rec(t, zt, oracle.calls)

    z, t, refreshes = _lsvre_loop(problem, z, params.tau, params.p, params.T, rng, oracle,
                                  budget_sfo, on_step)
    rec.close(t, z, oracle.calls)
    trace.final = PrimalDualPoint.from_flat(z, problem.dx)
    trace.iterations = t
    trace.refreshes = refreshes
    trace.sfo_calls = oracle.calls
    return trace
