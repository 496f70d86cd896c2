"""Projected extragradient baseline (two full gradients per iteration)."""
from __future__ import annotations

import numpy as np

from ..core import NumericalError, Oracle, PrimalDualPoint, UsageError
from .trace import SolverTrace, _Recorder


def _finite(z, t):
    if not np.all(np.isfinite(z)):
        raise NumericalError(f"iterate became non-finite at iteration {t}")
    return z


def extragradient_run(problem, z0, tau: float, T: int, trace_every: int = 1, metrics=None,
                      budget_sfo: int | None = None, oracle: Oracle | None = None,
                      callback=None) -> SolverTrace:
    """``z_half = P(z - tau g(z))``, ``z+ = P(z - tau g(z_half))``; costs 2n SFO per step.

    Stops after ``T`` iterations, or before an iteration once the SFO budget is spent.
    """
    if not tau > 0:
        raise UsageError("tau must be positive")
    if T < 0:
        raise UsageError("T must be >= 0")
    oracle = oracle or Oracle(problem)
    z = problem.project(problem.check_point(z0))
    trace = SolverTrace(problem.n, None, {"solver": "eg", "tau": float(tau), "T": int(T)})
    rec = _Recorder(trace, trace_every, metrics)
    rec(0, z, oracle.calls)
    t = 0
    while t < T and (budget_sfo is None or oracle.calls < budget_sfo):
        z_half = problem.project(z - tau * oracle.full(z))
        z = _finite(problem.project(z - tau * oracle.full(z_half)), t + 1)
        t += 1
        if callback is not None:
            callback(t, z)
        rec(t, z, oracle.calls)
    rec.close(t, z, oracle.calls)
    trace.final = PrimalDualPoint.from_flat(z, problem.dx)
    trace.iterations = t
    trace.sfo_calls = oracle.calls
    return trace
