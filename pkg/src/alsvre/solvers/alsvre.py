"""Accelerated loopless SVRE: proximal-point outer loop with momentum on the anchor."""
from __future__ import annotations

import numpy as np

from ..core import Oracle, PrimalDualPoint, make_rng
from ..problems.regularized import RegularizedProblem, TransposedProblem
from .lsvre import _lsvre_loop
from .schedules import ScheduleParams
from .trace import SolverTrace, _Recorder


def alsvre_run(problem, z0, params: ScheduleParams, trace_every: int = 1, metrics=None,
               budget_sfo: int | None = None, oracle: Oracle | None = None,
               callback=None) -> SolverTrace:
    """Run ``params.K`` outer rounds; checkpoints are indexed by round.

    Round ``k`` solves ``F_k = f + (beta/2)||x - u_{k-1}||^2`` with ``T_k`` inner
    steps warm-started at ``(x_{k-1}, y_{k-1})``, takes one projected full-gradient
    step on ``F_k`` and extrapolates the anchor. ``callback(step, z)`` sees every
    inner iterate and every corrected point, in the caller's coordinates.
    """
    work = TransposedProblem(problem) if params.transposed else problem
    to_outer = work.to_inner if params.transposed else None
    oracle = oracle or Oracle(problem)
    n = problem.n
    z = problem.project(problem.check_point(z0))
    if params.transposed:
        z = work.from_inner(z)
    rng = make_rng(params.seed)
    trace = SolverTrace(n, params.seed, {"solver": "alsvre", **params.as_dict()})
    rec = _Recorder(trace, trace_every, metrics, to_outer)
    rec(0, z, oracle.calls)
    inner_budget = None if budget_sfo is None else budget_sfo - n
    step = [0]

    def report(zt):
        step[0] += 1
        if callback is not None:
            callback(step[0], zt if to_outer is None else to_outer(zt))

    x_prev = z[:work.dx].copy()
    u = x_prev.copy()
    refreshes = 0
    k = 0
    while k < params.K and (budget_sfo is None or oracle.calls < budget_sfo):
        k += 1
        F = work if params.beta == 0 else RegularizedProblem(work, params.beta / 2.0, u)
        sub = Oracle(F, calls=oracle.calls, log=oracle.log)
        tau = params.tau_k(k)
        z_tilde, _, r = _lsvre_loop(F, z, tau, params.p, params.T_k(k), rng, sub, inner_budget,
                                    lambda t, zt: report(zt))
        refreshes += r
        z = F.project(z_tilde - tau * sub.full(z_tilde))
        oracle.calls = sub.calls
        report(z)
        x = z[:work.dx]
        u = x + params.gamma * (x - x_prev)
        x_prev = x.copy()
        rec(k, z, oracle.calls)
    rec.close(k, z, oracle.calls)
    z_out = z if to_outer is None else to_outer(z)
    trace.final = PrimalDualPoint.from_flat(z_out, problem.dx)
    trace.iterations = k
    trace.refreshes = refreshes
    trace.sfo_calls = oracle.calls
    return trace
