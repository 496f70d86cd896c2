"""Invariant suites behind ``alsvre verify``. Every check uses fixed seeds."""
from __future__ import annotations

import math
import warnings

import numpy as np
from scipy.optimize import minimize

from .core import estimate_average_smoothness, make_rng
from .lowerbound import (HardChainInstance, build_hard_chain, build_separable, hard_chain_saddle,
                         record_trace, separable_saddle, zero_chain_audit)
from .metrics import duality_gap_quadratic, projected_gradient_step, saddle_excess
from .problems import CoordinateSquares, make_quadratic_scsc, quadratic_saddle_oracle
from .projections import ball, box, nonneg_ball, simplex_sum
from .solvers import extragradient_run, lsvre_default_params, lsvre_run


def _qp_projection(fset, z):
    """Projection by a generic constrained solver, used as an independent reference."""
    cons = []
    if fset.kind in ("ball", "nonneg_ball"):
        cons.append({"type": "ineq", "fun": lambda u: fset.radius ** 2 - u @ u,
                     "jac": lambda u: -2 * u})
    if fset.kind == "simplex_sum":
        cons.append({"type": "eq", "fun": lambda u: u.sum() - fset.total,
                     "jac": lambda u: np.ones_like(u)})
    bounds = None
    if fset.kind in ("nonneg_ball", "simplex_sum"):
        bounds = [(0, None)] * z.size
    elif fset.kind == "box":
        bounds = list(zip(np.broadcast_to(fset.lo, z.shape), np.broadcast_to(fset.hi, z.shape)))
    x0 = fset.center(z.size)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", RuntimeWarning)
        res = minimize(lambda u: 0.5 * (u - z) @ (u - z), x0, jac=lambda u: u - z, bounds=bounds,
                       constraints=cons, method="SLSQP", options={"ftol": 1e-15, "maxiter": 500})
    return res.x


def _sample_sets(rng):
    dim = int(rng.integers(1, 5))
    lo = -rng.uniform(0.1, 2.0, dim)
    return dim, [ball(rng.uniform(0.5, 2.0)), nonneg_ball(rng.uniform(0.5, 2.0)),
                 simplex_sum(rng.uniform(0.5, 3.0)), box(lo, lo + rng.uniform(0.1, 3.0, dim))]


def check_projections(trials=200, pairs=1000):
    rng = make_rng(11)
    worst_qp = worst_ne = worst_vi = 0.0
    for _ in range(trials):
        dim, sets = _sample_sets(rng)
        for s in sets:
            z = 3 * rng.standard_normal(dim)
            worst_qp = max(worst_qp, float(np.max(np.abs(s.project(z) - _qp_projection(s, z)))))
    for _ in range(pairs):
        dim, sets = _sample_sets(rng)
        for s in sets:
            u, v = 3 * rng.standard_normal((2, dim))
            pu, pv = s.project(u), s.project(v)
            worst_ne = max(worst_ne, float(np.linalg.norm(pu - pv) - np.linalg.norm(u - v)))
            w = s.project(3 * rng.standard_normal(dim))
            worst_vi = max(worst_vi, float((pu - u) @ (pu - w)))
    return [("projection matches QP reference", worst_qp <= 1e-6, f"max abs diff {worst_qp:.2e}"),
            ("nonexpansive", worst_ne <= 1e-12, f"max excess {worst_ne:.2e}"),
            ("variational inequality", worst_vi <= 1e-10, f"max inner product {worst_vi:.2e}")]


def check_smoothness():
    out = []
    est = estimate_average_smoothness(CoordinateSquares(16, 1.0), num_pairs=200, seed=0)
    out.append(("coordinate squares estimate in [0.99, 1]", 0.99 <= est <= 1 + 1e-6, f"{est:.6f}"))
    chain = build_hard_chain(40.0, 1.0, 4, 1e-3)
    est = estimate_average_smoothness(chain, num_pairs=100, seed=0)
    L = chain.constants.L
    out.append(("chain estimate <= L", est <= L * (1 + 1e-6), f"{est:.4f} vs {L:.4f}"))
    sep = build_separable(2.0, 0.5, 4)
    est = estimate_average_smoothness(sep, num_pairs=100, seed=0)
    out.append(("separable estimate <= L", est <= 2.0 * (1 + 1e-6), f"{est:.4f}"))
    q = make_quadratic_scsc((3, 3), 8, 0.1, 0.2, 2.0, seed=0)
    est = estimate_average_smoothness(q, num_pairs=100, seed=0)
    out.append(("quadratic estimate <= L", est <= 2.0 * (1 + 1e-6), f"{est:.4f}"))
    return out


def check_saddles(draws=50):
    rng = make_rng(5)
    worst = 0.0
    for _ in range(draws):
        inst = HardChainInstance(rng.uniform(0.05, 5.0), rng.uniform(0.1, 10.0),
                                 int(rng.integers(1, 12)), int(rng.integers(1, 6)))
        z = hard_chain_saddle(inst).z
        worst = max(worst, float(np.linalg.norm(inst.operator(z))) / inst.lambda_h)
        mu = rng.uniform(0.01, 1.0)
        sep = build_separable(mu * rng.uniform(2.1, 50.0), mu, int(rng.integers(1, 10)))
        g = sep.operator(separable_saddle(sep).z)
        worst = max(worst, float(np.linalg.norm(g)) / sep.constants.L)
    q = make_quadratic_scsc((4, 3), 6, 0.3, 0.2, 3.0, seed=1)
    res = float(np.linalg.norm(q.operator(quadratic_saddle_oracle(q).z)))
    return [("closed-form saddles zero the operator", worst <= 1e-10, f"max relative residual {worst:.2e}"),
            ("quadratic oracle residual", res <= 1e-10, f"{res:.2e}")]


def check_zero_chain():
    inst = HardChainInstance(1.0, 1.0, 8, 4)
    out = []
    z0, steps = record_trace(inst, lambda p, z, **kw: lsvre_run(p, z, lsvre_default_params(p, T=500), **kw))
    rep = zero_chain_audit(inst, z0, steps)
    out.append(("L-SVRE trace respects the chain", rep.passed, f"steps={rep.steps}"))
    z0, steps = record_trace(inst, lambda p, z, **kw: extragradient_run(p, z, 0.1, 500, **kw))
    rep = zero_chain_audit(inst, z0, steps)
    out.append(("EG trace respects the chain", rep.passed, f"steps={rep.steps}"))
    planted = np.zeros(inst.dim)
    planted[inst.d - 1] = 1.0
    rep = zero_chain_audit(inst, z0, [(planted, [0])])
    out.append(("planted violation caught", (not rep.passed) and rep.violation["t"] == 1, str(rep.violation)))
    return out


def lemma_bounds(problem, z, z_star, eta):
    """Slacks of the distance-gap relation and both halves of the correction bound."""
    c = problem.constants
    gap = duality_gap_quadratic(problem, z)
    dx = z[:problem.dx] - z_star[:problem.dx]
    dy = z[problem.dx:] - z_star[problem.dx:]
    dist_gap = c.mu_x * (dx @ dx) + c.mu_y * (dy @ dy) - 2 * gap
    eps = float(dx @ dx + dy @ dy)
    z_t = projected_gradient_step(problem, z, eta)
    up, down = saddle_excess(problem, z_t, z_star)
    a = 1 + eta * c.L
    factor = math.sqrt(2) * a + 2 * a * a + 2
    primal = up - (factor * c.kappa_y * c.L * eps + eps / (2 * eta))
    dual = down - (factor * c.kappa_x * c.L * eps + eps / (2 * eta))
    return float(dist_gap), float(primal), float(dual), float(gap)


def check_lemmas(instances=10, points=100):
    rng = make_rng(3)
    worst = [-np.inf] * 4
    for k in range(instances):
        dx, dy = (int(v) for v in rng.integers(1, 6, 2))
        mu_x, mu_y = rng.uniform(0.05, 1.0, 2)
        q = make_quadratic_scsc((dx, dy), int(rng.integers(1, 9)), mu_x, mu_y,
                                max(mu_x, mu_y) * rng.uniform(1.5, 20.0), seed=100 + k)
        zs = quadratic_saddle_oracle(q).z
        eta = 1.0 / (4 * math.sqrt(q.n) * q.constants.L)
        for _ in range(points):
            z = zs + rng.uniform(0.01, 3.0) * rng.standard_normal(q.dim)
            s = lemma_bounds(q, z, zs, eta)
            worst = [max(w, v) for w, v in zip(worst, (s[0], s[1], s[2], -s[3]))]
    return [("distance bounded by twice the gap", worst[0] <= 1e-9, f"max slack {worst[0]:.2e}"),
            ("primal excess after correction", worst[1] <= 1e-9, f"max slack {worst[1]:.2e}"),
            ("dual excess after correction", worst[2] <= 1e-9, f"max slack {worst[2]:.2e}"),
            ("gap nonnegative", worst[3] <= 1e-10, f"min gap {-worst[3]:.2e}")]


SUITES = {
    "projections": check_projections,
    "smoothness": check_smoothness,
    "saddles": check_saddles,
    "zero_chain": check_zero_chain,
    "lemmas": check_lemmas,
}


def run_suite(name):
    """List of ``(suite, check, passed, detail)``."""
    names = list(SUITES) if name == "all" else [name]
    rows = []
    for s in names:
        for check, ok, detail in SUITES[s]():
            rows.append((s, check, bool(ok), detail))
    return rows
