"""Acceptance criteria, one test each. Run directly for a plain pass/fail listing."""
import math
import time

import numpy as np
import pytest

from alsvre import estimate_average_smoothness, make_rng
from alsvre.cli import bench, build_problem, main
from alsvre.lowerbound import (HardChainInstance, build_hard_chain, build_separable,
                               hard_chain_saddle, record_trace, separable_saddle, zero_chain_audit)
from alsvre.metrics import duality_gap_quadratic, make_metrics
from alsvre.problems import (CoordinateSquares, QuadraticProblem, make_quadratic_scsc,
                             quadratic_saddle_oracle, wrap_both)
from alsvre.projections import ball, box, nonneg_ball, simplex_sum
from alsvre.solvers import (alsvre_default_params, alsvre_run, extragradient_run,
                            lsvre_default_params, lsvre_run)
from oracles import box_gap, enumerate_projection, quadratic_values


def check_rate():
    n, L, mu = 16, 4.0, 0.5
    t0 = time.perf_counter()
    p = make_quadratic_scsc((4, 4), n, mu, mu, L, seed=0)
    zs = quadratic_saddle_oracle(p).z
    ks = [100, 500, 1000]
    runs = [lsvre_run(p, np.zeros(8), lsvre_default_params(p, T=1000, seed=s), trace_every=100,
                      metrics=make_metrics(p, ["dist2"], zs)) for s in range(20)]
    mean = np.mean([[tr.column("dist2")[k // 100] for k in ks] for tr in runs], axis=0)
    rate = 1 - 1 / (4 * (n + 2 * math.sqrt(n) * L / mu))
    bound = np.array([1.5 * 4 * (zs @ zs) * rate ** k for k in ks])
    secs = time.perf_counter() - t0
    ok = bool(np.all(mean < bound)) and secs < 10
    return ok, f"mean/bound at k=100,500,1000: {np.round(mean / bound, 4).tolist()}, {secs:.2f}s"


def check_hard_saddles():
    t0 = time.perf_counter()
    rng = make_rng(2024)
    worst = ident = 0.0
    for _ in range(50):
        alpha = rng.uniform(0.01, 5.0)
        inst = HardChainInstance(alpha, rng.uniform(0.1, 10.0), int(rng.integers(1, 20)), int(rng.integers(1, 8)))
        z = hard_chain_saddle(inst).z
        g0 = np.linalg.norm(inst.operator(np.zeros(inst.dim)))
        worst = max(worst, np.linalg.norm(inst.operator(z)) / g0)
        ident = max(ident, abs(inst.alpha_h * inst.omega - (1 - inst.q_h)))
        mu = rng.uniform(0.01, 1.0)
        sep = build_separable(mu * rng.uniform(2.05, 100.0), mu, int(rng.integers(1, 12)))
        g0 = np.linalg.norm(sep.operator(np.zeros(sep.dim)))
        worst = max(worst, np.linalg.norm(sep.operator(separable_saddle(sep).z)) / g0)
    secs = time.perf_counter() - t0
    ok = worst <= 1e-10 and ident <= 1e-12 and secs < 1
    return ok, f"max relative residual {worst:.1e}, identity error {ident:.1e}, {secs:.2f}s"


def check_zero_chain():
    t0 = time.perf_counter()
    inst = HardChainInstance(1.0, 1.0, 8, 4)
    z0, steps = record_trace(inst, lambda p, z, **kw: lsvre_run(p, z, lsvre_default_params(p, T=500), **kw))
    lsvre_ok = zero_chain_audit(inst, z0, steps).passed and len(steps) == 500
    z0, steps = record_trace(inst, lambda p, z, **kw: extragradient_run(p, z, 0.1, 500, **kw))
    eg_ok = zero_chain_audit(inst, z0, steps).passed and len(steps) == 500
    planted = np.zeros(inst.dim)
    planted[inst.dx + 2 * inst.d + 5] = 1e-300
    rep = zero_chain_audit(inst, z0, [(np.zeros(inst.dim), [2]), (planted, [2])])
    caught = not rep.passed and rep.violation["t"] == 2 and rep.violation["block"] == 2
    secs = time.perf_counter() - t0
    return lsvre_ok and eg_ok and caught and secs < 1, f"lsvre={lsvre_ok} eg={eg_ok} planted caught={caught}, {secs:.2f}s"


def check_floor():
    t0 = time.perf_counter()
    eps = 1e-3
    inst = build_hard_chain(40.0, 1.0, 4, eps)
    zs = hard_chain_saddle(inst).z
    horizon = inst.n * inst.d // 2
    closest = math.inf
    for seed in range(5):
        dists = [float(np.sum((zs) ** 2))]
        lsvre_run(inst, np.zeros(inst.dim), lsvre_default_params(inst, T=horizon, seed=seed),
                  trace_every=horizon, callback=lambda t, z: dists.append(float(np.sum((z - zs) ** 2))))
        closest = min(closest, min(dists))
    secs = time.perf_counter() - t0
    return closest > eps and secs < 5, f"t <= {horizon}: min ||z-z*||^2 = {closest:.4g} > {eps}, {secs:.2f}s"


def check_projections():
    rng = make_rng(5)
    worst = ne = vi = 0.0

    def sets(dim):
        lo = -rng.uniform(0.1, 2.0, dim)
        hi = lo + rng.uniform(0.1, 3.0, dim)
        R, s = rng.uniform(0.5, 2.0), rng.uniform(0.5, 3.0)
        return [(ball(R), "ball", {"R": R}), (nonneg_ball(R), "nonneg_ball", {"R": R}),
                (simplex_sum(s), "simplex_sum", {"s": s}), (box(lo, hi), "box", {"lo": lo, "hi": hi})]

    for _ in range(200):
        dim = int(rng.integers(1, 5))
        z = 3 * rng.standard_normal(dim)
        for fset, kind, prm in sets(dim):
            worst = max(worst, np.max(np.abs(fset.project(z) - enumerate_projection(kind, z, **prm))))
    for _ in range(1000):
        dim = int(rng.integers(1, 5))
        for fset, _, _ in sets(dim):
            u, v, w = 3 * rng.standard_normal((3, dim))
            pu = fset.project(u)
            ne = max(ne, np.linalg.norm(pu - fset.project(v)) - np.linalg.norm(u - v))
            vi = max(vi, (pu - u) @ (pu - fset.project(w)))
    ok = worst <= 1e-6 and ne <= 1e-12 and vi <= 1e-10
    return ok, f"oracle diff {worst:.1e}, nonexpansive excess {ne:.1e}, VI max {vi:.1e}"


def check_smoothness():
    est = estimate_average_smoothness(CoordinateSquares(16, 1.0), num_pairs=200, seed=0)
    return 0.99 <= est <= 1 + 1e-6, f"estimate {est:.6f}"


def check_lemmas():
    rng = make_rng(7)
    worst = [-math.inf] * 3
    for k in range(10):
        dx, dy = (int(v) for v in rng.integers(1, 6, 2))
        mu_x, mu_y = rng.uniform(0.05, 1.0, 2)
        p = make_quadratic_scsc((dx, dy), int(rng.integers(1, 9)), mu_x, mu_y,
                                max(mu_x, mu_y) * rng.uniform(1.5, 20.0), seed=1000 + k)
        L, n = p.constants.L, p.n
        zs = quadratic_saddle_oracle(p).z
        f_star = p.objective(zs)
        eta = 1 / (4 * math.sqrt(n) * L)
        a = 1 + eta * L
        factor = math.sqrt(2) * a + 2 * a * a + 2
        for _ in range(100):
            z = zs + rng.uniform(0.01, 3.0) * rng.standard_normal(p.dim)
            d = z - zs
            gap = duality_gap_quadratic(p, z)
            worst[0] = max(worst[0], mu_x * d[:dx] @ d[:dx] + mu_y * d[dx:] @ d[dx:] - 2 * gap)
            eps = float(d @ d)
            zt = z - eta * p.operator(z)
            xt, yt = zt[:dx], zt[dx:]
            # exact inner max / min by stationarity of the quadratic
            y_best = np.linalg.solve(p.C_mean, p.B_mean.T @ xt - p.c_mean)
            x_best = np.linalg.solve(p.A_mean, -(p.B_mean @ yt + p.a_mean))
            up = p.value(xt, y_best) - f_star
            down = f_star - p.value(x_best, yt)
            worst[1] = max(worst[1], up - (factor * (L / mu_y) * L * eps + eps / (2 * eta)))
            worst[2] = max(worst[2], down - (factor * (L / mu_x) * L * eps + eps / (2 * eta)))
    ok = all(w <= 1e-9 for w in worst)
    return ok, "max slacks: distance-gap {:.1e}, primal {:.1e}, dual {:.1e}".format(*worst)


def cc_box_instance(seed=2, n=4):
    rng = np.random.default_rng(seed)
    h = 1 / math.sqrt(2)
    return QuadraticProblem(np.zeros((n, 2, 2)), rng.standard_normal((n, 2, 2)), np.zeros((n, 2, 2)),
                            rng.standard_normal((n, 2)), rng.standard_normal((n, 2)), mu_x=0.0, mu_y=0.0,
                            x_set=box([-h, -h], [h, h]), y_set=box([-h, -h], [h, h]))


def check_wrapper_transfer():
    P = cc_box_instance()
    h = 1 / math.sqrt(2)
    lo, hi = [-h, -h], [h, h]
    assert P.x_set.diameter(2) == pytest.approx(2.0) and P.y_set.diameter(2) == pytest.approx(2.0)
    inner = lambda X, Y: quadratic_values(P, X, Y)
    details, ok = [], True
    for eps in (0.1, 0.01):
        W = wrap_both(P, eps)

        def wrapped(X, Y):
            dx, dy = np.atleast_2d(X) - W.x0, np.atleast_2d(Y) - W.y0
            return inner(X, Y) + W.w_x * np.sum(dx * dx, 1) - W.w_y * np.sum(dy * dy, 1)

        epochs = 1000
        while True:
            budget = epochs * P.n
            prm = alsvre_default_params(W, budget_sfo=budget)
            z = alsvre_run(W, W.center, prm, trace_every=10 ** 9, budget_sfo=budget).final.z
            w_gap = box_gap(wrapped, z[:2], z[2:], lo, hi)
            if w_gap <= eps / 2 or epochs >= 64000:
                break
            epochs *= 2
        gap = box_gap(inner, z[:2], z[2:], lo, hi)
        ok = ok and w_gap <= eps / 2 and gap <= eps
        details.append(f"eps={eps}: wrapped gap {w_gap:.2e}, original gap {gap:.2e} ({epochs} epochs)")
    return ok, "; ".join(details)


BENCH_PROBLEMS = ("quadratic:n=64,dx=10,dy=10,mu_x=0.005,mu_y=0.125,L=1",
                  "wireless:n=50,R=1,lo=0,hi=10,seed=7")


def check_speedup():
    details, ok = [], True
    for spec in BENCH_PROBLEMS:
        bundle = build_problem(spec)
        rows = bench(bundle, ["eg", "lsvre", "alsvre"], list(range(10)), 100 * bundle.problem.n,
                     trace_every=10 ** 9, sweep=True)
        key = "final_" + bundle.metrics[0]
        means = {r["solver"]: r[key] for r in rows if r["seed"] == "mean"}
        taus = {r["solver"]: r["tau"] for r in rows if r["seed"] == "mean"}
        win = means["alsvre"] < means["eg"] and means["alsvre"] < means["lsvre"]
        ok = ok and win
        details.append(f"{bundle.family}: " + ", ".join(
            f"{s} {means[s]:.3g} (tau={taus[s]})" for s in ("eg", "lsvre", "alsvre")))
    return ok, "; ".join(details)


def check_determinism(tmp_dir):
    blobs = []
    for k in range(2):
        out = tmp_dir / f"run{k}.csv"
        main(["run", "--problem", "quadratic:n=16,seed=3", "--solver", "alsvre", "--budget-epochs", "30",
              "--seed", "11", "--out", str(out)])
        blobs.append(out.read_bytes())
    return blobs[0] == blobs[1] and len(blobs[0]) > 0, f"{len(blobs[0])} bytes each"


def check_beta_cases():
    from alsvre import ProblemConstants

    class Declared:
        def __init__(self, mu_x, mu_y):
            self.constants = ProblemConstants(100, 10.0, mu_x, mu_y)

    cases = [((0.1, 0.5), 0.4), ((0.1, 2.0), 0.9), ((2.5, 5.0), 0.0)]
    got = [alsvre_default_params(Declared(*m), K=1).beta for m, _ in cases]
    ok = all(abs(g - b) <= 1e-12 for g, (_, b) in zip(got, cases))
    return ok, f"beta = {[round(g, 12) for g in got]}"


def report(capsys, number, title, result):
    ok, detail = result
    with capsys.disabled():
        print(f"\n[{'PASS' if ok else 'FAIL'}] {number:2d} {title}: {detail}")
    assert ok, detail


def test_01_rate(capsys):
    report(capsys, 1, "L-SVRE contraction on a balanced quadratic", check_rate())


def test_02_hard_saddles(capsys):
    report(capsys, 2, "closed-form hard-instance saddles", check_hard_saddles())


def test_03_zero_chain(capsys):
    report(capsys, 3, "zero-chain audit", check_zero_chain())


def test_04_floor(capsys):
    report(capsys, 4, "distance floor on the chain instance", check_floor())


def test_05_projections(capsys):
    report(capsys, 5, "projection oracle equivalence", check_projections())


def test_06_smoothness(capsys):
    report(capsys, 6, "average-smoothness example", check_smoothness())


def test_07_lemmas(capsys):
    report(capsys, 7, "gap and correction inequalities", check_lemmas())


def test_08_wrapper_transfer(capsys):
    report(capsys, 8, "wrapper gap transfer", check_wrapper_transfer())


def test_09_speedup(capsys):
    report(capsys, 9, "unbalanced speedup ordering", check_speedup())


def test_10_determinism(capsys, tmp_path):
    report(capsys, 10, "byte-identical run output", check_determinism(tmp_path))


def test_11_beta_cases(capsys):
    report(capsys, 11, "beta selection cases", check_beta_cases())


if __name__ == "__main__":
    import tempfile
    from pathlib import Path

    checks = [(1, check_rate), (2, check_hard_saddles), (3, check_zero_chain), (4, check_floor),
              (5, check_projections), (6, check_smoothness), (7, check_lemmas),
              (8, check_wrapper_transfer), (9, check_speedup), (11, check_beta_cases)]
    with tempfile.TemporaryDirectory() as d:
        checks.insert(9, (10, lambda: check_determinism(Path(d))))
        for number, fn in checks:
            ok, detail = fn()
            print(f"[{'PASS' if ok else 'FAIL'}] {number:2d} {detail}")
