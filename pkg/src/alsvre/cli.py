"""Command-line driver: single runs, equal-budget benchmarks, invariant suites, data generation."""
from __future__ import annotations

import argparse
import csv
import math
import sys
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .core import NumericalError, UsageError
from .data_io import (fixture_path, load_libsvm, read_vector_file, write_params_json,
                      write_trace_csv, write_vector_file)
from .lowerbound import build_hard_chain, build_separable, hard_chain_saddle, separable_saddle
from .metrics import make_metrics
from .problems import (gen_wireless_channels, make_auc, make_quadratic_scsc, make_wireless,
                       quadratic_saddle_oracle, wrap_both, wrap_strongly_concave)
from .solvers import (LsvreParams, alsvre_default_params, alsvre_run, extragradient_run,
                      lsvre_default_params, lsvre_run)

SOLVERS = ("eg", "lsvre", "alsvre")
GRID_DEFAULT = (0.02, 0.05, 0.1, 0.2, 0.5)
GRID_WIRELESS = (0.01, 0.1, 1.0)
UNBOUNDED = 10 ** 12


@dataclass
class ProblemBundle:
    """A built problem plus what the driver needs to run and score it."""

    family: str
    problem: object
    saddle: np.ndarray | None
    metrics: tuple
    tau_grid: tuple = GRID_DEFAULT
    p: float | None = None
    spec: dict = field(default_factory=dict)

    @property
    def z0(self):
        return self.problem.center

    def for_alsvre(self, eps: float | None = None):
        """The problem AL-SVRE runs on: wrapped when a modulus is zero."""
        c = self.problem.constants
        if c.mu_x > 0 and c.mu_y > 0:
            return self.problem
        eps = 1e-6 / c.n if eps is None else eps
        if c.mu_x == 0 and c.mu_y == 0:
            return wrap_both(self.problem, eps)
        if c.mu_x == 0:
            return wrap_strongly_concave(self.problem, eps)
        raise UsageError("mu_y = 0 with mu_x > 0 is not supported; use wrap_both")


def _value(text: str):
    for cast in (int, float):
        try:
            return cast(text)
        except ValueError:
            pass
    return text


def parse_kv(items) -> dict:
    out = {}
    for item in items or []:
        for part in item.split(","):
            if not part:
                continue
            key, sep, val = part.partition("=")
            if not sep or not key:
                raise UsageError(f"expected key=value, got {part!r}")
            out[key.strip()] = _value(val.strip())
    return out


def parse_problem_spec(spec: str):
    family, _, rest = spec.partition(":")
    return family.strip(), parse_kv([rest]) if rest else {}


def _take(opts, key, default):
    return opts.pop(key, default)


def build_problem(spec: str) -> ProblemBundle:
    """Build from ``family:key=value,...``.

    Families: ``quadratic`` (n, dx, dy, mu_x, mu_y, L, seed, linear),
    ``wireless`` (n, R, lo, hi, seed, or file=...), ``auc`` (path or fixture, lam, dim),
    ``chain`` (L, mu, n, eps) and ``separable`` (L, mu, n).
    """
    family, opts = parse_problem_spec(spec)
    raw = dict(opts)
    if family == "quadratic":
        n = int(_take(opts, "n", 16))
        dx = int(_take(opts, "dx", 4))
        dy = int(_take(opts, "dy", dx))
        mu = float(_take(opts, "mu", 0.5))
        mu_x = float(_take(opts, "mu_x", mu))
        mu_y = float(_take(opts, "mu_y", mu))
        L = float(_take(opts, "L", 4.0))
        seed = int(_take(opts, "seed", 0))
        linear = float(_take(opts, "linear", 1.0))
        prob = make_quadratic_scsc((dx, dy), n, mu_x, mu_y, L, seed=seed, linear_scale=linear)
        bundle = ProblemBundle(family, prob, quadratic_saddle_oracle(prob).z, ("dist2",))
    elif family == "wireless":
        R = float(_take(opts, "R", 1.0))
        path = _take(opts, "file", None)
        if path is not None:
            a = read_vector_file(path)
        else:
            a = gen_wireless_channels(int(_take(opts, "n", 50)), float(_take(opts, "lo", 0.0)),
                                      float(_take(opts, "hi", 10.0)), int(_take(opts, "seed", 0)))
        prob = make_wireless(a, np.ones(a.size), R)
        bundle = ProblemBundle(family, prob, None, ("grad_mapping",), GRID_WIRELESS, p=2.0 / prob.n)
    elif family == "auc":
        path = _take(opts, "path", None)
        if _take(opts, "fixture", None) is not None or path is None:
            path = fixture_path()
        dim = _take(opts, "dim", None)
        prob = make_auc(load_libsvm(path), lam=float(_take(opts, "lam", 1e-10)),
                        dim=None if dim is None else int(dim))
        bundle = ProblemBundle(family, prob, None, ("grad_norm",))
    elif family == "chain":
        prob = build_hard_chain(float(_take(opts, "L", 40.0)), float(_take(opts, "mu", 1.0)),
                                int(_take(opts, "n", 4)), float(_take(opts, "eps", 1e-3)))
        bundle = ProblemBundle(family, prob, hard_chain_saddle(prob).z, ("dist2",))
    elif family == "separable":
        prob = build_separable(float(_take(opts, "L", 2.0)), float(_take(opts, "mu", 0.5)),
                               int(_take(opts, "n", 4)))
        bundle = ProblemBundle(family, prob, separable_saddle(prob).z, ("dist2",))
    else:
        raise UsageError(f"unknown problem family {family!r}")
    if opts:
        raise UsageError(f"unknown {family} parameters: {', '.join(sorted(opts))}")
    bundle.spec = {"family": family, **raw}
    return bundle


RUN_KEYS = {
    "eg": {"tau"},
    "lsvre": {"tau", "p"},
    "alsvre": {"tau", "p", "beta", "rho", "c", "K", "eps", "epsilon", "delta_f"},
}


def run_solver(bundle: ProblemBundle, solver: str, seed: int = 0, budget_sfo=None, budget_iters=None,
               params=None, mode: str = "practical", metrics=None, trace_every: int = 1,
               tau_hat: float = 0.1):
    """One run; metrics are always measured on the unwrapped problem."""
    if solver not in SOLVERS:
        raise UsageError(f"unknown solver {solver!r}; choose from {', '.join(SOLVERS)}")
    if (budget_sfo is None) == (budget_iters is None):
        raise UsageError("give exactly one of budget_sfo and budget_iters")
    params = dict(params or {})
    unknown = set(params) - RUN_KEYS[solver]
    if unknown:
        raise UsageError(f"unknown {solver} parameters: {', '.join(sorted(unknown))}")
    prob = bundle.problem
    rec = make_metrics(prob, metrics or bundle.metrics, bundle.saddle, tau_hat)
    z0 = bundle.z0
    T = UNBOUNDED if budget_iters is None else int(budget_iters)
    if solver == "eg":
        tau = float(params.get("tau", 1.0 / (4.0 * prob.constants.L)))
        trace = extragradient_run(prob, z0, tau, T, trace_every, rec, budget_sfo)
    elif solver == "lsvre":
        d = lsvre_default_params(prob, T=T, seed=seed)
        p = float(params.get("p", bundle.p if bundle.p is not None else d.p))
        lp = LsvreParams(float(params.get("tau", d.tau)), p, T, seed)
        trace = lsvre_run(prob, z0, lp, trace_every, rec, budget_sfo)
    else:
        target = bundle.for_alsvre(params.get("eps"))
        K = params.get("K", budget_iters)
        sp = alsvre_default_params(
            target, epsilon=params.get("epsilon"), mode=mode, c=float(params.get("c", 0.5)),
            budget_sfo=budget_sfo, K=None if K is None else int(K), delta_f=params.get("delta_f"),
            z0=z0, rho=params.get("rho"), p=params.get("p", bundle.p), beta=params.get("beta"),
            tau=params.get("tau"), seed=seed)
        trace = alsvre_run(target, z0, sp, trace_every, rec, budget_sfo)
    trace.seed = seed
    trace.params["problem"] = bundle.spec
    return trace


def sweep_tau(bundle, solver, seeds, budget_sfo=None, budget_iters=None, params=None, **kw):
    """Best step size from the family grid by seed-mean final value of the first metric."""
    best = None
    for tau in bundle.tau_grid:
        finals = []
        for s in seeds:
            try:
                tr = run_solver(bundle, solver, s, budget_sfo, budget_iters,
                                {**(params or {}), "tau": tau}, trace_every=UNBOUNDED, **kw)
                v = tr.checkpoints[-1].metrics[tr.metric_names[0]]
            except NumericalError:
                v = math.inf
            finals.append(v if math.isfinite(v) else math.inf)
        score = float(np.mean(finals))
        if best is None or score < best[1]:
            best = (tau, score)
    return best[0]


def final_line(trace) -> str:
    c = trace.checkpoints[-1]
    parts = [f"iteration={c.iteration}", f"sfo_calls={c.sfo_calls}", f"epoch={c.sfo_calls / trace.n:.6g}"]
    for k, v in c.metrics.items():
        parts.append(f"{k}={v:.6e}")
        if v > 0:
            parts.append(f"log10_{k}={math.log10(v):.4f}")
    return "final " + " ".join(parts)


def cmd_run(args) -> int:
    bundle = build_problem(args.problem)
    params = parse_kv(args.params)
    metrics = tuple(args.metrics.split(",")) if args.metrics else None
    if args.budget_epochs is not None:
        args.budget_sfo = int(math.ceil(args.budget_epochs * bundle.problem.n))
    if args.sweep_tau:
        params["tau"] = sweep_tau(bundle, args.solver, [args.seed], args.budget_sfo, args.budget_iters,
                                  params, mode=args.mode, metrics=metrics)
    trace = run_solver(bundle, args.solver, args.seed, args.budget_sfo, args.budget_iters, params,
                       args.mode, metrics, args.trace_every)
    out = Path(args.out)
    out.parent.mkdir(parents=True, exist_ok=True)
    write_trace_csv(trace, out)
    write_params_json(trace, out.with_suffix(".json"))
    print(final_line(trace))
    return 0


def cmd_bench(args) -> int:
    solvers = [s.strip() for s in args.solvers.split(",") if s.strip()]
    if len(solvers) < 2:
        raise UsageError("bench needs at least two solvers")
    for s in solvers:
        if s not in SOLVERS:
            raise UsageError(f"unknown solver {s!r}")
    bundle = build_problem(args.problem)
    budget = args.budget_sfo
    if args.budget_epochs is not None:
        budget = int(math.ceil(args.budget_epochs * bundle.problem.n))
    seeds = ([int(s) for s in args.seeds.split(",")] if args.seeds
             else list(range(args.seed, args.seed + args.num_seeds)))
    params = parse_kv(args.params)
    metrics = tuple(args.metrics.split(",")) if args.metrics else None
    out = Path(args.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    rows = bench(bundle, solvers, seeds, budget, params, args.mode, metrics, args.trace_every,
                 args.sweep_tau, out)
    names = [k for k in rows[0] if k.startswith("final_")]
    with open(out / "summary.csv", "w", encoding="utf-8", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["index", "solver", "seed", "tau", "sfo_calls", *names])
        for r in rows:
            w.writerow([r["index"], r["solver"], r["seed"], repr(r["tau"]) if r["tau"] is not None else "",
                        r["sfo_calls"], *(repr(r[k]) for k in names)])
    for r in rows:
        if r["seed"] == "mean":
            print(f"{r['index']:02d} {r['solver']:7s} " + " ".join(f"{k[6:]}={r[k]:.6e}" for k in names))
    return 0


def bench(bundle, solvers, seeds, budget_sfo, params=None, mode="practical", metrics=None,
          trace_every=1, sweep=False, out_dir=None):
    """Equal-budget runs of every solver over every seed; returns summary rows incl. seed means."""
    rows = []
    for idx, solver in enumerate(solvers):
        p = {k: v for k, v in (params or {}).items() if k in RUN_KEYS[solver]}
        if sweep:
            p["tau"] = sweep_tau(bundle, solver, seeds, budget_sfo, None, p, mode=mode, metrics=metrics)
        per_seed = []
        for s in seeds:
            tr = run_solver(bundle, solver, s, budget_sfo, None, p, mode, metrics, trace_every)
            if out_dir is not None:
                write_trace_csv(tr, Path(out_dir) / f"{idx:02d}_{solver}_seed{s}.csv")
            row = {"index": idx, "solver": solver, "seed": s, "tau": p.get("tau"), "sfo_calls": tr.sfo_calls}
            row.update({f"final_{k}": v for k, v in tr.checkpoints[-1].metrics.items()})
            per_seed.append(row)
        mean = {"index": idx, "solver": solver, "seed": "mean", "tau": p.get("tau"),
                "sfo_calls": int(np.mean([r["sfo_calls"] for r in per_seed]))}
        for k in per_seed[0]:
            if k.startswith("final_"):
                mean[k] = float(np.mean([r[k] for r in per_seed]))
        rows.extend(per_seed + [mean])
    return rows


def cmd_verify(args) -> int:
    from .verify import run_suite

    failed = 0
    for suite, check, ok, detail in run_suite(args.suite):
        failed += not ok
        print(f"{'PASS' if ok else 'FAIL'} [{suite}] {check}: {detail}")
    return 1 if failed else 0


def cmd_gen_data(args) -> int:
    if args.n < 1 or not args.hi >= args.lo or args.lo < 0 or not args.R > 0:
        raise UsageError("need n >= 1, 0 <= lo <= hi and R > 0")
    a = gen_wireless_channels(args.n, args.lo, args.hi, args.seed)
    header = f"wireless n={args.n} lo={args.lo!r} hi={args.hi!r} R={args.R!r} seed={args.seed}"
    out = Path(args.out)
    out.parent.mkdir(parents=True, exist_ok=True)
    write_vector_file(a, out, header)
    print(f"wrote {a.size} values to {out}")
    return 0


def _add_common(p):
    p.add_argument("--problem", required=True, help="family:key=value,... (quadratic, wireless, auc, chain, separable)")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--params", nargs="*", default=[], help="solver overrides as key=value")
    p.add_argument("--mode", choices=("practical", "theory"), default="practical")
    p.add_argument("--metrics", default=None, help="comma list from dist2, grad_norm, grad_mapping, gap")
    p.add_argument("--trace-every", type=int, default=1)
    p.add_argument("--sweep-tau", action="store_true", help="pick tau from the family grid first")


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="alsvre", description=__doc__)
    sub = ap.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="one solver on one problem, CSV trace out")
    _add_common(run)
    run.add_argument("--solver", required=True, help="eg, lsvre or alsvre")
    g = run.add_mutually_exclusive_group(required=True)
    g.add_argument("--budget-sfo", type=int)
    g.add_argument("--budget-iters", type=int)
    g.add_argument("--budget-epochs", type=float)
    run.add_argument("--out", required=True)
    run.set_defaults(func=cmd_run)

    b = sub.add_parser("bench", help="equal-SFO-budget comparison of several solvers")
    _add_common(b)
    b.add_argument("--solvers", default="eg,lsvre,alsvre")
    b.add_argument("--seeds", default=None, help="comma list of seeds (overrides --num-seeds)")
    b.add_argument("--num-seeds", type=int, default=3)
    g = b.add_mutually_exclusive_group(required=True)
    g.add_argument("--budget-sfo", type=int)
    g.add_argument("--budget-epochs", type=float)
    b.add_argument("--out-dir", required=True)
    b.set_defaults(func=cmd_bench)

    v = sub.add_parser("verify", help="run invariant suites")
    v.add_argument("suite", nargs="?", default="all",
                   choices=("projections", "smoothness", "saddles", "zero_chain", "lemmas", "all"))
    v.set_defaults(func=cmd_verify)

    gd = sub.add_parser("gen-data", help="write a random wireless channel vector")
    gd.add_argument("kind", choices=("wireless",))
    gd.add_argument("--n", type=int, default=500)
    gd.add_argument("--lo", type=float, default=0.0)
    gd.add_argument("--hi", type=float, default=10.0)
    gd.add_argument("--R", type=float, default=1.0)
    gd.add_argument("--seed", type=int, default=0)
    gd.add_argument("--out", required=True)
    gd.set_defaults(func=cmd_gen_data)
    return ap


def main(argv=None) -> int:
    ap = build_parser()
    args = ap.parse_args(argv)
    try:
        return args.func(args)
    except UsageError as e:
        print(f"error: {e}", file=sys.stderr)
        return 2
    except NumericalError as e:
        print(f"numerical failure: {e}", file=sys.stderr)
        return 1
    except OSError as e:
        print(f"i/o failure: {e}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
