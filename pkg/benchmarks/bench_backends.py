"""Timing comparison between the compiled solver core and the pure-Python one.

Runs identical workloads on both backends, checks that the results agree
exactly, and prints wall times plus the speedup factor.  Usage:

    python3 benchmarks/bench_backends.py [--quick] [--seed N]
"""

from __future__ import annotations

import argparse
import random
import time

from ctforge import _satcore
from ctforge.bot import BotConfig, build_bot
from ctforge.engine import SatSolver, SolverConfig, load_pure_core
from ctforge.ipog import build_ipog
from ctforge.model import Eq, Implies, Neq, Or, SutModel
from ctforge.verifier import verify_mcac


def random_cnf(rng, n_vars, n_clauses):
    # 3-CNF, distinct variables per clause
    out = []
    for _ in range(n_clauses):
        vs = rng.sample(range(1, n_vars + 1), 3)
        out.append(tuple(v if rng.random() < 0.5 else -v for v in vs))
    return out


def bench_model():
    """A mid-sized mixed-domain model with enough constraints to keep the
    engine busy without making the pure backend crawl."""
    params = [(f"p{i}", tuple(str(v) for v in range(2 + i % 3)))
              for i in range(10)]
    constraints = (
        Implies(Eq("p0", "0"), Neq("p3", "1")),
        Implies(Eq("p1", "1"), Or((Eq("p4", "0"), Eq("p5", "1")))),
        Or((Neq("p2", "2"), Neq("p6", "0"))),
        Implies(Eq("p7", "1"), Eq("p8", "0")),
        Or((Eq("p9", "0"), Neq("p0", "1"), Eq("p2", "1"))),
        Implies(Or((Eq("p5", "2"), Eq("p8", "2"))), Neq("p9", "1")),
    )
    return SutModel(name="bench", parameters=params, constraints=constraints)


def run_sat(core, seed, n_instances, n_vars, n_clauses):
    rng = random.Random(seed)
    statuses = []
    for i in range(n_instances):
        clauses = random_cnf(rng, n_vars, n_clauses)
        solver = SatSolver(n_vars, SolverConfig(seed=i), core_module=core)
        for cl in clauses:
            solver.add_clause(cl)
        statuses.append(solver.solve().status.name)
    return statuses


def run_ipog(core, model, t, seed):
    suite = build_ipog(model, t, seed=seed, core_module=core)
    return [tuple(tc.cells) for tc in suite.tests]


def run_bot(core, model, t, seed):
    suite = build_bot(model, t, BotConfig(seed=seed), core_module=core)
    return [tuple(tc.cells) for tc in suite.tests]


def run_verify(core, model, t, seed):
    suite = build_ipog(model, t, seed=seed, core_module=core)
    rep = verify_mcac(model, t, suite, core_module=core)
    return (rep.valid, rep.covered_tuples)


def timed(fn, *args):
    t0 = time.perf_counter()
    out = fn(*args)
    return out, time.perf_counter() - t0


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--quick", action="store_true",
                    help="smaller workloads, for smoke runs")
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args(argv)

    if not _satcore.COMPILED:
        print("installed core is pure Python; nothing to compare")
        return 0
    pure = load_pure_core()

    model = bench_model()
    if args.quick:
        workloads = [
            ("sat n=60 r=4.2 x4", run_sat, (args.seed, 4, 60, 252)),
            ("ipog t=2", run_ipog, (model, 2, args.seed)),
            ("bot t=2", run_bot, (model, 2, args.seed)),
            ("verify t=2", run_verify, (model, 2, args.seed)),
        ]
    else:
        workloads = [
            ("sat n=100 r=4.2 x8", run_sat, (args.seed, 8, 100, 420)),
            ("ipog t=3", run_ipog, (model, 3, args.seed)),
            ("bot t=3", run_bot, (model, 3, args.seed)),
            ("verify t=3", run_verify, (model, 3, args.seed)),
        ]

    width = max(len(name) for name, _, _ in workloads)
    print(f"{'workload':<{width}}  {'compiled':>9}  {'pure':>9}  speedup")
    for name, fn, extra in workloads:
        got_c, dt_c = timed(fn, _satcore, *extra)
        got_p, dt_p = timed(fn, pure, *extra)
        if got_c != got_p:
            raise SystemExit(f"backend disagreement on {name}")
        ratio = dt_p / dt_c if dt_c > 0 else float("inf")
        print(f"{name:<{width}}  {dt_c:>8.3f}s  {dt_p:>8.3f}s  {ratio:>6.1f}x")
    print("outcomes identical on both backends")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
