"""In-parameter-order MCAC construction.

Parameters are processed largest domain first.  The suite starts as the
exhaustive allowed t-tuple set over the first t parameters, then each later
parameter is folded in by horizontal extension (pick the value covering the
most pool tuples), filling empty cells, and vertical growth for whatever is
left.  A single incremental SAT engine answers every consistency question;
answers are memoized on the assumption set.
"""

from __future__ import annotations

import itertools
import random
import time

from ctforge.engine import SolveStatus, SolverConfig
from ctforge.model import (
    EMPTY,
    EngineFailure,
    StrengthOutOfRange,
    SuiteMeta,
    SutModel,
    TestCase,
    TestSuite,
    compile_model,
    make_tuple,
)


class _Checker:
    """Memoized SAT consistency of partial assignments (as engine literals)."""

    def __init__(self, enc, solver):
        self.enc = enc
        self.solver = solver
        self.memo: dict[tuple, bool] = {}
        self.sat_calls = 0
        self.memo_hits = 0

    def consistent(self, lits) -> bool:
        key = tuple(sorted(lits))
        hit = self.memo.get(key)
        if hit is not None:
            self.memo_hits += 1
            return hit
        self.sat_calls += 1
        out = self.solver.solve(key)
        if out.status is SolveStatus.BUDGET_EXHAUSTED:
            raise EngineFailure("unbudgeted consistency query ran out of budget")
        ok = out.status is SolveStatus.SAT
        self.memo[key] = ok
        return ok

    def cells_lits(self, cells):
        return self.enc.test_lits(cells)

    def tuple_lits(self, tup):
        return [self.enc.lit(p, v) for p, v in tup]


def _matches(cells, pairs) -> bool:
    return all(cells[p] == v for p, v in pairs)


def choose_best_value(cells, p, pool, checker, value_order=None):
    """Value of p maximizing newly covered pool tuples for this test.

    Returns EMPTY when every consistent value covers nothing.  Ties go to the
    earliest value in value_order (ascending indices by default).
    """
    order = value_order if value_order is not None else range(len(pool))
    counts = []
    for v in order:
        n = 0
        for tup in pool[v]:
            if _matches(cells, tup):
                n += 1
        counts.append((n, v))
    counts.sort(key=lambda nv: -nv[0])
    base = checker.cells_lits(cells)
    for n, v in counts:
        if n == 0:
            break
        if checker.consistent(base + [checker.enc.lit(p, v)]):
            return v
    return EMPTY


def build_ipog(model: SutModel, t: int, seed: int = 0,
               randomize_ties: bool = False, core_module=None) -> TestSuite:
    started = time.monotonic()
    n = model.n_params
    if not 2 <= t <= n:
        raise StrengthOutOfRange(f"strength {t} not in [2, {n}]")
    enc = compile_model(model, core_module=core_module)
    solver = enc.new_solver(SolverConfig(seed=seed), core_module=core_module)
    checker = _Checker(enc, solver)
    rng = random.Random(seed)
    domains = model.domains

    # largest domains first, original order on ties
    order = sorted(range(n), key=lambda i: (-len(domains[i]), i))

    suite: list[list[int]] = []
    first = order[:t]
    for values in itertools.product(*(range(len(domains[p])) for p in first)):
        tup = make_tuple(zip(first, values))
        if checker.consistent(checker.tuple_lits(tup)):
            cells = [EMPTY] * n
            for p, v in tup:
                cells[p] = v
            suite.append(cells)
    initial_size = len(suite)
    vertical = 0

    for k in range(t, n):
        p = order[k]
        d = len(domains[p])
        processed = sorted(order[:k])

        covered_subs = set()
        for cells in suite:
            fixed = [(q, cells[q]) for q in processed if cells[q] != EMPTY]
            covered_subs.update(itertools.combinations(fixed, t - 1))
        # pool, keyed by this parameter's value; iteration order is
        # deterministic: sub-tuples sorted, values ascending
        pool: list[dict] = [dict() for _ in range(d)]
        pool_order: list[tuple] = []
        for sub in sorted(covered_subs):
            for v in range(d):
                pool[v][sub] = True
                pool_order.append(make_tuple(sub + ((p, v),)))

        def pool_size():
            return sum(len(pv) for pv in pool)

        # horizontal extension
        for cells in suite:
            if pool_size() == 0:
                break
            value_order = list(range(d))
            if randomize_ties:
                rng.shuffle(value_order)
            v = choose_best_value(cells, p, pool, checker, value_order)
            if v == EMPTY:
                continue
            cells[p] = v
            gone = [sub for sub in pool[v] if _matches(cells, sub)]
            for sub in gone:
                del pool[v][sub]

        # leftovers: fill the empties, then vertical growth
        if pool_size() > 0:
            for tup in pool_order:
                sub = tuple(pr for pr in tup if pr[0] != p)
                v = dict(tup)[p]
                if sub not in pool[v]:
                    continue
                if not checker.consistent(checker.tuple_lits(tup)):
                    continue
                covered = False
                for cells in suite:
                    if any(cells[q] not in (EMPTY, w) for q, w in tup):
                        continue
                    merged = checker.cells_lits(cells)
                    extra = [checker.enc.lit(q, w) for q, w in tup
                             if cells[q] == EMPTY]
                    if checker.consistent(merged + extra):
                        for q, w in tup:
                            cells[q] = w
                        covered = True
                        break
                if not covered:
                    cells = [EMPTY] * n
                    for q, w in tup:
                        cells[q] = w
                    suite.append(cells)
                    vertical += 1

    # complete the leftover empty cells from a satisfying assignment
    tests = []
    for cells in suite:
        if EMPTY in cells:
            out = solver.solve(checker.cells_lits(cells))
            if out.status is not SolveStatus.SAT:
                raise EngineFailure("a working test lost consistency")
            full, _aux = enc.decode(out.model)
            cells = list(full)
        tests.append(TestCase(tuple(cells)))

    meta = SuiteMeta(
        strength=t,
        algorithm="ipog",
        seed=seed,
        model_fingerprint=model.fingerprint,
        wall_time_s=time.monotonic() - started,
        stats={
            "sat_calls": checker.sat_calls,
            "memo_hits": checker.memo_hits,
            "initial_tests": initial_size,
            "vertical_tests": vertical,
        },
    )
    return TestSuite(tuple(tests), meta)
