"""One-test-at-a-time MCAC construction with deferred amendment.

Each test starts from the first uncovered tuple in the pool (verified
allowed by an exact SAT call), greedily fixes the remaining parameters with
only budget-limited consistency checks, then amends: a final exact check,
unfixing the most recently fixed non-seed parameter while it fails.  The
pool variant materializes the tuple pool in bounded slices so memory stays
under a byte budget at higher strengths.
"""

from __future__ import annotations

import itertools
import random
import time
from dataclasses import dataclass

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

UNKNOWN = "unknown"
ALLOWED = "allowed"
FORBIDDEN = "forbidden"


def tuple_record_bytes(t: int) -> int:
    """Nominal resident cost of one pooled t-tuple; the unit of pool budgets."""
    return 32 + 16 * t


@dataclass(frozen=True)
class BotConfig:
    cb: int | None = 100
    seed: int = 0
    pool_budget: int | None = None

    def __post_init__(self):
        if self.cb is not None and self.cb < 1:
            raise ValueError("cb must be >= 1 (None means exact checks)")
        if self.pool_budget is not None and self.pool_budget < 1:
            raise ValueError("pool_budget must be positive")


class TuplePool:
    """Insertion-ordered uncovered tuples with a status per tuple.

    Tuples proven forbidden leave the pool permanently; under a byte budget
    the resident size may never exceed it.
    """

    def __init__(self, t: int, tuples=(), byte_budget: int | None = None,
                 forbidden: set | None = None):
        self.t = t
        self.byte_budget = byte_budget
        self.forbidden = set() if forbidden is None else forbidden
        self.high_water_bytes = 0
        self._alive: dict = {}
        for tup in tuples:
            self.add(tup)

    def add(self, tup) -> bool:
        if tup in self.forbidden or tup in self._alive:
            return False
        if self.byte_budget is not None:
            if (len(self._alive) + 1) * tuple_record_bytes(self.t) > self.byte_budget:
                raise ValueError("tuple pool byte budget exceeded")
        self._alive[tup] = UNKNOWN
        self.high_water_bytes = max(self.high_water_bytes, self.resident_bytes)
        return True

    @property
    def resident_bytes(self) -> int:
        return len(self._alive) * tuple_record_bytes(self.t)

    def first(self):
        return next(iter(self._alive), None)

    def status(self, tup) -> str:
        if tup in self.forbidden:
            return FORBIDDEN
        return self._alive[tup]

    def mark_allowed(self, tup) -> None:
        self._alive[tup] = ALLOWED

    def mark_forbidden(self, tup) -> None:
        del self._alive[tup]
        self.forbidden.add(tup)

    def remove_covered(self, test: TestCase) -> int:
        gone = [tup for tup in self._alive if test.covers(tup)]
        for tup in gone:
            del self._alive[tup]
        return len(gone)

    def __len__(self):
        return len(self._alive)

    def __bool__(self):
        return bool(self._alive)

    def __iter__(self):
        return iter(self._alive)

    def __contains__(self, tup):
        return tup in self._alive


def enumerate_tuples(model: SutModel, t: int):
    """All t-tuples of the model in a fixed order: parameter index sets
    ascending, value indices in lexicographic order."""
    n = model.n_params
    domains = model.domains
    for combo in itertools.combinations(range(n), t):
        for values in itertools.product(*(range(len(domains[p])) for p in combo)):
            yield make_tuple(zip(combo, values))


def _new_stats() -> dict:
    return {
        "full_solves": 0,
        "budget_solves": 0,
        "assumed_consistent": 0,
        "forbidden_tuples": 0,
        "amend_unfixed": 0,
        "unfixed_params": 0,
        "slices": 0,
        "skipped_covered_on_load": 0,
        "pool_high_water_bytes": 0,
    }


def build_one_test(model: SutModel, pool: TuplePool, engine, cfg: BotConfig,
                   enc=None, rng=None, stats=None):
    """Build one test covering at least the pool's first allowed tuple.

    Returns (test, pool); the test is None when every remaining pooled tuple
    turned out forbidden.  The engine must hold the model's CNF compiled by
    the same encoding passed as enc.
    """
    if enc is None:
        enc = compile_model(model)
    if rng is None:
        rng = random.Random(cfg.seed)
    if stats is None:
        stats = _new_stats()
    n = model.n_params

    # the seed tuple gets an exact check; forbidden ones leave for good
    seed_tup = None
    while pool:
        tup = pool.first()
        if pool.status(tup) == ALLOWED:
            seed_tup = tup
            break
        out = engine.solve([enc.lit(p, v) for p, v in tup])
        stats["full_solves"] += 1
        if out.status is SolveStatus.SAT:
            pool.mark_allowed(tup)
            seed_tup = tup
            break
        if out.status is SolveStatus.UNSAT:
            pool.mark_forbidden(tup)
            stats["forbidden_tuples"] += 1
            continue
        raise EngineFailure("exact tuple check gave up")
    if seed_tup is None:
        return None, pool

    cells = [EMPTY] * n
    for p, v in seed_tup:
        cells[p] = v
    others = [p for p in range(n) if cells[p] == EMPTY]
    rng.shuffle(others)

    fix_stack = []
    for p in others:
        d = len(model.domains[p])
        counts = [0] * d
        for tup in pool:
            want = None
            ok = True
            for q, w in tup:
                if q == p:
                    want = w
                elif cells[q] != EMPTY and cells[q] != w:
                    ok = False
                    break
            if ok and want is not None:
                counts[want] += 1
        base = enc.test_lits(cells)
        fixed = False
        for v in sorted(range(d), key=lambda v: (-counts[v], v)):
            if counts[v] == 0:
                break
            out = engine.solve(base + [enc.lit(p, v)], conflict_budget=cfg.cb)
            stats["budget_solves"] += 1
            if out.status is SolveStatus.BUDGET_EXHAUSTED:
                stats["assumed_consistent"] += 1
            elif out.status is not SolveStatus.SAT:
                continue
            cells[p] = v
            fix_stack.append(p)
            fixed = True
            break
        if not fixed:
            stats["unfixed_params"] += 1

    # amend: exact check, dropping the latest non-seed fix while it fails
    out = engine.solve(enc.test_lits(cells))
    stats["full_solves"] += 1
    while out.status is SolveStatus.UNSAT:
        if not fix_stack:
            raise EngineFailure("amendment removed every fix yet the seed "
                                "tuple fails its own recheck")
        cells[fix_stack.pop()] = EMPTY
        stats["amend_unfixed"] += 1
        out = engine.solve(enc.test_lits(cells))
        stats["full_solves"] += 1
    if out.status is not SolveStatus.SAT:
        raise EngineFailure("exact amendment check gave up")

    full, _aux = enc.decode(out.model)
    for p in range(n):
        if cells[p] == EMPTY:
            cells[p] = full[p]
    return TestCase(tuple(cells)), pool


def _run(model: SutModel, t: int, cfg: BotConfig, algorithm: str,
         slice_cap: int | None, on_test=None, core_module=None) -> TestSuite:
    started = time.monotonic()
    n = model.n_params
    if not 2 <= t <= n:
        raise StrengthOutOfRange(f"strength {t} not in [2, {n}]")
    enc = compile_model(model, core_module=core_module)
    engine = enc.new_solver(SolverConfig(seed=cfg.seed), core_module=core_module)
    rng = random.Random(cfg.seed)
    stats = _new_stats()

    tests: list[TestCase] = []
    forbidden: set = set()
    gen = enumerate_tuples(model, t)
    budget = cfg.pool_budget if algorithm == "pbot" else None
    while True:
        batch = []
        for tup in gen:
            if any(tc.covers(tup) for tc in tests):
                stats["skipped_covered_on_load"] += 1
                continue
            batch.append(tup)
            if slice_cap is not None and len(batch) == slice_cap:
                break
        if not batch:
            break
        pool = TuplePool(t, batch, byte_budget=budget, forbidden=forbidden)
        stats["slices"] += 1
        stats["pool_high_water_bytes"] = max(
            stats["pool_high_water_bytes"], pool.high_water_bytes)
        while pool:
            test, pool = build_one_test(model, pool, engine, cfg,
                                        enc=enc, rng=rng, stats=stats)
            if test is None:
                break
            tests.append(test)
            if on_test is not None:
                on_test(test)
            pool.remove_covered(test)

    meta = SuiteMeta(
        strength=t,
        algorithm=algorithm,
        seed=cfg.seed,
        model_fingerprint=model.fingerprint,
        wall_time_s=time.monotonic() - started,
        stats=stats,
    )
    return TestSuite(tuple(tests), meta)


def build_bot(model: SutModel, t: int, cfg: BotConfig | None = None,
              on_test=None, core_module=None) -> TestSuite:
    """Unbounded-pool build; on_test streams each test as it is produced."""
    cfg = cfg or BotConfig()
    return _run(model, t, cfg, "bot", None, on_test, core_module)


def build_pbot(model: SutModel, t: int, cfg: BotConfig,
               on_test=None, core_module=None) -> TestSuite:
    """Pool build under cfg.pool_budget bytes of resident tuples."""
    if cfg.pool_budget is None:
        raise ValueError("build_pbot needs cfg.pool_budget")
    cap = cfg.pool_budget // tuple_record_bytes(t)
    if cap < 1:
        raise ValueError("pool_budget below the size of one tuple record")
    return _run(model, t, cfg, "pbot", cap, on_test, core_module)
