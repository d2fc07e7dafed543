"""Incremental SAT interface used by every other module.

Wraps the solver core (compiled extension when built, pure-Python source
otherwise; same file, same behaviour) behind small typed results.  Literals
are nonzero ints in DIMACS convention: +v / -v for variable v >= 1.
"""

from __future__ import annotations

import importlib.util
from dataclasses import dataclass, field
from enum import Enum
from pathlib import Path
from typing import Iterable, Sequence

from ctforge import _satcore


class SolveStatus(Enum):
    SAT = "sat"
    UNSAT = "unsat"
    BUDGET_EXHAUSTED = "budget_exhausted"


@dataclass(frozen=True)
class SolverConfig:
    """Engine knobs.  conflict_budget=None means unbudgeted exact solving.

    A budgeted call counts every refutation event (propagation conflicts and
    assumptions found false) and gives up with BUDGET_EXHAUSTED the moment
    the count reaches the budget, even if that event would have settled the
    query; formula-level refutations at the root are the one exception and
    always report UNSAT.
    """

    seed: int = 0
    rnd_decision_freq: float = 0.0
    rnd_polarity_freq: float = 0.0
    conflict_budget: int | None = None
    wall_limit_s: float | None = None

    def __post_init__(self):
        if not 0.0 <= self.rnd_decision_freq <= 1.0:
            raise ValueError("rnd_decision_freq outside [0,1]")
        if not 0.0 <= self.rnd_polarity_freq <= 1.0:
            raise ValueError("rnd_polarity_freq outside [0,1]")
        if self.conflict_budget is not None and self.conflict_budget < 1:
            raise ValueError("conflict_budget must be positive")


@dataclass
class SolveOutcome:
    status: SolveStatus
    model: dict[int, bool] | None
    core: list[int] | None
    n_conflicts: int

    def __bool__(self):
        return self.status is SolveStatus.SAT


@dataclass
class Propagation:
    """Unit-propagation fixpoint: lits holds root facts, assumptions, and
    consequences; conflict=True means a clause was falsified (lits empty)."""

    conflict: bool
    lits: list[int]


@dataclass
class CnfFormula:
    n_vars: int
    clauses: list[tuple[int, ...]] = field(default_factory=list)

    def validate(self) -> None:
        for cl in self.clauses:
            for lit in cl:
                if lit == 0 or abs(lit) > self.n_vars:
                    raise ValueError(f"literal {lit} out of range for n_vars={self.n_vars}")


def _encode(lit: int) -> int:
    return (lit << 1) if lit > 0 else ((-lit) << 1) | 1


def _decode(code: int) -> int:
    return -(code >> 1) if code & 1 else (code >> 1)


class SatSolver:
    """Incremental CDCL solver; learned clauses persist across solve calls.

    Identical construction, clause order, config, and call sequence give
    identical outcomes, on either backend.
    """

    def __init__(self, n_vars: int = 0, config: SolverConfig | None = None,
                 core_module=None):
        self.config = config or SolverConfig()
        self._mod = core_module if core_module is not None else _satcore
        self._core = self._mod.CoreSolver()
        self._core.set_seed(self.config.seed)
        self._core.set_random(self.config.rnd_decision_freq,
                              self.config.rnd_polarity_freq)
        if n_vars:
            self._core.ensure_vars(n_vars)

    @property
    def n_vars(self) -> int:
        return self._core.get_num_vars()

    @property
    def backend(self) -> str:
        return "compiled" if self._mod.COMPILED else "pure"

    def set_seed(self, seed: int) -> None:
        self._core.set_seed(seed)

    def add_clause(self, lits: Iterable[int]) -> None:
        """Duplicates are merged and tautologies dropped; an (effectively)
        empty clause makes the formula permanently unsatisfiable."""
        ext = []
        for lit in lits:
            if not isinstance(lit, int) or isinstance(lit, bool) or lit == 0:
                raise ValueError(f"invalid literal {lit!r}")
            ext.append(lit)
        self._core.add_clause(ext)

    def add_formula(self, cnf: CnfFormula) -> None:
        self._core.ensure_vars(cnf.n_vars)
        for cl in cnf.clauses:
            self.add_clause(cl)

    def solve(self, assumps: Sequence[int] = (),
              conflict_budget: int | None = None,
              wall_limit_s: float | None = None) -> SolveOutcome:
        """conflict_budget / wall_limit_s override the config for this call
        (the incremental builders mix exact and budgeted queries on one
        engine, so the budget has to be per-call)."""
        budget = conflict_budget if conflict_budget is not None else self.config.conflict_budget
        wall = wall_limit_s if wall_limit_s is not None else self.config.wall_limit_s
        codes = []
        for lit in assumps:
            if not isinstance(lit, int) or isinstance(lit, bool) or lit == 0:
                raise ValueError(f"invalid assumption literal {lit!r}")
            self._core.ensure_vars(abs(lit))
            codes.append(_encode(lit))
        res = self._core.solve_codes(codes, -1 if budget is None else budget,
                                     -1.0 if wall is None else wall)
        n_conf = self._core.last_conflicts()
        if res == self._mod.R_SAT:
            values = self._core.get_model()
            model = {v + 1: values[v] == self._mod.V_TRUE for v in range(len(values))}
            return SolveOutcome(SolveStatus.SAT, model, None, n_conf)
        if res == self._mod.R_UNSAT:
            core = [_decode(c) for c in self._core.get_core()] if assumps else None
            return SolveOutcome(SolveStatus.UNSAT, None, core, n_conf)
        return SolveOutcome(SolveStatus.BUDGET_EXHAUSTED, None, None, n_conf)

    def propagate(self, assumps: Sequence[int] = ()) -> Propagation:
        """Pure unit propagation under assumps; no search, no learning, and
        the clause database is left untouched."""
        codes = []
        for lit in assumps:
            if not isinstance(lit, int) or isinstance(lit, bool) or lit == 0:
                raise ValueError(f"invalid assumption literal {lit!r}")
            self._core.ensure_vars(abs(lit))
            codes.append(_encode(lit))
        flag, lits = self._core.propagate_codes(codes)
        if flag:
            return Propagation(True, [])
        return Propagation(False, [_decode(c) for c in lits])

    def stats(self) -> dict:
        return self._core.stats()


_PURE_CORE = None


def load_pure_core():
    """The uncompiled core module, regardless of which backend is installed.

    Lets benchmarks and tests run both backends side by side in one process.
    """
    global _PURE_CORE
    if not _satcore.COMPILED:
        return _satcore
    if _PURE_CORE is None:
        path = Path(__file__).resolve().parent / "_satcore.py"
        spec = importlib.util.spec_from_file_location("ctforge._satcore_pure", path)
        mod = importlib.util.module_from_spec(spec)
        spec.loader.exec_module(mod)
        _PURE_CORE = mod
    return _PURE_CORE
