"""Independent covering-array validation.

Tests are judged by evaluating the constraint AST directly, not through the
engine that built the suite; tuple coverage is recomputed from scratch.
The engine appears in exactly two places, both with fresh instances: the
existential check over auxiliary variables for models that have them, and
allowed-or-forbidden classification of tuples the suite left uncovered.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass

from ctforge.engine import SatSolver, SolveStatus
from ctforge.formats import expr_to_clauses
from ctforge.model import (
    And,
    Aux,
    Eq,
    Implies,
    ModelError,
    Neq,
    Not,
    Or,
    StrengthOutOfRange,
    SutModel,
    TestSuite,
    ValueTuple,
    compile_model,
    evaluate,
    make_tuple,
)


@dataclass(frozen=True)
class VerifyReport:
    valid: bool
    strength: int
    n_tests: int
    total_tuples: int
    allowed_tuples: int
    forbidden_tuples: int
    covered_tuples: int
    violating_tests: tuple[int, ...]
    uncovered: tuple[ValueTuple, ...]

    def summary(self) -> str:
        lines = [
            f"valid={'true' if self.valid else 'false'}",
            f"strength={self.strength}",
            f"tests={self.n_tests}",
            f"tuples_total={self.total_tuples}",
            f"tuples_allowed={self.allowed_tuples}",
            f"tuples_forbidden={self.forbidden_tuples}",
            f"tuples_covered={self.covered_tuples}",
            f"violating_tests={len(self.violating_tests)}",
            f"uncovered_allowed={len(self.uncovered)}",
        ]
        return "\n".join(lines) + "\n"

    def failures_csv(self, model: SutModel) -> str:
        rows = ["kind,detail"]
        for i in self.violating_tests:
            rows.append(f"violation,row {i + 1}")
        for tup in self.uncovered:
            pairs = " ".join(
                f"{model.param_names[p]}={model.domains[p][v]}" for p, v in tup)
            rows.append(f"uncovered,{pairs}")
        return "\n".join(rows) + "\n"


def _subst(expr, values):
    """Partially evaluate under fixed parameter values; auxiliaries stay
    symbolic.  Returns True, False, or a residual aux-only expression."""
    if isinstance(expr, Eq):
        return values[expr.param] == expr.value
    if isinstance(expr, Neq):
        return values[expr.param] != expr.value
    if isinstance(expr, Aux):
        return expr
    if isinstance(expr, Not):
        c = _subst(expr.child, values)
        if isinstance(c, bool):
            return not c
        return Not(c)
    if isinstance(expr, Implies):
        return _subst(Or((Not(expr.lhs), expr.rhs)), values)
    if isinstance(expr, (And, Or)):
        stop = isinstance(expr, Or)  # short-circuit value
        rest = []
        for c in expr.children:
            s = _subst(c, values)
            if s is stop:
                return stop
            if not isinstance(s, bool):
                rest.append(s)
        if not rest:
            return not stop
        if len(rest) == 1:
            return rest[0]
        return Or(tuple(rest)) if stop else And(tuple(rest))
    raise TypeError(f"not a constraint expression: {expr!r}")


def _aux_satisfiable(residuals, model: SutModel, core_module=None) -> bool:
    """One existential SAT query: can the auxiliaries satisfy the residuals?"""
    index = {name: i + 1 for i, name in enumerate(model.aux_vars)}
    clauses = []
    for r in residuals:
        for cl in expr_to_clauses(r):
            lits = []
            for atom in cl:
                if not isinstance(atom, Aux):
                    raise ModelError("residual constraint still mentions "
                                     "a parameter")
                lits.append(index[atom.name] if atom.positive
                            else -index[atom.name])
            clauses.append(lits)
    solver = SatSolver(len(index), core_module=core_module)
    for cl in clauses:
        solver.add_clause(cl)
    return solver.solve().status is SolveStatus.SAT


def _test_accepted(model: SutModel, cells, core_module=None) -> bool:
    values = {model.param_names[p]: model.domains[p][v]
              for p, v in enumerate(cells)}
    if not model.aux_vars:
        return all(evaluate(c, values, {}) for c in model.constraints)
    residuals = []
    for c in model.constraints:
        s = _subst(c, values)
        if s is False:
            return False
        if s is not True:
            residuals.append(s)
    if not residuals:
        return True
    return _aux_satisfiable(residuals, model, core_module)


def _check_suite_shape(model: SutModel, suite: TestSuite) -> None:
    fp = suite.meta.model_fingerprint
    if fp and fp != model.fingerprint:
        raise ModelError("suite was built for a different model "
                         f"(fingerprint {fp} != {model.fingerprint})")
    for i, test in enumerate(suite.tests):
        if len(test.cells) != model.n_params:
            raise ModelError(f"test {i + 1} has {len(test.cells)} cells, "
                             f"model has {model.n_params} parameters")
        if not test.is_final():
            raise ModelError(f"test {i + 1} is not final")
        for p, v in enumerate(test.cells):
            if not 0 <= v < len(model.domains[p]):
                raise ModelError(f"test {i + 1} assigns parameter {p} "
                                 f"the out-of-range value index {v}")


def verify_mcac(model: SutModel, t: int, suite: TestSuite,
                core_module=None) -> VerifyReport:
    model.validate()
    n = model.n_params
    if not 2 <= t <= n:
        raise StrengthOutOfRange(f"strength {t} not in [2, {n}]")
    _check_suite_shape(model, suite)

    violating = tuple(i for i, test in enumerate(suite.tests)
                      if not _test_accepted(model, test.cells, core_module))
    bad = set(violating)
    good_tests = [test for i, test in enumerate(suite.tests) if i not in bad]

    enc = compile_model(model, core_module=core_module)
    solver = enc.new_solver(core_module=core_module)

    def sat_allowed(tup) -> bool:
        out = solver.solve([enc.lit(p, v) for p, v in tup])
        if out.status is SolveStatus.BUDGET_EXHAUSTED:
            raise ModelError("unbudgeted allowed-ness query gave up")
        return out.status is SolveStatus.SAT

    total = 0
    allowed = 0
    covered = 0
    uncovered = []
    domains = model.domains
    for combo in itertools.combinations(range(n), t):
        for values in itertools.product(*(range(len(domains[p])) for p in combo)):
            tup = make_tuple(zip(combo, values))
            total += 1
            # a tuple inside an accepted test is allowed by witness; only
            # the leftovers need the engine
            if any(test.covers(tup) for test in good_tests):
                allowed += 1
                covered += 1
            elif sat_allowed(tup):
                allowed += 1
                uncovered.append(tup)

    return VerifyReport(
        valid=not violating and not uncovered,
        strength=t,
        n_tests=len(suite.tests),
        total_tuples=total,
        allowed_tuples=allowed,
        forbidden_tuples=total - allowed,
        covered_tuples=covered,
        violating_tests=violating,
        uncovered=tuple(uncovered),
    )


def oracle_allowed_tuples(model: SutModel, t: int,
                          cap: int = 10 ** 6) -> set:
    """Ground-truth allowed t-tuples by full enumeration on the AST.

    Independent of the SAT engine; the work product (assignments times aux
    assignments) is capped because it grows exponentially.
    """
    model.validate()
    n = model.n_params
    if not 1 <= t <= n:
        raise StrengthOutOfRange(f"strength {t} not in [1, {n}]")
    domains = model.domains
    work = math.prod(len(d) for d in domains) * (2 ** len(model.aux_vars))
    if work > cap:
        raise ModelError(f"enumeration cap exceeded: {work} > {cap}")

    names = model.param_names
    allowed = set()
    for cells in itertools.product(*(range(len(d)) for d in domains)):
        values = {names[p]: domains[p][v] for p, v in enumerate(cells)}
        ok = False
        for aux_bits in itertools.product((False, True),
                                          repeat=len(model.aux_vars)):
            aux = dict(zip(model.aux_vars, aux_bits))
            if all(evaluate(c, values, aux) for c in model.constraints):
                ok = True
                break
        if ok:
            for combo in itertools.combinations(range(n), t):
                allowed.add(make_tuple((p, cells[p]) for p in combo))
    return allowed
