"""Domain model for constrained SUTs.

A model is a named list of finite-domain parameters, optional Boolean
auxiliary variables, and a list of constraint expressions.  This module owns
the constraint AST, value tuples, test cases and suites, and the compilation
of a model into CNF for the SAT engine.
"""

from __future__ import annotations

import hashlib
import itertools
import math
from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterator, Mapping, Sequence, Union

from ctforge.engine import CnfFormula, SatSolver, SolveStatus

# Cell marker for a parameter no builder has fixed yet.  Representation-level
# only: serializers and the verifier refuse suites containing it.
EMPTY = -1


class ModelError(ValueError):
    """Structural problem in a SUT model or a derived artifact."""


class ModelUnsatisfiable(ModelError):
    """The constraints accept no parameterization at all."""


class StrengthOutOfRange(ModelError):
    pass


class ConsistencyUndecided(RuntimeError):
    """A budgeted consistency query exhausted its budget with no verdict."""


class EngineFailure(RuntimeError):
    """The SAT engine returned something the builder's invariants rule out."""


# ---------------------------------------------------------------------------
# Constraint AST


@dataclass(frozen=True)
class Eq:
    param: str
    value: str


@dataclass(frozen=True)
class Neq:
    param: str
    value: str


@dataclass(frozen=True)
class Aux:
    """Reference to a Boolean auxiliary variable, with polarity folded in."""

    name: str
    positive: bool = True


@dataclass(frozen=True)
class Not:
    child: "ConstraintExpr"


@dataclass(frozen=True)
class And:
    children: tuple["ConstraintExpr", ...]


@dataclass(frozen=True)
class Or:
    children: tuple["ConstraintExpr", ...]


@dataclass(frozen=True)
class Implies:
    lhs: "ConstraintExpr"
    rhs: "ConstraintExpr"


ConstraintExpr = Union[Eq, Neq, Aux, Not, And, Or, Implies]

_ATOMS = (Eq, Neq, Aux)


def conj(*children: ConstraintExpr) -> And:
    return And(tuple(children))


def disj(*children: ConstraintExpr) -> Or:
    return Or(tuple(children))


def evaluate(expr: ConstraintExpr, values: Mapping[str, str],
             aux: Mapping[str, bool] | None = None) -> bool:
    """Evaluate an expression against parameter value names and aux booleans."""
    if isinstance(expr, Eq):
        return values[expr.param] == expr.value
    if isinstance(expr, Neq):
        return values[expr.param] != expr.value
    if isinstance(expr, Aux):
        if aux is None or expr.name not in aux:
            raise ModelError(f"no value provided for auxiliary {expr.name!r}")
        return aux[expr.name] == expr.positive
    if isinstance(expr, Not):
        return not evaluate(expr.child, values, aux)
    if isinstance(expr, And):
        return all(evaluate(c, values, aux) for c in expr.children)
    if isinstance(expr, Or):
        return any(evaluate(c, values, aux) for c in expr.children)
    if isinstance(expr, Implies):
        return (not evaluate(expr.lhs, values, aux)) or evaluate(expr.rhs, values, aux)
    raise TypeError(f"not a constraint expression: {expr!r}")


def walk(expr: ConstraintExpr) -> Iterator[ConstraintExpr]:
    yield expr
    if isinstance(expr, Not):
        yield from walk(expr.child)
    elif isinstance(expr, (And, Or)):
        for c in expr.children:
            yield from walk(c)
    elif isinstance(expr, Implies):
        yield from walk(expr.lhs)
        yield from walk(expr.rhs)


# ---------------------------------------------------------------------------
# SUT model


def _freeze_params(parameters) -> tuple[tuple[str, tuple[str, ...]], ...]:
    return tuple((str(n), tuple(str(v) for v in dom)) for n, dom in parameters)


@dataclass(frozen=True)
class SutModel:
    """Immutable SUT description: parameters, auxiliaries, constraints.

    strength_hint carries the interaction strength stored by formats that
    embed one (it is metadata, never a coverage mandate: builders take t
    explicitly).
    """

    name: str
    parameters: tuple[tuple[str, tuple[str, ...]], ...]
    aux_vars: tuple[str, ...] = ()
    constraints: tuple[ConstraintExpr, ...] = ()
    strength_hint: int | None = None

    def __post_init__(self):
        object.__setattr__(self, "parameters", _freeze_params(self.parameters))
        object.__setattr__(self, "aux_vars", tuple(str(a) for a in self.aux_vars))
        object.__setattr__(self, "constraints", tuple(self.constraints))

    @property
    def n_params(self) -> int:
        return len(self.parameters)

    @cached_property
    def param_names(self) -> tuple[str, ...]:
        return tuple(n for n, _ in self.parameters)

    @cached_property
    def domains(self) -> tuple[tuple[str, ...], ...]:
        return tuple(dom for _, dom in self.parameters)

    @cached_property
    def param_index(self) -> dict[str, int]:
        return {n: i for i, n in enumerate(self.param_names)}

    @cached_property
    def aux_index(self) -> dict[str, int]:
        return {n: i for i, n in enumerate(self.aux_vars)}

    @cached_property
    def value_index(self) -> tuple[dict[str, int], ...]:
        return tuple({v: i for i, v in enumerate(dom)} for dom in self.domains)

    @cached_property
    def fingerprint(self) -> str:
        text = repr((self.name, self.parameters, self.aux_vars, self.constraints))
        return hashlib.sha256(text.encode()).hexdigest()[:16]

    def validate(self) -> None:
        seen: set[str] = set()
        for name in self.param_names + self.aux_vars:
            if not name:
                raise ModelError("empty parameter or auxiliary name")
            if name in seen:
                raise ModelError(f"duplicate name {name!r}")
            seen.add(name)
        for name, dom in self.parameters:
            if not dom:
                raise ModelError(f"parameter {name!r} has an empty domain")
            if len(set(dom)) != len(dom):
                raise ModelError(f"parameter {name!r} repeats a value name")
        for expr in self.constraints:
            self._validate_expr(expr)

    def _validate_expr(self, expr: ConstraintExpr) -> None:
        for node in walk(expr):
            if isinstance(node, (Eq, Neq)):
                idx = self.param_index.get(node.param)
                if idx is None:
                    raise ModelError(f"unknown parameter {node.param!r} in constraint")
                if node.value not in self.value_index[idx]:
                    raise ModelError(
                        f"unknown value {node.value!r} for parameter {node.param!r}")
            elif isinstance(node, Aux):
                if node.name not in self.aux_index:
                    raise ModelError(f"unknown auxiliary {node.name!r} in constraint")
            elif isinstance(node, (And, Or)):
                if not node.children:
                    raise ModelError("And/Or with no children")
            elif not isinstance(node, (Not, Implies)):
                raise TypeError(f"not a constraint expression: {node!r}")


# ---------------------------------------------------------------------------
# Tuples, tests, suites

ValueTuple = tuple  # of (param index, value index) pairs, ordered by param


def make_tuple(pairs) -> ValueTuple:
    out = tuple(sorted(pairs))
    if len({p for p, _ in out}) != len(out):
        raise ModelError(f"tuple repeats a parameter: {pairs!r}")
    return out


def count_tuples(model: SutModel, t: int) -> int:
    sizes = [len(d) for d in model.domains]
    return sum(math.prod(sizes[i] for i in comb)
               for comb in itertools.combinations(range(model.n_params), t))


def enumerate_tuples(model: SutModel, t: int) -> Iterator[ValueTuple]:
    """All t-tuples, lexicographic by parameter combination then value index."""
    if not 1 <= t <= model.n_params:
        raise StrengthOutOfRange(f"strength {t} not in [1, {model.n_params}]")
    sizes = [len(d) for d in model.domains]
    for comb in itertools.combinations(range(model.n_params), t):
        for vals in itertools.product(*(range(sizes[p]) for p in comb)):
            yield tuple(zip(comb, vals))


@dataclass(frozen=True)
class TestCase:
    cells: tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, "cells", tuple(self.cells))

    def is_final(self) -> bool:
        return EMPTY not in self.cells

    def covers(self, tup: ValueTuple) -> bool:
        return all(self.cells[p] == v for p, v in tup)


def covers(test: TestCase, tup: ValueTuple) -> bool:
    """True iff every pair of the tuple is fixed identically in the test.

    EMPTY cells never match, so a partial test covers nothing it has not
    actually decided.
    """
    return test.covers(tup)


@dataclass
class SuiteMeta:
    strength: int
    algorithm: str
    seed: int | None = None
    model_fingerprint: str = ""
    wall_time_s: float = 0.0
    stats: dict = field(default_factory=dict)


@dataclass
class TestSuite:
    tests: tuple[TestCase, ...]
    meta: SuiteMeta

    def __post_init__(self):
        self.tests = tuple(self.tests)

    def __len__(self) -> int:
        return len(self.tests)

    def __iter__(self):
        return iter(self.tests)


# ---------------------------------------------------------------------------
# CNF compilation

_POS, _NEG = True, False


class _PgEncoder:
    """Polarity-aware Tseitin translation over a structurally shared AST.

    Each And/Or node gets one definition variable; only the implication
    direction a polarity actually needs is emitted, and top-level formulas
    are asserted directly with no definition variable for the root.
    """

    def __init__(self, enc: "CnfEncoding", next_var: int):
        self.enc = enc
        self.next_var = next_var
        self.clauses: list[tuple[int, ...]] = []
        self.defs: dict[ConstraintExpr, int] = {}
        self.emitted: dict[ConstraintExpr, set[bool]] = {}

    def _norm(self, e: ConstraintExpr) -> ConstraintExpr:
        if isinstance(e, Implies):
            return Or((Not(self._norm(e.lhs)), self._norm(e.rhs)))
        if isinstance(e, Not):
            return Not(self._norm(e.child))
        if isinstance(e, And):
            return And(tuple(self._norm(c) for c in e.children))
        if isinstance(e, Or):
            return Or(tuple(self._norm(c) for c in e.children))
        return e

    def assert_true(self, e: ConstraintExpr) -> None:
        self._assert(self._norm(e), True)

    def _assert(self, e: ConstraintExpr, value: bool) -> None:
        if isinstance(e, Not):
            self._assert(e.child, not value)
            return
        if (isinstance(e, And) and value) or (isinstance(e, Or) and not value):
            for c in e.children:
                self._assert(c, value)
            return
        if isinstance(e, (And, Or)):
            # Or asserted true / And asserted false: one clause over the
            # children, flattening directly nested same-shape nodes
            lits: list[int] = []
            stack = list(e.children)[::-1]
            while stack:
                c = stack.pop()
                if isinstance(c, type(e)):
                    stack.extend(list(c.children)[::-1])
                elif value:
                    lits.append(self._lit(c, _POS))
                else:
                    lits.append(-self._lit(c, _NEG))
            self.clauses.append(tuple(lits))
            return
        lit = self.enc.atom_lit(e)
        self.clauses.append((lit,) if value else (-lit,))

    def _lit(self, e: ConstraintExpr, pol: bool) -> int:
        if isinstance(e, _ATOMS):
            return self.enc.atom_lit(e)
        if isinstance(e, Not):
            return -self._lit(e.child, not pol)
        var = self.defs.get(e)
        if var is None:
            var = self.next_var
            self.next_var += 1
            self.defs[e] = var
            self.emitted[e] = set()
        if pol not in self.emitted[e]:
            self.emitted[e].add(pol)
            kids = e.children
            if pol:
                # var -> e
                if isinstance(e, And):
                    for c in kids:
                        self.clauses.append((-var, self._lit(c, _POS)))
                else:
                    self.clauses.append((-var, *[self._lit(c, _POS) for c in kids]))
            else:
                # not var -> not e
                if isinstance(e, And):
                    self.clauses.append((var, *[-self._lit(c, _NEG) for c in kids]))
                else:
                    for c in kids:
                        self.clauses.append((var, -self._lit(c, _NEG)))
        return var


def _clause_shape(expr: ConstraintExpr) -> tuple[ConstraintExpr, ...] | None:
    """The atoms of a disjunction-of-atoms expression, or None."""
    if isinstance(expr, _ATOMS):
        return (expr,)
    if isinstance(expr, Or) and all(isinstance(c, _ATOMS) for c in expr.children):
        return expr.children
    return None


@dataclass
class CnfEncoding:
    """A compiled model: CNF clauses plus the variable layout to read them.

    mode "onehot" assigns one variable per (parameter, value) pair with
    at-least-one and pairwise at-most-one clauses per parameter; mode
    "boolean" maps each domain-2 parameter to a single variable and imports
    clause-shaped constraints verbatim, preserving generated benchmarks
    bit for bit.
    """

    model: SutModel
    mode: str
    cnf: CnfFormula
    pv_base: tuple[int, ...]
    aux_base: int
    n_core_vars: int

    def lit(self, p: int, v: int) -> int:
        """The literal asserting parameter p takes value index v."""
        if self.mode == "boolean":
            return (p + 1) if v == 1 else -(p + 1)
        return self.pv_base[p] + v

    def aux_lit(self, name: str, positive: bool = True) -> int:
        var = self.aux_base + self.model.aux_index[name]
        return var if positive else -var

    def atom_lit(self, atom: ConstraintExpr) -> int:
        if isinstance(atom, Eq):
            p = self.model.param_index[atom.param]
            return self.lit(p, self.model.value_index[p][atom.value])
        if isinstance(atom, Neq):
            p = self.model.param_index[atom.param]
            v = self.model.value_index[p][atom.value]
            if self.mode == "boolean":
                return -self.lit(p, v)
            return -(self.pv_base[p] + v)
        if isinstance(atom, Aux):
            return self.aux_lit(atom.name, atom.positive)
        raise TypeError(f"not an atom: {atom!r}")

    def test_lits(self, cells: Sequence[int]) -> list[int]:
        """Assumption literals for the fixed cells of a (possibly partial) test."""
        return [self.lit(p, v) for p, v in enumerate(cells) if v != EMPTY]

    def decode(self, sat_model: Mapping[int, bool]) -> tuple[tuple[int, ...], tuple[bool, ...]]:
        """Project a SAT model onto per-parameter value indices and aux values."""
        cells = []
        for p, dom in enumerate(self.model.domains):
            if self.mode == "boolean":
                cells.append(1 if sat_model[p + 1] else 0)
                continue
            hits = [v for v in range(len(dom)) if sat_model[self.pv_base[p] + v]]
            if len(hits) != 1:
                raise ModelError(f"model assigns {len(hits)} values to parameter {p}")
            cells.append(hits[0])
        aux = tuple(sat_model[self.aux_base + i] for i in range(len(self.model.aux_vars)))
        return tuple(cells), aux

    def new_solver(self, config=None, core_module=None) -> SatSolver:
        s = SatSolver(self.cnf.n_vars, config=config, core_module=core_module)
        s.add_formula(self.cnf)
        return s


def compile_model(model: SutModel, core_module=None) -> CnfEncoding:
    """Compile a model to CNF and prove it accepts at least one test case.

    Raises ModelUnsatisfiable otherwise: a SUT that accepts no
    parameterization is a modelling error, not a valid input.
    """
    model.validate()
    boolean = (all(dom == ("0", "1") for dom in model.domains)
               and all(_clause_shape(c) is not None for c in model.constraints))
    clauses: list[tuple[int, ...]] = []
    if boolean:
        n_params = model.n_params
        aux_base = n_params + 1
        enc = CnfEncoding(model, "boolean", CnfFormula(0), (), aux_base,
                          n_params + len(model.aux_vars))
        for c in model.constraints:
            clauses.append(tuple(enc.atom_lit(a) for a in _clause_shape(c)))
        n_vars = enc.n_core_vars
    else:
        pv_base = []
        nxt = 1
        for dom in model.domains:
            pv_base.append(nxt)
            nxt += len(dom)
        aux_base = nxt
        nxt += len(model.aux_vars)
        enc = CnfEncoding(model, "onehot", CnfFormula(0), tuple(pv_base),
                          aux_base, nxt - 1)
        for p, dom in enumerate(model.domains):
            base = pv_base[p]
            clauses.append(tuple(base + v for v in range(len(dom))))
            for v1 in range(len(dom)):
                for v2 in range(v1 + 1, len(dom)):
                    clauses.append((-(base + v1), -(base + v2)))
        pg = _PgEncoder(enc, nxt)
        for c in model.constraints:
            pg.assert_true(c)
        clauses.extend(pg.clauses)
        n_vars = pg.next_var - 1
    enc.cnf = CnfFormula(n_vars, clauses)
    enc.cnf.validate()
    probe = enc.new_solver(core_module=core_module)
    if probe.solve().status is not SolveStatus.SAT:
        raise ModelUnsatisfiable(f"model {model.name!r} accepts no test case")
    return enc


def is_allowed(tup: ValueTuple, enc: CnfEncoding, solver: SatSolver,
               conflict_budget: int | None = None,
               budget_is_forbidden: bool = False) -> bool:
    """Whether a value tuple extends to a test case entailing the constraints.

    The default is an exact, unbudgeted query.  With a conflict budget, an
    exhausted query either counts as forbidden (opt-in) or raises, so callers
    cannot silently mistake a timeout for a verdict.
    """
    assumps = [enc.lit(p, v) for p, v in tup]
    out = solver.solve(assumps, conflict_budget=conflict_budget)
    if out.status is SolveStatus.BUDGET_EXHAUSTED:
        if budget_is_forbidden:
            return False
        raise ConsistencyUndecided(f"budget exhausted deciding tuple {tup!r}")
    return out.status is SolveStatus.SAT
