"""Parsers and writers for the file formats the toolkit speaks.

DIMACS CNF for raw SAT instances, the two-file CASA layout, the ACTS model
format plus its auxiliary-variable extension, and CSV test suites.  Readers
are tolerant where real-world corpora drift (header counts, line endings),
writers are canonical: parse(write(x)) is the identity on every value the
writer accepts.
"""

from __future__ import annotations

import csv
import io
import itertools
import logging
import re
from bisect import bisect_right
from dataclasses import dataclass, field

from ctforge.engine import CnfFormula
from ctforge.model import (
    EMPTY,
    And,
    Aux,
    ConstraintExpr,
    Eq,
    Implies,
    ModelError,
    Neq,
    Not,
    Or,
    SuiteMeta,
    SutModel,
    TestCase,
    TestSuite,
)

log = logging.getLogger("ctforge.formats")


class FormatError(ValueError):
    """Malformed or inexpressible content for a concrete file format."""


# ---------------------------------------------------------------------------
# DIMACS


@dataclass
class DimacsDoc:
    cnf: CnfFormula
    declared_vars: int
    declared_clauses: int
    comments: list[str] = field(default_factory=list)


def parse_dimacs(text: str) -> DimacsDoc:
    comments: list[str] = []
    declared = None
    clauses: list[tuple[int, ...]] = []
    cur: list[int] = []
    max_var = 0
    for ln, line in enumerate(text.splitlines(), 1):
        stripped = line.strip()
        if not stripped:
            continue
        if stripped[0] == "c":
            comments.append(stripped[1:].lstrip())
            continue
        if stripped[0] == "p":
            if declared is not None:
                raise FormatError(f"line {ln}: second header line")
            parts = stripped.split()
            if len(parts) != 4 or parts[1] != "cnf":
                raise FormatError(f"line {ln}: malformed header {stripped!r}")
            try:
                declared = (int(parts[2]), int(parts[3]))
            except ValueError:
                raise FormatError(f"line {ln}: malformed header {stripped!r}") from None
            continue
        if declared is None:
            raise FormatError(f"line {ln}: clause data before 'p cnf' header")
        for tok in stripped.split():
            try:
                lit = int(tok)
            except ValueError:
                raise FormatError(f"line {ln}: non-integer token {tok!r}") from None
            if lit == 0:
                clauses.append(tuple(cur))
                cur.clear()
            else:
                cur.append(lit)
                max_var = max(max_var, abs(lit))
    if declared is None:
        raise FormatError("missing 'p cnf' header")
    if cur:
        raise FormatError("unterminated final clause (missing trailing 0)")
    n_vars, n_clauses = declared
    if len(clauses) != n_clauses:
        log.warning("dimacs header declares %d clauses, body has %d",
                    n_clauses, len(clauses))
    if max_var > n_vars:
        log.warning("dimacs header declares %d vars, body references %d",
                    n_vars, max_var)
        n_vars = max_var
    return DimacsDoc(CnfFormula(n_vars, clauses), declared[0], declared[1], comments)


def write_dimacs(cnf: CnfFormula, comments=()) -> str:
    out = [f"c {c}" if c else "c" for c in comments]
    out.append(f"p cnf {cnf.n_vars} {len(cnf.clauses)}")
    for cl in cnf.clauses:
        out.append(" ".join(str(l) for l in cl) + " 0")
    return "\n".join(out) + "\n"


# ---------------------------------------------------------------------------
# CASA (.model / .constraints pair)


def _casa_ints(text: str, what: str) -> list[int]:
    toks = text.split()
    out = []
    for tok in toks:
        try:
            out.append(int(tok))
        except ValueError:
            raise FormatError(f"non-integer token {tok!r} in CASA {what}") from None
    return out


def parse_casa(model_text: str, constraints_text: str) -> SutModel:
    """Decode the two-file CASA layout into a model with synthetic names.

    Parameters become p1..pk with value names "0".."g-1"; the file's global
    value symbols are 0-based, so symbol 0 is the first value of p1.  The
    declared strength is kept as the model's strength hint.
    """
    ints = _casa_ints(model_text, "model file")
    if len(ints) < 2:
        raise FormatError("CASA model file needs parameter count and strength")
    k, strength = ints[0], ints[1]
    sizes = ints[2:]
    if len(sizes) != k:
        raise FormatError(f"CASA model file declares {k} parameters "
                          f"but lists {len(sizes)} domain sizes")
    if any(g < 1 for g in sizes):
        raise FormatError("CASA domain sizes must be positive")
    params = tuple((f"p{i + 1}", tuple(str(v) for v in range(g)))
                   for i, g in enumerate(sizes))
    offsets = list(itertools.accumulate(sizes))
    total = offsets[-1] if offsets else 0

    toks = constraints_text.split()
    pos = 0

    def take(what):
        nonlocal pos
        if pos >= len(toks):
            raise FormatError(f"CASA constraints file ended early, expected {what}")
        tok = toks[pos]
        pos += 1
        return tok

    def take_int(what):
        tok = take(what)
        try:
            return int(tok)
        except ValueError:
            raise FormatError(f"expected {what}, found {tok!r}") from None

    n_clauses = take_int("clause count")
    constraints = []
    for _ in range(n_clauses):
        n_sym = take_int("symbol count")
        atoms = []
        for _ in range(n_sym):
            sign = take("symbol sign")
            if sign in ("+", "-"):
                idx = take_int("symbol index")
            elif sign[0] in "+-" and sign[1:].isdigit():
                idx = int(sign[1:])
                sign = sign[0]
            else:
                raise FormatError(f"expected '+' or '-' symbol, found {sign!r}")
            if not 0 <= idx < total:
                raise FormatError(f"symbol {idx} out of range [0, {total})")
            p = bisect_right(offsets, idx)
            v = idx - (offsets[p - 1] if p else 0)
            atom = Eq(f"p{p + 1}", str(v)) if sign == "+" else Neq(f"p{p + 1}", str(v))
            atoms.append(atom)
        constraints.append(atoms[0] if len(atoms) == 1 else Or(tuple(atoms)))
    if pos != len(toks):
        raise FormatError(f"{len(toks) - pos} trailing tokens in CASA constraints file")
    model = SutModel("casa", params, (), tuple(constraints), strength_hint=strength)
    model.validate()
    return model


def _nnf(e: ConstraintExpr, neg: bool) -> ConstraintExpr:
    if isinstance(e, Eq):
        return Neq(e.param, e.value) if neg else e
    if isinstance(e, Neq):
        return Eq(e.param, e.value) if neg else e
    if isinstance(e, Aux):
        return Aux(e.name, e.positive != neg)
    if isinstance(e, Not):
        return _nnf(e.child, not neg)
    if isinstance(e, Implies):
        return _nnf(Or((Not(e.lhs), e.rhs)), neg)
    kids = tuple(_nnf(c, neg) for c in e.children)
    if isinstance(e, And):
        return Or(kids) if neg else And(kids)
    return And(kids) if neg else Or(kids)


def expr_to_clauses(expr: ConstraintExpr, max_lits: int = 100_000):
    """Flatten one expression to a list of atom clauses by distribution.

    Exponential in the worst case, hence the literal-count cap; callers that
    hit it must keep the richer format instead.
    """
    e = _nnf(expr, False)

    def clauses_of(e) -> list[tuple]:
        if isinstance(e, (Eq, Neq, Aux)):
            return [(e,)]
        if isinstance(e, And):
            out = []
            for c in e.children:
                out.extend(clauses_of(c))
                if sum(len(cl) for cl in out) > max_lits:
                    raise FormatError("constraint too large to flatten to clauses")
            return out
        # Or: distribute over the children's clause lists
        parts = [clauses_of(c) for c in e.children]
        out = []
        for combo in itertools.product(*parts):
            merged = tuple(a for cl in combo for a in cl)
            out.append(merged)
            if sum(len(cl) for cl in out) > max_lits:
                raise FormatError("constraint too large to flatten to clauses")
        return out

    return clauses_of(e)


def write_casa(model: SutModel, strength: int | None = None) -> tuple[str, str]:
    """Render a model as the CASA (.model, .constraints) text pair.

    Auxiliary variables are inexpressible in CASA and refused; non-clause
    constraints are flattened to CNF over value symbols.
    """
    if model.aux_vars:
        raise FormatError("CASA cannot express auxiliary variables")
    t = strength if strength is not None else (model.strength_hint or 2)
    sizes = [len(d) for d in model.domains]
    model_text = "{}\n{}\n{}\n".format(len(sizes), t, " ".join(map(str, sizes)))
    offsets = [0] + list(itertools.accumulate(sizes))[:-1]
    lines = []
    clauses = []
    for c in model.constraints:
        clauses.extend(expr_to_clauses(c))
    lines.append(str(len(clauses)))
    for cl in clauses:
        lines.append(str(len(cl)))
        syms = []
        for atom in cl:
            if isinstance(atom, Aux):
                raise FormatError("CASA cannot express auxiliary variables")
            p = model.param_index[atom.param]
            idx = offsets[p] + model.value_index[p][atom.value]
            syms.append(("+ " if isinstance(atom, Eq) else "- ") + str(idx))
        lines.append(" ".join(syms))
    return model_text, "\n".join(lines) + "\n"


# ---------------------------------------------------------------------------
# ACTS / Extended ACTS

_TOKEN_RE = re.compile(r"""
    (?P<ws>\s+)
  | (?P<op>=>|!=|&&|\|\||[()=!])
  | (?P<str>"[^"]*")
  | (?P<word>[A-Za-z_][A-Za-z0-9_]*|-?[0-9]+)
""", re.VERBOSE)


def _tokenize(text: str, where: str):
    toks = []
    pos = 0
    line, col = 1, 1
    while pos < len(text):
        m = _TOKEN_RE.match(text, pos)
        if m is None:
            raise FormatError(f"{where}: line {line} col {col}: "
                              f"bad character {text[pos]!r}")
        kind = m.lastgroup
        val = m.group()
        if kind != "ws":
            toks.append((kind, val, line, col))
        nl = val.count("\n")
        if nl:
            line += nl
            col = len(val) - val.rfind("\n")
        else:
            col += len(val)
        pos = m.end()
    return toks


class _IncompleteExpr(FormatError):
    """Constraint text ended mid-expression; more input may complete it."""


class _ExprParser:
    """Recursive descent over the constraint grammar.

    Precedence, tightest first: ! then && then || then => (right
    associative).  Bare identifiers refer to auxiliary variables; !aux folds
    the polarity into the atom itself.
    """

    def __init__(self, text: str, model_params: dict, aux: set, where: str,
                 check_names: bool = True):
        self.toks = _tokenize(text, where)
        self.i = 0
        self.params = model_params  # name -> set of value names
        self.aux = aux
        self.where = where
        self.check = check_names

    def _peek(self, k=0):
        j = self.i + k
        return self.toks[j] if j < len(self.toks) else None

    def _fail(self, msg, tok=None):
        tok = tok if tok is not None else self._peek()
        if tok is None:
            raise _IncompleteExpr(
                f"{self.where}: unexpected end of constraint: {msg}")
        raise FormatError(f"{self.where}: line {tok[2]} col {tok[3]}: {msg}, "
                          f"found {tok[1]!r}")

    def _eat(self, val=None):
        tok = self._peek()
        if tok is None or (val is not None and tok[1] != val):
            self._fail(f"expected {val!r}" if val else "expected a token")
        self.i += 1
        return tok

    def parse(self) -> ConstraintExpr:
        e = self._implies()
        if self.i != len(self.toks):
            self._fail("trailing input after constraint")
        return e

    def _implies(self):
        lhs = self._or()
        tok = self._peek()
        if tok and tok[1] == "=>":
            self._eat()
            return Implies(lhs, self._implies())
        return lhs

    def _or(self):
        out = [self._and()]
        while (tok := self._peek()) and tok[1] == "||":
            self._eat()
            out.append(self._and())
        return out[0] if len(out) == 1 else Or(tuple(out))

    def _and(self):
        out = [self._not()]
        while (tok := self._peek()) and tok[1] == "&&":
            self._eat()
            out.append(self._not())
        return out[0] if len(out) == 1 else And(tuple(out))

    def _not(self):
        tok = self._peek()
        if tok and tok[1] == "!":
            self._eat()
            nxt = self._peek()
            # "!name" on an auxiliary is an atom with negative polarity;
            # "!(...)" stays a general negation
            if (nxt and nxt[0] == "word" and (nxt[1] in self.aux or not self.check)
                    and not (self._peek(1) and self._peek(1)[1] in ("=", "!="))):
                self._eat()
                return Aux(nxt[1], False)
            return Not(self._not())
        return self._primary()

    def _primary(self):
        tok = self._peek()
        if tok is None:
            self._fail("expected an atom or '('")
        if tok[1] == "(":
            self._eat()
            e = self._implies()
            self._eat(")")
            return e
        if tok[0] != "word":
            self._fail("expected an atom or '('", tok)
        name = self._eat()[1]
        nxt = self._peek()
        if nxt and nxt[1] in ("=", "!="):
            op = self._eat()[1]
            vtok = self._peek()
            if vtok is None or vtok[0] not in ("str", "word"):
                self._fail("expected a value")
            self._eat()
            value = vtok[1][1:-1] if vtok[0] == "str" else vtok[1]
            if self.check and name not in self.params:
                self._fail(f"unknown parameter {name!r}", vtok)
            if self.check and value not in self.params[name]:
                self._fail(f"unknown value {value!r} for parameter {name!r}", vtok)
            return Eq(name, value) if op == "=" else Neq(name, value)
        if name in self.aux or not self.check:
            return Aux(name, True)
        self._fail(f"bare name {name!r} is not a declared auxiliary", tok)


_SECTION_RE = re.compile(r"^\s*\[([A-Za-z]+)\]\s*$")
_PARAM_RE = re.compile(r"^\s*([A-Za-z_][A-Za-z0-9_]*)\s*"
                       r"\(\s*(enum|bool|int)\s*\)\s*(?::\s*(.*?))?\s*$", re.I)
_LABEL_RE = re.compile(r"^\s*([A-Za-z_][A-Za-z0-9_]*)\s*:\s*(.*)$")
_INT_VALUE_RE = re.compile(r"^-?[0-9]+$")


def _parse_param_line(line: str, ln: int, section: str):
    m = _PARAM_RE.match(line)
    if m is None:
        raise FormatError(f"line {ln}: malformed {section} declaration {line.strip()!r}")
    name, ptype, values = m.group(1), m.group(2).lower(), m.group(3)
    if values is None or not values.strip():
        if ptype != "bool":
            raise FormatError(f"line {ln}: {ptype} parameter {name!r} needs values")
        dom = ("0", "1")
    else:
        dom = tuple(v.strip().strip('"') for v in values.split(","))
        if any(not v for v in dom):
            raise FormatError(f"line {ln}: empty value name for {name!r}")
        if ptype == "int" and not all(_INT_VALUE_RE.match(v) for v in dom):
            raise FormatError(f"line {ln}: int parameter {name!r} has "
                              f"non-integer values")
    return name, dom


def parse_extended_acts(text: str, name_hint: str = "acts") -> SutModel:
    """Parse an ACTS document, with the auxiliary-variable section allowed."""
    system_name = name_hint
    params: list[tuple[str, tuple[str, ...]]] = []
    aux: list[str] = []
    raw_constraints: list[tuple[str, int]] = []  # text, first line number
    section = None

    def chunk_incomplete() -> bool:
        if not raw_constraints:
            return False
        ctext, cln = raw_constraints[-1]
        try:
            _ExprParser(ctext, {}, set(), "", check_names=False).parse()
        except _IncompleteExpr:
            return True
        except FormatError:
            pass  # syntactically complete but wrong; reported at the end
        return False

    for ln, line in enumerate(text.splitlines(), 1):
        if not line.strip() or line.lstrip().startswith("--"):
            continue
        m = _SECTION_RE.match(line)
        if m:
            tag = m.group(1).lower()
            if tag not in ("system", "parameter", "auxiliar", "constraint"):
                raise FormatError(f"line {ln}: unknown section [{m.group(1)}]")
            section = tag
            continue
        if section == "system":
            lm = _LABEL_RE.match(line)
            if lm and lm.group(1).lower() == "name":
                system_name = lm.group(2).strip()
            continue
        if section == "parameter":
            params.append(_parse_param_line(line, ln, "parameter"))
        elif section == "auxiliar":
            pname, dom = _parse_param_line(line, ln, "auxiliary")
            if dom != ("0", "1"):
                raise FormatError(f"line {ln}: auxiliary {pname!r} must be bool")
            aux.append(pname)
        elif section == "constraint":
            lm = _LABEL_RE.match(line)
            if lm:
                raw_constraints.append((lm.group(2), ln))
            elif chunk_incomplete():
                # a constraint that ends mid-expression continues on the
                # following lines
                prev_text, prev_ln = raw_constraints[-1]
                raw_constraints[-1] = (prev_text + "\n" + line, prev_ln)
            else:
                raw_constraints.append((line, ln))
        else:
            raise FormatError(f"line {ln}: content before any section tag")
    pmap = {n: set(dom) for n, dom in params}
    aset = set(aux)
    constraints = []
    for ctext, ln in raw_constraints:
        constraints.append(_ExprParser(ctext, pmap, aset,
                                       f"constraint at line {ln}").parse())
    model = SutModel(system_name, tuple(params), tuple(aux), tuple(constraints))
    model.validate()
    return model


def parse_acts(text: str, name_hint: str = "acts") -> SutModel:
    """Parse a plain ACTS document; the auxiliary section is rejected."""
    if re.search(r"^\s*\[[Aa]uxiliar\]\s*$", text, re.M):
        raise FormatError("plain ACTS cannot express auxiliary variables "
                          "(parse as extended ACTS instead)")
    return parse_extended_acts(text, name_hint)


_PREC = {Implies: 1, Or: 2, And: 3, Not: 4}


def format_expr(e: ConstraintExpr, ctx: int = 0) -> str:
    if isinstance(e, Eq):
        return f'{e.param} = "{e.value}"'
    if isinstance(e, Neq):
        return f'{e.param} != "{e.value}"'
    if isinstance(e, Aux):
        return e.name if e.positive else f"!{e.name}"
    if isinstance(e, Not):
        return f"!({format_expr(e.child, 0)})"
    if isinstance(e, Implies):
        s = f"{format_expr(e.lhs, 2)} => {format_expr(e.rhs, 1)}"
    elif isinstance(e, Or):
        s = " || ".join(format_expr(c, 3) for c in e.children)
    else:
        s = " && ".join(format_expr(c, 4) for c in e.children)
    return f"({s})" if _PREC[type(e)] < ctx else s


def _param_type(dom: tuple[str, ...]) -> str:
    if dom == ("0", "1"):
        return "bool"
    if all(_INT_VALUE_RE.match(v) for v in dom):
        return "int"
    return "enum"


def _check_writable_values(name: str, dom) -> None:
    for v in dom:
        if re.search(r'[,"\s]', v):
            raise FormatError(f"value {v!r} of {name!r} cannot appear in an "
                              f"ACTS value list")


def write_extended_acts(model: SutModel) -> str:
    model.validate()
    out = ["[System]", f"Name: {model.name}", "[Parameter]"]
    for name, dom in model.parameters:
        _check_writable_values(name, dom)
        ptype = _param_type(dom)
        if ptype == "bool":
            out.append(f"{name} (bool)")
        else:
            out.append(f"{name} ({ptype}) : {','.join(dom)}")
    if model.aux_vars:
        out.append("[Auxiliar]")
        for name in model.aux_vars:
            out.append(f"{name} (bool)")
    if model.constraints:
        out.append("[Constraint]")
        for c in model.constraints:
            out.append(format_expr(c))
    return "\n".join(out) + "\n"


def write_acts(model: SutModel) -> str:
    if model.aux_vars:
        raise FormatError("plain ACTS cannot express auxiliary variables")
    return write_extended_acts(model)


# ---------------------------------------------------------------------------
# Test suite CSV


def write_test_suite(suite: TestSuite, model: SutModel) -> str:
    if len(model.param_names) == 0:
        raise FormatError("cannot serialize a suite for a model with no parameters")
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(model.param_names)
    for i, test in enumerate(suite.tests):
        if len(test.cells) != model.n_params:
            raise FormatError(f"test {i} has {len(test.cells)} cells, "
                              f"model has {model.n_params} parameters")
        if not test.is_final():
            raise FormatError(f"test {i} still contains empty cells")
        w.writerow([model.domains[p][v] for p, v in enumerate(test.cells)])
    return buf.getvalue()


def read_test_suite(text: str, model: SutModel,
                    strength: int = 0, algorithm: str = "file") -> TestSuite:
    rows = list(csv.reader(io.StringIO(text)))
    rows = [r for r in rows if r]
    if not rows:
        raise FormatError("empty suite file")
    if tuple(rows[0]) != model.param_names:
        raise FormatError(f"suite header {rows[0]!r} does not match "
                          f"model parameters {list(model.param_names)!r}")
    tests = []
    for ln, row in enumerate(rows[1:], 2):
        if len(row) != model.n_params:
            raise FormatError(f"row {ln}: expected {model.n_params} values")
        cells = []
        for p, vname in enumerate(row):
            vi = model.value_index[p].get(vname)
            if vi is None:
                raise FormatError(f"row {ln}: unknown value {vname!r} for "
                                  f"parameter {model.param_names[p]!r}")
            cells.append(vi)
        tests.append(TestCase(tuple(cells)))
    meta = SuiteMeta(strength=strength, algorithm=algorithm,
                     model_fingerprint=model.fingerprint)
    return TestSuite(tuple(tests), meta)
