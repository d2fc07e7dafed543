"""Shared test utilities: small instance generators and slow-but-simple oracles."""

import itertools

import numpy as np

from ctforge.model import (
    And,
    Aux,
    Eq,
    Implies,
    ModelUnsatisfiable,
    Neq,
    Not,
    Or,
    SutModel,
    compile_model,
    evaluate,
)


def random_3cnf(rng, n_vars, n_clauses):
    """Random 3-CNF as a list of int tuples; no repeated variable per clause."""
    clauses = []
    for _ in range(n_clauses):
        vs = rng.sample(range(1, n_vars + 1), 3)
        clauses.append(tuple(v if rng.random() < 0.5 else -v for v in vs))
    return clauses


def pigeonhole_cnf(pigeons, holes):
    """PHP(p, h): unsatisfiable whenever p > h, and hard for clause learning."""

    def var(i, j):
        return i * holes + j + 1

    clauses = [tuple(var(i, j) for j in range(holes)) for i in range(pigeons)]
    for j in range(holes):
        for i1 in range(pigeons):
            for i2 in range(i1 + 1, pigeons):
                clauses.append((-var(i1, j), -var(i2, j)))
    return pigeons * holes, clauses


def enumerate_models(n_vars, clauses):
    """Boolean mask over all 2**n_vars assignments (var v true iff bit v-1 set).

    Full enumeration, so callers must keep n_vars small (<= ~20).
    """
    idx = np.arange(1 << n_vars, dtype=np.uint32)
    ok = np.ones(1 << n_vars, dtype=bool)
    for cl in clauses:
        sat = np.zeros(1 << n_vars, dtype=bool)
        for lit in cl:
            bit = (idx >> (abs(lit) - 1)) & 1
            sat |= (bit == 1) if lit > 0 else (bit == 0)
        ok &= sat
    return ok


def brute_force_sat(n_vars, clauses, assumps=()):
    """Satisfiability by enumeration, optionally under assumption literals."""
    ok = enumerate_models(n_vars, clauses)
    idx = np.arange(1 << n_vars, dtype=np.uint32)
    for lit in assumps:
        bit = (idx >> (abs(lit) - 1)) & 1
        ok &= (bit == 1) if lit > 0 else (bit == 0)
    return bool(ok.any())


def model_satisfies(clauses, model):
    return all(any(model[abs(l)] == (l > 0) for l in cl) for cl in clauses)


def naive_propagate(clauses, assumps=()):
    """Unit-propagation fixpoint done the obvious quadratic way.

    Returns (conflict, lits).  The lit set is order-independent, and so is
    the conflict flag, so this is a fair oracle for the engine's propagate.
    """
    assign = {}
    conflict = False

    def set_lit(lit):
        nonlocal conflict
        v = abs(lit)
        if v in assign:
            if assign[v] != (lit > 0):
                conflict = True
            return
        assign[v] = lit > 0

    for lit in assumps:
        set_lit(lit)
    changed = True
    while changed and not conflict:
        changed = False
        for cl in clauses:
            unassigned = []
            satisfied = False
            for lit in cl:
                v = abs(lit)
                if v not in assign:
                    unassigned.append(lit)
                elif assign[v] == (lit > 0):
                    satisfied = True
                    break
            if satisfied:
                continue
            if not unassigned:
                conflict = True
                break
            if len(unassigned) == 1:
                set_lit(unassigned[0])
                if conflict:
                    break
                changed = True
    if conflict:
        return True, set()
    return False, {v if val else -v for v, val in assign.items()}


def example1_model():
    """The four-parameter web-service fixture used across the test suite."""
    params = (
        ("OS", ("L", "W", "M", "i", "A")),
        ("Pl", ("F", "S", "C", "A")),
        ("Re", ("K", "F", "H", "W")),
        ("Or", ("P", "L")),
    )
    constraints = (
        Implies(Or((Eq("OS", "L"), Eq("OS", "W"), Eq("OS", "M"))),
                And((Eq("Or", "L"), Neq("Pl", "A")))),
        Implies(Eq("Pl", "S"), Or((Eq("OS", "M"), Eq("OS", "i")))),
        Implies(Or((Eq("OS", "i"), Eq("OS", "A"))), Neq("Re", "K")),
    )
    return SutModel("MySUT", params, (), constraints)


def ast_accepted_assignments(model):
    """Value-index tuples of every accepted full parameter assignment.

    Constraints are evaluated on the AST, auxiliaries existentially by
    enumeration, so this is independent of the SAT path end to end.
    """
    out = []
    names = model.param_names
    for combo in itertools.product(*(range(len(d)) for d in model.domains)):
        values = {names[i]: model.domains[i][combo[i]] for i in range(len(names))}
        for bits in itertools.product((False, True), repeat=len(model.aux_vars)):
            aux = dict(zip(model.aux_vars, bits))
            if all(evaluate(c, values, aux) for c in model.constraints):
                out.append(combo)
                break
    return out


def ast_allowed_tuples(model, t):
    allowed = set()
    for combo in ast_accepted_assignments(model):
        for comb in itertools.combinations(range(len(combo)), t):
            allowed.add(tuple((p, combo[p]) for p in comb))
    return allowed


def assert_valid_mcac(model, suite, t):
    """Full-enumeration validity check: every test accepted, every allowed
    t-tuple covered."""
    accepted = set(ast_accepted_assignments(model))
    for test in suite.tests:
        assert test.is_final()
        assert tuple(test.cells) in accepted, test.cells
    for tup in ast_allowed_tuples(model, t):
        assert any(test.covers(tup) for test in suite.tests), tup


def random_expr(rng, params, aux_names, depth):
    if depth == 0 or rng.random() < 0.4:
        if aux_names and rng.random() < 0.3:
            return Aux(rng.choice(aux_names), rng.random() < 0.5)
        name, dom = rng.choice(params)
        cls = Eq if rng.random() < 0.6 else Neq
        return cls(name, rng.choice(dom))
    kind = rng.randrange(4)
    if kind == 0:
        return Not(random_expr(rng, params, aux_names, depth - 1))
    if kind == 1:
        return Implies(random_expr(rng, params, aux_names, depth - 1),
                       random_expr(rng, params, aux_names, depth - 1))
    children = tuple(random_expr(rng, params, aux_names, depth - 1)
                     for _ in range(rng.randint(2, 3)))
    return And(children) if kind == 2 else Or(children)


def random_sut(rng, n_params=None, max_domain=4, max_constraints=5, n_aux=0,
               name="rnd"):
    n = n_params if n_params is not None else rng.randint(2, 6)
    params = []
    for i in range(n):
        g = rng.randint(2, max_domain)
        params.append((f"P{i}", tuple(f"v{j}" for j in range(g))))
    aux = tuple(f"a{i + 1}" for i in range(n_aux))
    cons = tuple(random_expr(rng, params, list(aux), 2)
                 for _ in range(rng.randint(0, max_constraints)))
    return SutModel(name, tuple(params), aux, cons)


def random_satisfiable_sut(rng, **kw):
    while True:
        m = random_sut(rng, **kw)
        try:
            return m, compile_model(m)
        except ModelUnsatisfiable:
            continue
