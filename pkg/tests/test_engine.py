import random

import pytest

import ctforge._satcore as _installed_core
from ctforge.engine import (
    CnfFormula,
    SatSolver,
    SolveStatus,
    SolverConfig,
    load_pure_core,
)
from helpers import (
    brute_force_sat,
    model_satisfies,
    naive_propagate,
    pigeonhole_cnf,
    random_3cnf,
)


@pytest.fixture(params=["installed", "pure"])
def core_mod(request):
    if request.param == "installed":
        return _installed_core
    return load_pure_core()


def make_solver(core_mod, clauses, n_vars=0, **cfg):
    s = SatSolver(n_vars, config=SolverConfig(**cfg), core_module=core_mod)
    for cl in clauses:
        s.add_clause(cl)
    return s


def test_empty_formula_is_sat(core_mod):
    out = SatSolver(core_module=core_mod).solve()
    assert out.status is SolveStatus.SAT
    assert out.model == {}
    assert bool(out)


def test_units_and_root_contradiction(core_mod):
    s = make_solver(core_mod, [[1], [-1, 2]])
    out = s.solve()
    assert out.status is SolveStatus.SAT
    assert out.model[1] and out.model[2]
    s.add_clause([-2])
    out = s.solve()
    assert out.status is SolveStatus.UNSAT
    assert out.core is None  # no assumptions involved
    # the refutation is permanent
    assert s.solve([3]).status is SolveStatus.UNSAT


def test_clause_cleanup_rules(core_mod):
    s = make_solver(core_mod, [[1, 1, 2], [1, -1], [2, 3]])  # dup merge, tautology drop
    assert s.solve().status is SolveStatus.SAT
    with pytest.raises(ValueError):
        s.add_clause([0])
    with pytest.raises(ValueError):
        s.add_clause([True])
    with pytest.raises(ValueError):
        s.solve([1, 0])


def test_contradictory_assumptions_core(core_mod):
    s = make_solver(core_mod, [[1, 2]])
    out = s.solve([3, -3])
    assert out.status is SolveStatus.UNSAT
    assert sorted(out.core) == [-3, 3]


def test_assumption_cores_verify(core_mod):
    rng = random.Random(11)
    checked = 0
    for _ in range(40):
        n = rng.randint(6, 12)
        clauses = random_3cnf(rng, n, int(4.2 * n))
        s = make_solver(core_mod, clauses, n_vars=n)
        for _ in range(4):
            assumps = [rng.choice([v, -v]) for v in rng.sample(range(1, n + 1), 3)]
            out = s.solve(assumps)
            assert (out.status is SolveStatus.SAT) == brute_force_sat(n, clauses, assumps)
            if out.status is SolveStatus.UNSAT:
                assert set(out.core) <= set(assumps)
                # the reported core must itself refute the formula
                assert not brute_force_sat(n, clauses, out.core)
                checked += 1
            else:
                assert model_satisfies(clauses, out.model)
                for a in assumps:
                    assert out.model[abs(a)] == (a > 0)
    assert checked >= 5


def test_random_agreement_with_enumeration(core_mod):
    rng = random.Random(7)
    for trial in range(60):
        n = rng.randint(5, 13)
        ratio = rng.choice([2.0, 3.0, 4.2, 6.0])
        clauses = random_3cnf(rng, n, int(ratio * n))
        s = make_solver(core_mod, clauses, n_vars=n, seed=trial,
                        rnd_decision_freq=0.1, rnd_polarity_freq=0.1)
        out = s.solve()
        assert (out.status is SolveStatus.SAT) == brute_force_sat(n, clauses)
        if out.model is not None:
            assert model_satisfies(clauses, out.model)


def test_propagate_matches_naive_fixpoint(core_mod):
    rng = random.Random(23)
    for _ in range(80):
        n = rng.randint(4, 10)
        clauses = random_3cnf(rng, n, int(3.5 * n))
        # sprinkle units so the root trail is interesting
        for v in rng.sample(range(1, n + 1), rng.randint(0, 2)):
            clauses.append((rng.choice([v, -v]),))
        assumps = [rng.choice([v, -v]) for v in rng.sample(range(1, n + 1), rng.randint(0, 3))]
        s = make_solver(core_mod, clauses, n_vars=n)
        got = s.propagate(assumps)
        want_conflict, want_lits = naive_propagate(clauses, assumps)
        assert got.conflict == want_conflict
        if not want_conflict:
            assert set(got.lits) == want_lits
    # and the database is untouched: solving still works afterwards
    s = make_solver(core_mod, [[1, 2], [-1, 2]])
    s.propagate([-2])
    assert s.solve().status is SolveStatus.SAT


def test_budget_exhaustion_then_exact(core_mod):
    # four binary clauses force: level-1 conflict, learned unit, root conflict
    clauses = [[1, 2], [1, -2], [-1, 2], [-1, -2]]
    s = make_solver(core_mod, clauses)
    out = s.solve(conflict_budget=1)
    assert out.status is SolveStatus.BUDGET_EXHAUSTED
    assert out.n_conflicts == 1
    out = s.solve()
    assert out.status is SolveStatus.UNSAT


def test_root_refutation_beats_budget(core_mod):
    # same formula, but budget 2 is met exactly on the root conflict, which
    # must still report UNSAT (the refutation is decisive, not a timeout)
    clauses = [[1, 2], [1, -2], [-1, 2], [-1, -2]]
    s = make_solver(core_mod, clauses)
    out = s.solve(conflict_budget=2)
    assert out.status is SolveStatus.UNSAT
    assert s.solve().status is SolveStatus.UNSAT


def test_false_assumption_counts_against_budget(core_mod):
    # with budget 1 a query refuted by its own assumptions is still reported
    # as a budget stop: refutation events are counted before analysis
    s = make_solver(core_mod, [[1], [-1, -2]])
    out = s.solve([2], conflict_budget=1)
    assert out.status is SolveStatus.BUDGET_EXHAUSTED
    out = s.solve([2], conflict_budget=2)
    assert out.status is SolveStatus.UNSAT
    assert out.core == [2]
    out = s.solve([2])
    assert out.status is SolveStatus.UNSAT


def test_pigeonhole_budget_and_exact(core_mod):
    n, clauses = pigeonhole_cnf(6, 5)
    s = make_solver(core_mod, clauses, n_vars=n)
    out = s.solve(conflict_budget=10)
    assert out.status is SolveStatus.BUDGET_EXHAUSTED
    assert out.n_conflicts == 10
    out = s.solve()
    assert out.status is SolveStatus.UNSAT
    assert out.n_conflicts > 10


def test_wall_limit_stops_search(core_mod):
    n, clauses = pigeonhole_cnf(8, 7)
    s = make_solver(core_mod, clauses, n_vars=n)
    out = s.solve(wall_limit_s=0.001)
    assert out.status is SolveStatus.BUDGET_EXHAUSTED


def test_seed_determinism(core_mod):
    def run(seed):
        rng = random.Random(99)
        clauses = random_3cnf(rng, 30, 126)
        s = make_solver(core_mod, clauses, n_vars=30, seed=seed,
                        rnd_decision_freq=0.2, rnd_polarity_freq=0.2)
        trace = []
        for _ in range(6):
            assumps = [rng.choice([v, -v]) for v in rng.sample(range(1, 31), 3)]
            o = s.solve(assumps)
            trace.append((o.status.name, o.n_conflicts,
                          None if o.model is None else tuple(sorted(o.model.items())),
                          None if o.core is None else tuple(o.core)))
        return trace

    assert run(5) == run(5)


def test_add_formula_and_stats(core_mod):
    cnf = CnfFormula(4, [(1, 2), (-1, 3), (-3, -2, 4)])
    cnf.validate()
    s = SatSolver(core_module=core_mod)
    s.add_formula(cnf)
    assert s.n_vars == 4
    assert s.solve().status is SolveStatus.SAT
    st = s.stats()
    assert st["propagations"] >= 0 and st["conflicts_total"] >= 0
    assert st["clauses"] == 3
    with pytest.raises(ValueError):
        CnfFormula(2, [(1, 3)]).validate()


def test_backends_agree():
    pure = load_pure_core()
    if pure is _installed_core:
        pytest.skip("compiled backend not built")

    def run(mod):
        rng = random.Random(3)
        out = []
        for seed in range(4):
            n = 40
            clauses = random_3cnf(rng, n, 170)
            s = make_solver(mod, clauses, n_vars=n, seed=seed,
                            rnd_decision_freq=0.15, rnd_polarity_freq=0.15)
            o = s.solve()
            out.append((o.status.name, o.n_conflicts,
                        None if o.model is None else tuple(sorted(o.model.items()))))
            for _ in range(4):
                assumps = [rng.choice([v, -v]) for v in rng.sample(range(1, n + 1), 5)]
                o2 = s.solve(assumps, conflict_budget=50)
                out.append((o2.status.name, o2.n_conflicts,
                            None if o2.core is None else tuple(o2.core)))
        return out

    assert run(_installed_core) == run(pure)
