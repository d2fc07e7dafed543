"""In-parameter-order builder tests.

Small instances are checked exhaustively against the AST oracles in
helpers.py: every emitted test must be an accepted assignment and every
allowed t-tuple must be covered by some row.
"""

import random

import pytest

from ctforge.engine import SolverConfig
from ctforge.ipog import _Checker, build_ipog, choose_best_value
from ctforge.model import (
    EMPTY,
    Eq,
    Implies,
    ModelUnsatisfiable,
    StrengthOutOfRange,
    SutModel,
    compile_model,
)

from helpers import (
    assert_valid_mcac,
    ast_accepted_assignments,
    ast_allowed_tuples,
    example1_model,
    random_satisfiable_sut,
)


def three_booleans(constraints=()):
    params = (("A", ("0", "1")), ("B", ("0", "1")), ("C", ("0", "1")))
    return SutModel("bools", params, (), tuple(constraints))


def checker_for(model):
    enc = compile_model(model)
    return _Checker(enc, enc.new_solver(SolverConfig(seed=0)))


def test_strength_bounds_rejected():
    m = example1_model()
    with pytest.raises(StrengthOutOfRange):
        build_ipog(m, 1)
    with pytest.raises(StrengthOutOfRange):
        build_ipog(m, 5)


def test_unsatisfiable_model_rejected():
    m = three_booleans([Eq("A", "0"), Eq("A", "1")])
    with pytest.raises(ModelUnsatisfiable):
        build_ipog(m, 2)


def test_unconstrained_pair_is_exhaustive():
    # two parameters at strength two: the suite is exactly the product
    params = (("P", ("a", "b", "c", "d", "e")), ("Q", ("w", "x", "y", "z")))
    m = SutModel("grid", params, (), ())
    suite = build_ipog(m, 2)
    cells = [t.cells for t in suite.tests]
    assert len(cells) == 20
    assert sorted(cells) == [(p, q) for p in range(5) for q in range(4)]
    assert_valid_mcac(m, suite, 2)


def test_three_booleans_pairwise_exact():
    # tie-breaking is lowest value index, so the whole run is forced
    suite = build_ipog(three_booleans(), 2)
    assert [t.cells for t in suite.tests] == [
        (0, 0, 0), (0, 1, 1), (1, 0, 1), (1, 1, 0)]
    assert 4 <= len(suite.tests) <= 8
    assert_valid_mcac(three_booleans(), suite, 2)
    assert suite.meta.stats["initial_tests"] == 4
    assert suite.meta.stats["vertical_tests"] == 0


def test_example1_pairwise():
    m = example1_model()
    suite = build_ipog(m, 2)
    assert_valid_mcac(m, suite, 2)
    # no pairwise MCAC for this model is smaller than 21
    assert 21 <= len(suite.tests) <= 30
    first_two = {tup for tup in ast_allowed_tuples(m, 2)
                 if {p for p, _ in tup} == {0, 1}}
    assert suite.meta.stats["initial_tests"] == len(first_two) == 14
    assert len(suite.tests) >= suite.meta.stats["initial_tests"]


def test_example1_triples():
    m = example1_model()
    suite = build_ipog(m, 3)
    assert_valid_mcac(m, suite, 3)
    assert len(suite.tests) >= suite.meta.stats["initial_tests"]


def test_full_strength_equals_accepted_census():
    # t == n degenerates to enumerating the 70 accepted assignments
    m = example1_model()
    suite = build_ipog(m, 4)
    cells = [t.cells for t in suite.tests]
    assert len(cells) == len(set(cells)) == 70
    assert set(cells) == set(ast_accepted_assignments(m))
    assert_valid_mcac(m, suite, 4)


def test_meta_fields():
    m = example1_model()
    suite = build_ipog(m, 2, seed=9)
    meta = suite.meta
    assert meta.strength == 2
    assert meta.algorithm == "ipog"
    assert meta.seed == 9
    assert meta.model_fingerprint == m.fingerprint
    assert meta.wall_time_s >= 0
    assert meta.stats["sat_calls"] > 0


def test_choose_best_value_tie_takes_lowest_index():
    ck = checker_for(three_booleans())
    pool = [{((0, 0),): True}, {((0, 0),): True}]
    assert choose_best_value([0, EMPTY, EMPTY], 2, pool, ck) == 0
    # an explicit order overrides the default ascending one
    assert choose_best_value([0, EMPTY, EMPTY], 2, pool, ck,
                             value_order=[1, 0]) == 1


def test_choose_best_value_zero_coverage_is_empty():
    ck = checker_for(three_booleans())
    pool = [{((0, 1),): True}, {}]
    assert choose_best_value([0, EMPTY, EMPTY], 2, pool, ck) is EMPTY


def test_choose_best_value_skips_inconsistent_winner():
    # C=1 clashes with A=0, so the coverage winner is vetoed by SAT
    m = three_booleans([Implies(Eq("A", "0"), Eq("C", "0"))])
    ck = checker_for(m)
    pool = [{((0, 0),): True},
            {((0, 0),): True, ((1, 0),): True}]
    assert choose_best_value([0, 0, EMPTY], 2, pool, ck) == 0


def test_same_seed_same_suite():
    rng = random.Random(42)
    for _ in range(5):
        m, _enc = random_satisfiable_sut(rng, max_domain=3)
        a = build_ipog(m, 2, seed=3)
        b = build_ipog(m, 2, seed=3)
        assert [t.cells for t in a.tests] == [t.cells for t in b.tests]
        assert a.meta.stats == b.meta.stats


def test_random_models_cover_everything():
    rng = random.Random(7)
    for _ in range(20):
        m, _enc = random_satisfiable_sut(
            rng, n_params=rng.randint(2, 5), max_domain=3,
            max_constraints=3, n_aux=rng.randint(0, 1))
        for t in (2, 3):
            if t > m.n_params:
                continue
            suite = build_ipog(m, t, seed=1)
            assert_valid_mcac(m, suite, t)
            assert len(suite.tests) >= suite.meta.stats["initial_tests"]


def test_randomized_ties_still_valid():
    rng = random.Random(13)
    for seed in range(4):
        m, _enc = random_satisfiable_sut(rng, n_params=4, max_domain=3)
        suite = build_ipog(m, 2, seed=seed, randomize_ties=True)
        assert_valid_mcac(m, suite, 2)
