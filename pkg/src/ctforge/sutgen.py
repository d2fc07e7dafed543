"""Benchmark-model generator: carve a hardness-calibrated subproblem out of
a CNF instance and package it as a Boolean-parameter SUT.

The driver keeps a set of assumption literals A over one incremental solver.
Assuming more literals makes the instance easier, dropping them makes it
harder; the loop walks A until the average conflict count over a handful of
seeded solver runs lands inside [c_min, c_max], then freezes the unit-
propagation closure of A into the formula and renames what survives.
"""

from __future__ import annotations

import logging
import math
import random
from dataclasses import dataclass, field

from ctforge.engine import CnfFormula, SatSolver, SolveStatus, SolverConfig
from ctforge.model import Aux, Eq, Or, SutModel

log = logging.getLogger("ctforge.sutgen")

# solver randomization used while measuring hardness
_RND_FREQ = 0.5


@dataclass(frozen=True)
class GenConfig:
    n: int
    c_min: float
    c_max: float
    delta_a: int = 10
    nabla_a: int = 5
    seeds: tuple[int, ...] = (1, 2, 3, 4, 5)
    max_tries: int = 100
    query_budget: int = 10_000_000
    gen_seed: int = 0
    wall_limit_s: float | None = None

    def __post_init__(self):
        object.__setattr__(self, "seeds", tuple(self.seeds))
        if self.n < 1:
            raise ValueError("n must be at least 1")
        if not 0 <= self.c_min < self.c_max:
            raise ValueError("need 0 <= c_min < c_max")
        if self.delta_a < 1 or self.nabla_a < 1:
            raise ValueError("assumption step sizes must be at least 1")
        if not self.seeds:
            raise ValueError("at least one solver seed is required")
        if self.max_tries < 1:
            raise ValueError("max_tries must be at least 1")
        if self.query_budget < 1:
            raise ValueError("query_budget must be at least 1")
        if self.wall_limit_s is not None and self.wall_limit_s <= 0:
            raise ValueError("wall_limit_s must be positive")


@dataclass(frozen=True)
class FindResult:
    ok: bool
    reason: str = ""
    fixed: tuple[int, ...] = ()
    assumptions: tuple[int, ...] = ()
    measured_c: float = 0.0
    tries: int = 0


@dataclass(frozen=True)
class GenResult:
    model: SutModel
    provenance: dict = field(default_factory=dict)


def solve_subproblem(engine: SatSolver, assumps, seeds, rng=None,
                     conflict_budget: int | None = None):
    """Measure the subproblem defined by the assumptions.

    Runs one solve per seed; returns (model literals, mean conflict count).
    Any unsatisfiable or budgeted-out run short-circuits with an empty model
    and an infinite cost.
    """
    rng = rng if rng is not None else random.Random(0)
    models = []
    total = 0
    for seed in seeds:
        engine.set_seed(seed)
        out = engine.solve(assumps, conflict_budget=conflict_budget)
        if out.status is not SolveStatus.SAT:
            return (), math.inf
        models.append(tuple(v if out.model[v] else -v
                            for v in sorted(out.model)))
        total += out.n_conflicts
    return rng.choice(models), total / len(seeds)


def find_satisfiable_subproblem(cnf: CnfFormula, cfg: GenConfig, rng=None,
                                engine: SatSolver | None = None,
                                core_module=None) -> FindResult:
    """Walk the assumption set until the instance hardness is in range.

    Success carries the unit-propagation closure of the final assumptions;
    those literals, fixed as units, reproduce the calibrated subproblem.
    """
    rng = rng if rng is not None else random.Random(cfg.gen_seed)
    if engine is None:
        engine = SatSolver(cnf.n_vars,
                           SolverConfig(seed=cfg.seeds[0],
                                        rnd_decision_freq=_RND_FREQ,
                                        rnd_polarity_freq=_RND_FREQ,
                                        wall_limit_s=cfg.wall_limit_s),
                           core_module=core_module)
        engine.add_formula(cnf)
    n_vars = engine.n_vars

    def unfixed(assumps) -> int:
        prop = engine.propagate(assumps)
        if prop.conflict:
            return 0
        return n_vars - len(prop.lits)

    assumps: list[int] = []
    model, c = solve_subproblem(engine, assumps, cfg.seeds, rng,
                                cfg.query_budget)
    if not model:
        return FindResult(False, "unsatisfiable (or out of budget)")
    if unfixed(assumps) < cfg.n:
        return FindResult(False, "not enough unfixed variables")
    if c < cfg.c_min:
        return FindResult(False, "instance below the conflict floor")

    tries = 1
    while tries < cfg.max_tries:
        if unfixed(assumps) < cfg.n or c < cfg.c_min:
            if not assumps:
                return FindResult(False, "cannot harden further: no "
                                  "assumptions left to remove", tries=tries)
            drop = set(rng.sample(assumps, min(cfg.nabla_a, len(assumps))))
            assumps = [l for l in assumps if l not in drop]
        elif c > cfg.c_max:
            have = set(assumps)
            pool = [l for l in model if l not in have]
            assumps = assumps + rng.sample(pool, min(cfg.delta_a, len(pool)))
        else:
            prop = engine.propagate(assumps)
            if prop.conflict:
                return FindResult(False, "assumption propagation conflict",
                                  tries=tries)
            return FindResult(True, fixed=tuple(prop.lits),
                              assumptions=tuple(assumps), measured_c=c,
                              tries=tries)
        if unfixed(assumps) >= cfg.n:
            new_model, new_c = solve_subproblem(engine, assumps, cfg.seeds,
                                                rng, cfg.query_budget)
            tries += 1
            # a budgeted-out re-measure keeps the previous model (the
            # assumptions are a subset of it) and reads as too hard
            if new_model:
                model = new_model
            c = new_c
    return FindResult(False, "try limit reached", tries=tries)


def simplify(cnf: CnfFormula, fixed, core_module=None):
    """Fix the given literals as units and reduce the formula.

    Satisfied clauses are dropped, falsified literals deleted, and the
    surviving variables densely renamed to 1..n' preserving relative order.
    Returns (reduced formula, old-var -> new-var map).
    """
    solver = SatSolver(cnf.n_vars, core_module=core_module)
    solver.add_formula(cnf)
    prop = solver.propagate(fixed)
    if prop.conflict:
        raise ValueError("fixed literals contradict the formula")
    value = {abs(l): l > 0 for l in prop.lits}
    survivors = []
    for cl in cnf.clauses:
        sat = False
        reduced = []
        for lit in cl:
            v = value.get(abs(lit))
            if v is None:
                reduced.append(lit)
            elif (lit > 0) == v:
                sat = True
                break
        if not sat:
            survivors.append(tuple(reduced))
    old_vars = sorted({abs(l) for cl in survivors for l in cl})
    rename = {old: new for new, old in enumerate(old_vars, 1)}
    clauses = [tuple((1 if l > 0 else -1) * rename[abs(l)] for l in cl)
               for cl in survivors]
    return CnfFormula(len(old_vars), clauses), rename


def generate(cnf: CnfFormula, cfg: GenConfig, source: str = "cnf",
             core_module=None) -> GenResult | None:
    """Run the full generation pipeline; None means a reported failure."""
    rng = random.Random(cfg.gen_seed)
    found = find_satisfiable_subproblem(cnf, cfg, rng, core_module=core_module)
    if not found.ok:
        log.info("generation failed: %s", found.reason)
        return None
    phi, rename = simplify(cnf, found.fixed, core_module=core_module)
    if phi.n_vars < cfg.n:
        log.info("generation failed: only %d variables survived "
                 "simplification, need %d", phi.n_vars, cfg.n)
        return None
    param_vars = rng.sample(range(1, phi.n_vars + 1), cfg.n)
    name_of = {}
    for i, v in enumerate(param_vars):
        name_of[v] = f"p{i + 1}"
    aux_vars = [v for v in range(1, phi.n_vars + 1) if v not in name_of]
    for i, v in enumerate(aux_vars):
        name_of[v] = f"a{i + 1}"
    is_param = set(param_vars)

    def atom(lit):
        v = abs(lit)
        if v in is_param:
            return Eq(name_of[v], "1" if lit > 0 else "0")
        return Aux(name_of[v], lit > 0)

    constraints = []
    for cl in phi.clauses:
        atoms = tuple(atom(l) for l in cl)
        constraints.append(atoms[0] if len(atoms) == 1 else Or(atoms))
    params = tuple((f"p{i + 1}", ("0", "1")) for i in range(cfg.n))
    aux = tuple(f"a{i + 1}" for i in range(len(aux_vars)))
    model = SutModel(source, params, aux, tuple(constraints))
    model.validate()
    role = {old: (new, name_of[new]) for old, new in rename.items()}
    provenance = {
        "source": source,
        "n": cfg.n,
        "c_min": cfg.c_min,
        "c_max": cfg.c_max,
        "measured_c": found.measured_c,
        "seeds": cfg.seeds,
        "gen_seed": cfg.gen_seed,
        "tries_used": found.tries,
        "assumptions_final": len(found.assumptions),
        "rename": role,
    }
    return GenResult(model, provenance)


_SIDECAR_KEYS = ("source", "n", "c_min", "c_max", "measured_c", "seeds",
                 "gen_seed", "tries_used", "assumptions_final")


def write_provenance(result: GenResult) -> str:
    lines = []
    for key in _SIDECAR_KEYS:
        value = result.provenance[key]
        if key == "seeds":
            value = ",".join(str(s) for s in value)
        lines.append(f"{key}={value}")
    return "\n".join(lines) + "\n"
