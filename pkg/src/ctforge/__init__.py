"""ctforge: constrained covering arrays end to end.

SAT-backed toolkit covering the full pipeline: an incremental CDCL engine,
mixed-domain SUT models with constraints compiled to CNF, ACTS/Extended-ACTS/
CASA/DIMACS formats, a benchmark-instance generator that carves satisfiable
subproblems of a target hardness out of CNF formulas, IPOG and one-test-at-
a-time covering-array builders, and an independent verifier.
"""

__version__ = "0.1.0"
