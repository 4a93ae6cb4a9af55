"""Static symmetry breaking preprocessor for CNF-SAT.

Detects structured symmetry groups (row, row-column, Johnson) on a
formula's model graph, verifies every candidate symmetry against the
formula, and emits lex-leader and binary breaking clauses that preserve
satisfiability.
"""

from .cnf import Formula, parse_dimacs, emit_dimacs
from .pipeline import BreakerOutput, PipelineConfig, run

__all__ = [
    "Formula",
    "parse_dimacs",
    "emit_dimacs",
    "BreakerOutput",
    "PipelineConfig",
    "run",
]

__version__ = "0.1.0"
