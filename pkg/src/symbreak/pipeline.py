"""End-to-end symmetry breaking pipeline.

Three steps: build the model graph and its stable coloring; detect
structures orbit by orbit (Johnson first, then row-column, then row, each
over the unmarked classes largest-first); freeze what was found in the
remainder coloring, search it for leftover symmetry, and assemble the
breaking clauses under one global variable order.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field

import numpy as np

from .breaking import (BreakingClauses, binary_clause_heuristic, build_order,
                       lex_leader_encode, structure_generators)
from .cnf import Formula
from .detectors import (DetectionFailure, detect_johnson, detect_row_blocks,
                        detect_row_column, stabilizer_recursion)
from .modelgraph import build_model_graph
from .refine import (Coloring, RefinementReport, initial_coloring,
                     refine_stable)
from .remainder import SearchBudget, find_remainder_generators


@dataclass
class PipelineConfig:
    johnson: bool = True
    row_column: bool = True
    row: bool = True
    binary: bool = True
    remainder: bool = True
    max_len: int = 64
    dive_pairs: int = 32
    seed: int = 0
    verify_level: str = "structures"   # or "all-emitted"


@dataclass
class BreakerOutput:
    formula: Formula
    added_clauses: list
    aux_count: int
    structures: list
    remainder_generators: list
    binary_clauses: int
    stats: dict = field(default_factory=dict)


def negation_class_of(base: RefinementReport, sigma: int) -> int:
    """Color id of the class holding the negations of class sigma.

    Well-defined because negation edges force negation to map classes to
    classes; equals sigma itself for a self-negating class.
    """
    pi = base.coloring
    members = pi.class_members(sigma)
    if len(members) == 0:
        raise KeyError(f"empty class {sigma}")
    return int(pi.color[int(members[0]) ^ 1])


def _literal_classes(graph, pi: Coloring, covered) -> list:
    """Non-singleton literal classes with no covered member, largest
    first (ties by ascending color id)."""
    out = []
    for c in pi.classes():
        if pi.clen[c] < 2 or pi.order[c] >= graph.num_literal_vertices:
            continue
        if any(int(v) in covered for v in pi.class_members(c)):
            continue
        out.append(c)
    out.sort(key=lambda c: (-int(pi.clen[c]), c))
    return out


def _polarity_split_base(graph, pi: Coloring, sigma: int):
    """Attempt base for a self-negating class: split sigma by literal
    polarity (positive slots first), re-refine, and return the report plus
    the class now holding sigma's positive literals.

    Polarity is not a graph invariant, so this is purely a heuristic seed
    for detection; final verification keeps it sound.
    """
    keys = pi.color.astype(np.int64) * 2
    members = [int(v) for v in pi.class_members(sigma)]
    for v in members:
        if v % 2 == 1:
            keys[v] += 1
    rep = refine_stable(graph, Coloring.from_color_map(keys))
    new_sigma = int(rep.coloring.color[next(v for v in members if v % 2 == 0)])
    return RefinementReport(base=rep.coloring, coloring=rep.coloring), new_sigma


def _detect_structures(formula, graph, base: RefinementReport,
                       config: PipelineConfig):
    structures = []
    covered: set = set()
    pi = base.coloring
    split_cache: dict = {}

    detectors = []
    if config.johnson:
        detectors.append("johnson")
    if config.row_column:
        detectors.append("row-column")
    if config.row:
        detectors.append("row")

    def attempt(name, rep, sigma, others):
        if name == "johnson":
            return detect_johnson(formula, graph, rep, sigma,
                                  other_colors=others)
        if name == "row-column":
            return detect_row_column(formula, graph, rep, sigma)
        return detect_row_blocks(formula, graph, rep, sigma)

    for name in detectors:
        for sigma in _literal_classes(graph, pi, covered):
            if any(int(v) in covered for v in pi.class_members(sigma)):
                continue
            if negation_class_of(base, sigma) == sigma:
                if sigma not in split_cache:
                    split_cache[sigma] = _polarity_split_base(graph, pi, sigma)
                rep, sig = split_cache[sigma]
            else:
                rep, sig = base, sigma
            others = [c for c in _literal_classes(graph, rep.coloring, covered)
                      if c != sig and c != negation_class_of(rep, sig)]
            result = attempt(name, rep, sig, others)
            if isinstance(result, DetectionFailure):
                continue
            structures.append(result)
            covered |= result.covered_vertices

    # last resort: one level of stabilizer recursion on leftover classes
    sub_detectors = []
    if config.johnson:
        sub_detectors.append(
            lambda F, G, rep, s: detect_johnson(F, G, rep, s))
    if config.row_column:
        sub_detectors.append(detect_row_column)
    if config.row:
        sub_detectors.append(detect_row_blocks)
    if sub_detectors:
        for sigma in _literal_classes(graph, pi, covered):
            if any(int(v) in covered for v in pi.class_members(sigma)):
                continue
            result = stabilizer_recursion(formula, graph, base, sigma,
                                          detectors=sub_detectors)
            if isinstance(result, DetectionFailure):
                continue
            structures.append(result)
            covered |= result.covered_vertices
    return structures, covered


def _remainder_coloring(graph, pi: Coloring, covered) -> Coloring:
    """Discretize every covered vertex (fresh singleton per vertex),
    keeping the stable coloring elsewhere."""
    keys = pi.color.astype(np.int64)
    bump = graph.vertex_count
    for i, v in enumerate(sorted(covered)):
        keys[v] = bump + i
    return Coloring.from_color_map(keys)


def _count_by_color(pi: Coloring, vertices) -> list:
    counts: dict = {}
    for v in vertices:
        c = int(pi.color[v])
        counts[c] = counts.get(c, 0) + 1
    return list(counts.values())


def run(formula: Formula, config: PipelineConfig = None) -> BreakerOutput:
    if config is None:
        config = PipelineConfig()
    times = {}

    t0 = time.perf_counter()
    graph = build_model_graph(formula)
    base = refine_stable(graph, initial_coloring(graph))
    times["graph_ms"] = (time.perf_counter() - t0) * 1000.0

    t0 = time.perf_counter()
    structures, covered = _detect_structures(formula, graph, base, config)
    times["detect_ms"] = (time.perf_counter() - t0) * 1000.0

    t0 = time.perf_counter()
    rem_gens = []
    if config.remainder and config.dive_pairs > 0 \
            and len(covered) < graph.num_literal_vertices:
        rem_pi = _remainder_coloring(graph, base.coloring, covered)
        rem_pi = refine_stable(graph, rem_pi).coloring
        rem_gens = find_remainder_generators(
            formula, graph, rem_pi,
            SearchBudget(dive_pairs=config.dive_pairs, seed=config.seed))
    times["remainder_ms"] = (time.perf_counter() - t0) * 1000.0

    t0 = time.perf_counter()
    order = build_order(structures, formula)
    added = []
    aux = 0
    binary_count = 0
    if config.binary and rem_gens:
        bc, order = binary_clause_heuristic(rem_gens, order)
        added.extend(bc.clauses)
        binary_count = len(bc.clauses)
    chain_gens = []
    for s in structures:
        chain_gens.extend(structure_generators(s))
    chain_gens.extend(rem_gens)
    for phi in chain_gens:
        chain = lex_leader_encode(phi, order, formula.num_vars + 1 + aux,
                                  max_len=config.max_len)
        added.extend(chain.clauses)
        aux += chain.aux_count
    times["encode_ms"] = (time.perf_counter() - t0) * 1000.0

    if config.verify_level == "all-emitted":
        from .cnf import clause_multiset_image_check
        for phi in chain_gens:
            if not clause_multiset_image_check(formula, phi):
                raise AssertionError("emitted generator failed the full "
                                     "clause-multiset check")

    pi = base.coloring
    stats = {
        "structures": [
            {
                "kind": s.kind,
                "dims": list(s.dims),
                "generators": len(s.generators),
                "orbit_sizes": sorted(
                    _count_by_color(pi, s.covered_vertices), reverse=True),
            }
            for s in structures
        ],
        "remainder": {
            "generators": len(rem_gens),
            "binary_clauses": binary_count,
        },
        "clauses_added": len(added),
        "aux_vars": aux,
        "phase_times_ms": times,
    }
    return BreakerOutput(formula=formula, added_clauses=added, aux_count=aux,
                         structures=structures,
                         remainder_generators=rem_gens,
                         binary_clauses=binary_count, stats=stats)
