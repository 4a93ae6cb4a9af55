"""Budgeted random-dive automorphism search on the remainder coloring.

Not a complete group search: each budget unit runs two random
individualization dives to discrete colorings and pairs their leaves
positionally (sound because color ids are isomorphism-invariant, and a
wrong pairing is rejected by verification anyway).
"""

from __future__ import annotations

import random
from dataclasses import dataclass

from .cnf import Formula, LiteralPermutation, fix, is_automorphism
from .modelgraph import ColoredGraph
from .refine import Coloring, individualize_refine


@dataclass
class SearchBudget:
    dive_pairs: int = 32
    seed: int = 0

    def __post_init__(self):
        if self.dive_pairs < 0:
            raise ValueError("dive_pairs must be non-negative")


def _first_nonsingleton(pi: Coloring):
    for c in pi.classes():
        if pi.clen[c] > 1:
            return c
    return None


def _dive(graph: ColoredGraph, pi: Coloring, rng: random.Random) -> Coloring:
    cur = pi
    while True:
        c = _first_nonsingleton(cur)
        if c is None:
            return cur
        members = [int(v) for v in cur.class_members(c)]
        cur = individualize_refine(graph, cur, rng.choice(members)).coloring


def _pair_leaves(graph: ColoredGraph, d1: Coloring, d2: Coloring):
    """Literal permutation pairing the two discrete leaves slot by slot;
    None when a literal slot faces a clause slot."""
    nlit = graph.num_literal_vertices
    mapping = {}
    for s in range(d1.num_vertices):
        a, b = int(d1.order[s]), int(d2.order[s])
        if (a < nlit) != (b < nlit):
            return None
        if a < nlit:
            mapping[a] = b
    try:
        return fix(LiteralPermutation(mapping))
    except ValueError:
        return None


def find_remainder_generators(formula: Formula, graph: ColoredGraph,
                              pi_rem: Coloring,
                              budget: SearchBudget) -> list:
    """Verified automorphisms found by paired random dives on the
    remainder coloring.  Deterministic given the seed; may return an
    empty list (the search is incomplete by design)."""
    nlit = graph.num_literal_vertices
    if all(pi_rem.clen[int(pi_rem.color[v])] == 1 for v in range(nlit)):
        return []
    rng = random.Random(budget.seed)
    found = []
    seen = set()
    for _ in range(budget.dive_pairs):
        d1 = _dive(graph, pi_rem, rng)
        d2 = _dive(graph, pi_rem, rng)
        phi = _pair_leaves(graph, d1, d2)
        if phi is None or phi.is_identity() or phi in seen:
            continue
        if is_automorphism(formula, phi):
            seen.add(phi)
            found.append(phi)
    return found
