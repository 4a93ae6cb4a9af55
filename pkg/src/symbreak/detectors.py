"""Structure detection on the model graph: row, row-column, and Johnson.

Detection treats the color classes of the stable coloring as purported
orbits.  Each detector builds candidate permutations from the effect of
individualization-refinement and only returns a structure once every
generator has been verified against the formula, so a non-Tinhofer model
graph can only cause a miss, never a wrong answer.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field

import numpy as np

from .cnf import (Formula, LiteralPermutation, fix, is_automorphism,
                  transpose, var_of)
from .modelgraph import ColoredGraph
from .refine import (Coloring, IRSession, RefinementReport,
                     individualize_refine)


@dataclass
class DetectionFailure:
    reason: str

    def __bool__(self):
        return False


@dataclass
class RowStructure:
    matrix: list                      # rows x cols of literal codes
    generators: list                  # consecutive-row transpositions
    covered_colors: list
    covered_vertices: set

    kind = "row"

    @property
    def dims(self):
        return (len(self.matrix), len(self.matrix[0]) if self.matrix else 0)

    def ordered_variables(self) -> list:
        seen, out = set(), []
        for row in self.matrix:
            for lit in row:
                v = var_of(lit)
                if v not in seen:
                    seen.add(v)
                    out.append(v)
        return out


@dataclass
class RowColumnStructure:
    matrix: list                      # n_rows x n_cols of literal codes
    generators: list                  # adjacent row and column transpositions
    covered_colors: list
    covered_vertices: set

    kind = "row-column"

    @property
    def dims(self):
        return (len(self.matrix), len(self.matrix[0]))

    def ordered_variables(self) -> list:
        seen, out = set(), []
        for row in self.matrix:
            for lit in row:
                v = var_of(lit)
                if v not in seen:
                    seen.add(v)
                    out.append(v)
        return out


@dataclass
class JohnsonStructure:
    n: int
    label: dict                       # literal -> frozenset({i, j})
    generators: list                  # adjacent label transpositions
    covered_colors: list
    covered_vertices: set
    extensions: list = field(default_factory=list)  # (color id, {label: block})

    kind = "johnson"

    @property
    def dims(self):
        return (self.n,)

    def ordered_variables(self) -> list:
        pair_to_lit = {p: l for l, p in self.label.items()}
        seen, out = set(), []
        for i in range(1, self.n + 1):
            for j in range(i + 1, self.n + 1):
                v = var_of(pair_to_lit[frozenset((i, j))])
                if v not in seen:
                    seen.add(v)
                    out.append(v)
        for _, blocks in self.extensions:
            for i in range(1, self.n + 1):
                for lit in blocks[i]:
                    v = var_of(lit)
                    if v not in seen:
                        seen.add(v)
                        out.append(v)
        return out


def _class_members(coloring: Coloring, c: int) -> list:
    return [int(v) for v in coloring.class_members(c)]


def _literal_fragments(report: RefinementReport, sigma: int):
    """(color id, members) pairs for the fragments of a base class,
    ascending by refined color id; members in refined partition order."""
    members = report.base.class_members(sigma)
    cols = report.coloring.color[members]
    out = []
    for c in np.unique(cols):
        mem = members[cols == c]
        mem = mem[np.argsort(report.coloring.pos[mem], kind="stable")]
        out.append((int(c), [int(v) for v in mem]))
    return out


def detect_row(formula: Formula, graph: ColoredGraph, base: RefinementReport,
               sigma: int, collect_blocks: bool = False):
    """Row interchangeability on the class `sigma` of the stable coloring.

    Each member's individualization determines its purported row: the
    literals that become singletons, ordered by their refined color.  With
    ``collect_blocks`` the row additionally absorbs fragments c' of other
    classes c with |c'| * |sigma| = |c| (symmetric action on blocks).
    """
    pi = base.coloring
    members = _class_members(pi, sigma)
    if len(members) < 3:
        return DetectionFailure("size gate: |sigma| < 3")
    if any(v >= graph.num_literal_vertices for v in members):
        return DetectionFailure("sigma is not a literal class")

    sigma_size = len(members)
    session = IRSession(graph, pi)
    rows = []
    for v in members:
        rep = session.individualize(v)
        row = [u for u in rep.new_singletons if u < graph.num_literal_vertices]
        if collect_blocks:
            blocks = []
            for c in (c for c in pi.classes()
                      if pi.clen[c] > 1 and c != sigma
                      and pi.order[c] < graph.num_literal_vertices):
                csize = int(pi.clen[c])
                for cprime, frag in _literal_fragments(rep, c):
                    if 1 < len(frag) and len(frag) * sigma_size == csize:
                        blocks.append((cprime, frag))
            # merge singletons and blocks into one row, ordered by the
            # refined color of each piece
            pieces = [(int(rep.coloring.color[u]), [u]) for u in row]
            pieces.extend(blocks)
            pieces.sort(key=lambda p: p[0])
            row = [u for _, piece in pieces for u in piece]
        rows.append(row)

    flat = [u for row in rows for u in row]
    if len(set(flat)) != len(flat):
        return DetectionFailure("overlapping rows")
    if len(set(len(r) for r in rows)) != 1:
        return DetectionFailure("unequal row lengths")

    generators = []
    for i in range(1, len(rows)):
        try:
            phi = fix(transpose(rows[i - 1], rows[i]))
        except ValueError:
            return DetectionFailure("verification failed")
        if not is_automorphism(formula, phi):
            return DetectionFailure("verification failed")
        generators.append(phi)

    covered = set(flat)
    covered_colors = sorted(set(int(pi.color[u]) for u in covered))
    return RowStructure(matrix=rows, generators=generators,
                        covered_colors=covered_colors,
                        covered_vertices=covered)


def detect_row_blocks(formula: Formula, graph: ColoredGraph,
                      base: RefinementReport, sigma: int):
    return detect_row(formula, graph, base, sigma, collect_blocks=True)


def detect_row_column(formula: Formula, graph: ColoredGraph,
                      base: RefinementReport, sigma: int):
    """Row-column symmetry Sym(n) x Sym(m) on the class `sigma`.

    A pivot individualization must split sigma into {v}, row remainder,
    column remainder, and the rest; individualizing each row/column
    representative assigns matrix coordinates, and the adjacent row and
    column transpositions (negation-expanded) are verified.
    """
    pi = base.coloring
    members = _class_members(pi, sigma)
    if any(v >= graph.num_literal_vertices for v in members):
        return DetectionFailure("sigma is not a literal class")
    neg_color = int(pi.color[members[0] ^ 1])
    if neg_color == sigma:
        return DetectionFailure("self-negating orbit")

    v = members[0]
    session = IRSession(graph, pi)
    rep_v = session.individualize(v)
    frags = _literal_fragments(rep_v, sigma)
    if len(frags) != 4:
        return DetectionFailure(f"fragment count {len(frags)} != 4")
    frags.sort(key=lambda f: (len(f[1]), f[0]))
    if len(frags[0][1]) != 1 or frags[0][1][0] != v:
        return DetectionFailure("pivot is not the singleton fragment")
    sigma1 = frags[1][1]
    sigma2 = frags[2][1]
    if len(sigma1) < 2 or len(sigma2) < 2:
        return DetectionFailure("degenerate row or column fragment")

    col_of = {v: v}
    row_of = {v: v}
    for r in sigma1:
        row_of[r] = v
        col_of[r] = r
    for c in sigma2:
        col_of[c] = v
        row_of[c] = c

    members_arr = pi.class_members(sigma)

    def assign(rep, want_size, target, ref):
        cols = rep.coloring.color[members_arr]
        ids, counts = np.unique(cols, return_counts=True)
        # excluding the fragments holding v and ref by color id equals
        # excluding fragments containing them
        cv = int(rep.coloring.color[v])
        cref = int(rep.coloring.color[ref])
        cand = ids[(counts == want_size) & (ids != cv) & (ids != cref)]
        if len(cand) != 1:
            return False
        for t in members_arr[cols == cand[0]]:
            t = int(t)
            if t in target:
                return False
            target[t] = ref
        return True

    for r in sigma1:
        rep_r = session.individualize(r)
        if not assign(rep_r, len(sigma2), col_of, r):
            return DetectionFailure("missing size-matched fragment")
    for c in sigma2:
        rep_c = session.individualize(c)
        if not assign(rep_c, len(sigma1), row_of, c):
            return DetectionFailure("missing size-matched fragment")

    row_labels = [v] + sigma2
    col_labels = [v] + sigma1
    if set(row_of) != set(members) or set(col_of) != set(members):
        return DetectionFailure("malformed matrix: unassigned cells")
    cells = {}
    for t in members:
        key = (row_of[t], col_of[t])
        if key in cells:
            return DetectionFailure("malformed matrix: duplicate label pair")
        cells[key] = t
    if len(cells) != len(row_labels) * len(col_labels):
        return DetectionFailure("malformed matrix: wrong cell count")
    try:
        matrix = [[cells[(r, c)] for c in col_labels] for r in row_labels]
    except KeyError:
        return DetectionFailure("malformed matrix: missing cell")

    def column(ci):
        return [matrix[ri][ci] for ri in range(len(row_labels))]

    # adjacent transpositions generate the same group as the pivot-star
    # ones and make much stronger lex-leader constraints under the
    # row-major order, so they are what the structure carries
    generators = []
    for ci in range(len(col_labels) - 1):
        phi = fix(transpose(column(ci), column(ci + 1)))
        if not is_automorphism(formula, phi):
            return DetectionFailure("verification failed")
        generators.append(phi)
    for ri in range(len(row_labels) - 1):
        phi = fix(transpose(matrix[ri], matrix[ri + 1]))
        if not is_automorphism(formula, phi):
            return DetectionFailure("verification failed")
        generators.append(phi)

    covered = set(members) | set(m ^ 1 for m in members)
    covered_colors = sorted({sigma, neg_color})
    return RowColumnStructure(matrix=matrix, generators=generators,
                              covered_colors=covered_colors,
                              covered_vertices=covered)


def _triangular_n(k: int):
    n = int((1 + (1 + 8 * k) ** 0.5) / 2)
    for cand in (n - 1, n, n + 1):
        if cand * (cand - 1) // 2 == k:
            return cand
    return None


def _johnson_labeling(graph: ColoredGraph, base: RefinementReport, sigma: int):
    """Label construction for a purported Johnson action on sigma.

    Returns (n, label dict) or a DetectionFailure.  Labels are assigned in
    order of first appearance, i.e. determined up to a relabeling.
    """
    pi = base.coloring
    members = _class_members(pi, sigma)
    size = len(members)
    if size < 28:
        return DetectionFailure("size gate: |sigma| < 28")
    n = _triangular_n(size)
    if n is None:
        return DetectionFailure("|sigma| is not a binomial(n, 2)")

    label = {u: [] for u in members}
    ad: dict = {}
    rep_cache: dict = {}

    def stabilize(u):
        if u not in rep_cache:
            rep_cache[u] = individualize_refine(graph, pi, u, base=pi)
        return rep_cache[u]

    def adjacency(u):
        if u in ad:
            return ad[u]
        rep = stabilize(u)
        frags = _literal_fragments(rep, sigma)
        if len(frags) != 3:
            return None
        nonsingle = sorted((f for f in frags if len(f[1]) > 1),
                           key=lambda f: len(f[1]))
        if len(nonsingle) != 2 or len(nonsingle[0][1]) == len(nonsingle[1][1]):
            return None
        ad[u] = set(nonsingle[0][1])
        return ad[u]

    vnr = 1
    max_iters = n + 1
    for _ in range(max_iters):
        pending = [u for u in members if len(label[u]) <= 1]
        if not pending:
            break
        v = pending[0]
        ad_v = adjacency(v)
        if ad_v is None:
            return DetectionFailure("wrong fragment structure")
        w = min(ad_v)
        ad_w = adjacency(w)
        if ad_w is None:
            return DetectionFailure("wrong fragment structure")
        rep_vw = individualize_refine(graph, stabilize(v).coloring, w, base=pi)
        singles = [mem[0] for _, mem in _literal_fragments(rep_vw, sigma)
                   if len(mem) == 1 and mem[0] not in (v, w)]
        if len(singles) != 1:
            return DetectionFailure("no unique third singleton")
        y = singles[0]
        ad_y = adjacency(y)
        if ad_y is None:
            return DetectionFailure("wrong fragment structure")

        e_i = {v, y} | ((ad_v & ad_y) - {w})
        e_j = {v, w} | ((ad_v & ad_w) - {y})
        e_k = {w, y} | ((ad_w & ad_y) - {v})
        added = False
        for group in (e_i, e_j, e_k):
            common = None
            for u in group:
                s = set(label[u])
                common = s if common is None else (common & s)
            if common:
                continue
            for u in group:
                label[u].append(vnr)
            vnr += 1
            added = True
        if not added:
            return DetectionFailure("no fresh labels in an iteration")
    else:
        return DetectionFailure("labeling did not terminate")

    if vnr - 1 != n:
        return DetectionFailure("label count mismatch")
    pairs = set()
    for u in members:
        if len(label[u]) != 2:
            return DetectionFailure("incomplete labels")
        pairs.add(frozenset(label[u]))
    if len(pairs) != size:
        return DetectionFailure("labels are not a bijection")
    return n, {u: frozenset(label[u]) for u in members}


def _johnson_generator(n: int, label: dict, i: int,
                       block_pairings: list) -> LiteralPermutation:
    """Permutation induced on the labeled literals by the label
    transposition (i, i+1), plus explicit block pairings, closed under
    negation."""
    pair_to_lit = {p: l for l, p in label.items()}
    mapping = {}
    for r in range(1, n + 1):
        if r in (i, i + 1):
            continue
        a = pair_to_lit[frozenset((i, r))]
        b = pair_to_lit[frozenset((i + 1, r))]
        mapping[a] = b
        mapping[b] = a
    for xs, ys in block_pairings:
        for x, y in zip(xs, ys):
            mapping[x] = y
            mapping[y] = x
    return fix(LiteralPermutation(mapping))


def detect_johnson_row_extension(formula: Formula, graph: ColoredGraph,
                                 base: RefinementReport, n: int, label: dict,
                                 other_colors) -> list:
    """Orbits whose stabilization splits the Johnson class along one label.

    For each candidate class, individualizing any member must split the
    labeled class into the literals carrying one particular label and the
    rest; the class then partitions into equal blocks, one per label.
    Returns (color id, {label: ordered block}, reference coloring) triples;
    unaccepted classes are skipped silently.
    """
    pi = base.coloring
    incident = {i: frozenset(u for u, p in label.items() if i in p)
                for i in range(1, n + 1)}
    sigma = int(pi.color[next(iter(label))])
    accepted = []
    accepted_colors = set()
    for tau in other_colors:
        members = _class_members(pi, tau)
        if not members:
            continue
        if int(pi.color[members[0] ^ 1]) in accepted_colors:
            # negation class of an accepted orbit: fix() already closes the
            # generators over it, a second block map would conflict
            continue
        if len(members) % n != 0 or len(members) < n:
            continue
        block_size = len(members) // n
        blocks: dict = {}
        rep_u = None
        ok = True
        for t in members:
            rep = individualize_refine(graph, pi, t, base=pi)
            if rep_u is None:
                rep_u = rep
            frags = _literal_fragments(rep, sigma)
            if len(frags) != 2:
                ok = False
                break
            small = min((set(mem) for _, mem in frags), key=len)
            matched = None
            for i in range(1, n + 1):
                if small == incident[i]:
                    matched = i
                    break
            if matched is None:
                ok = False
                break
            blocks.setdefault(matched, []).append(t)
        if not ok or len(blocks) != n:
            continue
        if any(len(b) != block_size for b in blocks.values()):
            continue
        # order every block by the reference coloring so that positions
        # correspond across labels
        ref_color = rep_u.coloring.color
        for i in blocks:
            blocks[i].sort(key=lambda t: (int(ref_color[t]), t))
        accepted.append((tau, blocks, rep_u))
        accepted_colors.add(tau)
    return accepted


def detect_johnson(formula: Formula, graph: ColoredGraph,
                   base: RefinementReport, sigma: int,
                   other_colors=()):
    """Johnson action J_n on the class `sigma`, optionally extended to
    label-aligned block orbits.

    Plain generators are tried first; when they fail verification, the
    action usually has to move label-aligned companion orbits too, so the
    row-extension blocks are folded into the generators before verifying.
    Block pairings that the reference coloring leaves ambiguous are
    resolved by a small search, gated by verification.
    """
    pi = base.coloring
    members = _class_members(pi, sigma)
    if any(v >= graph.num_literal_vertices for v in members):
        return DetectionFailure("sigma is not a literal class")
    neg_color = int(pi.color[members[0] ^ 1])
    if neg_color == sigma:
        return DetectionFailure("self-negating orbit")

    res = _johnson_labeling(graph, base, sigma)
    if isinstance(res, DetectionFailure):
        return res
    n, label = res

    def build_generators(extensions):
        gens = []
        for i in range(1, n):
            pairings = []
            searchable = []   # per-extension list of alternative pairings
            for _, blocks, _ in extensions:
                bi, bj = blocks[i], blocks[i + 1]
                pairings.append((bi, bj))
                if len(bi) > 1:
                    searchable.append(len(pairings) - 1)
            try:
                phi = _johnson_generator(n, label, i, pairings)
            except ValueError:
                phi = None
            if phi is not None and is_automorphism(formula, phi):
                gens.append(phi)
                continue
            # pairing search over permutations of the ambiguous blocks
            found = None
            options = [list(itertools.permutations(pairings[k][1]))
                       for k in searchable]
            for combo in itertools.islice(itertools.product(*options), 64):
                trial = list(pairings)
                for k, perm in zip(searchable, combo):
                    trial[k] = (trial[k][0], list(perm))
                try:
                    phi = _johnson_generator(n, label, i, trial)
                except ValueError:
                    continue
                if is_automorphism(formula, phi):
                    found = phi
                    break
            if found is None:
                return None
            gens.append(found)
        return gens

    generators = build_generators([])
    extensions = []
    if generators is None:
        extensions = detect_johnson_row_extension(
            formula, graph, base, n, label, other_colors)
        if not extensions:
            return DetectionFailure("verification failed")
        generators = build_generators(extensions)
        if generators is None:
            return DetectionFailure("verification failed")
    else:
        # bare action verified; extensions only widen coverage, keep them
        # when the extended generators also verify
        ext = detect_johnson_row_extension(
            formula, graph, base, n, label, other_colors)
        if ext:
            extended = build_generators(ext)
            if extended is not None:
                extensions = ext
                generators = extended

    covered = set(members) | set(m ^ 1 for m in members)
    covered_colors = {sigma, neg_color}
    ext_out = []
    for tau, blocks, _ in extensions:
        ext_out.append((tau, blocks))
        for i in blocks:
            for t in blocks[i]:
                covered.add(t)
                covered.add(t ^ 1)
                covered_colors.add(int(pi.color[t]))
                covered_colors.add(int(pi.color[t ^ 1]))
    return JohnsonStructure(n=n, label=label, generators=generators,
                            covered_colors=sorted(covered_colors),
                            covered_vertices=covered, extensions=ext_out)


def stabilizer_recursion(formula: Formula, graph: ColoredGraph,
                         base: RefinementReport, sigma: int,
                         detectors=None, _depth: int = 0):
    """After a failed attempt on sigma, retry on the largest fragment of
    sigma under the first individualization.  One recursion level only."""
    if _depth >= 1:
        return DetectionFailure("recursion depth exhausted")
    pi = base.coloring
    members = _class_members(pi, sigma)
    if len(members) < 2:
        return DetectionFailure("size gate: singleton class")
    rep = individualize_refine(graph, pi, members[0], base=pi)
    frags = _literal_fragments(rep, sigma)
    largest_color, largest = max(frags, key=lambda f: (len(f[1]), -f[0]))
    if len(largest) < 2:
        return DetectionFailure("largest fragment is a singleton")
    inner_base = RefinementReport(base=rep.coloring, coloring=rep.coloring)
    if detectors is None:
        detectors = (detect_johnson, detect_row_column, detect_row_blocks)
    for det in detectors:
        result = det(formula, graph, inner_base, largest_color)
        if not isinstance(result, DetectionFailure):
            return result
    return DetectionFailure("recursion failed")
