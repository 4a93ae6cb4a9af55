"""Equitable color refinement and individualization-refinement.

Colorings are ordered partitions: `order` lists the vertices class by
class, and a class's color id is the index of its first slot.  Splitting
reorders a class in place, fragments sorted by ascending count of
neighbors in the splitter (ties keep their relative order), so color ids
are isomorphism-invariant.

The worklist kernel uses the smaller-half rule (all fragments but the
largest are re-enqueued) and runs under numba when available.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .modelgraph import ColoredGraph

try:
    from numba import njit

    HAVE_NUMBA = True
except ImportError:  # pragma: no cover - numba is a declared dependency
    HAVE_NUMBA = False

    def njit(*args, **kwargs):
        if args and callable(args[0]):
            return args[0]

        def wrap(f):
            return f

        return wrap


class Coloring:
    """Ordered-partition coloring over vertices 0..n-1."""

    __slots__ = ("order", "pos", "color", "clen")

    def __init__(self, order, pos, color, clen):
        self.order = order
        self.pos = pos
        self.color = color
        self.clen = clen

    @classmethod
    def from_color_map(cls, keys) -> "Coloring":
        """Ordered partition grouping vertices by key, classes in ascending
        key order, vertices within a class in id order."""
        keys = np.asarray(keys, dtype=np.int64)
        n = len(keys)
        order = np.argsort(keys, kind="stable").astype(np.int32)
        pos = np.empty(n, dtype=np.int32)
        pos[order] = np.arange(n, dtype=np.int32)
        color = np.empty(n, dtype=np.int32)
        clen = np.zeros(n, dtype=np.int32)
        start = 0
        for i in range(1, n + 1):
            if i == n or keys[order[i]] != keys[order[start]]:
                color[order[start:i]] = start
                clen[start] = i - start
                start = i
        return cls(order, pos, color, clen)

    @classmethod
    def uniform(cls, n: int) -> "Coloring":
        return cls.from_color_map(np.zeros(n, dtype=np.int64))

    def copy(self) -> "Coloring":
        return Coloring(self.order.copy(), self.pos.copy(),
                        self.color.copy(), self.clen.copy())

    @property
    def num_vertices(self) -> int:
        return len(self.order)

    def color_of(self, v: int) -> int:
        return int(self.color[v])

    def class_members(self, c: int) -> np.ndarray:
        return self.order[c:c + self.clen[c]]

    def class_size(self, c: int) -> int:
        return int(self.clen[c])

    def classes(self):
        """Class ids in partition order."""
        c = 0
        n = len(self.order)
        while c < n:
            yield c
            c += int(self.clen[c])

    def is_discrete(self) -> bool:
        return all(self.clen[c] == 1 for c in self.classes())

    def as_partition(self) -> list:
        """Ordered list of frozensets, one per class."""
        return [frozenset(int(v) for v in self.class_members(c))
                for c in self.classes()]

    def is_equitable(self, graph: ColoredGraph) -> bool:
        """Recount check: every vertex of a class has the same number of
        neighbors in every class.  Test oracle; not used by the engine."""
        for c in self.classes():
            members = self.class_members(c)
            sig = None
            for v in members:
                counts = {}
                for u in graph.neighbors_of(int(v)):
                    cu = int(self.color[u])
                    counts[cu] = counts.get(cu, 0) + 1
                fs = frozenset(counts.items())
                if sig is None:
                    sig = fs
                elif fs != sig:
                    return False
        return True


JRN_ORDER, JRN_POS, JRN_COLOR, JRN_CLEN = 0, 1, 2, 3

# placeholder journal arrays for runs that do not record one
_NO_JD = np.zeros((4, 1), dtype=np.int8)
_NO_JL = np.zeros((4, 1), dtype=np.int32)
_NO_JC = np.zeros(4, dtype=np.int64)


@njit(cache=True)
def _refine_kernel(indptr, nbr, order, pos, color, clen,
                   queue, in_queue, qhead, qtail,
                   cnt, touched, scratch, bucket, cls_list, cls_seen, tcnt,
                   uj, jd, jl, jc):
    qcap = queue.shape[0]
    while qhead != qtail:
        s = queue[qhead]
        qhead = (qhead + 1) % qcap
        in_queue[s] = 0

        # gather splitter-neighbor counts; the first touch of a vertex
        # swaps it to the back of its class, so splitting costs
        # O(touched) rather than O(class size)
        ntouched = 0
        for idx in range(s, s + clen[s]):
            v = order[idx]
            for j in range(indptr[v], indptr[v + 1]):
                u = nbr[j]
                if cnt[u] == 0:
                    touched[ntouched] = u
                    ntouched += 1
                    c = color[u]
                    dest = c + clen[c] - 1 - tcnt[c]
                    tcnt[c] += 1
                    p = pos[u]
                    w = order[dest]
                    if uj == 1:
                        if jd[JRN_ORDER, dest] == 0:
                            jd[JRN_ORDER, dest] = 1
                            jl[JRN_ORDER, jc[JRN_ORDER]] = dest
                            jc[JRN_ORDER] += 1
                        if jd[JRN_ORDER, p] == 0:
                            jd[JRN_ORDER, p] = 1
                            jl[JRN_ORDER, jc[JRN_ORDER]] = p
                            jc[JRN_ORDER] += 1
                        if jd[JRN_POS, u] == 0:
                            jd[JRN_POS, u] = 1
                            jl[JRN_POS, jc[JRN_POS]] = u
                            jc[JRN_POS] += 1
                        if jd[JRN_POS, w] == 0:
                            jd[JRN_POS, w] = 1
                            jl[JRN_POS, jc[JRN_POS]] = w
                            jc[JRN_POS] += 1
                    order[dest], order[p] = u, w
                    pos[u], pos[w] = dest, p
                cnt[u] += 1

        ncls = 0
        for t in range(ntouched):
            c = color[touched[t]]
            if cls_seen[c] == 0:
                cls_seen[c] = 1
                cls_list[ncls] = c
                ncls += 1
        cls_arr = np.sort(cls_list[:ncls])

        for ci in range(ncls):
            c = cls_arr[ci]
            cls_seen[c] = 0
            csize = clen[c]
            t = tcnt[c]
            tcnt[c] = 0
            if csize == 1:
                continue
            lo = c + csize - t  # touched region [lo, c + csize)
            maxc = 0
            minc = cnt[order[lo]]
            for idx in range(lo, c + csize):
                cc = cnt[order[idx]]
                if cc > maxc:
                    maxc = cc
                if cc < minc:
                    minc = cc
            if t == csize and minc == maxc:
                continue

            # counting sort of the touched region by count ascending;
            # untouched members stay in front as the count-0 fragment
            for b in range(maxc + 2):
                bucket[b] = 0
            for idx in range(lo, c + csize):
                bucket[cnt[order[idx]] + 1] += 1
            for b in range(1, maxc + 2):
                bucket[b] += bucket[b - 1]
            for idx in range(lo, c + csize):
                v = order[idx]
                scratch[bucket[cnt[v]]] = v
                bucket[cnt[v]] += 1
            for k in range(t):
                v = scratch[k]
                if uj == 1:
                    if jd[JRN_ORDER, lo + k] == 0:
                        jd[JRN_ORDER, lo + k] = 1
                        jl[JRN_ORDER, jc[JRN_ORDER]] = lo + k
                        jc[JRN_ORDER] += 1
                    if jd[JRN_POS, v] == 0:
                        jd[JRN_POS, v] = 1
                        jl[JRN_POS, jc[JRN_POS]] = v
                        jc[JRN_POS] += 1
                order[lo + k] = v
                pos[v] = lo + k

            was_in_queue = in_queue[c]
            largest_start = -1
            largest_size = -1
            if t < csize:
                if uj == 1 and jd[JRN_CLEN, c] == 0:
                    jd[JRN_CLEN, c] = 1
                    jl[JRN_CLEN, jc[JRN_CLEN]] = c
                    jc[JRN_CLEN] += 1
                clen[c] = csize - t
                largest_start = c
                largest_size = csize - t
            k = 0
            while k < t:
                cv = cnt[scratch[k]]
                j = k + 1
                while j < t and cnt[scratch[j]] == cv:
                    j += 1
                fstart = lo + k
                fsize = j - k
                if uj == 1 and jd[JRN_CLEN, fstart] == 0:
                    jd[JRN_CLEN, fstart] = 1
                    jl[JRN_CLEN, jc[JRN_CLEN]] = fstart
                    jc[JRN_CLEN] += 1
                clen[fstart] = fsize
                for q in range(k, j):
                    w = scratch[q]
                    if uj == 1 and jd[JRN_COLOR, w] == 0:
                        jd[JRN_COLOR, w] = 1
                        jl[JRN_COLOR, jc[JRN_COLOR]] = w
                        jc[JRN_COLOR] += 1
                    color[w] = fstart
                if fsize > largest_size:
                    largest_size = fsize
                    largest_start = fstart
                k = j
            k = 0
            while k < csize:
                fstart = c + k
                fsize = clen[fstart]
                if (was_in_queue == 1 or fstart != largest_start) \
                        and in_queue[fstart] == 0:
                    queue[qtail] = fstart
                    qtail = (qtail + 1) % qcap
                    in_queue[fstart] = 1
                k += fsize

        for t in range(ntouched):
            cnt[touched[t]] = 0


def _scratch_pool(graph: ColoredGraph):
    """Per-graph reusable kernel workspace.  The kernel restores every
    zero-initialized array to zeros before returning, so the pool needs
    no cleaning between runs."""
    pool = getattr(graph, "_refine_scratch", None)
    if pool is None:
        n = graph.vertex_count
        pool = (np.empty(n + 1, dtype=np.int32),          # queue
                np.zeros(n, dtype=np.int8),               # in_queue
                np.zeros(n, dtype=np.int32),              # cnt
                np.empty(n, dtype=np.int32),              # touched
                np.empty(n, dtype=np.int32),              # scratch
                np.zeros(graph.max_degree + 2, dtype=np.int32),  # bucket
                np.empty(n, dtype=np.int32),              # cls_list
                np.zeros(n, dtype=np.int8),               # cls_seen
                np.zeros(n, dtype=np.int32))              # tcnt
        graph._refine_scratch = pool
    return pool


def _run_refinement(graph: ColoredGraph, coloring: Coloring, initial_classes,
                    journal=None):
    queue, in_queue, cnt, touched, scratch, bucket, cls_list, cls_seen, \
        tcnt = _scratch_pool(graph)
    qtail = 0
    for c in initial_classes:
        if not in_queue[c]:
            queue[qtail] = c
            qtail += 1
            in_queue[c] = 1
    if journal is None:
        uj, (jd, jl, jc) = 0, (_NO_JD, _NO_JL, _NO_JC)
    else:
        uj, (jd, jl, jc) = 1, journal
    _refine_kernel(graph.indptr, graph.neighbors,
                   coloring.order, coloring.pos, coloring.color, coloring.clen,
                   queue, in_queue, np.int64(0), np.int64(qtail),
                   cnt, touched, scratch, bucket, cls_list, cls_seen, tcnt,
                   np.int64(uj), jd, jl, jc)


@dataclass
class RefinementReport:
    """A refined coloring together with its relation to a base coloring."""

    base: Coloring
    coloring: Coloring
    _new_singletons: object = field(default=None, repr=False)

    def fragments_of(self, base_color: int) -> list:
        """Refined color ids partitioning the given base class, ascending."""
        if self.base.clen[base_color] == 0 or \
                self.base.color[self.base.order[base_color]] != base_color:
            raise KeyError(f"unknown base color {base_color}")
        members = self.base.class_members(base_color)
        return [int(c) for c in np.unique(self.coloring.color[members])]

    @property
    def new_singletons(self) -> list:
        """Vertices singleton in the refined coloring but not in the base,
        ordered by ascending refined color id."""
        if self._new_singletons is None:
            refined, base = self.coloring, self.base
            mask = (refined.clen[refined.color] == 1) & (base.clen[base.color] > 1)
            verts = np.nonzero(mask)[0]
            verts = verts[np.argsort(refined.color[verts], kind="stable")]
            self._new_singletons = [int(v) for v in verts]
        return self._new_singletons


def fragments_of(report: RefinementReport, base_color: int) -> list:
    return report.fragments_of(base_color)


def refine_stable(graph: ColoredGraph, pi: Coloring) -> RefinementReport:
    """Coarsest equitable refinement of pi."""
    refined = pi.copy()
    _run_refinement(graph, refined, list(refined.classes()))
    return RefinementReport(base=pi, coloring=refined)


def individualize_refine(graph: ColoredGraph, pi: Coloring, v: int,
                         base: Coloring = None) -> RefinementReport:
    """Split v into a fresh singleton at the front of its class, then refine.

    The report is taken relative to ``base`` (default: pi), which lets
    chained individualizations report fragments against the original
    stable coloring.
    """
    refined = pi.copy()
    c = int(refined.color[v])
    size = int(refined.clen[c])
    worklist = [c]
    if size > 1:
        p = int(refined.pos[v])
        other = int(refined.order[c])
        refined.order[c], refined.order[p] = v, other
        refined.pos[v], refined.pos[other] = c, p
        refined.clen[c] = 1
        rest = c + 1
        refined.clen[rest] = size - 1
        refined.color[refined.order[rest:c + size]] = rest
        worklist.append(rest)
    _run_refinement(graph, refined, worklist)
    return RefinementReport(base=base if base is not None else pi,
                            coloring=refined)


@njit(cache=True)
def _rollback_kernel(jd, jl, jc, w_order, w_pos, w_color, w_clen,
                     b_order, b_pos, b_color, b_clen):
    for i in range(jc[0]):
        idx = jl[0, i]
        w_order[idx] = b_order[idx]
        jd[0, idx] = 0
    for i in range(jc[1]):
        idx = jl[1, i]
        w_pos[idx] = b_pos[idx]
        jd[1, idx] = 0
    for i in range(jc[2]):
        idx = jl[2, i]
        w_color[idx] = b_color[idx]
        jd[2, idx] = 0
    for i in range(jc[3]):
        idx = jl[3, i]
        w_clen[idx] = b_clen[idx]
        jd[3, idx] = 0
    jc[0] = jc[1] = jc[2] = jc[3] = 0


class IRSession:
    """Reusable individualize-refine workspace over a fixed base coloring.

    Each call refines one in-place working copy and first rolls back the
    previous call's writes through a dirty-index journal, so an
    individualization costs O(touched) instead of O(vertices).  Only the
    most recent report is valid; the next call invalidates it.

    The base must be equitable: then refining against the new singleton
    alone suffices (distinguishability against the rest of the split
    class follows by count subtraction), so the large half of the split
    is never scanned as a splitter.
    """

    def __init__(self, graph: ColoredGraph, base: Coloring):
        self.graph = graph
        self.base = base
        self.work = base.copy()
        n = graph.vertex_count
        self._jd = np.zeros((4, n), dtype=np.int8)
        self._jl = np.empty((4, n), dtype=np.int32)
        self._jc = np.zeros(4, dtype=np.int64)

    def _rollback(self):
        work, base = self.work, self.base
        _rollback_kernel(self._jd, self._jl, self._jc,
                         work.order, work.pos, work.color, work.clen,
                         base.order, base.pos, base.color, base.clen)

    def _record(self, a: int, indices):
        indices = np.asarray(indices, dtype=np.int32)
        fresh = indices[self._jd[a, indices] == 0]
        self._jd[a, fresh] = 1
        k = int(self._jc[a])
        self._jl[a, k:k + len(fresh)] = fresh
        self._jc[a] = k + len(fresh)

    def individualize(self, v: int) -> RefinementReport:
        self._rollback()
        refined = self.work
        c = int(refined.color[v])
        size = int(refined.clen[c])
        worklist = [c]
        if size > 1:
            p = int(refined.pos[v])
            other = int(refined.order[c])
            rest = c + 1
            self._record(JRN_ORDER, [c, p])
            self._record(JRN_POS, [v, other])
            self._record(JRN_CLEN, [c, rest])
            refined.order[c], refined.order[p] = v, other
            refined.pos[v], refined.pos[other] = c, p
            refined.clen[c] = 1
            refined.clen[rest] = size - 1
            moved = refined.order[rest:c + size]
            self._record(JRN_COLOR, moved)
            refined.color[moved] = rest
        _run_refinement(self.graph, refined, worklist,
                        journal=(self._jd, self._jl, self._jc))
        return RefinementReport(base=self.base, coloring=refined)


def initial_coloring(graph: ColoredGraph) -> Coloring:
    return Coloring.from_color_map(graph.color_keys)
