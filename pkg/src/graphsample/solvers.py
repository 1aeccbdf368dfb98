"""Exact solvers sized for small extracted graphs.

Everything here is exact and deterministic.  Matching uses augmenting-path
search with blossom contraction; the covering and packing solvers use
bounded search trees and branch-and-bound with admissible pruning, which is
comfortable at the scale of extracted subgraphs (hundreds to a few thousand
edges, optima bounded by a small parameter).

Budgeted solvers return :class:`Exceeds` instead of raising when every
solution is larger than the budget; callers treat that as a value.
Branching solvers break ties toward the lexicographically smallest
certificate.  The matching solvers return a deterministic certificate but
not necessarily the lexicographically smallest one; recovering that would
cost an extra solver run per edge.
"""

from __future__ import annotations

import sys
from collections import deque
from dataclasses import dataclass, field


@dataclass(frozen=True)
class Exceeds:
    """Marker value: every solution is larger than the stated budget."""

    budget: int


@dataclass(frozen=True)
class Solution:
    """A certificate with its size and, when weighted, total weight."""

    kind: str
    elements: tuple
    total_weight: float = 0.0

    @property
    def size(self) -> int:
        return len(self.elements)


@dataclass
class SmallGraph:
    """A (hyper)graph given by canonical sorted edges, optionally weighted."""

    n: int
    edges: list[tuple[int, ...]] = field(default_factory=list)
    weights: list[float] | None = None

    def __post_init__(self) -> None:
        canon = []
        wts = []
        seen = set()
        for i, e in enumerate(self.edges):
            t = tuple(sorted(e))
            if len(set(t)) != len(t):
                raise ValueError(f"edge {e} repeats a vertex")
            if any(not 0 <= v < self.n for v in t):
                raise ValueError(f"edge {e} outside vertex range")
            if t in seen:
                continue
            seen.add(t)
            canon.append(t)
            if self.weights is not None:
                wts.append(self.weights[i])
        order = sorted(range(len(canon)), key=lambda i: canon[i])
        self.edges = [canon[i] for i in order]
        self.weights = [wts[i] for i in order] if self.weights is not None else None

    def touched(self) -> list[int]:
        return sorted({v for e in self.edges for v in e})

    def weight_of(self, i: int) -> float:
        return self.weights[i] if self.weights is not None else 1.0


# ---------------------------------------------------------------------------
# maximum matching (graphs)


class _Blossom:
    """Augmenting-path search with blossom contraction on compacted ids."""

    def __init__(self, count: int, adj: list[list[int]]):
        self.count = count
        self.adj = adj
        self.match = [-1] * count
        self._p = [-1] * count
        self._base = list(range(count))
        self._used = [False] * count
        self._lca_mark = [-1] * count
        self._bloss_mark = [-1] * count
        self._stamp = 0

    def _lca(self, a: int, b: int) -> int:
        self._stamp += 1
        stamp = self._stamp
        mark, base, match, p = self._lca_mark, self._base, self.match, self._p
        a = base[a]
        while True:
            mark[a] = stamp
            if match[a] == -1:
                break
            a = base[p[match[a]]]
        b = base[b]
        while mark[b] != stamp:
            b = base[p[match[b]]]
        return b

    def _mark_path(self, v: int, b: int, child: int, touched: list[int]) -> None:
        base, match, p, bm = self._base, self.match, self._p, self._bloss_mark
        while base[v] != b:
            bm[base[v]] = self._stamp
            bm[base[match[v]]] = self._stamp
            p[v] = child
            touched.append(v)
            child = match[v]
            v = p[match[v]]

    def augment_from(self, root: int) -> bool:
        p, base, match, used = self._p, self._base, self.match, self._used
        touched = [root]
        used[root] = True
        queue = deque([root])
        found = -1
        while queue and found < 0:
            v = queue.popleft()
            for to in self.adj[v]:
                if base[v] == base[to] or match[v] == to:
                    continue
                if to == root or (match[to] != -1 and p[match[to]] != -1):
                    cur = self._lca(v, to)
                    self._stamp += 1
                    bm = self._bloss_mark
                    self._mark_path(v, cur, to, touched)
                    self._mark_path(to, cur, v, touched)
                    for i in touched:
                        if bm[base[i]] == self._stamp:
                            base[i] = cur
                            if not used[i]:
                                used[i] = True
                                queue.append(i)
                elif p[to] == -1:
                    p[to] = v
                    touched.append(to)
                    if match[to] == -1:
                        found = to
                        break
                    mate = match[to]
                    if not used[mate]:
                        used[mate] = True
                        touched.append(mate)
                        queue.append(mate)
        if found >= 0:
            v = found
            while v != -1:
                pv = p[v]
                nxt = match[pv]
                match[v] = pv
                match[pv] = v
                v = nxt
        for i in touched:
            p[i] = -1
            base[i] = i
            used[i] = False
        return found >= 0


def _pair_edges(graph: SmallGraph) -> list[tuple[int, int]]:
    for e in graph.edges:
        if len(e) != 2:
            raise ValueError("matching solver expects arity-2 edges")
    return [(e[0], e[1]) for e in graph.edges]


def matching_pairs(graph: SmallGraph, cap: int | None = None):
    """Matched pairs and a completeness flag.

    With ``cap`` set, the search stops as soon as it certifies that the
    maximum matching exceeds ``cap``; the returned matching is then a valid
    witness of size ``cap + 1`` but not maximum, and the flag is False.
    """
    edges = _pair_edges(graph)
    ids = {v: i for i, v in enumerate(graph.touched())}
    back = graph.touched()
    count = len(ids)
    adj: list[list[int]] = [[] for _ in range(count)]
    compact = []
    for u, v in edges:
        ui, vi = ids[u], ids[v]
        adj[ui].append(vi)
        adj[vi].append(ui)
        compact.append((ui, vi))

    solver = _Blossom(count, adj)
    match = solver.match
    size = 0
    for ui, vi in compact:
        if match[ui] == -1 and match[vi] == -1:
            match[ui] = vi
            match[vi] = ui
            size += 1
            if cap is not None and size > cap:
                break
    if cap is None or size <= cap:
        for root in range(count):
            if match[root] == -1 and adj[root]:
                if solver.augment_from(root):
                    size += 1
                    if cap is not None and size > cap:
                        break
    complete = cap is None or size <= cap
    pairs = sorted(
        (min(back[v], back[match[v]]), max(back[v], back[match[v]]))
        for v in range(count)
        if match[v] > v
    )
    return pairs, complete


def max_matching(graph: SmallGraph) -> Solution:
    """Maximum-cardinality matching; exact for any graph."""
    pairs, _ = matching_pairs(graph)
    return Solution(kind="matching", elements=tuple(pairs), total_weight=float(len(pairs)))


# ---------------------------------------------------------------------------
# maximum weight matching


def max_weight_matching(
    graph: SmallGraph, cardinality_cap: int | None = None
) -> Solution:
    """Exact maximum-weight matching with a lexicographically least certificate.

    ``cardinality_cap`` restricts the search to matchings of at most that
    many edges.  When the unrestricted optimum fits under the cap anyway,
    the cap only tightens pruning and leaves the answer unchanged.

    Two phases keep weight ties from exploding the search.  Phase one
    branches over heaviest-first edges and prunes any subtree that cannot
    strictly beat the best weight seen.  Phase two rebuilds the certificate
    in ascending edge order, keeping an edge exactly when the remaining
    edges can still close the gap to the optimal weight.
    """
    raw = _pair_edges(graph)
    weights = [graph.weight_of(i) for i in range(len(raw))]
    order = sorted(range(len(raw)), key=lambda i: (-weights[i], raw[i]))
    edges = [raw[i] for i in order]
    wts = [weights[i] for i in order]
    m = len(edges)
    prefix = [0.0] * (m + 1)
    for i in range(m):
        prefix[i + 1] = prefix[i] + wts[i]
    free_total = len({v for e in edges for v in e})
    if m:
        sys.setrecursionlimit(max(sys.getrecursionlimit(), 2 * m + 1000))

    used: set[int] = set()

    def slots(picked: int) -> int:
        out = (free_total - len(used)) // 2
        if cardinality_cap is not None:
            out = min(out, cardinality_cap - picked)
        return out

    # greedy seed so phase one has something to beat from the start
    best = 0.0
    seeded = 0
    for (u, v), w in zip(edges, wts):
        if cardinality_cap is not None and seeded >= cardinality_cap:
            break
        if u not in used and v not in used:
            used.update((u, v))
            best += w
            seeded += 1
    used.clear()

    def optimum(i: int, weight: float, picked: int) -> None:
        nonlocal best
        if weight > best + 1e-9:
            best = weight
        while i < m and (edges[i][0] in used or edges[i][1] in used):
            i += 1
        if i == m:
            return
        take = min(slots(picked), m - i)
        if take <= 0:
            return
        if weight + prefix[i + take] - prefix[i] <= best + 1e-9:
            return
        u, v = edges[i]
        used.update((u, v))
        optimum(i + 1, weight + wts[i], picked + 1)
        used.difference_update((u, v))
        optimum(i + 1, weight, picked)

    optimum(0, 0.0, 0)
    target = best

    def reaches(cands: list[int], weight: float, picked: int) -> bool:
        """Can the weight-sorted candidate edges close the gap to target?"""

        def rec(j: int, weight: float, picked: int) -> bool:
            if weight >= target - 1e-9:
                return True
            while j < len(cands) and (
                edges[cands[j]][0] in used or edges[cands[j]][1] in used
            ):
                j += 1
            if j == len(cands):
                return False
            take = min(slots(picked), len(cands) - j)
            if take <= 0:
                return False
            if weight + sum(wts[c] for c in cands[j : j + take]) < target - 1e-9:
                return False
            u, v = edges[cands[j]]
            used.update((u, v))
            if rec(j + 1, weight + wts[cands[j]], picked + 1):
                used.difference_update((u, v))
                return True
            used.difference_update((u, v))
            return rec(j + 1, weight, picked)

        return rec(0, weight, picked)

    by_lex = sorted(range(m), key=lambda i: edges[i])
    chosen: list[tuple[int, int]] = []
    weight = 0.0
    start = 0
    while weight < target - 1e-9:
        advanced = False
        for t in range(start, m):
            idx = by_lex[t]
            u, v = edges[idx]
            if u in used or v in used:
                continue
            used.update((u, v))
            rest = sorted(
                (
                    j
                    for j in range(m)
                    if edges[j] > edges[idx]
                    and edges[j][0] not in used
                    and edges[j][1] not in used
                ),
                key=lambda j: (-wts[j], edges[j]),
            )
            if reaches(rest, weight + wts[idx], len(chosen) + 1):
                chosen.append(edges[idx])
                weight += wts[idx]
                start = t + 1
                advanced = True
                break
            used.difference_update((u, v))
        if not advanced:
            break
    return Solution(
        kind="weighted_matching", elements=tuple(chosen), total_weight=weight
    )


# ---------------------------------------------------------------------------
# vertex cover and hitting set


def _search_cover(
    edges: list[tuple[int, ...]], budget: int, pair_forced_rule: bool
) -> tuple | None:
    """Smallest hitting set of ``edges`` within ``budget``, lex-min, or None."""
    for target in range(budget + 1):
        best: list[tuple] = []

        def rec(active: list[tuple[int, ...]], chosen: list[int], left: int) -> None:
            if not active:
                cand = tuple(sorted(chosen))
                if not best or cand < best[0]:
                    best[:] = [cand]
                return
            if left == 0:
                return
            if pair_forced_rule:
                deg: dict[int, int] = {}
                for e in active:
                    for v in e:
                        deg[v] = deg.get(v, 0) + 1
                forced = min((v for v, d in deg.items() if d > left), default=None)
                if forced is not None:
                    rest = [e for e in active if forced not in e]
                    chosen.append(forced)
                    rec(rest, chosen, left - 1)
                    chosen.pop()
                    return
            first = min(active)
            for v in first:
                rest = [e for e in active if v not in e]
                chosen.append(v)
                rec(rest, chosen, left - 1)
                chosen.pop()

        rec(sorted(edges), [], target)
        if best:
            return best[0]
    return None


def min_vertex_cover(graph: SmallGraph, budget: int) -> Solution | Exceeds:
    """Minimum vertex cover if one of size <= budget exists, else Exceeds."""
    cover = _search_cover(graph.edges, budget, pair_forced_rule=True)
    if cover is None:
        return Exceeds(budget)
    return Solution(kind="vertex_cover", elements=cover, total_weight=float(len(cover)))


def min_hitting_set(graph: SmallGraph, budget: int) -> Solution | Exceeds:
    """Minimum hitting set of a bounded-arity hypergraph within budget."""
    cover = _search_cover(graph.edges, budget, pair_forced_rule=False)
    if cover is None:
        return Exceeds(budget)
    return Solution(kind="hitting_set", elements=cover, total_weight=float(len(cover)))


# ---------------------------------------------------------------------------
# hypergraph matching


def max_hypergraph_matching(
    graph: SmallGraph, budget: int | None = None
) -> Solution:
    """Maximum set of pairwise-disjoint hyperedges, exact.

    ``budget`` caps the search depth when the caller has a promise on the
    optimum; the reported solution is then a maximum one of size <= budget+1
    (enough to detect a promise violation).
    """
    edges = sorted(graph.edges)
    m = len(edges)
    min_arity = min((len(e) for e in edges), default=1)
    free_total = len({v for e in edges for v in e})
    cap = budget + 1 if budget is not None else None

    best: list[tuple] = [()]

    used: set[int] = set()
    chosen: list[tuple[int, ...]] = []
    if m:
        sys.setrecursionlimit(max(sys.getrecursionlimit(), 2 * m + 1000))

    def rec(i: int) -> None:
        while i < m and any(v in used for v in edges[i]):
            i += 1
        if cap is not None and len(chosen) >= cap:
            cand = tuple(sorted(chosen))
            if len(cand) > len(best[0]) or (len(cand) == len(best[0]) and cand < best[0]):
                best[0] = cand
            return
        if i == m:
            cand = tuple(sorted(chosen))
            if len(cand) > len(best[0]) or (len(cand) == len(best[0]) and cand < best[0]):
                best[0] = cand
            return
        headroom = min(m - i, (free_total - len(used)) // min_arity)
        if cap is not None:
            headroom = min(headroom, cap - len(chosen))
        if len(chosen) + headroom < len(best[0]):
            return
        e = edges[i]
        used.update(e)
        chosen.append(e)
        rec(i + 1)
        chosen.pop()
        used.difference_update(e)
        if len(chosen) + min(m - i - 1, (free_total - len(used)) // min_arity) >= len(
            best[0]
        ):
            rec(i + 1)

    rec(0)
    return Solution(
        kind="hypergraph_matching",
        elements=best[0],
        total_weight=float(len(best[0])),
    )


# ---------------------------------------------------------------------------
# contraction-closed subgraph properties


@dataclass(frozen=True)
class PropertySpec:
    """A contraction-closed subgraph property, e.g. b_matching with b=2."""

    name: str
    param: int | None = None

    _NAMES = ("b_matching", "max_forest", "disjoint_paths", "k_colorable")

    def __post_init__(self) -> None:
        if self.name not in self._NAMES:
            raise ValueError(f"unknown property {self.name!r}")
        if self.name in ("b_matching", "k_colorable"):
            if self.param is None or self.param < 1:
                raise ValueError(f"{self.name} needs a positive parameter")
        elif self.param is not None:
            raise ValueError(f"{self.name} takes no parameter")

    @classmethod
    def parse(cls, text: str) -> "PropertySpec":
        if ":" in text:
            name, raw = text.split(":", 1)
            return cls(name, int(raw))
        return cls(text)

    def render(self) -> str:
        return self.name if self.param is None else f"{self.name}:{self.param}"


class _DSU:
    def __init__(self) -> None:
        self.parent: dict[int, int] = {}

    def find(self, x: int) -> int:
        p = self.parent
        while p.get(x, x) != x:
            x = p[x]
        return x

    def union(self, a: int, b: int) -> bool:
        ra, rb = self.find(a), self.find(b)
        if ra == rb:
            return False
        self.parent[ra] = rb
        return True


def _solve_max_forest(graph: SmallGraph) -> tuple:
    dsu = _DSU()
    out = []
    for e in sorted(graph.edges):
        if dsu.union(e[0], e[1]):
            out.append(e)
    return tuple(out)


def _solve_edge_search(graph: SmallGraph, accept) -> tuple:
    """Generic max-cardinality edge-subset search with an accept predicate."""
    edges = sorted(graph.edges)
    m = len(edges)
    best: list[tuple] = [()]
    chosen: list[tuple[int, int]] = []

    def rec(i: int) -> None:
        if len(chosen) + (m - i) < len(best[0]):
            return
        if i == m:
            cand = tuple(chosen)
            if len(cand) > len(best[0]) or (
                len(cand) == len(best[0]) and cand < best[0]
            ):
                best[0] = cand
            return
        if accept(chosen, edges[i]):
            chosen.append(edges[i])
            rec(i + 1)
            chosen.pop()
        rec(i + 1)

    rec(0)
    return best[0]


def _solve_b_matching(graph: SmallGraph, b: int) -> tuple:
    def accept(chosen, e):
        du = sum(1 for c in chosen if e[0] in c)
        dv = sum(1 for c in chosen if e[1] in c)
        return du < b and dv < b

    return _solve_edge_search(graph, accept)


def _solve_disjoint_paths(graph: SmallGraph) -> tuple:
    def accept(chosen, e):
        du = sum(1 for c in chosen if e[0] in c)
        dv = sum(1 for c in chosen if e[1] in c)
        if du >= 2 or dv >= 2:
            return False
        dsu = _DSU()
        for c in chosen:
            dsu.union(c[0], c[1])
        return dsu.find(e[0]) != dsu.find(e[1])

    return _solve_edge_search(graph, accept)


def _solve_k_colorable(graph: SmallGraph, classes: int) -> tuple:
    verts = graph.touched()
    edges = sorted(graph.edges)
    index = {v: i for i, v in enumerate(verts)}
    assign = [-1] * len(verts)
    best = [(-1, [])]
    # edges whose endpoints are both assigned once vertex i is placed
    decided_by = [
        [
            (index[u], index[v])
            for u, v in edges
            if max(index[u], index[v]) == i
        ]
        for i in range(len(verts))
    ]
    undecided_after = [0] * (len(verts) + 1)
    for i in range(len(verts) - 1, -1, -1):
        undecided_after[i] = undecided_after[i + 1] + len(decided_by[i])

    def rec(i: int, cut: int) -> None:
        if cut + undecided_after[i] <= best[0][0]:
            return
        if i == len(verts):
            best[0] = (cut, assign[:])
            return
        limit = classes if i > 0 else 1
        for c in range(limit):
            assign[i] = c
            gained = sum(1 for a, b in decided_by[i] if assign[a] != assign[b])
            rec(i + 1, cut + gained)
            assign[i] = -1

    rec(0, 0)
    _, final = best[0]
    if not final:
        return ()
    return tuple(e for e in edges if final[index[e[0]]] != final[index[e[1]]])


def solve_contraction_property(graph: SmallGraph, prop: PropertySpec) -> Solution:
    """Largest edge set whose subgraph satisfies ``prop``, exact.

    Size counts edges; the touched-vertex count is len of the union.  The
    properties are all preserved under vertex contraction, which is what the
    contraction pipeline in :mod:`graphsample.algorithms` relies on.
    """
    for e in graph.edges:
        if len(e) != 2:
            raise ValueError("contraction properties expect arity-2 edges")
    if prop.name == "max_forest":
        elements = _solve_max_forest(graph)
    elif prop.name == "b_matching":
        elements = _solve_b_matching(graph, prop.param or 1)
    elif prop.name == "disjoint_paths":
        elements = _solve_disjoint_paths(graph)
    else:
        elements = _solve_k_colorable(graph, prop.param or 1)
    elements = tuple(sorted(elements))
    return Solution(kind=prop.render(), elements=elements, total_weight=float(len(elements)))
