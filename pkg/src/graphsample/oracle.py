"""Ground truth: stream materialization and independent exact solvers.

The enumeration solvers here share no code with :mod:`graphsample.solvers`;
they walk the full feasible space with no pruning beyond feasibility, so
agreement between the two is a meaningful check rather than a tautology.
Enumeration is budgeted at roughly 2^20 states.  Above that, structured
fast paths (leaf pairing on forests, Hopcroft-Karp on bipartite graphs via
scipy) or the solver module itself take over; the latter is acceptable as an
oracle because the solvers are themselves validated against enumeration on
small instances.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from itertools import combinations

import numpy as np

from .solvers import (
    Exceeds,
    PropertySpec,
    SmallGraph,
    max_hypergraph_matching,
    max_matching,
    max_weight_matching,
    min_hitting_set,
    min_vertex_cover,
    solve_contraction_property,
)
from .streams import EdgeUpdate

ENUM_EDGE_BUDGET = 22
ENUM_VERTEX_BUDGET = 20


class StreamViolation(ValueError):
    """The update stream is not a valid dynamic-graph history."""


@dataclass
class MaterializedGraph:
    """Live edges after replaying a stream, with exact weights."""

    n: int
    live: dict[tuple[int, ...], float]

    @property
    def edges(self) -> list[tuple[int, ...]]:
        return sorted(self.live)

    def degrees(self) -> dict[int, int]:
        deg: dict[int, int] = {}
        for e in self.live:
            for v in e:
                deg[v] = deg.get(v, 0) + 1
        return deg

    def to_small_graph(self) -> SmallGraph:
        edges = self.edges
        return SmallGraph(
            n=self.n, edges=edges, weights=[self.live[e] for e in edges]
        )


def materialize(updates, n: int) -> MaterializedGraph:
    """Replay a stream strictly: every anomaly is an error, never skipped."""
    live: dict[tuple[int, ...], float] = {}
    for upd in updates:
        if any(v >= n for v in upd.vertices):
            raise StreamViolation(f"vertex id beyond n={n} in {upd}")
        if upd.delta == 1:
            if upd.vertices in live:
                raise StreamViolation(f"duplicate insert of live edge {upd.vertices}")
            live[upd.vertices] = upd.weight
        else:
            have = live.get(upd.vertices)
            if have is None:
                raise StreamViolation(f"delete of absent edge {upd.vertices}")
            if have != upd.weight:
                raise StreamViolation(
                    f"delete weight {upd.weight} != inserted {have} on {upd.vertices}"
                )
            del live[upd.vertices]
    return MaterializedGraph(n=n, live=live)


# ---------------------------------------------------------------------------
# feasibility checks shared by tests


def is_matching(edges) -> bool:
    seen: set[int] = set()
    for e in edges:
        if any(v in seen for v in e):
            return False
        seen.update(e)
    return True


def covers(edge_list, vertices) -> bool:
    chosen = set(vertices)
    return all(any(v in chosen for v in e) for e in edge_list)


# ---------------------------------------------------------------------------
# enumeration solvers (feasibility-only exhaustive walks)


def _guard_edges(edges) -> None:
    if len(edges) > ENUM_EDGE_BUDGET:
        raise ValueError(f"enumeration refuses {len(edges)} edges")


def enum_max_matching(edges) -> tuple:
    """Lex-smallest maximum set of pairwise-disjoint (hyper)edges."""
    _guard_edges(edges)
    es = sorted(tuple(sorted(e)) for e in edges)
    best: list[tuple] = [()]

    def walk(i: int, used: set, chosen: list) -> None:
        if i == len(es):
            cand = tuple(sorted(chosen))
            if len(cand) > len(best[0]) or (
                len(cand) == len(best[0]) and cand < best[0]
            ):
                best[0] = cand
            return
        e = es[i]
        if not any(v in used for v in e):
            walk(i + 1, used | set(e), chosen + [e])
        walk(i + 1, used, chosen)

    walk(0, set(), [])
    return best[0]


def enum_max_weight_matching(edges, weights) -> tuple[tuple, float]:
    _guard_edges(edges)
    order = sorted(range(len(edges)), key=lambda i: tuple(sorted(edges[i])))
    es = [tuple(sorted(edges[i])) for i in order]
    ws = [weights[i] for i in order]
    best: list[tuple[float, tuple]] = [(0.0, ())]

    def walk(i: int, used: set, chosen: list, weight: float) -> None:
        if i == len(es):
            cand = tuple(sorted(chosen))
            w0, c0 = best[0]
            if weight > w0 + 1e-9 or (abs(weight - w0) <= 1e-9 and cand < c0):
                best[0] = (weight, cand)
            return
        if not any(v in used for v in es[i]):
            walk(i + 1, used | set(es[i]), chosen + [es[i]], weight + ws[i])
        walk(i + 1, used, chosen, weight)

    walk(0, set(), [], 0.0)
    w, cand = best[0]
    return cand, w


def enum_min_cover(edges) -> tuple:
    """Lex-smallest minimum hitting set by increasing-size sweep."""
    verts = sorted({v for e in edges for v in e})
    if len(verts) > ENUM_VERTEX_BUDGET:
        raise ValueError(f"enumeration refuses {len(verts)} vertices")
    if not edges:
        return ()
    for size in range(len(verts) + 1):
        for cand in combinations(verts, size):
            if covers(edges, cand):
                return cand
    return tuple(verts)


def enum_subgraph_property(edges, prop: PropertySpec) -> tuple:
    """Largest edge subset satisfying a contraction-closed property."""
    es = sorted(tuple(sorted(e)) for e in edges)
    if prop.name == "k_colorable":
        return _enum_max_kcut(es, prop.param or 1)
    if len(es) > 20:
        raise ValueError(f"enumeration refuses {len(es)} edges")
    best: tuple = ()
    for mask in range(1 << len(es)):
        subset = [es[i] for i in range(len(es)) if mask >> i & 1]
        if len(subset) < len(best):
            continue
        if not _satisfies(subset, prop):
            continue
        cand = tuple(subset)
        if len(cand) > len(best) or (len(cand) == len(best) and cand < best):
            best = cand
    return best


def _satisfies(subset, prop: PropertySpec) -> bool:
    if prop.name == "b_matching":
        cap = prop.param or 1
        deg: dict[int, int] = {}
        for u, v in subset:
            deg[u] = deg.get(u, 0) + 1
            deg[v] = deg.get(v, 0) + 1
        return all(d <= cap for d in deg.values())
    if prop.name == "max_forest":
        return _acyclic(subset)
    if prop.name == "disjoint_paths":
        deg = {}
        for u, v in subset:
            deg[u] = deg.get(u, 0) + 1
            deg[v] = deg.get(v, 0) + 1
        return all(d <= 2 for d in deg.values()) and _acyclic(subset)
    raise ValueError(f"no subset check for {prop.name}")


def _acyclic(subset) -> bool:
    parent: dict[int, int] = {}

    def find(x: int) -> int:
        while parent.get(x, x) != x:
            x = parent[x]
        return x

    for u, v in subset:
        ru, rv = find(u), find(v)
        if ru == rv:
            return False
        parent[ru] = rv
    return True


def _enum_max_kcut(es, classes: int) -> tuple:
    verts = sorted({v for e in es for v in e})
    if classes ** max(len(verts) - 1, 0) > 1 << 20:
        raise ValueError("enumeration refuses this k-colorable instance")
    index = {v: i for i, v in enumerate(verts)}
    best = (-1, ())

    def walk(i: int, assign: list[int]) -> None:
        nonlocal best
        if i == len(verts):
            kept = tuple(
                e for e in es if assign[index[e[0]]] != assign[index[e[1]]]
            )
            if len(kept) > best[0]:
                best = (len(kept), kept)
            return
        for c in range(classes if i > 0 else 1):
            walk(i + 1, assign + [c])

    walk(0, [])
    return best[1]


# ---------------------------------------------------------------------------
# fast exact matching for big structured graphs


def is_forest(edges) -> bool:
    return _acyclic([tuple(e) for e in edges])


def two_coloring(edges) -> dict[int, int] | None:
    """A bipartition of the touched vertices, or None if an odd cycle exists."""
    adj: dict[int, list[int]] = {}
    for u, v in edges:
        adj.setdefault(u, []).append(v)
        adj.setdefault(v, []).append(u)
    color: dict[int, int] = {}
    for start in sorted(adj):
        if start in color:
            continue
        color[start] = 0
        queue = deque([start])
        while queue:
            x = queue.popleft()
            for y in adj[x]:
                if y not in color:
                    color[y] = 1 - color[x]
                    queue.append(y)
                elif color[y] == color[x]:
                    return None
    return color


def forest_matching(edges) -> list[tuple[int, int]]:
    """Maximum matching of a forest by leaf pairing; linear and exact."""
    adj: dict[int, set[int]] = {}
    for u, v in edges:
        adj.setdefault(u, set()).add(v)
        adj.setdefault(v, set()).add(u)
    pairs: list[tuple[int, int]] = []
    leaves = deque(sorted(v for v, nb in adj.items() if len(nb) == 1))
    gone: set[int] = set()
    while leaves:
        leaf = leaves.popleft()
        if leaf in gone or len(adj[leaf]) != 1:
            continue
        (parent,) = adj[leaf]
        pairs.append((min(leaf, parent), max(leaf, parent)))
        for side in (leaf, parent):
            gone.add(side)
            for nb in list(adj[side]):
                adj[nb].discard(side)
                adj[side].discard(nb)
                if len(adj[nb]) == 1 and nb not in gone:
                    leaves.append(nb)
        # removing the pair may strand fresh leaves already queued; fine
    return sorted(pairs)


def bipartite_matching_pairs(edges, coloring) -> list[tuple[int, int]]:
    """Maximum matching of a bipartite graph via scipy's Hopcroft-Karp."""
    from scipy.sparse import csr_matrix
    from scipy.sparse.csgraph import maximum_bipartite_matching

    left = sorted(v for v, c in coloring.items() if c == 0)
    right = sorted(v for v, c in coloring.items() if c == 1)
    li = {v: i for i, v in enumerate(left)}
    ri = {v: i for i, v in enumerate(right)}
    rows, cols = [], []
    for u, v in edges:
        if coloring[u] == 1:
            u, v = v, u
        rows.append(li[u])
        cols.append(ri[v])
    bi = csr_matrix(
        (np.ones(len(rows), dtype=np.int8), (rows, cols)),
        shape=(len(left), len(right)),
    )
    col_of_row = maximum_bipartite_matching(bi, perm_type="column")
    pairs = []
    for i, j in enumerate(col_of_row):
        if j >= 0:
            u, v = left[i], right[j]
            pairs.append((min(u, v), max(u, v)))
    return sorted(pairs)


def exact_matching_pairs(edges) -> list[tuple[int, int]]:
    """Maximum matching by the cheapest exact route available."""
    edges = [tuple(sorted(e)) for e in edges]
    if not edges:
        return []
    if is_forest(edges):
        return forest_matching(edges)
    coloring = two_coloring(edges)
    if coloring is not None:
        return bipartite_matching_pairs(edges, coloring)
    graph = SmallGraph(
        n=max(v for e in edges for v in e) + 1, edges=[tuple(e) for e in edges]
    )
    return [tuple(e) for e in max_matching(graph).elements]


# ---------------------------------------------------------------------------
# degree statistics for the arboricity estimator


def heavy_shallow_counts(graph: MaterializedGraph, nu: int) -> tuple[int, int]:
    """(# vertices of degree >= 2*nu+3, # edges with no such endpoint)."""
    threshold = 2 * nu + 3
    deg = graph.degrees()
    heavy = sum(1 for d in deg.values() if d >= threshold)
    shallow = sum(
        1
        for e in graph.live
        if all(deg[v] < threshold for v in e)
    )
    return heavy, shallow


# ---------------------------------------------------------------------------
# one entry point


def oracle_solve(graph: MaterializedGraph, problem: str, **params):
    """Exact answer for ``problem`` on a materialized graph.

    Problems: matching, weighted_matching, vertex_cover, hitting_set,
    hypergraph_matching, heavy_shallow, or any contraction property name
    accepted by :class:`PropertySpec`.  Small instances go through
    enumeration; larger ones use the structured paths described in the
    module docstring.
    """
    edges = graph.edges
    if problem == "matching":
        if len(edges) <= ENUM_EDGE_BUDGET:
            return enum_max_matching(edges)
        return tuple(exact_matching_pairs(edges))
    if problem == "weighted_matching":
        weights = [graph.live[e] for e in edges]
        if len(edges) <= ENUM_EDGE_BUDGET:
            return enum_max_weight_matching(edges, weights)
        sol = max_weight_matching(
            graph.to_small_graph(), cardinality_cap=params.get("cardinality_cap")
        )
        return tuple(sol.elements), sol.total_weight
    if problem in ("vertex_cover", "hitting_set"):
        verts = {v for e in edges for v in e}
        if len(verts) <= ENUM_VERTEX_BUDGET:
            return enum_min_cover(edges)
        budget = params.get("budget")
        if budget is None:
            greedy: set[int] = set()
            for e in edges:
                if not any(v in greedy for v in e):
                    greedy.update(e)
            budget = len(greedy)
        solver = min_vertex_cover if problem == "vertex_cover" else min_hitting_set
        res = solver(graph.to_small_graph(), budget)
        if isinstance(res, Exceeds):
            raise RuntimeError("oracle cover search exceeded its own upper bound")
        return tuple(res.elements)
    if problem == "hypergraph_matching":
        if len(edges) <= ENUM_EDGE_BUDGET:
            return enum_max_matching(edges)
        return tuple(max_hypergraph_matching(graph.to_small_graph()).elements)
    if problem == "heavy_shallow":
        return heavy_shallow_counts(graph, params["nu"])
    prop = PropertySpec.parse(problem)
    if len(edges) <= 20 or prop.name == "k_colorable":
        try:
            return enum_subgraph_property(edges, prop)
        except ValueError:
            pass
    return tuple(solve_contraction_property(graph.to_small_graph(), prop).elements)
