"""Synthetic dynamic-stream generators with certified ground truth.

Each family builds a final edge set whose optimum (matching size, cover
size, and so on) is forced by construction, then optionally threads churn
through the stream: extra edges that are inserted and later deleted at
random positions, leaving the final graph untouched.  The returned meta
mapping records every promise the family certifies, so tests can check
algorithm output against known truth without re-solving.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass

import numpy as np

from .hashing import derive64
from .streams import EdgeUpdate, StreamHeader

FAMILIES = (
    "planted_matching",
    "planted_hitting_set",
    "planted_hypermatching",
    "bounded_arboricity",
    "bipartite_complete",
    "biclique",
    "grid",
    "random_gnm",
)


@dataclass(frozen=True)
class GeneratorSpec:
    """Which family to draw from and with what shape.

    Only the fields a family reads matter; the rest keep their defaults.
    ``churn`` is the fraction of all inserted edges that get deleted again
    before the stream ends.
    """

    family: str
    n: int
    churn: float = 0.0
    seed: int = 0
    k: int = 0
    d: int = 2
    nu: int = 1
    m: int = 0
    a: int = 0
    b: int = 0
    rows: int = 0
    cols: int = 0
    span: int = 0
    keep: float = 1.0
    weight_levels: int = 0
    noise: int = -1

    def __post_init__(self) -> None:
        if self.family not in FAMILIES:
            raise ValueError(f"unknown family {self.family!r}")
        if self.n < 1:
            raise ValueError("n must be positive")
        if not 0 <= self.churn < 1:
            raise ValueError("churn must be in [0, 1)")


@dataclass
class GeneratedStream:
    header: StreamHeader
    updates: list[EdgeUpdate]
    meta: dict


def generate(spec: GeneratorSpec) -> GeneratedStream:
    rng = np.random.default_rng(derive64(spec.seed, "gen", spec.family))
    builder = _BUILDERS[spec.family]
    final, meta, max_arity = builder(spec, rng)
    weighted = spec.weight_levels > 0
    if weighted:
        final = [
            (verts, float(rng.integers(1, spec.weight_levels + 1)))
            for verts, _ in final
        ]
    updates = _with_churn(spec, rng, final, max_arity, weighted)
    meta["final_edges"] = len(final)
    meta.update({f"spec_{k}": v for k, v in asdict(spec).items()})
    header = StreamHeader(n=spec.n, max_arity=max_arity, weighted=weighted)
    return GeneratedStream(header=header, updates=updates, meta=meta)


# ---------------------------------------------------------------------------
# churn plumbing


def _with_churn(spec, rng, final, max_arity, weighted) -> list[EdgeUpdate]:
    """Interleave throwaway insert/delete pairs among the final inserts."""
    seen = {verts for verts, _ in final}
    extra = int(spec.churn / (1.0 - spec.churn) * len(final))
    churn_edges = []
    attempts = 0
    while len(churn_edges) < extra:
        attempts += 1
        if attempts > 200 * extra + 2000:
            raise ValueError(
                "churn cannot find enough fresh edges; lower churn or grow n"
            )
        verts = _random_edge(rng, spec.n, rng.integers(2, max_arity + 1))
        if verts in seen:
            continue
        seen.add(verts)
        weight = float(rng.integers(1, spec.weight_levels + 1)) if weighted else 1.0
        churn_edges.append((verts, weight))

    total = len(final) + 2 * len(churn_edges)
    slots = rng.permutation(total)
    events: list[EdgeUpdate | None] = [None] * total
    at = 0
    for verts, weight in final:
        events[slots[at]] = EdgeUpdate(vertices=verts, weight=weight, delta=1)
        at += 1
    for verts, weight in churn_edges:
        first, second = sorted((slots[at], slots[at + 1]))
        at += 2
        events[first] = EdgeUpdate(vertices=verts, weight=weight, delta=1)
        events[second] = EdgeUpdate(vertices=verts, weight=weight, delta=-1)
    return [e for e in events if e is not None]


def _random_edge(rng, n: int, arity: int) -> tuple[int, ...]:
    while True:
        verts = rng.integers(0, n, size=int(arity))
        if len(set(verts.tolist())) == arity:
            return tuple(sorted(int(v) for v in verts))


def _draw_distinct(rng, pool, size: int, *, avoid=()) -> tuple[int, ...]:
    """``size`` distinct entries of ``pool``, none in ``avoid``."""
    avoid = set(avoid)
    while True:
        picks = {int(pool[int(i)]) for i in rng.integers(0, len(pool), size=size)}
        if len(picks) == size and not picks & avoid:
            return tuple(picks)


# ---------------------------------------------------------------------------
# families


def _planted_matching(spec, rng):
    """k disjoint planted pairs plus noise, all incident to one side.

    Every edge touches the k-vertex side A, so no matching beats the
    planted one and A is an optimal cover; noise only adds bulk.
    """
    k = spec.k
    if k < 1 or 2 * k > spec.n:
        raise ValueError("planted matching needs 1 <= k and 2k <= n")
    # every noise edge joins a center to a non-center, so only k*(n-k-1)
    # distinct ones exist beyond the planted k; an oversized request would
    # spin forever looking for fresh edges
    capacity = k * (spec.n - k - 1)
    noise = spec.noise if spec.noise >= 0 else min(20 * k + 40, capacity)
    if noise > capacity:
        raise ValueError(f"noise {noise} exceeds the {capacity} available edges")
    perm = rng.permutation(spec.n)
    centers = [int(v) for v in perm[:k]]
    partners = [int(v) for v in perm[k : 2 * k]]
    rest = perm[k:]

    edges = {tuple(sorted((c, p))) for c, p in zip(centers, partners)}
    while len(edges) < k + noise:
        c = centers[int(rng.integers(0, k))]
        (other,) = _draw_distinct(rng, rest, 1)
        edges.add(tuple(sorted((c, other))))
    final = [(verts, 1.0) for verts in sorted(edges)]
    meta = {
        "matching": k,
        "vertex_cover": k,
        "bipartite": True,
        "cover_witness": sorted(centers),
    }
    return final, meta, 2


def _planted_hitting_set(spec, rng):
    """k sunflowers with k+2 disjoint petals around disjoint cores.

    Hitting all petals of one flower costs either its core vertex or k+2
    distinct petal vertices, so the cores are the unique minimum hitting
    set; one petal per flower is a maximum disjoint family.
    """
    k, d = spec.k, spec.d
    petals = k + 2
    need = k + k * petals * (d - 1)
    if k < 1 or d < 2 or need > spec.n:
        raise ValueError(f"sunflower family needs n >= {need}")
    perm = rng.permutation(spec.n)
    cores = [int(v) for v in perm[:k]]
    pool = [int(v) for v in perm[k:]]
    final = []
    at = 0
    for core in cores:
        for _ in range(petals):
            verts = tuple(sorted([core] + pool[at : at + d - 1]))
            final.append((verts, 1.0))
            at += d - 1
    meta = {
        "hitting_set": k,
        "hypergraph_matching": k,
        "cores": sorted(cores),
    }
    return sorted(final), meta, d


def _planted_hypermatching(spec, rng):
    """k disjoint d-edges plus noise hyperedges all touching their spine.

    The spine S holds one vertex of each planted edge; every noise edge
    includes a spine vertex, so S certifies both the maximum matching and
    the minimum hitting set at exactly k.
    """
    k, d = spec.k, spec.d
    if k < 1 or d < 2 or k * d > spec.n:
        raise ValueError("planted hypermatching needs k*d <= n")
    capacity = math.comb(spec.n, d) - math.comb(spec.n - k, d) - k
    noise = spec.noise if spec.noise >= 0 else min(10 * k, capacity)
    if noise > capacity:
        raise ValueError(f"noise {noise} exceeds the {capacity} available edges")
    perm = rng.permutation(spec.n)
    spine = [int(v) for v in perm[:k]]
    pool = [int(v) for v in perm[k:]]
    edges = set()
    for i, s in enumerate(spine):
        others = pool[i * (d - 1) : (i + 1) * (d - 1)]
        edges.add(tuple(sorted([s] + others)))
    everyone = perm
    while len(edges) < k + noise:
        s = spine[int(rng.integers(0, k))]
        others = _draw_distinct(rng, everyone, d - 1, avoid=(s,))
        edges.add(tuple(sorted((s,) + others)))
    meta = {"hypergraph_matching": k, "hitting_set": k, "spine": sorted(spine)}
    return [(verts, 1.0) for verts in sorted(edges)], meta, d


def _bounded_arboricity(spec, rng):
    """Union of nu uniformly random spanning trees; arboricity <= nu."""
    if spec.nu < 1:
        raise ValueError("nu must be positive")
    edges = set()
    for _ in range(spec.nu):
        order = rng.permutation(spec.n)
        for i in range(1, spec.n):
            parent = int(order[int(rng.integers(0, i))])
            edges.add(tuple(sorted((int(order[i]), parent))))
    meta = {"nu": spec.nu, "forest": spec.nu == 1}
    return [(verts, 1.0) for verts in sorted(edges)], meta, 2


def _bipartite_complete(spec, rng):
    """Four layers: a complete bipartite block and two perfect matchings.

    Every edge touches the two middle layers of k/2 vertices each, capping
    the matching at k; pairing layer two into layer one and layer three
    into layer four reaches it.  The dense block makes the color-pair count
    of kernel sketches grow with the square of the promise, which is what
    the space-scaling checks exercise.
    """
    k = spec.k
    if k < 2 or k % 2:
        raise ValueError("this family needs even k >= 2")
    half = k // 2
    if spec.n < 2 * k:
        raise ValueError("this family needs n >= 2k")
    perm = [int(v) for v in rng.permutation(spec.n)]
    first = perm[: spec.n - 3 * half]
    second = perm[spec.n - 3 * half : spec.n - 2 * half]
    third = perm[spec.n - 2 * half : spec.n - half]
    fourth = perm[spec.n - half :]
    edges = [tuple(sorted((u, v))) for u in first for v in second]
    edges += [tuple(sorted(p)) for p in zip(second, third)]
    edges += [tuple(sorted(p)) for p in zip(third, fourth)]
    meta = {"matching": k, "bipartite": True}
    return [(verts, 1.0) for verts in sorted(set(edges))], meta, 2


def _biclique(spec, rng):
    """Complete bipartite graph on a + b randomly placed vertices."""
    if spec.a < 1 or spec.b < 1 or spec.a + spec.b > spec.n:
        raise ValueError("biclique needs a, b >= 1 and a + b <= n")
    perm = [int(v) for v in rng.permutation(spec.n)]
    left = perm[: spec.a]
    right = perm[spec.a : spec.a + spec.b]
    final = [(tuple(sorted((u, v))), 1.0) for u in left for v in right]
    meta = {
        "matching": min(spec.a, spec.b),
        "vertex_cover": min(spec.a, spec.b),
        "bipartite": True,
    }
    return sorted(final), meta, 2


def _grid(spec, rng):
    """Subsampled lattice on rows x cols vertices; planar, arboricity <= 2."""
    rows, cols = spec.rows, spec.cols
    if rows < 1 or cols < 1 or rows * cols > spec.n:
        raise ValueError("grid needs rows*cols <= n")
    edges = []
    for i in range(rows):
        for j in range(cols):
            v = i * cols + j
            if j + 1 < cols:
                edges.append((v, v + 1))
            if i + 1 < rows:
                edges.append((v, v + cols))
    if spec.keep < 1.0:
        mask = rng.random(len(edges)) < spec.keep
        edges = [e for e, hit in zip(edges, mask) if hit]
    meta = {"nu": 2, "bipartite": True}
    return [(e, 1.0) for e in sorted(edges)], meta, 2


def _random_gnm(spec, rng):
    """m distinct uniform edges; ``span`` restricts them to a small subset."""
    d = spec.d
    span = spec.span if spec.span else spec.n
    if span < d or spec.m < 0:
        raise ValueError("span must be at least the arity")
    if spec.m > math.comb(span, d):
        raise ValueError("more edges requested than the span can hold")
    perm = rng.permutation(spec.n)
    pool = [int(v) for v in perm[:span]]
    edges = set()
    limit = spec.m
    while len(edges) < limit:
        edges.add(tuple(sorted(_draw_distinct(rng, pool, d))))
    meta = {"span": span}
    return [(verts, 1.0) for verts in sorted(edges)], meta, d


_BUILDERS = {
    "planted_matching": _planted_matching,
    "planted_hitting_set": _planted_hitting_set,
    "planted_hypermatching": _planted_hypermatching,
    "bounded_arboricity": _bounded_arboricity,
    "bipartite_complete": _bipartite_complete,
    "biclique": _biclique,
    "grid": _grid,
    "random_gnm": _random_gnm,
}
