"""Streaming algorithms composed from the sampler, sketches and solvers.

Every algorithm is packaged as an engine with a uniform life cycle:
construct from parameters and a stream header, feed updates (insertions and
deletions in any valid order), optionally merge with engines that saw other
shards of the same logical stream, and finish to obtain a report.  Engines
serialize to self-describing byte strings, which is what the CLI writes to
sketch files; a merged file is indistinguishable from one built over the
concatenated stream.

The module-level functions wrap the engines for one-shot use and carry the
contract of each operation in their docstrings: which promise parameter
they take, what the output guarantees, and which flags a report can carry.
"""

from __future__ import annotations

import json
import math
from dataclasses import asdict, dataclass, field, replace

from .hashing import derive64
from .sample import SampleConfig, SampleSketch, SampledEdge, SpaceReport
from .serialize import FormatError, Reader, Writer
from .sketches import (
    FAIL,
    FINGERPRINT_PRIME,
    DegreeTable,
    MergeError,
    SparseRecovery,
    decode_edge,
    encode_edge,
)
from .solvers import (
    Exceeds,
    PropertySpec,
    SmallGraph,
    Solution,
    matching_pairs,
    max_hypergraph_matching,
    max_weight_matching,
    min_hitting_set,
    min_vertex_cover,
    solve_contraction_property,
)
from .streams import EdgeUpdate, StreamHeader, parse_header

SKETCH_MAGIC = b"GSKCH1\n"

FLAG_PROMISE = "promise_violation"
FLAG_OVERFLOW = "sparse_recovery_overflow"
FLAG_CLAMPED = "sampling_rate_clamped"
FLAG_CAPPED = "kernel_matching_capped"

_BAD_FLAGS = (FLAG_PROMISE, FLAG_OVERFLOW)


@dataclass(frozen=True)
class AlgoParams:
    """Knobs shared by all engines; each mode reads the subset it needs.

    ``r_const`` and ``b_const`` scale the repetition and color counts whose
    orders of growth are fixed by the analysis; ``t_cap`` limits the hash
    independence bought for the large-matching mode; ``trials`` is the
    amplification count for contraction search.
    """

    k: int = 1
    alpha: float = 1.0
    eps: float = 0.5
    nu: int = 1
    d: int = 2
    r_const: int = 5
    b_const: int = 100
    t_cap: int = 64
    trials: int = 5
    prop: str = ""
    round_weights: bool = False
    cell_mode: str = ""
    seed: int = 0

    def __post_init__(self) -> None:
        if self.k < 1:
            raise ValueError("k must be positive")
        if self.alpha < 1:
            raise ValueError("alpha must be at least 1")
        if not 0 < self.eps <= 1:
            raise ValueError("eps must be in (0, 1]")
        if self.nu < 1:
            raise ValueError("nu must be at least 1")
        if self.d < 2:
            raise ValueError("d must be at least 2")
        if min(self.r_const, self.b_const) < 1:
            raise ValueError("constant multipliers must be positive")
        if self.t_cap < 2:
            raise ValueError("t_cap must be at least 2")
        if self.trials < 1:
            raise ValueError("trials must be positive")


@dataclass
class RunReport:
    """What a finished engine hands back.

    ``value`` is the headline number (a size, weight, or estimate);
    ``solutions`` holds certificates by role; ``components`` the named
    intermediate quantities an estimate combines.  ``success`` is False
    exactly when a flag signals a broken promise or degraded recovery.
    """

    mode: str
    params: AlgoParams
    value: float
    solutions: dict[str, Solution | Exceeds] = field(default_factory=dict)
    components: dict[str, float] = field(default_factory=dict)
    flags: tuple[str, ...] = ()
    space: SpaceReport | None = None

    @property
    def success(self) -> bool:
        return not any(f in _BAD_FLAGS for f in self.flags)


def _reps_for(r_const: int, k: int) -> int:
    return max(1, math.ceil(r_const * math.log2(k + 2)))


def _kernel_graph(sketch: SampleSketch) -> tuple[SmallGraph, list[str]]:
    """Materialize the sampled subgraph, reporting recovery diagnostics."""
    sub = sketch.extract_subgraph()
    flags = []
    if sub.l0_failures:
        flags.append(f"l0_failures={sub.l0_failures}")
    if sub.corrupt_cells:
        flags.append(f"corrupt_cells={sub.corrupt_cells}")
    pairs = sub.distinct_edges()
    graph = SmallGraph(
        n=sketch.config.n,
        edges=[verts for verts, _ in pairs],
        weights=[w for _, w in pairs],
    )
    return graph, flags


class StreamEngine:
    """Shared life cycle: feed updates, merge shards, finish, serialize."""

    mode = ""

    def __init__(self, params: AlgoParams, header: StreamHeader):
        self.params = params
        self.header = header

    def update(self, upd: EdgeUpdate) -> None:
        raise NotImplementedError

    def absorb(self, updates) -> "StreamEngine":
        for upd in updates:
            self.update(upd)
        return self

    def finish(self) -> RunReport:
        raise NotImplementedError

    # -- merge -------------------------------------------------------------

    def merge(self, other: "StreamEngine") -> "StreamEngine":
        if type(other) is not type(self):
            raise MergeError(
                f"cannot merge {self.mode!r} engine with {other.mode!r}"
            )
        if self.params != other.params or self.header != other.header:
            raise MergeError("engines disagree on parameters or header")
        self._merge_parts(other)
        return self

    def _merge_parts(self, other: "StreamEngine") -> None:
        raise NotImplementedError

    # -- serialization -----------------------------------------------------

    def _parts(self) -> list[bytes]:
        raise NotImplementedError

    @classmethod
    def _from_parts(
        cls, params: AlgoParams, header: StreamHeader, parts: list[bytes]
    ) -> "StreamEngine":
        raise NotImplementedError

    def to_bytes(self) -> bytes:
        w = Writer()
        w.text(self.mode)
        w.text(json.dumps(asdict(self.params), sort_keys=True))
        w.text(self.header.render())
        parts = self._parts()
        w.u32(len(parts))
        for p in parts:
            w.blob(p)
        return SKETCH_MAGIC + w.getvalue()


def engine_from_bytes(data: bytes) -> StreamEngine:
    if not data.startswith(SKETCH_MAGIC):
        raise FormatError("not a sketch file")
    r = Reader(data[len(SKETCH_MAGIC):])
    mode = r.text()
    params = AlgoParams(**json.loads(r.text()))
    header = parse_header(r.text())
    parts = [r.blob() for _ in range(r.u32())]
    r.expect_done()
    cls = ENGINE_MODES.get(mode)
    if cls is None:
        raise FormatError(f"unknown engine mode {mode!r}")
    eng = cls._from_parts(params, header, parts)
    return eng


class _SingleSketchEngine(StreamEngine):
    """Base for engines whose whole state is one sampler sketch."""

    def _build_config(self) -> SampleConfig:
        raise NotImplementedError

    def __init__(self, params: AlgoParams, header: StreamHeader):
        super().__init__(params, header)
        self.sketch = SampleSketch(self._build_config())

    def update(self, upd: EdgeUpdate) -> None:
        self.sketch.process_update(upd)

    def _merge_parts(self, other: StreamEngine) -> None:
        self.sketch.merge(other.sketch)

    def _parts(self) -> list[bytes]:
        return [self.sketch.to_bytes()]

    @classmethod
    def _from_parts(cls, params, header, parts):
        eng = cls.__new__(cls)
        StreamEngine.__init__(eng, params, header)
        (blob,) = parts
        eng.sketch = SampleSketch.from_bytes(blob)
        return eng


# ---------------------------------------------------------------------------
# exact matching and vertex cover under a small-matching promise


class ExactMatchingEngine(_SingleSketchEngine):
    """Kernel sketch preserving both matching and vertex cover sizes.

    Colors scale with the promised bound on the matching size, so that with
    high probability the recovered subgraph has the same maximum matching
    and the same minimum vertex cover as the full stream graph, and the
    cover found on the kernel covers every live edge.
    """

    mode = "exact-matching"

    def _build_config(self) -> SampleConfig:
        p = self.params
        return SampleConfig(
            n=self.header.n,
            colors=p.b_const * p.k,
            set_limit=2,
            reps=_reps_for(p.r_const, p.k),
            independence=2,
            cell_mode=p.cell_mode or "xor_unique",
            seed=p.seed,
            max_arity=2,
        )

    def finish(self, compute_cover: bool = True) -> RunReport:
        k = self.params.k
        kernel, flags = _kernel_graph(self.sketch)
        pairs, complete = matching_pairs(kernel, cap=k)
        matching = Solution(
            kind="matching", elements=tuple(pairs), total_weight=float(len(pairs))
        )
        solutions: dict[str, Solution | Exceeds] = {"matching": matching}
        if not complete or len(pairs) > k:
            flags.append(FLAG_PROMISE)
            solutions["vertex_cover"] = Exceeds(2 * k)
        elif compute_cover:
            cover = min_vertex_cover(kernel, budget=2 * k)
            solutions["vertex_cover"] = cover
            if isinstance(cover, Exceeds):
                flags.append(FLAG_PROMISE)
        return RunReport(
            mode=self.mode,
            params=self.params,
            value=float(len(pairs)),
            solutions=solutions,
            components={"kernel_edges": float(len(kernel.edges))},
            flags=tuple(flags),
            space=self.sketch.space_report(),
        )


class WeightedMatchingEngine(_SingleSketchEngine):
    """Exact or power-rounded maximum weight matching, small-matching promise.

    The sampler keeps independent cells per weight class, so distinct
    weights survive deletions unharmed.  With ``round_weights`` set, every
    weight is rounded up to the nearest power of (1 + eps) on the way in;
    the reported optimum then overshoots the true one by at most that
    factor while collapsing the number of classes to O(log of the spread).
    """

    mode = "exact-weighted"

    def _build_config(self) -> SampleConfig:
        p = self.params
        return SampleConfig(
            n=self.header.n,
            colors=p.b_const * p.k,
            set_limit=2,
            reps=_reps_for(p.r_const, p.k),
            independence=2,
            cell_mode=p.cell_mode or "xor_unique",
            seed=p.seed,
            max_arity=2,
        )

    def _rounded(self, weight: float) -> float:
        base = 1.0 + self.params.eps
        if weight <= 0:
            raise ValueError("weights must be positive")
        exponent = math.ceil(math.log(weight, base) - 1e-12)
        return base ** exponent

    def update(self, upd: EdgeUpdate) -> None:
        if self.params.round_weights:
            upd = replace(upd, weight=self._rounded(upd.weight))
        self.sketch.process_update(upd)

    def finish(self) -> RunReport:
        k = self.params.k
        kernel, flags = _kernel_graph(self.sketch)
        _, complete = matching_pairs(kernel, cap=k)
        if not complete:
            flags.append(FLAG_PROMISE)
        sol = max_weight_matching(kernel, cardinality_cap=k if complete else None)
        return RunReport(
            mode=self.mode,
            params=self.params,
            value=sol.total_weight,
            solutions={"weighted_matching": sol},
            components={"kernel_edges": float(len(kernel.edges))},
            flags=tuple(flags),
            space=self.sketch.space_report(),
        )


# ---------------------------------------------------------------------------
# approximate large matching and the estimates built from it


class ApproxMatchingEngine(_SingleSketchEngine):
    """Greedy matching over monochromatic samples; factor ~2*alpha/(1-eps).

    Few colors force many vertex collisions, so each repetition yields a
    handful of single-colored edges; the greedy pass walks repetitions in
    creation order and colors in ascending order, taking any recovered edge
    whose color is still unused and whose endpoints are still free.  Under
    the promise that the stream graph has a matching of size ``k``, enough
    repetitions make the result at least (1-eps)k/(2*alpha) with high
    probability; without the promise the output is still a valid matching.
    """

    mode = "approx-matching"

    def _build_config(self) -> SampleConfig:
        p = self.params
        reps = max(
            1,
            math.ceil(
                p.r_const * p.k * p.alpha ** -2 * p.eps ** -2 * math.log2(p.k + 2)
            ),
        )
        return SampleConfig(
            n=self.header.n,
            colors=max(1, math.ceil(2 * p.k / p.alpha)),
            set_limit=1,
            reps=reps,
            independence=max(2, min(2 * p.k, p.t_cap)),
            cell_mode=p.cell_mode or "l0",
            seed=p.seed,
            max_arity=2,
        )

    def greedy_matching(self) -> tuple[list[SampledEdge], list[str]]:
        sub = self.sketch.extract_subgraph()
        flags = []
        if sub.l0_failures:
            flags.append(f"l0_failures={sub.l0_failures}")
        if sub.corrupt_cells:
            flags.append(f"corrupt_cells={sub.corrupt_cells}")
        chosen: list[SampledEdge] = []
        used_colors: set[int] = set()
        matched: set[int] = set()
        for e in sorted(sub.edges, key=lambda e: (e.rep, e.colors, e.weight)):
            color = e.colors[0]
            if color in used_colors:
                continue
            if any(v in matched for v in e.vertices):
                continue
            chosen.append(e)
            used_colors.add(color)
            matched.update(e.vertices)
        return chosen, flags

    def finish(self) -> RunReport:
        chosen, flags = self.greedy_matching()
        sol = Solution(
            kind="matching",
            elements=tuple(sorted(e.vertices for e in chosen)),
            total_weight=float(len(chosen)),
        )
        return RunReport(
            mode=self.mode,
            params=self.params,
            value=float(len(chosen)),
            solutions={"matching": sol},
            components={"guarantee": (1 - self.params.eps) * self.params.k / (2 * self.params.alpha)},
            flags=tuple(flags),
            space=self.sketch.space_report(),
        )


class SemiStreamingEngine(StreamEngine):
    """Matching size estimate with no promise: one guess per power of two.

    Runs the approximate matcher for every promise level k = 1, 2, 4, ...
    up to the vertex count and reports the largest matching any level
    found.  Levels whose guess overshoots the truth return small matchings;
    the level just below the truth delivers the guarantee.
    """

    mode = "semi-estimate"

    def __init__(self, params: AlgoParams, header: StreamHeader):
        super().__init__(params, header)
        self.levels = [
            ApproxMatchingEngine(
                replace(params, k=1 << i, seed=derive64(params.seed, "level", i)),
                header,
            )
            for i in range(max(1, header.n - 1).bit_length() + 1)
        ]

    def update(self, upd: EdgeUpdate) -> None:
        for eng in self.levels:
            eng.update(upd)

    def best_matching(self) -> tuple[list[SampledEdge], int, list[str]]:
        """Largest per-level greedy matching, its level, and diagnostics."""
        best: list[SampledEdge] = []
        best_level = 0
        flags: list[str] = []
        for i, eng in enumerate(self.levels):
            chosen, fl = eng.greedy_matching()
            flags.extend(f"level{i}:{f}" for f in fl)
            if len(chosen) > len(best):
                best = chosen
                best_level = i
        return best, best_level, flags

    def finish(self) -> RunReport:
        best, best_level, flags = self.best_matching()
        sol = Solution(
            kind="matching",
            elements=tuple(sorted(e.vertices for e in best)),
            total_weight=float(len(best)),
        )
        cells = sum(eng.sketch.space_report().cells for eng in self.levels)
        return RunReport(
            mode=self.mode,
            params=self.params,
            value=float(len(best)),
            solutions={"matching": sol},
            components={
                "levels": float(len(self.levels)),
                "best_level": float(best_level),
                "total_cells": float(cells),
            },
            flags=tuple(flags),
        )

    def _merge_parts(self, other: StreamEngine) -> None:
        for mine, theirs in zip(self.levels, other.levels):
            mine.sketch.merge(theirs.sketch)

    def _parts(self) -> list[bytes]:
        return [eng.to_bytes() for eng in self.levels]

    @classmethod
    def _from_parts(cls, params, header, parts):
        eng = cls.__new__(cls)
        StreamEngine.__init__(eng, params, header)
        eng.levels = [engine_from_bytes(p) for p in parts]
        return eng


class WeightedEstimateEngine(StreamEngine):
    """Weighted matching estimate by weight-threshold layering.

    Level i sees the substream of edges with weight at least (1+eps)^i and
    estimates its matching size; the final answer greedily combines the
    per-level matchings from heaviest down, scoring with the edges' real
    weights.  Levels are created on first use, so unweighted streams cost
    one level.
    """

    mode = "weighted-estimate"

    def __init__(self, params: AlgoParams, header: StreamHeader):
        super().__init__(params, header)
        self._levels: dict[int, SemiStreamingEngine] = {}

    def _level_engine(self, i: int) -> SemiStreamingEngine:
        eng = self._levels.get(i)
        if eng is None:
            eng = SemiStreamingEngine(
                replace(self.params, seed=derive64(self.params.seed, "weight", i)),
                self.header,
            )
            self._levels[i] = eng
        return eng

    def update(self, upd: EdgeUpdate) -> None:
        if upd.weight < 1:
            raise ValueError("weighted estimation expects weights >= 1")
        base = 1.0 + self.params.eps
        i = 0
        self._level_engine(0).update(upd)
        while base ** (i + 1) <= upd.weight:
            i += 1
            self._level_engine(i).update(upd)

    def finish(self) -> RunReport:
        flags: list[str] = []
        matched: set[int] = set()
        chosen: list[SampledEdge] = []
        components: dict[str, float] = {}
        for i in sorted(self._levels, reverse=True):
            level_best, _, fl = self._levels[i].best_matching()
            components[f"level_{i}"] = float(len(level_best))
            flags.extend(fl)
            for e in level_best:
                if any(v in matched for v in e.vertices):
                    continue
                chosen.append(e)
                matched.update(e.vertices)
        total = math.fsum(e.weight for e in chosen)
        sol = Solution(
            kind="weighted_matching",
            elements=tuple(sorted(e.vertices for e in chosen)),
            total_weight=total,
        )
        return RunReport(
            mode=self.mode,
            params=self.params,
            value=total,
            solutions={"weighted_matching": sol},
            components=components,
            flags=tuple(flags),
        )

    def _merge_parts(self, other: StreamEngine) -> None:
        for i, theirs in other._levels.items():
            mine = self._levels.get(i)
            if mine is None:
                self._levels[i] = theirs
            else:
                mine.merge(theirs)

    def _parts(self) -> list[bytes]:
        out = []
        for i in sorted(self._levels):
            w = Writer()
            w.u32(i)
            w.blob(self._levels[i].to_bytes())
            out.append(w.getvalue())
        return out

    @classmethod
    def _from_parts(cls, params, header, parts):
        eng = cls.__new__(cls)
        StreamEngine.__init__(eng, params, header)
        eng._levels = {}
        for p in parts:
            r = Reader(p)
            i = r.u32()
            eng._levels[i] = engine_from_bytes(r.blob())
            r.expect_done()
        return eng


# ---------------------------------------------------------------------------
# matching size under an arboricity bound


class ArboricityEngine(StreamEngine):
    """Matching size estimate for graphs of bounded arboricity.

    Combines three lower-bound witnesses and returns their maximum: the
    matching of a kernel sketch run with promise 2*n^(2/5); the count of
    sampled high-degree vertices, scaled up by the sampling rate; and the
    count of recovered sampled edges with no high-degree endpoint, scaled
    by the rate squared.  Vertices join the sample via a seeded membership
    hash so that inserts and deletes of the same edge agree.
    """

    mode = "arboricity"

    def __init__(self, params: AlgoParams, header: StreamHeader):
        super().__init__(params, header)
        n = header.n
        self.k_inner = max(1, math.ceil(2 * n ** 0.4))
        raw_rate = 8 * params.eps ** -2 * n ** -0.2
        self.rate = min(1.0, raw_rate)
        self.rate_clamped = raw_rate > 1.0
        self._member_bound = int(self.rate * 2.0 ** 64)
        self.sketch = SampleSketch(self._inner_config())
        self.degrees = DegreeTable()
        members = sum(1 for v in range(n) if self._is_member(v))
        self.sampled_count = members
        self.induced = SparseRecovery(
            s=max(1, 2 * params.nu * members),
            delta=0.01,
            seed=derive64(params.seed, "induced"),
        )

    def _inner_config(self) -> SampleConfig:
        p = self.params
        return SampleConfig(
            n=self.header.n,
            colors=p.b_const * self.k_inner,
            set_limit=2,
            reps=_reps_for(p.r_const, self.k_inner),
            independence=2,
            cell_mode=p.cell_mode or "xor_unique",
            seed=derive64(p.seed, "inner"),
            max_arity=2,
        )

    def _is_member(self, vertex: int) -> bool:
        return derive64(self.params.seed, "member", vertex) < self._member_bound

    def update(self, upd: EdgeUpdate) -> None:
        if upd.arity != 2:
            raise ValueError("arboricity estimation expects arity-2 edges")
        self.sketch.process_update(upd)
        u, v = upd.vertices
        mu, mv = self._is_member(u), self._is_member(v)
        if mu:
            self.degrees.update(u, upd.delta)
        if mv:
            self.degrees.update(v, upd.delta)
        if mu and mv:
            self.induced.update(encode_edge(upd.vertices, self.header.n), upd.delta)

    def finish(self) -> RunReport:
        p = self.params
        threshold = 2 * p.nu + 3
        kernel, flags = _kernel_graph(self.sketch)
        pairs, complete = matching_pairs(kernel, cap=self.k_inner)
        kernel_matching = len(pairs)
        if not complete:
            flags.append(FLAG_CAPPED)
        if self.rate_clamped:
            flags.append(FLAG_CLAMPED)

        heavy = self.degrees.count_at_least(threshold)
        decoded = self.induced.decode()
        if decoded is FAIL:
            flags.append(FLAG_OVERFLOW)
            shallow_term = 0.0
        else:
            deg = self.degrees.deg
            shallow = sum(
                1
                for key, mult in decoded.items()
                if mult != 0
                and all(
                    deg.get(v, 0) < threshold
                    for v in decode_edge(key, self.header.n)
                )
            )
            shallow_term = shallow / self.rate ** 2
        heavy_term = heavy / self.rate
        value = max(float(kernel_matching), heavy_term, shallow_term)
        return RunReport(
            mode=self.mode,
            params=self.params,
            value=value,
            solutions={
                "kernel_matching": Solution(
                    kind="matching",
                    elements=tuple(pairs),
                    total_weight=float(kernel_matching),
                )
            },
            components={
                "kernel_matching": float(kernel_matching),
                "heavy_over_rate": heavy_term,
                "shallow_over_rate_sq": shallow_term,
                "rate": self.rate,
                "sampled_vertices": float(self.sampled_count),
                "inner_promise": float(self.k_inner),
            },
            flags=tuple(flags),
            space=self.sketch.space_report(),
        )

    def _merge_parts(self, other: StreamEngine) -> None:
        self.sketch.merge(other.sketch)
        self.degrees.merge(other.degrees)
        self.induced.merge(other.induced)

    def _parts(self) -> list[bytes]:
        return [self.sketch.to_bytes(), self.degrees.to_bytes(), self.induced.to_bytes()]

    @classmethod
    def _from_parts(cls, params, header, parts):
        eng = cls(params, header)
        sketch_blob, degrees_blob, induced_blob = parts
        eng.sketch = SampleSketch.from_bytes(sketch_blob)
        eng.degrees = DegreeTable.from_bytes(degrees_blob)
        eng.induced = SparseRecovery.from_bytes(induced_blob)
        return eng


# ---------------------------------------------------------------------------
# hypergraph problems


class HittingSetEngine(_SingleSketchEngine):
    """Minimum hitting set under a promise on the optimum size."""

    mode = "hitting-set"

    def _build_config(self) -> SampleConfig:
        p = self.params
        return SampleConfig(
            n=self.header.n,
            colors=p.b_const * p.k,
            set_limit=p.d,
            reps=_reps_for(p.r_const, p.k),
            independence=2,
            cell_mode=p.cell_mode or "l0",
            seed=p.seed,
            max_arity=p.d,
        )

    def finish(self) -> RunReport:
        kernel, flags = _kernel_graph(self.sketch)
        res = min_hitting_set(kernel, budget=self.params.k)
        if isinstance(res, Exceeds):
            flags.append(FLAG_PROMISE)
            value = math.inf
        else:
            value = float(res.size)
        return RunReport(
            mode=self.mode,
            params=self.params,
            value=value,
            solutions={"hitting_set": res},
            components={"kernel_edges": float(len(kernel.edges))},
            flags=tuple(flags),
            space=self.sketch.space_report(),
        )


class HyperMatchingEngine(_SingleSketchEngine):
    """Maximum disjoint hyperedges; promise is on k/d, not k.

    The sketch is the same family as for hitting sets; the promise the
    analysis needs is that the maximum matching is at most k divided by the
    arity, so that is the budget handed to the solver.
    """

    mode = "hyper-matching"

    _build_config = HittingSetEngine._build_config

    def finish(self) -> RunReport:
        kernel, flags = _kernel_graph(self.sketch)
        budget = max(1, self.params.k // self.params.d)
        sol = max_hypergraph_matching(kernel, budget=budget)
        if sol.size > budget:
            flags.append(FLAG_PROMISE)
        return RunReport(
            mode=self.mode,
            params=self.params,
            value=float(sol.size),
            solutions={"hypergraph_matching": sol},
            components={
                "kernel_edges": float(len(kernel.edges)),
                "promise_budget": float(budget),
            },
            flags=tuple(flags),
            space=self.sketch.space_report(),
        )


# ---------------------------------------------------------------------------
# contraction-closed subgraph search


class ContractionEngine(_SingleSketchEngine):
    """Optimum size of a contraction-closed property via color contraction.

    Colors quadratic in the vertex bound keep some optimum solution's
    vertices in distinct classes with constant probability, in which case
    the graph on color classes contains an isomorphic copy of it; any
    solution found on color classes lifts back to a stream subgraph of the
    same size.  Several independent repetitions amplify the constant.
    """

    mode = "contraction"

    def _build_config(self) -> SampleConfig:
        p = self.params
        if not p.prop:
            raise ValueError("contraction search needs a property, e.g. max_forest")
        PropertySpec.parse(p.prop)
        return SampleConfig(
            n=self.header.n,
            colors=4 * p.k * p.k,
            set_limit=2,
            reps=p.trials,
            independence=2,
            cell_mode=p.cell_mode or "xor_unique",
            seed=p.seed,
            max_arity=2,
        )

    def update(self, upd: EdgeUpdate) -> None:
        if upd.arity != 2:
            raise ValueError("contraction search expects arity-2 edges")
        self.sketch.process_update(upd)

    def finish(self) -> RunReport:
        prop = PropertySpec.parse(self.params.prop)
        best: Solution | None = None
        witnesses: tuple = ()
        components: dict[str, float] = {}
        for g in self.sketch.extract_contracted():
            graph = SmallGraph(n=g.colors, edges=g.edges)
            sol = solve_contraction_property(graph, prop)
            components[f"trial_{g.rep}"] = float(sol.size)
            if best is None or sol.size > best.size:
                best = sol
                found = [
                    g.representatives.get(pair)
                    for pair in sol.elements
                    if g.representatives.get(pair) is not None
                ]
                witnesses = tuple(sorted(found))
        assert best is not None
        return RunReport(
            mode=self.mode,
            params=self.params,
            value=float(best.size),
            solutions={
                "subgraph": best,
                "witness_edges": Solution(
                    kind="edges",
                    elements=witnesses,
                    total_weight=float(len(witnesses)),
                ),
            },
            components=components,
            flags=(),
            space=self.sketch.space_report(),
        )


ENGINE_MODES: dict[str, type[StreamEngine]] = {
    cls.mode: cls
    for cls in (
        ExactMatchingEngine,
        WeightedMatchingEngine,
        ApproxMatchingEngine,
        SemiStreamingEngine,
        WeightedEstimateEngine,
        ArboricityEngine,
        HittingSetEngine,
        HyperMatchingEngine,
        ContractionEngine,
    )
}


def build_engine(mode: str, params: AlgoParams, header: StreamHeader) -> StreamEngine:
    cls = ENGINE_MODES.get(mode)
    if cls is None:
        raise ValueError(f"unknown mode {mode!r}; choose from {sorted(ENGINE_MODES)}")
    return cls(params, header)


# ---------------------------------------------------------------------------
# one-shot entry points


def _run(mode: str, updates, n: int, params: AlgoParams, max_arity: int = 2):
    header = StreamHeader(n=n, max_arity=max_arity, weighted=True)
    eng = build_engine(mode, params, header)
    eng.absorb(updates)
    return eng.finish()


def exact_small_matching(
    updates, n: int, k: int, *, seed: int = 0, r_const: int = 5, b_const: int = 100
) -> tuple[Solution, Solution | Exceeds]:
    """Maximum matching and minimum vertex cover, promised matching <= k.

    Returns the matching and the cover found on the sampled kernel; with
    high probability both sizes equal the stream graph's optima and the
    cover covers every live edge.  A promise violation surfaces as an
    :class:`Exceeds` cover and a flagged report, never an exception.
    """
    report = _run(
        "exact-matching",
        updates,
        n,
        AlgoParams(k=k, seed=seed, r_const=r_const, b_const=b_const),
    )
    return report.solutions["matching"], report.solutions["vertex_cover"]


def exact_small_weighted_matching(
    updates,
    n: int,
    k: int,
    *,
    eps: float = 0.1,
    round_weights: bool = False,
    seed: int = 0,
    r_const: int = 5,
    b_const: int = 100,
) -> Solution:
    """Maximum weight matching under a cardinality promise.

    Without rounding the result is exact with high probability; with
    rounding it is within a factor (1 + eps) above, using far fewer weight
    classes when weights spread over a wide range.
    """
    report = _run(
        "exact-weighted",
        updates,
        n,
        AlgoParams(
            k=k,
            eps=eps,
            round_weights=round_weights,
            seed=seed,
            r_const=r_const,
            b_const=b_const,
        ),
    )
    return report.solutions["weighted_matching"]


def approx_large_matching(
    updates,
    n: int,
    k: int,
    alpha: float,
    eps: float,
    *,
    seed: int = 0,
    r_const: int = 5,
    t_cap: int = 64,
) -> Solution:
    """A matching of size about k/(2*alpha) when one of size k exists.

    Requires 1 <= alpha <= sqrt(k).  The output is always a valid matching
    of live edges and never exceeds the true maximum; the lower bound
    (1-eps)k/(2*alpha) holds with high probability under the promise.
    """
    if not 1 <= alpha <= math.sqrt(k):
        raise ValueError("alpha must satisfy 1 <= alpha <= sqrt(k)")
    report = _run(
        "approx-matching",
        updates,
        n,
        AlgoParams(k=k, alpha=alpha, eps=eps, seed=seed, r_const=r_const, t_cap=t_cap),
    )
    return report.solutions["matching"]


def semi_streaming_matching_estimate(
    updates,
    n: int,
    alpha: float,
    *,
    eps: float = 0.5,
    seed: int = 0,
    r_const: int = 5,
    t_cap: int = 64,
) -> RunReport:
    """Promise-free matching size estimate within a factor O(alpha)."""
    return _run(
        "semi-estimate",
        updates,
        n,
        AlgoParams(alpha=alpha, eps=eps, seed=seed, r_const=r_const, t_cap=t_cap),
    )


def weighted_large_matching_estimate(
    updates,
    n: int,
    alpha: float,
    eps: float,
    *,
    seed: int = 0,
    r_const: int = 5,
    t_cap: int = 64,
) -> RunReport:
    """Weighted matching estimate by layering weight thresholds."""
    return _run(
        "weighted-estimate",
        updates,
        n,
        AlgoParams(alpha=alpha, eps=eps, seed=seed, r_const=r_const, t_cap=t_cap),
    )


def arboricity_matching_estimate(
    updates,
    n: int,
    nu: int,
    eps: float,
    *,
    seed: int = 0,
    r_const: int = 5,
    b_const: int = 100,
) -> RunReport:
    """Matching size within a factor (5*nu+9)(1+eps)^2 for sparse graphs."""
    return _run(
        "arboricity",
        updates,
        n,
        AlgoParams(nu=nu, eps=eps, seed=seed, r_const=r_const, b_const=b_const),
    )


def hitting_set_stream(
    updates,
    n: int,
    k: int,
    d: int,
    *,
    seed: int = 0,
    r_const: int = 5,
    b_const: int = 100,
) -> Solution | Exceeds:
    """Minimum hitting set of a hyperedge stream, promised optimum <= k."""
    report = _run(
        "hitting-set",
        updates,
        n,
        AlgoParams(k=k, d=d, seed=seed, r_const=r_const, b_const=b_const),
        max_arity=d,
    )
    return report.solutions["hitting_set"]


def hypergraph_matching_stream(
    updates,
    n: int,
    k: int,
    d: int,
    *,
    seed: int = 0,
    r_const: int = 5,
    b_const: int = 100,
) -> Solution:
    """Maximum disjoint hyperedges, promised optimum <= k/d."""
    report = _run(
        "hyper-matching",
        updates,
        n,
        AlgoParams(k=k, d=d, seed=seed, r_const=r_const, b_const=b_const),
        max_arity=d,
    )
    return report.solutions["hypergraph_matching"]


def contraction_search_stream(
    updates,
    n: int,
    k: int,
    prop: str,
    *,
    trials: int = 5,
    seed: int = 0,
) -> Solution:
    """Largest subgraph with a contraction-closed property.

    ``k`` bounds the vertex count of some optimum solution; ``prop`` is a
    property name such as ``max_forest`` or ``b_matching:2``.  The size is
    exact with probability amplified over ``trials`` independent runs, and
    never exceeds the true optimum.
    """
    report = _run(
        "contraction",
        updates,
        n,
        AlgoParams(k=k, prop=prop, trials=trials, seed=seed),
    )
    return report.solutions["subgraph"]
