"""The colored-cell subgraph sampler over dynamic edge streams.

The sampler runs ``reps`` independent vertex colorings into ``colors``
buckets.  Under one coloring, an edge's color set is the set of distinct
colors its endpoints receive; the sampler keeps one cell per (repetition,
weight, color set) for every color set of size at most ``set_limit``, and
each cell holds a linear sketch of all edges that map there.  Extracting one
edge per cell yields a subgraph whose composition is the whole point: with
the right parameters it provably preserves optima of the problems served by
:mod:`graphsample.algorithms`.

Cells are allocated lazily, so space follows the number of distinct
(repetition, weight, color set) triples actually hit.  Because every cell is
linear and every seed derives from the root seed, sketches over different
stream shards merge into exactly the state a single pass would have built.
"""

from __future__ import annotations

import struct
from dataclasses import dataclass, field

from .hashing import HashBank, derive64, derive_mod, keyed_mix, new_hash
from .serialize import FormatError, Reader, Writer
from .sketches import (
    FINGERPRINT_PRIME,
    TAG_SAMPLE,
    CorruptionDetected,
    CounterSketch,
    EMPTY,
    FAIL,
    L0Sampler,
    MergeError,
    XorUniqueSketch,
    decode_edge,
    encode_edge,
    register_loader,
    sketch_from_bytes,
)
from .streams import EdgeUpdate

CELL_MODES = ("counter", "xor_unique", "l0")
_MODE_CODE = {m: i for i, m in enumerate(CELL_MODES)}


def _weight_bits(weight: float) -> int:
    return struct.unpack("<Q", struct.pack("<d", weight))[0]


_CELL_PREFIXES: dict[int, struct.Struct] = {}


def _cell_prefix(m: int) -> struct.Struct:
    """Packer for one cell's key fields: rep, weight, and ``m`` colors."""
    st = _CELL_PREFIXES.get(m)
    if st is None:
        st = struct.Struct(f"<IdB{m}Q")
        _CELL_PREFIXES[m] = st
    return st


@dataclass(frozen=True)
class SampleConfig:
    """Parameters of one sampler instance.

    ``n`` bounds vertex ids, ``colors`` is the bucket count of each coloring,
    ``set_limit`` the largest color-set size that gets a cell, ``reps`` the
    number of independent colorings.  ``independence`` is the hash family's
    t; ``max_arity`` bounds hyperedge size and fixes the key universe.
    """

    n: int
    colors: int
    set_limit: int
    reps: int
    independence: int = 2
    cell_mode: str = "l0"
    seed: int = 0
    delta: float = 0.01
    max_arity: int = 0

    def __post_init__(self) -> None:
        if self.n < 1:
            raise ValueError("n must be positive")
        if self.colors < 1:
            raise ValueError("need at least one color")
        if self.set_limit < 1:
            raise ValueError("set_limit must be at least 1")
        if self.reps < 1:
            raise ValueError("need at least one repetition")
        if self.independence < 2:
            raise ValueError("hash independence must be at least 2")
        if self.cell_mode not in CELL_MODES:
            raise ValueError(f"cell_mode must be one of {CELL_MODES}")
        if not 0 < self.delta < 1:
            raise ValueError("delta must be in (0, 1)")
        if self.max_arity == 0:
            object.__setattr__(self, "max_arity", max(2, self.set_limit))
        if self.max_arity < 1:
            raise ValueError("max_arity must be positive")

    @property
    def key_universe(self) -> int:
        return self.n**self.max_arity


@dataclass(frozen=True)
class SampledEdge:
    vertices: tuple[int, ...]
    weight: float
    rep: int
    colors: tuple[int, ...]


@dataclass
class SampledSubgraph:
    """Edges recovered from the cells, with provenance and diagnostics."""

    n: int
    edges: list[SampledEdge]
    l0_failures: int = 0
    corrupt_cells: int = 0

    def distinct_edges(self) -> list[tuple[tuple[int, ...], float]]:
        """Deduplicated (vertices, weight) pairs in canonical order.

        A vertex set recovered under several weights keeps the smallest, so
        the result never depends on the order edges were extracted in.
        """
        seen: dict[tuple[int, ...], float] = {}
        for e in self.edges:
            w = seen.get(e.vertices)
            if w is None or e.weight < w:
                seen[e.vertices] = e.weight
        return sorted(seen.items())


@dataclass
class ContractedGraph:
    """One repetition's graph on color-class labels.

    An edge {i, j} is present when some live stream edge got color set
    {i, j}; a loop label i records live edges whose endpoints share color i.
    ``representatives`` maps each label pair to a recovered witness edge
    where the cell held exactly one, else None.
    """

    colors: int
    rep: int
    edges: list[tuple[int, int]]
    loops: list[int]
    representatives: dict[tuple[int, ...], tuple[int, ...] | None] = field(
        default_factory=dict
    )


@dataclass(frozen=True)
class SpaceReport:
    cells: int
    serialized_bytes: int
    per_rep: dict[int, int]


class SampleSketch:
    """Mergeable sketch state of the sampler; see the module docstring."""

    def __init__(self, config: SampleConfig):
        self.config = config
        seeds = [derive64(config.seed, "coloring", j) for j in range(config.reps)]
        self._bank = HashBank(
            [
                new_hash(s, config.independence, config.n, config.colors)
                for s in seeds
            ]
        )
        self._color_cache: dict[int, list[int]] = {}
        self._shared_z = 2 + derive_mod(config.seed, FINGERPRINT_PRIME - 3, "cellz")
        self._cell_base = derive64(config.seed, "cell")
        self.cells: dict[tuple[int, float, tuple[int, ...]], object] = {}

    # -- ingestion ---------------------------------------------------------

    def colors_of(self, vertex: int) -> list[int]:
        """Colors of one vertex under every repetition (cached)."""
        got = self._color_cache.get(vertex)
        if got is None:
            got = self._bank.eval_all(vertex).tolist()
            self._color_cache[vertex] = got
        return got

    def _new_cell(self, rep: int, weight: float, colorset: tuple[int, ...]):
        cfg = self.config
        if cfg.cell_mode == "counter":
            return CounterSketch()
        # a single mix of the packed cell coordinates stands in for hashed
        # derivation because sketches at scale create hundreds of thousands
        # of cells; the seed still depends only on the config seed and the
        # coordinates, so shards agree on it
        tag = (rep << 64) | _weight_bits(weight)
        for c in colorset:
            tag = (tag << 40) | (c + 1)
        seed = keyed_mix(self._cell_base, tag)
        if cfg.cell_mode == "xor_unique":
            return XorUniqueSketch(seed)
        return L0Sampler(cfg.key_universe, cfg.delta, seed, z=self._shared_z)

    def process_update(self, upd: EdgeUpdate) -> None:
        cfg = self.config
        verts = upd.vertices
        if len(verts) > cfg.max_arity:
            raise ValueError(
                f"arity {len(verts)} exceeds configured bound {cfg.max_arity}"
            )
        key = encode_edge(verts, cfg.n)
        weight = upd.weight
        delta = upd.delta
        cells = self.cells
        is_l0 = cfg.cell_mode == "l0"
        zpow = pow(self._shared_z, key, FINGERPRINT_PRIME) if is_l0 else 0

        if len(verts) == 2:
            ca = self.colors_of(verts[0])
            cb = self.colors_of(verts[1])
            limit = cfg.set_limit
            for j in range(cfg.reps):
                x = ca[j]
                y = cb[j]
                if x == y:
                    colorset = (x,)
                elif limit >= 2:
                    colorset = (x, y) if x < y else (y, x)
                else:
                    continue
                self._route(cells, j, weight, colorset, key, delta, is_l0, zpow)
            return

        cols = [self.colors_of(v) for v in verts]
        for j in range(cfg.reps):
            colorset = tuple(sorted({c[j] for c in cols}))
            if len(colorset) > cfg.set_limit:
                continue
            self._route(cells, j, weight, colorset, key, delta, is_l0, zpow)

    def _route(self, cells, rep, weight, colorset, key, delta, is_l0, zpow):
        cell_key = (rep, weight, colorset)
        cell = cells.get(cell_key)
        if cell is None:
            cell = self._new_cell(rep, weight, colorset)
            cells[cell_key] = cell
        if is_l0:
            cell.update_pow(key, delta, zpow)
        else:
            cell.update(key, delta)

    def process_stream(self, updates) -> "SampleSketch":
        for upd in updates:
            self.process_update(upd)
        return self

    # -- queries -----------------------------------------------------------

    def _sorted_cells(self):
        return sorted(self.cells.items())

    def extract_subgraph(self) -> SampledSubgraph:
        """One recovered edge per recoverable cell.

        Requires a cell mode that can name edges.  Cells whose recovery
        fails (overfull level banks) or proves corrupt (checksum mismatch at
        count one) contribute nothing and are tallied in the diagnostics.
        Edges come back in cell creation order; consumers that need a
        canonical view sort or deduplicate themselves.
        """
        cfg = self.config
        if cfg.cell_mode == "counter":
            raise ValueError("counter cells cannot recover edges")
        out = SampledSubgraph(n=cfg.n, edges=[])
        decoded: dict[int, tuple[int, ...]] = {}
        for (rep, weight, colorset), cell in self.cells.items():
            if cfg.cell_mode == "xor_unique":
                try:
                    key = cell.query_unique()
                except CorruptionDetected:
                    out.corrupt_cells += 1
                    continue
                if key is None:
                    continue
            else:
                res = cell.query()
                if res is FAIL:
                    out.l0_failures += 1
                    continue
                if res is EMPTY:
                    continue
                key = res
            verts = decoded.get(key)
            if verts is None:
                try:
                    verts = decode_edge(key, cfg.n)
                except ValueError:
                    out.corrupt_cells += 1
                    continue
                decoded[key] = verts
            out.edges.append(SampledEdge(verts, weight, rep, colorset))
        return out

    def extract_contracted(self) -> list[ContractedGraph]:
        """Per-repetition graphs on color labels from the cell counts."""
        cfg = self.config
        if cfg.set_limit != 2:
            raise ValueError("contracted extraction expects set_limit == 2")
        if cfg.cell_mode == "l0":
            raise ValueError("contracted extraction needs exact cell counts")
        graphs = [
            ContractedGraph(colors=cfg.colors, rep=j, edges=[], loops=[])
            for j in range(cfg.reps)
        ]
        for (rep, weight, colorset), cell in self._sorted_cells():
            if cell.count == 0:
                continue
            g = graphs[rep]
            witness: tuple[int, ...] | None = None
            if cfg.cell_mode == "xor_unique":
                try:
                    key = cell.query_unique()
                    if key is not None:
                        witness = decode_edge(key, cfg.n)
                except (CorruptionDetected, ValueError):
                    witness = None
            if len(colorset) == 1:
                g.loops.append(colorset[0])
            else:
                g.edges.append((colorset[0], colorset[1]))
            g.representatives[colorset] = witness
        return graphs

    def byte_size(self) -> int:
        """Exact length of :meth:`to_bytes` without materializing it."""
        total = 49
        for (_, _, colorset), cell in self.cells.items():
            if not cell.is_zero():
                total += 17 + 8 * len(colorset) + cell.byte_size()
        return total

    def space_report(self) -> SpaceReport:
        per_rep: dict[int, int] = {}
        for rep, _, _ in self.cells:
            per_rep[rep] = per_rep.get(rep, 0) + 1
        return SpaceReport(
            cells=len(self.cells),
            serialized_bytes=self.byte_size(),
            per_rep=per_rep,
        )

    # -- merge and serialization ------------------------------------------

    def merge(self, other: "SampleSketch") -> "SampleSketch":
        """Fold ``other`` into self; both must share config (seed included).

        The merge consumes its inputs: cells may move between sketches
        instead of being copied.
        """
        if not isinstance(other, SampleSketch):
            raise MergeError("cannot merge sampler with a different type")
        if self.config != other.config:
            raise MergeError("samplers built with different configurations")
        for cell_key, cell in other.cells.items():
            mine = self.cells.get(cell_key)
            if mine is None:
                self.cells[cell_key] = cell
            else:
                mine.merge(cell)
        return self

    def to_bytes(self) -> bytes:
        cfg = self.config
        w = Writer()
        w.u8(TAG_SAMPLE)
        w.u8(1)
        w.u64(cfg.n)
        w.u64(cfg.colors)
        w.u8(cfg.set_limit)
        w.u32(cfg.reps)
        w.u32(cfg.independence)
        w.u8(_MODE_CODE[cfg.cell_mode])
        w.u64(cfg.seed)
        w.f64(cfg.delta)
        w.u8(cfg.max_arity)
        live = [
            (ck, cell) for ck, cell in self._sorted_cells() if not cell.is_zero()
        ]
        w.u32(len(live))
        for (rep, weight, colorset), cell in live:
            w.raw(_cell_prefix(len(colorset)).pack(rep, weight, len(colorset), *colorset))
            w.blob(cell.to_bytes())
        return w.getvalue()

    @classmethod
    def from_bytes(cls, data: bytes) -> "SampleSketch":
        r = Reader(data)
        if r.u8() != TAG_SAMPLE:
            raise FormatError("not a sampler sketch")
        if r.u8() != 1:
            raise FormatError("unsupported sampler version")
        cfg = SampleConfig(
            n=r.u64(),
            colors=r.u64(),
            set_limit=r.u8(),
            reps=r.u32(),
            independence=r.u32(),
            cell_mode=CELL_MODES[r.u8()],
            seed=r.u64(),
            delta=r.f64(),
            max_arity=r.u8(),
        )
        out = cls(cfg)
        for _ in range(r.u32()):
            rep = r.u32()
            weight = r.f64()
            size = r.u8()
            colorset = tuple(r.u64() for _ in range(size))
            out.cells[(rep, weight, colorset)] = sketch_from_bytes(r.blob())
        r.expect_done()
        return out

    def __eq__(self, other: object) -> bool:
        return isinstance(other, SampleSketch) and self.to_bytes() == other.to_bytes()


register_loader(TAG_SAMPLE, SampleSketch.from_bytes)


def merge_samples(a: SampleSketch, b: SampleSketch) -> SampleSketch:
    """Merge two sampler sketches; see :meth:`SampleSketch.merge`."""
    return a.merge(b)
