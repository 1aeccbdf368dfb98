"""Linear, mergeable cell sketches over dynamic key streams.

Each structure here consumes ``(key, +1/-1)`` updates and supports three
things: point queries appropriate to its flavor, lossless merge with a peer
built from the same seed and parameters, and byte-exact serialization.
Linearity means a delete perfectly cancels the matching insert, so the state
after a stream depends only on the live multiset of keys.

Keys are canonical hyperedge encodings: the sorted vertex tuple written in
base ``n`` (see :func:`encode_edge`), which is injective across arities for
vertex ids below ``n``.
"""

from __future__ import annotations

import math
import struct
from collections import deque

from .hashing import derive64, derive_mod, keyed_mix
from .serialize import FormatError, Reader, Writer

#: Modulus for power fingerprints; a Mersenne prime just under 2^61.
FINGERPRINT_PRIME = (1 << 61) - 1

TAG_COUNTER = 1
TAG_XOR = 2
TAG_ONESPARSE = 3
TAG_SPARSE = 4
TAG_L0 = 5
TAG_DEGREES = 6
TAG_SAMPLE = 7


class SketchError(Exception):
    pass


class MergeError(SketchError):
    """Structures with different types, parameters, or seeds cannot merge."""


class CorruptionDetected(SketchError):
    """A checksum contradicts the counter; the ingested stream was invalid."""


class _Outcome:
    __slots__ = ("_name",)

    def __init__(self, name: str) -> None:
        self._name = name

    def __repr__(self) -> str:
        return self._name


#: Decode gave up; the true support was larger than the structure's capacity.
FAIL = _Outcome("FAIL")
#: Decode certified that no live keys remain.
EMPTY = _Outcome("EMPTY")


def encode_edge(vertices, n: int) -> int:
    """Canonical integer key of a hyperedge: sorted vertices in base ``n``."""
    prev = -1
    key = 0
    weight = 1
    for v in vertices:
        if not 0 <= v < n:
            raise ValueError(f"vertex {v} outside [0, {n})")
        if v <= prev:
            raise ValueError("vertices must be strictly increasing")
        prev = v
        key += v * weight
        weight *= n
    if prev < 0:
        raise ValueError("empty edge")
    return key


def decode_edge(key: int, n: int) -> tuple[int, ...]:
    """Inverse of :func:`encode_edge`; raises ValueError on garbage keys."""
    if key < 0:
        raise ValueError("negative key")
    if key < n:
        return (key,)
    if key < n * n:
        b, a = divmod(key, n)
        if b <= a:
            raise ValueError("key does not decode to a sorted vertex tuple")
        return (a, b)
    arity = 1
    span = n
    while key >= span:
        arity += 1
        span *= n
    digits = []
    for _ in range(arity):
        digits.append(key % n)
        key //= n
    for a, b in zip(digits, digits[1:]):
        if b <= a:
            raise ValueError("key does not decode to a sorted vertex tuple")
    return tuple(digits)


def _read_header(data: bytes, expected_tag: int) -> Reader:
    r = Reader(data)
    tag = r.u8()
    if tag != expected_tag:
        raise FormatError(f"expected tag {expected_tag}, found {tag}")
    version = r.u8()
    if version != 1:
        raise FormatError(f"unsupported version {version}")
    return r


def _write_header(tag: int) -> Writer:
    w = Writer()
    w.u8(tag)
    w.u8(1)
    return w


class CounterSketch:
    """Signed count of live keys in a cell; supports no recovery at all."""

    __slots__ = ("count",)

    def __init__(self) -> None:
        self.count = 0

    def update(self, key: int, delta: int) -> None:
        self.count += delta

    def merge(self, other: "CounterSketch") -> "CounterSketch":
        if not isinstance(other, CounterSketch):
            raise MergeError("cannot merge counter with a different sketch type")
        self.count += other.count
        return self

    def is_zero(self) -> bool:
        return self.count == 0

    def byte_size(self) -> int:
        return 10

    def to_bytes(self) -> bytes:
        w = _write_header(TAG_COUNTER)
        w.i64(self.count)
        return w.getvalue()

    @classmethod
    def from_bytes(cls, data: bytes) -> "CounterSketch":
        r = _read_header(data, TAG_COUNTER)
        out = cls()
        out.count = r.i64()
        r.expect_done()
        return out

    def __eq__(self, other: object) -> bool:
        return isinstance(other, CounterSketch) and self.count == other.count


class XorUniqueSketch:
    """Count plus xor of keys; recovers the key exactly when one is live.

    A keyed 64-bit fingerprint accumulates alongside the raw xor, so a cell
    that claims count 1 but whose xor is a mix of several keys is caught and
    reported as corruption instead of being decoded into a phantom edge.
    """

    __slots__ = ("seed", "count", "acc", "checksum", "_fp_base")

    def __init__(self, seed: int) -> None:
        self.seed = seed
        self.count = 0
        self.acc = 0
        self.checksum = 0
        # cheap tweak keeps construction off the hashed-derivation path;
        # cells are created in bulk and only ever check their own content
        self._fp_base = keyed_mix(seed, 0x9E3779B97F4A7C15)

    def update(self, key: int, delta: int) -> None:
        self.count += delta
        self.acc ^= key
        self.checksum ^= keyed_mix(self._fp_base, key)

    def merge(self, other: "XorUniqueSketch") -> "XorUniqueSketch":
        if not isinstance(other, XorUniqueSketch):
            raise MergeError("cannot merge xor sketch with a different type")
        if self.seed != other.seed:
            raise MergeError("xor sketches built from different seeds")
        self.count += other.count
        self.acc ^= other.acc
        self.checksum ^= other.checksum
        return self

    def is_zero(self) -> bool:
        return self.count == 0 and self.acc == 0 and self.checksum == 0

    def query_unique(self) -> int | None:
        """The live key if exactly one remains, else None."""
        if self.count != 1:
            return None
        if keyed_mix(self._fp_base, self.acc) != self.checksum:
            raise CorruptionDetected(
                "cell counts one key but its xor fails the checksum"
            )
        return self.acc

    def byte_size(self) -> int:
        return 42

    def to_bytes(self) -> bytes:
        return struct.pack(
            "<BBQq16sQ",
            TAG_XOR,
            1,
            self.seed,
            self.count,
            self.acc.to_bytes(16, "little"),
            self.checksum,
        )

    @classmethod
    def from_bytes(cls, data: bytes) -> "XorUniqueSketch":
        r = _read_header(data, TAG_XOR)
        out = cls(r.u64())
        out.count = r.i64()
        out.acc = r.u128()
        out.checksum = r.u64()
        r.expect_done()
        return out

    def __eq__(self, other: object) -> bool:
        return (
            isinstance(other, XorUniqueSketch)
            and (self.seed, self.count, self.acc, self.checksum)
            == (other.seed, other.count, other.acc, other.checksum)
        )


class OneSparseRecoverer:
    """Detects whether a stream's live support is a single key.

    Keeps the first two moments of the key distribution and a power
    fingerprint ``sum(delta * z^key) mod q``; a support of one key ``k`` with
    multiplicity ``m`` is the unique state with ``c1 = m*k`` and fingerprint
    ``m * z^k``, and anything else fails the fingerprint test with
    probability 1 - O(support / q).
    """

    __slots__ = ("seed", "z", "c0", "c1", "fp")

    def __init__(self, seed: int, z: int | None = None) -> None:
        self.seed = seed
        self.z = z if z is not None else 2 + derive_mod(seed, FINGERPRINT_PRIME - 3, "z")
        self.c0 = 0
        self.c1 = 0
        self.fp = 0

    def update(self, key: int, delta: int) -> None:
        q = FINGERPRINT_PRIME
        self.c0 += delta
        self.c1 += delta * key
        self.fp = (self.fp + delta * pow(self.z, key, q)) % q

    def merge(self, other: "OneSparseRecoverer") -> "OneSparseRecoverer":
        if not isinstance(other, OneSparseRecoverer):
            raise MergeError("cannot merge one-sparse recoverer with other type")
        if (self.seed, self.z) != (other.seed, other.z):
            raise MergeError("one-sparse recoverers built from different seeds")
        self.c0 += other.c0
        self.c1 += other.c1
        self.fp = (self.fp + other.fp) % FINGERPRINT_PRIME
        return self

    def decode(self):
        """EMPTY, a ``(key, multiplicity)`` pair, or FAIL."""
        return _decode_triple(self.c0, self.c1, self.fp, self.z)

    def to_bytes(self) -> bytes:
        w = _write_header(TAG_ONESPARSE)
        w.u64(self.seed)
        w.u64(self.z)
        w.i64(self.c0)
        w.i128(self.c1)
        w.u64(self.fp)
        return w.getvalue()

    @classmethod
    def from_bytes(cls, data: bytes) -> "OneSparseRecoverer":
        r = _read_header(data, TAG_ONESPARSE)
        out = cls(r.u64(), z=r.u64())
        out.c0 = r.i64()
        out.c1 = r.i128()
        out.fp = r.u64()
        r.expect_done()
        return out

    def __eq__(self, other: object) -> bool:
        return (
            isinstance(other, OneSparseRecoverer)
            and (self.seed, self.z, self.c0, self.c1, self.fp)
            == (other.seed, other.z, other.c0, other.c1, other.fp)
        )


def _decode_triple(c0: int, c1: int, fp: int, z: int):
    q = FINGERPRINT_PRIME
    if c0 == 0 and c1 == 0 and fp == 0:
        return EMPTY
    if c0 > 0 and c1 >= 0 and c1 % c0 == 0:
        key = c1 // c0
        if (c0 * pow(z, key, q)) % q == fp:
            return (key, c0)
    return FAIL


class SparseRecovery:
    """Exact recovery of up to ``s`` live keys with multiplicities.

    Keys hash into ``2s`` buckets per row across ``ceil(log2(1/delta))``
    rows; each bucket is a one-sparse recoverer.  Decoding peels: a bucket
    holding a single key reveals it, the key is subtracted everywhere, and
    the process repeats.  Buckets are allocated lazily, so memory follows the
    number of touched buckets rather than the nominal capacity.
    """

    def __init__(self, s: int, delta: float, seed: int, z: int | None = None):
        if s < 1:
            raise ValueError("capacity must be at least 1")
        if not 0 < delta < 1:
            raise ValueError("delta must be in (0, 1)")
        self.s = s
        self.delta = delta
        self.seed = seed
        self.z = z if z is not None else 2 + derive_mod(seed, FINGERPRINT_PRIME - 3, "z")
        self.rows = max(1, math.ceil(math.log2(1 / delta)))
        self.width = 2 * s
        base = derive64(seed, "row")
        self._row_base = [keyed_mix(base, r) for r in range(self.rows)]
        self._buckets: dict[tuple[int, int], list[int]] = {}

    def _bucket_of(self, row: int, key: int) -> tuple[int, int]:
        return (row, keyed_mix(self._row_base[row], key) % self.width)

    def update(self, key: int, delta: int) -> None:
        self.update_pow(key, delta, pow(self.z, key, FINGERPRINT_PRIME))

    def update_pow(self, key: int, delta: int, zpow: int) -> None:
        """Update with ``z^key mod q`` precomputed, for callers that batch."""
        q = FINGERPRINT_PRIME
        for row in range(self.rows):
            b = self._buckets.setdefault(self._bucket_of(row, key), [0, 0, 0])
            b[0] += delta
            b[1] += delta * key
            b[2] = (b[2] + delta * zpow) % q

    def merge(self, other: "SparseRecovery") -> "SparseRecovery":
        if not isinstance(other, SparseRecovery):
            raise MergeError("cannot merge sparse recovery with other type")
        if (self.s, self.delta, self.seed, self.z) != (
            other.s,
            other.delta,
            other.seed,
            other.z,
        ):
            raise MergeError("sparse recoveries built with different parameters")
        q = FINGERPRINT_PRIME
        for rk, v in other._buckets.items():
            b = self._buckets.setdefault(rk, [0, 0, 0])
            b[0] += v[0]
            b[1] += v[1]
            b[2] = (b[2] + v[2]) % q

        return self

    def decode(self):
        """Dict of live ``key -> multiplicity``, or FAIL when overfull."""
        q = FINGERPRINT_PRIME
        state = {rk: v[:] for rk, v in self._buckets.items() if any(v)}
        recovered: dict[int, int] = {}
        work = deque(sorted(state))
        queued = set(work)
        while work:
            rk = work.popleft()
            queued.discard(rk)
            v = state.get(rk)
            if v is None or not any(v):
                state.pop(rk, None)
                continue
            dec = _decode_triple(v[0], v[1], v[2], self.z)
            if dec is FAIL or dec is EMPTY:
                continue
            key, mult = dec
            recovered[key] = recovered.get(key, 0) + mult
            zpow = pow(self.z, key, q)
            for row in range(self.rows):
                target = self._bucket_of(row, key)
                tb = state.setdefault(target, [0, 0, 0])
                tb[0] -= mult
                tb[1] -= mult * key
                tb[2] = (tb[2] - mult * zpow) % q
                if any(tb):
                    if target not in queued:
                        work.append(target)
                        queued.add(target)
                else:
                    state.pop(target, None)
        if any(any(v) for v in state.values()):
            return FAIL
        return {k: m for k, m in recovered.items() if m != 0}

    def is_zero(self) -> bool:
        return all(not any(v) for v in self._buckets.values())

    def byte_size(self) -> int:
        """Exact length of :meth:`to_bytes` without materializing it."""
        live = sum(1 for v in self._buckets.values() if any(v))
        return 38 + 40 * live

    def to_bytes(self) -> bytes:
        w = _write_header(TAG_SPARSE)
        w.u64(self.s)
        w.f64(self.delta)
        w.u64(self.seed)
        w.u64(self.z)
        live = sorted(rk for rk, v in self._buckets.items() if any(v))
        w.u32(len(live))
        for row, idx in live:
            v = self._buckets[(row, idx)]
            w.u32(row)
            w.u32(idx)
            w.i64(v[0])
            w.i128(v[1])
            w.u64(v[2])
        return w.getvalue()

    @classmethod
    def from_bytes(cls, data: bytes) -> "SparseRecovery":
        r = _read_header(data, TAG_SPARSE)
        s = r.u64()
        delta = r.f64()
        seed = r.u64()
        z = r.u64()
        out = cls(s, delta, seed, z=z)
        for _ in range(r.u32()):
            row = r.u32()
            idx = r.u32()
            out._buckets[(row, idx)] = [r.i64(), r.i128(), r.u64()]
        r.expect_done()
        return out

    def __eq__(self, other: object) -> bool:
        return isinstance(other, SparseRecovery) and self.to_bytes() == other.to_bytes()


class L0Sampler:
    """Near-uniform sample from the live support of a dynamic key stream.

    Geometric level hashing: every key lands in level 0, and survives to
    level L with probability 2^-L.  Each level keeps a sparse-recovery bank
    sized ``ceil(4 * log2(1/delta))``.  A query decodes the deepest
    recoverable level and returns the key minimizing the level hash, which
    is the same key at every level it survives to, so the answer is a
    uniform draw governed entirely by the seed.
    """

    def __init__(self, universe: int, delta: float, seed: int, z: int | None = None):
        if universe < 1:
            raise ValueError("universe must be positive")
        if not 0 < delta < 1:
            raise ValueError("delta must be in (0, 1)")
        self.universe = universe
        self.delta = delta
        self.seed = seed
        self.levels = min(64, max(universe - 1, 1).bit_length() + 1)
        self.s0 = math.ceil(4 * math.log2(1 / delta))
        self.z = z if z is not None else 2 + derive_mod(seed, FINGERPRINT_PRIME - 3, "z")
        self._level_base = derive64(seed, "level")
        # banks materialize on first touch; an absent bank is an empty one
        self._banks: dict[int, SparseRecovery] = {}

    def _bank(self, lvl: int) -> SparseRecovery:
        bank = self._banks.get(lvl)
        if bank is None:
            bank = SparseRecovery(
                self.s0, self.delta, derive64(self.seed, "bank", lvl), z=self.z
            )
            self._banks[lvl] = bank
        return bank

    def _depth(self, key: int) -> int:
        h = keyed_mix(self._level_base, key)
        lam = 64 - h.bit_length()
        return min(lam, self.levels - 1)

    def update(self, key: int, delta: int) -> None:
        if not 0 <= key < self.universe:
            raise ValueError(f"key {key} outside universe [0, {self.universe})")
        self.update_pow(key, delta, pow(self.z, key, FINGERPRINT_PRIME))

    def update_pow(self, key: int, delta: int, zpow: int) -> None:
        for lvl in range(self._depth(key) + 1):
            self._bank(lvl).update_pow(key, delta, zpow)

    def merge(self, other: "L0Sampler") -> "L0Sampler":
        if not isinstance(other, L0Sampler):
            raise MergeError("cannot merge level sampler with other type")
        if (self.universe, self.delta, self.seed) != (
            other.universe,
            other.delta,
            other.seed,
        ):
            raise MergeError("level samplers built with different parameters")
        for lvl, theirs in other._banks.items():
            mine = self._banks.get(lvl)
            if mine is None:
                self._banks[lvl] = theirs
            else:
                mine.merge(theirs)
        return self

    def query(self):
        """A live key, or EMPTY (certain), or FAIL (probability <= delta)."""
        saw_fail = False
        for lvl in sorted(self._banks, reverse=True):
            res = self._banks[lvl].decode()
            if res is FAIL:
                saw_fail = True
                continue
            live = [k for k, m in res.items() if m > 0]
            if live:
                return min(live, key=lambda k: (keyed_mix(self._level_base, k), k))
        return FAIL if saw_fail else EMPTY

    def is_zero(self) -> bool:
        return all(b.is_zero() for b in self._banks.values())

    def byte_size(self) -> int:
        return 46 + sum(
            8 + b.byte_size() for b in self._banks.values() if not b.is_zero()
        )

    def to_bytes(self) -> bytes:
        w = _write_header(TAG_L0)
        w.u128(self.universe)
        w.f64(self.delta)
        w.u64(self.seed)
        w.u64(self.z)
        live = sorted(
            (lvl, bank) for lvl, bank in self._banks.items() if not bank.is_zero()
        )
        w.u32(len(live))
        for lvl, bank in live:
            w.u32(lvl)
            w.blob(bank.to_bytes())
        return w.getvalue()

    @classmethod
    def from_bytes(cls, data: bytes) -> "L0Sampler":
        r = _read_header(data, TAG_L0)
        universe = r.u128()
        delta = r.f64()
        seed = r.u64()
        z = r.u64()
        out = cls(universe, delta, seed, z=z)
        for _ in range(r.u32()):
            lvl = r.u32()
            out._banks[lvl] = SparseRecovery.from_bytes(r.blob())
        r.expect_done()
        return out

    def __eq__(self, other: object) -> bool:
        return isinstance(other, L0Sampler) and self.to_bytes() == other.to_bytes()


class DegreeTable:
    """Exact per-vertex degree counters for a chosen subset of vertices."""

    def __init__(self) -> None:
        self.deg: dict[int, int] = {}

    def update(self, vertex: int, delta: int) -> None:
        self.deg[vertex] = self.deg.get(vertex, 0) + delta

    def merge(self, other: "DegreeTable") -> "DegreeTable":
        if not isinstance(other, DegreeTable):
            raise MergeError("cannot merge degree table with other type")
        for v, d in other.deg.items():
            self.deg[v] = self.deg.get(v, 0) + d
        return self

    def count_at_least(self, threshold: int) -> int:
        return sum(1 for d in self.deg.values() if d >= threshold)

    def to_bytes(self) -> bytes:
        w = _write_header(TAG_DEGREES)
        live = sorted((v, d) for v, d in self.deg.items() if d != 0)
        w.u32(len(live))
        for v, d in live:
            w.u64(v)
            w.i64(d)
        return w.getvalue()

    @classmethod
    def from_bytes(cls, data: bytes) -> "DegreeTable":
        r = _read_header(data, TAG_DEGREES)
        out = cls()
        for _ in range(r.u32()):
            v = r.u64()
            out.deg[v] = r.i64()
        r.expect_done()
        return out

    def __eq__(self, other: object) -> bool:
        return isinstance(other, DegreeTable) and self.to_bytes() == other.to_bytes()


_LOADERS = {
    TAG_COUNTER: CounterSketch.from_bytes,
    TAG_XOR: XorUniqueSketch.from_bytes,
    TAG_ONESPARSE: OneSparseRecoverer.from_bytes,
    TAG_SPARSE: SparseRecovery.from_bytes,
    TAG_L0: L0Sampler.from_bytes,
    TAG_DEGREES: DegreeTable.from_bytes,
}


def register_loader(tag: int, loader) -> None:
    _LOADERS[tag] = loader


def sketch_from_bytes(data: bytes):
    """Reconstruct any serialized structure from its tagged byte string."""
    if not data:
        raise FormatError("empty input")
    loader = _LOADERS.get(data[0])
    if loader is None:
        raise FormatError(f"unknown sketch tag {data[0]}")
    return loader(data)
