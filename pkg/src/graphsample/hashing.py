"""Vertex colorings from polynomial hash families over a prime field.

Every random choice in this package bottoms out here: a 64-bit root seed is
split into independent sub-seeds with a keyed byte mixer, and each sub-seed
drives either a polynomial hash (vertex colorings with bounded independence)
or a 64-bit integer mixer (fingerprints, level assignment, bucket placement).
Keeping the derivation tree deterministic is what makes sketches built on
different shards merge bit-exactly.
"""

from __future__ import annotations

import hashlib
import struct
from dataclasses import dataclass

import numpy as np

MASK64 = (1 << 64) - 1

# Field size floor.  The coloring is ``poly(x) mod p`` folded into ``b``
# buckets with a second modulus, which is only close to uniform when p is
# much larger than b.  A prime a little above 2^30 keeps the fold bias below
# 2^-20 for every bucket count used here while still letting vectorized
# evaluation run in int64 without overflow.
MIN_FIELD = 1 << 30

_MR_WITNESSES = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37)


def is_prime(n: int) -> bool:
    """Deterministic Miller-Rabin, exact for all n below 3.3e24."""
    if n < 2:
        return False
    for p in _MR_WITNESSES:
        if n % p == 0:
            return n == p
    d = n - 1
    s = 0
    while d % 2 == 0:
        d //= 2
        s += 1
    for a in _MR_WITNESSES:
        x = pow(a, d, n)
        if x == 1 or x == n - 1:
            continue
        for _ in range(s - 1):
            x = x * x % n
            if x == n - 1:
                break
        else:
            return False
    return True


def next_prime(floor: int) -> int:
    """Smallest prime strictly greater than ``floor``."""
    n = floor + 1
    if n <= 2:
        return 2
    if n % 2 == 0:
        n += 1
    while not is_prime(n):
        n += 2
    return n


def field_prime(domain: int, buckets: int) -> int:
    """Field modulus used for a coloring of ``domain`` ids into ``buckets``."""
    return next_prime(max(domain, buckets, MIN_FIELD))


def mix64(x: int) -> int:
    """Invertible 64-bit finalizer (splitmix64 output stage)."""
    x &= MASK64
    x ^= x >> 30
    x = (x * 0xBF58476D1CE4E5B9) & MASK64
    x ^= x >> 27
    x = (x * 0x94D049BB133111EB) & MASK64
    x ^= x >> 31
    return x


def fold64(key: int) -> int:
    """Fold an arbitrarily wide non-negative int onto 64 bits."""
    while key > MASK64:
        key = (key & MASK64) ^ (key >> 64)
    return key


def keyed_mix(base: int, key: int) -> int:
    """Fast keyed 64-bit fingerprint of ``key``; ``base`` selects the function."""
    return mix64(fold64(key) ^ base)


def _tag_bytes(tags: tuple) -> bytes:
    parts = []
    for t in tags:
        if isinstance(t, int):
            parts.append(b"i" + t.to_bytes(16, "little", signed=True))
        elif isinstance(t, str):
            enc = t.encode()
            parts.append(b"s" + len(enc).to_bytes(2, "little") + enc)
        elif isinstance(t, bytes):
            parts.append(b"b" + len(t).to_bytes(2, "little") + t)
        else:
            raise TypeError(f"unsupported tag type: {type(t)!r}")
    return b"".join(parts)


def derive_bytes(seed: int, *tags, nbytes: int = 16) -> bytes:
    """Counter-style splittable derivation: independent bytes per tag path."""
    h = hashlib.blake2b(
        _tag_bytes(tags),
        digest_size=nbytes,
        key=struct.pack("<Q", seed & MASK64),
    )
    return h.digest()


def derive64(seed: int, *tags) -> int:
    """A 64-bit sub-seed for the given tag path under ``seed``."""
    return int.from_bytes(derive_bytes(seed, *tags, nbytes=8), "little")


def derive_mod(seed: int, modulus: int, *tags) -> int:
    """Near-uniform draw from [0, modulus); bias below 2^-60 for any modulus here."""
    return int.from_bytes(derive_bytes(seed, *tags, nbytes=16), "little") % modulus


@dataclass(frozen=True)
class HashFn:
    """One member of a t-wise independent family mapping [domain) -> [buckets).

    Evaluation is a degree-(t-1) polynomial over GF(prime) followed by a mod
    fold into the bucket range.  ``independence`` is t; coefficients are drawn
    uniformly from the field when the function is created from a seed.
    """

    prime: int
    coeffs: tuple[int, ...]
    buckets: int
    domain: int

    def __post_init__(self) -> None:
        if not self.coeffs:
            raise ValueError("need at least one coefficient")
        if any(not (0 <= c < self.prime) for c in self.coeffs):
            raise ValueError("coefficients must lie in the field")
        if self.buckets < 1 or self.domain < 1:
            raise ValueError("buckets and domain must be positive")

    @property
    def independence(self) -> int:
        return len(self.coeffs)

    def __call__(self, x: int) -> int:
        if not 0 <= x < self.domain:
            raise ValueError(f"id {x} outside domain [0, {self.domain})")
        acc = 0
        for c in reversed(self.coeffs):
            acc = (acc * x + c) % self.prime
        return acc % self.buckets


def new_hash(seed: int, independence: int, domain: int, buckets: int) -> HashFn:
    """Draw a fresh hash function; same arguments always give the same one."""
    if independence < 2:
        raise ValueError("independence must be at least 2")
    p = field_prime(domain, buckets)
    coeffs = tuple(
        derive_mod(seed, p, "coeff", i) for i in range(independence)
    )
    return HashFn(prime=p, coeffs=coeffs, buckets=buckets, domain=domain)


def color_set(fn: HashFn, vertices) -> tuple[int, ...]:
    """Sorted set of colors an edge's endpoints receive under ``fn``."""
    return tuple(sorted({fn(v) for v in vertices}))


class HashBank:
    """Evaluates many hash functions over the same (domain, buckets) at once.

    All members share the field modulus, so a single int64 matrix multiply
    colors one vertex under every repetition.  Falls back to scalar Python
    evaluation if the field outgrows what int64 products can hold.
    """

    def __init__(self, fns: list[HashFn]):
        if not fns:
            raise ValueError("empty bank")
        first = fns[0]
        for fn in fns:
            if (fn.prime, fn.buckets, fn.domain, fn.independence) != (
                first.prime,
                first.buckets,
                first.domain,
                first.independence,
            ):
                raise ValueError("bank members must share parameters")
        self.fns = fns
        self.prime = first.prime
        self.buckets = first.buckets
        self.domain = first.domain
        self.independence = first.independence
        self._vectorized = first.prime < (1 << 31)
        if self._vectorized:
            self._coeffs = np.array([fn.coeffs for fn in fns], dtype=np.int64)

    def __len__(self) -> int:
        return len(self.fns)

    def eval_all(self, x: int) -> np.ndarray:
        """Colors of vertex ``x`` under every member, as an int64 array."""
        if not 0 <= x < self.domain:
            raise ValueError(f"id {x} outside domain [0, {self.domain})")
        if not self._vectorized:
            return np.array([fn(x) for fn in self.fns], dtype=np.int64)
        powers = np.empty(self.independence, dtype=np.int64)
        acc = 1
        for i in range(self.independence):
            powers[i] = acc
            acc = acc * x % self.prime
        folded = (self._coeffs * powers % self.prime).sum(axis=1) % self.prime
        return folded % self.buckets
