"""Dynamic edge streams and their line-oriented text format.

A stream file carries one header line and then one update per line::

    header 500 2 0
    + 3 7
    - 3 7
    + 1 2 3 4 @1.5

The header fields are vertex-id bound, maximum hyperedge arity, and a 0/1
weighted flag.  An update is ``+`` or ``-``, the vertex ids, and an optional
weight: either ``@w`` or a bare trailing token containing a decimal point or
exponent.  Integer weights therefore need the ``@`` form; without it a
trailing integer parses as a vertex.  Missing weight means 1.  Blank lines
and ``#`` comments are skipped.
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Iterator


class StreamFormatError(ValueError):
    """A stream line or header failed to parse."""


@dataclass(frozen=True)
class StreamHeader:
    n: int
    max_arity: int
    weighted: bool

    def render(self) -> str:
        return f"header {self.n} {self.max_arity} {int(self.weighted)}"


@dataclass(frozen=True)
class EdgeUpdate:
    """One insert (+1) or delete (-1) of a weighted hyperedge."""

    vertices: tuple[int, ...]
    weight: float = 1.0
    delta: int = 1

    def __post_init__(self) -> None:
        if self.delta not in (1, -1):
            raise ValueError("delta must be +1 or -1")
        if not self.vertices:
            raise ValueError("edge needs at least one vertex")
        if list(self.vertices) != sorted(set(self.vertices)):
            raise ValueError("vertices must be sorted and distinct")
        if any(v < 0 for v in self.vertices):
            raise ValueError("vertex ids must be non-negative")
        if not self.weight > 0:
            raise ValueError("weight must be positive")

    @property
    def arity(self) -> int:
        return len(self.vertices)

    def inverse(self) -> "EdgeUpdate":
        return EdgeUpdate(self.vertices, self.weight, -self.delta)

    def render(self) -> str:
        sign = "+" if self.delta == 1 else "-"
        verts = " ".join(str(v) for v in self.vertices)
        if self.weight == 1.0:
            return f"{sign} {verts}"
        return f"{sign} {verts} @{self.weight!r}"


def edge(*vertices: int, weight: float = 1.0) -> EdgeUpdate:
    """Insert update for the given vertices, sorted into canonical order."""
    return EdgeUpdate(tuple(sorted(vertices)), weight, 1)


def _looks_like_weight(token: str) -> bool:
    return any(c in token for c in ".eE") and not token.lstrip("+-").isdigit()


def parse_update(line: str) -> EdgeUpdate:
    tokens = line.split()
    if len(tokens) < 2 or tokens[0] not in "+-":
        raise StreamFormatError(f"bad update line: {line!r}")
    delta = 1 if tokens[0] == "+" else -1
    weight = 1.0
    rest = tokens[1:]
    last = rest[-1]
    try:
        if last.startswith("@"):
            weight = float(last[1:])
            rest = rest[:-1]
        elif _looks_like_weight(last):
            weight = float(last)
            rest = rest[:-1]
    except ValueError as exc:
        raise StreamFormatError(f"bad weight token in line {line!r}") from exc
    if not rest:
        raise StreamFormatError(f"update has no vertices: {line!r}")
    try:
        verts = tuple(sorted(int(t) for t in rest))
    except ValueError as exc:
        raise StreamFormatError(f"bad vertex in line {line!r}") from exc
    try:
        return EdgeUpdate(verts, weight, delta)
    except ValueError as exc:
        raise StreamFormatError(f"invalid update {line!r}: {exc}") from exc


def parse_header(line: str) -> StreamHeader:
    tokens = line.split()
    if len(tokens) != 4 or tokens[0] != "header":
        raise StreamFormatError(f"bad header line: {line!r}")
    try:
        n, arity, weighted = int(tokens[1]), int(tokens[2]), int(tokens[3])
    except ValueError as exc:
        raise StreamFormatError(f"bad header line: {line!r}") from exc
    if n < 1 or arity < 1 or weighted not in (0, 1):
        raise StreamFormatError(f"bad header values: {line!r}")
    return StreamHeader(n, arity, bool(weighted))


def parse_stream(text: str) -> tuple[StreamHeader, list[EdgeUpdate]]:
    header: StreamHeader | None = None
    updates: list[EdgeUpdate] = []
    for raw in text.splitlines():
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if header is None:
            header = parse_header(line)
            continue
        upd = parse_update(line)
        if upd.arity > header.max_arity:
            raise StreamFormatError(
                f"arity {upd.arity} exceeds header bound {header.max_arity}"
            )
        if any(v >= header.n for v in upd.vertices):
            raise StreamFormatError(f"vertex id beyond header n in {line!r}")
        updates.append(upd)
    if header is None:
        raise StreamFormatError("stream has no header line")
    return header, updates


def render_stream(header: StreamHeader, updates: Iterable[EdgeUpdate]) -> str:
    lines = [header.render()]
    lines.extend(u.render() for u in updates)
    return "\n".join(lines) + "\n"


def read_stream(path: str | Path) -> tuple[StreamHeader, list[EdgeUpdate]]:
    return parse_stream(Path(path).read_text())


def write_stream(
    path: str | Path, header: StreamHeader, updates: Iterable[EdgeUpdate]
) -> None:
    Path(path).write_text(render_stream(header, updates))


def iter_inserts(updates: Iterable[EdgeUpdate]) -> Iterator[EdgeUpdate]:
    return (u for u in updates if u.delta == 1)
