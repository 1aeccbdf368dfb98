"""Plain-text result documents with a stable, parseable schema.

A document is one `key value` pair per line, grouped by prefix:

    result v1
    mode exact-matching
    param k 4
    value 4
    success true
    flag promise_violation
    component kernel_edges 37
    space cells 210
    solution matching kind matching
    solution matching weight 4.0
    solution matching element 12 17
    solution vertex_cover exceeds 8
    end

Every number renders via ``repr`` so parsing reproduces it exactly.  The
`compare` subcommand and external tooling parse these; the schema is
append-only (new keys may appear, existing ones keep their meaning).
"""

from __future__ import annotations

from dataclasses import asdict, dataclass, field

from .solvers import Exceeds, Solution

SCHEMA = "result v1"


@dataclass
class ResultDoc:
    mode: str
    params: dict[str, object] = field(default_factory=dict)
    value: float = 0.0
    success: bool = True
    flags: list[str] = field(default_factory=list)
    components: dict[str, float] = field(default_factory=dict)
    space: dict[str, int] = field(default_factory=dict)
    solutions: dict[str, Solution | Exceeds] = field(default_factory=dict)


def doc_from_report(report) -> ResultDoc:
    """Flatten an algorithm run report into a document."""
    space = {}
    if report.space is not None:
        space = {
            "cells": report.space.cells,
            "bytes": report.space.serialized_bytes,
        }
    return ResultDoc(
        mode=report.mode,
        params=asdict(report.params),
        value=report.value,
        success=report.success,
        flags=list(report.flags),
        components=dict(report.components),
        space=space,
        solutions=dict(report.solutions),
    )


def _atom(value) -> str:
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return repr(value)
    return str(value)


def _parse_atom(text: str):
    if text == "true":
        return True
    if text == "false":
        return False
    try:
        return int(text)
    except ValueError:
        pass
    try:
        return float(text)
    except ValueError:
        return text


def render_doc(doc: ResultDoc) -> str:
    lines = [SCHEMA, f"mode {doc.mode}"]
    for key in sorted(doc.params):
        lines.append(f"param {key} {_atom(doc.params[key])}")
    lines.append(f"value {_atom(float(doc.value))}")
    lines.append(f"success {_atom(doc.success)}")
    for flag in doc.flags:
        lines.append(f"flag {flag}")
    for key in sorted(doc.components):
        lines.append(f"component {key} {_atom(float(doc.components[key]))}")
    for key in sorted(doc.space):
        lines.append(f"space {key} {doc.space[key]}")
    for role in sorted(doc.solutions):
        sol = doc.solutions[role]
        if isinstance(sol, Exceeds):
            lines.append(f"solution {role} exceeds {sol.budget}")
            continue
        lines.append(f"solution {role} kind {sol.kind}")
        lines.append(f"solution {role} weight {_atom(sol.total_weight)}")
        for element in sol.elements:
            if isinstance(element, tuple):
                rendered = " ".join(str(v) for v in element)
            else:
                rendered = str(element)
            lines.append(f"solution {role} element {rendered}")
    lines.append("end")
    return "\n".join(lines) + "\n"


def parse_doc(text: str) -> ResultDoc:
    lines = [ln for ln in text.splitlines() if ln.strip()]
    if not lines or lines[0] != SCHEMA:
        raise ValueError("not a result document")
    if lines[-1] != "end":
        raise ValueError("truncated result document")
    doc = ResultDoc(mode="")
    pending: dict[str, dict] = {}
    for ln in lines[1:-1]:
        head, _, rest = ln.partition(" ")
        if head == "mode":
            doc.mode = rest
        elif head == "param":
            key, _, raw = rest.partition(" ")
            doc.params[key] = _parse_atom(raw)
        elif head == "value":
            doc.value = float(_parse_atom(rest))
        elif head == "success":
            doc.success = rest == "true"
        elif head == "flag":
            doc.flags.append(rest)
        elif head == "component":
            key, _, raw = rest.partition(" ")
            doc.components[key] = float(_parse_atom(raw))
        elif head == "space":
            key, _, raw = rest.partition(" ")
            doc.space[key] = int(raw)
        elif head == "solution":
            role, _, tail = rest.partition(" ")
            what, _, raw = tail.partition(" ")
            state = pending.setdefault(
                role, {"kind": role, "weight": 0.0, "elements": []}
            )
            if what == "exceeds":
                doc.solutions[role] = Exceeds(int(raw))
                pending.pop(role, None)
            elif what == "kind":
                state["kind"] = raw
            elif what == "weight":
                state["weight"] = float(_parse_atom(raw))
            elif what == "element":
                state["elements"].append(tuple(int(v) for v in raw.split()))
            else:
                raise ValueError(f"unknown solution line {ln!r}")
        else:
            raise ValueError(f"unknown line {ln!r}")
    for role, state in pending.items():
        doc.solutions[role] = Solution(
            kind=state["kind"],
            elements=tuple(state["elements"]),
            total_weight=state["weight"],
        )
    return doc
