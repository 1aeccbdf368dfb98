"""Command line surface: gen, sketch, merge, query, oracle, compare.

A pipeline typically runs `gen` to synthesize a stream file, `sketch` to
digest it (possibly per shard), `merge` to combine shard sketches, and
`query` to extract a result document.  `oracle` answers the same questions
exactly from the materialized stream, and `compare` sweeps seeds to
measure agreement between the two, writing a TSV table and rendered
figures next to it.

The default seed comes from the GRAPHSAMPLE_SEED environment variable
when set; flags always win.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from pathlib import Path

from .algorithms import (
    ENGINE_MODES,
    AlgoParams,
    SKETCH_MAGIC,
    build_engine,
    engine_from_bytes,
)
from .generators import FAMILIES, GeneratorSpec, generate
from .harness import MODE_TRIALS, run_sweep, space_scaling
from .oracle import (
    StreamViolation,
    heavy_shallow_counts,
    materialize,
    oracle_solve,
)
from .results import ResultDoc, doc_from_report, render_doc
from .serialize import FormatError
from .sketches import MergeError, SketchError
from .solvers import Solution
from .streams import StreamFormatError, read_stream, write_stream


def _default_seed() -> int:
    raw = os.environ.get("GRAPHSAMPLE_SEED", "0")
    try:
        return int(raw)
    except ValueError:
        raise SystemExit(f"GRAPHSAMPLE_SEED must be an integer, got {raw!r}")


def _add_param_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--k", type=int, default=1, help="promise bound")
    p.add_argument("--alpha", type=float, default=1.0, help="approximation target")
    p.add_argument("--eps", type=float, default=0.5, help="accuracy knob in (0, 1]")
    p.add_argument("--nu", type=int, default=1, help="arboricity bound")
    p.add_argument("--d", type=int, default=2, help="maximum hyperedge arity")
    p.add_argument("--seed", type=int, default=None, help="base seed")
    p.add_argument(
        "--reps", type=int, default=5, help="independent trials for contraction search"
    )
    p.add_argument("--b-const", type=int, default=100, help="color count multiplier")
    p.add_argument("--r-const", type=int, default=5, help="repetition multiplier")
    p.add_argument(
        "--cell-mode",
        choices=("counter", "xor_unique", "l0"),
        default="",
        help="override the per-mode default cell type",
    )
    p.add_argument("--prop", default="", help="contraction property, e.g. max_forest")
    p.add_argument(
        "--round", action="store_true", help="round weights to powers of 1+eps"
    )


def _params_from_args(args) -> AlgoParams:
    seed = args.seed if args.seed is not None else _default_seed()
    return AlgoParams(
        k=args.k,
        alpha=args.alpha,
        eps=args.eps,
        nu=args.nu,
        d=args.d,
        r_const=args.r_const,
        b_const=args.b_const,
        trials=args.reps,
        prop=args.prop,
        round_weights=args.round,
        cell_mode=args.cell_mode,
        seed=seed,
    )


def _emit(text: str, out: str | None) -> None:
    if out:
        Path(out).write_text(text)
    else:
        sys.stdout.write(text)


# ---------------------------------------------------------------------------
# subcommands


def _cmd_gen(args) -> int:
    seed = args.seed if args.seed is not None else _default_seed()
    spec = GeneratorSpec(
        family=args.family,
        n=args.n,
        churn=args.churn,
        seed=seed,
        k=args.k,
        d=args.d,
        nu=args.nu,
        m=args.m,
        a=args.a,
        b=args.b,
        rows=args.rows,
        cols=args.cols,
        span=args.span,
        keep=args.keep,
        weight_levels=args.weights,
        noise=args.noise,
    )
    stream = generate(spec)
    if args.out:
        write_stream(args.out, stream.header, stream.updates)
        Path(args.out + ".meta.json").write_text(
            json.dumps(stream.meta, sort_keys=True, default=str) + "\n"
        )
        print(f"{args.out}: {len(stream.updates)} updates", file=sys.stderr)
    else:
        from .streams import render_stream

        sys.stdout.write(render_stream(stream.header, stream.updates))
    return 0


def _cmd_sketch(args) -> int:
    header, updates = read_stream(args.stream)
    eng = build_engine(args.mode, _params_from_args(args), header)
    eng.absorb(updates)
    Path(args.out).write_bytes(eng.to_bytes())
    return 0


def _cmd_merge(args) -> int:
    engines = [engine_from_bytes(Path(p).read_bytes()) for p in args.sketches]
    merged = engines[0]
    for other in engines[1:]:
        merged.merge(other)
    Path(args.out).write_bytes(merged.to_bytes())
    return 0


def _cmd_query(args) -> int:
    data = Path(args.input).read_bytes()
    if data.startswith(SKETCH_MAGIC):
        eng = engine_from_bytes(data)
        if args.mode and args.mode != eng.mode:
            raise SystemExit(
                f"sketch file holds mode {eng.mode!r}, not {args.mode!r}"
            )
    else:
        if not args.mode:
            raise SystemExit("querying a stream file needs --mode")
        header, updates = read_stream(args.input)
        eng = build_engine(args.mode, _params_from_args(args), header)
        eng.absorb(updates)
    report = eng.finish()
    _emit(render_doc(doc_from_report(report)), args.out)
    return 0


_ORACLE_PROBLEMS = (
    "matching",
    "weighted_matching",
    "vertex_cover",
    "hitting_set",
    "hypergraph_matching",
    "heavy_shallow",
)


def _cmd_oracle(args) -> int:
    header, updates = read_stream(args.stream)
    graph = materialize(updates, header.n)
    problem = args.problem
    doc = ResultDoc(mode=f"oracle-{problem}", params={"n": header.n})
    if problem == "heavy_shallow":
        heavy, shallow = heavy_shallow_counts(graph, args.nu)
        doc.params["nu"] = args.nu
        doc.components = {"heavy": float(heavy), "shallow": float(shallow)}
        doc.value = float(max(heavy, shallow))
    elif problem == "weighted_matching":
        elements, weight = oracle_solve(graph, problem)
        doc.value = weight
        doc.solutions["weighted_matching"] = Solution(
            kind="weighted_matching", elements=tuple(elements), total_weight=weight
        )
    elif problem in ("vertex_cover", "hitting_set"):
        chosen = oracle_solve(graph, problem)
        doc.value = float(len(chosen))
        doc.solutions[problem] = Solution(
            kind=problem,
            elements=tuple((v,) for v in chosen),
            total_weight=float(len(chosen)),
        )
    else:
        elements = oracle_solve(graph, problem)
        doc.value = float(len(elements))
        role = problem if problem in _ORACLE_PROBLEMS else "subgraph"
        doc.solutions[role] = Solution(
            kind=role, elements=tuple(elements), total_weight=float(len(elements))
        )
    _emit(render_doc(doc), args.out)
    return 0


def _cmd_compare(args) -> int:
    from .report import scaling_figure, sweep_figure

    out_dir = Path(args.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    seed = args.seed if args.seed is not None else _default_seed()

    if args.mode == "space-scaling":
        scaling = space_scaling()
        rows = ["quantity\tx\tcells"]
        for k, c in zip(scaling.ks, scaling.cells_by_k):
            rows.append(f"promise\t{k}\t{c}")
        for n, c in zip(scaling.ns, scaling.cells_by_n):
            rows.append(f"vertices\t{n}\t{c}")
        (out_dir / "scaling.tsv").write_text("\n".join(rows) + "\n")
        figure = scaling_figure(scaling, out_dir / "scaling.png")
        print(f"slope {scaling.slope:.3f}, variation {scaling.variation:.1%}")
        print(f"wrote {out_dir / 'scaling.tsv'} and {figure}")
        return 0

    opts = {}
    for key in ("n", "k", "d", "nu", "m", "span"):
        val = getattr(args, key)
        if val is not None:
            opts[key] = val
    for key in ("alpha", "eps", "churn"):
        val = getattr(args, key)
        if val is not None:
            opts[key] = val
    sweep = run_sweep(args.mode, args.trials, base_seed=seed, **opts)
    (out_dir / "table.tsv").write_text(sweep.to_tsv())
    figure = sweep_figure(sweep, out_dir / f"{args.mode}.png")
    for line in sweep.summary_lines():
        print(line)
    print(f"wrote {out_dir / 'table.tsv'} and {figure}")
    return 0


# ---------------------------------------------------------------------------
# parser wiring


def _build_parser() -> argparse.ArgumentParser:
    top = argparse.ArgumentParser(
        prog="graphsample",
        description="subgraph sampling over dynamic graph streams",
    )
    sub = top.add_subparsers(dest="command", required=True)

    gen = sub.add_parser("gen", help="synthesize a stream file")
    gen.add_argument("--family", choices=FAMILIES, required=True)
    gen.add_argument("--n", type=int, required=True)
    gen.add_argument("--churn", type=float, default=0.0)
    gen.add_argument("--seed", type=int, default=None)
    gen.add_argument("--k", type=int, default=0)
    gen.add_argument("--d", type=int, default=2)
    gen.add_argument("--nu", type=int, default=1)
    gen.add_argument("--m", type=int, default=0)
    gen.add_argument("--a", type=int, default=0)
    gen.add_argument("--b", type=int, default=0)
    gen.add_argument("--rows", type=int, default=0)
    gen.add_argument("--cols", type=int, default=0)
    gen.add_argument("--span", type=int, default=0)
    gen.add_argument("--keep", type=float, default=1.0)
    gen.add_argument("--weights", type=int, default=0)
    gen.add_argument("--noise", type=int, default=-1)
    gen.add_argument("--out", default=None)
    gen.set_defaults(func=_cmd_gen)

    sketch = sub.add_parser("sketch", help="digest a stream into a sketch file")
    sketch.add_argument("stream")
    sketch.add_argument("--mode", choices=sorted(ENGINE_MODES), required=True)
    _add_param_flags(sketch)
    sketch.add_argument("--out", required=True)
    sketch.set_defaults(func=_cmd_sketch)

    merge = sub.add_parser("merge", help="combine sketch files of one stream")
    merge.add_argument("sketches", nargs="+")
    merge.add_argument("--out", required=True)
    merge.set_defaults(func=_cmd_merge)

    query = sub.add_parser("query", help="answer from a sketch or stream file")
    query.add_argument("input")
    query.add_argument("--mode", choices=sorted(ENGINE_MODES), default="")
    _add_param_flags(query)
    query.add_argument("--out", default=None)
    query.set_defaults(func=_cmd_query)

    oracle = sub.add_parser("oracle", help="exact answers from the full stream")
    oracle.add_argument("stream")
    oracle.add_argument(
        "--problem",
        required=True,
        help="matching, vertex_cover, hitting_set, weighted_matching, "
        "hypergraph_matching, heavy_shallow, or a property like b_matching:2",
    )
    oracle.add_argument("--nu", type=int, default=1)
    oracle.add_argument("--out", default=None)
    oracle.set_defaults(func=_cmd_oracle)

    compare = sub.add_parser("compare", help="sweep seeds, tabulate success rates")
    compare.add_argument(
        "--mode", required=True, choices=sorted(MODE_TRIALS) + ["space-scaling"]
    )
    compare.add_argument("--trials", type=int, default=20)
    compare.add_argument("--seed", type=int, default=None)
    compare.add_argument("--n", type=int, default=None)
    compare.add_argument("--k", type=int, default=None)
    compare.add_argument("--d", type=int, default=None)
    compare.add_argument("--nu", type=int, default=None)
    compare.add_argument("--m", type=int, default=None)
    compare.add_argument("--span", type=int, default=None)
    compare.add_argument("--alpha", type=float, default=None)
    compare.add_argument("--eps", type=float, default=None)
    compare.add_argument("--churn", type=float, default=None)
    compare.add_argument("--out-dir", default="compare-out")
    compare.set_defaults(func=_cmd_compare)

    return top


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (
        StreamFormatError,
        StreamViolation,
        FormatError,
        SketchError,
        MergeError,
        ValueError,
        OSError,
    ) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
