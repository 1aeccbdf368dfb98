"""Subgraph sampling over dynamic graph and hypergraph streams.

The sampler keeps, for every (repetition, weight class, color set) cell, a
small linear sketch from which one edge can be recovered after any mix of
insertions and deletions.  On top of it sit exact small-matching and
vertex-cover kernels, approximate large matchings, promise-free and
weighted estimates, bounded-arboricity estimation, hitting sets,
hypergraph matchings, and contraction-closed subgraph search.  All state
is mergeable across shards and serializes to files; see the CLI in
:mod:`graphsample.cli` for the end-to-end pipeline.
"""

from .algorithms import (
    AlgoParams,
    RunReport,
    approx_large_matching,
    arboricity_matching_estimate,
    build_engine,
    contraction_search_stream,
    engine_from_bytes,
    exact_small_matching,
    exact_small_weighted_matching,
    hitting_set_stream,
    hypergraph_matching_stream,
    semi_streaming_matching_estimate,
    weighted_large_matching_estimate,
)
from .generators import GeneratorSpec, generate
from .oracle import MaterializedGraph, materialize, oracle_solve
from .sample import SampleConfig, SampleSketch, merge_samples
from .solvers import (
    Exceeds,
    PropertySpec,
    SmallGraph,
    Solution,
    max_hypergraph_matching,
    max_matching,
    max_weight_matching,
    min_hitting_set,
    min_vertex_cover,
    solve_contraction_property,
)
from .streams import EdgeUpdate, StreamHeader, edge, parse_stream, read_stream

__version__ = "0.1.0"

__all__ = [
    "AlgoParams",
    "EdgeUpdate",
    "Exceeds",
    "GeneratorSpec",
    "MaterializedGraph",
    "PropertySpec",
    "RunReport",
    "SampleConfig",
    "SampleSketch",
    "SmallGraph",
    "Solution",
    "StreamHeader",
    "approx_large_matching",
    "arboricity_matching_estimate",
    "build_engine",
    "contraction_search_stream",
    "edge",
    "engine_from_bytes",
    "exact_small_matching",
    "exact_small_weighted_matching",
    "generate",
    "hitting_set_stream",
    "hypergraph_matching_stream",
    "materialize",
    "max_hypergraph_matching",
    "max_matching",
    "max_weight_matching",
    "merge_samples",
    "min_hitting_set",
    "min_vertex_cover",
    "oracle_solve",
    "parse_stream",
    "read_stream",
    "semi_streaming_matching_estimate",
    "solve_contraction_property",
    "weighted_large_matching_estimate",
]
