"""Stream families: certified truths, churn behavior, determinism."""

import pytest

from graphsample.generators import FAMILIES, GeneratorSpec, generate
from graphsample.oracle import (
    covers,
    enum_max_matching,
    enum_min_cover,
    is_forest,
    materialize,
    two_coloring,
)


def live_graph(stream):
    return materialize(stream.updates, stream.header.n)


class TestSpecValidation:
    def test_unknown_family(self):
        with pytest.raises(ValueError):
            GeneratorSpec(family="smallworld", n=10)

    def test_churn_range(self):
        with pytest.raises(ValueError):
            GeneratorSpec(family="grid", n=10, churn=1.0)

    @pytest.mark.parametrize(
        "kwargs",
        [
            dict(family="planted_matching", n=5, k=3),
            dict(family="planted_hitting_set", n=10, k=2, d=3),
            dict(family="planted_hypermatching", n=5, k=2, d=3),
            dict(family="bounded_arboricity", n=10, nu=0),
            dict(family="bipartite_complete", n=20, k=3),
            dict(family="biclique", n=5, a=3, b=4),
            dict(family="grid", n=10, rows=4, cols=4),
            dict(family="random_gnm", n=10, m=50, span=4),
        ],
    )
    def test_infeasible_shapes_rejected(self, kwargs):
        with pytest.raises(ValueError):
            generate(GeneratorSpec(**kwargs))

    def test_noise_beyond_capacity_rejected(self):
        # 3 centers over 10 vertices admit only 18 noise edges; asking for
        # more used to spin forever instead of failing
        with pytest.raises(ValueError):
            generate(GeneratorSpec(family="planted_matching", n=10, k=3, noise=100))
        generate(GeneratorSpec(family="planted_matching", n=10, k=3))
        with pytest.raises(ValueError):
            generate(
                GeneratorSpec(
                    family="planted_hypermatching", n=7, k=2, d=3, noise=50
                )
            )
        generate(GeneratorSpec(family="planted_hypermatching", n=7, k=2, d=3))


class TestCertifiedTruth:
    def test_planted_matching(self):
        stream = generate(
            GeneratorSpec(family="planted_matching", n=30, k=3, noise=10, seed=4)
        )
        g = live_graph(stream)
        assert stream.meta["matching"] == 3
        assert len(enum_max_matching(g.edges)) == 3
        assert len(enum_min_cover(g.edges)) == 3
        assert covers(g.edges, stream.meta["cover_witness"])

    def test_sunflower_hitting_set(self):
        stream = generate(
            GeneratorSpec(family="planted_hitting_set", n=20, k=2, d=3, seed=1)
        )
        g = live_graph(stream)
        assert len(g.edges) == 2 * 4
        assert len(enum_min_cover(g.edges)) == 2
        assert covers(g.edges, stream.meta["cores"])
        assert len(enum_max_matching(g.edges)) == 2

    def test_planted_hypermatching(self):
        stream = generate(
            GeneratorSpec(
                family="planted_hypermatching", n=24, k=2, d=3, noise=8, seed=2
            )
        )
        g = live_graph(stream)
        assert len(enum_max_matching(g.edges)) == 2
        assert len(enum_min_cover(g.edges)) == 2
        assert all(set(e) & set(stream.meta["spine"]) for e in g.edges)

    def test_bounded_arboricity(self):
        forest = generate(
            GeneratorSpec(family="bounded_arboricity", n=40, nu=1, seed=3)
        )
        g = live_graph(forest)
        assert is_forest(g.edges)
        assert len(g.edges) == 39
        double = generate(
            GeneratorSpec(family="bounded_arboricity", n=40, nu=2, seed=3)
        )
        assert len(live_graph(double).edges) <= 2 * 39

    def test_bipartite_complete_layers(self):
        stream = generate(
            GeneratorSpec(family="bipartite_complete", n=12, k=4, seed=5)
        )
        g = live_graph(stream)
        assert two_coloring(g.edges) is not None
        assert len(enum_max_matching(g.edges)) == 4

    def test_biclique(self):
        stream = generate(GeneratorSpec(family="biclique", n=10, a=3, b=4, seed=6))
        g = live_graph(stream)
        assert len(g.edges) == 12
        assert len(enum_max_matching(g.edges)) == 3

    def test_grid(self):
        stream = generate(GeneratorSpec(family="grid", n=12, rows=3, cols=4))
        g = live_graph(stream)
        assert len(g.edges) == 3 * 3 + 2 * 4
        assert two_coloring(g.edges) is not None
        thinned = generate(
            GeneratorSpec(family="grid", n=12, rows=3, cols=4, keep=0.5, seed=1)
        )
        assert len(live_graph(thinned).edges) < 17

    def test_random_gnm_span(self):
        stream = generate(
            GeneratorSpec(family="random_gnm", n=50, m=10, span=6, seed=7)
        )
        g = live_graph(stream)
        assert len(g.edges) == 10
        assert len({v for e in g.edges for v in e}) <= 6

    def test_random_gnm_hyperedges(self):
        stream = generate(
            GeneratorSpec(family="random_gnm", n=30, m=5, d=3, seed=8)
        )
        g = live_graph(stream)
        assert len(g.edges) == 5
        assert all(len(e) == 3 for e in g.edges)
        assert stream.header.max_arity == 3


class TestChurn:
    def test_replay_is_strictly_valid(self):
        stream = generate(
            GeneratorSpec(family="planted_matching", n=60, k=4, churn=0.4, seed=9)
        )
        live_graph(stream)

    def test_exact_delete_fraction(self):
        stream = generate(
            GeneratorSpec(family="biclique", n=40, a=5, b=6, churn=0.5, seed=10)
        )
        inserts = sum(1 for u in stream.updates if u.delta == 1)
        deletes = sum(1 for u in stream.updates if u.delta == -1)
        assert deletes == inserts // 2
        assert inserts - deletes == stream.meta["final_edges"]

    def test_final_graph_unchanged_by_churn(self):
        base = dict(family="planted_matching", n=50, k=4, seed=11)
        calm = generate(GeneratorSpec(**base))
        busy = generate(GeneratorSpec(**base, churn=0.6))
        assert live_graph(calm).live == live_graph(busy).live
        assert busy.meta["matching"] == calm.meta["matching"]

    def test_zero_churn_is_insert_only(self):
        stream = generate(GeneratorSpec(family="grid", n=16, rows=4, cols=4))
        assert all(u.delta == 1 for u in stream.updates)


class TestWeights:
    def test_weight_levels_mark_header_and_updates(self):
        stream = generate(
            GeneratorSpec(
                family="planted_matching", n=40, k=3, weight_levels=5, seed=12
            )
        )
        assert stream.header.weighted
        weights = {u.weight for u in stream.updates}
        assert weights <= {float(w) for w in range(1, 6)}
        assert len(weights) > 1

    def test_unweighted_by_default(self):
        stream = generate(GeneratorSpec(family="grid", n=9, rows=3, cols=3))
        assert not stream.header.weighted
        assert {u.weight for u in stream.updates} == {1.0}


class TestDeterminism:
    @pytest.mark.parametrize("family", FAMILIES)
    def test_same_spec_same_stream(self, family):
        shapes = {
            "planted_matching": dict(n=30, k=3),
            "planted_hitting_set": dict(n=30, k=2, d=3),
            "planted_hypermatching": dict(n=30, k=2, d=3),
            "bounded_arboricity": dict(n=30, nu=2),
            "bipartite_complete": dict(n=30, k=4),
            "biclique": dict(n=30, a=3, b=3),
            "grid": dict(n=30, rows=5, cols=5),
            "random_gnm": dict(n=30, m=12),
        }
        spec = GeneratorSpec(family=family, churn=0.3, seed=13, **shapes[family])
        assert generate(spec).updates == generate(spec).updates

    def test_seed_changes_stream(self):
        a = generate(GeneratorSpec(family="random_gnm", n=30, m=12, seed=1))
        b = generate(GeneratorSpec(family="random_gnm", n=30, m=12, seed=2))
        assert a.updates != b.updates
