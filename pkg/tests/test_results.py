"""Result document rendering and parsing."""

import pytest
from hypothesis import given
from hypothesis import strategies as st

from graphsample.algorithms import AlgoParams, build_engine
from graphsample.results import ResultDoc, doc_from_report, parse_doc, render_doc
from graphsample.solvers import Exceeds, Solution
from graphsample.streams import StreamHeader, edge


def sample_doc():
    return ResultDoc(
        mode="exact-matching",
        params={"k": 4, "eps": 0.5, "round_weights": False},
        value=4.0,
        success=True,
        flags=["kernel_matching_capped"],
        components={"kernel_edges": 37.0, "rate": 0.25},
        space={"cells": 210, "bytes": 9042},
        solutions={
            "matching": Solution("matching", ((2, 9), (4, 11)), 2.0),
            "vertex_cover": Exceeds(8),
        },
    )


class TestRoundTrip:
    def test_known_document_text(self):
        text = render_doc(sample_doc())
        assert text.startswith("result v1\nmode exact-matching\n")
        assert "param eps 0.5\n" in text
        assert "param round_weights false\n" in text
        assert "flag kernel_matching_capped\n" in text
        assert "solution matching element 2 9\n" in text
        assert "solution vertex_cover exceeds 8\n" in text
        assert text.endswith("end\n")

    def test_parse_recovers_fields(self):
        doc = parse_doc(render_doc(sample_doc()))
        assert doc.mode == "exact-matching"
        assert doc.params == {"k": 4, "eps": 0.5, "round_weights": False}
        assert doc.value == 4.0
        assert doc.flags == ["kernel_matching_capped"]
        assert doc.components == {"kernel_edges": 37.0, "rate": 0.25}
        assert doc.space == {"cells": 210, "bytes": 9042}
        assert doc.solutions["matching"].elements == ((2, 9), (4, 11))
        assert doc.solutions["vertex_cover"] == Exceeds(8)

    def test_render_parse_render_is_idempotent(self):
        # vertex elements come back as one-tuples, which render identically,
        # so the fixed point is reached after one parse
        doc = ResultDoc(
            mode="hitting-set",
            solutions={"hitting_set": Solution("hitting_set", (3, 7, 9))},
        )
        once = render_doc(doc)
        assert render_doc(parse_doc(once)) == once
        assert parse_doc(once).solutions["hitting_set"].elements == ((3,), (7,), (9,))

    def test_engine_report_flattens(self):
        header = StreamHeader(10, 2, True)
        eng = build_engine("exact-matching", AlgoParams(k=2, seed=1), header)
        report = eng.absorb([edge(0, 1), edge(2, 3)]).finish()
        doc = doc_from_report(report)
        assert doc.mode == "exact-matching"
        assert doc.params["k"] == 2
        assert doc.space["cells"] > 0
        text = render_doc(doc)
        again = parse_doc(text)
        assert again.value == report.value
        assert render_doc(again) == text

    def test_float_values_survive_exactly(self):
        doc = ResultDoc(mode="m", value=0.30000000000000004)
        assert parse_doc(render_doc(doc)).value == 0.30000000000000004


class TestParseErrors:
    @pytest.mark.parametrize(
        "text",
        [
            "",
            "something else\nend\n",
            "result v1\nmode m\n",  # missing end
            "result v1\nwhat is this\nend\n",
            "result v1\nsolution r mystery 3\nend\n",
        ],
    )
    def test_rejected(self, text):
        with pytest.raises(ValueError):
            parse_doc(text)

    def test_blank_lines_are_ignored(self):
        doc = parse_doc("result v1\n\nmode m\n\nvalue 2.0\n\nend\n")
        assert doc.mode == "m"
        assert doc.value == 2.0


@given(
    value=st.floats(allow_nan=False, allow_infinity=False),
    flags=st.lists(st.sampled_from(["a_flag", "b_flag"]), max_size=2),
    comps=st.dictionaries(
        st.sampled_from(["x", "y", "z"]),
        st.floats(allow_nan=False, allow_infinity=False),
        max_size=3,
    ),
)
def test_round_trip_property(value, flags, comps):
    doc = ResultDoc(mode="m", value=value, flags=flags, components=comps)
    once = render_doc(doc)
    parsed = parse_doc(once)
    assert parsed.value == value
    assert parsed.components == comps
    assert render_doc(parsed) == once
