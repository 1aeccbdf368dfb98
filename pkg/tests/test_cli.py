"""End-to-end command line flows through main(argv)."""

import json

import pytest

from graphsample.cli import main
from graphsample.harness import SpaceScaling
from graphsample.report import scaling_figure
from graphsample.results import parse_doc
from graphsample.streams import parse_stream, read_stream, write_stream

PNG_MAGIC = b"\x89PNG\r\n\x1a\n"


def gen_stream(tmp_path, name="stream.txt", **overrides):
    args = {
        "family": "planted_matching",
        "n": "60",
        "k": "3",
        "churn": "0.2",
        "seed": "5",
    }
    args.update({k: str(v) for k, v in overrides.items()})
    path = tmp_path / name
    argv = ["gen"]
    for key, val in args.items():
        argv += [f"--{key}", val]
    argv += ["--out", str(path)]
    assert main(argv) == 0
    return path


class TestGen:
    def test_stdout_stream_parses(self, capsys):
        assert main(["gen", "--family", "planted_matching", "--n", "30",
                     "--k", "2", "--seed", "3"]) == 0
        header, updates = parse_stream(capsys.readouterr().out)
        assert header.n == 30
        assert updates

    def test_file_output_with_metadata(self, tmp_path):
        path = gen_stream(tmp_path)
        header, updates = read_stream(path)
        assert header.n == 60
        meta = json.loads((tmp_path / "stream.txt.meta.json").read_text())
        assert meta["matching"] == 3

    def test_seed_env_fallback(self, tmp_path, capsys, monkeypatch):
        monkeypatch.setenv("GRAPHSAMPLE_SEED", "9")
        main(["gen", "--family", "planted_matching", "--n", "30", "--k", "2"])
        from_env = capsys.readouterr().out
        main(["gen", "--family", "planted_matching", "--n", "30", "--k", "2",
              "--seed", "9"])
        explicit = capsys.readouterr().out
        assert from_env == explicit
        main(["gen", "--family", "planted_matching", "--n", "30", "--k", "2",
              "--seed", "4"])
        assert capsys.readouterr().out != from_env

    def test_bad_seed_env(self, monkeypatch):
        monkeypatch.setenv("GRAPHSAMPLE_SEED", "many")
        with pytest.raises(SystemExit):
            main(["gen", "--family", "planted_matching", "--n", "30", "--k", "2"])


class TestPipeline:
    def test_sketch_query_matches_stream_query(self, tmp_path, capsys):
        stream = gen_stream(tmp_path)
        sketch = tmp_path / "s.bin"
        common = ["--mode", "exact-matching", "--k", "3", "--seed", "1"]
        assert main(["sketch", str(stream), *common, "--out", str(sketch)]) == 0

        assert main(["query", str(sketch)]) == 0
        from_sketch = capsys.readouterr().out
        assert main(["query", str(stream), *common]) == 0
        from_stream = capsys.readouterr().out

        # space lines differ: a live engine counts every allocated cell,
        # a reloaded one only what survived serialization
        strip = lambda text: [
            ln for ln in text.splitlines() if not ln.startswith("space ")
        ]
        assert strip(from_sketch) == strip(from_stream)

        doc = parse_doc(from_sketch)
        assert doc.mode == "exact-matching"
        assert doc.success
        assert doc.value == 3.0
        assert doc.solutions["matching"].size == 3

    def test_merged_shards_equal_whole_sketch(self, tmp_path):
        stream = gen_stream(tmp_path)
        header, updates = read_stream(stream)
        half = len(updates) // 2
        write_stream(tmp_path / "a.txt", header, updates[:half])
        write_stream(tmp_path / "b.txt", header, updates[half:])

        common = ["--mode", "exact-matching", "--k", "3", "--seed", "1"]
        for name in ("stream.txt", "a.txt", "b.txt"):
            assert main(["sketch", str(tmp_path / name), *common,
                         "--out", str(tmp_path / (name + ".bin"))]) == 0
        assert main(["merge", str(tmp_path / "a.txt.bin"),
                     str(tmp_path / "b.txt.bin"),
                     "--out", str(tmp_path / "merged.bin")]) == 0
        whole = (tmp_path / "stream.txt.bin").read_bytes()
        merged = (tmp_path / "merged.bin").read_bytes()
        assert merged == whole

    def test_query_mode_mismatch_on_sketch(self, tmp_path):
        stream = gen_stream(tmp_path)
        sketch = tmp_path / "s.bin"
        main(["sketch", str(stream), "--mode", "exact-matching", "--k", "3",
              "--seed", "1", "--out", str(sketch)])
        with pytest.raises(SystemExit):
            main(["query", str(sketch), "--mode", "arboricity"])

    def test_query_stream_needs_mode(self, tmp_path):
        stream = gen_stream(tmp_path)
        with pytest.raises(SystemExit):
            main(["query", str(stream)])

    def test_query_writes_file(self, tmp_path):
        stream = gen_stream(tmp_path)
        out = tmp_path / "doc.txt"
        assert main(["query", str(stream), "--mode", "exact-matching",
                     "--k", "3", "--seed", "1", "--out", str(out)]) == 0
        assert parse_doc(out.read_text()).mode == "exact-matching"


class TestOracleCommand:
    def test_matching_and_cover(self, tmp_path, capsys):
        stream = gen_stream(tmp_path)
        assert main(["oracle", str(stream), "--problem", "matching"]) == 0
        doc = parse_doc(capsys.readouterr().out)
        assert doc.mode == "oracle-matching"
        assert doc.value == 3.0
        assert main(["oracle", str(stream), "--problem", "vertex_cover"]) == 0
        doc = parse_doc(capsys.readouterr().out)
        assert doc.value == 3.0

    def test_heavy_shallow(self, tmp_path, capsys):
        stream = gen_stream(tmp_path)
        assert main(["oracle", str(stream), "--problem", "heavy_shallow",
                     "--nu", "1"]) == 0
        doc = parse_doc(capsys.readouterr().out)
        assert {"heavy", "shallow"} <= set(doc.components)

    def test_property_problem(self, tmp_path, capsys):
        stream = gen_stream(tmp_path)
        assert main(["oracle", str(stream), "--problem", "max_forest"]) == 0
        doc = parse_doc(capsys.readouterr().out)
        assert doc.mode == "oracle-max_forest"
        assert doc.solutions["subgraph"].size == doc.value


class TestCompare:
    def test_sweep_writes_table_and_figure(self, tmp_path, capsys):
        out_dir = tmp_path / "cmp"
        assert main(["compare", "--mode", "exact-matching", "--trials", "2",
                     "--n", "60", "--k", "2", "--churn", "0.2", "--seed", "0",
                     "--out-dir", str(out_dir)]) == 0
        printed = capsys.readouterr().out
        assert "mode exact-matching: 2 trials" in printed
        table = (out_dir / "table.tsv").read_text()
        assert len(table.strip().split("\n")) == 3
        figure = (out_dir / "exact-matching.png").read_bytes()
        assert figure.startswith(PNG_MAGIC)

    def test_scaling_figure_renders(self, tmp_path):
        fake = SpaceScaling(
            ks=[2, 4, 8],
            cells_by_k=[120.0, 470.0, 1900.0],
            slope=2.0,
            ns=[100, 1000],
            cells_by_n=[50.0, 51.0],
            variation=0.02,
        )
        out = scaling_figure(fake, tmp_path / "scaling.png")
        assert out.read_bytes().startswith(PNG_MAGIC)


class TestErrors:
    def test_missing_stream_file_is_exit_2(self, tmp_path):
        assert main(["sketch", str(tmp_path / "absent.txt"),
                     "--mode", "exact-matching", "--out",
                     str(tmp_path / "x.bin")]) == 2

    def test_garbage_stream_is_exit_2(self, tmp_path):
        bad = tmp_path / "bad.txt"
        bad.write_text("stream v1 n=10 arity=2\n+ 1 frog\n")
        assert main(["query", str(bad), "--mode", "exact-matching"]) == 2

    def test_bad_params_are_exit_2(self, tmp_path):
        stream = gen_stream(tmp_path)
        assert main(["query", str(stream), "--mode", "exact-matching",
                     "--k", "0"]) == 2

    def test_merging_unrelated_sketches_is_exit_2(self, tmp_path):
        stream = gen_stream(tmp_path)
        a, b = tmp_path / "a.bin", tmp_path / "b.bin"
        main(["sketch", str(stream), "--mode", "exact-matching", "--k", "2",
              "--seed", "1", "--out", str(a)])
        main(["sketch", str(stream), "--mode", "exact-matching", "--k", "3",
              "--seed", "1", "--out", str(b)])
        assert main(["merge", str(a), str(b), "--out",
                     str(tmp_path / "m.bin")]) == 2
