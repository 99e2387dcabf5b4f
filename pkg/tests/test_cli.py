import csv
import xml.etree.ElementTree as ET

import pytest

from lexidrift.cli import PipelineConfig, build_config, load_config_file, main
from lexidrift.synth import SynthConfig, generate_corpus

SMALL = ["--n-docs", "16", "--decline-start-index", "12"]


def _run(argv):
    return main([str(a) for a in argv])


class TestConfig:
    def test_file_parsing(self, tmp_path):
        cfg_file = tmp_path / "run.cfg"
        cfg_file.write_text(
            "# reproduction recipe\n"
            "manifest = corpus/manifest.csv\n"
            "perplexity = 6.5   # tuned\n"
            "n_trees = 250\n"
            "gamma = 0.2\n")
        values = load_config_file(cfg_file)
        cfg = build_config(values, {})
        assert cfg.manifest == "corpus/manifest.csv"
        assert cfg.perplexity == 6.5
        assert cfg.n_trees == 250
        assert cfg.gamma == "0.2"

    def test_cli_flags_override_file(self, tmp_path):
        cfg_file = tmp_path / "run.cfg"
        cfg_file.write_text("perplexity = 6.5\n")
        cfg = build_config(load_config_file(cfg_file), {"perplexity": 9.0})
        assert cfg.perplexity == 9.0

    def test_unknown_key_rejected(self):
        with pytest.raises(ValueError, match="unknown config key"):
            build_config({"perplexitee": "4"}, {})

    def test_malformed_line_rejected(self, tmp_path):
        cfg_file = tmp_path / "run.cfg"
        cfg_file.write_text("perplexity: 4\n")
        with pytest.raises(ValueError, match="key = value"):
            load_config_file(cfg_file)

    def test_default_analysis_settings(self):
        cfg = PipelineConfig()
        assert cfg.perplexity == 4.0
        assert cfg.learning_rate == 100.0
        assert cfg.nu == 0.5
        assert cfg.gamma == "auto"
        assert cfg.contamination == 0.1


class TestSynthCommand:
    def test_writes_manifest_and_texts(self, tmp_path):
        out = tmp_path / "corpus"
        assert _run(["synth", "--out", out, "--seed", 1, *SMALL]) == 0
        with open(out / "manifest.csv", newline="") as fh:
            rows = list(csv.reader(fh))
        assert rows[0] == ["path", "date", "title"]
        assert len(rows) == 17
        assert (out / "texts" / "doc_001.txt").exists()

    def test_deterministic(self, tmp_path):
        a = generate_corpus(SynthConfig(n_docs=6, decline_start_index=5, seed=3),
                            tmp_path / "a")
        b = generate_corpus(SynthConfig(n_docs=6, decline_start_index=5, seed=3),
                            tmp_path / "b")
        assert a.read_text() == b.read_text()
        for i in range(1, 7):
            name = f"texts/doc_{i:03d}.txt"
            assert (tmp_path / "a" / name).read_text() == (tmp_path / "b" / name).read_text()

    def test_declined_docs_use_smaller_vocabulary(self, tmp_path):
        generate_corpus(SynthConfig(n_docs=8, decline_start_index=5, seed=0),
                        tmp_path)
        healthy = (tmp_path / "texts" / "doc_001.txt").read_text().lower().split()
        declined = (tmp_path / "texts" / "doc_005.txt").read_text().lower().split()
        assert len(set(declined)) < len(set(healthy))


@pytest.fixture(scope="module")
def corpus_dir(tmp_path_factory):
    out = tmp_path_factory.mktemp("corpus")
    assert _run(["synth", "--out", out, "--seed", 0, *SMALL]) == 0
    return out


class TestPipelineCommand:
    def test_all_artifacts_written(self, corpus_dir, tmp_path):
        out = tmp_path / "run"
        code = _run(["pipeline", "--manifest", corpus_dir / "manifest.csv",
                     "--out", out, "--perplexity", 3, "--n-iters", 120])
        assert code == 0
        expected = ["documents.csv", "corpus_stats.csv", "features.csv",
                    "features_pruned.csv", "correlation.csv", "embedding.csv",
                    "kl_trace.csv", "report_ocsvm.csv", "report_iforest.csv",
                    "timeline_ocsvm.svg", "timeline_iforest.svg"]
        expected += [f"scatter_{f}.svg" for f in
                     PipelineConfig().radius_feature_list()]
        for name in expected:
            assert (out / name).exists(), name
        assert not list(out.glob("*.partial"))
        # artifacts parse
        with open(out / "features.csv", newline="") as fh:
            header = next(csv.reader(fh))
        assert len(header) == 17
        ET.parse(out / "timeline_iforest.svg")

    def test_rerun_is_byte_identical(self, corpus_dir, tmp_path):
        out1, out2 = tmp_path / "r1", tmp_path / "r2"
        args = ["--manifest", corpus_dir / "manifest.csv", "--perplexity", 3,
                "--n-iters", 80]
        assert _run(["pipeline", *args, "--out", out1]) == 0
        assert _run(["pipeline", *args, "--out", out2]) == 0
        for path in sorted(out1.iterdir()):
            assert path.read_bytes() == (out2 / path.name).read_bytes(), path.name

    def test_stagewise_equals_pipeline(self, corpus_dir, tmp_path):
        whole = tmp_path / "whole"
        staged = tmp_path / "staged"
        args = ["--perplexity", 3, "--n-iters", 60]
        assert _run(["pipeline", "--manifest", corpus_dir / "manifest.csv",
                     "--out", whole, *args]) == 0
        assert _run(["ingest", "--manifest", corpus_dir / "manifest.csv",
                     "--out", staged]) == 0
        assert _run(["extract", "--manifest", corpus_dir / "manifest.csv",
                     "--out", staged]) == 0
        assert _run(["correlate", "--out", staged]) == 0
        assert _run(["embed", "--out", staged, *args]) == 0
        assert _run(["detect-svm", "--out", staged]) == 0
        assert _run(["detect-iforest", "--out", staged]) == 0
        assert _run(["plot", "--out", staged]) == 0
        for name in ("features.csv", "features_pruned.csv", "correlation.csv",
                     "embedding.csv", "report_ocsvm.csv", "report_iforest.csv",
                     "timeline_ocsvm.svg"):
            assert (whole / name).read_bytes() == (staged / name).read_bytes(), name

    def test_bad_perplexity_names_stage(self, corpus_dir, tmp_path, capsys):
        code = _run(["pipeline", "--manifest", corpus_dir / "manifest.csv",
                     "--out", tmp_path / "bad", "--perplexity", 99])
        assert code == 1
        err = capsys.readouterr().err
        assert "embed" in err and "tsne" in err and "perplexity" in err

    def test_missing_manifest_fails_in_ingest(self, tmp_path, capsys):
        code = _run(["pipeline", "--manifest", tmp_path / "nope.csv",
                     "--out", tmp_path / "bad"])
        assert code == 1
        assert "ingest" in capsys.readouterr().err

    def test_config_file_drives_pipeline(self, corpus_dir, tmp_path):
        out = tmp_path / "cfgrun"
        cfg = tmp_path / "run.cfg"
        cfg.write_text(
            f"manifest = {corpus_dir / 'manifest.csv'}\n"
            f"out = {out}\n"
            "perplexity = 3\n"
            "n_iters = 60\n"
            "radius_features = ari\n")
        assert _run(["pipeline", "--config", cfg]) == 0
        assert (out / "scatter_ari.svg").exists()
        assert not (out / "scatter_pronoun_noun_ratio.svg").exists()
