"""Command-line pipeline: ingest -> extract -> correlate -> embed -> detect -> plot.

Every stage is also a standalone subcommand that reads the previous stage's
CSV from the output directory, so partial reruns are cheap. Configuration
comes from a plain ``key = value`` file (``--config``) with every key
overridable by a CLI flag of the same name; all randomness is governed by
explicit seeds. Artifacts are written to ``<name>.partial`` and renamed on
completion, so an interrupted stage leaves its partial output visible.
"""

from __future__ import annotations

import argparse
import csv
import datetime as dt
import sys
from dataclasses import dataclass, fields, replace
from pathlib import Path

from . import anomaly, corpus as corpus_mod, features as features_mod, plot, synth, tsne

__all__ = ["PipelineConfig", "StageError", "load_config_file", "run_pipeline", "main"]

_DEFAULT_RADIUS_FEATURES = "pronoun_noun_ratio,pronoun_freq_rate,word_freq_rate,ari"


class StageError(RuntimeError):
    def __init__(self, stage: str, cause: BaseException):
        super().__init__(f"stage {stage} failed: {cause}")
        self.stage = stage
        self.cause = cause


@dataclass(frozen=True)
class PipelineConfig:
    manifest: str = ""
    out: str = "out"
    seed: int = 0
    # t-SNE
    perplexity: float = 4.0
    learning_rate: float = 100.0
    n_iters: int = 1000
    exaggeration_factor: float = 4.0
    exaggeration_iters: int = 100
    sigma_tolerance: float = 1e-5
    # one-class SVM
    nu: float = 0.5
    gamma: str = "auto"  # "auto" or a float literal
    # isolation forest
    n_trees: int = 100
    psi: str = "auto"  # "auto" or an int literal
    contamination: float = 0.1
    # plotting
    radius_features: str = _DEFAULT_RADIUS_FEATURES
    # synth corpus generation
    n_docs: int = 60
    decline_start_index: int = 45
    pronoun_factor: float = 2.0
    vocab_shrink: float = 0.4

    def tsne_config(self) -> tsne.TsneConfig:
        return tsne.TsneConfig(
            perplexity=self.perplexity, learning_rate=self.learning_rate,
            n_iters=self.n_iters, exaggeration_factor=self.exaggeration_factor,
            exaggeration_iters=self.exaggeration_iters, seed=self.seed,
            sigma_tolerance=self.sigma_tolerance)

    def gamma_value(self):
        return "auto" if self.gamma == "auto" else float(self.gamma)

    def psi_value(self):
        return "auto" if self.psi == "auto" else int(self.psi)

    def radius_feature_list(self) -> list[str]:
        return [f.strip() for f in self.radius_features.split(",") if f.strip()]


def load_config_file(path: str | Path) -> dict[str, str]:
    """Parse ``key = value`` lines; '#' starts a comment, blank lines ignored."""
    result: dict[str, str] = {}
    for line_no, raw in enumerate(Path(path).read_text(encoding="utf-8").splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ValueError(f"{path}:{line_no}: expected 'key = value', got {raw!r}")
        key, value = line.split("=", 1)
        result[key.strip()] = value.strip()
    return result


def _coerce(value: str, target_type):
    if target_type is bool:
        return value.lower() in ("1", "true", "yes", "on")
    return target_type(value)


def build_config(file_values: dict[str, str], overrides: dict) -> PipelineConfig:
    """Defaults, overlaid with config-file values, overlaid with CLI flags."""
    cfg = PipelineConfig()
    by_name = {f.name: f for f in fields(PipelineConfig)}
    updates = {}
    for key, raw in file_values.items():
        if key not in by_name:
            raise ValueError(f"unknown config key {key!r}")
        updates[key] = _coerce(raw, type(getattr(cfg, key)))
    for key, value in overrides.items():
        if value is not None and key in by_name:
            updates[key] = value
    return replace(cfg, **updates)


def _doc_date(doc_id: str) -> dt.date:
    """Dates travel inside doc_ids (``YYYY-MM-DD_<slug>``)."""
    try:
        return dt.date.fromisoformat(doc_id[:10])
    except ValueError:
        raise ValueError(
            f"doc_id {doc_id!r} does not start with an ISO date; "
            "cannot recover document dates from this CSV") from None


def _finalize(path: Path) -> Path:
    """Rename ``<path>.partial`` to ``path`` once a writer succeeded."""
    partial = path.with_name(path.name + ".partial")
    partial.replace(path)
    return path


def _partial(path: Path) -> Path:
    return path.with_name(path.name + ".partial")


# --- stages -------------------------------------------------------------------


def _require_manifest(cfg: PipelineConfig) -> str:
    if not cfg.manifest:
        raise ValueError("a manifest path is required (--manifest or config key)")
    return cfg.manifest


def stage_ingest(cfg: PipelineConfig, out: Path) -> list:
    manifest = corpus_mod.load_manifest(_require_manifest(cfg))
    docs = corpus_mod.load_corpus(manifest)
    stats = corpus_mod.corpus_stats(docs)

    target = out / "documents.csv"
    with open(_partial(target), "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(["doc_id", "date", "title", "path"])
        for doc, entry in zip(docs, manifest.entries):
            writer.writerow([doc.id, doc.date.isoformat(), doc.title, str(entry.path)])
    _finalize(target)

    target = out / "corpus_stats.csv"
    with open(_partial(target), "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(["year", "count"])
        for year, count in stats.items():
            writer.writerow([year, count])
    _finalize(target)
    return docs


def stage_extract(cfg: PipelineConfig, out: Path, docs=None) -> features_mod.FeatureMatrix:
    if docs is None:
        docs = corpus_mod.load_corpus(corpus_mod.load_manifest(_require_manifest(cfg)))
    vectors = [features_mod.extract_all(doc) for doc in docs]
    raw = features_mod.assemble_matrix(vectors)

    target = out / "features.csv"
    features_mod.write_matrix_csv(raw, _partial(target))
    _finalize(target)

    pruned = features_mod.prune_and_standardize(raw)
    target = out / "features_pruned.csv"
    features_mod.write_matrix_csv(pruned, _partial(target))
    _finalize(target)
    return raw


def stage_correlate(cfg: PipelineConfig, out: Path, raw=None) -> None:
    if raw is None:
        raw = features_mod.read_matrix_csv(out / "features.csv")
    corr = features_mod.correlation_matrix(raw)
    target = out / "correlation.csv"
    with open(_partial(target), "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(["feature", *raw.feature_names])
        for name, row in zip(raw.feature_names, corr):
            writer.writerow([name, *(f"{v:.17g}" for v in row)])
    _finalize(target)


def stage_embed(cfg: PipelineConfig, out: Path, pruned=None) -> tsne.Embedding:
    if pruned is None:
        pruned = features_mod.read_matrix_csv(out / "features_pruned.csv", standardized=True)
    embedding = tsne.embed_matrix(pruned, cfg.tsne_config())
    target = out / "embedding.csv"
    tsne.write_embedding_csv(embedding, _partial(target))
    _finalize(target)
    target = out / "kl_trace.csv"
    tsne.write_kl_trace_csv(embedding, _partial(target))
    _finalize(target)
    return embedding


def stage_detect_svm(cfg: PipelineConfig, out: Path, pruned=None) -> anomaly.AnomalyReport:
    if pruned is None:
        pruned = features_mod.read_matrix_csv(out / "features_pruned.csv", standardized=True)
    det = anomaly.OneClassSvmDetector(nu=cfg.nu, gamma=cfg.gamma_value())
    det.fit(pruned.values)
    decisions = det.decision_function(pruned.values)
    report = anomaly.flag_anomalies(
        decisions, "ocsvm", pruned.doc_ids,
        [_doc_date(d) for d in pruned.doc_ids],
        params={"nu": cfg.nu, "gamma": det.gamma_})
    target = out / "report_ocsvm.csv"
    anomaly.write_report_csv(report, _partial(target))
    _finalize(target)
    return report


def stage_detect_iforest(cfg: PipelineConfig, out: Path, pruned=None) -> anomaly.AnomalyReport:
    if pruned is None:
        pruned = features_mod.read_matrix_csv(out / "features_pruned.csv", standardized=True)
    det = anomaly.IsolationForestDetector(
        n_trees=cfg.n_trees, psi=cfg.psi_value(),
        contamination=cfg.contamination, seed=cfg.seed)
    det.fit(pruned.values)
    scores = det.score_samples(pruned.values)
    report = anomaly.flag_anomalies(
        scores, "iforest", pruned.doc_ids,
        [_doc_date(d) for d in pruned.doc_ids],
        contamination=cfg.contamination,
        params={"n_trees": cfg.n_trees, "psi": det.psi_,
                "contamination": cfg.contamination, "seed": cfg.seed})
    target = out / "report_iforest.csv"
    anomaly.write_report_csv(report, _partial(target))
    _finalize(target)
    return report


def stage_plot(cfg: PipelineConfig, out: Path, raw=None, embedding=None,
               reports=None) -> None:
    if raw is None:
        raw = features_mod.read_matrix_csv(out / "features.csv")
    if embedding is None:
        embedding = tsne.read_embedding_csv(out / "embedding.csv")
    if reports is None:
        reports = {}
        for method in ("ocsvm", "iforest"):
            path = out / f"report_{method}.csv"
            if path.exists():
                reports[method] = anomaly.read_report_csv(path)
    dates = [_doc_date(d) for d in embedding.doc_ids]
    for feature in cfg.radius_feature_list():
        spec = plot.ScatterSpec(radius_feature=feature)
        target = out / f"scatter_{feature}.svg"
        plot.scatter_svg(embedding, raw, spec, _partial(target), dates=dates)
        _finalize(target)
    for method, report in sorted(reports.items()):
        target = out / f"timeline_{method}.svg"
        plot.timeline_svg(report, _partial(target))
        _finalize(target)


def run_pipeline(cfg: PipelineConfig) -> int:
    """Run every stage in order, reusing in-memory intermediates."""
    out = Path(cfg.out)
    out.mkdir(parents=True, exist_ok=True)
    stage = "ingest"
    try:
        docs = stage_ingest(cfg, out)
        stage = "extract"
        raw = stage_extract(cfg, out, docs)
        stage = "correlate"
        stage_correlate(cfg, out, raw)
        pruned = features_mod.prune_and_standardize(raw)
        stage = "embed"
        embedding = stage_embed(cfg, out, pruned)
        stage = "detect-svm"
        report_svm = stage_detect_svm(cfg, out, pruned)
        stage = "detect-iforest"
        report_iforest = stage_detect_iforest(cfg, out, pruned)
        stage = "plot"
        stage_plot(cfg, out, raw, embedding,
                   {"ocsvm": report_svm, "iforest": report_iforest})
    except Exception as exc:
        raise StageError(stage, exc) from exc
    return 0


# --- argument parsing -----------------------------------------------------------


def _add_common(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--config", help="key = value configuration file")
    parser.add_argument("--out", help="output directory")
    parser.add_argument("--seed", type=int, help="global random seed")


def _add_flags(parser: argparse.ArgumentParser, names: list[str]) -> None:
    types = {f.name: type(f.default) for f in fields(PipelineConfig)}
    for name in names:
        flag = "--" + name.replace("_", "-")
        parser.add_argument(flag, dest=name, type=types[name])


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="lexidrift",
        description="Linguistic-biomarker extraction and temporal anomaly detection")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("synth", help="generate a synthetic longitudinal corpus")
    _add_common(p)
    _add_flags(p, ["n_docs", "decline_start_index", "pronoun_factor", "vocab_shrink"])

    p = sub.add_parser("ingest", help="validate the corpus and write stats")
    _add_common(p)
    _add_flags(p, ["manifest"])

    p = sub.add_parser("extract", help="compute the 16-feature and pruned matrices")
    _add_common(p)
    _add_flags(p, ["manifest"])

    p = sub.add_parser("correlate", help="write the feature correlation matrix")
    _add_common(p)

    p = sub.add_parser("embed", help="run t-SNE on the pruned matrix")
    _add_common(p)
    _add_flags(p, ["perplexity", "learning_rate", "n_iters",
                   "exaggeration_factor", "exaggeration_iters", "sigma_tolerance"])

    p = sub.add_parser("detect-svm", help="one-class SVM anomaly report")
    _add_common(p)
    _add_flags(p, ["nu", "gamma"])

    p = sub.add_parser("detect-iforest", help="isolation forest anomaly report")
    _add_common(p)
    _add_flags(p, ["n_trees", "psi", "contamination"])

    p = sub.add_parser("plot", help="render scatter maps and anomaly timelines")
    _add_common(p)
    _add_flags(p, ["radius_features"])

    p = sub.add_parser("pipeline", help="run every stage in order")
    _add_common(p)
    _add_flags(p, ["manifest", "perplexity", "learning_rate", "n_iters",
                   "exaggeration_factor", "exaggeration_iters", "sigma_tolerance",
                   "nu", "gamma", "n_trees", "psi", "contamination",
                   "radius_features"])
    return parser


_STAGES = {
    "ingest": stage_ingest,
    "extract": stage_extract,
    "correlate": stage_correlate,
    "embed": stage_embed,
    "detect-svm": stage_detect_svm,
    "detect-iforest": stage_detect_iforest,
    "plot": stage_plot,
}


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    overrides = {k: v for k, v in vars(args).items() if k not in ("command", "config")}
    try:
        file_values = load_config_file(args.config) if args.config else {}
        cfg = build_config(file_values, overrides)
    except (OSError, ValueError) as exc:
        print(f"lexidrift: {exc}", file=sys.stderr)
        return 2

    out = Path(cfg.out)
    try:
        if args.command == "synth":
            out.mkdir(parents=True, exist_ok=True)
            manifest = synth.generate_corpus(
                synth.SynthConfig(
                    n_docs=cfg.n_docs, decline_start_index=cfg.decline_start_index,
                    pronoun_factor=cfg.pronoun_factor, vocab_shrink=cfg.vocab_shrink,
                    seed=cfg.seed),
                out)
            print(manifest)
            return 0
        if args.command == "pipeline":
            return run_pipeline(cfg)
        out.mkdir(parents=True, exist_ok=True)
        stage_fn = _STAGES[args.command]
        try:
            stage_fn(cfg, out)
        except Exception as exc:
            raise StageError(args.command, exc) from exc
        return 0
    except StageError as exc:
        print(f"lexidrift: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
