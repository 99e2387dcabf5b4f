"""lexidrift: linguistic-biomarker extraction and temporal anomaly detection.

Pipeline: load a dated corpus, compute 16 stylometric features per document,
prune to the 9 analysis features and standardize, embed with exact t-SNE,
and flag temporal anomalies with a nu-one-class SVM and an isolation forest.
"""

from .anomaly import (
    AnomalyReport,
    IsolationForestDetector,
    OneClassSvmDetector,
    default_gamma,
    flag_anomalies,
)
from .corpus import Document, Manifest, corpus_stats, load_corpus, load_manifest
from .features import (
    PRUNED_FEATURES,
    RAW_FEATURES,
    FeatureMatrix,
    FeatureVector,
    assemble_matrix,
    correlation_matrix,
    extract_all,
    prune_and_standardize,
)
from .postag import PosLexicon, load_default_lexicon, tag, tag_histogram
from .synth import SynthConfig, generate_corpus
from .textnorm import TokenizedDocument, clean, count_syllables, lemmatize, segment
from .tsne import Embedding, TsneConfig, TsneEmbedder, embed_matrix

__version__ = "0.1.0"

__all__ = [
    "AnomalyReport", "IsolationForestDetector", "OneClassSvmDetector",
    "default_gamma", "flag_anomalies",
    "Document", "Manifest", "corpus_stats", "load_corpus", "load_manifest",
    "PRUNED_FEATURES", "RAW_FEATURES", "FeatureMatrix", "FeatureVector",
    "assemble_matrix", "correlation_matrix", "extract_all", "prune_and_standardize",
    "PosLexicon", "load_default_lexicon", "tag", "tag_histogram",
    "SynthConfig", "generate_corpus",
    "TokenizedDocument", "clean", "count_syllables", "lemmatize", "segment",
    "Embedding", "TsneConfig", "TsneEmbedder", "embed_matrix",
    "__version__",
]
