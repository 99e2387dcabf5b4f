"""Per-document linguistic features and the standardized analysis matrix.

Sixteen raw features are computed per document: POS counts and frequency
rates, word-frequency rates with and without stop words, three vocabulary
richness statistics (Honore, Sichel, Brunet), and two readability scores
(ARI, Flesch Reading Ease). A fixed nine-feature subset, z-scored per
column, is the input to the embedding and the anomaly detectors.

Conventions (documented because the source formulas leave them open):
natural log in Honore's statistic; frequency rates are percentages; counts
below the occurrence threshold zero out the corresponding rate; richness
and word-frequency features are computed over lemmas, readability over
surface tokens and sentences.
"""

from __future__ import annotations

import csv
import math
from collections import Counter
from dataclasses import dataclass, field

import numpy as np

from .corpus import Document
from .postag import PosLexicon, TaggedDocument, load_default_lexicon, tag, tag_histogram
from .textnorm import TokenizedDocument, clean, lemmatize_document, segment

__all__ = [
    "RAW_FEATURES",
    "PRUNED_FEATURES",
    "MIN_TAG_OCCURRENCES",
    "MIN_TYPE_FREQUENCY",
    "FeatureVector",
    "FeatureMatrix",
    "pos_features",
    "honore",
    "sichel",
    "brunet",
    "ari",
    "flesch",
    "extract_all",
    "assemble_matrix",
    "correlation_matrix",
    "prune_and_standardize",
    "write_matrix_csv",
    "read_matrix_csv",
]

RAW_FEATURES = (
    "n_pronouns", "pronoun_noun_ratio", "n_adverbs", "n_nouns", "n_verbs",
    "pronoun_freq_rate", "noun_freq_rate", "verb_freq_rate", "adverb_freq_rate",
    "word_freq_rate", "word_freq_rate_with_stop",
    "honore", "sichel", "brunet", "ari", "flesch",
)

PRUNED_FEATURES = (
    "pronoun_noun_ratio", "word_freq_rate", "verb_freq_rate",
    "pronoun_freq_rate", "adverb_freq_rate",
    "honore", "brunet", "sichel", "ari",
)

# a POS tag or word type must occur at least this often to contribute a rate
MIN_TAG_OCCURRENCES = 10
MIN_TYPE_FREQUENCY = 10

# Honore's statistic diverges when every type is a hapax; the ratio is
# clamped so extreme documents stay representable instead of erroring
HONORE_CLAMP = 1.0 - 1e-3


@dataclass
class FeatureVector:
    doc_id: str
    values: dict[str, float] = field(default_factory=dict)

    def as_row(self, names=RAW_FEATURES) -> list[float]:
        return [self.values[n] for n in names]


@dataclass
class FeatureMatrix:
    """Rectangular docs-by-features matrix; row order is date order."""

    doc_ids: list[str]
    feature_names: list[str]
    values: np.ndarray
    standardized: bool = False

    def __post_init__(self):
        self.values = np.asarray(self.values, dtype=float)
        if self.values.shape != (len(self.doc_ids), len(self.feature_names)):
            raise ValueError(
                f"matrix shape {self.values.shape} does not match "
                f"{len(self.doc_ids)} docs x {len(self.feature_names)} features")

    def column(self, name: str) -> np.ndarray:
        try:
            idx = self.feature_names.index(name)
        except ValueError:
            raise KeyError(f"unknown feature {name!r}") from None
        return self.values[:, idx]


def _rate(count: int, n: int) -> float:
    return 100.0 * count / n if count >= MIN_TAG_OCCURRENCES else 0.0


def pos_features(tagged: TaggedDocument, tokens: list[str],
                 stopword_set: frozenset[str]) -> dict[str, float]:
    """POS counts/rates and word-frequency rates (features 1-11).

    ``tokens`` is the stream over which word-type frequencies are counted;
    the full pipeline passes lemmas here. Rates are percentages, zeroed
    below the occurrence threshold. The pronoun/noun ratio denominator is
    floored at one noun.
    """
    n = len(tagged.tags)
    if n == 0:
        raise ValueError(f"empty document: {tagged.doc_id!r}")
    if len(tokens) != n:
        raise ValueError("tokens and tags are misaligned")
    hist = tag_histogram(tagged)
    n_pron = hist.get("PRON", 0)
    n_noun = hist.get("NOUN", 0)
    n_verb = hist.get("VERB", 0)
    n_adv = hist.get("ADV", 0)

    type_freq = Counter(tokens)
    with_stop = sum(1 for t in tokens if type_freq[t] >= MIN_TYPE_FREQUENCY)
    content = [t for t in tokens if t not in stopword_set]
    content_hits = sum(1 for t in content if type_freq[t] >= MIN_TYPE_FREQUENCY)

    return {
        "n_pronouns": float(n_pron),
        "pronoun_noun_ratio": n_pron / max(n_noun, 1),
        "n_adverbs": float(n_adv),
        "n_nouns": float(n_noun),
        "n_verbs": float(n_verb),
        "pronoun_freq_rate": _rate(n_pron, n),
        "noun_freq_rate": _rate(n_noun, n),
        "verb_freq_rate": _rate(n_verb, n),
        "adverb_freq_rate": _rate(n_adv, n),
        "word_freq_rate": 100.0 * content_hits / len(content) if content else 0.0,
        "word_freq_rate_with_stop": 100.0 * with_stop / n,
    }


def honore(tokens: list[str]) -> float:
    """Honore's statistic 100*ln(N)/(1 - V1/V); higher = richer vocabulary."""
    n = len(tokens)
    if n == 0:
        raise ValueError("honore requires at least one token")
    freq = Counter(tokens)
    v = len(freq)
    v1 = sum(1 for c in freq.values() if c == 1)
    ratio = min(v1 / v, HONORE_CLAMP)
    return 100.0 * math.log(n) / (1.0 - ratio)


def sichel(tokens: list[str]) -> float:
    """Sichel measure V2/V (share of types occurring exactly twice)."""
    if not tokens:
        raise ValueError("sichel requires at least one token")
    freq = Counter(tokens)
    v2 = sum(1 for c in freq.values() if c == 2)
    return v2 / len(freq)


def brunet(tokens: list[str]) -> float:
    """Brunet's measure N^(V^-0.165); higher = poorer vocabulary."""
    n = len(tokens)
    if n == 0:
        raise ValueError("brunet requires at least one token")
    v = len(set(tokens))
    return n ** (v ** -0.165)


def ari(doc: TokenizedDocument) -> float:
    """Automated Readability Index over surface tokens and sentences."""
    words = doc.n_tokens
    sentences = doc.n_sentences
    if words == 0 or sentences == 0:
        raise ValueError(f"ari requires at least one sentence and word: {doc.doc_id!r}")
    return 4.71 * (doc.char_count / words) + 0.5 * (words / sentences) - 21.43


def flesch(doc: TokenizedDocument) -> float:
    """Flesch Reading Ease; lower = harder, lexically richer text."""
    words = doc.n_tokens
    sentences = doc.n_sentences
    if words == 0 or sentences == 0:
        raise ValueError(f"flesch requires at least one sentence and word: {doc.doc_id!r}")
    return 206.835 - 1.015 * (words / sentences) - 84.6 * (doc.syllable_count / words)


def extract_all(doc: Document, lexicon: PosLexicon | None = None) -> FeatureVector:
    """Run clean -> segment -> tag -> lemmatize and compute all 16 features."""
    if lexicon is None:
        lexicon = load_default_lexicon()
    tokdoc = segment(clean(doc.raw_text), doc_id=doc.id)
    if tokdoc.n_tokens == 0:
        raise ValueError(f"document {doc.id!r} has no tokens after cleaning")
    tagged = tag(tokdoc.tokens, lexicon, doc_id=doc.id)
    tokdoc = lemmatize_document(tokdoc, tagged.tags)

    values = pos_features(tagged, tokdoc.lemmas, lexicon.stopword_set)
    values["honore"] = honore(tokdoc.lemmas)
    values["sichel"] = sichel(tokdoc.lemmas)
    values["brunet"] = brunet(tokdoc.lemmas)
    values["ari"] = ari(tokdoc)
    values["flesch"] = flesch(tokdoc)
    return FeatureVector(doc_id=doc.id, values={k: values[k] for k in RAW_FEATURES})


def assemble_matrix(vectors: list[FeatureVector],
                    feature_names=RAW_FEATURES) -> FeatureMatrix:
    """Stack per-document vectors (already in date order) into a matrix."""
    names = list(feature_names)
    rows = np.array([v.as_row(names) for v in vectors], dtype=float)
    if not vectors:
        rows = rows.reshape(0, len(names))
    return FeatureMatrix(doc_ids=[v.doc_id for v in vectors],
                         feature_names=names, values=rows)


def correlation_matrix(m: FeatureMatrix) -> np.ndarray:
    """Pearson correlations between feature columns.

    Constant columns correlate 0 with everything (diagonal stays 1), so the
    result is always finite.
    """
    x = m.values
    if x.shape[0] < 2:
        raise ValueError("correlation requires at least 2 documents")
    centered = x - x.mean(axis=0)
    std = x.std(axis=0)
    d = x.shape[1]
    corr = np.zeros((d, d))
    for i in range(d):
        for j in range(i, d):
            if std[i] == 0.0 or std[j] == 0.0:
                corr[i, j] = corr[j, i] = 0.0
            else:
                cov = float(centered[:, i] @ centered[:, j]) / x.shape[0]
                corr[i, j] = corr[j, i] = cov / (std[i] * std[j])
    np.fill_diagonal(corr, 1.0)
    return np.clip(corr, -1.0, 1.0)


def prune_and_standardize(m: FeatureMatrix) -> FeatureMatrix:
    """Select the nine analysis features, in order, and z-score each column.

    Population std is used; a constant column standardizes to all zeros.
    """
    cols = []
    for name in PRUNED_FEATURES:
        col = m.column(name)
        std = col.std()
        if std == 0.0:
            cols.append(np.zeros_like(col))
        else:
            cols.append((col - col.mean()) / std)
    values = np.column_stack(cols) if cols and len(m.doc_ids) else \
        np.zeros((len(m.doc_ids), len(PRUNED_FEATURES)))
    return FeatureMatrix(doc_ids=list(m.doc_ids), feature_names=list(PRUNED_FEATURES),
                         values=values, standardized=True)


def write_matrix_csv(m: FeatureMatrix, path) -> None:
    """CSV export: first column doc_id, then features, 17 significant digits."""
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(["doc_id", *m.feature_names])
        for doc_id, row in zip(m.doc_ids, m.values):
            writer.writerow([doc_id, *(f"{v:.17g}" for v in row)])


def read_matrix_csv(path, standardized: bool = False) -> FeatureMatrix:
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        header = next(reader)
        if not header or header[0] != "doc_id":
            raise ValueError(f"{path}: expected a doc_id-first feature CSV")
        names = header[1:]
        doc_ids, rows = [], []
        for row in reader:
            if not row:
                continue
            doc_ids.append(row[0])
            rows.append([float(v) for v in row[1:]])
    values = np.array(rows, dtype=float) if rows else np.zeros((0, len(names)))
    return FeatureMatrix(doc_ids=doc_ids, feature_names=names,
                         values=values, standardized=standardized)
