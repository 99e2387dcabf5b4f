"""Synthetic longitudinal corpus with a controlled late-period decline.

Documents are sampled token-by-token from fixed category pools (pronouns,
nouns, verbs, adverbs, function words) with Zipf-weighted word choice.
Documents from ``decline_start_index`` (1-based) onward shift the
pronoun/noun probability balance so the pronoun-to-noun ratio inflates by
``pronoun_factor``, shrink the content vocabulary by ``vocab_shrink``, and
add per-document severity jitter plus shorter, more repetitive sentences.
Healthy documents share one parameter set, so they form a coherent cluster
while declined documents scatter.

Everything is driven by ``numpy`` generators seeded per document, so a
(seed, index) pair always yields the same text.
"""

from __future__ import annotations

import csv
import datetime as dt
from dataclasses import dataclass
from pathlib import Path

import numpy as np

__all__ = ["SynthConfig", "generate_corpus"]

_PRONOUNS = ["we", "i", "they", "he", "it", "you", "she"]

_FUNCTION = ["the", "a", "of", "to", "and", "in", "for", "with", "on", "at",
             "but", "from", "by", "as", "or"]

_ADVERBS = ["very", "also", "often", "always", "never", "again", "together",
            "soon", "still", "perhaps", "almost", "already", "usually",
            "indeed", "sometimes"]

_VERBS = ["say", "make", "know", "take", "see", "come", "think", "look",
          "want", "give", "use", "find", "tell", "ask", "seem", "feel",
          "try", "call", "keep", "provide", "hold", "turn", "follow",
          "begin", "show", "hear", "play", "move", "live", "believe",
          "bring", "happen", "write", "sit", "stand", "pay", "meet",
          "include", "continue", "learn", "change", "lead", "understand",
          "speak", "stop", "create", "read", "allow", "add", "grow",
          "walk", "win", "offer", "remember", "love", "consider", "serve",
          "send", "expect", "build"]

_NOUNS = ["time", "year", "people", "way", "day", "man", "world", "life",
          "hand", "part", "eye", "place", "case", "week", "government",
          "company", "number", "group", "problem", "fact", "nation",
          "country", "state", "president", "congress", "law", "bill",
          "budget", "tax", "policy", "program", "freedom", "peace", "war",
          "security", "defense", "economy", "job", "business", "family",
          "school", "student", "teacher", "history", "future", "power",
          "system", "question", "answer", "reason", "result", "moment",
          "word", "speech", "language", "leader", "friend", "enemy",
          "ally", "treaty", "missile", "weapon", "force", "army", "navy",
          "soldier", "veteran", "hero", "citizen", "democracy", "liberty",
          "justice", "court", "judge", "election", "campaign", "party",
          "voter", "majority", "minority", "value", "belief", "faith",
          "church", "community", "city", "town", "street", "road", "home",
          "land", "farm", "farmer", "worker", "industry", "market",
          "trade", "dollar", "money", "income", "price", "interest", "rate",
          "growth", "deficit", "debt", "revenue", "reform", "challenge",
          "opportunity", "effort", "action", "decision", "choice",
          "chance", "idea", "plan", "goal", "purpose", "mission", "duty",
          "responsibility", "service", "courage", "strength", "spirit",
          "heart", "soul", "mind", "body", "voice", "message", "letter",
          "story", "truth", "agreement", "relationship", "alliance",
          "union", "administration", "department", "agency", "office",
          "official", "secretary", "minister", "governor", "mayor",
          "senator", "member", "staff", "team", "committee", "commission",
          "board", "council", "meeting", "conference", "summit", "session",
          "term", "period", "era", "century", "decade", "month", "hour",
          "minute", "morning", "evening", "night", "season"]

# healthy-period category probabilities: PRON, NOUN, VERB, ADV, FUNCTION
_BASE_PROBS = np.array([0.08, 0.32, 0.22, 0.10, 0.28])
_BASE_ZIPF = 1.0
_BASE_TOKENS = (750, 900)
_BASE_SENT_LEN = (9, 14)


@dataclass(frozen=True)
class SynthConfig:
    n_docs: int = 60
    decline_start_index: int = 45  # 1-based index of the first declined document
    pronoun_factor: float = 2.0
    vocab_shrink: float = 0.4
    seed: int = 0

    def __post_init__(self):
        if self.n_docs < 2:
            raise ValueError("n_docs must be at least 2")
        if not 0.0 <= self.vocab_shrink < 1.0:
            raise ValueError("vocab_shrink must be in [0, 1)")
        if self.pronoun_factor <= 0:
            raise ValueError("pronoun_factor must be positive")


def _zipf_weights(n: int, s: float) -> np.ndarray:
    w = 1.0 / np.arange(1, n + 1) ** s
    return w / w.sum()


def _inflate_ratio(probs: np.ndarray, factor: float) -> np.ndarray:
    """Rescale pronoun/noun probabilities so their ratio grows by ``factor``
    while their combined mass is conserved."""
    p_pron, p_noun = probs[0], probs[1]
    total = p_pron + p_noun
    new_pron = total * factor * p_pron / (factor * p_pron + p_noun)
    out = probs.copy()
    out[0] = new_pron
    out[1] = total - new_pron
    return out


def _sample_document(rng: np.random.Generator, probs: np.ndarray,
                     nouns: list[str], verbs: list[str], zipf_s: float,
                     n_tokens: int, sent_len: tuple[int, int]) -> str:
    pools = [_PRONOUNS, nouns, verbs, _ADVERBS, _FUNCTION]
    weights = [_zipf_weights(len(pool), zipf_s) for pool in pools]
    words = []
    for category in rng.choice(len(pools), size=n_tokens, p=probs):
        pool = pools[category]
        words.append(pool[rng.choice(len(pool), p=weights[category])])
    sentences = []
    i = 0
    while i < len(words):
        k = int(rng.integers(sent_len[0], sent_len[1] + 1))
        chunk = words[i:i + k]
        sentences.append(" ".join(chunk).capitalize() + ".")
        i += k
    return "\n".join(sentences) + "\n"


def _doc_params(config: SynthConfig, index: int, rng: np.random.Generator):
    """(probs, nouns, verbs, zipf, n_tokens, sent_len) for document ``index``."""
    declined = index >= config.decline_start_index
    if not declined:
        n_tokens = int(rng.integers(*_BASE_TOKENS))
        return (_BASE_PROBS, _NOUNS, _VERBS, _BASE_ZIPF, n_tokens, _BASE_SENT_LEN)
    severity = rng.uniform(0.75, 1.35)
    probs = _inflate_ratio(_BASE_PROBS, config.pronoun_factor * severity)
    shrink = min(0.95, config.vocab_shrink * rng.uniform(0.8, 1.25))
    keep_nouns = max(5, round(len(_NOUNS) * (1.0 - shrink)))
    keep_verbs = max(5, round(len(_VERBS) * (1.0 - shrink)))
    nouns = [_NOUNS[i] for i in sorted(rng.choice(len(_NOUNS), keep_nouns, replace=False))]
    verbs = [_VERBS[i] for i in sorted(rng.choice(len(_VERBS), keep_verbs, replace=False))]
    zipf = _BASE_ZIPF + rng.uniform(0.35, 0.95)
    n_tokens = int(rng.integers(260, 620))
    lo = int(rng.integers(4, 6))
    return (probs, nouns, verbs, zipf, n_tokens, (lo, lo + 4))


def _doc_date(index: int) -> dt.date:
    year = 1980 + (index - 1) // 12
    month = (index - 1) % 12 + 1
    return dt.date(year, month, 15)


def generate_corpus(config: SynthConfig, out_dir: str | Path) -> Path:
    """Write texts plus a manifest CSV under ``out_dir``; returns the manifest path."""
    out_dir = Path(out_dir)
    texts_dir = out_dir / "texts"
    texts_dir.mkdir(parents=True, exist_ok=True)
    manifest_path = out_dir / "manifest.csv"
    with open(manifest_path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(["path", "date", "title"])
        for index in range(1, config.n_docs + 1):
            rng = np.random.default_rng([config.seed, index])
            probs, nouns, verbs, zipf, n_tokens, sent_len = _doc_params(config, index, rng)
            text = _sample_document(rng, probs, nouns, verbs, zipf, n_tokens, sent_len)
            rel = f"texts/doc_{index:03d}.txt"
            (out_dir / rel).write_text(text, encoding="utf-8")
            writer.writerow([rel, _doc_date(index).isoformat(),
                             f"Synthetic address {index:03d}"])
    return manifest_path
