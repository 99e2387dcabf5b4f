"""Text cleaning, sentence segmentation, tokenization, and counting.

Everything here is deterministic and rule-based so that feature values are
reproducible across platforms. The lemmatizer is suffix-driven with a bundled
exception table for irregular forms; no external models are involved.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from functools import lru_cache
from importlib import resources

__all__ = [
    "TokenizedDocument",
    "clean",
    "segment",
    "lemmatize",
    "lemmatize_document",
    "count_syllables",
    "load_lemma_exceptions",
]

# typographic apostrophes are normalized to ASCII before the charset filter
_APOSTROPHES_RE = re.compile("[‘’‚‛`´]")
_TAG_RE = re.compile(r"<[^>]*>")
_DISALLOWED_RE = re.compile(r"[^A-Za-z'.!?\s]")
_WS_RE = re.compile(r"\s+")
_SENT_SPLIT_RE = re.compile(r"[.!?]+")
_TOKEN_RE = re.compile(r"[a-z']+")
_ALNUM_RE = re.compile(r"[a-z0-9]")

_VOWELS = set("aeiouy")
_CONSONANTS = set("bcdfghjklmnpqrstvwxz")


@dataclass
class TokenizedDocument:
    """Sentence/token structure of one cleaned document.

    ``sentences`` holds half-open token-index spans that are disjoint,
    ordered, and cover all tokens. ``lemmas`` is empty until
    :func:`lemmatize_document` fills it (aligned 1:1 with ``tokens``).
    ``char_count`` counts letters and digits inside tokens (apostrophes are
    excluded); ``syllable_count`` sums :func:`count_syllables` over tokens.
    """

    doc_id: str = ""
    sentences: list[tuple[int, int]] = field(default_factory=list)
    tokens: list[str] = field(default_factory=list)
    lemmas: list[str] = field(default_factory=list)
    char_count: int = 0
    syllable_count: int = 0

    @property
    def n_tokens(self) -> int:
        return len(self.tokens)

    @property
    def n_sentences(self) -> int:
        return len(self.sentences)


def clean(raw_text: str) -> str:
    """Strip markup, digits, and punctuation other than sentence terminators.

    Markup tags (``<...>``) and every character outside letters, apostrophe,
    ``. ! ?`` and whitespace are replaced by a space, so hyphenated words
    split into separate tokens. Whitespace is then collapsed. Idempotent.
    """
    text = _APOSTROPHES_RE.sub("'", raw_text)
    text = _TAG_RE.sub(" ", text)
    text = _DISALLOWED_RE.sub(" ", text)
    text = re.sub(r"\d", " ", text)
    return _WS_RE.sub(" ", text).strip()


def segment(cleaned: str, doc_id: str = "") -> TokenizedDocument:
    """Split cleaned text into sentences and lowercase tokens.

    Sentences are terminated by any run of ``. ! ?``; a trailing fragment
    without a terminator counts as a sentence. Tokens are maximal runs of
    letters and apostrophes. Sentences that contain no tokens are dropped.
    """
    doc = TokenizedDocument(doc_id=doc_id)
    for raw_sentence in _SENT_SPLIT_RE.split(cleaned.lower()):
        sent_tokens = _TOKEN_RE.findall(raw_sentence)
        if not sent_tokens:
            continue
        start = len(doc.tokens)
        doc.tokens.extend(sent_tokens)
        doc.sentences.append((start, len(doc.tokens)))
    doc.char_count = sum(len(_ALNUM_RE.findall(t)) for t in doc.tokens)
    doc.syllable_count = sum(count_syllables(t) for t in doc.tokens)
    return doc


def count_syllables(word: str) -> int:
    """Count maximal vowel-group runs (a e i o u y), with a terminal
    silent-'e' subtraction when more than one group exists. Never below 1."""
    groups = 0
    in_group = False
    for ch in word:
        if ch in _VOWELS:
            if not in_group:
                groups += 1
            in_group = True
        else:
            in_group = False
    if groups > 1 and word.endswith("e"):
        groups -= 1
    return max(groups, 1)


@lru_cache(maxsize=1)
def load_lemma_exceptions() -> dict[tuple[str, str], str]:
    """Bundled irregular-form table keyed by (inflected, tag)."""
    table: dict[tuple[str, str], str] = {}
    text = resources.files("lexidrift.data").joinpath("lemma_exceptions.tsv").read_text("utf-8")
    for line in text.splitlines():
        if not line.strip():
            continue
        inflected, lemma, tag = line.split("\t")
        table[(inflected, tag)] = lemma
    return table


def _undouble(stem: str) -> str:
    # runn -> run, but fall/kiss/buzz keep the double letter
    if (len(stem) >= 3 and stem[-1] == stem[-2]
            and stem[-1] in _CONSONANTS and stem[-1] not in "lsz"):
        return stem[:-1]
    return stem


def _restore_e(stem: str) -> str:
    # mak -> make, continu -> continue; w/x/y finals never drop an 'e'
    if (len(stem) >= 3 and stem[-1] in _CONSONANTS and stem[-1] not in "wxy"
            and stem[-2] in "aeiou" and stem[-3] not in "aeiou"):
        return stem + "e"
    if len(stem) >= 2 and stem[-1] == "u" and stem[-2] in _CONSONANTS:
        return stem + "e"
    return stem


def _strip_verb(token: str) -> str:
    if token.endswith("ied"):
        if len(token) >= 5:
            return token[:-3] + "y"
        if len(token) == 4:
            return token[:-1]  # died -> die
    if token.endswith("eed") and len(token) >= 5:
        return token[:-1]  # agreed -> agree
    if token.endswith("eeing") and len(token) >= 6:
        return token[:-3]  # seeing -> see
    for suffix in ("ing", "ed"):
        if token.endswith(suffix) and len(token) - len(suffix) >= 2:
            stem = token[: -len(suffix)]
            undoubled = _undouble(stem)
            if undoubled != stem:
                return undoubled
            return _restore_e(stem)
    if token.endswith("ies") and len(token) >= 5:
        return token[:-3] + "y"
    if token.endswith("es") and len(token) >= 4:
        stem = token[:-2]
        if stem.endswith(("x", "z", "ch", "sh", "ss", "o")):
            return stem
    if token.endswith("s") and not token.endswith("ss") and len(token) >= 3:
        return token[:-1]
    return token


def _strip_noun(token: str) -> str:
    if token.endswith("ies") and len(token) >= 5:
        return token[:-3] + "y"
    if token.endswith("ses") and len(token) >= 5:
        return token[:-2]
    if token.endswith(("ches", "shes", "xes", "zes")) and len(token) >= 5:
        return token[:-2]
    if token.endswith("s") and not token.endswith("ss") and len(token) >= 3:
        return token[:-1]
    return token


def lemmatize(token: str, tag: str) -> str:
    """Rule-based lemma for a lowercased token given its coarse POS tag.

    Irregular forms come from the bundled exception table; regular nouns
    strip plural suffixes and regular verbs strip -ing/-ed/-s with
    doubled-consonant and silent-'e' restoration. Tags other than NOUN and
    VERB return the token unchanged. The result is never empty.
    """
    if not token:
        return token
    if tag not in ("NOUN", "VERB"):
        return token
    exceptions = load_lemma_exceptions()
    hit = exceptions.get((token, tag))
    if hit is not None:
        return hit
    lemma = _strip_verb(token) if tag == "VERB" else _strip_noun(token)
    return lemma if lemma else token


def lemmatize_document(doc: TokenizedDocument, tags: list[str]) -> TokenizedDocument:
    """Fill ``doc.lemmas`` from per-token tags; returns the same document."""
    if len(tags) != len(doc.tokens):
        raise ValueError(
            f"tags ({len(tags)}) and tokens ({len(doc.tokens)}) are misaligned")
    doc.lemmas = [lemmatize(tok, tag) for tok, tag in zip(doc.tokens, tags)]
    return doc
