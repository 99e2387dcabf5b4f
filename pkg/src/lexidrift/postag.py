"""Coarse part-of-speech tagging from a bundled lexicon plus suffix rules.

Tags are NOUN, VERB, PRON, ADV, ADJ, OTHER. Priority per token: pronoun list,
then lexicon entry, then first matching suffix rule, then NOUN. The tagger is
deliberately simple and deterministic; downstream features are ratio-based
and tolerant of coarse tags, and the interface makes it easy to swap in an
external tagger (anything producing an aligned tag list works).
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass, field
from functools import lru_cache
from importlib import resources

__all__ = [
    "TAGS",
    "PosLexicon",
    "TaggedDocument",
    "load_default_lexicon",
    "tag",
    "tag_histogram",
]

TAGS = ("NOUN", "VERB", "PRON", "ADV", "ADJ", "OTHER")

# suffix rules only apply when the remaining stem has at least this many chars
_MIN_STEM = 2


@dataclass(frozen=True)
class PosLexicon:
    """Word -> coarse tag map with ordered suffix fallbacks and closed lists."""

    entries: dict[str, str]
    suffix_rules: tuple[tuple[str, str], ...]
    pronoun_set: frozenset[str]
    stopword_set: frozenset[str]

    def __post_init__(self):
        for tag_ in self.entries.values():
            if tag_ not in TAGS:
                raise ValueError(f"unknown tag in lexicon: {tag_!r}")
        for word in self.pronoun_set:
            if self.entries.get(word, "PRON") != "PRON":
                raise ValueError(f"pronoun {word!r} mapped to {self.entries[word]!r}")

    def lookup(self, token: str) -> str:
        """Tag for a single lowercased token; total and deterministic."""
        if token in self.pronoun_set:
            return "PRON"
        hit = self.entries.get(token)
        if hit is not None:
            return hit
        for suffix, suffix_tag in self.suffix_rules:
            if token.endswith(suffix) and len(token) - len(suffix) >= _MIN_STEM:
                return suffix_tag
        return "NOUN"


@dataclass
class TaggedDocument:
    doc_id: str
    tags: list[str] = field(default_factory=list)


def _read_data(name: str) -> str:
    return resources.files("lexidrift.data").joinpath(name).read_text("utf-8")


@lru_cache(maxsize=1)
def load_default_lexicon() -> PosLexicon:
    """Load the bundled lexicon, suffix rules, pronoun and stopword lists."""
    entries: dict[str, str] = {}
    for line in _read_data("pos_lexicon.tsv").splitlines():
        if not line.strip():
            continue
        word, tag_ = line.split("\t")
        entries[word] = tag_
    rules = []
    for line in _read_data("suffix_rules.tsv").splitlines():
        if not line.strip():
            continue
        suffix, tag_ = line.split("\t")
        rules.append((suffix, tag_))
    pronouns = frozenset(_read_data("pronouns.txt").split())
    stopwords = frozenset(_read_data("stopwords.txt").split())
    return PosLexicon(entries=entries, suffix_rules=tuple(rules),
                      pronoun_set=pronouns, stopword_set=stopwords)


def tag(tokens: list[str], lexicon: PosLexicon | None = None,
        doc_id: str = "") -> TaggedDocument:
    """Assign one coarse tag per token."""
    if lexicon is None:
        lexicon = load_default_lexicon()
    return TaggedDocument(doc_id=doc_id, tags=[lexicon.lookup(t) for t in tokens])


def tag_histogram(tagged: TaggedDocument) -> dict[str, int]:
    """Tag -> occurrence count; counts sum to the token count."""
    return dict(Counter(tagged.tags))
