"""Dated document corpus: manifest loading, validation, per-year stats.

A corpus is described by a CSV manifest with header ``path,date,title``.
Fetching source material (e.g. scraping a presidential library) is out of
scope; a separate script can populate the corpus directory and write the
manifest.
"""

from __future__ import annotations

import csv
import datetime as dt
import re
from collections import Counter
from dataclasses import dataclass
from pathlib import Path

__all__ = [
    "CorpusError",
    "Document",
    "ManifestEntry",
    "Manifest",
    "load_manifest",
    "load_corpus",
    "corpus_stats",
]


class CorpusError(ValueError):
    """Raised for malformed manifests or unreadable/empty corpus files."""


@dataclass(frozen=True)
class Document:
    id: str
    date: dt.date
    title: str
    raw_text: str


@dataclass(frozen=True)
class ManifestEntry:
    path: Path
    date: dt.date
    title: str


@dataclass(frozen=True)
class Manifest:
    entries: tuple[ManifestEntry, ...]

    def __len__(self) -> int:
        return len(self.entries)


_HEADER = ["path", "date", "title"]
_SLUG_RE = re.compile(r"[^a-z0-9]+")


def slugify(title: str) -> str:
    slug = _SLUG_RE.sub("-", title.lower()).strip("-")
    return slug or "untitled"


def load_manifest(path: str | Path) -> Manifest:
    """Parse a manifest CSV; entries come back sorted ascending by date.

    Relative paths are resolved against the manifest's directory. Row numbers
    in error messages are 1-based file lines (the header is line 1).
    """
    path = Path(path)
    if not path.is_file():
        raise CorpusError(f"manifest not found: {path}")
    base = path.parent
    entries = []
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise CorpusError(f"manifest {path} is empty (missing header)") from None
        if header != _HEADER:
            raise CorpusError(
                f"manifest {path} row 1: expected header {','.join(_HEADER)!r}, "
                f"got {','.join(header)!r}")
        for row_no, row in enumerate(reader, start=2):
            if not row or (len(row) == 1 and not row[0].strip()):
                continue
            if len(row) != 3:
                raise CorpusError(
                    f"manifest {path} row {row_no}: expected 3 fields, got {len(row)}")
            raw_path, raw_date, title = row
            if not raw_path.strip():
                raise CorpusError(f"manifest {path} row {row_no}: empty path")
            try:
                date = dt.date.fromisoformat(raw_date.strip())
            except ValueError:
                raise CorpusError(
                    f"manifest {path} row {row_no}: unparseable date {raw_date!r}"
                ) from None
            entry_path = Path(raw_path.strip())
            if not entry_path.is_absolute():
                entry_path = base / entry_path
            entries.append(ManifestEntry(path=entry_path, date=date, title=title.strip()))
    seen: dict[Path, int] = {}
    for i, entry in enumerate(entries):
        if entry.path in seen:
            raise CorpusError(
                f"manifest {path} row {i + 2}: duplicate path {entry.path}")
        seen[entry.path] = i
    entries.sort(key=lambda e: e.date)  # stable: equal dates keep file order
    return Manifest(entries=tuple(entries))


def load_corpus(manifest: Manifest) -> list[Document]:
    """Read every manifest entry into a Document, preserving manifest order.

    Ids are ``<date>_<slugified-title>``; duplicate (date, title) pairs get a
    numeric suffix (``_2``, ``_3``, ...) in manifest order.
    """
    id_counts: Counter[str] = Counter()
    docs = []
    for entry in manifest.entries:
        try:
            text = entry.path.read_text(encoding="utf-8")
        except OSError as exc:
            raise CorpusError(f"cannot read corpus file {entry.path}: {exc}") from exc
        if not text.strip():
            raise CorpusError(f"corpus file is empty: {entry.path}")
        base_id = f"{entry.date.isoformat()}_{slugify(entry.title)}"
        id_counts[base_id] += 1
        doc_id = base_id if id_counts[base_id] == 1 else f"{base_id}_{id_counts[base_id]}"
        docs.append(Document(id=doc_id, date=entry.date, title=entry.title, raw_text=text))
    return docs


def corpus_stats(docs: list[Document]) -> dict[int, int]:
    """Document count per calendar year; values sum to ``len(docs)``."""
    stats = Counter(doc.date.year for doc in docs)
    return dict(sorted(stats.items()))
