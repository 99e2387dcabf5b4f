import csv
import datetime as dt
from pathlib import Path

import pytest

from lexidrift.corpus import Document

DATA = Path(__file__).parent / "data"


@pytest.fixture
def fixture_document() -> Document:
    """The committed 120-token oracle document."""
    text = (DATA / "fixture_doc.txt").read_text(encoding="utf-8")
    return Document(id="1984-01-01_fixture", date=dt.date(1984, 1, 1),
                    title="Fixture", raw_text=text)


@pytest.fixture
def feature_oracle() -> dict[str, float]:
    with open(DATA / "feature_oracle.csv", newline="", encoding="utf-8") as fh:
        rows = list(csv.reader(fh))
    return {name: float(value) for name, value in rows[1:]}


def write_manifest(tmp_path: Path, rows: list[tuple[str, str, str]],
                   texts: dict[str, str] | None = None) -> Path:
    """Create a manifest CSV (and text files) under tmp_path."""
    manifest = tmp_path / "manifest.csv"
    with open(manifest, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(["path", "date", "title"])
        writer.writerows(rows)
    for name, text in (texts or {}).items():
        target = tmp_path / name
        target.parent.mkdir(parents=True, exist_ok=True)
        target.write_text(text, encoding="utf-8")
    return manifest
