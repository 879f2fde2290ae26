import gzip
from pathlib import Path

import pytest

FIXTURES_DIR = Path(__file__).parent / "fixtures"


@pytest.fixture(scope="session")
def reference_vocabulary() -> list[tuple[str, str]]:
    """(word, expected_stem) pairs from the Snowball English reference."""
    pairs = []
    path = FIXTURES_DIR / "snowball_english_vocabulary.tsv.gz"
    with gzip.open(path, "rt", encoding="utf-8") as fh:
        for line in fh:
            word, stemmed = line.rstrip("\n").split("\t")
            pairs.append((word, stemmed))
    return pairs
