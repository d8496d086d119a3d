from __future__ import annotations

from pathlib import Path

import pytest

DATA_DIR = Path(__file__).parent / "data"
GOLDEN_DIR = DATA_DIR / "golden"


@pytest.fixture
def fixture_glossary_path() -> Path:
    return DATA_DIR / "fixture_glossary.jsonl"
