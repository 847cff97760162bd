import sys
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).parent))

from ultradense.embeddings import EmbeddingSet

FIXTURE_4WORD_TEXT = """4 3
the 0.125 0.25 0.375
of 0.5 -0.625 0.75
cat -0.875 1.0 -1.125
dog 1.25 -1.375 1.5
"""


@pytest.fixture
def text_fixture(tmp_path):
    """4-word, 3-dim text embedding file (values exactly float32-representable)."""
    path = tmp_path / "emb.txt"
    path.write_text(FIXTURE_4WORD_TEXT, encoding="utf-8")
    return path


@pytest.fixture
def small_set():
    rng = np.random.default_rng(42)
    return EmbeddingSet(
        words=[f"w{i}" for i in range(5)],
        vectors=rng.standard_normal((5, 3)),
        source="test",
    )
