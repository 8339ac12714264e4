from pathlib import Path

import numpy as np
import pytest

from emotag import EmojiInventory, EmbeddingSpace, Vocabulary

FIXTURES = Path(__file__).parent / "fixtures"


@pytest.fixture(scope="session")
def fixtures():
    return FIXTURES


@pytest.fixture(scope="session")
def inventory():
    return EmojiInventory.load(FIXTURES / "inventory.tsv")


def space_from_vectors(pairs):
    """Build an EmbeddingSpace straight from {token: vector} for hand-seeded tests."""
    tokens = list(pairs)
    vectors = np.array([pairs[t] for t in tokens], dtype=np.float64)
    return EmbeddingSpace(Vocabulary(tokens), vectors)


def space_with_cosines(anchor, sims):
    """A 2-d space where cosine(anchor, w) equals sims[w] exactly by construction."""
    pairs = {anchor: [1.0, 0.0]}
    for token, sim in sims.items():
        pairs[token] = [sim, float(np.sqrt(1.0 - sim * sim))]
    return space_from_vectors(pairs)
