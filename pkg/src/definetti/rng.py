"""Counter-based random streams keyed by ``(seed, stream, block)``.

Every draw is addressed, not sequenced, so results do not depend on how work
is split across threads.
"""

from __future__ import annotations

import numpy as np

STREAM_STATES = 1
STREAM_HAAR = 2
STREAM_MISC = 3

HAAR_BLOCK = 4096


def generator(seed: int, stream: int, block: int = 0) -> np.random.Generator:
    return np.random.Generator(np.random.Philox(np.random.SeedSequence([seed, stream, block])))


def complex_gaussian(rng: np.random.Generator, size) -> np.ndarray:
    return rng.standard_normal(size) + 1j * rng.standard_normal(size)


def haar_block(d: int, seed: int, block: int) -> np.ndarray:
    """``HAAR_BLOCK`` Haar-distributed unit vectors in ``C^d``, shape ``(HAAR_BLOCK, d)``."""
    z = complex_gaussian(generator(seed, STREAM_HAAR, block), (HAAR_BLOCK, d))
    return z / np.linalg.norm(z, axis=1, keepdims=True)
