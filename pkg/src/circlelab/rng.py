"""Counter-based reproducible random streams.

Philox keyed by (seed, stream) gives independent streams per work item,
so Monte Carlo trials can be farmed out to any number of workers without
changing the draws.
"""

from __future__ import annotations

import numpy as np

_MASK64 = (1 << 64) - 1


def generator(seed: int, stream: int = 0) -> np.random.Generator:
    key = np.array([int(seed) & _MASK64, int(stream) & _MASK64], dtype=np.uint64)
    return np.random.Generator(np.random.Philox(key=key))
