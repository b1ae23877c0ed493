"""Seeded random streams.

Every stochastic quantity is drawn from a generator keyed on the master seed
plus a tuple of integers (e.g. ``(n, trial)``), so results do not depend on
how trials are scheduled across workers.
"""

import numpy as np

DEFAULT_SEED = 20240917
RNG_ALGORITHM = "numpy.PCG64/SeedSequence(seed, spawn_key=key)"


def stream(seed: int, *key: int) -> np.random.Generator:
    """Independent generator for ``(seed, key)``."""
    ss = np.random.SeedSequence(int(seed), spawn_key=tuple(int(k) for k in key))
    return np.random.Generator(np.random.PCG64(ss))


def as_generator(rng) -> np.random.Generator:
    if isinstance(rng, np.random.Generator):
        return rng
    return np.random.default_rng(rng)
