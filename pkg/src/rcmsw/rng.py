"""Counter-based random streams.

Every random draw in the package comes from a ``numpy.random.Generator`` backed
by the Philox counter-based bit generator, keyed by ``(seed, *stream_ids)``.
Two calls with the same key produce bit-identical streams no matter which
thread or process makes them, or in which order.
"""

import numpy as np

# stream ids; keep stable, changing them changes every seeded result
DIRECTIONS = 1
INIT = 2
NOISE = 3
COVARIATES = 4
COEFFICIENTS = 5
EVAL_DIRECTIONS = 6
SUBSAMPLE = 7
CAUCHY = 8
REPLICATE = 9

_MASK64 = (1 << 64) - 1


def stream(seed, *ids):
    """Return a generator for the stream keyed by ``(seed, *ids)``."""
    key = [int(seed) & _MASK64] + [int(i) & _MASK64 for i in ids]
    return np.random.Generator(np.random.Philox(np.random.SeedSequence(key)))


def as_generator(seed_or_rng, *ids):
    if isinstance(seed_or_rng, np.random.Generator):
        return seed_or_rng
    return stream(seed_or_rng, *ids)
