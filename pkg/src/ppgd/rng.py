"""Reproducible random number generation.

Every stream in this package is a numpy ``Generator`` backed by the PCG64
bit generator, seeded through ``numpy.random.SeedSequence``.  SeedSequence
implements a documented, stable mixing function, so a stream is a pure
function of the integers fed to it and independent streams can be derived
by appending distinct integer tags.

Standard normal variates are produced by inverse-CDF sampling: a uniform
variate strictly inside (0, 1) is generated as ``(k + 0.5) / 2**53`` with
``k`` a uniform 53-bit integer, then mapped through the inverse normal CDF
(``scipy.special.ndtri``).  This keeps the normal sampler portable and
exactly reproducible from the seed.
"""

from __future__ import annotations

import numpy as np
from scipy.special import ndtri

__all__ = ["make_rng", "derive_seed", "standard_normal"]

_TWO53 = 2**53


def make_rng(*parts: int) -> np.random.Generator:
    """Create a PCG64 generator seeded from a tuple of integers."""
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence(parts)))


def derive_seed(*parts: int) -> int:
    """Collapse a tuple of integers into a single reproducible 64-bit seed."""
    state = np.random.SeedSequence(parts).generate_state(2, dtype=np.uint32)
    return int(state[0]) | (int(state[1]) << 32)


def standard_normal(rng: np.random.Generator, size) -> np.ndarray:
    """Standard normal variates via the inverse CDF applied to (0,1) uniforms."""
    u = (rng.integers(0, _TWO53, size=size).astype(np.float64) + 0.5) / _TWO53
    return ndtri(u)
