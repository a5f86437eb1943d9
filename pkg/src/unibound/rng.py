"""Deterministic random streams.

All randomness flows from a single root seed. A work unit identified by
(root seed, purpose tag, index) derives its own generator through
``numpy.random.SeedSequence``, so any unit can be recomputed in isolation and
merged results never depend on execution order or worker count.

Normal variates are produced by inverting the standard normal CDF on a
strictly-open uniform stream rather than by rejection or ziggurat methods, so
the byte stream of every estimate is a pure function of (seed, tag, index).
"""

from __future__ import annotations

import hashlib

import numpy as np
from scipy.special import ndtri

__all__ = ["stream", "as_stream", "open_uniforms", "standard_normals", "rademacher_signs"]


def _tag_entropy(tag: str) -> int:
    digest = hashlib.sha256(tag.encode("utf-8")).digest()
    return int.from_bytes(digest[:8], "big")


def stream(root_seed: int, tag: str, index: int = 0) -> np.random.Generator:
    """Generator for the work unit (root_seed, tag, index)."""
    if root_seed < 0:
        raise ValueError("root seed must be a nonnegative integer")
    seq = np.random.SeedSequence(entropy=(int(root_seed), _tag_entropy(tag), int(index)))
    return np.random.Generator(np.random.PCG64(seq))


def as_stream(seed, tag: str) -> np.random.Generator:
    """Accept either a root seed (int) or an already-derived Generator.

    Passing the same int twice yields identical streams, which is how callers
    opt into common random numbers across two estimates.
    """
    if isinstance(seed, np.random.Generator):
        return seed
    return stream(int(seed), tag)


def open_uniforms(rng: np.random.Generator, size) -> np.ndarray:
    # (k + 1/2) / 2^53 lies strictly inside (0, 1); ndtri stays finite.
    k = rng.integers(0, 1 << 53, size=size, dtype=np.int64)
    return (k.astype(np.float64) + 0.5) * 2.0**-53


def standard_normals(rng: np.random.Generator, size) -> np.ndarray:
    """Standard normals via inverse-CDF of open uniforms."""
    return ndtri(open_uniforms(rng, size))


def rademacher_signs(rng: np.random.Generator, size) -> np.ndarray:
    """Uniform +/-1 variates as float64."""
    return 2.0 * rng.integers(0, 2, size=size).astype(np.float64) - 1.0
