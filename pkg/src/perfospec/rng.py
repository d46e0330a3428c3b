"""Hash-keyed deterministic random streams.

Obstacle sampling must be reproducible bit-for-bit from ``(model, box, seed)``
and stable under enlargement of the sampling box: the random decision attached
to a lattice site depends only on ``(seed, site)``, never on iteration order or
on how many other sites are being sampled.  That rules out drawing from one
sequential generator and instead keys an integer hash (a splitmix64 chain) on
the seed and the site coordinates.  All helpers are vectorized over numpy
``uint64`` arrays, which wrap modulo 2**64 by construction.
"""

from __future__ import annotations

import numpy as np

_GOLDEN = np.uint64(0x9E3779B97F4A7C15)
_MIX1 = np.uint64(0xBF58476D1CE4E5B9)
_MIX2 = np.uint64(0x94D049BB133111EB)
_MASK64 = (1 << 64) - 1


def _finalize(z: np.ndarray) -> np.ndarray:
    # modular uint64 arithmetic throughout; silence numpy's scalar-overflow noise
    with np.errstate(over="ignore"):
        z = (z ^ (z >> np.uint64(30))) * _MIX1
        z = (z ^ (z >> np.uint64(27))) * _MIX2
        return z ^ (z >> np.uint64(31))


def mix64(x) -> np.ndarray:
    """Splitmix64 step applied to ``x``: advance by the golden gamma, finalize."""
    with np.errstate(over="ignore"):
        z = np.asarray(x, dtype=np.uint64) + _GOLDEN
    return _finalize(z)


def as_u64(value: int) -> np.uint64:
    """Reduce a python integer (any sign/size) to uint64."""
    return np.uint64(int(value) & _MASK64)


def derive_seed(master_seed: int, index: int) -> int:
    """Seed for realization ``index`` of an ensemble: splitmix of master+index."""
    return int(mix64(as_u64(master_seed + index)))


def site_keys(seed: int, coords: np.ndarray, salt: int = 0) -> np.ndarray:
    """One uint64 key per lattice site, keyed on (seed, salt, coordinates).

    ``coords`` has shape (n_sites, d) with integer entries; the fold is
    order-dependent across axes so permuted coordinates get distinct keys.
    """
    coords = np.asarray(coords)
    if coords.ndim == 1:
        coords = coords[:, None]
    keys = np.full(coords.shape[0], mix64(as_u64(seed) ^ as_u64(salt)), dtype=np.uint64)
    signed = np.ascontiguousarray(coords, dtype=np.int64)
    for axis in range(coords.shape[1]):
        keys = mix64(keys ^ signed[:, axis].view(np.uint64))
    return keys


def uniforms(keys: np.ndarray) -> np.ndarray:
    """Map uint64 keys to floats strictly inside (0, 1), 52-bit resolution.

    52 bits (not 53) so that ``(top + 0.5) * 2**-52`` stays representable and
    the result can never round up to exactly 1.0.
    """
    return ((np.asarray(keys, dtype=np.uint64) >> np.uint64(12)).astype(np.float64) + 0.5) * 2.0**-52


def stream_uniforms(key: np.uint64, n: int) -> np.ndarray:
    """The splitmix64 output sequence seeded at ``key``, as (0,1) floats."""
    if n == 0:
        return np.empty(0, dtype=np.float64)
    with np.errstate(over="ignore"):
        states = np.uint64(key) + np.arange(1, n + 1, dtype=np.uint64) * _GOLDEN
    return uniforms(_finalize(states))


# distinct stream tags so e.g. Bernoulli inclusion draws and Poisson count
# draws at the same site never reuse a key
SALT_BERNOULLI = int(mix64(np.uint64(0xB0)))
SALT_POISSON_COUNT = int(mix64(np.uint64(0xB1)))
SALT_POISSON_POS = int(mix64(np.uint64(0xB2)))
