"""Counter-based deterministic random source for the synthetic stream generator.

The generator must be reproducible bit-for-bit across runs, platforms and
reimplementations in other languages, so it is pinned to a fully specified
algorithm instead of a library RNG whose draw order may change between
releases:

* ``raw(seed, i)   = splitmix64(seed + (i + 1) * 0x9E3779B97F4A7C15)``
* ``uniform(i)     = ((raw >> 11) + 1) * 2**-53``  (in (0, 1])
* ``gaussian(k)``  : Box-Muller on the uniform pair ``(2k, 2k+1)``:
  ``sqrt(-2 ln u0) * cos(2 pi u1)``

All indices are absolute draw counters, so any sub-range of a stream can be
regenerated independently of chunking.
"""

import numpy as np

_GOLDEN = np.uint64(0x9E3779B97F4A7C15)
_MIX1 = np.uint64(0xBF58476D1CE4E5B9)
_MIX2 = np.uint64(0x94D049BB133111EB)


def raw64(seed: int, start: int, count: int) -> np.ndarray:
    """splitmix64 outputs for draw counters start..start+count-1, as uint64."""
    counters = np.arange(start + 1, start + count + 1, dtype=np.uint64)
    z = np.uint64(seed & 0xFFFFFFFFFFFFFFFF) + counters * _GOLDEN
    z = (z ^ (z >> np.uint64(30))) * _MIX1
    z = (z ^ (z >> np.uint64(27))) * _MIX2
    return z ^ (z >> np.uint64(31))


def uniforms(seed: int, start: int, count: int) -> np.ndarray:
    """Uniform doubles in (0, 1], one per draw counter."""
    bits = raw64(seed, start, count) >> np.uint64(11)
    return (bits.astype(np.float64) + 1.0) * 2.0 ** -53


def gaussians(seed: int, start: int, count: int) -> np.ndarray:
    """Standard-normal doubles for gaussian draw counters start..start+count-1.

    Gaussian draw k consumes uniform counters 2k and 2k+1.
    """
    u = uniforms(seed, 2 * start, 2 * count)
    u0, u1 = u[0::2], u[1::2]
    return np.sqrt(-2.0 * np.log(u0)) * np.cos(2.0 * np.pi * u1)
