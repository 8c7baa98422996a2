"""Seeded counter-based random numbers for reproducible test problems.

The generator is stateless: the ``i``-th 64-bit word of stream ``s``
under seed ``seed`` is::

    key  = mix(seed XOR mix(s))
    word = mix(key + (i + 1) * 0x9E3779B97F4A7C15)      (mod 2**64)

where ``mix`` is the SplitMix64 finalizer. A word becomes a uniform
deviate in ``(0, 1]`` as ``((word >> 11) + 1) * 2**-53``. Standard
normals come in pairs from consecutive uniforms ``(u1, u2)`` by
Box-Muller: ``sqrt(-2 ln u1) * (cos 2 pi u2, sin 2 pi u2)``.

A complex Gaussian matrix of shape ``(rows, cols)`` is filled in
column-major order; entry ``p = i + j * rows`` takes the normal pair
``p`` as ``(real, imag)``. Any language with 64-bit unsigned arithmetic
can replay these streams.
"""

from __future__ import annotations

import numpy as np

__all__ = ["STREAM_B", "STREAM_X_LEFT", "STREAM_X_RIGHT", "uint64_words", "uniforms", "normals", "complex_gaussian"]

_GOLDEN = np.uint64(0x9E3779B97F4A7C15)
_M1 = np.uint64(0xBF58476D1CE4E5B9)
_M2 = np.uint64(0x94D049BB133111EB)
_MASK = (1 << 64) - 1

STREAM_B = 1
STREAM_X_LEFT = 2
STREAM_X_RIGHT = 3


def _mix(z: np.ndarray) -> np.ndarray:
    z = (z ^ (z >> np.uint64(30))) * _M1
    z = (z ^ (z >> np.uint64(27))) * _M2
    return z ^ (z >> np.uint64(31))


def _mix_int(z: int) -> int:
    return int(_mix(np.array([z & _MASK], dtype=np.uint64))[0])


def uint64_words(seed: int, stream: int, count: int, start: int = 0) -> np.ndarray:
    key = np.uint64(_mix_int((seed & _MASK) ^ _mix_int(stream)))
    counter = np.arange(start + 1, start + count + 1, dtype=np.uint64)
    with np.errstate(over="ignore"):
        return _mix(key + counter * _GOLDEN)


def uniforms(seed: int, stream: int, count: int) -> np.ndarray:
    w = uint64_words(seed, stream, count)
    return ((w >> np.uint64(11)).astype(np.float64) + 1.0) * 2.0**-53


def normals(seed: int, stream: int, count: int) -> np.ndarray:
    """``count`` standard normal deviates (Box-Muller on consecutive uniforms)."""
    pairs = (count + 1) // 2
    u = uniforms(seed, stream, 2 * pairs)
    r = np.sqrt(-2.0 * np.log(u[0::2]))
    theta = 2.0 * np.pi * u[1::2]
    out = np.empty(2 * pairs)
    out[0::2] = r * np.cos(theta)
    out[1::2] = r * np.sin(theta)
    return out[:count]


def complex_gaussian(seed: int, stream: int, rows: int, cols: int) -> np.ndarray:
    z = normals(seed, stream, 2 * rows * cols)
    flat = z[0::2] + 1j * z[1::2]
    return flat.reshape((rows, cols), order="F")
