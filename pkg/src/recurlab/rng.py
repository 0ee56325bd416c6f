"""Counter-based random streams.

Every random quantity in the package is drawn from a Philox4x64-10 stream
whose 128-bit key is ``(master_seed, stream_index)`` and whose counter starts
at zero.  Streams are therefore addressable: point ``i`` of an ensemble always
sees the same numbers, whatever order or thread the point is processed in.

Conversions used on top of the raw 64-bit words:

* uniform double: ``(word >> 11) * 2**-53`` (numpy's ``Generator.random``);
* bit streams: words are read most-significant bit first.
"""

from __future__ import annotations

import numpy as np

_MASK64 = (1 << 64) - 1


def _check_word(value: int, name: str) -> int:
    value = int(value)
    if value < 0 or value > _MASK64:
        raise ValueError(f"{name} must fit in an unsigned 64-bit word, got {value}")
    return value


def stream(seed: int, index: int = 0) -> np.random.Generator:
    """Return the generator for stream ``index`` under ``seed``."""
    key = np.array([_check_word(seed, "seed"), _check_word(index, "index")], dtype=np.uint64)
    return np.random.Generator(np.random.Philox(key=key))


def raw_words(seed: int, index: int, count: int) -> np.ndarray:
    """First ``count`` raw 64-bit words of a stream."""
    return stream(seed, index).bit_generator.random_raw(count).astype(np.uint64)


def uniforms(seed: int, index: int, count: int) -> np.ndarray:
    """First ``count`` uniform doubles in [0, 1) of a stream."""
    return stream(seed, index).random(count)
