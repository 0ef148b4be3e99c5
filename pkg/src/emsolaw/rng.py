"""Counter-based Philox4x64-10 streams, vectorized over keys and counters.

The block function is bit-identical to ``numpy.random.Philox``: the stream for
key ``k`` yields, for block ``b = 0, 1, ...``, the four words of
``philox(counter=b + 1, key=k)``.  Keys are 128-bit; the low word holds the
user seed and the high word a stream index (trial number), so every trial of a
Monte Carlo run gets its own independent stream regardless of execution order.
"""

import numpy as np

ALGORITHM = "philox4x64-10 (numpy-compatible); key=(seed, stream); lexicographic pair order; u=(word>>11)*2^-53"

_M0 = np.uint64(0xD2E7470EE14C6C93)
_M1 = np.uint64(0xCA5A826395121157)
_W0 = np.uint64(0x9E3779B97F4A7C15)
_W1 = np.uint64(0xBB67AE8584CAA73B)
_LO = np.uint64(0xFFFFFFFF)
_32 = np.uint64(32)
_MASK64 = (1 << 64) - 1


def _mulhilo(a, b):
    alo = a & _LO
    ahi = a >> _32
    blo = b & _LO
    bhi = b >> _32
    ll = alo * blo
    lh = alo * bhi
    hl = ahi * blo
    hh = ahi * bhi
    mid = (ll >> _32) + (lh & _LO) + (hl & _LO)
    lo = (ll & _LO) | ((mid & _LO) << _32)
    hi = hh + (lh >> _32) + (hl >> _32) + (mid >> _32)
    return hi, lo


def philox_block(counter, key0, key1):
    """Four output words for 64-bit ``counter`` values (upper counter words zero)."""
    c0 = np.asarray(counter, dtype=np.uint64)
    shape = np.broadcast(c0, np.asarray(key0), np.asarray(key1)).shape
    c0 = np.broadcast_to(c0, shape).copy()
    k0 = np.broadcast_to(np.asarray(key0, dtype=np.uint64), shape).copy()
    k1 = np.broadcast_to(np.asarray(key1, dtype=np.uint64), shape).copy()
    c1 = np.zeros(shape, dtype=np.uint64)
    c2 = np.zeros(shape, dtype=np.uint64)
    c3 = np.zeros(shape, dtype=np.uint64)
    with np.errstate(over="ignore"):
        for r in range(10):
            if r:
                k0 = k0 + _W0
                k1 = k1 + _W1
            hi0, lo0 = _mulhilo(_M0, c0)
            hi1, lo1 = _mulhilo(_M1, c2)
            c0, c1, c2, c3 = hi1 ^ c1 ^ k0, lo1, hi0 ^ c3 ^ k1, lo0
    return np.stack([c0, c1, c2, c3], axis=-1)


def raw_words(seed, streams, count):
    """First ``count`` raw 64-bit words of each stream; shape ``(len(streams), count)``."""
    streams = np.atleast_1d(np.asarray(streams, dtype=np.uint64))
    nblocks = -(-count // 4)
    counters = np.arange(1, nblocks + 1, dtype=np.uint64)
    words = philox_block(counters[None, :], np.uint64(seed & _MASK64), streams[:, None])
    return words.reshape(len(streams), nblocks * 4)[:, :count]


def uniforms(seed, streams, count):
    """Doubles in [0, 1) with the same mapping as ``Generator.random``."""
    words = raw_words(seed, streams, count)
    return (words >> np.uint64(11)).astype(np.float64) * (1.0 / 9007199254740992.0)
