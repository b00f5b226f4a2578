"""Counter-based Gaussian noise (Philox-4x32 with 10 rounds).

Every normal variate is a pure function of (seed, path index, step index),
so simulation results cannot depend on execution order, chunking or worker
count: the noise for path j at step k is the same no matter which other
paths are being advanced alongside it.  One Philox block yields two
normals by Box-Muller; consecutive even/odd steps share a block.

The Philox round function follows the published reference constants and is
checked against its known-answer vectors in the test suite.
"""

import numpy as np

_M0 = np.uint64(0xD2511F53)
_M1 = np.uint64(0xCD9E8D57)
_W0 = np.uint64(0x9E3779B9)
_W1 = np.uint64(0xBB67AE85)
_MASK32 = np.uint64(0xFFFFFFFF)
_R32 = np.uint64(32)
_R11 = np.uint64(11)
_ONE = np.uint64(1)
_INV53 = float(2.0**-53)


def philox4x32(c0, c1, c2, c3, k0, k1):
    """One Philox-4x32-10 block per counter; all inputs hold 32-bit words.

    Arguments are uint64 scalars or arrays (values below 2^32) and
    broadcast together; returns the four 32-bit output words.
    """
    c0 = np.asarray(c0, dtype=np.uint64)
    c1 = np.asarray(c1, dtype=np.uint64)
    c2 = np.asarray(c2, dtype=np.uint64)
    c3 = np.asarray(c3, dtype=np.uint64)
    k0 = np.asarray(k0, dtype=np.uint64)
    k1 = np.asarray(k1, dtype=np.uint64)
    for _ in range(10):
        p0 = _M0 * c0
        p1 = _M1 * c2
        new_c0 = (p1 >> _R32) ^ c1 ^ k0
        new_c2 = (p0 >> _R32) ^ c3 ^ k1
        c1 = p1 & _MASK32
        c3 = p0 & _MASK32
        c0 = new_c0
        c2 = new_c2
        k0 = (k0 + _W0) & _MASK32
        k1 = (k1 + _W1) & _MASK32
    return c0, c1, c2, c3


def _split64(v) -> tuple:
    v = np.asarray(v, dtype=np.uint64)
    return v & _MASK32, v >> _R32


def normal_pairs(seed: int, paths, block):
    """Two standard normals per path for one even/odd step block.

    ``paths`` is an integer array of path indices, ``block`` the step-pair
    index (step k uses block k >> 1 and component k & 1).  The seed keys
    the generator; paths and blocks form the counter.
    """
    paths = np.asarray(paths, dtype=np.uint64)
    c0, c1 = _split64(np.uint64(block))
    c2, c3 = _split64(paths)
    k0, k1 = _split64(np.uint64(seed))
    w0, w1, w2, w3 = philox4x32(c0, c1, c2, c3, k0, k1)
    a = (w0 << _R32) | w1
    b = (w2 << _R32) | w3
    # top 53 bits -> doubles; u1 in (0, 1] so the log is finite
    u1 = ((a >> _R11) + _ONE) * _INV53
    u2 = (b >> _R11) * _INV53
    radius = np.sqrt(-2.0 * np.log(u1))
    angle = (2.0 * np.pi) * u2
    return radius * np.cos(angle), radius * np.sin(angle)


def normals(seed: int, paths, step: int):
    """Standard normal for each path at one step index."""
    pair = normal_pairs(seed, paths, int(step) >> 1)
    return pair[int(step) & 1]
