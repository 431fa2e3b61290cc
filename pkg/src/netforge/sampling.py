"""Counter-based standard normal variates indexed by (path, step, coordinate).

numpy ships Philox as a stream generator, but it cannot be evaluated at an
arbitrary array of counters; the 10-round Philox4x32 block function is
therefore applied directly to the counter (i, n, m_lo, m_hi) under the key
derived from the seed. Each variate is an inverse-CDF transform of a 53-bit
uniform built from two output words.
"""

import numpy as np
from scipy.special import ndtri

_MASK = np.uint64(0xFFFFFFFF)
_M0 = np.uint64(0xD2511F53)
_M1 = np.uint64(0xCD9E8D57)
_W0 = np.uint64(0x9E3779B9)
_W1 = np.uint64(0xBB67AE85)
_S32 = np.uint64(32)


def philox4x32(counter, key, rounds=10):
    """Philox4x32 block function on broadcast uint32 words.

    counter: four arrays of 32-bit values, key: two. Returns four uint64 arrays
    holding 32-bit outputs.
    """
    c0, c1, c2, c3 = (np.asarray(c, dtype=np.uint64) & _MASK for c in counter)
    k0, k1 = (np.asarray(k, dtype=np.uint64) & _MASK for k in key)
    for r in range(rounds):
        if r:
            k0 = (k0 + _W0) & _MASK
            k1 = (k1 + _W1) & _MASK
        p0 = _M0 * c0
        p1 = _M1 * c2
        c0, c1, c2, c3 = (
            (p1 >> _S32) ^ c1 ^ k0,
            p1 & _MASK,
            (p0 >> _S32) ^ c3 ^ k1,
            p0 & _MASK,
        )
    return c0, c1, c2, c3


class GaussianSampler:
    def __init__(self, seed):
        seed = int(seed)
        if not 0 <= seed < 2 ** 64:
            raise ValueError("seed must fit in 64 unsigned bits")
        self.seed = seed
        self._key = (seed & 0xFFFFFFFF, seed >> 32)

    def uniforms(self, m, n, i):
        m = np.asarray(m, dtype=np.uint64)
        n = np.asarray(n, dtype=np.uint64)
        i = np.asarray(i, dtype=np.uint64)
        w0, w1, _, _ = philox4x32((i, n, m & _MASK, m >> _S32), self._key)
        k = ((w0 >> np.uint64(5)) << np.uint64(26)) | (w1 >> np.uint64(6))
        return (k.astype(np.float64) + 0.5) * 2.0 ** -53

    def normal(self, m, n, i):
        """Standard normal variate(s) at broadcast indices (m, n, i)."""
        return ndtri(self.uniforms(m, n, i))

    def block(self, paths, N, d):
        """Array of shape (len(paths), N, d) with the variates of the given paths."""
        paths = np.asarray(paths, dtype=np.uint64)
        return self.normal(paths[:, None, None], np.arange(N)[None, :, None], np.arange(d)[None, None, :])
