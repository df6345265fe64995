"""Portable pseudo-random numbers.

xoshiro256** seeded through splitmix64, with Box-Muller normals. Everything is
done on Python integers so that a given seed yields the same stream on every
platform (and in any other language implementing the same two algorithms).

Draw conventions
----------------
* ``uniform()`` returns ``(next >> 11) * 2**-53`` in ``[0, 1)``.
* ``normal(mu, sd)`` consumes exactly two uniforms ``u1, u2`` and returns
  ``mu + sd * sqrt(-2 ln(1 - u1)) * cos(2 pi u2)``. The sine branch is
  discarded so that each normal has a fixed cost of two draws.
"""

import math

_MASK = (1 << 64) - 1


def splitmix64(state):
    """Advance a splitmix64 state; returns ``(new_state, output)``."""
    state = (state + 0x9E3779B97F4A7C15) & _MASK
    z = state
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK
    return state, z ^ (z >> 31)


def _rotl(x, k):
    return ((x << k) | (x >> (64 - k))) & _MASK


class Xoshiro256:
    """xoshiro256** generator."""

    def __init__(self, seed=0):
        seed = int(seed)
        if seed < 0 or seed > _MASK:
            raise ValueError("seed must be an unsigned 64-bit integer")
        sm = seed
        s = []
        for _ in range(4):
            sm, out = splitmix64(sm)
            s.append(out)
        self._s = s

    def next_u64(self):
        s = self._s
        result = (_rotl((s[1] * 5) & _MASK, 7) * 9) & _MASK
        t = (s[1] << 17) & _MASK
        s[2] ^= s[0]
        s[3] ^= s[1]
        s[1] ^= s[2]
        s[0] ^= s[3]
        s[2] ^= t
        s[3] = _rotl(s[3], 45)
        return result

    def uniform(self, low=0.0, high=1.0):
        u = (self.next_u64() >> 11) * (1.0 / 9007199254740992.0)
        if low == 0.0 and high == 1.0:
            return u
        return low + (high - low) * u

    def normal(self, mu=0.0, sd=1.0):
        u1 = self.uniform()
        u2 = self.uniform()
        r = math.sqrt(-2.0 * math.log(1.0 - u1))
        return mu + sd * r * math.cos(2.0 * math.pi * u2)

    def below(self, bound):
        """Uniform integer in ``[0, bound)`` by rejection (no modulo bias)."""
        if bound <= 0:
            raise ValueError("bound must be positive")
        threshold = ((1 << 64) - bound) % bound
        while True:
            r = self.next_u64()
            if r >= threshold:
                return r % bound

    def permutation(self, n):
        """Fisher-Yates shuffle of ``range(n)``, swapping from the top down."""
        perm = list(range(n))
        for i in range(n - 1, 0, -1):
            j = self.below(i + 1)
            perm[i], perm[j] = perm[j], perm[i]
        return perm
