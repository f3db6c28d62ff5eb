"""xoshiro256** seeded through splitmix64.

Chosen so sampled query sets can be reproduced by any implementation from
the published reference algorithm (https://prng.di.unimi.it/).
"""

from __future__ import annotations

import numpy as np

_MASK = (1 << 64) - 1


def _rotl(x: int, k: int) -> int:
    return ((x << k) | (x >> (64 - k))) & _MASK


def splitmix64(state: int) -> tuple[int, int]:
    """One splitmix64 step; returns (new_state, output)."""
    state = (state + 0x9E3779B97F4A7C15) & _MASK
    z = state
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK
    return state, z ^ (z >> 31)


class Xoshiro256:
    def __init__(self, seed: int = 42, state: tuple[int, int, int, int] | None = None):
        if state is None:
            sm = seed & _MASK
            words = []
            for _ in range(4):
                sm, out = splitmix64(sm)
                words.append(out)
            state = tuple(words)
        if not any(state):
            raise ValueError("xoshiro state must not be all zero")
        self.s = list(state)

    def next_u64(self) -> int:
        s = self.s
        result = (_rotl((s[1] * 5) & _MASK, 7) * 9) & _MASK
        t = (s[1] << 17) & _MASK
        s[2] ^= s[0]
        s[3] ^= s[1]
        s[1] ^= s[2]
        s[0] ^= s[3]
        s[2] ^= t
        s[3] = _rotl(s[3], 45)
        return result

    def random(self) -> float:
        """Uniform double in [0, 1) from the top 53 bits."""
        return (self.next_u64() >> 11) * (1.0 / (1 << 53))

    def below(self, bound: int) -> int:
        """Integer in [0, bound) via the multiply-shift map (bias < bound / 2**64)."""
        return (self.next_u64() * bound) >> 64

    def sample_ids(self, count: int, bound: int) -> list[int]:
        return [self.below(bound) for _ in range(count)]

    @staticmethod
    def uniform_matrix(seed: int, rows: int, cols: int) -> np.ndarray:
        """Row ``i`` holds the first ``cols`` uniforms of ``Xoshiro256(seed + i)``.

        Vectorised across rows with uint64 arithmetic; identical to calling
        :meth:`random` row by row.
        """
        seeds = [(seed + i) & _MASK for i in range(rows)]
        init = np.empty((4, rows), dtype=np.uint64)
        for i, sd in enumerate(seeds):
            sm = sd
            for w in range(4):
                sm, out = splitmix64(sm)
                init[w, i] = out
        s0, s1, s2, s3 = (init[w].copy() for w in range(4))
        out = np.empty((rows, cols))
        u5, u9 = np.uint64(5), np.uint64(9)
        scale = 1.0 / (1 << 53)
        with np.errstate(over="ignore"):
            for j in range(cols):
                x = s1 * u5
                x = (x << np.uint64(7)) | (x >> np.uint64(57))
                out[:, j] = ((x * u9) >> np.uint64(11)).astype(np.float64) * scale
                t = s1 << np.uint64(17)
                s2 ^= s0
                s3 ^= s1
                s1 ^= s2
                s0 ^= s3
                s2 ^= t
                s3 = (s3 << np.uint64(45)) | (s3 >> np.uint64(19))
        return out
