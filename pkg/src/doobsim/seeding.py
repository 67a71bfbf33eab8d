"""Per-path random streams.

Every path owns a PCG64 stream whose 128-bit state and increment are drawn
from a SplitMix64 sequence keyed by ``path_seed(master, index)``::

    splitmix64(x):  x += 0x9E3779B97F4A7C15
                    z = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9
                    z = (z ^ (z >> 27)) * 0x94D049BB133111EB
                    return z ^ (z >> 31)            (all mod 2**64)

    path_seed(master, i) = splitmix64(master ^ splitmix64(i))

The SplitMix64 sequence started at ``path_seed`` yields words w0..w3; the
stream uses ``state = w0 << 64 | w1`` and ``inc = (w2 << 64 | w3) | 1``.
Nested continuations fork with ``path_seed(path_seed(master, i), j)``.
Paths therefore never depend on batch partitioning or worker count.
"""

from __future__ import annotations

import numpy as np

MASK64 = (1 << 64) - 1
GOLDEN = 0x9E3779B97F4A7C15


def splitmix64(x: int) -> int:
    x = (x + GOLDEN) & MASK64
    z = ((x ^ (x >> 30)) * 0xBF58476D1CE4E5B9) & MASK64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & MASK64
    return z ^ (z >> 31)


def path_seed(master: int, index: int) -> int:
    return splitmix64((int(master) & MASK64) ^ splitmix64(int(index) & MASK64))


def _words(seed: int, k: int = 4):
    out = []
    x = seed & MASK64
    for _ in range(k):
        out.append(splitmix64(x))
        x = (x + GOLDEN) & MASK64
    return out


def pcg_state(seed: int) -> dict:
    w0, w1, w2, w3 = _words(seed)
    return {
        "bit_generator": "PCG64",
        "state": {"state": (w0 << 64) | w1, "inc": ((w2 << 64) | w3) | 1},
        "has_uint32": 0,
        "uinteger": 0,
    }


def path_rng(master: int, index: int) -> np.random.Generator:
    """A fresh Generator for path ``index`` of a run keyed by ``master``."""
    bg = np.random.PCG64()
    bg.state = pcg_state(path_seed(master, index))
    return np.random.Generator(bg)


class StreamBank:
    """One reusable Generator whose state is reset per path.

    Re-seeding an existing bit generator is an order of magnitude cheaper
    than building a new one, which matters at 10^5 paths.
    """

    def __init__(self, master: int):
        self.master = int(master) & MASK64
        self._bg = np.random.PCG64()
        self.rng = np.random.Generator(self._bg)

    def at(self, index: int, branch: int | None = None) -> np.random.Generator:
        seed = path_seed(self.master, index)
        if branch is not None:
            seed = path_seed(seed, branch)
        self._bg.state = pcg_state(seed)
        return self.rng


def as_rng(seed) -> np.random.Generator:
    """Accept a Generator, a ``(master, index)`` pair or a plain integer seed."""
    if isinstance(seed, np.random.Generator):
        return seed
    if isinstance(seed, tuple):
        return path_rng(*seed)
    bg = np.random.PCG64()
    bg.state = pcg_state(int(seed) & MASK64)
    return np.random.Generator(bg)
