"""Counter-based deterministic randomness.

Every stochastic stage draws from a keyed BLAKE2b counter generator instead
of a stateful RNG, so results are bit-identical across reruns, platforms,
Python versions, and worker counts: the draw for an item depends only on
(seed, label, indices), never on call order.
"""

from __future__ import annotations

import hashlib

_SEP = b"\x1f"


def keyed_u64(seed: int, *key: object) -> int:
    """Return a uniform 64-bit integer for (seed, *key)."""
    h = hashlib.blake2b(digest_size=8)
    h.update(str(seed).encode("utf-8"))
    for part in key:
        h.update(_SEP)
        h.update(str(part).encode("utf-8"))
    return int.from_bytes(h.digest(), "big")


def keyed_uniform(seed: int, *key: object) -> float:
    """Return a uniform float in [0, 1) for (seed, *key)."""
    return keyed_u64(seed, *key) / 2.0**64


def keyed_randbelow(seed: int, n: int, *key: object) -> int:
    """Return a uniform integer in [0, n) for (seed, *key).

    Uses rejection sampling on the top of the 64-bit range so the result is
    exactly uniform; the retry counter is folded into the key so rejected
    draws stay deterministic.
    """
    if n <= 0:
        raise ValueError(f"n must be positive, got {n}")
    limit = (2**64 // n) * n
    attempt = 0
    while True:
        value = keyed_u64(seed, *key, attempt)
        if value < limit:
            return value % n
        attempt += 1


def keyed_shuffle(items: list, seed: int, *key: object) -> list:
    """Return a Fisher-Yates shuffle of items, deterministic in (seed, *key)."""
    out = list(items)
    for i in range(len(out) - 1, 0, -1):
        j = keyed_randbelow(seed, i + 1, *key, "fy", i)
        out[i], out[j] = out[j], out[i]
    return out
