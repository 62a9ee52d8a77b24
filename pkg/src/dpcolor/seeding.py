"""Deterministic seed derivation (splitmix64), so trials are replayable one by one."""

from __future__ import annotations

DEFAULT_SEED = 20180101
_MASK = (1 << 64) - 1


def splitmix64(x: int) -> int:
    x = (x + 0x9E3779B97F4A7C15) & _MASK
    x = ((x ^ (x >> 30)) * 0xBF58476D1CE4E5B9) & _MASK
    x = ((x ^ (x >> 27)) * 0x94D049BB133111EB) & _MASK
    return x ^ (x >> 31)


def derive_seed(master: int, *keys: int | str) -> int:
    """Seed for the sub-stream named by ``keys``; string keys are folded bytewise."""
    x = splitmix64(master & _MASK)
    for key in keys:
        if isinstance(key, str):
            for b in key.encode():
                x = splitmix64(x ^ b)
        else:
            x = splitmix64(x ^ (key & _MASK))
    return x
