"""Deterministic seed derivation for repeatable parallel work."""

from __future__ import annotations

_MASK64 = 0xFFFFFFFFFFFFFFFF
_GOLDEN = 0x9E3779B97F4A7C15


def mix64(x: int) -> int:
    """SplitMix64 finalizer: bijective avalanche mix of a 64-bit value."""
    x &= _MASK64
    x = ((x ^ (x >> 30)) * 0xBF58476D1CE4E5B9) & _MASK64
    x = ((x ^ (x >> 27)) * 0x94D049BB133111EB) & _MASK64
    return x ^ (x >> 31)


def derive_seed(base: int, *indices: int) -> int:
    """Expand a base seed into an independent stream seed for the given indices.

    Each index advances the state by a golden-ratio increment before mixing,
    so (base, i, j) and (base, j, i) land in unrelated streams.
    """
    z = base & _MASK64
    for i in indices:
        z = mix64((z + _GOLDEN * (i + 1)) & _MASK64)
    return z
