"""Deterministic counter-based random streams (SplitMix64).

Every randomized component in this package draws from a SplitMix64 stream.
The generator is counter-based: the n-th 64-bit output of a stream seeded
with ``s`` is ``mix64((s + (n+1) * GOLDEN) mod 2**64)``, so identical seeds
give bit-identical sequences on every platform and in any implementation
language, and batches can be produced without advancing state one draw at
a time.

Sub-streams are derived with :func:`derive_seed`, which folds integer and
string labels into a parent seed.  Components never share streams; each
caller owns its stream explicitly.
"""

from __future__ import annotations

import numpy as np

_MASK = (1 << 64) - 1
GOLDEN = 0x9E3779B97F4A7C15
_MIX_A = 0xBF58476D1CE4E5B9
_MIX_B = 0x94D049BB133111EB
_STR_TAG = 0x5F

_INV_2_53 = 2.0 ** -53


def mix64(z: int) -> int:
    """SplitMix64 finalizer: bijective 64-bit mixing of ``z``."""
    z &= _MASK
    z = ((z ^ (z >> 30)) * _MIX_A) & _MASK
    z = ((z ^ (z >> 27)) * _MIX_B) & _MASK
    return z ^ (z >> 31)


def _mix64_vec(z: np.ndarray) -> np.ndarray:
    z = z ^ (z >> np.uint64(30))
    z = z * np.uint64(_MIX_A)
    z = z ^ (z >> np.uint64(27))
    z = z * np.uint64(_MIX_B)
    return z ^ (z >> np.uint64(31))


def derive_seed(seed: int, *tokens: int | str) -> int:
    """Derive a child seed from ``seed`` and a sequence of labels.

    Integers fold as ``h = mix64(h ^ v)``; strings fold their UTF-8 bytes in
    zero-padded little-endian 8-byte chunks, prefixed with the tagged length.
    """
    h = mix64(seed & _MASK)
    for tok in tokens:
        if isinstance(tok, str):
            data = tok.encode("utf-8")
            h = mix64(h ^ (len(data) << 8) ^ _STR_TAG)
            for off in range(0, len(data), 8):
                chunk = data[off:off + 8]
                h = mix64(h ^ int.from_bytes(chunk, "little"))
        else:
            h = mix64(h ^ (int(tok) & _MASK))
    return h


class Stream:
    """One SplitMix64 stream.  Not thread-safe; use one per caller."""

    __slots__ = ("_state",)

    def __init__(self, seed: int):
        self._state = seed & _MASK

    def u64(self) -> int:
        self._state = (self._state + GOLDEN) & _MASK
        return mix64(self._state)

    def uniform(self) -> float:
        """Uniform double in [0, 1) with 53-bit resolution."""
        return (self.u64() >> 11) * _INV_2_53

    def uniform_open(self) -> float:
        """Uniform double strictly inside (0, 1)."""
        return ((self.u64() >> 11) + 0.5) * _INV_2_53

    def u64_batch(self, n: int) -> np.ndarray:
        counters = np.uint64(self._state) + np.uint64(GOLDEN) * np.arange(
            1, n + 1, dtype=np.uint64
        )
        self._state = (self._state + GOLDEN * n) & _MASK
        return _mix64_vec(counters)

    def uniform_batch(self, n: int) -> np.ndarray:
        return (self.u64_batch(n) >> np.uint64(11)).astype(np.float64) * _INV_2_53

    def uniform_open_batch(self, n: int) -> np.ndarray:
        mantissa = (self.u64_batch(n) >> np.uint64(11)).astype(np.float64)
        return (mantissa + 0.5) * _INV_2_53

    def spawn(self, *tokens: int | str) -> "Stream":
        """Independent child stream; does not advance this stream."""
        return Stream(derive_seed(self._state, *tokens))


def stream(seed: int, *tokens: int | str) -> Stream:
    """Stream for ``seed`` scoped by label tokens."""
    return Stream(derive_seed(seed, *tokens) if tokens else seed)
