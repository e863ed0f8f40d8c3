"""Counter-based random numbers (Philox4x32-10).

Every random decision in the toolkit is a pure function of ``(seed, stream,
position, retry)``. ``stream`` is normally the line index of a sentence and
``position`` the token index inside it, so results never depend on how a
corpus is sharded or how many workers process it.

The block function follows Salmon et al. (SC'11) / Random123 exactly, so the
draws are reproducible on any platform with IEEE doubles.
"""

from __future__ import annotations

import numpy as np

_M0 = np.uint64(0xD2511F53)
_M1 = np.uint64(0xCD9E8D57)
_W0 = 0x9E3779B9
_W1 = 0xBB67AE85
_MASK32 = np.uint64(0xFFFFFFFF)
_SHIFT32 = np.uint64(32)
ROUNDS = 10

_INV32 = 1.0 / 4294967296.0
_INV53 = 1.0 / 9007199254740992.0


def philox4x32(counters: np.ndarray, key: tuple[int, int], rounds: int = ROUNDS) -> np.ndarray:
    """Apply the Philox4x32 bijection to an ``(n, 4)`` array of 32-bit counter words.

    Returns an ``(n, 4)`` uint32 array.
    """
    c = np.asarray(counters, dtype=np.uint64).reshape(-1, 4)
    c0, c1, c2, c3 = (c[:, i].copy() for i in range(4))
    k0, k1 = int(key[0]) & 0xFFFFFFFF, int(key[1]) & 0xFFFFFFFF
    p0 = np.empty_like(c0)
    p1 = np.empty_like(c0)
    for r in range(rounds):
        if r:
            k0 = (k0 + _W0) & 0xFFFFFFFF
            k1 = (k1 + _W1) & 0xFFFFFFFF
        np.multiply(c0, _M0, out=p0)
        np.multiply(c2, _M1, out=p1)
        # new c0 = hi(p1) ^ c1 ^ k0, c1 = lo(p1), c2 = hi(p0) ^ c3 ^ k1, c3 = lo(p0)
        np.right_shift(p1, _SHIFT32, out=c0)
        c0 ^= c1
        c0 ^= np.uint64(k0)
        np.right_shift(p0, _SHIFT32, out=c2)
        c2 ^= c3
        c2 ^= np.uint64(k1)
        np.bitwise_and(p1, _MASK32, out=c1)
        np.bitwise_and(p0, _MASK32, out=c3)
    return np.stack([c0, c1, c2, c3], axis=1).astype(np.uint32)


def seed_key(seed: int) -> tuple[int, int]:
    if not 0 <= seed < 2**64:
        raise ValueError(f"seed must be a 64-bit unsigned integer, got {seed}")
    return seed & 0xFFFFFFFF, seed >> 32


def token_blocks(seed: int, streams, positions, retry: int = 0) -> np.ndarray:
    """Random blocks for (stream, position) pairs.

    Counter layout is ``(position, retry, stream_lo, stream_hi)``. Returns an
    ``(n, 4)`` uint32 array.
    """
    streams = np.asarray(streams, dtype=np.uint64)
    positions = np.asarray(positions, dtype=np.uint64)
    n = positions.shape[0]
    ctr = np.empty((n, 4), dtype=np.uint64)
    ctr[:, 0] = positions & _MASK32
    ctr[:, 1] = retry
    ctr[:, 2] = streams & _MASK32
    ctr[:, 3] = streams >> _SHIFT32
    return philox4x32(ctr, seed_key(seed))


def u32_to_unit(words: np.ndarray) -> np.ndarray:
    """Map 32-bit words to floats in [0, 1)."""
    return words.astype(np.float64) * _INV32


def u64_to_unit(hi: np.ndarray, lo: np.ndarray) -> np.ndarray:
    """Map two 32-bit words to a 53-bit float in [0, 1)."""
    x = (hi.astype(np.uint64) << _SHIFT32) | lo.astype(np.uint64)
    return (x >> np.uint64(11)).astype(np.float64) * _INV53


class CounterRNG:
    """Sequential view of one Philox stream.

    Each call consumes the block at the next position; useful where the
    number of draws is not known up front. Blocks are computed ahead in
    batches, which does not change what any position yields.
    """

    AHEAD = 256

    def __init__(self, seed: int, stream: int = 0):
        seed_key(seed)
        self.seed = seed
        self.stream = stream
        self.position = 0
        self._start = 0
        self._buf = np.empty((0, 4), dtype=np.uint32)
        self._units: list[float] = []

    def _fill(self) -> None:
        self._start = self.position
        pos = np.arange(self.position, self.position + self.AHEAD, dtype=np.uint64)
        self._buf = token_blocks(self.seed, np.full(self.AHEAD, self.stream, dtype=np.uint64), pos)
        self._units = u64_to_unit(self._buf[:, 2], self._buf[:, 3]).tolist()

    def block(self) -> np.ndarray:
        if not self._start <= self.position < self._start + len(self._buf):
            self._fill()
        out = self._buf[self.position - self._start]
        self.position += 1
        return out

    def uniform(self) -> float:
        """A 53-bit uniform float in [0, 1) from words 2-3 of the next block."""
        if not self._start <= self.position < self._start + len(self._buf):
            self._fill()
        out = self._units[self.position - self._start]
        self.position += 1
        return out
