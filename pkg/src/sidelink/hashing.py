"""Shared public randomness as a family of boolean hash functions.

Both simulated parties hold the same :class:`HashOracle`; querying
``hash_bit(j, a)`` returns the value of hash function ``j`` on symbol ``a``.

Seeds are 256-bit integers. Sub-streams are carved out of a seed with
BLAKE2b using a distinct personalization string per purpose, so the hash
tables, public coins and input sampling of one trial never overlap:

* ``trial_seed = BLAKE2b-256(key=master_seed, msg=trial_index, person="trial-seed")``
* hash table key = ``BLAKE2b-128(seed, person="hash-table")``
* public coin key = ``BLAKE2b-128(seed, person="public-coin")``
* input sampling key = ``BLAKE2b-128(seed, person="inputs")``

The table backend reads Philox4x64-10 blocks at counters 0, 1, 2, ... and
lays the bit stream out row by row: bit ``j * domain_size + a`` is
``hash_bit(j, a)``, where bit ``b`` is bit ``b % 64`` (LSB first) of 64-bit
word ``b // 64``.
"""

from __future__ import annotations

import enum
import hashlib
import threading

import numpy as np

from .errors import BadParam, DomainOverflow

SEED_BITS = 256
SEED_BYTES = SEED_BITS // 8
_MASK64 = (1 << 64) - 1


class Backend(str, enum.Enum):
    TRUE_RANDOM_CACHED = "true-random-cached"
    KEYED_PRF = "keyed-prf"


def _seed_bytes(seed: int) -> bytes:
    if not 0 <= seed < 1 << SEED_BITS:
        raise BadParam(f"seed must be a {SEED_BITS}-bit nonnegative integer")
    return int(seed).to_bytes(SEED_BYTES, "little")


def derive_seed(master_seed: int, index: int) -> int:
    """Per-trial seed: a keyed PRF of the trial index under the master seed."""
    digest = hashlib.blake2b(int(index).to_bytes(8, "little"), key=_seed_bytes(master_seed),
                             digest_size=SEED_BYTES, person=b"trial-seed")
    return int.from_bytes(digest.digest(), "little")


def subkey(seed: int, purpose: str) -> tuple[int, int]:
    """128-bit Philox key for one purpose, as two little-endian 64-bit words."""
    digest = hashlib.blake2b(_seed_bytes(seed), digest_size=16,
                             person=purpose.encode()[:16]).digest()
    return int.from_bytes(digest[:8], "little"), int.from_bytes(digest[8:], "little")


def philox_stream(key: tuple[int, int]) -> np.random.Philox:
    """Philox4x64-10 whose first output block is the one at counter 0.

    numpy increments the counter before each block, so start one below zero.
    """
    return np.random.Philox(counter=[_MASK64] * 4, key=list(key))


def purpose_rng(seed: int, purpose: str) -> np.random.Generator:
    return np.random.Generator(philox_stream(subkey(seed, purpose)))


def _mix64(z: np.ndarray) -> np.ndarray:
    # splitmix64 finalizer
    z = (z ^ (z >> np.uint64(30))) * np.uint64(0xBF58476D1CE4E5B9)
    z = (z ^ (z >> np.uint64(27))) * np.uint64(0x94D049BB133111EB)
    return z ^ (z >> np.uint64(31))


class HashOracle:
    """Boolean hash functions ``h_j: {0..domain_size-1} -> {0, 1}``.

    ``true-random-cached`` materializes the random tables lazily from the
    seeded Philox stream and memoizes them; memory grows as
    ``domain_size * max_j`` bits. ``keyed-prf`` evaluates a keyed mixing
    function per cell in O(1) memory; it approximates independent random
    functions and carries no security claim.
    """

    def __init__(self, seed: int, domain_size: int,
                 backend: Backend | str = Backend.TRUE_RANDOM_CACHED):
        if int(domain_size) != domain_size or domain_size < 1:
            raise BadParam(f"domain_size must be a positive integer, got {domain_size!r}")
        self.seed = int(seed)
        _seed_bytes(self.seed)
        self.domain_size = int(domain_size)
        self.backend = Backend(backend)
        self._lock = threading.Lock()
        if self.backend is Backend.TRUE_RANDOM_CACHED:
            self._gen = philox_stream(subkey(self.seed, "hash-table"))
            self._bits = np.zeros(0, dtype=np.uint8)
        else:
            k0, k1 = subkey(self.seed, "keyed-prf")
            self._k0, self._k1 = np.uint64(k0), np.uint64(k1)

    def __repr__(self):
        return f"HashOracle(seed={self.seed:#x}, domain_size={self.domain_size}, backend={self.backend.value})"

    def _check_symbols(self, symbols) -> np.ndarray:
        symbols = np.asarray(symbols, dtype=np.int64)
        if symbols.size and (symbols.min() < 0 or symbols.max() >= self.domain_size):
            raise DomainOverflow(f"symbol outside domain of size {self.domain_size}")
        return symbols

    def _materialize(self, rows: int) -> np.ndarray:
        need = rows * self.domain_size
        bits = self._bits
        if bits.size >= need:
            return bits
        with self._lock:
            bits = self._bits
            if bits.size < need:
                target = max(need, 2 * bits.size)
                words = -(-(target - bits.size) // 64)
                raw = self._gen.random_raw(words).astype("<u8").view(np.uint8)
                fresh = np.unpackbits(raw, bitorder="little")
                bits = np.concatenate([bits, fresh])
                bits.flags.writeable = False
                self._bits = bits
        return bits

    def bits(self, m: int, symbols) -> np.ndarray:
        """Hash values of functions ``0..m-1`` on ``symbols``: a ``(m, len(symbols))`` uint8 array."""
        symbols = self._check_symbols(symbols)
        if m < 0:
            raise BadParam("m must be nonnegative")
        if m == 0:
            return np.zeros((0, symbols.size), dtype=np.uint8)
        if self.backend is Backend.TRUE_RANDOM_CACHED:
            table = self._materialize(m)[: m * self.domain_size].reshape(m, self.domain_size)
            return table[:, symbols]
        j = np.arange(m, dtype=np.uint64)[:, None]
        cell = (j << np.uint64(32)) | symbols.astype(np.uint64)[None, :]
        z = _mix64(_mix64(cell ^ self._k0) + self._k1)
        return (z >> np.uint64(63)).astype(np.uint8)

    def hash_bit(self, j: int, a: int) -> int:
        if j < 0:
            raise BadParam("hash index must be nonnegative")
        return int(self.bits(j + 1, [a])[j, 0])

    def hash_prefix(self, a: int, m: int) -> np.ndarray:
        """``[hash_bit(0, a), ..., hash_bit(m-1, a)]``."""
        return self.bits(m, [a])[:, 0]

    def coins(self) -> np.random.Generator:
        """Public coins drawn from a region of the seed disjoint from the hash tables."""
        return purpose_rng(self.seed, "public-coin")
