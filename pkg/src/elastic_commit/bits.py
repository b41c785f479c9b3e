"""Bit-vector helpers.

Bit vectors are 1-D ``numpy.uint8`` arrays holding 0/1 values. Conversions to
integers and hex strings are most-significant-bit first: ``bits[0]`` is the
highest-order bit.
"""

from __future__ import annotations

import numpy as np

from .errors import DomainError

BitVector = np.ndarray


def as_bits(values, length: int | None = None) -> BitVector:
    """Coerce a sequence of 0/1 values to a ``uint8`` bit vector."""
    arr = np.asarray(values, dtype=np.uint8).reshape(-1)
    if arr.size and arr.max() > 1:
        raise DomainError("bit vectors may only contain 0 and 1")
    if length is not None and arr.size != length:
        raise DomainError(f"expected {length} bits, got {arr.size}")
    return arr


def zeros(n: int) -> BitVector:
    return np.zeros(n, dtype=np.uint8)


def ones(n: int) -> BitVector:
    return np.ones(n, dtype=np.uint8)


def random_bits(rng: np.random.Generator, n: int) -> BitVector:
    return rng.integers(0, 2, size=n, dtype=np.uint8)


def hamming(a: BitVector, b: BitVector) -> int:
    if a.shape != b.shape:
        raise DomainError(f"length mismatch: {a.size} vs {b.size}")
    return int(np.count_nonzero(a != b))


def xor(a: BitVector, b: BitVector) -> BitVector:
    if a.shape != b.shape:
        raise DomainError(f"length mismatch: {a.size} vs {b.size}")
    return np.bitwise_xor(a, b)


def to_int(bits: BitVector) -> int:
    """Integer value of a bit vector, ``bits[0]`` most significant."""
    if bits.size == 0:
        return 0
    pad = (-bits.size) % 8
    packed = np.packbits(np.concatenate([np.zeros(pad, np.uint8), bits]))
    return int.from_bytes(packed.tobytes(), "big")


def from_int(value: int, n: int) -> BitVector:
    value = int(value)
    if value < 0 or value >> n:
        raise DomainError(f"{value} does not fit in {n} bits")
    if n == 0:
        return zeros(0)
    nbytes = (n + 7) // 8
    raw = np.frombuffer(value.to_bytes(nbytes, "big"), dtype=np.uint8)
    return np.unpackbits(raw)[8 * nbytes - n:].copy()


def to_hex(bits: BitVector) -> str:
    """Pack bits MSB-first into bytes (zero padded at the end) and hex-encode."""
    return np.packbits(bits).tobytes().hex()


def from_hex(text: str, n: int) -> BitVector:
    raw = np.frombuffer(bytes.fromhex(text), dtype=np.uint8)
    bits = np.unpackbits(raw)
    if bits.size < n or bits[n:].any():
        raise DomainError("hex payload does not encode the stated length")
    return bits[:n].copy()


def all_vectors(n: int) -> np.ndarray:
    """All 2**n bit vectors as rows, ordered by integer value."""
    values = np.arange(1 << n, dtype=np.uint32)
    shifts = np.arange(n - 1, -1, -1, dtype=np.uint32)
    return ((values[:, None] >> shifts) & 1).astype(np.uint8)


def rows_to_ints(rows: np.ndarray) -> np.ndarray:
    """Integer value of each row of a bit matrix (n <= 63)."""
    n = rows.shape[1]
    weights = np.left_shift(np.uint64(1), np.arange(n - 1, -1, -1, dtype=np.uint64))
    return (rows.astype(np.uint64) * weights).sum(axis=1, dtype=np.uint64)
