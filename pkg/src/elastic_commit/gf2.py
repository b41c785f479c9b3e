"""Arithmetic in the binary extension fields GF(2^n).

Field elements are Python ints whose bit ``i`` is the coefficient of ``z^i``.
Each degree uses one fixed modulus: the irreducible trinomial
``z^n + z^k + 1`` with the smallest ``k`` if one exists, otherwise the
irreducible pentanomial ``z^n + z^a + z^b + z^c + 1`` with ``(a, b, c)``
lexicographically smallest. Moduli for ``n <= 64`` and a few larger sizes are
tabulated in :data:`MODULUS_TAPS`; other degrees are searched once and cached.
"""

from __future__ import annotations

from functools import lru_cache

import numpy as np

from .errors import DomainError

# n -> exponents of the middle terms of the modulus (z^n and 1 implied).
MODULUS_TAPS: dict[int, tuple[int, ...]] = {
    1: (), 2: (1,), 3: (1,), 4: (1,), 5: (2,), 6: (1,), 7: (1,), 8: (4, 3, 1),
    9: (1,), 10: (3,), 11: (2,), 12: (3,), 13: (4, 3, 1), 14: (5,), 15: (1,),
    16: (5, 3, 1), 17: (3,), 18: (3,), 19: (5, 2, 1), 20: (3,), 21: (2,),
    22: (1,), 23: (5,), 24: (4, 3, 1), 25: (3,), 26: (4, 3, 1), 27: (5, 2, 1),
    28: (1,), 29: (2,), 30: (1,), 31: (3,), 32: (7, 3, 2), 33: (10,), 34: (7,),
    35: (2,), 36: (9,), 37: (6, 4, 1), 38: (6, 5, 1), 39: (4,), 40: (5, 4, 3),
    41: (3,), 42: (7,), 43: (6, 4, 3), 44: (5,), 45: (4, 3, 1), 46: (1,),
    47: (5,), 48: (5, 3, 2), 49: (9,), 50: (4, 3, 2), 51: (6, 3, 1), 52: (3,),
    53: (6, 2, 1), 54: (9,), 55: (7,), 56: (7, 4, 2), 57: (4,), 58: (19,),
    59: (7, 4, 2), 60: (1,), 61: (5, 2, 1), 62: (29,), 63: (1,), 64: (4, 3, 1),
    96: (10, 9, 6), 128: (7, 2, 1), 192: (7, 2, 1), 256: (10, 5, 2),
    384: (12, 3, 2), 512: (8, 5, 2), 768: (19, 17, 4), 1024: (19, 6, 1),
    2048: (19, 14, 13), 4096: (27, 15, 1),
}

_SPREAD = [int("".join(c + "0" for c in f"{b:08b}")[:-1] or "0", 2).to_bytes(2, "big") for b in range(256)]


def _deg(a: int) -> int:
    return a.bit_length() - 1


def poly_square(a: int) -> int:
    """Square of a GF(2)[z] polynomial (interleave zero bits)."""
    if a == 0:
        return 0
    data = a.to_bytes((a.bit_length() + 7) // 8, "big")
    return int.from_bytes(b"".join([_SPREAD[b] for b in data]), "big")


def poly_mod(a: int, m: int) -> int:
    dm = _deg(m)
    while a and _deg(a) >= dm:
        a ^= m << (_deg(a) - dm)
    return a


def poly_gcd(a: int, b: int) -> int:
    while b:
        a, b = b, poly_mod(a, b)
    return a


def clmul(a: int, b: int) -> int:
    """Carry-less product of two GF(2)[z] polynomials (4-bit windows)."""
    if a == 0 or b == 0:
        return 0
    if b.bit_length() > a.bit_length():
        a, b = b, a
    table = [0] * 16
    table[1] = a
    for v in range(2, 16):
        table[v] = table[v >> 1] << 1 if v % 2 == 0 else table[v - 1] ^ a
    out = 0
    shift = ((b.bit_length() + 3) // 4) * 4
    while shift:
        shift -= 4
        out = (out << 4) ^ table[(b >> shift) & 15]
    return out


def _prime_factors(n: int) -> list[int]:
    out, p = [], 2
    while p * p <= n:
        if n % p == 0:
            out.append(p)
            while n % p == 0:
                n //= p
        p += 1
    if n > 1:
        out.append(n)
    return out


def _reduce_sparse(a: int, n: int, taps: tuple[int, ...], mask: int) -> int:
    while a >> n:
        hi = a >> n
        a &= mask
        a ^= hi
        for t in taps:
            a ^= hi << t
    return a


def is_irreducible(n: int, taps: tuple[int, ...]) -> bool:
    """Rabin's test for ``z^n + sum(z^t) + 1`` over GF(2)."""
    if n == 1:
        return True
    modulus = (1 << n) | 1
    for t in taps:
        modulus |= 1 << t
    mask = (1 << n) - 1
    checkpoints = {n // p for p in _prime_factors(n)}
    x = 2
    cur = x
    for i in range(1, n + 1):
        cur = _reduce_sparse(poly_square(cur), n, taps, mask)
        if i in checkpoints and poly_gcd(modulus, cur ^ x) != 1:
            return False
        # cheap early rejection: a factor of degree i divides z^(2^i) - z
        if i <= 16 and i not in checkpoints and i < n and poly_gcd(modulus, cur ^ x) != 1:
            return False
    return cur == x


def _search_taps(n: int) -> tuple[int, ...]:
    for k in range(1, n):
        if is_irreducible(n, (k,)):
            return (k,)
    for a in range(3, n):
        for b in range(2, a):
            for c in range(1, b):
                if is_irreducible(n, (a, b, c)):
                    return (a, b, c)
    raise DomainError(f"no irreducible trinomial or pentanomial of degree {n}")


@lru_cache(maxsize=None)
def modulus_taps(n: int) -> tuple[int, ...]:
    if n < 1:
        raise DomainError(f"field degree {n} must be positive")
    if n in MODULUS_TAPS:
        return MODULUS_TAPS[n]
    return _search_taps(n)


class GF2n:
    """The field GF(2^n) with the package's fixed modulus."""

    def __init__(self, n: int):
        self.n = n
        self.taps = modulus_taps(n)
        self.mask = (1 << n) - 1
        self.modulus = (1 << n) | 1
        for t in self.taps:
            self.modulus |= 1 << t
        if n == 1:
            self.modulus = 0b11

    def __repr__(self) -> str:
        return f"GF2n({self.n})"

    def reduce(self, a: int) -> int:
        if self.n == 1:
            return poly_mod(a, self.modulus)
        return _reduce_sparse(a, self.n, self.taps, self.mask)

    def mul(self, a: int, b: int) -> int:
        return self.reduce(clmul(a, b))

    def pow(self, a: int, e: int) -> int:
        out = 1
        while e:
            if e & 1:
                out = self.mul(out, a)
            a = self.mul(a, a)
            e >>= 1
        return out

    def inv(self, a: int) -> int:
        if a == 0:
            raise ZeroDivisionError("zero has no inverse")
        # extended Euclid in GF(2)[z]
        r0, r1 = self.modulus, a
        s0, s1 = 0, 1
        while r1 != 1:
            shift = _deg(r0) - _deg(r1)
            if shift < 0:
                r0, r1, s0, s1 = r1, r0, s1, s0
                continue
            r0 ^= r1 << shift
            s0 ^= s1 << shift
            if _deg(r0) < _deg(r1):
                r0, r1, s0, s1 = r1, r0, s1, s0
        return self.reduce(s1) if s1 >> self.n else s1

    def horner(self, coefficients, x: int) -> int:
        """Evaluate ``sum(c_i z^i)`` at ``x``; coefficients in ascending degree."""
        acc = 0
        for c in reversed(coefficients):
            acc = self.mul(acc, x) ^ c
        return acc

    def poly_times_linear(self, coeffs: list[int], root: int) -> list[int]:
        """Coefficients of ``P(z) * (z + root)`` (ascending degree)."""
        out = [0] * (len(coeffs) + 1)
        for i, c in enumerate(coeffs):
            out[i + 1] ^= c
            out[i] ^= self.mul(c, root)
        return out

    def interpolate(self, points: list[int], values: list[int]) -> list[int]:
        """Lowest-degree polynomial through ``(points[i], values[i])`` (Newton form)."""
        k = len(points)
        coef = list(values)
        for j in range(1, k):
            for i in range(k - 1, j - 1, -1):
                num = coef[i] ^ coef[i - 1]
                den = points[i] ^ points[i - j]
                coef[i] = self.mul(num, self.inv(den))
        out = [coef[k - 1]] if k else [0]
        for i in range(k - 2, -1, -1):
            out = self.poly_times_linear(out, points[i])
            out[0] ^= coef[i]
        return out

    # vectorised evaluation for small fields -------------------------------

    def batch_horner(self, coefficients, xs: np.ndarray) -> np.ndarray:
        """Evaluate the polynomial at every element of ``xs`` (n <= 32)."""
        xs = np.asarray(xs, dtype=np.int64)
        if self.n <= 20:
            return _log_horner(self.n, tuple(int(c) for c in coefficients), xs)
        if self.n <= 32:
            acc = np.zeros(xs.shape, dtype=np.uint64)
            xu = xs.astype(np.uint64)
            for c in reversed(list(coefficients)):
                acc = self._batch_mul(acc, xu) ^ np.uint64(c)
            return acc.astype(np.int64)
        return np.array([self.horner(coefficients, int(x)) for x in xs.ravel()],
                        dtype=object).reshape(xs.shape)

    def scale(self, a: np.ndarray, c: int) -> np.ndarray:
        """Multiply every element of ``a`` by the constant ``c`` (n <= 32)."""
        a = np.asarray(a, dtype=np.int64)
        if c == 0:
            return np.zeros_like(a)
        if self.n <= 20:
            exp, log = _log_tables(self.n)
            return np.where(a != 0, exp[log[a] + log[c]], 0)
        return self._batch_mul(a.astype(np.uint64), np.full(a.shape, c, dtype=np.uint64)).astype(np.int64)

    def _batch_mul(self, a: np.ndarray, b: np.ndarray) -> np.ndarray:
        prod = np.zeros_like(a)
        one = np.uint64(1)
        for i in range(self.n):
            sel = ((b >> np.uint64(i)) & one).astype(bool)
            prod ^= np.where(sel, a << np.uint64(i), np.uint64(0))
        n = np.uint64(self.n)
        mask = np.uint64(self.mask)
        while True:
            hi = prod >> n
            if not hi.any():
                return prod
            prod = (prod & mask) ^ hi
            for t in self.taps:
                prod ^= hi << np.uint64(t)


@lru_cache(maxsize=None)
def field(n: int) -> GF2n:
    return GF2n(n)


@lru_cache(maxsize=8)
def _log_tables(n: int) -> tuple[np.ndarray, np.ndarray]:
    """(exp, log) tables of GF(2^n) for a primitive element; exp has length 2(2^n - 1)."""
    f = field(n)
    order = (1 << n) - 1
    if order == 1:
        return np.array([1, 1], dtype=np.int64), np.zeros(2, dtype=np.int64)
    factors = _prime_factors(order)
    g = 2
    while any(f.pow(g, order // p) == 1 for p in factors):
        g += 1
    exp = np.empty(2 * order, dtype=np.int64)
    cur = 1
    for i in range(order):
        exp[i] = cur
        cur = f.mul(cur, g)
    exp[order:] = exp[:order]
    log = np.zeros(1 << n, dtype=np.int64)
    log[exp[:order]] = np.arange(order)
    return exp, log


def _log_horner(n: int, coefficients: tuple[int, ...], xs: np.ndarray) -> np.ndarray:
    exp, log = _log_tables(n)
    nz = xs != 0
    lx = log[xs]
    acc = np.zeros(xs.shape, dtype=np.int64)
    for c in reversed(coefficients):
        live = nz & (acc != 0)
        prod = np.where(live, exp[log[acc] + lx], 0)
        acc = prod ^ c
    return acc
