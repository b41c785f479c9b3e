"""Universal hash families over bit strings.

Two constructions:

``toeplitz``
    ``h(x) = T x`` over GF(2) for an ``l x n`` Toeplitz matrix ``T`` given by
    ``n + l - 1`` seed bits. Pairs of distinct inputs collide with probability
    exactly ``2^-l``, which is what the leftover hash lemma and the
    second-round binding argument use. It is *not* jointly uniform (``h(0)``
    is always zero).

``polynomial``
    ``h(x) = trunc_l(P(x))`` for a uniformly random polynomial ``P`` of degree
    below ``xi`` over GF(2^n); the values at any ``xi`` distinct points are
    independent and uniform. The input vector is read as a field element
    MSB-first and the output keeps the ``l`` low-order coefficients.

For large ``n`` and ``xi`` (the first-round family uses ``xi = 4n``) a
polynomial seed is sampled lazily: the value at each newly queried point is a
fresh uniform field element, which is exactly the joint law of the values of
a random polynomial at up to ``xi`` distinct points. The coefficients are
drawn from their conditional distribution (interpolant plus a random multiple
of the vanishing polynomial) the first time they are needed.

Seed wire format (all integers big-endian)::

    tag      1 byte   1 = toeplitz, 2 = polynomial
    n        4 bytes  input bits
    l        4 bytes  output bits
    xi       4 bytes  polynomial only: number of coefficients
    payload  seed bits packed MSB-first, zero padded to a byte; for the
             polynomial family the coefficients c_0 .. c_{xi-1}, n bits each,
             each written MSB-first
"""

from __future__ import annotations

import struct
from dataclasses import dataclass

import numpy as np
from numpy.lib.stride_tricks import sliding_window_view
from scipy import stats

from . import bits as B
from .errors import DomainError
from .gf2 import field

TAG_TOEPLITZ = 1
TAG_POLYNOMIAL = 2

# Polynomial seeds over fields wider than this are sampled lazily.
LAZY_MIN_BITS = 64


@dataclass(frozen=True)
class HashFamilySpec:
    input_bits: int
    output_bits: int
    independence: int = 2

    def __post_init__(self):
        if self.input_bits < 1:
            raise DomainError("input_bits must be positive")
        if not 0 <= self.output_bits <= self.input_bits:
            raise DomainError(f"output_bits={self.output_bits} must lie in [0, {self.input_bits}]")
        if self.independence < 1:
            raise DomainError("independence must be at least 1")


class HashSeed:
    """A sampled member of a hash family."""

    spec: HashFamilySpec
    construction: str

    def evaluate(self, x: B.BitVector) -> B.BitVector:
        raise NotImplementedError

    def evaluate_many(self, rows: np.ndarray) -> np.ndarray:
        raise NotImplementedError

    def to_bytes(self) -> bytes:
        raise NotImplementedError

    def _check(self, x) -> B.BitVector:
        return B.as_bits(x, self.spec.input_bits)


class ToeplitzSeed(HashSeed):
    construction = "toeplitz"

    def __init__(self, spec: HashFamilySpec, seed_bits):
        need = spec.input_bits + spec.output_bits - 1 if spec.output_bits else 0
        self.spec = spec
        self.bits = B.as_bits(seed_bits, need)
        n, l = spec.input_bits, spec.output_bits
        if l:
            # row i = bits[i + n - 1], ..., bits[i]
            self._matrix = sliding_window_view(self.bits, n)[:, ::-1].astype(np.float32)
        else:
            self._matrix = np.zeros((0, n), dtype=np.float32)

    @property
    def matrix(self) -> np.ndarray:
        return self._matrix.astype(np.uint8)

    def evaluate(self, x) -> B.BitVector:
        x = self._check(x)
        return (self._matrix @ x.astype(np.float32)).astype(np.int64).astype(np.uint8) & 1

    def evaluate_many(self, rows: np.ndarray) -> np.ndarray:
        rows = np.asarray(rows, dtype=np.uint8)
        prod = rows.astype(np.float32) @ self._matrix.T
        return (prod.astype(np.int64) & 1).astype(np.uint8)

    def to_bytes(self) -> bytes:
        head = struct.pack(">BII", TAG_TOEPLITZ, self.spec.input_bits, self.spec.output_bits)
        return head + np.packbits(self.bits).tobytes()

    def __eq__(self, other):
        return isinstance(other, ToeplitzSeed) and self.spec == other.spec and np.array_equal(self.bits, other.bits)

    def __hash__(self):
        return hash((self.spec, self.bits.tobytes()))


class PolynomialSeed(HashSeed):
    construction = "polynomial"

    def __init__(self, spec: HashFamilySpec, coefficients):
        self.spec = spec
        self.field = field(spec.input_bits)
        self.coefficients = tuple(int(c) for c in coefficients)
        if len(self.coefficients) != spec.independence:
            raise DomainError(f"expected {spec.independence} coefficients, got {len(self.coefficients)}")
        if any(c < 0 or c >> spec.input_bits for c in self.coefficients):
            raise DomainError("coefficient outside the field")
        self._out_mask = (1 << spec.output_bits) - 1

    def value_at(self, point: int) -> int:
        """Untruncated field value of the polynomial at ``point``."""
        return self.field.horner(self.coefficients, point)

    def evaluate(self, x) -> B.BitVector:
        x = self._check(x)
        return B.from_int(self.value_at(B.to_int(x)) & self._out_mask, self.spec.output_bits)

    def evaluate_many(self, rows: np.ndarray) -> np.ndarray:
        rows = np.asarray(rows, dtype=np.uint8)
        n, l = self.spec.input_bits, self.spec.output_bits
        if n > 32:
            return np.array([self.evaluate(r) for r in rows], dtype=np.uint8).reshape(len(rows), l)
        vals = self.field.batch_horner(self.coefficients, B.rows_to_ints(rows).astype(np.int64))
        shifts = np.arange(l - 1, -1, -1, dtype=np.int64)
        return ((vals[:, None] >> shifts) & 1).astype(np.uint8)

    def to_bytes(self) -> bytes:
        n = self.spec.input_bits
        head = struct.pack(">BIII", TAG_POLYNOMIAL, n, self.spec.output_bits, self.spec.independence)
        payload = np.concatenate([B.from_int(c, n) for c in self.coefficients])
        return head + np.packbits(payload).tobytes()

    def __eq__(self, other):
        return (isinstance(other, PolynomialSeed) and self.spec == other.spec
                and self.coefficients == other.coefficients)

    def __hash__(self):
        return hash((self.spec, self.coefficients))


class LazyPolynomialSeed(HashSeed):
    """Polynomial seed whose coefficients are drawn only when required.

    The family is ``xi``-wise independent with uniform marginals, so the
    values at up to ``xi`` distinct points are exactly i.i.d. uniform: they
    come from ``rng`` in query order. Past ``xi`` distinct points, or on
    serialisation, the coefficients are sampled conditionally on the answers
    and evaluation proceeds eagerly.
    """

    construction = "polynomial"

    def __init__(self, spec: HashFamilySpec, rng: np.random.Generator):
        self.spec = spec
        self.field = field(spec.input_bits)
        self._rng = rng
        self._answers: dict[int, int] = {}
        self._eager: PolynomialSeed | None = None
        self._out_mask = (1 << spec.output_bits) - 1

    @property
    def materialized(self) -> bool:
        return self._eager is not None

    def _uniform_element(self) -> int:
        n = self.spec.input_bits
        raw = self._rng.bytes((n + 7) // 8)
        return int.from_bytes(raw, "big") & ((1 << n) - 1)

    def materialize(self) -> PolynomialSeed:
        if self._eager is None:
            f = self.field
            xi = self.spec.independence
            pts = list(self._answers)
            vals = [self._answers[p] for p in pts]
            if pts:
                base = f.interpolate(pts, vals)
            else:
                base = [0]
            free = xi - len(pts)
            coeffs = base + [0] * (xi - len(base))
            if free > 0:
                vanish = [1]
                for p in pts:
                    vanish = f.poly_times_linear(vanish, p)
                q = [self._uniform_element() for _ in range(free)]
                for i, qi in enumerate(q):
                    if qi == 0:
                        continue
                    for j, vj in enumerate(vanish):
                        if vj:
                            coeffs[i + j] ^= f.mul(qi, vj)
            self._eager = PolynomialSeed(self.spec, coeffs[:xi])
        return self._eager

    def value_at(self, point: int) -> int:
        if self._eager is not None:
            return self._eager.value_at(point)
        if point in self._answers:
            return self._answers[point]
        if len(self._answers) >= self.spec.independence:
            return self.materialize().value_at(point)
        v = self._uniform_element()
        self._answers[point] = v
        return v

    def evaluate(self, x) -> B.BitVector:
        x = self._check(x)
        return B.from_int(self.value_at(B.to_int(x)) & self._out_mask, self.spec.output_bits)

    def evaluate_many(self, rows: np.ndarray) -> np.ndarray:
        rows = np.asarray(rows, dtype=np.uint8)
        return np.array([self.evaluate(r) for r in rows], dtype=np.uint8).reshape(len(rows), self.spec.output_bits)

    def to_bytes(self) -> bytes:
        return self.materialize().to_bytes()


def sample_seed(spec: HashFamilySpec, rng: np.random.Generator, construction: str | None = None,
                lazy: bool | None = None) -> HashSeed:
    """Draw a uniformly random member of the family described by ``spec``.

    ``construction`` defaults to ``"toeplitz"`` for ``independence == 2`` and
    ``"polynomial"`` otherwise. ``lazy`` defaults to True for polynomial
    seeds over fields wider than :data:`LAZY_MIN_BITS`.
    """
    if construction is None:
        construction = "toeplitz" if spec.independence == 2 else "polynomial"
    if construction == "toeplitz":
        if spec.independence > 2:
            raise DomainError("the Toeplitz family only covers independence 2")
        size = spec.input_bits + spec.output_bits - 1 if spec.output_bits else 0
        return ToeplitzSeed(spec, B.random_bits(rng, size))
    if construction != "polynomial":
        raise DomainError(f"unknown construction {construction!r}")
    if lazy is None:
        lazy = spec.input_bits > LAZY_MIN_BITS
    if lazy:
        return LazyPolynomialSeed(spec, np.random.Generator(np.random.Philox(rng.integers(0, 2**63))))
    n = spec.input_bits
    nbytes = (n + 7) // 8
    coeffs = [int.from_bytes(rng.bytes(nbytes), "big") & ((1 << n) - 1) for _ in range(spec.independence)]
    return PolynomialSeed(spec, coeffs)


def eval_hash(seed: HashSeed, x) -> B.BitVector:
    return seed.evaluate(x)


def seed_from_bytes(data: bytes) -> HashSeed:
    tag = data[0]
    if tag == TAG_TOEPLITZ:
        _, n, l = struct.unpack(">BII", data[:9])
        spec = HashFamilySpec(n, l, 2)
        size = n + l - 1 if l else 0
        raw = np.unpackbits(np.frombuffer(data[9:], dtype=np.uint8))
        if raw.size < size or raw[size:].any() or raw.size - size >= 8:
            raise DomainError("malformed Toeplitz seed payload")
        return ToeplitzSeed(spec, raw[:size])
    if tag == TAG_POLYNOMIAL:
        _, n, l, xi = struct.unpack(">BIII", data[:13])
        spec = HashFamilySpec(n, l, xi)
        raw = np.unpackbits(np.frombuffer(data[13:], dtype=np.uint8))
        size = n * xi
        if raw.size < size or raw[size:].any() or raw.size - size >= 8:
            raise DomainError("malformed polynomial seed payload")
        coeffs = [B.to_int(raw[i * n:(i + 1) * n]) for i in range(xi)]
        return PolynomialSeed(spec, coeffs)
    raise DomainError(f"unknown seed tag {tag}")


# exact enumeration and statistical checks --------------------------------


def distinct_inputs(n: int, count: int, avoid_zero: bool = True) -> list[int]:
    """``count`` distinct n-bit inputs, starting at 1 (or 0 if space is tight)."""
    if count > (1 << n):
        raise DomainError(f"only {1 << n} distinct {n}-bit inputs, {count} requested")
    start = 1 if avoid_zero and count <= (1 << n) - 1 else 0
    return list(range(start, start + count))


def toeplitz_collision_table(spec: HashFamilySpec) -> np.ndarray:
    """Exact collision probability of every input difference under full seed enumeration.

    Returns an array indexed by the non-zero difference ``x1 ^ x2`` (index 0
    unused), computed by enumerating all ``2^(n + l - 1)`` seeds.
    """
    n, l = spec.input_bits, spec.output_bits
    size = n + l - 1
    if size > 24:
        raise DomainError("seed space too large to enumerate")
    seeds = B.all_vectors(size)
    windows = sliding_window_view(seeds, n, axis=1)[:, :, ::-1]  # (2^size, l, n)
    diffs = B.all_vectors(n).astype(np.int32)
    out = np.zeros(1 << n)
    for d in range(1, 1 << n):
        img = (windows.astype(np.int32) @ diffs[d]) & 1
        out[d] = np.mean(~img.any(axis=1))
    return out


def polynomial_joint_counts(spec: HashFamilySpec, inputs: list[int]) -> np.ndarray:
    """Histogram of (h(x_1), ..., h(x_k)) over every polynomial seed.

    The output has one cell per joint value (``2^(l k)`` cells); feasible only
    for tiny fields (``n * xi <= 24``).
    """
    n, l, xi = spec.input_bits, spec.output_bits, spec.independence
    if n * xi > 24:
        raise DomainError("seed space too large to enumerate")
    f = field(n)
    q = 1 << n
    elems = np.arange(q)
    # term[i][a, j] = a * x_j^i, truncated later
    acc = np.zeros((1, len(inputs)), dtype=np.int64)
    for i in range(xi):
        powers = [f.pow(x, i) for x in inputs]
        term = np.array([[f.mul(int(a), p) for p in powers] for a in elems], dtype=np.int64)
        acc = (acc[:, None, :] ^ term[None, :, :]).reshape(-1, len(inputs))
    mask = (1 << l) - 1
    trunc = acc & mask
    code = np.zeros(trunc.shape[0], dtype=np.int64)
    for j in range(len(inputs)):
        code = (code << l) | trunc[:, j]
    return np.bincount(code, minlength=1 << (l * len(inputs)))


@dataclass
class UniversalityReport:
    spec: HashFamilySpec
    construction: str
    inputs: list[int]
    samples: int
    counts: np.ndarray
    chi2: float
    dof: int
    p_value: float

    def uniform_at(self, level: float = 0.01) -> bool:
        return self.p_value > level


def _sampled_outputs(spec: HashFamilySpec, construction: str, inputs: list[int], count: int,
                     rng: np.random.Generator) -> np.ndarray:
    """Integer hash values, shape (count, len(inputs)), for ``count`` fresh seeds."""
    n, l, xi = spec.input_bits, spec.output_bits, spec.independence
    mask = (1 << l) - 1
    if construction == "toeplitz":
        size = n + l - 1 if l else 0
        seeds = rng.integers(0, 2, size=(count, size), dtype=np.uint8)
        out = np.zeros((count, len(inputs)), dtype=np.int64)
        if not l:
            return out
        windows = sliding_window_view(seeds, n, axis=1)[:, :, ::-1]  # (count, l, n)
        for j, x in enumerate(inputs):
            xv = B.from_int(x, n).astype(np.int64)
            img = (windows.astype(np.int64) @ xv) & 1  # (count, l)
            out[:, j] = B.rows_to_ints(img.astype(np.uint8))
        return out
    if n > 20:
        rows = np.array([B.from_int(x, n) for x in inputs])
        vals = np.empty((count, len(inputs)), dtype=np.int64)
        for i in range(count):
            seed = sample_seed(spec, rng, construction="polynomial", lazy=False)
            vals[i] = B.rows_to_ints(seed.evaluate_many(rows))
        return vals
    f = field(n)
    coeffs = rng.integers(0, 1 << n, size=(count, xi), dtype=np.int64)
    out = np.zeros((count, len(inputs)), dtype=np.int64)
    for j, x in enumerate(inputs):
        acc = np.zeros(count, dtype=np.int64)
        for i in range(xi):
            acc ^= f.scale(coeffs[:, i], f.pow(x, i))
        out[:, j] = acc & mask
    return out


def universality_test(spec: HashFamilySpec, samples: int, rng: np.random.Generator,
                      construction: str = "polynomial", inputs: list[int] | None = None,
                      chunk: int = 100_000) -> UniversalityReport:
    """Chi-square test of joint uniformity of ``xi`` hash values over sampled seeds.

    Defaults to the polynomial construction: the Toeplitz family is only
    collision-universal and fails this test by design.
    """
    xi = spec.independence
    if inputs is None:
        inputs = distinct_inputs(spec.input_bits, xi, avoid_zero=construction == "toeplitz")
    if len(set(inputs)) != len(inputs):
        raise DomainError("inputs must be distinct")
    if construction not in ("toeplitz", "polynomial"):
        raise DomainError(f"unknown construction {construction!r}")
    l = spec.output_bits
    cells = 1 << (l * len(inputs))
    counts = np.zeros(cells, dtype=np.int64)
    done = 0
    while done < samples:
        k = min(chunk, samples - done)
        vals = _sampled_outputs(spec, construction, inputs, k, rng)
        code = np.zeros(k, dtype=np.int64)
        for j in range(len(inputs)):
            code = (code << l) | vals[:, j]
        counts += np.bincount(code, minlength=cells)
        done += k
    expected = samples / cells
    chi2 = float(((counts - expected) ** 2 / expected).sum())
    dof = cells - 1
    return UniversalityReport(spec, construction, list(inputs), samples, counts, chi2, dof,
                              float(stats.chi2.sf(chi2, dof)) if dof else 1.0)
