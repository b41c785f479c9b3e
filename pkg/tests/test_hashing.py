import itertools

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from elastic_commit import bits as B
from elastic_commit import hashing as Hs
from elastic_commit.errors import DomainError
from elastic_commit.gf2 import MODULUS_TAPS, field, is_irreducible, modulus_taps
from elastic_commit.rng import substream


# field arithmetic ---------------------------------------------------------


def _naive_irreducible(n, taps):
    m = (1 << n) | 1
    for t in taps:
        m |= 1 << t
    for d in range(2, 1 << (n // 2 + 1)):
        if d.bit_length() - 1 > n // 2:
            break
        a = m
        while a and a.bit_length() >= d.bit_length():
            a ^= d << (a.bit_length() - d.bit_length())
        if a == 0:
            return False
    return True


@pytest.mark.parametrize("n", range(2, 13))
def test_modulus_irreducible_brute_force(n):
    assert _naive_irreducible(n, MODULUS_TAPS[n])


def test_modulus_table_is_lowest_weight_first_found():
    for n in (5, 8, 13, 16, 32, 64, 128):
        assert is_irreducible(n, modulus_taps(n))
    # the rule: lowest trinomial if any, else lexicographically smallest pentanomial
    assert MODULUS_TAPS[8] == (4, 3, 1)
    assert not any(is_irreducible(8, (k,)) for k in range(1, 8))


@settings(max_examples=60)
@given(st.sampled_from([3, 8, 17, 64, 128]), st.data())
def test_field_axioms(n, data):
    f = field(n)
    a, b, c = (data.draw(st.integers(0, (1 << n) - 1)) for _ in range(3))
    assert f.mul(a, b) == f.mul(b, a)
    assert f.mul(a, f.mul(b, c)) == f.mul(f.mul(a, b), c)
    assert f.mul(a, b ^ c) == f.mul(a, b) ^ f.mul(a, c)
    if a:
        assert f.mul(a, f.inv(a)) == 1


def test_interpolation_round_trip():
    f = field(32)
    rng = np.random.default_rng(0)
    pts = [int(v) for v in rng.choice(2 ** 32, 9, replace=False)]
    vals = [int(v) for v in rng.integers(0, 2 ** 32, 9)]
    poly = f.interpolate(pts, vals)
    assert [f.horner(poly, p) for p in pts] == vals


@pytest.mark.parametrize("n", [6, 20, 24])
def test_batch_horner_matches_scalar(n):
    f = field(n)
    rng = np.random.default_rng(n)
    coeffs = [int(v) for v in rng.integers(0, 1 << n, 7)]
    xs = rng.integers(0, 1 << n, 200)
    got = f.batch_horner(coeffs, xs)
    assert [int(g) for g in got] == [f.horner(coeffs, int(x)) for x in xs]


# families -----------------------------------------------------------------


def test_toeplitz_seed_size():
    seed = Hs.sample_seed(Hs.HashFamilySpec(8, 4, 2), substream(1))
    assert seed.construction == "toeplitz"
    assert seed.bits.size == 11


def test_spec_validation():
    with pytest.raises(DomainError):
        Hs.HashFamilySpec(4, 5)
    with pytest.raises(DomainError):
        Hs.HashFamilySpec(0, 0)
    with pytest.raises(DomainError):
        Hs.sample_seed(Hs.HashFamilySpec(4, 2, 3), substream(1), construction="toeplitz")


def test_zero_and_identity_polynomials():
    spec = Hs.HashFamilySpec(8, 8, 2)
    zero = Hs.PolynomialSeed(spec, [0, 0])
    ident = Hs.PolynomialSeed(spec, [0, 1])
    for v in range(256):
        x = B.from_int(v, 8)
        assert not zero.evaluate(x).any()
        assert np.array_equal(ident.evaluate(x), x)


def test_truncation_keeps_low_bits():
    spec = Hs.HashFamilySpec(8, 3, 2)
    ident = Hs.PolynomialSeed(spec, [0, 1])
    assert B.to_int(ident.evaluate(B.from_int(0b10110101, 8))) == 0b101


def test_eval_length_mismatch():
    seed = Hs.sample_seed(Hs.HashFamilySpec(8, 4, 2), substream(1))
    with pytest.raises(DomainError):
        Hs.eval_hash(seed, B.zeros(7))


@pytest.mark.parametrize("spec,construction", [
    (Hs.HashFamilySpec(8, 4, 2), "toeplitz"),
    (Hs.HashFamilySpec(8, 4, 2), "polynomial"),
    (Hs.HashFamilySpec(13, 5, 6), "polynomial"),
    (Hs.HashFamilySpec(40, 0, 2), "toeplitz"),
])
def test_wire_round_trip(spec, construction):
    seed = Hs.sample_seed(spec, substream(4), construction=construction)
    data = seed.to_bytes()
    assert data[0] == (Hs.TAG_TOEPLITZ if construction == "toeplitz" else Hs.TAG_POLYNOMIAL)
    assert int.from_bytes(data[1:5], "big") == spec.input_bits
    assert int.from_bytes(data[5:9], "big") == spec.output_bits
    back = Hs.seed_from_bytes(data)
    assert back == seed
    assert back.to_bytes() == data


def test_wire_rejects_garbage():
    data = bytearray(Hs.sample_seed(Hs.HashFamilySpec(8, 4, 2), substream(4)).to_bytes())
    with pytest.raises(DomainError):
        Hs.seed_from_bytes(bytes([9]) + bytes(data[1:]))
    with pytest.raises(DomainError):
        Hs.seed_from_bytes(bytes(data) + b"\x00")


def test_batch_matches_single():
    rows = B.all_vectors(8)
    for construction in ("toeplitz", "polynomial"):
        seed = Hs.sample_seed(Hs.HashFamilySpec(8, 5, 2), substream(2), construction=construction)
        assert np.array_equal(seed.evaluate_many(rows), np.array([seed.evaluate(r) for r in rows]))


def test_deterministic():
    seed = Hs.sample_seed(Hs.HashFamilySpec(16, 6, 8), substream(3))
    x = B.random_bits(substream(5), 16)
    assert np.array_equal(seed.evaluate(x), seed.evaluate(x.copy()))


def test_distinct_streams_give_distinct_seeds():
    spec = Hs.HashFamilySpec(8, 4, 4)
    seeds = [Hs.sample_seed(spec, substream(10, i)) for i in range(2000)]
    # P(two seeds equal) = 2^-32 per pair; any repeat here would signal shared streams
    assert len({s.coefficients for s in seeds}) == len(seeds)


def test_lazy_seed_is_consistent_after_materialising():
    spec = Hs.HashFamilySpec(128, 40, 512)
    seed = Hs.sample_seed(spec, substream(6))
    assert isinstance(seed, Hs.LazyPolynomialSeed)
    xs = [B.random_bits(substream(7, i), 128) for i in range(20)]
    early = [seed.evaluate(x) for x in xs]
    assert not seed.materialized
    data = seed.to_bytes()  # serialising forces the coefficients
    assert seed.materialized
    eager = Hs.seed_from_bytes(data)
    for x, a in zip(xs, early):
        assert np.array_equal(seed.evaluate(x), a)
        assert np.array_equal(eager.evaluate(x), a)


def test_lazy_seed_materialises_past_independence():
    spec = Hs.HashFamilySpec(80, 16, 4)
    seed = Hs.sample_seed(spec, substream(8))
    pts = [B.random_bits(substream(9, i), 80) for i in range(7)]
    first = [seed.evaluate(x) for x in pts[:4]]
    assert not seed.materialized
    seed.evaluate(pts[4])
    assert seed.materialized
    for x, a in zip(pts, first):
        assert np.array_equal(seed.evaluate(x), a)


def test_lazy_values_have_uniform_marginal():
    # the lazy answer at a point is a fresh uniform element: check one output bit over many seeds
    spec = Hs.HashFamilySpec(96, 8, 384)
    x = B.random_bits(substream(1), 96)
    vals = np.array([B.to_int(Hs.sample_seed(spec, substream(20, i)).evaluate(x)) for i in range(4000)])
    counts = np.bincount(vals, minlength=256)
    from scipy import stats
    assert stats.chisquare(counts).pvalue > 1e-4


def test_lazy_materialisation_is_conditionally_uniform():
    # at n=4, xi=3: one lazy query then materialise; a uniform answer followed by a
    # uniform completion through that point must give a uniform coefficient triple
    spec = Hs.HashFamilySpec(4, 4, 3)
    f = field(4)
    counts = np.zeros(16 ** 3, dtype=int)
    for i in range(40000):
        seed = Hs.LazyPolynomialSeed(spec, substream(30, i))
        v = seed.value_at(5)
        poly = seed.materialize()
        assert f.horner(poly.coefficients, 5) == v
        a, b, c = poly.coefficients
        counts[(a << 8) | (b << 4) | c] += 1
    from scipy import stats
    assert stats.chisquare(counts).pvalue > 1e-4


# universality -------------------------------------------------------------


def test_toeplitz_pairwise_collision_exact():
    table = Hs.toeplitz_collision_table(Hs.HashFamilySpec(8, 4, 2))
    assert np.all(table[1:] == 2.0 ** -4)


def test_toeplitz_collision_oracle_by_direct_enumeration():
    # independent oracle: build every Toeplitz matrix explicitly and compare pairs
    n, l = 4, 2
    spec = Hs.HashFamilySpec(n, l, 2)
    hits = np.zeros((1 << n, 1 << n))
    for bits in itertools.product((0, 1), repeat=n + l - 1):
        seed = Hs.ToeplitzSeed(spec, bits)
        T = np.array([[bits[i + n - 1 - j] for j in range(n)] for i in range(l)])
        assert np.array_equal(seed.matrix, T)
        out = [tuple(T @ B.from_int(v, n) % 2) for v in range(1 << n)]
        for a in range(1 << n):
            for b in range(1 << n):
                hits[a, b] += out[a] == out[b]
    hits /= 2 ** (n + l - 1)
    off = hits[~np.eye(1 << n, dtype=bool)]
    assert np.all(off == 2.0 ** -l)


def test_polynomial_joint_uniformity_exact():
    spec = Hs.HashFamilySpec(4, 2, 4)
    for pts in ([0, 1, 2, 3], [1, 5, 9, 15], [12, 13, 14, 15]):
        counts = Hs.polynomial_joint_counts(spec, pts)
        assert counts.size == 2 ** 8
        assert np.all(counts == counts[0])


def test_toeplitz_is_not_jointly_uniform():
    # documents why the joint-uniformity checks use the polynomial family
    spec = Hs.HashFamilySpec(4, 2, 2)
    rep = Hs.universality_test(spec, 50_000, substream(1), construction="toeplitz", inputs=[1, 2])
    assert rep.p_value < 1e-6


def test_degenerate_l1_n1_exact():
    spec = Hs.HashFamilySpec(1, 1, 2)
    counts = Hs.polynomial_joint_counts(spec, [0, 1])
    assert list(counts) == [1, 1, 1, 1]


def test_universality_chi_square():
    rep = Hs.universality_test(Hs.HashFamilySpec(4, 2, 2), 10 ** 6, substream(2))
    assert rep.uniform_at(0.01)
    assert rep.dof == 15
    marginal = Hs.universality_test(Hs.HashFamilySpec(4, 2, 1), 10 ** 5, substream(3))
    assert marginal.uniform_at(0.01)


def test_universality_needs_enough_inputs():
    with pytest.raises(DomainError):
        Hs.universality_test(Hs.HashFamilySpec(2, 1, 5), 10, substream(1))


def test_empirical_collision_rate_n8_l4():
    rows = B.all_vectors(8)
    rates = []
    for i in range(300):
        seed = Hs.sample_seed(Hs.HashFamilySpec(8, 4, 2), substream(40, i))
        buckets = np.bincount(B.rows_to_ints(seed.evaluate_many(rows)).astype(int), minlength=16)
        rates.append((buckets * (buckets - 1)).sum() / (256 * 255))
    assert np.mean(rates) == pytest.approx(2 ** -4, abs=3 * np.std(rates) / np.sqrt(300) + 1e-3)
