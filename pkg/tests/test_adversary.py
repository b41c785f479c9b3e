import inspect
import math

import numpy as np
import pytest

from elastic_commit import bits as B
from elastic_commit.adversary import (AliceView, BindingAttackResult, CheatingAliceConfig, Strategy,
                                      binding_attack_exhaustive, binding_attack_sampled,
                                      cheating_session, collision_census, converse_draw,
                                      converse_sample, dishonest_bob_set, search_exhaustive)
from elastic_commit.capacity import ChannelFamily
from elastic_commit.channel import make_channel
from elastic_commit.errors import BudgetError, DomainError, RightsViolationError
from elastic_commit.infotheory import kappa
from elastic_commit.protocol import bob_test, derive_params, with_lengths
from elastic_commit.rng import substream

P16 = derive_params(16, 0.1, 0.2)


def session(params, i, s=0.1, c=None):
    c = B.zeros(params.m) if c is None else c
    return cheating_session(params, c, s, i, substream(1000, i))


# converse -----------------------------------------------------------------


def test_converse_s_delta_gives_z_equal_x():
    v = converse_draw(0.1, 0.2, 0.2, 10_000, substream(1))
    assert v.kappa_s == 0.0
    assert np.array_equal(v.z, v.x)


@pytest.mark.parametrize("s", [0.1, 0.15])
def test_converse_zy_crossover_is_delta(s):
    n = 10 ** 6
    v = converse_sample(derive_params(1024, 0.1, 0.2), s, substream(2), n_bits=n)
    assert abs(v.zy_crossover() - 0.2) <= 3 * math.sqrt(0.16 / n)
    # y really is BSC(s) of x
    assert abs(B.hamming(v.x, v.y) / n - s) <= 4 * math.sqrt(s * (1 - s) / n)
    assert v.kappa_s == pytest.approx(kappa(s, 0.2))


def test_converse_range():
    with pytest.raises(DomainError):
        converse_draw(0.1, 0.2, 0.05, 10, substream(1))


# cheating Alice -----------------------------------------------------------


def test_config_validation():
    with pytest.raises(DomainError):
        CheatingAliceConfig(0.3).check(P16)
    with pytest.raises(DomainError):
        CheatingAliceConfig(0.1, Strategy.ADAPTIVE_SCHEDULE, (0.1,) * 3).check(P16)
    with pytest.raises(DomainError):
        CheatingAliceConfig(0.1, Strategy.ADAPTIVE_SCHEDULE, (0.1,) * 15 + (0.3,)).check(P16)


def test_adaptive_schedule_session():
    p = derive_params(1024, 0.1, 0.2)
    sched = tuple([0.1] * 512 + [0.2] * 512)
    s = cheating_session(p, B.zeros(p.m), CheatingAliceConfig(0.1, Strategy.ADAPTIVE_SCHEDULE, sched),
                         3, substream(3))
    assert s.committed
    first = B.hamming(s.x[:512], s.y[:512]) / 512
    second = B.hamming(s.x[512:], s.y[512:]) / 512
    assert first < second


# binding attacks ----------------------------------------------------------


def test_full_length_hashes_never_succeed():
    p = with_lengths(P16, l1=16, l2=16)
    for i in range(10):
        r = binding_attack_exhaustive(session(p, i))
        assert not r.success
        assert r.search_size == 1


def test_vacuous_hashes_governed_by_list():
    p = with_lengths(P16, l1=0, l2=0)
    s = session(p, 1)
    r = binding_attack_exhaustive(s)
    assert r.search_size == 2 ** 16
    rows = B.all_vectors(16)
    d = np.count_nonzero(rows != s.y, axis=1)
    lo, hi = p.list_interval
    in_list = int(np.sum((d >= lo - 1e-9) & (d <= hi + 1e-9)))
    assert r.accepted == in_list
    assert r.success == (r.distinct_keys >= 2)
    assert r.success


def _oracle(s):
    """Brute force: every (c', x') Bob would accept, straight from bob_test."""
    p = s.params
    t = s.transcript
    vb = s.view_bob
    accepted = []
    for v in range(2 ** p.n):
        x2 = B.from_int(v, p.n)
        c2 = t.q ^ t.ext.evaluate(x2)
        if bob_test(c2, x2, vb).accepted:
            accepted.append((B.to_int(c2), v))
    return accepted


@pytest.mark.parametrize("l1,l2", [(None, None), (3, 1), (5, 2)])
def test_exhaustive_matches_brute_force(l1, l2):
    base = derive_params(12, 0.1, 0.2)
    p = with_lengths(base, l1=base.l1 if l1 is None else l1, l2=base.l2 if l2 is None else l2)
    for i in range(4):
        s = session(p, i)
        acc = _oracle(s)
        keys = {c for c, _ in acc}
        r = binding_attack_exhaustive(s)
        assert r.accepted == len(acc)
        assert r.distinct_keys == len(keys)
        assert r.success == (len(keys) >= 2)
        x_ok = any(v == B.to_int(s.x) for _, v in acc)
        anchored = binding_attack_exhaustive(s, anchored=True)
        assert anchored.success == (x_ok and any(c != B.to_int(s.c) for c, _ in acc))


def test_exhaustive_budget():
    p = derive_params(32, 0.1, 0.2)
    s = session(p, 0)
    with pytest.raises(BudgetError):
        binding_attack_exhaustive(s)


def test_openings_are_verified():
    p = with_lengths(P16, l1=4, l2=2)
    r = binding_attack_exhaustive(session(p, 2))
    assert isinstance(r, BindingAttackResult)
    assert r.success
    (c1, x1), (c2, x2) = r.openings
    assert not np.array_equal(c1, c2)
    assert set(r.to_dict()) >= {"success", "search_size", "openings"}


def test_weakened_positive_control_n16():
    p = with_lengths(P16, l1=4, l2=2)
    wins = sum(binding_attack_exhaustive(session(p, i)).success for i in range(40))
    assert wins / 40 > 0.5


def test_sampled_zero_kappa_finds_only_x():
    s = session(P16, 4, s=0.2)
    r = binding_attack_sampled(s, candidates=500, rng=substream(9))
    assert not r.success
    assert r.search_size == 1


def test_sampled_needs_budget_and_rng():
    s = session(P16, 4)
    with pytest.raises(DomainError):
        binding_attack_sampled(s, candidates=0, rng=substream(1))
    with pytest.raises(DomainError):
        binding_attack_sampled(s, candidates=10)


def test_sampled_weakened_n24_succeeds():
    p = with_lengths(derive_params(24, 0.1, 0.2), l1=4, l2=2)
    wins = sum(binding_attack_sampled(session(p, i), candidates=20_000, rng=substream(6, i)).success
               for i in range(10))
    assert wins >= 8


def test_s_gamma_maximises_list_reach():
    p = derive_params(24, 0.1, 0.2)
    grid = np.linspace(p.gamma, p.delta, 5)
    totals = np.zeros(grid.size)
    for i in range(6):
        for j, sv in enumerate(grid):
            s = session(p, i, s=float(sv))
            totals[j] += binding_attack_sampled(s, candidates=10_000, rng=substream(8, i, j)).distinct_in_list
    assert int(np.argmax(totals)) == 0


def test_shell_weight_profile():
    from elastic_commit.adversary import shell_candidates
    x = B.zeros(200)
    rows = shell_candidates(x, 0.125, 5000, substream(3))
    w = rows.sum(axis=1)
    assert abs(w.mean() - 25) < 4 * math.sqrt(200 * 0.125 * 0.875 / 5000)


# knowledge hygiene --------------------------------------------------------


def test_attack_search_never_sees_y():
    sig = inspect.signature(search_exhaustive)
    assert list(sig.parameters) == ["view"]
    assert "y" not in AliceView.__dataclass_fields__
    p = with_lengths(P16, l1=4, l2=2)
    s = session(p, 5)
    before = search_exhaustive(s.view_alice)
    s.y = s.y ^ 1
    assert np.array_equal(search_exhaustive(s.view_alice), before)


# census -------------------------------------------------------------------


def test_census_injective_first_hash():
    from elastic_commit.hashing import HashFamilySpec, PolynomialSeed
    p = with_lengths(P16, l1=16)
    s = session(p, 0)
    s.transcript.g1 = PolynomialSeed(HashFamilySpec(16, 16, 64), [0, 1] + [0] * 62)
    s.transcript.h1 = s.x.copy()
    c = collision_census(s)
    assert c.collisions == 1
    assert c.max_bucket == 1


def test_census_full_length_random_polynomial():
    # a random full-length polynomial is not injective: extra members collide w.p. 2^-n each
    p = with_lengths(P16, l1=16)
    extra, pairs = 0, 0
    for i in range(30):
        c = collision_census(session(p, i))
        extra += c.collisions - 1
        pairs += c.census_size - 1
    expect = pairs * 2.0 ** -16
    assert extra <= expect + 4 * math.sqrt(expect) + 1


def test_census_counts_and_histogram():
    s = session(P16, 6)
    c = collision_census(s)
    assert sum(k * v for k, v in c.histogram.items()) == c.census_size
    assert 1 <= c.collisions <= c.max_bucket <= 8 * 16 + 1
    rows = B.all_vectors(16)
    d = np.count_nonzero(rows != s.y, axis=1)
    lo, hi = P16.list_interval
    in_list = (d >= lo - 1e-9) & (d <= hi + 1e-9)
    assert c.census_size == int(in_list.sum()) + (0 if in_list[B.to_int(s.x)] else 1)


def test_census_sampled():
    p = derive_params(24, 0.1, 0.2)
    c = collision_census(session(p, 1), candidates=5000, rng=substream(2))
    assert c.collisions >= 1
    assert c.census_size >= 1


# dishonest Bob ------------------------------------------------------------


def test_dishonest_bob_rights():
    dishonest_bob_set(make_channel(ChannelFamily("ec", 0.2, 0.1), 1), 0.1)
    dishonest_bob_set(make_channel(ChannelFamily("unc", 0.2, 0.1), 1), 0.1)
    with pytest.raises(RightsViolationError):
        dishonest_bob_set(make_channel(ChannelFamily("rec", 0.2, 0.1), 1), 0.15)


def test_census_mean_matches_pairwise_collision_rate():
    # each of the other census members hits Alice's h1 w.p. exactly 2^-l1 (pairwise uniformity)
    extra, pairs = [], []
    for i in range(150):
        c = collision_census(session(P16, i))
        extra.append(c.collisions - 1)
        pairs.append(c.census_size - 1)
    expect = np.mean(pairs) * 2.0 ** -P16.l1
    slack = 4 * np.std(extra) / math.sqrt(len(extra))
    assert abs(np.mean(extra) - expect) <= slack
