"""Acceptance gate: one test and one PASS/FAIL line per criterion.

Each test prints ``CRITERION k: PASS|FAIL | details`` to the terminal (not
captured) and then asserts the verdict, so a failing criterion shows up both
in the printed gate and in the pytest result.
"""

import itertools
import math
import os
import time

import mpmath as mp
import numpy as np
import pytest

from elastic_commit import capacity as cap
from elastic_commit import hashing as Hs
from elastic_commit.estimator import (TrialPlan, estimate_binding, estimate_concealment_exact,
                                      estimate_soundness, estimate_z_channel, view_key_distance)
from elastic_commit.infotheory import binding_bound_second_round, expected_collision_bound
from elastic_commit.protocol import derive_params, soundness_bound, with_lengths
from elastic_commit.rng import substream

from oracles import full_joint_distance, honest

SEED = 20240601
WORKERS = os.cpu_count() or 1


@pytest.fixture
def verdict(capsys):
    def emit(num, ok, detail):
        with capsys.disabled():
            print(f"\nCRITERION {num}: {'PASS' if ok else 'FAIL'} | {detail}")
        assert ok, detail
    return emit


def _H(p):
    p = mp.mpf(p)
    return -p * mp.log(p, 2) - (1 - p) * mp.log(1 - p, 2)


def _grid():
    # 200 x 200 interior points: delta in (0, 1/2), gamma in (0, delta)
    for i in range(200):
        d = 0.5 * (i + 0.5) / 200
        for j in range(200):
            yield d * (j + 0.5) / 200, d


def test_criterion_01_rec_capacity(verdict):
    mp.mp.dps = 50
    oracle = _H(mp.mpf("0.2")) - _H(mp.mpf(1) / 8)
    t0 = time.perf_counter()
    value = cap.capacity_rec(0.1, 0.2).value
    elapsed = time.perf_counter() - t0
    err = abs(value - float(oracle))
    verdict(1, err <= 1e-12 and elapsed < 1e-3,
            f"C_REC(0.1,0.2)={value:.15f} |err|={err:.2e} runtime={elapsed * 1e3:.3f} ms")


def test_criterion_02_strict_ordering(verdict):
    t0 = time.perf_counter()
    bad = 0
    for g, d in _grid():
        ec = cap.capacity_ec(g, d).value
        rec = cap.capacity_rec(g, d).value
        unc = cap.capacity_unc(g, d).value
        bad += not (ec > rec > unc)
    elapsed = time.perf_counter() - t0
    verdict(2, bad == 0 and elapsed < 1.0,
            f"EC>REC>UNC violations on 200x200 grid: {bad}; runtime={elapsed:.3f} s")


def test_criterion_03_unc_threshold(verdict):
    mismatch = 0
    for g, d in _grid():
        zero = cap.capacity_unc(g, d).value == 0.0
        mismatch += zero != (d >= 2 * g * (1 - g))
    worst = 0.0
    for d in np.linspace(0.0005, 0.4995, 1000):
        gs = cap.gamma_star(float(d))
        worst = max(worst, abs(2 * gs * (1 - gs) - d))
    verdict(3, mismatch == 0 and worst <= 1e-12,
            f"threshold mismatches: {mismatch}; max |2g*(1-g*)-delta| = {worst:.2e}")


def test_criterion_04_gap(verdict):
    notes = []
    ok = True
    for d in (0.1, 0.2, 0.3, 0.4):
        grid = cap.interior_grid(d, 4000)
        v = np.array([cap.capacity_gap(float(g), d) for g in grid])
        positive = bool((v > 0).all())
        concave = float(np.diff(v, 2).max()) <= 1e-9
        step = grid[1] - grid[0]
        off = abs(grid[int(np.argmax(v))] - cap.gamma_star(d))
        ok &= positive and concave and off <= step
        notes.append(f"d={d}: argmax off {off:.1e} (step {step:.1e})")
    verdict(4, ok, "; ".join(notes))


def test_criterion_05_z_channel(verdict):
    t0 = time.perf_counter()
    zs = []
    ok = True
    for j, s in enumerate((0.10, 0.125, 0.15, 0.175, 0.20)):
        r = estimate_z_channel(s, 10 ** 6, 1, substream(SEED, 5, j), gamma=0.1, delta=0.2)
        ok &= abs(r.point_estimate - 0.2) <= 3 * math.sqrt(0.16 / 10 ** 6)
        zs.append(f"{r.details['z_score']:+.2f}")
    elapsed = time.perf_counter() - t0
    verdict(5, ok and elapsed < 30, f"z-scores {', '.join(zs)}; runtime={elapsed:.2f} s")


def test_criterion_06_soundness(verdict):
    p = derive_params(1024, 0.1, 0.2, alpha1=0.06)
    t0 = time.perf_counter()
    r = estimate_soundness(TrialPlan(10_000, SEED, p), workers=WORKERS)
    elapsed = time.perf_counter() - t0
    bound = soundness_bound(p)
    ok = all(part.ci_low <= bound for part in r.breakdown) and elapsed < 120
    rates = ", ".join(f"{b.details['c_mode']}={b.point_estimate:.5f}" for b in r.breakdown)
    verdict(6, ok, f"rejection rates {rates} vs bound {bound:.5f}; runtime={elapsed:.1f} s")


def test_criterion_07_universality(verdict):
    table = Hs.toeplitz_collision_table(Hs.HashFamilySpec(8, 4, 2))
    toeplitz_ok = bool(np.all(table[1:] == 2.0 ** -4))
    spec = Hs.HashFamilySpec(4, 2, 4)
    poly_ok = True
    subsets = 0
    for pts in itertools.combinations(range(16), 4):
        counts = Hs.polynomial_joint_counts(spec, list(pts))
        poly_ok &= bool(np.all(counts == counts[0]))
        subsets += 1
    verdict(7, toeplitz_ok and poly_ok,
            f"Toeplitz n=8 l=4 collision probabilities all 2^-4: {toeplitz_ok}; "
            f"polynomial xi=4 joint-uniform on all {subsets} input 4-sets: {poly_ok}")


def test_criterion_08_concealment(verdict):
    p = with_lengths(derive_params(16, 0.1, 0.2), m=1)
    t0 = time.perf_counter()
    r = estimate_concealment_exact(TrialPlan(200, SEED, p), workers=WORKERS)
    small = with_lengths(derive_params(10, 0.1, 0.2), m=1)
    worst = 0.0
    for seed in range(8):
        s = honest(small, SEED + seed)
        worst = max(worst, abs(view_key_distance(s).distance - full_joint_distance(s)))
    elapsed = time.perf_counter() - t0
    ok = r.point_estimate < r.comparison_bound and worst <= 1e-12 and elapsed < 300
    verdict(8, ok,
            f"mean SD {r.point_estimate:.4f} (95% CI [{r.ci_low:.4f}, {r.ci_high:.4f}]) vs mean "
            f"leftover-hash bound {r.comparison_bound:.4f}; n=10 oracle |diff| {worst:.1e}; "
            f"runtime={elapsed:.1f} s")


def test_criterion_09_binding(verdict):
    p = derive_params(16, 0.1, 0.2)
    t0 = time.perf_counter()
    main = estimate_binding(TrialPlan(1000, SEED, p, "cheating_alice", p.gamma), workers=WORKERS)
    anchored = estimate_binding(TrialPlan(1000, SEED, p, "cheating_alice", p.gamma), anchored=True,
                                census=False, workers=WORKERS)
    weak = with_lengths(p, l1=4, l2=2)
    control = estimate_binding(TrialPlan(1000, SEED + 1, weak, "cheating_alice", p.gamma), census=False,
                               workers=WORKERS)
    elapsed = time.perf_counter() - t0
    det = main.breakdown[0].details
    eta = p.beta1 / 2
    census_cap = expected_collision_bound(p.n, p.beta1, eta) * det["census_mean_size"]
    zero_ok = det["count"] == 0
    control_ok = control.point_estimate > 0.5
    census_ok = det["census_mean_collisions"] <= census_cap
    bucket_ok = det["census_runs_within_8n_plus_1"] >= 0.99
    ok = zero_ok and control_ok and census_ok and bucket_ok and elapsed < 600
    verdict(9, ok,
            f"double openings {det['count']}/1000 (need 0; anchored {anchored.breakdown[0].details['count']}/1000); "
            f"weak l1=4,l2=2 success {control.point_estimate:.3f} (need >0.5); census mean I "
            f"{det['census_mean_collisions']:.2f} <= {census_cap:.1f}: {census_ok}; max I <= 8n+1 in "
            f"{det['census_runs_within_8n_plus_1']:.3f} of runs; runtime={elapsed:.1f} s")


def test_criterion_10_spot_checks_in_n(verdict):
    ns = (256, 1024, 4096)
    sound, bind, sbound, bbound = [], [], [], []
    for n in ns:
        p = derive_params(n, 0.1, 0.2)
        sound.append(estimate_soundness(TrialPlan(2000, SEED, p), c_modes=("random",),
                                        workers=WORKERS).point_estimate)
        bind.append(estimate_binding(TrialPlan(50, SEED, p, "cheating_alice", p.gamma), attack="sampled",
                                     attack_budget=2000, workers=WORKERS).point_estimate)
        sbound.append(soundness_bound(p))
        bbound.append(binding_bound_second_round(n, p.beta2, simplified=False))

    def nonincreasing(v):
        return all(a >= b for a, b in zip(v, v[1:]))

    def decreasing(v):
        return all(a > b for a, b in zip(v, v[1:]))

    ok = nonincreasing(sound) and nonincreasing(bind) and decreasing(sbound) and decreasing(bbound)
    verdict(10, ok,
            f"n={list(ns)}: soundness {sound} (bounds {[f'{b:.2e}' for b in sbound]}); "
            f"sampled binding {bind} (bounds {[f'{b:.2e}' for b in bbound]})")
