"""A cheating Alice against the commitment at toy block lengths.

Alice fixes the channel crossover to gamma, so she knows Bob's noise is near
delta while her own uncertainty about y is only kappa. At n=16 she enumerates
every x' consistent with both hashes and tries to open two different strings.
Full-length hashes shut the attack down, weakened hashes let it through, and
the derived lengths sit in between because n=16 is far from asymptotic.

Usage:
    python3 demos/binding_attack.py [--trials 100]
"""

import argparse

from elastic_commit.estimator import TrialPlan, estimate_binding
from elastic_commit.infotheory import binding_bound_second_round
from elastic_commit.protocol import derive_params, with_lengths


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--trials", type=int, default=100)
    ap.add_argument("--seed", type=int, default=11)
    args = ap.parse_args()

    p = derive_params(16, 0.1, 0.2)
    configs = [
        ("derived", p),
        ("full-length hashes", with_lengths(p, l1=16, l2=16)),
        ("weak l1=4 l2=2", with_lengths(p, l1=4, l2=2)),
    ]
    for label, q in configs:
        r = estimate_binding(TrialPlan(args.trials, args.seed, q, "cheating_alice", p.gamma), census=False)
        print(f"{label:>20} (l1={q.l1:2d} l2={q.l2:2d} m={q.m}): double openings "
              f"{r.point_estimate:.3f}  95% CI [{r.ci_low:.3f}, {r.ci_high:.3f}]")

    print("\nsecond-round binding bound at the derived lengths (values above 1 are vacuous):")
    for n in (16, 256, 1024, 4096):
        q = derive_params(n, 0.1, 0.2)
        print(f"  n={n:5d}: {binding_bound_second_round(n, q.beta2, simplified=False):.3e}")


if __name__ == "__main__":
    main()
