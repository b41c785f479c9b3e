"""One commitment over an elastic channel, step by step.

Alice sends a random x through REC[gamma, delta] at the nominal crossover
delta, answers Bob's two hash challenges, pads her string with an extracted
key, and later opens. A tampered opening is rejected.

Usage:
    python3 demos/protocol_run.py [--n 1024] [--seed 7]
"""

import argparse

import numpy as np

from elastic_commit import bits as B
from elastic_commit.capacity import ChannelFamily, ChannelKind
from elastic_commit.channel import make_channel
from elastic_commit.protocol import bob_test, derive_params, run_commit, soundness_bound
from elastic_commit.rng import substream


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--n", type=int, default=1024)
    ap.add_argument("--seed", type=int, default=7)
    args = ap.parse_args()

    p = derive_params(args.n, 0.1, 0.2)
    print(f"n={p.n}: l1={p.l1} l2={p.l2} m={p.m} (rate {p.m / p.n:.4f}), "
          f"list interval {p.list_interval}")
    print(f"soundness failure bound 2exp(-2n a1^2) = {soundness_bound(p):.3e}")

    rng = substream(args.seed)
    c = B.random_bits(rng, p.m)
    channel = make_channel(ChannelFamily(ChannelKind.REC, p.delta, p.gamma), args.seed, n=p.n)
    session = run_commit(p, c, channel, substream(args.seed, 1))
    d = int(np.count_nonzero(session.x != session.y))
    print(f"committed {p.m} bits; Bob saw d_H(x, y) = {d} ({d / p.n:.3f} per bit)")

    honest = session.view_bob
    print("honest opening accepted:", bob_test(session.c, session.x, honest).accepted)

    forged = session.c.copy()
    forged[0] ^= 1
    out = bob_test(forged, session.x, honest)
    print("flipped-bit opening accepted:", out.accepted, "failed:", sorted(out.failed_checks))


if __name__ == "__main__":
    main()
