"""Reproducible random streams.

Every stream is a ``numpy.random.Generator`` driven by the counter-based
Philox4x64 bit generator. Substreams are addressed by a master seed plus a
tuple of non-negative integer keys (for instance ``(trial_index,)``) through
``numpy.random.SeedSequence`` spawn keys, so trial ``i`` draws the same bits
no matter how trials are scheduled across workers.
"""

from __future__ import annotations

import numpy as np

SEED_ENV_VAR = "ELASTIC_COMMIT_SEED"

# Stream purposes, used as the first spawn key so that e.g. the channel noise
# and Bob's hash choices in one trial never share bits.
PURPOSE_TRIAL = 0
PURPOSE_CHANNEL = 1
PURPOSE_ALICE = 2
PURPOSE_BOB = 3
PURPOSE_ATTACK = 4
PURPOSE_BOOTSTRAP = 5
PURPOSE_TRANSCRIPT = 6


def substream(master_seed: int, *keys: int) -> np.random.Generator:
    seq = np.random.SeedSequence(int(master_seed) & ((1 << 64) - 1), spawn_key=tuple(int(k) for k in keys))
    return np.random.Generator(np.random.Philox(seq))


def child_seed(rng: np.random.Generator) -> int:
    """Draw a fresh 64-bit seed from ``rng`` (for handing to a sub-component)."""
    return int(rng.integers(0, 2**63, dtype=np.int64))


def parse_seed(text: str) -> int:
    """Parse a decimal or ``0x``-prefixed hex seed into a 64-bit integer."""
    value = int(text, 0)
    if not 0 <= value < 2**64:
        raise ValueError(f"seed {text!r} is not a 64-bit unsigned integer")
    return value
