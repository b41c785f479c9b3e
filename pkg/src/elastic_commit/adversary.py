"""Dishonest parties.

* The converse's cheating Alice: she sets the reverse elastic channel to a
  BSC(s) and runs a private BSC(kappa_s) copy of her input, so that her
  private output ``z`` and Bob's ``y`` disagree like a BSC(delta).
* Binding attacks: after an honest-looking commit, Alice searches for
  alternative openings ``x'`` that satisfy Bob's hash checks.
* A dishonest Bob lowering the crossover of an elastic channel.

The search routines only ever see Alice's view (``c``, ``x`` and the public
transcript). Bob's ``y`` is used afterwards, to score the openings.
"""

from __future__ import annotations

import enum
import json
from dataclasses import dataclass, field

import numpy as np

from . import bits as B
from .capacity import ChannelFamily, ChannelKind
from .channel import ChannelInstance, Role, make_channel
from .errors import BudgetError, DomainError
from .infotheory import kappa as kappa_fn
from .protocol import (AliceView, CommitSession, ProtocolParams, bob_test, list_membership,
                       party_streams)
from .rng import child_seed

EXHAUSTIVE_MAX_BITS = 20


class Strategy(str, enum.Enum):
    FIXED_S = "fixed_s"
    ADAPTIVE_SCHEDULE = "adaptive_schedule"


@dataclass(frozen=True)
class CheatingAliceConfig:
    s: float
    strategy: Strategy = Strategy.FIXED_S
    schedule: tuple[float, ...] | None = None

    def check(self, params: ProtocolParams) -> "CheatingAliceConfig":
        lo, hi = params.gamma, params.delta
        if not lo <= self.s <= hi:
            raise DomainError(f"s={self.s} outside [{lo}, {hi}]")
        if Strategy(self.strategy) is Strategy.ADAPTIVE_SCHEDULE:
            if self.schedule is None or len(self.schedule) != params.n:
                raise DomainError("adaptive strategy needs one crossover per channel use")
            if min(self.schedule) < lo or max(self.schedule) > hi:
                raise DomainError(f"schedule leaves [{lo}, {hi}]")
        return self


def _check_s(params: ProtocolParams, s: float) -> float:
    if not params.gamma <= s <= params.delta:
        raise DomainError(f"s={s} outside [{params.gamma}, {params.delta}]")
    return float(s)


def rec_family(params: ProtocolParams) -> ChannelFamily:
    return ChannelFamily(ChannelKind.REC, params.delta, params.gamma)


# converse ---------------------------------------------------------------


@dataclass(frozen=True)
class ConverseViews:
    x: np.ndarray
    z: np.ndarray
    y: np.ndarray
    s: float
    kappa_s: float

    def zy_crossover(self) -> float:
        return B.hamming(self.z, self.y) / self.x.size


def converse_draw(gamma: float, delta: float, s: float, n: int,
                  rng: np.random.Generator) -> ConverseViews:
    """Uniform ``x``; ``y`` through REC[gamma, delta] set to BSC(s); ``z`` through a private BSC(kappa_s)."""
    if not gamma <= s <= delta:
        raise DomainError(f"s={s} outside [{gamma}, {delta}]")
    ks = kappa_fn(s, delta)
    channel = make_channel(ChannelFamily(ChannelKind.REC, delta, gamma), child_seed(rng), n=n)
    channel.control(Role.ALICE).set(s)
    x = B.random_bits(rng, n)
    y = channel.transmit(x)
    z = x ^ (rng.random(n) < ks).astype(np.uint8)
    return ConverseViews(x, z, y, float(s), ks)


def converse_sample(params: ProtocolParams, s: float, rng: np.random.Generator,
                    n_bits: int | None = None) -> ConverseViews:
    """Converse views for ``params`` (``n_bits`` overrides the block length)."""
    n = params.n if n_bits is None else int(n_bits)
    return converse_draw(params.gamma, params.delta, s, n, rng)


# cheating sessions ------------------------------------------------------


def cheating_session(params: ProtocolParams, c, config: CheatingAliceConfig | float, seed: int,
                     rng: np.random.Generator) -> CommitSession:
    """Commit with Alice holding the REC at crossover ``s`` (or a per-use schedule).

    ``seed`` drives the channel noise, ``rng`` the parties' choices. Alice's
    ``x`` is uniform, as in an honest run; she cheats only at reveal time.
    """
    if not isinstance(config, CheatingAliceConfig):
        config = CheatingAliceConfig(float(config))
    config.check(params)
    channel = make_channel(rec_family(params), seed, n=params.n)
    ctl = channel.control(Role.ALICE)
    alice, bob = party_streams(rng)
    session = CommitSession(params, c, channel, alice, bob)
    if Strategy(config.strategy) is Strategy.ADAPTIVE_SCHEDULE:
        session.c1_send(transmit=lambda v: ctl.transmit_adaptive(v, config.schedule))
    else:
        ctl.set(config.s)
        session.c1_send()
    session.alice_s = config.s
    return session.run()


# binding attacks --------------------------------------------------------


@dataclass
class BindingAttackResult:
    success: bool
    openings: tuple | None  # ((c_bar, x_bar), (c_hat, x_hat)) on success
    search_size: int        # hash-consistent candidates, x included
    accepted: int = 0       # of those, how many Bob's list accepts
    distinct_keys: int = 0  # distinct Ext values among the accepted ones
    distinct_in_list: int = 0  # sampled mode: distinct candidates in L(y) before hashing

    def to_dict(self) -> dict:
        out = {"success": self.success, "search_size": self.search_size, "accepted": self.accepted,
               "distinct_keys": self.distinct_keys, "distinct_in_list": self.distinct_in_list}
        if self.openings is not None:
            out["openings"] = [{"c": B.to_hex(c), "x": B.to_hex(x)} for c, x in self.openings]
        return out


def _hash_consistent(view: AliceView, rows: np.ndarray) -> np.ndarray:
    """Mask of candidate rows matching both announced hashes (cheap G2 first)."""
    t = view.transcript
    keep = np.all(t.g2.evaluate_many(rows) == t.h2, axis=1)
    if keep.any():
        idx = np.flatnonzero(keep)
        ok1 = np.all(t.g1.evaluate_many(rows[idx]) == t.h1, axis=1)
        keep[idx[~ok1]] = False
    return keep


def search_exhaustive(view: AliceView) -> np.ndarray:
    """Every x' that passes both hash checks, from Alice's knowledge only."""
    n = view.params.n
    if n > EXHAUSTIVE_MAX_BITS:
        raise BudgetError(f"exhaustive search over 2^{n} inputs exceeds the 2^{EXHAUSTIVE_MAX_BITS} budget")
    rows = B.all_vectors(n)
    return rows[_hash_consistent(view, rows)]


def shell_candidates(x: np.ndarray, kappa_s: float, count: int, rng: np.random.Generator) -> np.ndarray:
    """``count`` vectors obtained by flipping a Binomial(n, kappa_s)-sized random subset of x."""
    n = x.size
    weights = rng.binomial(n, kappa_s, size=count)
    order = np.argsort(rng.random((count, n)), axis=1)
    flips = np.zeros((count, n), dtype=np.uint8)
    ranks = np.empty_like(order)
    np.put_along_axis(ranks, order, np.arange(n)[None, :].repeat(count, 0), axis=1)
    flips[ranks < weights[:, None]] = 1
    return flips ^ x[None, :]


def _score(view: AliceView, candidates: np.ndarray, y: np.ndarray, anchored: bool):
    """Score hash-consistent candidates against Bob's y.

    Returns (accepted count, distinct key count, openings or None). With
    ``anchored`` the first opening must be the committed (c, x).
    """
    p = view.params
    t = view.transcript
    x_int = B.to_int(view.x)
    pool = [view.x] + [r for r in candidates if B.to_int(r) != x_int]
    in_list = [r for r in pool if list_membership(r, y, p)]
    keys: dict[int, np.ndarray] = {}
    for r in in_list:
        keys.setdefault(B.to_int(t.ext.evaluate(r)), r)
    openings = None
    x_ok = list_membership(view.x, y, p)
    if anchored:
        k0 = B.to_int(t.ext.evaluate(view.x))
        others = [r for k, r in keys.items() if k != k0]
        if x_ok and others:
            openings = ((view.c, view.x), (t.q ^ t.ext.evaluate(others[0]), others[0]))
    elif len(keys) >= 2:
        a, b = list(keys.values())[:2]
        openings = ((t.q ^ t.ext.evaluate(a), a), (t.q ^ t.ext.evaluate(b), b))
    return len(in_list), len(keys), openings


def _result(session: CommitSession, candidates: np.ndarray, anchored: bool,
            distinct_in_list: int = 0) -> BindingAttackResult:
    view = session.view_alice
    accepted, distinct, openings = _score(view, candidates, session.y, anchored)
    if openings is not None:
        vb = session.view_bob
        ok = all(bob_test(c, x, vb).accepted for c, x in openings)
        if not ok or np.array_equal(openings[0][0], openings[1][0]):
            raise AssertionError("attack produced an opening Bob rejects")
    size = 1 + sum(1 for r in candidates if not np.array_equal(r, view.x))
    return BindingAttackResult(openings is not None, openings, size, accepted, distinct,
                               distinct_in_list)


def binding_attack_exhaustive(session: CommitSession, params: ProtocolParams | None = None,
                              anchored: bool = False) -> BindingAttackResult:
    """Enumerate all hash-consistent x' and score the best pair of openings.

    Success means two openings with different committed strings both pass
    Bob's test against his actual ``y``. By default any two hash-consistent
    vectors may be used; ``anchored=True`` requires one of them to be the
    committed ``(c, x)``.
    """
    if params is not None and params != session.params:
        raise DomainError("params do not match the session")
    cands = search_exhaustive(session.view_alice)
    return _result(session, cands, anchored)


def binding_attack_sampled(session: CommitSession, params: ProtocolParams | None = None,
                           candidates: int = 10_000, rng: np.random.Generator | None = None,
                           s: float | None = None, anchored: bool = False,
                           chunk: int = 4096) -> BindingAttackResult:
    """Sample candidates from the Hamming shell of radius ~ n kappa_s around x.

    ``s`` defaults to the crossover the cheating Alice set (``session.alice_s``),
    or ``delta`` for an honest session.
    """
    if candidates < 1:
        raise DomainError("need at least one candidate")
    if rng is None:
        raise DomainError("sampled attack needs an rng")
    p = session.params
    if params is not None and params != p:
        raise DomainError("params do not match the session")
    if s is None:
        s = getattr(session, "alice_s", p.delta)
    ks = kappa_fn(_check_s(p, s), p.delta)
    view = session.view_alice
    kept = []
    seen_in_list: set[bytes] = set()
    done = 0
    while done < candidates:
        k = min(chunk, candidates - done)
        rows = shell_candidates(view.x, ks, k, rng)
        kept.append(rows[_hash_consistent(view, rows)])
        # diagnostic only: how much of Bob's list the shell sampling reaches
        d = np.count_nonzero(rows != session.y[None, :], axis=1)
        lo, hi = p.list_interval
        for r in rows[(d >= lo - 1e-9) & (d <= hi + 1e-9)]:
            seen_in_list.add(np.packbits(r).tobytes())
        done += k
    cands = np.concatenate(kept) if kept else np.zeros((0, p.n), np.uint8)
    if len(cands):
        cands = np.unique(cands, axis=0)
    return _result(session, cands, anchored, len(seen_in_list))


# collision census -------------------------------------------------------


@dataclass
class CensusResult:
    census_size: int   # list candidates examined, x included
    collisions: int    # I(h1): census members hashing to Alice's h1, x included
    max_bucket: int    # largest first-round bucket over all h1 values
    histogram: dict[int, int] = field(default_factory=dict)  # bucket size -> number of h1 values

    def to_dict(self) -> dict:
        return {"census_size": self.census_size, "collisions": self.collisions,
                "max_bucket": self.max_bucket,
                "histogram": {str(k): v for k, v in sorted(self.histogram.items())}}


def collision_census(session: CommitSession, params: ProtocolParams | None = None,
                     candidates: int | None = None, rng: np.random.Generator | None = None) -> CensusResult:
    """First-round hash collisions among the vectors of Bob's list.

    Exhaustive (``candidates=None``, n <= 20): the census is all of L(y) plus
    ``x``. Sampled: ``candidates`` shell samples around ``x`` that land in
    L(y), deduplicated, plus ``x``.
    """
    p = session.params
    if params is not None and params != p:
        raise DomainError("params do not match the session")
    y, x = session.y, session.x
    lo, hi = p.list_interval
    if candidates is None:
        if p.n > EXHAUSTIVE_MAX_BITS:
            raise BudgetError(f"census over 2^{p.n} inputs exceeds the budget")
        rows = B.all_vectors(p.n)
    else:
        if rng is None:
            raise DomainError("sampled census needs an rng")
        s = getattr(session, "alice_s", p.delta)
        rows = np.unique(shell_candidates(x, kappa_fn(s, p.delta), candidates, rng), axis=0)
    d = np.count_nonzero(rows != y[None, :], axis=1)
    rows = rows[(d >= lo - 1e-9) & (d <= hi + 1e-9)]
    x_key = np.packbits(x).tobytes()
    if not any(np.packbits(r).tobytes() == x_key for r in rows):
        rows = np.vstack([rows, x[None, :]])
    g1 = session.transcript.g1
    h = g1.evaluate_many(rows) if len(rows) else np.zeros((0, p.l1), np.uint8)
    codes = [r.tobytes() for r in np.packbits(h, axis=1)] if p.l1 else [b""] * len(rows)
    buckets: dict[bytes, int] = {}
    for code in codes:
        buckets[code] = buckets.get(code, 0) + 1
    mine = np.packbits(session.transcript.h1).tobytes() if p.l1 else b""
    hist: dict[int, int] = {}
    for v in buckets.values():
        hist[v] = hist.get(v, 0) + 1
    return CensusResult(len(rows), buckets.get(mine, 0), max(buckets.values(), default=0), hist)


# dishonest Bob ----------------------------------------------------------


def dishonest_bob_set(channel: ChannelInstance, s: float) -> ChannelInstance:
    """Bob privately sets the crossover for the rest of the commit phase."""
    channel.control(Role.BOB).set(s)
    return channel


# reports ----------------------------------------------------------------


@dataclass
class AttackReport:
    params: ProtocolParams
    mode: str
    s: float
    trials: int
    successes: int
    budget: int | None
    mean_search_size: float
    census: dict[int, int] = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {"params": self.params.to_dict(), "mode": self.mode, "s": self.s, "trials": self.trials,
                "successes": self.successes, "success_rate": self.successes / self.trials,
                "budget": self.budget, "mean_search_size": self.mean_search_size,
                "census_histogram": {str(k): v for k, v in sorted(self.census.items())}}

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True, indent=2)
