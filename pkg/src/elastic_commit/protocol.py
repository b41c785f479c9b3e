"""Bit commitment over a reverse elastic channel.

Commit phase (one channel use per bit of ``x``, everything else noiseless):

C1  Alice draws ``x`` uniformly from {0,1}^n and sends it; Bob receives ``y``.
C2  Bob picks ``G1`` from a 4n-wise independent family {0,1}^n -> {0,1}^l1.
C3  Alice announces ``h1 = G1(x)``.
C4  Bob picks ``G2`` from a 2-universal family {0,1}^n -> {0,1}^l2.
C5  Alice announces ``h2 = G2(x)``.
C6  Alice picks an extractor ``Ext`` {0,1}^n -> {0,1}^m and announces
    ``Ext`` and ``q = c XOR Ext(x)``.

Reveal: Alice sends ``(c, x)``. Bob accepts iff ``x`` is at distance
``n(delta +- alpha1)`` from ``y``, both hashes match, and ``c = q XOR Ext(x)``.
"""

from __future__ import annotations

import enum
import json
import math
from dataclasses import dataclass, field, replace

import numpy as np

from . import bits as B
from .channel import ChannelInstance
from .errors import ConfigurationError, DomainError, PhaseError
from .hashing import HashFamilySpec, HashSeed, sample_seed, seed_from_bytes
from .infotheory import binary_entropy, kappa as kappa_fn

DEFAULT_BETA1 = 0.02
DEFAULT_BETA2 = 0.01
DEFAULT_BETA3 = 0.05
DEFAULT_ALPHA1 = 0.06

# Slack for float round-off in ceil/floor of lengths and in the list radius.
_ROUND_EPS = 1e-9


@dataclass(frozen=True)
class ProtocolParams:
    n: int
    gamma: float
    delta: float
    beta1: float
    beta2: float
    beta3: float
    alpha1: float
    kappa: float
    rate: float
    l1: int
    l2: int
    m: int

    @property
    def list_interval(self) -> tuple[float, float]:
        return self.n * (self.delta - self.alpha1), self.n * (self.delta + self.alpha1)

    def to_dict(self) -> dict:
        return {k: getattr(self, k) for k in self.__dataclass_fields__}

    @classmethod
    def from_dict(cls, data: dict) -> "ProtocolParams":
        return cls(**{k: data[k] for k in cls.__dataclass_fields__})


def _ceil(v: float) -> int:
    return math.ceil(v - _ROUND_EPS)


def _floor(v: float) -> int:
    return math.floor(v + _ROUND_EPS)


def derive_params(n: int, gamma: float, delta: float, beta1: float = DEFAULT_BETA1,
                  beta2: float = DEFAULT_BETA2, beta3: float = DEFAULT_BETA3,
                  alpha1: float = DEFAULT_ALPHA1, *, l1: int | None = None,
                  l2: int | None = None, m: int | None = None) -> ProtocolParams:
    """Validate the protocol constants and derive the hash and key lengths.

    ``l1``, ``l2`` and ``m`` may be overridden (weakened or degenerate test
    configurations); overrides only need to fit in ``[0, n]``.

    Raises:
        ConfigurationError: naming the first violated constraint.
    """
    if int(n) != n or n < 1:
        raise ConfigurationError(f"n={n} must be a positive integer")
    n = int(n)
    if not 0.0 < gamma < delta < 0.5:
        raise ConfigurationError(f"need 0 < gamma < delta < 1/2 (gamma={gamma}, delta={delta})")
    if beta1 <= 0 or beta2 <= 0:
        raise ConfigurationError("beta1 and beta2 must be positive")
    if not beta3 > beta1 + beta2:
        raise ConfigurationError(f"beta3={beta3} must exceed beta1 + beta2 = {beta1 + beta2}")
    if not 0.0 < alpha1 < min(delta, 0.5 - delta):
        raise ConfigurationError(f"alpha1={alpha1} must lie in (0, min(delta, 1/2 - delta))")
    k = kappa_fn(gamma, delta)
    rate = binary_entropy(delta) - binary_entropy(k) - beta3
    if rate <= 0:
        raise ConfigurationError(f"rate H(delta) - H(kappa) - beta3 = {rate:.6g} is not positive")
    d_l1 = _ceil(n * (binary_entropy(k) + beta1))
    d_l2 = _ceil(n * beta2)
    d_m = _floor(n * rate)
    l1 = d_l1 if l1 is None else int(l1)
    l2 = d_l2 if l2 is None else int(l2)
    if m is None:
        m = d_m
        if m < 1:
            raise ConfigurationError(f"n={n} too small: floor(n R) = {m} committed bits")
    m = int(m)
    for name, v in (("l1", l1), ("l2", l2), ("m", m)):
        if not 0 <= v <= n:
            raise ConfigurationError(f"{name}={v} must lie in [0, n]")
    return ProtocolParams(n, float(gamma), float(delta), float(beta1), float(beta2), float(beta3),
                          float(alpha1), k, rate, l1, l2, m)


def soundness_bound(params: ProtocolParams) -> float:
    """Two-sided Chernoff bound 2 exp(-2 n alpha1^2) on an honest rejection."""
    return 2.0 * math.exp(-2.0 * params.n * params.alpha1 ** 2)


def g1_spec(params: ProtocolParams) -> HashFamilySpec:
    return HashFamilySpec(params.n, params.l1, 4 * params.n)


def g2_spec(params: ProtocolParams) -> HashFamilySpec:
    return HashFamilySpec(params.n, params.l2, 2)


def ext_spec(params: ProtocolParams) -> HashFamilySpec:
    return HashFamilySpec(params.n, params.m, 2)


def list_membership(x_tilde, y, params: ProtocolParams) -> bool:
    """Whether ``x_tilde`` lies in Bob's list around ``y``."""
    x_tilde = B.as_bits(x_tilde, params.n)
    y = B.as_bits(y, params.n)
    d = B.hamming(x_tilde, y)
    lo, hi = params.list_interval
    return lo - _ROUND_EPS <= d <= hi + _ROUND_EPS


class Phase(enum.IntEnum):
    START = 0
    C1 = 1
    C2 = 2
    C3 = 3
    C4 = 4
    C5 = 5
    C6 = 6
    REVEALED = 7


@dataclass
class Transcript:
    """Public messages of the commit phase, in order."""

    g1: HashSeed | None = None
    h1: np.ndarray | None = None
    g2: HashSeed | None = None
    h2: np.ndarray | None = None
    ext: HashSeed | None = None
    q: np.ndarray | None = None

    @property
    def complete(self) -> bool:
        return self.q is not None

    def to_dict(self) -> dict:
        out = {}
        for name in ("g1", "g2", "ext"):
            seed = getattr(self, name)
            out[name] = None if seed is None else seed.to_bytes().hex()
        for name in ("h1", "h2", "q"):
            v = getattr(self, name)
            out[name] = None if v is None else B.to_hex(v)
        return out

    @classmethod
    def from_dict(cls, data: dict, params: ProtocolParams) -> "Transcript":
        t = cls()
        for name in ("g1", "g2", "ext"):
            if data.get(name) is not None:
                setattr(t, name, seed_from_bytes(bytes.fromhex(data[name])))
        for name, length in (("h1", params.l1), ("h2", params.l2), ("q", params.m)):
            if data.get(name) is not None:
                setattr(t, name, B.from_hex(data[name], length))
        return t


@dataclass(frozen=True)
class AliceView:
    params: ProtocolParams
    c: np.ndarray
    x: np.ndarray
    transcript: Transcript


@dataclass(frozen=True)
class BobView:
    params: ProtocolParams
    y: np.ndarray
    transcript: Transcript


CHECKS = ("list-membership", "hash1", "hash2", "pad")


@dataclass(frozen=True)
class RevealOutcome:
    accepted: bool
    failed_checks: frozenset = field(default_factory=frozenset)

    def to_dict(self) -> dict:
        return {"accepted": self.accepted, "failed_checks": [c for c in CHECKS if c in self.failed_checks]}


def bob_test(c_tilde, x_tilde, view: BobView) -> RevealOutcome:
    """Bob's acceptance test. All four conditions are always evaluated."""
    p = view.params
    t = view.transcript
    if not t.complete:
        raise PhaseError("reveal before the commit phase finished")
    c_tilde = B.as_bits(c_tilde, p.m)
    x_tilde = B.as_bits(x_tilde, p.n)
    failed = set()
    if not list_membership(x_tilde, view.y, p):
        failed.add("list-membership")
    if not np.array_equal(t.g1.evaluate(x_tilde), t.h1):
        failed.add("hash1")
    if not np.array_equal(t.g2.evaluate(x_tilde), t.h2):
        failed.add("hash2")
    if not np.array_equal(c_tilde, t.q ^ t.ext.evaluate(x_tilde)):
        failed.add("pad")
    return RevealOutcome(not failed, frozenset(failed))


class CommitSession:
    """State of one commit/reveal run between an honest Bob and Alice.

    Steps must be taken in order (:meth:`step` dispatches to the next one);
    anything else raises :class:`PhaseError`. Alice's and Bob's private
    randomness come from separate generators.
    """

    def __init__(self, params: ProtocolParams, c, channel: ChannelInstance,
                 alice_rng: np.random.Generator, bob_rng: np.random.Generator):
        self.params = params
        self.c = B.as_bits(c, params.m)
        self.channel = channel
        self._alice_rng = alice_rng
        self._bob_rng = bob_rng
        self.phase = Phase.START
        self.x: np.ndarray | None = None
        self.y: np.ndarray | None = None
        self.transcript = Transcript()
        self.outcome: RevealOutcome | None = None
        # crossover a cheating Alice fixed on the channel, if any
        self.alice_s: float | None = None

    def _advance(self, expected: Phase) -> None:
        if self.phase != expected - 1:
            raise PhaseError(f"step {expected.name} called in phase {self.phase.name}")
        self.phase = expected

    def c1_send(self, x=None, transmit=None) -> None:
        """Alice sends ``x`` (uniform unless a cheating Alice supplies it).

        ``transmit`` replaces the plain channel use, e.g. by a cheating
        Alice's per-use crossover schedule.
        """
        self._advance(Phase.C1)
        p = self.params
        self.x = B.random_bits(self._alice_rng, p.n) if x is None else B.as_bits(x, p.n).copy()
        self.y = (transmit or self.channel.transmit)(self.x)

    def c2_bob_hash1(self) -> None:
        self._advance(Phase.C2)
        self.transcript.g1 = sample_seed(g1_spec(self.params), self._bob_rng)

    def c3_alice_hash1(self) -> None:
        self._advance(Phase.C3)
        self.transcript.h1 = self.transcript.g1.evaluate(self.x)

    def c4_bob_hash2(self) -> None:
        self._advance(Phase.C4)
        self.transcript.g2 = sample_seed(g2_spec(self.params), self._bob_rng)

    def c5_alice_hash2(self) -> None:
        self._advance(Phase.C5)
        self.transcript.h2 = self.transcript.g2.evaluate(self.x)

    def c6_alice_pad(self) -> None:
        self._advance(Phase.C6)
        t = self.transcript
        t.ext = sample_seed(ext_spec(self.params), self._alice_rng)
        t.q = self.c ^ t.ext.evaluate(self.x)

    _STEPS = ("c1_send", "c2_bob_hash1", "c3_alice_hash1", "c4_bob_hash2", "c5_alice_hash2", "c6_alice_pad")

    def step(self) -> Phase:
        if self.phase >= Phase.C6:
            raise PhaseError("commit phase already complete")
        getattr(self, self._STEPS[self.phase])()
        return self.phase

    def run(self) -> "CommitSession":
        while self.phase < Phase.C6:
            self.step()
        return self

    @property
    def committed(self) -> bool:
        return self.phase >= Phase.C6

    @property
    def view_alice(self) -> AliceView:
        return AliceView(self.params, self.c, self.x, self.transcript)

    @property
    def view_bob(self) -> BobView:
        return BobView(self.params, self.y, self.transcript)

    def reveal(self, c_tilde=None, x_tilde=None) -> RevealOutcome:
        """Alice opens (honestly by default); Bob runs his test."""
        if self.phase != Phase.C6:
            raise PhaseError(f"reveal called in phase {self.phase.name}")
        c_tilde = self.c if c_tilde is None else c_tilde
        x_tilde = self.x if x_tilde is None else x_tilde
        self.outcome = bob_test(c_tilde, x_tilde, self.view_bob)
        self.phase = Phase.REVEALED
        return self.outcome

    # serialisation -------------------------------------------------------

    def to_json(self) -> str:
        data = {
            "params": self.params.to_dict(),
            "phase": self.phase.name,
            "c": B.to_hex(self.c),
            "x": None if self.x is None else B.to_hex(self.x),
            "y": None if self.y is None else B.to_hex(self.y),
            "transcript": self.transcript.to_dict(),
            "outcome": None if self.outcome is None else self.outcome.to_dict(),
        }
        return json.dumps(data, sort_keys=True)


@dataclass
class SessionRecord:
    """A session reloaded from JSON: data only, no channel or randomness."""

    params: ProtocolParams
    phase: Phase
    c: np.ndarray
    x: np.ndarray | None
    y: np.ndarray | None
    transcript: Transcript
    outcome: RevealOutcome | None

    @property
    def view_bob(self) -> BobView:
        return BobView(self.params, self.y, self.transcript)

    @property
    def view_alice(self) -> AliceView:
        return AliceView(self.params, self.c, self.x, self.transcript)


def load_session(text: str) -> SessionRecord:
    data = json.loads(text)
    params = ProtocolParams.from_dict(data["params"])
    n = params.n
    out = data.get("outcome")
    outcome = None if out is None else RevealOutcome(out["accepted"], frozenset(out["failed_checks"]))
    return SessionRecord(
        params, Phase[data["phase"]], B.from_hex(data["c"], params.m),
        None if data["x"] is None else B.from_hex(data["x"], n),
        None if data["y"] is None else B.from_hex(data["y"], n),
        Transcript.from_dict(data["transcript"], params), outcome)


def party_streams(rng: np.random.Generator) -> tuple[np.random.Generator, np.random.Generator]:
    """Independent Alice and Bob generators derived from one session generator."""
    a, b = rng.spawn(2)
    return a, b


def run_commit(params: ProtocolParams, c, channel: ChannelInstance, rng: np.random.Generator,
               x=None) -> CommitSession:
    """Run steps C1 to C6 and return the committed session."""
    alice, bob = party_streams(rng)
    session = CommitSession(params, c, channel, alice, bob)
    session.c1_send(x)
    return session.run()


def with_lengths(params: ProtocolParams, **lengths) -> ProtocolParams:
    """Copy of ``params`` with some of l1, l2, m replaced."""
    for k, v in lengths.items():
        if k not in ("l1", "l2", "m"):
            raise DomainError(f"cannot override {k}")
        if not 0 <= v <= params.n:
            raise ConfigurationError(f"{k}={v} must lie in [0, n]")
    return replace(params, **lengths)
