"""Simulated binary symmetric channels with per-party elasticity.

A :class:`ChannelInstance` transmits at crossover ``delta`` unless a dishonest
party with elasticity rights lowers it. Those rights are exercised through a
:class:`CrossoverControl` handle, obtained with :meth:`ChannelInstance.control`;
the instance itself never exposes the current crossover, so protocol code
written for honest parties cannot read it.

Who may set what:

======  =================  =================
family  Alice              Bob
======  =================  =================
BSC     --                 --
REC     [gamma, delta]     --
EC      --                 [gamma, delta]
UNC     [gamma, delta]     [gamma, delta]
GEC     [gamma_a, delta]   [gamma_b, delta]
======  =================  =================
"""

from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np

from .bits import BitVector, as_bits
from .capacity import ChannelFamily, ChannelKind
from .errors import DomainError, RightsViolationError
from .rng import PURPOSE_CHANNEL, substream


class Role(str, enum.Enum):
    ALICE = "alice"
    BOB = "bob"


@dataclass(frozen=True)
class ElasticityRights:
    alice_range: tuple[float, float] | None
    bob_range: tuple[float, float] | None

    @classmethod
    def for_family(cls, family: ChannelFamily) -> "ElasticityRights":
        d = family.delta
        kind = family.kind
        if kind is ChannelKind.REC:
            return cls((family.gamma, d), None)
        if kind is ChannelKind.EC:
            return cls(None, (family.gamma, d))
        if kind is ChannelKind.UNC:
            return cls((family.gamma, d), (family.gamma, d))
        if kind is ChannelKind.GEC:
            return cls((family.gamma_a, d), (family.gamma_b, d))
        return cls(None, None)

    def range_for(self, party: Role) -> tuple[float, float] | None:
        return self.alice_range if Role(party) is Role.ALICE else self.bob_range

    @property
    def alice_may_set(self) -> bool:
        return self.alice_range is not None

    @property
    def bob_may_set(self) -> bool:
        return self.bob_range is not None


class ChannelInstance:
    """One simulated channel with its own noise stream.

    Noise is drawn from ``substream(seed, PURPOSE_CHANNEL)``, so outputs are
    bit-exact functions of the seed, the inputs and the order of calls.
    ``force_crossover`` bypasses elasticity rights entirely and exists for
    degenerate test configurations (e.g. a noiseless channel).
    """

    def __init__(self, family: ChannelFamily, seed: int, n: int | None = None,
                 force_crossover: float | None = None):
        self.family = family
        self.rights = ElasticityRights.for_family(family)
        self.seed = int(seed)
        self.n = n
        self._rng = substream(self.seed, PURPOSE_CHANNEL)
        self.__s = family.delta
        self.__controller: Role | None = None
        if force_crossover is not None:
            if not 0.0 <= force_crossover <= 0.5:
                raise DomainError(f"crossover {force_crossover} outside [0, 1/2]")
            self.__s = float(force_crossover)

    def __repr__(self) -> str:
        return f"ChannelInstance({self.family.describe()}, seed={self.seed})"

    def control(self, party: Role | str) -> "CrossoverControl":
        """Hand the elasticity capability to ``party``, if the family grants it."""
        party = Role(party)
        rng_ = self.rights.range_for(party)
        if rng_ is None:
            raise RightsViolationError(f"{party.value} has no elasticity on {self.family.describe()}")
        if self.__controller is not None and self.__controller is not party:
            raise RightsViolationError("crossover already controlled by the other party")
        self.__controller = party
        return CrossoverControl(self, party, rng_, _Key)

    def _set(self, s: float, key) -> None:
        if key is not _Key:
            raise RightsViolationError("crossover can only be set through a CrossoverControl")
        self.__s = s

    def _current(self, key) -> float:
        if key is not _Key:
            raise RightsViolationError("crossover is private to the controlling party")
        return self.__s

    def _check_len(self, x: BitVector) -> BitVector:
        x = as_bits(x)
        if self.n is not None and x.size != self.n:
            raise DomainError(f"input has {x.size} bits, session uses {self.n}")
        return x

    def transmit(self, x: BitVector) -> BitVector:
        x = self._check_len(x)
        flips = self._rng.random(x.size) < self.__s
        return x ^ flips.astype(np.uint8)

    def _transmit_schedule(self, x: BitVector, schedule: np.ndarray) -> BitVector:
        flips = self._rng.random(x.size) < schedule
        return x ^ flips.astype(np.uint8)

    def honest_view(self) -> dict:
        """What an honest party knows about the channel: the family, nothing more."""
        return {"family": self.family.describe(), "delta": self.family.delta}


class _Key:
    """Private capability marker; only handed to CrossoverControl."""


class CrossoverControl:
    """Capability to set the crossover of one channel, held by the dishonest party."""

    def __init__(self, channel: ChannelInstance, party: Role, allowed: tuple[float, float], key):
        self.channel = channel
        self.party = party
        self.low, self.high = allowed
        self._key = key

    def _check(self, s: float) -> float:
        s = float(s)
        if not self.low <= s <= self.high:
            raise DomainError(f"s={s} outside {self.party.value}'s range [{self.low}, {self.high}]")
        return s

    def set(self, s: float) -> None:
        self.channel._set(self._check(s), self._key)

    @property
    def current(self) -> float:
        return self.channel._current(self._key)

    def transmit_adaptive(self, x: BitVector, schedule) -> BitVector:
        """Transmit with bit ``i`` flipped with probability ``schedule[i]``."""
        x = self.channel._check_len(x)
        sched = np.asarray(schedule, dtype=float).reshape(-1)
        if sched.size != x.size:
            raise DomainError(f"schedule has {sched.size} entries for {x.size} bits")
        if sched.size and (sched.min() < self.low or sched.max() > self.high):
            raise DomainError(f"schedule leaves [{self.low}, {self.high}]")
        return self.channel._transmit_schedule(x, sched)


def make_channel(family: ChannelFamily, seed: int, n: int | None = None,
                 force_crossover: float | None = None) -> ChannelInstance:
    return ChannelInstance(family, seed, n=n, force_crossover=force_crossover)


def set_crossover(ch: ChannelInstance, party: Role | str, s: float) -> CrossoverControl:
    """Let ``party`` set the crossover of ``ch`` to ``s``; returns the control handle."""
    ctl = ch.control(party)
    ctl.set(s)
    return ctl


def transmit(ch: ChannelInstance, x: BitVector) -> BitVector:
    return ch.transmit(x)


def transmit_adaptive(ctl: CrossoverControl, x: BitVector, s_schedule) -> BitVector:
    return ctl.transmit_adaptive(x, s_schedule)
