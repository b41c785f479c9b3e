"""Commitment capacities of the elastic binary symmetric channels.

Closed forms for the reverse elastic (REC), elastic (EC) and unfair noisy (UNC)
channels, the EC-REC gap and its maximiser, and the tables behind the
capacity-curve and equal-capacity-contour plots.
"""

from __future__ import annotations

import csv
import enum
import io
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

from .errors import DomainError
from .infotheory import binary_entropy, kappa


class ChannelKind(str, enum.Enum):
    BSC = "bsc"
    REC = "rec"
    EC = "ec"
    UNC = "unc"
    GEC = "gec"


@dataclass(frozen=True)
class ChannelFamily:
    """Channel family plus its crossover parameters.

    REC/EC/UNC use ``gamma``; the general elastic channel uses ``gamma_a`` and
    ``gamma_b`` (Alice's and Bob's lowest settable crossover). A plain BSC has
    only ``delta``.
    """

    kind: ChannelKind
    delta: float
    gamma: float | None = None
    gamma_a: float | None = None
    gamma_b: float | None = None

    def __post_init__(self):
        kind = ChannelKind(self.kind)
        object.__setattr__(self, "kind", kind)
        d = self.delta
        if not 0.0 < d < 0.5:
            raise DomainError(f"delta={d} must lie in (0, 1/2)")
        if kind is ChannelKind.BSC:
            return
        if kind is ChannelKind.GEC:
            for name in ("gamma_a", "gamma_b"):
                g = getattr(self, name)
                if g is None or not 0.0 < g < d:
                    raise DomainError(f"{name}={g} must lie in (0, delta)")
            return
        if self.gamma is None or not 0.0 < self.gamma < d:
            raise DomainError(f"gamma={self.gamma} must lie in (0, delta={d})")

    def describe(self) -> str:
        if self.kind is ChannelKind.BSC:
            return f"BSC({self.delta:g})"
        if self.kind is ChannelKind.GEC:
            return f"GEC[{self.gamma_a:g},{self.gamma_b:g},{self.delta:g}]"
        return f"{self.kind.name}[{self.gamma:g},{self.delta:g}]"


@dataclass(frozen=True)
class CapacityResult:
    value: float
    family: ChannelFamily

    def __float__(self) -> float:
        return self.value


def _ordered(gamma: float, delta: float) -> None:
    if not (0.0 < gamma < delta < 0.5):
        raise DomainError(f"need 0 < gamma < delta < 1/2, got gamma={gamma}, delta={delta}")


def _rec_value(gamma: float, delta: float) -> float:
    return binary_entropy(delta) - binary_entropy(kappa(gamma, delta))


def capacity_rec(gamma: float, delta: float) -> CapacityResult:
    """H(delta) - H((delta - gamma) / (1 - 2 gamma))."""
    _ordered(gamma, delta)
    return CapacityResult(_rec_value(gamma, delta), ChannelFamily(ChannelKind.REC, delta, gamma))


def capacity_ec(gamma: float, delta: float) -> CapacityResult:
    _ordered(gamma, delta)
    return CapacityResult(binary_entropy(gamma), ChannelFamily(ChannelKind.EC, delta, gamma))


def unc_impossible(gamma: float, delta: float) -> bool:
    """Whether commitment over UNC[gamma, delta] is impossible: delta >= 2 gamma (1 - gamma)."""
    return delta >= 2.0 * gamma * (1.0 - gamma)


def capacity_unc(gamma: float, delta: float) -> CapacityResult:
    """max(0, H(gamma) - H(kappa)), exactly 0 on the impossibility region."""
    _ordered(gamma, delta)
    fam = ChannelFamily(ChannelKind.UNC, delta, gamma)
    if unc_impossible(gamma, delta):
        return CapacityResult(0.0, fam)
    return CapacityResult(max(0.0, binary_entropy(gamma) - binary_entropy(kappa(gamma, delta))), fam)


def capacity_bsc(delta: float) -> CapacityResult:
    fam = ChannelFamily(ChannelKind.BSC, delta)
    return CapacityResult(binary_entropy(delta), fam)


def capacity_gap(gamma: float, delta: float) -> float:
    """EC minus REC capacity: H(gamma) - H(delta) + H(kappa)."""
    _ordered(gamma, delta)
    return binary_entropy(gamma) - binary_entropy(delta) + binary_entropy(kappa(gamma, delta))


def gamma_star(delta: float) -> float:
    """Unique maximiser over gamma of the EC-REC gap, (1 - sqrt(1 - 2 delta)) / 2."""
    if not 0.0 < delta < 0.5:
        raise DomainError(f"delta={delta} must lie in (0, 1/2)")
    return (1.0 - math.sqrt(1.0 - 2.0 * delta)) / 2.0


def capacity(family: ChannelFamily) -> CapacityResult | None:
    """Capacity of any family; ``None`` for the GEC, whose value is open."""
    kind = family.kind
    if kind is ChannelKind.BSC:
        return capacity_bsc(family.delta)
    if kind is ChannelKind.REC:
        return capacity_rec(family.gamma, family.delta)
    if kind is ChannelKind.EC:
        return capacity_ec(family.gamma, family.delta)
    if kind is ChannelKind.UNC:
        return capacity_unc(family.gamma, family.delta)
    return None


def interior_grid(delta: float, points: int) -> np.ndarray:
    """``points`` evenly spaced values strictly inside (0, delta)."""
    if points < 1:
        raise DomainError("need at least one grid point")
    return np.linspace(0.0, delta, points + 2)[1:-1]


CSV_COLUMNS = ("family", "gamma", "delta", "capacity")


@dataclass
class Table:
    """Rows of a capacity table with a fixed column order."""

    columns: tuple[str, ...]
    rows: list[tuple] = field(default_factory=list)

    def column(self, name: str) -> np.ndarray:
        i = self.columns.index(name)
        return np.array([r[i] for r in self.rows])

    def to_csv(self, target=None) -> str:
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(self.columns)
        for row in self.rows:
            writer.writerow([_fmt(v) for v in row])
        text = buf.getvalue()
        if target is not None:
            Path(target).write_text(text)
        return text

    def __len__(self) -> int:
        return len(self.rows)


def _fmt(v) -> str:
    if isinstance(v, (float, np.floating)):
        return repr(float(v))
    if isinstance(v, (bool, np.bool_)):
        return "1" if v else "0"
    return str(v)


def _check_deltas(delta_list: Iterable[float]) -> list[float]:
    out = [float(d) for d in delta_list]
    for d in out:
        if not 0.0 < d < 0.5:
            raise DomainError(f"delta={d} must lie in (0, 1/2)")
    return out


@dataclass(frozen=True)
class CurveRow:
    gamma: float
    delta: float
    bsc: float
    ec: float
    rec: float
    unc: float


def curve_series(delta_list: Sequence[float], gamma_points: int) -> list[CurveRow]:
    """Capacity of every family on an interior gamma grid, for each delta."""
    if gamma_points < 2:
        raise DomainError("gamma_points must be at least 2")
    rows = []
    for delta in _check_deltas(delta_list):
        h_delta = binary_entropy(delta)
        for g in interior_grid(delta, gamma_points):
            g = float(g)
            rows.append(CurveRow(g, delta, h_delta, capacity_ec(g, delta).value,
                                 capacity_rec(g, delta).value, capacity_unc(g, delta).value))
    return rows


def curve_table(rows: Sequence[CurveRow]) -> Table:
    """Long-format table: one (family, gamma, delta, capacity) row per cell."""
    table = Table(CSV_COLUMNS + ("gamma_over_delta",))
    for r in rows:
        for fam in ("bsc", "ec", "rec", "unc"):
            table.rows.append((fam, r.gamma, r.delta, getattr(r, fam), r.gamma / r.delta))
    return table


def inverse_binary_entropy(h: float, tol: float = 1e-12) -> float:
    """The p in [0, 1/2] with H(p) = h, by bisection."""
    if not 0.0 <= h <= 1.0:
        raise DomainError(f"h={h} must lie in [0, 1]")
    lo, hi = 0.0, 0.5
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        if binary_entropy(mid) < h:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def rec_gamma_for_capacity(level: float, delta: float, tol: float = 1e-12) -> float:
    """The gamma in (0, delta) with C_REC(gamma, delta) = level, by bisection."""
    lo, hi = 0.0, delta
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        if _rec_value(mid, delta) < level:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


@dataclass(frozen=True)
class ContourRow:
    delta: float
    level: float
    gamma_ec: float
    gamma_rec: float
    ok: bool


def contour_series(delta_list: Sequence[float], points: int,
                   levels: Sequence[float] | None = None, tol: float = 1e-12) -> list[ContourRow]:
    """Pairs (gamma_EC, gamma_REC) at which EC and REC capacities coincide.

    For each delta the target levels default to ``points`` values evenly
    spaced strictly inside (0, H(delta)). Explicit ``levels`` outside that
    range yield rows with ``ok=False`` and NaN gammas.
    """
    rows = []
    for delta in _check_deltas(delta_list):
        h_delta = binary_entropy(delta)
        lv = interior_grid(h_delta, points) if levels is None else np.asarray(levels, float)
        for level in lv:
            level = float(level)
            if not 0.0 < level < h_delta:
                rows.append(ContourRow(delta, level, math.nan, math.nan, False))
                continue
            rows.append(ContourRow(delta, level, inverse_binary_entropy(level, tol),
                                   rec_gamma_for_capacity(level, delta, tol), True))
    return rows


def contour_table(rows: Sequence[ContourRow]) -> Table:
    """Long format; each contour point contributes an ``ec`` and a ``rec`` row."""
    table = Table(CSV_COLUMNS + ("gamma_over_delta", "level_index", "ok"))
    index: dict[float, int] = {}
    for r in rows:
        i = index.get(r.delta, 0)
        index[r.delta] = i + 1
        table.rows.append(("ec", r.gamma_ec, r.delta, r.level, r.gamma_ec / r.delta, i, r.ok))
        table.rows.append(("rec", r.gamma_rec, r.delta, r.level, r.gamma_rec / r.delta, i, r.ok))
    return table
