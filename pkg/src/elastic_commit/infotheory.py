"""Scalar information measures and the bound formulas consumed elsewhere.

All entropies are in bits. ``0 * log2(0)`` is taken to be 0.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Hashable, Sequence

import numpy as np

from .errors import DomainError

# Base of the logarithm in the log(1/eps1) term of the smoothed min-entropy
# bound. Bits, like every protocol length.
LOG_BASE_EPS = 2.0

_MASS_TOL = 1e-12


def _check_prob(name: str, p: float) -> float:
    p = float(p)
    if not 0.0 <= p <= 1.0 or math.isnan(p):
        raise DomainError(f"{name}={p!r} is not a probability")
    return p


@dataclass(frozen=True)
class FiniteDistribution:
    """Probability masses over a finite outcome set.

    ``labels`` is optional; when present it must have one entry per mass and
    identifies outcomes (tuples ``(x, y)`` for joint distributions).
    """

    masses: np.ndarray
    labels: tuple[Hashable, ...] | None = None

    def __init__(self, masses: Sequence[float], labels: Sequence[Hashable] | None = None):
        arr = np.asarray(masses, dtype=float).reshape(-1)
        if arr.size == 0:
            raise DomainError("empty distribution")
        if (arr < 0).any() or not np.isfinite(arr).all():
            raise DomainError("masses must be finite and non-negative")
        if abs(arr.sum() - 1.0) > _MASS_TOL * max(1, arr.size):
            raise DomainError(f"masses sum to {arr.sum()!r}, not 1")
        if labels is not None:
            labels = tuple(labels)
            if len(labels) != arr.size:
                raise DomainError("one label per mass required")
            if len(set(labels)) != len(labels):
                raise DomainError("duplicate outcome labels")
        object.__setattr__(self, "masses", arr)
        object.__setattr__(self, "labels", labels)

    @classmethod
    def uniform(cls, size: int) -> "FiniteDistribution":
        return cls(np.full(size, 1.0 / size))

    @classmethod
    def point_mass(cls, size: int, index: int = 0) -> "FiniteDistribution":
        masses = np.zeros(size)
        masses[index] = 1.0
        return cls(masses)

    @classmethod
    def from_mapping(cls, mapping: dict) -> "FiniteDistribution":
        keys = list(mapping)
        return cls([mapping[k] for k in keys], labels=keys)

    def __len__(self) -> int:
        return self.masses.size


def binary_entropy(p: float) -> float:
    p = _check_prob("p", p)
    if p == 0.0 or p == 1.0:
        return 0.0
    return -p * math.log2(p) - (1.0 - p) * math.log2(1.0 - p)


def star(p: float, q: float) -> float:
    """Crossover of two cascaded binary symmetric channels: p(1-q) + (1-p)q."""
    p = _check_prob("p", p)
    q = _check_prob("q", q)
    return p * (1.0 - q) + (1.0 - p) * q


def kappa(s: float, delta: float) -> float:
    """Crossover k with ``star(k, s) == delta``, i.e. (delta - s) / (1 - 2s)."""
    s = _check_prob("s", s)
    delta = _check_prob("delta", delta)
    if delta >= 0.5:
        raise DomainError(f"delta={delta} must be below 1/2")
    if s > delta:
        raise DomainError(f"s={s} exceeds delta={delta}")
    return (delta - s) / (1.0 - 2.0 * s)


def min_entropy(d: FiniteDistribution) -> float:
    return -math.log2(float(d.masses.max()))


def max_entropy(d: FiniteDistribution) -> float:
    """Hartley entropy: log2 of the support size."""
    return math.log2(int(np.count_nonzero(d.masses)))


def _joint_matrix(joint) -> np.ndarray:
    """Return the joint as a 2-D array indexed ``[x, y]``."""
    if isinstance(joint, FiniteDistribution):
        if joint.labels is None:
            raise DomainError("joint distribution needs (x, y) labels")
        xs = sorted({lab[0] for lab in joint.labels}, key=repr)
        ys = sorted({lab[1] for lab in joint.labels}, key=repr)
        xi = {x: i for i, x in enumerate(xs)}
        yi = {y: i for i, y in enumerate(ys)}
        mat = np.zeros((len(xs), len(ys)))
        for (x, y), m in zip(joint.labels, joint.masses):
            mat[xi[x], yi[y]] += m
        return mat
    mat = np.asarray(joint, dtype=float)
    if mat.ndim != 2 or (mat < 0).any():
        raise DomainError("joint must be a non-negative 2-D array [x, y]")
    if abs(mat.sum() - 1.0) > _MASS_TOL * max(1, mat.size):
        raise DomainError("joint masses do not sum to 1")
    return mat


def cond_min_entropy(joint) -> float:
    """Worst-case conditional min-entropy ``min_y H_inf(X | Y=y)``.

    ``joint`` is a :class:`FiniteDistribution` labelled by ``(x, y)`` pairs or
    a 2-D array indexed ``[x, y]``. Values of ``y`` with zero probability are
    skipped.
    """
    mat = _joint_matrix(joint)
    py = mat.sum(axis=0)
    live = py > 0
    if not live.any():
        raise DomainError("all conditioning values have zero probability")
    worst = (mat[:, live].max(axis=0) / py[live]).max()
    return -math.log2(float(worst))


def smooth_min_entropy(d: FiniteDistribution, eps: float) -> float:
    """eps-smooth min-entropy under statistical distance.

    The optimum flattens the largest masses down to a common cap ``t`` that
    removes exactly ``eps`` of mass, and spreads the removed mass over the
    outcomes below the cap. The cap can never go below ``1/len(d)``.
    """
    eps = float(eps)
    if not 0.0 <= eps < 1.0:
        raise DomainError(f"eps={eps} must lie in [0, 1)")
    p = np.sort(d.masses)[::-1]
    if eps == 0.0:
        return -math.log2(float(p[0]))
    # Mass above cap t with the top k outcomes clipped: prefix[k] - k*t.
    prefix = np.cumsum(p)
    cap = p[0]
    for k in range(1, p.size + 1):
        # Lower the top-k block to t; valid while t >= p[k] (next outcome).
        t = (prefix[k - 1] - eps) / k
        nxt = p[k] if k < p.size else 0.0
        if t >= nxt:
            cap = t
            break
    cap = max(cap, 1.0 / p.size)
    return -math.log2(float(cap))


def statistical_distance(p: FiniteDistribution, q: FiniteDistribution) -> float:
    if len(p) != len(q):
        raise DomainError("distributions have different outcome sets")
    if p.labels is not None or q.labels is not None:
        if p.labels is None or q.labels is None or set(p.labels) != set(q.labels):
            raise DomainError("distributions have different outcome sets")
        order = {lab: i for i, lab in enumerate(q.labels)}
        qm = q.masses[[order[lab] for lab in p.labels]]
    else:
        qm = q.masses
    return 0.5 * float(np.abs(p.masses - qm).sum())


def leftover_hash_bound(k: float, l: int) -> float:
    """Distance of a universally hashed l-bit output from uniform, given min-entropy k."""
    if k < 0 or l < 0:
        raise DomainError("k and l must be non-negative")
    return 0.5 * math.sqrt(2.0 ** (l - k))


def lemma4_bound(n: int, delta: float, kappa: float, beta1: float, beta2: float,
                 zeta: float, eps1: float) -> float:
    """Lower bound on the eps1-smoothed min-entropy of X given Bob's commit view.

    n(H(delta) - zeta - H(kappa) - beta1 - beta2) - log(1/eps1), log in base
    :data:`LOG_BASE_EPS`.
    """
    if not 0.0 < eps1 <= 1.0:
        raise DomainError(f"eps1={eps1} must lie in (0, 1]")
    linear = n * (binary_entropy(delta) - zeta - binary_entropy(kappa) - beta1 - beta2)
    return linear - math.log(1.0 / eps1, LOG_BASE_EPS)


def expected_collision_bound(n: int, beta1: float, eta: float) -> float:
    """Bound 2^(-n(beta1 - eta)) on the expected first-round collision count."""
    if not 0.0 < eta < beta1:
        raise DomainError(f"need 0 < eta < beta1, got eta={eta}, beta1={beta1}")
    return 2.0 ** (-n * (beta1 - eta))


def binding_bound_second_round(n: int, beta2: float, simplified: bool = True) -> float:
    """Probability that the second hash round leaves a colliding pair.

    With ``simplified=False`` returns the union-bound form
    ``(8n+1)(8n) 2^(-n beta2)``, which only drops below the simplified
    ``2^(-n beta2 / 2)`` once n is large.
    """
    if beta2 <= 0:
        raise DomainError("beta2 must be positive")
    if simplified:
        return 2.0 ** (-n * beta2 / 2.0)
    return (8 * n + 1) * (8 * n) * 2.0 ** (-n * beta2)


def rompel_tail(k: int, mu: float, delta_dev: float) -> float:
    """Kernel ((k mu + k^2) / D^2)^(k/2) of the k-wise independent tail bound."""
    if k <= 0 or k % 2:
        raise DomainError(f"k={k} must be a positive even integer")
    if mu < 0:
        raise DomainError("mu must be non-negative")
    if delta_dev <= 0:
        raise DomainError("deviation must be positive")
    return ((k * mu + k * k) / (delta_dev * delta_dev)) ** (k / 2)
