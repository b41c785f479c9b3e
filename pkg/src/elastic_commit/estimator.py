"""Monte Carlo and exact small-instance estimates of the security properties.

Every trial draws from its own substream ``substream(master, PURPOSE_TRIAL,
group, index)``, so results do not depend on how trials are split across
worker processes or resumed from a checkpoint. Rates get exact
Clopper-Pearson intervals; averaged distances get a percentile bootstrap.
"""

from __future__ import annotations

import enum
import json
import math
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from functools import partial
from pathlib import Path
from typing import Callable, Sequence

import numpy as np
from scipy import stats

from . import bits as B
from .adversary import (AttackReport, CheatingAliceConfig, binding_attack_exhaustive, binding_attack_sampled,
                        cheating_session, collision_census, converse_draw)
from .capacity import ChannelFamily, ChannelKind
from .channel import Role, make_channel
from .errors import BudgetError, DomainError
from .infotheory import binding_bound_second_round, leftover_hash_bound, lemma4_bound
from .protocol import CommitSession, ProtocolParams, run_commit, soundness_bound
from .rng import PURPOSE_BOOTSTRAP, PURPOSE_TRIAL, child_seed, substream

EXACT_MAX_BITS = 20
BOOTSTRAP_RESAMPLES = 1000
CHECKPOINT_BLOCK = 500


class Scenario(str, enum.Enum):
    HONEST = "honest"
    CHEATING_ALICE = "cheating_alice"
    DISHONEST_BOB = "dishonest_bob"


class Property(str, enum.Enum):
    SOUNDNESS = "soundness"
    BINDING = "binding"
    CONCEALMENT = "concealment"
    Z_CHANNEL = "z_channel"


@dataclass(frozen=True)
class TrialPlan:
    trials: int
    master_seed: int
    params: ProtocolParams
    scenario: Scenario = Scenario.HONEST
    s: float | None = None

    def __post_init__(self):
        if self.trials < 1:
            raise DomainError("trials must be at least 1")
        if not 0 <= self.master_seed < 2**64:
            raise DomainError("master_seed must be a 64-bit unsigned integer")
        sc = Scenario(self.scenario)
        object.__setattr__(self, "scenario", sc)
        if sc is not Scenario.HONEST:
            if self.s is None or not self.params.gamma <= self.s <= self.params.delta:
                raise DomainError(f"{sc.value} needs s in [gamma, delta], got {self.s}")

    def fingerprint(self) -> dict:
        return {"trials": self.trials, "master_seed": self.master_seed, "params": self.params.to_dict(),
                "scenario": self.scenario.value, "s": self.s}


@dataclass
class SecurityReport:
    property: Property
    point_estimate: float
    ci_low: float
    ci_high: float
    trials: int
    comparison_bound: float
    bound_source: str
    details: dict = field(default_factory=dict)
    breakdown: list["SecurityReport"] = field(default_factory=list)

    def __post_init__(self):
        self.property = Property(self.property)
        if not self.ci_low <= self.point_estimate <= self.ci_high:
            raise ValueError("confidence interval does not bracket the estimate")

    @property
    def within_bound(self) -> bool:
        """Whether the interval is consistent with the bound.

        For the Z channel the bound is an exact value that the interval
        should cover; for everything else it is an upper bound.
        """
        if self.property is Property.Z_CHANNEL:
            return self.ci_low <= self.comparison_bound <= self.ci_high
        return self.ci_low <= self.comparison_bound

    def to_dict(self) -> dict:
        out = {
            "property": self.property.value,
            "point_estimate": self.point_estimate,
            "ci_low": self.ci_low,
            "ci_high": self.ci_high,
            "trials": self.trials,
            "comparison_bound": self.comparison_bound,
            "bound_source": self.bound_source,
            "within_bound": self.within_bound,
            "details": self.details,
        }
        if self.breakdown:
            out["breakdown"] = [r.to_dict() for r in self.breakdown]
        return out

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True, indent=2, default=_json_default)


def _json_default(v):
    if isinstance(v, (np.integer,)):
        return int(v)
    if isinstance(v, (np.floating,)):
        return float(v)
    if isinstance(v, np.ndarray):
        return v.tolist()
    raise TypeError(f"not JSON serialisable: {type(v)}")


def clopper_pearson(successes: int, trials: int, level: float = 0.95) -> tuple[float, float]:
    ci = stats.binomtest(int(successes), int(trials)).proportion_ci(confidence_level=level, method="exact")
    return float(ci.low), float(ci.high)


def bootstrap_mean_ci(values: Sequence[float], seed: int, level: float = 0.95,
                      resamples: int = BOOTSTRAP_RESAMPLES) -> tuple[float, float]:
    data = np.asarray(values, dtype=float)
    mean = float(data.mean())
    if data.size < 2 or np.ptp(data) == 0:
        return mean, mean
    res = stats.bootstrap((data,), np.mean, n_resamples=resamples, method="percentile",
                          confidence_level=level, rng=substream(seed, PURPOSE_BOOTSTRAP))
    lo, hi = float(res.confidence_interval.low), float(res.confidence_interval.high)
    return min(lo, mean), max(hi, mean)


def _rate_report(prop, hits: int, trials: int, bound: float, source: str, **details) -> SecurityReport:
    lo, hi = clopper_pearson(hits, trials)
    rate = hits / trials
    return SecurityReport(prop, rate, min(lo, rate), max(hi, rate), trials, bound, source,
                          dict(details, count=hits))


# trial runner -----------------------------------------------------------


def _run_block(fn: Callable, group: int, start: int, stop: int) -> list:
    return [fn(group, i) for i in range(start, stop)]


def run_trials(fn: Callable, trials: int, group: int = 0, workers: int = 1,
               checkpoint: str | os.PathLike | None = None, fingerprint: dict | None = None,
               block: int = CHECKPOINT_BLOCK) -> list:
    """Evaluate ``fn(group, i)`` for i in range(trials), in index order.

    ``fn`` must be picklable when ``workers > 1``. With ``checkpoint`` the
    results gathered so far are saved after every block as JSON
    ``{"fingerprint", "group", "cursor", "results"}`` and a rerun with the
    same fingerprint resumes from the cursor.
    """
    results: list = []
    path = Path(checkpoint) if checkpoint is not None else None
    key = {"fingerprint": fingerprint, "group": group}
    if path is not None and path.exists():
        state = json.loads(path.read_text())
        if {"fingerprint": state.get("fingerprint"), "group": state.get("group")} == key:
            results = state["results"][: state["cursor"]]
    blocks = [(s, min(s + block, trials)) for s in range(len(results), trials, block)]

    def save():
        if path is None:
            return
        tmp = path.with_suffix(path.suffix + ".tmp")
        tmp.write_text(json.dumps(dict(key, cursor=len(results), results=results), default=_json_default))
        os.replace(tmp, path)

    if workers <= 1 or len(blocks) <= 1:
        for s, e in blocks:
            results.extend(_run_block(fn, group, s, e))
            save()
        return results
    with ProcessPoolExecutor(max_workers=workers) as pool:
        futures = [pool.submit(_run_block, fn, group, s, e) for s, e in blocks]
        for fut in futures:  # collected in submission order
            results.extend(fut.result())
            save()
    return results


# soundness --------------------------------------------------------------

C_MODES = ("zeros", "ones", "random")


def _commit_string(mode: str, m: int, rng: np.random.Generator) -> np.ndarray:
    if mode == "zeros":
        return B.zeros(m)
    if mode == "ones":
        return B.ones(m)
    if mode == "random":
        return B.random_bits(rng, m)
    raise DomainError(f"unknown commit-string mode {mode!r}")


def _soundness_trial(params: ProtocolParams, master: int, mode: str, force: float | None,
                     group: int, i: int) -> int:
    rng = substream(master, PURPOSE_TRIAL, group, i)
    fam = ChannelFamily(ChannelKind.REC, params.delta, params.gamma)
    channel = make_channel(fam, child_seed(rng), n=params.n, force_crossover=force)
    c = _commit_string(mode, params.m, rng)
    session = run_commit(params, c, channel, rng)
    return int(not session.reveal().accepted)


def estimate_soundness(plan: TrialPlan, c_modes: Sequence[str] = C_MODES, workers: int = 1,
                       checkpoint=None, force_crossover: float | None = None) -> SecurityReport:
    """Rejection rate of honest commit/reveal runs, for each commit-string choice.

    The headline estimate is the worst mode (the definition maximises over
    the committed string); each mode has its own entry in ``breakdown``.
    ``force_crossover`` overrides the channel (e.g. 0 for a noiseless one).
    """
    if plan.scenario is not Scenario.HONEST:
        raise DomainError("soundness is defined for honest runs")
    p = plan.params
    bound = soundness_bound(p)
    source = "chernoff 2exp(-2 n alpha1^2)"
    parts = []
    for g, mode in enumerate(c_modes):
        fn = partial(_soundness_trial, p, plan.master_seed, mode, force_crossover)
        ck = None if checkpoint is None else f"{checkpoint}.{mode}"
        res = run_trials(fn, plan.trials, group=g, workers=workers, checkpoint=ck,
                         fingerprint=dict(plan.fingerprint(), mode=mode, force=force_crossover))
        parts.append(_rate_report(Property.SOUNDNESS, sum(res), plan.trials, bound, source, c_mode=mode))
    worst = max(parts, key=lambda r: r.point_estimate)
    return SecurityReport(Property.SOUNDNESS, worst.point_estimate, worst.ci_low, worst.ci_high,
                          plan.trials, bound, source, {"worst_c_mode": worst.details["c_mode"],
                                                       "trials_per_mode": plan.trials}, parts)


# binding ----------------------------------------------------------------


def _binding_trial(params: ProtocolParams, master: int, s: float, attack: str, budget: int | None,
                   anchored: bool, census: bool, group: int, i: int) -> list:
    rng = substream(master, PURPOSE_TRIAL, group, i)
    c = B.random_bits(rng, params.m)
    session = cheating_session(params, c, CheatingAliceConfig(s), child_seed(rng), rng)
    if attack == "exhaustive":
        r = binding_attack_exhaustive(session, anchored=anchored)
    else:
        r = binding_attack_sampled(session, candidates=budget, rng=rng, anchored=anchored)
    row = [int(r.success), r.search_size]
    if census:
        cen = collision_census(session)
        row += [cen.collisions, cen.max_bucket, cen.census_size]
    return row


def estimate_binding(plan: TrialPlan, attack: str = "exhaustive", attack_budget: int | None = None,
                     s_values: Sequence[float] | None = None, anchored: bool = False,
                     census: bool | None = None, workers: int = 1, checkpoint=None) -> SecurityReport:
    """Fraction of cheating-Alice sessions with two accepted openings.

    Sweeps ``s`` over ``s_values`` (default gamma, the midpoint and delta,
    or the plan's ``s`` if given); the headline is the worst ``s``.
    """
    p = plan.params
    if attack not in ("exhaustive", "sampled"):
        raise DomainError(f"unknown attack {attack!r}")
    if attack == "exhaustive" and p.n > 20:
        raise BudgetError(f"exhaustive attack at n={p.n} exceeds the 2^20 budget")
    if attack == "sampled" and (attack_budget is None or attack_budget < 1):
        raise DomainError("sampled attack needs a positive candidate budget")
    if s_values is None:
        s_values = [plan.s] if plan.s is not None else [p.gamma, 0.5 * (p.gamma + p.delta), p.delta]
    if census is None:
        census = attack == "exhaustive"
    bound = binding_bound_second_round(p.n, p.beta2, simplified=False)
    source = "second-round union bound (8n+1)(8n)2^(-n beta2)"
    parts = []
    for g, s in enumerate(s_values):
        fn = partial(_binding_trial, p, plan.master_seed, float(s), attack, attack_budget, anchored, census)
        ck = None if checkpoint is None else f"{checkpoint}.s{g}"
        res = run_trials(fn, plan.trials, group=g, workers=workers, checkpoint=ck,
                         fingerprint=dict(plan.fingerprint(), s=float(s), attack=attack,
                                          budget=attack_budget, anchored=anchored, census=census))
        arr = np.array(res, dtype=float)
        det = {"s": float(s), "attack": attack, "budget": attack_budget, "anchored": anchored,
               "mean_search_size": float(arr[:, 1].mean())}
        if census:
            det.update(census_mean_collisions=float(arr[:, 2].mean()),
                       census_max_bucket=int(arr[:, 3].max()),
                       census_mean_size=float(arr[:, 4].mean()),
                       census_runs_within_8n_plus_1=float(np.mean(arr[:, 3] <= 8 * p.n + 1)))
        parts.append(_rate_report(Property.BINDING, int(arr[:, 0].sum()), plan.trials, bound, source, **det))
    worst = max(parts, key=lambda r: r.point_estimate)
    return SecurityReport(Property.BINDING, worst.point_estimate, worst.ci_low, worst.ci_high,
                          plan.trials, bound, source, {"worst_s": worst.details["s"], "attack": attack},
                          parts)


# concealment ------------------------------------------------------------


@dataclass(frozen=True)
class ViewDistance:
    distance: float        # SD of Ext(X) | view from uniform
    min_entropy: float     # H_inf(X | view)
    lhl_bound: float       # leftover-hash bound at that min-entropy
    consistent: int        # number of x consistent with the hashes


def view_key_distance(session: CommitSession, crossover: float | None = None,
                      key_bits: int | None = None) -> ViewDistance:
    """Exact distance of the extracted key from uniform given Bob's commit view.

    Enumerates all 2^n inputs, keeps those matching (h1, h2), weights them by
    the BSC(crossover) likelihood of Bob's y, and pushes the posterior through
    Ext. ``key_bits`` keeps only the leading key bits.
    """
    p = session.params
    if p.n > EXACT_MAX_BITS:
        raise BudgetError(f"exact enumeration at n={p.n} exceeds 2^{EXACT_MAX_BITS}")
    s = p.delta if crossover is None else crossover
    t = session.transcript
    rows = B.all_vectors(p.n)
    keep = np.all(t.g2.evaluate_many(rows) == t.h2, axis=1)
    idx = np.flatnonzero(keep)
    idx = idx[np.all(t.g1.evaluate_many(rows[idx]) == t.h1, axis=1)]
    if idx.size == 0:
        raise RuntimeError("no input is consistent with the view")
    cand = rows[idx]
    d = np.count_nonzero(cand != session.y[None, :], axis=1)
    if s in (0.0, 1.0):
        w = (d == (0 if s == 0.0 else p.n)).astype(float)
    else:
        logw = d * math.log(s) + (p.n - d) * math.log1p(-s)
        w = np.exp(logw - logw.max())
    post = w / w.sum()
    k = -math.log2(float(post.max()))
    m = p.m if key_bits is None else int(key_bits)
    if m == 0:
        return ViewDistance(0.0, k, leftover_hash_bound(k, 0), int(idx.size))
    keys = t.ext.evaluate_many(cand)[:, :m]
    codes = B.rows_to_ints(keys).astype(np.int64)
    pk = np.bincount(codes, weights=post, minlength=1 << m)
    sd = 0.5 * float(np.abs(pk - 2.0 ** -m).sum())
    return ViewDistance(sd, k, leftover_hash_bound(k, m), int(idx.size))


def _concealment_trial(params: ProtocolParams, master: int, scenario: str, s: float | None,
                       group: int, i: int) -> list:
    rng = substream(master, PURPOSE_TRIAL, group, i)
    c = B.random_bits(rng, params.m)
    if Scenario(scenario) is Scenario.DISHONEST_BOB:
        fam = ChannelFamily(ChannelKind.EC, params.delta, params.gamma)
        channel = make_channel(fam, child_seed(rng), n=params.n)
        channel.control(Role.BOB).set(s)
        crossover = s
    else:
        fam = ChannelFamily(ChannelKind.REC, params.delta, params.gamma)
        channel = make_channel(fam, child_seed(rng), n=params.n)
        crossover = params.delta
    session = run_commit(params, c, channel, rng)
    v = view_key_distance(session, crossover)
    return [v.distance, v.min_entropy, v.lhl_bound, v.consistent]


def lemma4_key_bound(params: ProtocolParams, zeta: float | None = None,
                     alpha2: float | None = None) -> tuple[float, float]:
    """(k, distance bound) from the smoothed min-entropy lower bound.

    ``zeta`` and ``alpha2`` (with eps1 = 2^(-n alpha2)) default to a quarter
    of the slack beta3 - beta1 - beta2 each. The distance bound adds 2 eps1
    for the smoothing and is infinite when k is negative.
    """
    slack = params.beta3 - params.beta1 - params.beta2
    zeta = slack / 4 if zeta is None else zeta
    alpha2 = slack / 4 if alpha2 is None else alpha2
    eps1 = 2.0 ** (-params.n * alpha2)
    k = lemma4_bound(params.n, params.delta, params.kappa, params.beta1, params.beta2, zeta, eps1)
    if k < 0:
        return k, math.inf
    return k, leftover_hash_bound(k, params.m) + 2 * eps1


def estimate_concealment_exact(plan: TrialPlan, views_samples: int | None = None, workers: int = 1,
                               checkpoint=None) -> SecurityReport:
    """Average exact key distance over sampled Bob views.

    ``comparison_bound`` is the average of the per-view leftover-hash bounds
    at the exact conditional min-entropy; the asymptotic bound from the
    smoothed min-entropy argument is reported in ``details``.
    """
    p = plan.params
    if p.n > EXACT_MAX_BITS:
        raise BudgetError(f"exact concealment at n={p.n} exceeds the 2^{EXACT_MAX_BITS} budget")
    views = plan.trials if views_samples is None else int(views_samples)
    fn = partial(_concealment_trial, p, plan.master_seed, plan.scenario.value, plan.s)
    res = run_trials(fn, views, group=0, workers=workers, checkpoint=checkpoint,
                     fingerprint=dict(plan.fingerprint(), views=views))
    arr = np.array(res, dtype=float)
    dist = arr[:, 0]
    lo, hi = bootstrap_mean_ci(dist, plan.master_seed)
    k4, b4 = lemma4_key_bound(p)
    blo, bhi = bootstrap_mean_ci(arr[:, 2], plan.master_seed ^ 1)
    return SecurityReport(
        Property.CONCEALMENT, float(dist.mean()), lo, hi, views, float(arr[:, 2].mean()),
        "mean leftover-hash bound at exact per-view min-entropy",
        {"scenario": plan.scenario.value, "s": plan.s, "m": p.m,
         "mean_min_entropy": float(arr[:, 1].mean()), "mean_consistent": float(arr[:, 3].mean()),
         "bound_ci_low": blo, "bound_ci_high": bhi,
         "max_distance": float(dist.max()), "lemma4_k": k4, "lemma4_distance_bound": b4})


# the converse's Z channel ----------------------------------------------


def estimate_z_channel(s: float, n_bits: int, trials: int, rng: np.random.Generator,
                       gamma: float = 0.1, delta: float = 0.2) -> SecurityReport:
    """Empirical z/y disagreement rate of the converse construction, compared with delta."""
    if not gamma <= s <= delta:
        raise DomainError(f"s={s} outside [{gamma}, {delta}]")
    flips = 0
    for _ in range(trials):
        v = converse_draw(gamma, delta, s, n_bits, rng)
        flips += B.hamming(v.z, v.y)
    total = n_bits * trials
    lo, hi = clopper_pearson(flips, total)
    rate = flips / total
    sigma = math.sqrt(delta * (1 - delta) / total)
    return SecurityReport(Property.Z_CHANNEL, rate, min(lo, rate), max(hi, rate), total, delta,
                          "kappa_s * s = delta",
                          {"s": s, "sigma": sigma, "z_score": (rate - delta) / sigma,
                           "within_3_sigma": abs(rate - delta) <= 3 * sigma})


# attack reports ---------------------------------------------------------


def _attack_trial(params: ProtocolParams, master: int, s: float, mode: str, budget: int,
                  anchored: bool, group: int, i: int) -> list:
    rng = substream(master, PURPOSE_TRIAL, group, i)
    c = B.random_bits(rng, params.m)
    session = cheating_session(params, c, CheatingAliceConfig(s), child_seed(rng), rng)
    if mode == "exhaustive":
        r = binding_attack_exhaustive(session, anchored=anchored)
        hist = collision_census(session).histogram
    else:
        r = binding_attack_sampled(session, candidates=budget, rng=rng, anchored=anchored)
        hist = collision_census(session, candidates=budget, rng=rng).histogram
    return [int(r.success), r.search_size, {str(k): v for k, v in hist.items()}]


def attack_report(params: ProtocolParams, s: float, trials: int, master_seed: int,
                  mode: str = "exhaustive", budget: int | None = None, anchored: bool = False,
                  workers: int = 1, checkpoint=None) -> AttackReport:
    """Run the binding attack on ``trials`` cheating sessions and pool the census."""
    if mode == "exhaustive" and params.n > 20:
        raise BudgetError(f"exhaustive attack at n={params.n} exceeds the 2^20 budget")
    if mode == "sampled" and (budget is None or budget < 1):
        raise DomainError("sampled attack needs a positive candidate budget")
    fn = partial(_attack_trial, params, master_seed, float(s), mode, budget, anchored)
    res = run_trials(fn, trials, workers=workers, checkpoint=checkpoint,
                     fingerprint={"params": params.to_dict(), "s": s, "trials": trials,
                                  "seed": master_seed, "mode": mode, "budget": budget,
                                  "anchored": anchored})
    pooled: dict[int, int] = {}
    for _, _, hist in res:
        for k, v in hist.items():
            pooled[int(k)] = pooled.get(int(k), 0) + v
    return AttackReport(params, mode, float(s), trials, sum(r[0] for r in res),
                        budget if mode == "sampled" else None,
                        float(np.mean([r[1] for r in res])), pooled)
