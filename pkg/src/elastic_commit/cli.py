"""Command-line entry point.

Subcommands: capacity, curve, contour, simulate, attack, estimate. Exit codes:
0 success, 2 invalid parameters, 3 I/O failure, 4 computation over budget.
``ELASTIC_COMMIT_SEED`` overrides ``--seed`` when set.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from pathlib import Path

from . import capacity as cap
from .errors import BudgetError, ConfigurationError, DomainError
from .protocol import (DEFAULT_ALPHA1, DEFAULT_BETA1, DEFAULT_BETA2, DEFAULT_BETA3, derive_params,
                       run_commit)
from .rng import SEED_ENV_VAR, parse_seed

EXIT_OK = 0
EXIT_INVALID = 2
EXIT_IO = 3
EXIT_BUDGET = 4

DEFAULT_DELTAS = (0.1, 0.2, 0.3, 0.4)


class UsageError(Exception):
    pass


def _add_channel(p: argparse.ArgumentParser, family: bool = True) -> None:
    if family:
        p.add_argument("--family", default="rec", choices=[k.value for k in cap.ChannelKind])
    p.add_argument("--gamma", type=float, default=0.1)
    p.add_argument("--gamma-a", type=float, dest="gamma_a")
    p.add_argument("--gamma-b", type=float, dest="gamma_b")
    p.add_argument("--delta", type=float, default=0.2)


def _add_protocol(p: argparse.ArgumentParser, n: int) -> None:
    p.add_argument("--n", type=int, default=n)
    p.add_argument("--beta1", type=float, default=DEFAULT_BETA1)
    p.add_argument("--beta2", type=float, default=DEFAULT_BETA2)
    p.add_argument("--beta3", type=float, default=DEFAULT_BETA3)
    p.add_argument("--alpha1", type=float, default=DEFAULT_ALPHA1)
    p.add_argument("--l1", type=int, help="override the first hash length")
    p.add_argument("--l2", type=int, help="override the second hash length")
    p.add_argument("--m", type=int, help="override the committed string length")


def _add_run(p: argparse.ArgumentParser, trials: int) -> None:
    p.add_argument("--trials", type=int, default=trials)
    p.add_argument("--seed", default="0")
    p.add_argument("--workers", type=int, default=os.cpu_count() or 1)
    p.add_argument("--out")
    p.add_argument("--checkpoint", help="resumable state file for long runs")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="elastic-commit",
                                     description="Commitment over elastic noisy channels.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("capacity", help="commitment capacity of one channel")
    _add_channel(p)
    p.add_argument("--format", choices=["text", "json"], default="text")

    for name, help_ in (("curve", "capacity of every family over a gamma grid"),
                        ("contour", "(gamma_EC, gamma_REC) pairs of equal capacity")):
        p = sub.add_parser(name, help=help_)
        p.add_argument("--delta", type=float, nargs="*", default=list(DEFAULT_DELTAS))
        p.add_argument("--grid", type=int, default=49)
        p.add_argument("--out")
        p.add_argument("--format", choices=["csv", "json"], default="csv")

    p = sub.add_parser("simulate", help="honest runs: soundness report")
    _add_channel(p, family=False)
    _add_protocol(p, 1024)
    _add_run(p, 1000)
    p.add_argument("--c-mode", choices=["zeros", "ones", "random", "all"], default="all")
    p.add_argument("--transcript", help="also dump the transcript of one session as JSON")

    p = sub.add_parser("attack", help="binding attacks by a cheating Alice")
    _add_channel(p, family=False)
    _add_protocol(p, 16)
    _add_run(p, 100)
    p.add_argument("--mode", choices=["exhaustive", "sampled"], default="exhaustive")
    p.add_argument("--s", type=float, help="Alice's crossover (default gamma)")
    p.add_argument("--budget", type=int, default=10_000, help="candidates per sampled attack")
    p.add_argument("--anchored", action="store_true", help="one opening must be the committed one")

    p = sub.add_parser("estimate", help="security estimates with confidence intervals")
    _add_channel(p, family=False)
    _add_protocol(p, 16)
    _add_run(p, 200)
    p.add_argument("--property", choices=["soundness", "binding", "concealment", "z-channel"],
                   default="concealment")
    p.add_argument("--s", type=float, help="dishonest party's crossover")
    p.add_argument("--attack", choices=["exhaustive", "sampled"], default="exhaustive")
    p.add_argument("--budget", type=int, default=10_000)
    p.add_argument("--bits", type=int, default=1_000_000, help="bits per z-channel trial")
    p.add_argument("--scenario", choices=["honest", "dishonest_bob"], default="honest")
    return parser


def _seed(args) -> int:
    text = os.environ.get(SEED_ENV_VAR) or args.seed
    try:
        return parse_seed(str(text))
    except ValueError as exc:
        raise UsageError(str(exc)) from exc


def _family(args) -> cap.ChannelFamily:
    kind = cap.ChannelKind(args.family)
    if kind is cap.ChannelKind.GEC:
        return cap.ChannelFamily(kind, args.delta, gamma_a=args.gamma_a, gamma_b=args.gamma_b)
    if kind is cap.ChannelKind.BSC:
        return cap.ChannelFamily(kind, args.delta)
    return cap.ChannelFamily(kind, args.delta, args.gamma)


def _params(args):
    return derive_params(args.n, args.gamma, args.delta, args.beta1, args.beta2, args.beta3,
                         args.alpha1, l1=args.l1, l2=args.l2, m=args.m)


def _check_out(path: str | None) -> None:
    if path is None:
        return
    parent = Path(path).resolve().parent
    if not parent.is_dir() or not os.access(parent, os.W_OK):
        raise OSError(f"cannot write to {path}")
    if Path(path).is_dir():
        raise OSError(f"{path} is a directory")


def _emit(text: str, out: str | None) -> None:
    if out is None:
        sys.stdout.write(text if text.endswith("\n") else text + "\n")
    else:
        Path(out).write_text(text if text.endswith("\n") else text + "\n")


# commands ---------------------------------------------------------------


def cmd_capacity(args) -> int:
    fam = _family(args)
    res = cap.capacity(fam)
    note = None
    if res is None:
        note = "conjectured equal to REC capacity; not computed"
    elif fam.kind is cap.ChannelKind.UNC and cap.unc_impossible(fam.gamma, fam.delta):
        note = "commitment impossible: delta >= 2 gamma (1 - gamma)"
    if args.format == "json":
        out = {"family": fam.kind.value, "description": fam.describe(), "delta": fam.delta,
               "gamma": fam.gamma, "gamma_a": fam.gamma_a, "gamma_b": fam.gamma_b,
               "capacity": None if res is None else res.value, "note": note}
        _emit(json.dumps(out, sort_keys=True, indent=2), None)
        return EXIT_OK
    if res is None:
        print(f"{fam.describe()}: {note}")
    else:
        line = f"{fam.describe()} capacity = {res.value:.9f}"
        print(line + (f" ({note})" if note else ""))
    return EXIT_OK


def _table_output(table: cap.Table, args) -> None:
    if args.format == "json":
        rows = [dict(zip(table.columns, r)) for r in table.rows]
        text = json.dumps({"columns": list(table.columns), "rows": rows}, sort_keys=True, indent=2)
        _emit(text, args.out)
    else:
        _emit(table.to_csv(), args.out)


def cmd_curve(args) -> int:
    _check_out(args.out)
    table = cap.curve_table(cap.curve_series(args.delta, args.grid))
    _table_output(table, args)
    return EXIT_OK


def cmd_contour(args) -> int:
    _check_out(args.out)
    table = cap.contour_table(cap.contour_series(args.delta, args.grid))
    _table_output(table, args)
    return EXIT_OK


def _report_out(report, args, summary: str) -> None:
    _emit(report.to_json(), args.out)
    print(summary, file=sys.stdout if args.out else sys.stderr)


def _summary(report, label: str) -> str:
    return (f"{label}: {report.point_estimate:.6g} (95% CI [{report.ci_low:.6g}, {report.ci_high:.6g}],"
            f" {report.trials} trials) vs bound {report.comparison_bound:.6g}"
            f" [{'consistent' if report.within_bound else 'EXCEEDED'}]")


def cmd_simulate(args) -> int:
    from .estimator import C_MODES, TrialPlan, estimate_soundness
    params = _params(args)
    seed = _seed(args)
    plan = TrialPlan(args.trials, seed, params)
    _check_out(args.out)
    _check_out(args.transcript)
    modes = C_MODES if args.c_mode == "all" else (args.c_mode,)
    report = estimate_soundness(plan, modes, workers=args.workers, checkpoint=args.checkpoint)
    report.details["rejection_rate"] = report.point_estimate
    if args.transcript:
        from .channel import make_channel
        from .rng import PURPOSE_TRANSCRIPT, substream
        import numpy as np
        fam = cap.ChannelFamily(cap.ChannelKind.REC, params.delta, params.gamma)
        rng = substream(seed, PURPOSE_TRANSCRIPT)
        session = run_commit(params, np.zeros(params.m, np.uint8), make_channel(fam, seed, n=params.n), rng)
        session.reveal()
        Path(args.transcript).write_text(session.to_json() + "\n")
    _report_out(report, args, _summary(report, "soundness rejection rate"))
    return EXIT_OK


def cmd_attack(args) -> int:
    from .estimator import attack_report
    params = _params(args)
    seed = _seed(args)
    s = params.gamma if args.s is None else args.s
    if args.mode == "exhaustive" and params.n > 20:
        raise BudgetError(f"exhaustive attack at n={params.n} exceeds the 2^20 budget")
    if not params.gamma <= s <= params.delta:
        raise DomainError(f"s={s} outside [gamma, delta]")
    _check_out(args.out)
    rep = attack_report(params, s, args.trials, seed, args.mode, args.budget, anchored=args.anchored,
                        workers=args.workers, checkpoint=args.checkpoint)
    _emit(rep.to_json(), args.out)
    line = (f"binding attack ({args.mode}, s={s:g}): {rep.successes}/{rep.trials} double openings,"
            f" mean search size {rep.mean_search_size:.4g}")
    print(line, file=sys.stdout if args.out else sys.stderr)
    return EXIT_OK


def cmd_estimate(args) -> int:
    from . import estimator as est
    from .rng import substream
    seed = _seed(args)
    prop = args.property
    if prop == "z-channel":
        s = args.gamma if args.s is None else args.s
        if not args.gamma <= s <= args.delta:
            raise DomainError(f"s={s} outside [gamma, delta]")
        _check_out(args.out)
        report = est.estimate_z_channel(s, args.bits, args.trials, substream(seed, 0),
                                        gamma=args.gamma, delta=args.delta)
        _report_out(report, args, _summary(report, "z/y crossover"))
        return EXIT_OK
    params = _params(args)
    if prop == "soundness":
        plan = est.TrialPlan(args.trials, seed, params)
        _check_out(args.out)
        report = est.estimate_soundness(plan, workers=args.workers, checkpoint=args.checkpoint)
    elif prop == "binding":
        if args.attack == "exhaustive" and params.n > 20:
            raise BudgetError(f"exhaustive attack at n={params.n} exceeds the 2^20 budget")
        plan = est.TrialPlan(args.trials, seed, params, est.Scenario.CHEATING_ALICE,
                             params.gamma if args.s is None else args.s)
        _check_out(args.out)
        report = est.estimate_binding(plan, args.attack, args.budget if args.attack == "sampled" else None,
                                      s_values=None if args.s is None else [args.s],
                                      workers=args.workers, checkpoint=args.checkpoint)
    else:
        if params.n > est.EXACT_MAX_BITS:
            raise BudgetError(f"exact concealment at n={params.n} exceeds the 2^20 budget")
        scen = est.Scenario(args.scenario)
        s = None if scen is est.Scenario.HONEST else (params.gamma if args.s is None else args.s)
        plan = est.TrialPlan(args.trials, seed, params, scen, s)
        _check_out(args.out)
        report = est.estimate_concealment_exact(plan, workers=args.workers, checkpoint=args.checkpoint)
    _report_out(report, args, _summary(report, prop))
    return EXIT_OK


COMMANDS = {"capacity": cmd_capacity, "curve": cmd_curve, "contour": cmd_contour,
            "simulate": cmd_simulate, "attack": cmd_attack, "estimate": cmd_estimate}


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    if getattr(args, "trials", 1) < 1:
        print("error: --trials must be at least 1", file=sys.stderr)
        return EXIT_INVALID
    if getattr(args, "workers", 1) < 1:
        print("error: --workers must be at least 1", file=sys.stderr)
        return EXIT_INVALID
    try:
        return COMMANDS[args.command](args)
    except BudgetError as exc:
        print(f"budget error: {exc}", file=sys.stderr)
        return EXIT_BUDGET
    except (DomainError, ConfigurationError, UsageError) as exc:
        print(f"invalid parameters: {exc}", file=sys.stderr)
        return EXIT_INVALID
    except OSError as exc:
        print(f"I/O error: {exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
