"""Command-line front end.

Exit codes: 0 success, 2 usage error, 3 domain/validation error,
4 optimizer did not converge (the result is still written).
"""

from __future__ import annotations

import argparse
import json
import math
import sys
from typing import Sequence

from . import analysis
from .classical import MAX_CLASSICAL_PARTIES, classical_closed_form, classical_value_chsh, classical_value_svetlichny
from .errors import GameError, ValidationError
from .game_model import JointBias, expand_svetlichny, expectation_to_success
from .nonsignaling import (
    behavior_from_strategy,
    deterministic_behavior,
    ns_value,
    pr_box,
    simulate_rounds,
)
from .optimize import OptimizerConfig
from .quantum_chsh import (
    classify_region,
    joint_no_advantage,
    optimal_strategy,
    quantum_value_chsh,
    quantum_value_joint_oracle,
)
from .svetlichny import nonsignaling_value_svetlichny, quantum_value_svetlichny

EXIT_OK, EXIT_USAGE, EXIT_DOMAIN, EXIT_NONCONVERGED = 0, 2, 3, 4


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _pij(text: str) -> list[float]:
    try:
        values = [float(v) for v in text.split(",")]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected four comma-separated floats, got {text!r}")
    if len(values) != 4:
        raise argparse.ArgumentTypeError(f"expected four comma-separated floats, got {text!r}")
    return values


def _add_optimizer(sub):
    sub.add_argument("--starts", type=int, default=32)
    sub.add_argument("--iters", type=int, default=2000)
    sub.add_argument("--opt-tol", type=float, default=1e-10)
    sub.add_argument("--seed", type=int, default=0)


def _add_output(sub, csv_ok=False):
    sub.add_argument("--out", default=None)
    sub.add_argument("--format", choices=["json", "csv"] if csv_ok else ["json"], default="json")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="biasedgames", description="Optimal values of biased nonlocal games.")
    subs = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    sub = subs.add_parser("value", help="optimal value of one game")
    sub.add_argument("--game", choices=["chsh", "joint", "svetlichny"], required=True)
    sub.add_argument("--model", choices=["classical", "quantum", "ns"], required=True)
    sub.add_argument("--p", type=float)
    sub.add_argument("--q", type=float)
    sub.add_argument("--pij", type=_pij)
    sub.add_argument("--n", type=int)
    _add_optimizer(sub)
    _add_output(sub)

    sub = subs.add_parser("region", help="classical/quantum/ns values on a (p, q) grid")
    sub.add_argument("--grid", type=int, default=20)
    _add_output(sub, csv_ok=True)

    sub = subs.add_parser("curves", help="Svetlichny classical and quantum values against p")
    sub.add_argument("--n", type=int, default=3)
    sub.add_argument("--grid", type=int, default=50)
    _add_optimizer(sub)
    _add_output(sub, csv_ok=True)

    sub = subs.add_parser("threshold", help="bias above which quantum gives no advantage")
    sub.add_argument("--n", type=int, default=3)
    sub.add_argument("--tol", type=float, default=1e-4)
    _add_optimizer(sub)
    _add_output(sub)

    sub = subs.add_parser("thresholds", help="threshold bias for n = 3..N")
    sub.add_argument("--n", type=int, default=8)
    sub.add_argument("--tol", type=float, default=1e-4)
    _add_optimizer(sub)
    _add_output(sub, csv_ok=True)

    sub = subs.add_parser("simulate", help="Monte Carlo rounds of the two-party game")
    sub.add_argument("--behavior", choices=["pr", "local", "quantum"], required=True)
    sub.add_argument("--p", type=float)
    sub.add_argument("--q", type=float)
    sub.add_argument("--pij", type=_pij)
    sub.add_argument("--rounds", type=int, default=100000)
    sub.add_argument("--seed", type=int, default=0)
    sub.add_argument("--starts", type=int, default=32)
    sub.add_argument("--iters", type=int, default=2000)
    sub.add_argument("--opt-tol", type=float, default=1e-10)
    _add_output(sub)

    sub = subs.add_parser("expand", help="dump the correlator expansion of S_n[p]")
    sub.add_argument("--n", type=int, required=True)
    sub.add_argument("--p", type=float, required=True)
    _add_output(sub)
    return parser


def _require(args, *names):
    missing = [f"--{n}" for n in names if getattr(args, n) is None]
    if missing:
        raise ValidationError(f"missing required flag(s): {', '.join(missing)}")


def _check_prob(name, value):
    if not (math.isfinite(value) and 0.0 < value < 1.0):
        raise ValidationError(f"--{name} must lie in (0, 1), got {value}")


def _check_n(n, lo, hi):
    if not lo <= n <= hi:
        raise ValidationError(f"--n must lie in [{lo}, {hi}], got {n}")


def _bias(args) -> JointBias:
    if args.pij is not None:
        if args.p is not None or args.q is not None:
            raise ValidationError("give either --pij or --p/--q, not both")
        return JointBias.from_flat(args.pij)
    _require(args, "p", "q")
    _check_prob("p", args.p)
    _check_prob("q", args.q)
    return JointBias.product(args.p, args.q)


def _config(args) -> OptimizerConfig:
    return OptimizerConfig(starts=args.starts, max_iter=args.iters, tol=args.opt_tol, seed=args.seed)


def _validate(args):
    """Range-check every numeric flag before any computation starts."""
    for name in ("p", "q"):
        value = getattr(args, name, None)
        if value is not None:
            _check_prob(name, value)
    if hasattr(args, "starts"):
        _config(args)
    cmd = args.command
    if cmd == "value":
        if args.game == "svetlichny":
            _require(args, "n", "p")
            _check_n(args.n, 2, MAX_CLASSICAL_PARTIES)
        elif args.game == "chsh":
            if args.pij is not None:
                raise ValidationError("--game chsh takes --p/--q; use --game joint for --pij")
            _bias(args)
        else:
            _bias(args)
    elif cmd == "region" and args.grid < 2:
        raise ValidationError(f"--grid must be >= 2, got {args.grid}")
    elif cmd == "curves":
        _check_n(args.n, 2, MAX_CLASSICAL_PARTIES)
        if args.grid < 1:
            raise ValidationError(f"--grid must be >= 1, got {args.grid}")
    elif cmd == "threshold":
        _check_n(args.n, 2, MAX_CLASSICAL_PARTIES)
    elif cmd == "thresholds":
        _check_n(args.n, 3, MAX_CLASSICAL_PARTIES)
    elif cmd == "simulate":
        _bias(args)
        if args.rounds < 1:
            raise ValidationError(f"--rounds must be >= 1, got {args.rounds}")
        if args.seed < 0:
            raise ValidationError(f"--seed must be nonnegative, got {args.seed}")
    elif cmd == "expand":
        _check_n(args.n, 2, 16)
    if cmd in ("threshold", "thresholds") and not (math.isfinite(args.tol) and args.tol >= 1e-6):
        raise ValidationError(f"--tol must be >= 1e-6, got {args.tol}")


def _value(args) -> tuple[dict, bool]:
    game, model = args.game, args.model
    if game == "svetlichny":
        if model == "classical":
            value, witness = classical_value_svetlichny(args.n, args.p)
            return {"value": value, "witness": witness.to_json()}, True
        if model == "quantum":
            res = quantum_value_svetlichny(args.n, args.p, _config(args))
            return res.to_json(), res.converged
        return {"value": nonsignaling_value_svetlichny(args.n, args.p)}, True

    bias = _bias(args)
    out: dict = {}
    converged = True
    if model == "classical":
        value, witness = classical_value_chsh(bias)
        out.update(value=value, witness=witness.to_json())
        if game == "chsh" and args.p >= 0.5 and args.q >= 0.5:
            out["closed_form"] = classical_closed_form(args.p, args.q)
    elif model == "quantum" and game == "chsh":
        tag = classify_region(args.p, args.q)
        out.update(value=quantum_value_chsh(args.p, args.q), region=tag.region.value, folded=[tag.r, tag.s])
        if tag.advantage and args.p >= 0.5 and args.q >= 0.5:
            out["strategy"] = optimal_strategy(args.p, args.q).to_json()
        elif not tag.advantage:
            out["witness"] = classical_value_chsh(bias)[1].to_json()
    elif model == "quantum":
        res = quantum_value_joint_oracle(bias, _config(args))
        converged = res.converged
        out.update(res.to_json())
        if min(bias.flat()) > 0:
            flag, lhs = joint_no_advantage(bias)
            out["condition"] = {"no_advantage": flag, "lhs": lhs}
    else:
        value, witness = ns_value(bias)
        out.update(value=value, witness=witness.to_json())
    out["success_probability"] = expectation_to_success(out["value"])
    return out, converged


def _simulate(args) -> tuple[dict, bool]:
    bias = _bias(args)
    converged = True
    if args.behavior == "pr":
        behavior = pr_box()
    elif args.behavior == "local":
        behavior = deterministic_behavior(classical_value_chsh(bias)[1])
    else:
        res = quantum_value_joint_oracle(bias, _config(args))
        converged = res.converged
        behavior = behavior_from_strategy(res.strategy.A, res.strategy.B, res.strategy.state)
    report = simulate_rounds(behavior, bias, args.rounds, args.seed)
    out = report.to_json()
    out["behavior"] = behavior.to_json()
    out["exact_score"] = behavior.score(bias)
    return out, converged


def _curves_grid(steps: int) -> list[float]:
    return [0.5 + 0.5 * k / steps for k in range(steps)]


def _run(args) -> tuple[dict | str, bool]:
    cmd = args.command
    if cmd == "value":
        return _value(args)
    if cmd == "region":
        rows = analysis.region_scan(args.grid)
        if args.format == "csv":
            return analysis.region_csv(rows), True
        return {"rows": [
            {"p": r.p, "q": r.q, "classical": r.classical, "quantum": r.quantum, "ns": r.ns,
             "gap": r.gap, "advantage": r.advantage} for r in rows
        ], "gap_tol": analysis.CLOSED_FORM_TOL}, True
    if cmd == "curves":
        rows = analysis.svetlichny_curves(args.n, _curves_grid(args.grid), _config(args))
        converged = all(r.converged for r in rows)
        if args.format == "csv":
            return analysis.curves_csv(rows), converged
        return {"rows": [
            {"n": r.n, "p": r.p, "classical": r.classical, "quantum": r.quantum, "gap": r.gap,
             "converged": r.converged} for r in rows
        ], "gap_tol": analysis.GAP_TOL}, converged
    if cmd == "threshold":
        p_star = analysis.threshold_p_star(args.n, args.tol, _config(args))
        return {"n": args.n, "p_star": p_star, "tol_p": args.tol, "gap_tol": analysis.GAP_TOL}, True
    if cmd == "thresholds":
        series = analysis.thresholds_vs_n(args.n, _config(args), args.tol)
        if args.format == "csv":
            return analysis.thresholds_csv(series, args.tol), True
        return {"series": [{"n": n, "p_star": p} for n, p in series], "tol_p": args.tol,
                "gap_tol": analysis.GAP_TOL}, True
    if cmd == "simulate":
        return _simulate(args)
    if cmd == "expand":
        return expand_svetlichny(args.n, args.p).to_json(), True
    raise AssertionError(cmd)


def _params(args) -> dict:
    return {k: v for k, v in sorted(vars(args).items()) if k not in ("out", "format")}


def run(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        _validate(args)
        result, converged = _run(args)
    except GameError as exc:
        print(f"biasedgames: error: {exc}", file=sys.stderr)
        return EXIT_DOMAIN

    meta = {"command": args.command, "params": _params(args)}
    if isinstance(result, str):
        # CSV schemas are fixed, so run metadata travels beside the table
        text = result
        meta_text = json.dumps(meta, indent=2) + "\n"
        if args.out:
            with open(args.out + ".meta.json", "w") as fh:
                fh.write(meta_text)
        else:
            sys.stderr.write(meta_text)
    else:
        text = json.dumps({**meta, "result": result}, indent=2) + "\n"
    if args.out:
        with open(args.out, "w", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    if not converged:
        print("biasedgames: warning: optimizer did not converge", file=sys.stderr)
        return EXIT_NONCONVERGED
    return EXIT_OK


def main():
    sys.exit(run())
