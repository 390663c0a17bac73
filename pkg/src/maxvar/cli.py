"""Command-line front door: evaluate, measure variation, verify, sweep, search.

All numeric flags are parsed as exact rationals and all reports serialize
rationals as strings; a decimal column in CSV output is advisory only.  Exit
status 0 means completed with no violations, 1 means violations were found,
2 means the input could not be parsed.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import sys
from fractions import Fraction
from pathlib import Path

from .core import (
    DiscreteFunction,
    OperatorParams,
    Rounding,
    StepFunction,
    as_rational,
    function_from_json_dict,
    rational_to_str,
)
from .continuous import maximal_at_step
from .discrete import maximal_on_range
from .search import (
    DISCRETE_CLAIMS,
    RandomSweepConfig,
    SearchSpace,
    exhaustive_sweep,
    random_sweep,
    save_jsonl,
    corpus_bytes,
)
from .variation import decompose, total_variation, total_variation_step, variation_over_sites
from .verify import (
    ClaimId,
    Verdict,
    check_lemma_dominate,
    check_lemma_plateau,
    check_peak_transfer,
    check_prop_extremos,
    check_prop_extremos_all,
    check_theorem_continuous_grid,
    check_theorem_discrete,
    compute_profile,
    default_range,
    make_uniform_grid,
)


class InputError(Exception):
    """Malformed input file or flags; reported with a diagnostic, status 2."""


def _load_function(path: str):
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise InputError(f"{path}: {exc}") from exc
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise InputError(f"{path}: line {exc.lineno}: {exc.msg}") from exc
    try:
        return function_from_json_dict(data)
    except (ValueError, TypeError, KeyError) as exc:
        raise InputError(f"{path}: {exc}") from exc


def _parse_rational_flag(text: str, flag: str) -> Fraction:
    try:
        return as_rational(text)
    except (ValueError, ZeroDivisionError, TypeError) as exc:
        raise InputError(f"{flag}: {text!r} is not an exact rational") from exc


def _parse_range(text: str) -> tuple[int, int]:
    try:
        lo_text, hi_text = text.split(":")
        lo, hi = int(lo_text), int(hi_text)
    except ValueError as exc:
        raise InputError(f"--range: expected A:B with integers, got {text!r}") from exc
    if lo > hi:
        raise InputError(f"--range: {lo} > {hi}")
    return lo, hi


def _parse_grid(text: str) -> list[Fraction]:
    try:
        lo_text, hi_text, count_text = text.split(":")
        lo = as_rational(lo_text)
        hi = as_rational(hi_text)
        count = int(count_text)
    except (ValueError, ZeroDivisionError) as exc:
        raise InputError(f"--grid: expected LO:HI:N, got {text!r}") from exc
    if count < 2 or lo >= hi:
        raise InputError("--grid: need N >= 2 and LO < HI")
    return make_uniform_grid(lo, hi, count)


def _params(args) -> OperatorParams:
    alpha = _parse_rational_flag(args.alpha, "--alpha")
    try:
        rounding = Rounding.from_string(args.rounding)
    except ValueError as exc:
        raise InputError(str(exc)) from exc
    return OperatorParams(alpha=alpha, rounding=rounding)


def _emit(text: str, out_path: str | None) -> None:
    if out_path:
        Path(out_path).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)


def _emit_json(obj, out_path: str | None) -> None:
    _emit(json.dumps(obj, indent=2, sort_keys=True) + "\n", out_path)


def _decimal(value: Fraction) -> str:
    return format(value.numerator / value.denominator, ".12g")


def _cmd_eval(args) -> int:
    f = _load_function(args.input)
    if isinstance(f, DiscreteFunction):
        params = _params(args)
        lo, hi = _parse_range(args.range) if args.range else default_range(f, args.margin)
        evaluations = maximal_on_range(f, lo, hi, params)
        rows = [(x, ev.value) for x, ev in zip(range(lo, hi + 1), evaluations)]
        payload = {
            "sites": [x for x, _ in rows],
            "values": [rational_to_str(v) for _, v in rows],
            "params": params.to_json_dict(),
        }
    else:
        alpha = _parse_rational_flag(args.alpha, "--alpha")
        if args.grid:
            grid = _parse_grid(args.grid)
        else:
            t_lo, t_hi = f.hull
            pad = max(t_hi - t_lo, Fraction(1))
            grid = make_uniform_grid(t_lo - pad, t_hi + pad, 257)
        rows = [(x, maximal_at_step(f, x, alpha).value) for x in grid]
        payload = {
            "sites": [rational_to_str(x) for x, _ in rows],
            "values": [rational_to_str(v) for _, v in rows],
            "alpha": rational_to_str(alpha),
        }
    if args.format == "csv":
        buffer = io.StringIO()
        writer = csv.writer(buffer, lineterminator="\n")
        writer.writerow(["site", "value_numerator", "value_denominator", "decimal_approx"])
        for x, v in rows:
            site = x if isinstance(x, int) else rational_to_str(x)
            writer.writerow([site, v.numerator, v.denominator, _decimal(v)])
        _emit(buffer.getvalue(), args.out)
    else:
        _emit_json(payload, args.out)
    return 0


def _cmd_var(args) -> int:
    f = _load_function(args.input)
    payload: dict = {}
    if isinstance(f, DiscreteFunction):
        payload["function_variation"] = rational_to_str(total_variation(f))
        if args.alpha is not None:
            params = _params(args)
            lo, hi = _parse_range(args.range) if args.range else default_range(f, args.margin)
            profile = compute_profile(f, params, lo, hi)
            payload["range"] = [lo, hi]
            payload["maximal_variation"] = rational_to_str(variation_over_sites(profile.values))
            payload["params"] = params.to_json_dict()
    else:
        payload["function_variation"] = rational_to_str(total_variation_step(f))
        if args.alpha is not None:
            alpha = _parse_rational_flag(args.alpha, "--alpha")
            grid = _parse_grid(args.grid) if args.grid else None
            report = check_theorem_continuous_grid(f, alpha, grid=grid)
            payload["sampled_maximal_variation"] = report.to_json_dict()["numbers"]["sampled_variation"]
            payload["alpha"] = rational_to_str(alpha)
    _emit_json(payload, args.out)
    return 0


_CLAIM_FLAGS = {
    "theorem": ClaimId.THEOREM_DISCRETE,
    "dominate": ClaimId.LEMMA_DOMINATE,
    "plateau": ClaimId.LEMMA_PLATEAU,
    "extremos": ClaimId.PROP_EXTREMOS,
    "transfer": ClaimId.PEAK_TRANSFER,
    "continuous-grid": ClaimId.THEOREM_CONTINUOUS_GRID,
}


def _run_verify(f, args):
    claim = _CLAIM_FLAGS[args.claim]
    if isinstance(f, StepFunction):
        alpha = _parse_rational_flag(args.alpha, "--alpha")
        if claim is ClaimId.THEOREM_CONTINUOUS_GRID:
            grid = _parse_grid(args.grid) if args.grid else None
            return check_theorem_continuous_grid(f, alpha, grid=grid, points=args.grid_points)
        if claim is ClaimId.PEAK_TRANSFER:
            grid = _parse_grid(args.grid) if args.grid else None
            if grid is None:
                t_lo, t_hi = f.hull
                pad = max(t_hi - t_lo, Fraction(1))
                grid = make_uniform_grid(t_lo - pad, t_hi + pad, args.grid_points)
            from .continuous import maximal_values_on_grid

            values = maximal_values_on_grid(f, alpha, grid)
            decomposition = decompose(values, grid)
            if decomposition.system is None:
                raise InputError("the sampled maximal function is monotone; no peak system to transfer")
            params = OperatorParams(alpha=alpha)
            delta = _parse_rational_flag(args.delta, "--delta")
            return check_peak_transfer(f, params, decomposition.system, delta=delta)
        raise InputError(f"--claim {args.claim} needs a discrete input")
    params = _params(args)
    site_range = _parse_range(args.range) if args.range else None
    if claim is ClaimId.THEOREM_DISCRETE:
        return check_theorem_discrete(f, params, site_range, args.margin)
    if claim is ClaimId.LEMMA_DOMINATE:
        return check_lemma_dominate(f, params, site_range, args.margin)
    if claim is ClaimId.LEMMA_PLATEAU:
        return check_lemma_plateau(f, params, site_range, args.margin)
    if claim is ClaimId.PROP_EXTREMOS:
        if args.x is not None and args.y is not None:
            return check_prop_extremos(f, params, args.x, args.y)
        return check_prop_extremos_all(f, params, site_range, args.margin)
    if claim is ClaimId.PEAK_TRANSFER:
        lo, hi = site_range if site_range else default_range(f, args.margin)
        profile = compute_profile(f, params, lo, hi)
        decomposition = decompose(list(profile.values), list(range(lo, hi + 1)))
        if decomposition.system is None:
            raise InputError("the maximal function is monotone on the range; no peak system to transfer")
        return check_peak_transfer(f, params, decomposition.system, profile=profile)
    raise InputError(f"--claim {args.claim} needs a step-function input")


def _cmd_verify(args) -> int:
    f = _load_function(args.input)
    report = _run_verify(f, args)
    _emit_json(report.to_json_dict(), args.out)
    return 1 if report.verdict is Verdict.VIOLATED else 0


def _cmd_witness(args) -> int:
    f = _load_function(args.input)
    report = _run_verify(f, args)
    payload = {
        "claim": report.claim_id.value,
        "verdict": report.verdict.value,
        "witnesses": report.to_json_dict()["witnesses"],
    }
    _emit_json(payload, args.out)
    return 1 if report.verdict is Verdict.VIOLATED else 0


def _parse_csv_list(text: str, parse, flag: str) -> tuple:
    try:
        return tuple(parse(part.strip()) for part in text.split(",") if part.strip())
    except (ValueError, ZeroDivisionError) as exc:
        raise InputError(f"{flag}: {exc}") from exc


def _claims_from_flag(text: str) -> tuple[ClaimId, ...]:
    if text.strip() == "all":
        return DISCRETE_CLAIMS
    names = [part.strip() for part in text.split(",") if part.strip()]
    unknown = [n for n in names if n not in _CLAIM_FLAGS]
    if unknown:
        raise InputError(f"--claims: unknown {unknown}; choose from {sorted(_CLAIM_FLAGS)}")
    return tuple(_CLAIM_FLAGS[n] for n in names)


def _cmd_sweep(args) -> int:
    claims = _claims_from_flag(args.claims)
    space = SearchSpace(
        max_support_length=args.max_len,
        value_grid=_parse_csv_list(args.values, as_rational, "--values"),
        alpha_grid=_parse_csv_list(args.alphas, as_rational, "--alphas"),
        rounding_modes=_parse_csv_list(args.modes, Rounding.from_string, "--modes"),
        claims=claims,
        range_margin=args.margin,
        budget=args.budget,
    )
    count = space.candidate_count()
    sys.stderr.write(f"sweep: {count} canonical candidates x {len(space.alpha_grid)} alphas "
                     f"x {len(space.rounding_modes)} modes\n")
    records = exhaustive_sweep(space)
    if args.out:
        save_jsonl(records, args.out)
    else:
        sys.stdout.write(corpus_bytes(records).decode("utf-8"))
    return 1 if records else 0


def _cmd_search(args) -> int:
    config = RandomSweepConfig(
        max_support_length=args.max_len,
        max_numerator=args.max_numerator,
        max_denominator=args.max_denominator,
        alpha_grid=_parse_csv_list(args.alphas, as_rational, "--alphas"),
        rounding_modes=_parse_csv_list(args.modes, Rounding.from_string, "--modes"),
        claims=_claims_from_flag(args.claims),
        range_margin=args.margin,
    )
    records = random_sweep(args.seed, args.count, config)
    if args.out:
        save_jsonl(records, args.out)
    else:
        sys.stdout.write(corpus_bytes(records).decode("utf-8"))
    return 1 if records else 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="maxvar",
        description="Exact evaluation of nontangential maximal operators and "
                    "verification of their variation bounds.")
    sub = parser.add_subparsers(dest="command", required=True)

    def add_common(p, with_input=True):
        if with_input:
            p.add_argument("input", help="JSON function file (discrete or step)")
        p.add_argument("--alpha", default=None, help="aperture, an exact rational like 1/3")
        p.add_argument("--rounding", default="ceil", choices=["ceil", "floor", "exact"])
        p.add_argument("--range", default=None, help="discrete site range A:B")
        p.add_argument("--grid", default=None, help="continuous grid LO:HI:N")
        p.add_argument("--margin", type=int, default=30, help="default range padding")
        p.add_argument("--out", default=None, help="output path (default stdout)")
        p.add_argument("--format", default="json", choices=["json", "csv"])

    p_eval = sub.add_parser("eval", help="pointwise maximal-function values")
    add_common(p_eval)
    p_eval.set_defaults(func=_cmd_eval, alpha="1")

    p_var = sub.add_parser("var", help="variation numbers")
    add_common(p_var)
    p_var.set_defaults(func=_cmd_var)

    for name, help_text in (("verify", "run a claim checker, emit a report"),
                            ("witness", "emit the witnesses of a claim checker")):
        p = sub.add_parser(name, help=help_text)
        add_common(p)
        p.add_argument("--claim", required=True, choices=sorted(_CLAIM_FLAGS))
        p.add_argument("--x", type=int, default=None)
        p.add_argument("--y", type=int, default=None)
        p.add_argument("--delta", default="0")
        p.add_argument("--grid-points", type=int, default=129)
        p.set_defaults(func=_cmd_verify if name == "verify" else _cmd_witness, alpha="1")

    p_sweep = sub.add_parser("sweep", help="exhaustive canonical-candidate sweep")
    p_sweep.add_argument("--max-len", type=int, default=4)
    p_sweep.add_argument("--values", default="0,1,2,3")
    p_sweep.add_argument("--alphas", default="1/4,3/10,1/3,2/5,1/2,1,2")
    p_sweep.add_argument("--modes", default="ceil")
    p_sweep.add_argument("--claims", default="theorem,dominate,plateau")
    p_sweep.add_argument("--margin", type=int, default=30)
    p_sweep.add_argument("--budget", type=int, default=500_000)
    p_sweep.add_argument("--out", default=None)
    p_sweep.set_defaults(func=_cmd_sweep)

    p_search = sub.add_parser("search", help="seeded random search")
    p_search.add_argument("--seed", type=int, required=True)
    p_search.add_argument("--count", type=int, required=True)
    p_search.add_argument("--max-len", type=int, default=6)
    p_search.add_argument("--max-numerator", type=int, default=4)
    p_search.add_argument("--max-denominator", type=int, default=4)
    p_search.add_argument("--alphas", default="1/3")
    p_search.add_argument("--modes", default="ceil")
    p_search.add_argument("--claims", default="theorem,dominate,plateau")
    p_search.add_argument("--margin", type=int, default=30)
    p_search.add_argument("--out", default=None)
    p_search.set_defaults(func=_cmd_search)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except InputError as exc:
        sys.stderr.write(f"input error: {exc}\n")
        return 2


if __name__ == "__main__":
    sys.exit(main())
