"""Command-line front end.

Thin adapters over the library: every subcommand calls the corresponding
operations, renders their results (rationals as exact p/q strings, floats
via repr) and exits 0 when all asserted invariants passed, 1 when a check
or report failed, 2 on usage errors.  Output is deterministic for a given
configuration: no clocks, no locale, fixed field order, newline-terminated.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
from dataclasses import asdict, dataclass
from fractions import Fraction

import numpy as np

from . import fooling, kwise, sandwich as sandwich_mod
from .approx import (
    build_P,
    check_P_properties,
    remez_best_sign_approx,
    schedule,
)
from .chebpoly import mpf_to_decimal_str
from .errors import HsprgError
from .halfspace import (
    Halfspace,
    check_geometric_decay,
    decompose,
    normalize,
    sort_weights,
)
from .kwise import KWiseSpace, build_space, sample, verify_kwise
from .sandwich import build_sandwich, expected_gap, verify_pointwise


@dataclass(frozen=True)
class RunConfig:
    """Parsed invocation; round-trips losslessly through its JSON form."""

    command: str
    eps: float | None = None
    C_const: float = 1.0
    c_const: float = 1.0
    mode: str = "empirical"
    halfspace_path: str | None = None
    space_path: str | None = None
    out_path: str | None = None
    precision_bits: int | None = None
    rng_seed: int | None = None
    unsafe: bool = False

    def to_json(self) -> str:
        return json.dumps(asdict(self), sort_keys=True)

    @staticmethod
    def from_json(text: str) -> "RunConfig":
        return RunConfig(**json.loads(text))


def _render(value):
    """Recursively render report values into JSON-stable primitives."""
    if isinstance(value, Fraction):
        return str(value)
    if isinstance(value, float):
        if math.isnan(value):
            return "nan"
        return value
    if isinstance(value, (np.floating,)):
        return float(value)
    if isinstance(value, (np.integer,)):
        return int(value)
    if isinstance(value, dict):
        return {k: _render(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_render(v) for v in value]
    if hasattr(value, "_mpf_"):
        return mpf_to_decimal_str(value)
    return value


def emit_report(result: dict, fmt: str = "json", path: str | None = None) -> str:
    """Serialize a report; byte-identical output for identical inputs."""
    if fmt == "json":
        text = json.dumps(_render(result), indent=2) + "\n"
    elif fmt == "csv":
        text = result["csv"]
    else:
        raise HsprgError(f"unknown report format {fmt!r}")
    if path:
        with open(path, "w", newline="\n") as fh:
            fh.write(text)
    return text


def _load_halfspace(args) -> Halfspace:
    if getattr(args, "halfspace", None):
        with open(args.halfspace) as fh:
            h = normalize(Halfspace.from_json(json.load(fh)))
    elif getattr(args, "family", None):
        spec = fooling.FamilySpec(
            name=args.family,
            n=args.n,
            params={"theta": getattr(args, "theta", 0.0) or 0.0,
                    "rho": getattr(args, "rho", 0.5) or 0.5},
            rng_seed=getattr(args, "seed", None),
        )
        h = fooling.family(spec)
    else:
        raise HsprgError("provide --halfspace FILE or --family NAME with --n")
    dump = getattr(args, "dump_halfspace", None)
    if dump:
        with open(dump, "w", newline="\n") as fh:
            json.dump(h.to_json(), fh, indent=2)
            fh.write("\n")
    return h


def _load_space(args, n: int) -> KWiseSpace:
    if getattr(args, "space", None):
        with open(args.space) as fh:
            space = KWiseSpace.from_json(json.load(fh))
        if space.n != n:
            raise HsprgError(f"space is on n={space.n}, halfspace on n={n}")
        return space
    return build_space(n, args.k)


def _apply_unsafe(args):
    if getattr(args, "unsafe", False):
        fooling.EXACT_N_LIMIT = 40
        fooling.HEAD_ENUM_LIMIT = 30
        kwise.SEED_ENUM_LIMIT = 40
        sandwich_mod.EXHAUSTIVE_N_LIMIT = 30


# ---------------------------------------------------------------------------
# subcommands


def _cmd_gen(args) -> int:
    space = build_space(args.n, args.k)
    lines = []
    if args.samples is not None:
        gen = np.random.Generator(np.random.Philox(key=args.seed or 0))
        for _ in range(args.samples):
            seed = int(gen.integers(0, 1 << space.s))
            lines.append(" ".join(str(int(v)) for v in sample(space, seed)))
    else:
        for block in kwise.enumerate_support(space):
            for row in block:
                lines.append(" ".join(str(int(v)) for v in row))
    text = "\n".join(lines) + "\n"
    if args.out:
        with open(args.out, "w", newline="\n") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return 0


def _cmd_verify_kwise(args) -> int:
    if args.space:
        with open(args.space) as fh:
            space = KWiseSpace.from_json(json.load(fh))
    else:
        space = build_space(args.n, args.build_k if args.build_k else args.k)
    level = args.k
    rep = verify_kwise(space, level)
    out = {
        "n": space.n,
        "k_built": space.k,
        "s": space.s,
        "k_verified": level,
        "passed": rep.passed,
        "cells_checked": rep.cells_checked,
        "expected_count": rep.expected_count,
        "witness": _render(rep.witness),
        "conditional_checked": rep.conditional_checked,
    }
    sys.stdout.write(emit_report(out, "json", args.out))
    return 0 if rep.passed else 1


def _cmd_critical_index(args) -> int:
    h = _load_halfspace(args)
    sch = schedule(args.eps, args.C, args.c, args.mode)
    sh = sort_weights(h)
    rep = decompose(sh, args.eps, sch)
    decay = check_geometric_decay(sh, args.eps, sch)
    out = {
        "tau": rep.tau,
        "crit_index": "inf" if math.isinf(rep.crit_index) else rep.crit_index,
        "sigma": list(rep.sigma),
        "head": list(rep.head),
        "tail": list(rep.tail),
        "separated": list(rep.separated),
        "sep_step": rep.sep_step,
        "t_sep": rep.t_sep,
        "L": rep.L,
        "head_covers_all": rep.head_covers_all,
        "decay_passed": decay.passed,
        "separation_gap": decay.separation_gap,
        "separation_threshold": decay.separation_threshold,
    }
    sys.stdout.write(emit_report(out, "json", args.out))
    return 0 if decay.passed else 1


def _cmd_sandwich(args) -> int:
    h = _load_halfspace(args)
    sch = schedule(args.eps, args.C, args.c, args.mode)
    sa = remez_best_sign_approx(sch.a, sch.m, args.precision_bits)
    P = build_P(sa, sch.eps)
    pair = build_sandwich(h, P, sch, tau=args.tau)
    pw = verify_pointwise(pair)
    mode = "exhaustive" if h.n <= sandwich_mod.EXHAUSTIVE_N_LIMIT else "montecarlo"
    gaps = expected_gap(pair, mode=mode, rng_seed=args.seed or 0)
    out = {
        "branch": pair.branch,
        "mirrored": pair.mirrored,
        "degree": pair.multilinear_degree,
        "K": pair.K,
        "pointwise_passed": pw.passed,
        "min_upper_margin": pw.min_upper_margin,
        "min_lower_margin": pw.min_lower_margin,
        "points_checked": pw.points_checked,
        "gaps": gaps.to_json(),
    }
    sys.stdout.write(emit_report(out, "json", args.out))
    return 0 if pw.passed and gaps.gap_u >= 0 and gaps.gap_l >= 0 else 1


def _cmd_fool(args) -> int:
    h = _load_halfspace(args)
    space = _load_space(args, h.n)
    uni = fooling.exact_bias(h)
    und = fooling.bias_under_space(h, space)
    err = abs(und.bias - uni.bias)
    out = {
        "n": h.n,
        "k": space.k,
        "s": space.s,
        "bias_uniform": uni.bias,
        "bias_space": und.bias,
        "fooling_error_exact": err,
        "fooling_error_float": float(err),
    }
    sys.stdout.write(emit_report(out, "json", args.out))
    return 0


def _cmd_sweep(args) -> int:
    spec = fooling.FamilySpec(
        name=args.family, n=args.n,
        params={"theta": args.theta or 0.0, "rho": args.rho or 0.5},
        rng_seed=args.seed,
    )
    ks = range(args.k_min, args.k_max + 1)
    rows, tradeoff = fooling.sweep(spec, ks, args.eps_grid or ())
    csv = fooling.sweep_rows_to_csv(rows)
    emit_report({"csv": csv}, "csv", args.out)
    if not args.out:
        sys.stdout.write(csv)
    if tradeoff:
        sys.stdout.write(
            json.dumps({"k_for_eps": {str(k): v for k, v in tradeoff.items()}}) + "\n"
        )
    return 0


def _cmd_chow(args) -> int:
    h = _load_halfspace(args)
    exact = fooling.chow_parameters(h)
    out = {"exact": [str(c) for c in exact]}
    if args.k:
        space = _load_space(args, h.n)
        via = fooling.chow_parameters(h, "via_space", space)
        out["via_space"] = [str(c) for c in via]
        out["max_abs_gap"] = float(max(abs(a - b) for a, b in zip(exact, via)))
    sys.stdout.write(emit_report(out, "json", args.out))
    return 0


def _cmd_influence(args) -> int:
    h = _load_halfspace(args)
    i = args.i - 1  # CLI is 1-based
    direct = fooling.influence(h, i, "direct")
    ident = fooling.influence(h, i, "halfspace_identity")
    out = {
        "i": args.i,
        "direct": direct,
        "halfspace_identity": ident,
        "identity_matches": direct == ident,
    }
    code = 0 if direct == ident else 1
    if args.k:
        space = _load_space(args, h.n)
        via = fooling.influence(h, i, "via_space", space)
        out["via_space"] = via
        out["via_space_gap"] = float(abs(via - direct))
    sys.stdout.write(emit_report(out, "json", args.out))
    return code


def _cmd_count(args) -> int:
    h = _load_halfspace(args)
    space = _load_space(args, h.n)
    rep = fooling.approx_count(h, space)
    out = {
        "estimate": rep.estimate,
        "exact": rep.exact,
        "realized_error": rep.realized_error,
    }
    sys.stdout.write(emit_report(out, "json", args.out))
    return 0


def _cmd_remez(args) -> int:
    sa = remez_best_sign_approx(args.a, args.m, args.precision_bits)
    out = {
        "a": sa.a,
        "m": args.m,
        "degree": sa.degree,
        "M": sa.M,
        "grid_max": sa.grid_max,
        "alternation_points": list(sa.alternation_points),
        "error_signs": list(sa.error_signs),
        "odd": all(c == 0 for k, c in enumerate(sa.p.coeffs) if k % 2 == 0),
    }
    sys.stdout.write(emit_report(out, "json", args.out))
    return 0


def _cmd_check_P(args) -> int:
    sch = schedule(args.eps, args.C, args.c, args.mode)
    sa = remez_best_sign_approx(sch.a, sch.m, args.precision_bits)
    P = build_P(sa, sch.eps)
    rep = check_P_properties(P, args.density)
    out = {
        "eps": rep.eps,
        "a": rep.a,
        "K": rep.K,
        "label": rep.label,
        "property1": {"ok": rep.property1_ok, "dominates_sign": rep.dominates_sign,
                      "lower_flank": rep.lower_flank},
        "property2": {"ok": rep.property2_ok, "above_sign": rep.band_above_sign,
                      "below_eps": rep.band_below_eps},
        "property3": {"ok": rep.property3_ok, "above_minus_one": rep.dip_above_minus_one,
                      "below_one_plus_eps": rep.dip_below_one_plus_eps},
        "property4": {"ok": rep.property4_ok, "log_margin": rep.growth_log_margin},
        "p_monotone": [rep.p_monotone_left, rep.p_monotone_right],
        "all_passed": rep.all_passed,
    }
    sys.stdout.write(emit_report(out, "json", args.out))
    return 0 if rep.all_passed else 1


# ---------------------------------------------------------------------------
# parser


def _add_halfspace_source(p):
    p.add_argument("--halfspace", help="path to halfspace JSON {weights, theta}")
    p.add_argument("--family", choices=["majority", "geometric", "exponential",
                                        "gaussian_random"])
    p.add_argument("--n", type=int, help="dimension for --family")
    p.add_argument("--theta", type=float, default=0.0)
    p.add_argument("--rho", type=float, default=0.5)
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--dump-halfspace", dest="dump_halfspace",
                   help="write the (normalized) halfspace JSON here")


def _add_schedule_args(p, default_eps=None):
    p.add_argument("--eps", type=float, default=default_eps, required=default_eps is None)
    p.add_argument("--C", type=float, default=1.0)
    p.add_argument("--c", type=float, default=1.0)
    p.add_argument("--mode", choices=["theorem", "empirical"], default="empirical")
    p.add_argument("--precision-bits", dest="precision_bits", type=int, default=None)


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="hsprg",
        description="pseudorandom generators for halfspaces, with exact verification",
    )
    ap.add_argument("--unsafe", action="store_true",
                    help="raise the exhaustive-enumeration guards")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("gen", help="emit the points of a k-wise space")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--samples", type=int, default=None,
                   help="sample this many seeds instead of enumerating 2^s")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out")
    p.set_defaults(func=_cmd_gen)

    p = sub.add_parser("verify-kwise", help="exhaustively verify k-wise uniformity")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--k", type=int, required=True, help="level to verify")
    p.add_argument("--build-k", type=int, default=None,
                   help="independence level to build (defaults to --k)")
    p.add_argument("--space", help="path to a space descriptor JSON")
    p.add_argument("--out")
    p.set_defaults(func=_cmd_verify_kwise)

    p = sub.add_parser("critical-index", help="decompose a halfspace")
    _add_halfspace_source(p)
    _add_schedule_args(p)
    p.add_argument("--out")
    p.set_defaults(func=_cmd_critical_index)

    p = sub.add_parser("sandwich", help="build and verify sandwich polynomials")
    _add_halfspace_source(p)
    _add_schedule_args(p)
    p.add_argument("--tau", type=float, default=None,
                   help="regularity level to enforce (default: eps)")
    p.add_argument("--out")
    p.set_defaults(func=_cmd_sandwich)

    p = sub.add_parser("fool", help="exact fooling error of one halfspace")
    _add_halfspace_source(p)
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--space", help="path to a space descriptor JSON")
    p.add_argument("--out")
    p.set_defaults(func=_cmd_fool)

    p = sub.add_parser("sweep", help="fooling error across k values, CSV output")
    p.add_argument("--family", required=True,
                   choices=["majority", "geometric", "exponential", "gaussian_random"])
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--k-min", dest="k_min", type=int, required=True)
    p.add_argument("--k-max", dest="k_max", type=int, required=True)
    p.add_argument("--eps-grid", dest="eps_grid", type=float, nargs="*", default=())
    p.add_argument("--theta", type=float, default=0.0)
    p.add_argument("--rho", type=float, default=0.5)
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--out")
    p.set_defaults(func=_cmd_sweep)

    p = sub.add_parser("chow", help="Chow parameters, exact and derandomized")
    _add_halfspace_source(p)
    p.add_argument("--k", type=int, default=None)
    p.add_argument("--space")
    p.add_argument("--out")
    p.set_defaults(func=_cmd_chow)

    p = sub.add_parser("influence", help="influence of one coordinate")
    _add_halfspace_source(p)
    p.add_argument("--i", type=int, required=True, help="coordinate, 1-based")
    p.add_argument("--k", type=int, default=None)
    p.add_argument("--space")
    p.add_argument("--out")
    p.set_defaults(func=_cmd_influence)

    p = sub.add_parser("count", help="derandomized estimate of Pr[h = 1]")
    _add_halfspace_source(p)
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--space")
    p.add_argument("--out")
    p.set_defaults(func=_cmd_count)

    p = sub.add_parser("remez", help="best sign approximation and alternation dump")
    p.add_argument("--a", type=float, required=True)
    p.add_argument("--m", type=int, required=True)
    p.add_argument("--precision-bits", dest="precision_bits", type=int, default=None)
    p.add_argument("--out")
    p.set_defaults(func=_cmd_remez)

    p = sub.add_parser("check-P", help="sampled properties of the upper approximator")
    _add_schedule_args(p)
    p.add_argument("--density", type=int, default=1000)
    p.add_argument("--out")
    p.set_defaults(func=_cmd_check_P)

    return ap


def main(argv=None) -> int:
    ap = build_parser()
    try:
        args = ap.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code) if exc.code is not None else 2
    _apply_unsafe(args)
    try:
        return args.func(args)
    except HsprgError as exc:
        sys.stderr.write(f"error: {exc}\n")
        return 1
    except OSError as exc:
        sys.stderr.write(f"io error: {exc}\n")
        return 1


if __name__ == "__main__":
    sys.exit(main())
