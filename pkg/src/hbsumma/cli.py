"""Command-line front end.

Exit codes: 0 success, 1 invalid input, 2 numerical certification failure,
3 a selftest criterion failed. Errors are written to stderr as JSON.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
from pathlib import Path

import numpy as np

from . import lab, summ
from .errors import CertificationError, HbsummaError, ValidationError
from .hb import HbContext, hb_norm
from .pair import PythagoreanPair, check_nonextreme, mate, phi_coefficients, preset_pair
from .series import TaylorSeries, coeffs_to_csv, h2_norm, parse_coeffs

DEFAULT_PHI_ORDER = 256


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise ValidationError(message)


def _fmt(v) -> str:
    if isinstance(v, (int, np.integer)) and not isinstance(v, bool):
        return str(int(v))
    return format(float(v), ".16e")


def _load_json(arg: str):
    """Inline JSON, or a path to a JSON file."""
    text = arg.strip()
    if not text.startswith(("[", "{")):
        try:
            text = Path(arg).read_text()
        except OSError as exc:
            raise ValidationError(f"cannot read {arg!r}: {exc.strerror}") from None
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise ValidationError(f"invalid JSON in {arg!r}: {exc.msg}") from None


def _series(arg: str) -> TaylorSeries:
    data = _load_json(arg)
    if isinstance(data, dict):
        tail = data.get("tail_bound")
        coeffs = parse_coeffs(data.get("coeffs", []))
        if tail is not None:
            return TaylorSeries(coeffs, is_exact=False, tail_bound=tuple(tail))
        return TaylorSeries(coeffs, is_exact=not data.get("truncated", False))
    return TaylorSeries(parse_coeffs(data))


def parse_grid(text: str) -> list[float]:
    """``start:stop:step`` with stop included when it lies on the lattice."""
    try:
        start, stop, step = (float(x) for x in text.split(":"))
    except ValueError:
        raise ValidationError(f"grid {text!r} is not start:stop:step") from None
    if not step > 0 or stop < start:
        raise ValidationError(f"grid {text!r} must increase with positive step")
    n = int(math.floor((stop - start) / step + 1e-9))
    return [start + i * step for i in range(n + 1)]


def parse_geomspace(text: str) -> list[float]:
    """``k0:k1`` gives r = 1 - 2^-k for k = k0..k1."""
    try:
        k0, k1 = (int(x) for x in text.split(":"))
    except ValueError:
        raise ValidationError(f"geomspace {text!r} is not k0:k1") from None
    if not 0 < k0 <= k1:
        raise ValidationError(f"geomspace {text!r} needs 0 < k0 <= k1")
    return [1.0 - 2.0**-k for k in range(k0, k1 + 1)]


def parse_method(text: str) -> tuple[summ.SummabilityMethod, int | None]:
    """Method syntax: abel | gen-abel:A | log | cesaro[:N] | identity[:N] | borel:A,B[,raw] | power:file.

    Returns the method and, for matrix methods, the default row N.
    """
    name, _, arg = text.partition(":")
    try:
        if name == "abel":
            return summ.abel(), None
        if name == "gen-abel":
            return summ.gen_abel(float(arg)), None
        if name in ("log", "logarithmic"):
            return summ.logarithmic(), None
        if name == "cesaro":
            return summ.cesaro(), int(arg) if arg else None
        if name == "identity":
            return summ.identity(), int(arg) if arg else None
        if name == "borel":
            parts = [p for p in arg.split(",") if p] if arg else []
            raw = "raw" in parts
            nums = [float(p) for p in parts if p != "raw"]
            return summ.borel(*nums, raw=raw), None
        if name == "power":
            data = _load_json(arg)
            return summ.power_series_from_list(data, name=f"power:{Path(arg).name}"), None
    except (TypeError, ValueError) as exc:
        if isinstance(exc, ValidationError):
            raise
        raise ValidationError(f"bad method {text!r}: {exc}") from None
    raise ValidationError(f"unknown method {text!r}")


def _pair(args, min_order: int = 0) -> PythagoreanPair | None:
    order = max(args.phi_order or DEFAULT_PHI_ORDER, min_order)
    if getattr(args, "phi", None):
        data = _load_json(args.phi)
        if not isinstance(data, dict):
            raise ValidationError("--phi expects a pair JSON object")
        return PythagoreanPair.from_dict(data)
    if getattr(args, "preset", None):
        return preset_pair(args.preset, phi_order=order)
    if getattr(args, "b", None):
        return mate(_series(args.b), order=order)
    return None


def _grid(args) -> list[float] | None:
    if getattr(args, "geomspace", None):
        return parse_geomspace(args.geomspace)
    if getattr(args, "r_grid", None):
        return parse_grid(args.r_grid)
    if getattr(args, "r", None) is not None:
        return [float(args.r)]
    return None


def _emit(text: str, args) -> None:
    if getattr(args, "output", None):
        Path(args.output).write_text(text)
    else:
        sys.stdout.write(text)


def _dump(obj) -> str:
    return json.dumps(obj, indent=2, sort_keys=True, allow_nan=True) + "\n"


# ---------------------------------------------------------------- commands

def cmd_mate(args) -> int:
    if args.preset:
        pair = preset_pair(args.preset, phi_order=args.phi_order or DEFAULT_PHI_ORDER)
    elif args.b:
        pair = mate(_series(args.b), method=args.method, order=args.phi_order or 64,
                    grid=args.grid, tol=args.tol)
    else:
        raise ValidationError("mate needs --preset or --b")
    rep = check_nonextreme(pair.b, grid_size=args.grid)
    out = pair.to_dict()
    out["nonextreme"] = {
        "min_modulus_gap": rep.min_modulus_gap,
        "log_integral_estimate": rep.log_integral_estimate,
        "verdict": rep.verdict,
        "level_estimates": list(rep.level_estimates),
    }
    _emit(_dump(out), args)
    return 0


def cmd_phi(args) -> int:
    pair = _pair(args)
    if pair is None:
        raise ValidationError("phi needs --preset, --b or --phi")
    phi = phi_coefficients(pair, args.phi_order or DEFAULT_PHI_ORDER)
    if args.format == "csv":
        _emit(coeffs_to_csv(phi), args)
    else:
        out = {"phi": phi.to_pairs(), "tail_bound": list(phi.tail_bound) if phi.tail_bound else None}
        _emit(_dump(out), args)
    return 0


def _need(args, *names):
    for name in names:
        if getattr(args, name, None) is None:
            raise ValidationError(f"{args.command} needs --{name.replace('_', '-')}")


def cmd_norm(args) -> int:
    _need(args, "f")
    f = _series(args.f)
    pair = _pair(args, min_order=f.nominal_degree)
    if pair is None:
        raise ValidationError("norm needs --preset, --b or --phi")
    ctx = HbContext.from_pair(pair, tol=args.tol)
    vec = hb_norm(f, ctx)
    _emit(_dump(vec.to_dict(ctx.order)), args)
    return 0


def cmd_mean(args) -> int:
    _need(args, "method", "f")
    method, row = parse_method(args.method)
    f = _series(args.f)
    pair = _pair(args, min_order=f.nominal_degree)
    ctx = HbContext.from_pair(pair) if pair is not None else None
    grid = _grid(args)
    if grid is None:
        if row is None:
            raise ValidationError("mean needs --r, --r-grid or --geomspace")
        grid = [float(row)]
    rows = []
    for r in grid:
        pm = summ.mean_of_partial_sums(method, f, ctx, r)
        h2 = h2_norm(TaylorSeries(pm.series.coeffs))
        nb = pm.norm_b if pm.norm_b is not None else math.nan
        rows.append((r, nb, h2, pm.horizon, pm.tail_err))
    if args.format == "json":
        keys = ("r", "norm_b", "norm_h2", "horizon", "tail_err")
        _emit(_dump([dict(zip(keys, row)) for row in rows]), args)
    else:
        lines = ["r,norm_b,norm_h2,horizon,tail_err"]
        lines += [",".join(_fmt(v) for v in row) for row in rows]
        _emit("\n".join(lines) + "\n", args)
    return 0


def _scan_series(args) -> TaylorSeries:
    if args.f:
        return _series(args.f)
    fam, _, arg = args.family.partition(":")
    if fam != "lacunary":
        raise ValidationError(f"unknown family {args.family!r}")
    levels = int(arg) if arg else 10
    signs = None
    if args.signs:
        signs = [1.0 if s == "+" else -1.0 for s in args.signs]
        if len(signs) != levels or any(s not in "+-" for s in args.signs):
            raise ValidationError("--signs needs one '+' or '-' per lacunary level")
    return lab.lacunary(levels, signs=signs)


def cmd_scan(args) -> int:
    f = _scan_series(args)
    pair = _pair(args, min_order=f.nominal_degree)
    if pair is None:
        raise ValidationError("scan needs --preset, --b or --phi")
    grid = _grid(args)
    if grid is None:
        raise ValidationError("scan needs --r, --r-grid or --geomspace")
    table = lab.scan_divergence(f, HbContext.from_pair(pair), grid, quad_tol=args.tol,
                                threads=args.threads)
    _emit(table.to_csv(), args)
    for row in table.errors:
        sys.stderr.write(json.dumps({"r": row.r, "row_error": row.error}) + "\n")
    if table.errors and not table.ok_rows:
        raise CertificationError("no scan row could be certified")
    return 0


def cmd_check_regular(args) -> int:
    _need(args, "method")
    method, _ = parse_method(args.method)
    rep = summ.regularity_report(method, r_grid=_grid(args), n_horizon=args.horizon)
    _emit(_dump(rep.to_dict()), args)
    return 0


def _sequence(text: str) -> summ.VectorSequence:
    name, _, arg = text.partition(":")
    if name == "alternating":
        return summ.VectorSequence.periodic([1.0, 0.0])
    if name == "constant":
        return summ.VectorSequence.constant(float(arg or 1.0))
    if name == "periodic":
        return summ.VectorSequence.periodic(np.asarray(_load_json(arg), dtype=float))
    if name == "eventually":
        return summ.VectorSequence.eventually_constant(np.asarray(_load_json(arg), dtype=float))
    raise ValidationError(f"unknown sequence {text!r}")


def cmd_check_inclusion(args) -> int:
    K, _ = parse_method(args.K)
    H, _ = parse_method(args.H)
    out = {}
    if K.kind == "power_series" and H.kind == "power_series":
        mm = lab.MeasureMoments.lebesgue() if args.measure == "lebesgue" else lab.MeasureMoments.point_mass(1.0)
        out["borwein"] = lab.borwein_check(H, K, mm, args.delta, 0, args.horizon).to_dict()
    grid = _grid(args) or [1.0 - 10.0**-k for k in np.linspace(0.5, 4.0, 15)]
    out["empirical"] = lab.empirical_inclusion(K, H, _sequence(args.seq), grid, tol=args.tol).to_dict()
    _emit(_dump(out), args)
    return 0


def cmd_selftest(args) -> int:
    from .selftest import run_all

    results = run_all(args.only or None)
    for res in results:
        print(res.line(), flush=True)
    return 0 if all(r.passed for r in results) else 3


# ---------------------------------------------------------------- parser

def _add_pair_opts(p, phi_order_default=None):
    p.add_argument("--preset", choices=["halfshift"], help="named symbol")
    p.add_argument("--b", help="symbol coefficients (JSON or file)")
    p.add_argument("--phi", help="pair JSON file as written by `mate`")
    p.add_argument("--phi-order", type=int, default=phi_order_default,
                   help="phi coefficients to compute (raised to deg f when needed)")


def _add_grid_opts(p):
    p.add_argument("--r", type=float)
    p.add_argument("--r-grid", help="start:stop:step")
    p.add_argument("--geomspace", help="k0:k1 for r = 1 - 2^-k")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="hbsumma", description="H(b) norms and summability means of Taylor partial sums")
    parser.add_argument("--config", help="JSON file of option values; flags override it")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("mate", help="construct the Pythagorean mate a of b")
    _add_pair_opts(p)
    p.add_argument("--method", choices=["fejer-riesz", "outer"], default="fejer-riesz")
    p.add_argument("--grid", type=int, default=4096)
    p.add_argument("--tol", type=float, default=1e-10)
    p.set_defaults(func=cmd_mate)

    p = sub.add_parser("phi", help="Taylor coefficients of phi = b/a")
    _add_pair_opts(p)
    p.add_argument("--format", choices=["json", "csv"], default="json")
    p.set_defaults(func=cmd_phi)

    p = sub.add_parser("norm", help="H(b) norm of f")
    _add_pair_opts(p)
    p.add_argument("--f", help="coefficients of f (JSON or file)")
    p.add_argument("--tol", type=float, default=1e-12)
    p.set_defaults(func=cmd_norm)

    p = sub.add_parser("mean", help="summability means of the partial sums of f")
    _add_pair_opts(p)
    _add_grid_opts(p)
    p.add_argument("--method")
    p.add_argument("--f")
    p.add_argument("--format", choices=["csv", "json"], default="csv")
    p.set_defaults(func=cmd_mean)

    p = sub.add_parser("scan", help="divergence scan of logarithmic means")
    _add_pair_opts(p)
    _add_grid_opts(p)
    p.add_argument("--f")
    p.add_argument("--family", default="lacunary:10", help="lacunary[:levels]")
    p.add_argument("--signs", help="one '+' or '-' per lacunary level")
    p.add_argument("--tol", type=float, default=1e-10)
    p.add_argument("--threads", type=int)
    p.set_defaults(func=cmd_scan)

    p = sub.add_parser("check-regular", help="regularity report of a method")
    _add_grid_opts(p)
    p.add_argument("--method")
    p.add_argument("--horizon", type=int, default=16)
    p.set_defaults(func=cmd_check_regular)

    p = sub.add_parser("check-inclusion", help="scalar inclusion evidence K in H")
    _add_grid_opts(p)
    p.add_argument("--K", default="abel")
    p.add_argument("--H", default="log")
    p.add_argument("--seq", default="alternating",
                   help="alternating | constant:c | periodic:JSON | eventually:JSON")
    p.add_argument("--measure", choices=["lebesgue", "point"], default="lebesgue")
    p.add_argument("--delta", type=float, default=1.0)
    p.add_argument("--horizon", type=int, default=512)
    p.add_argument("--tol", type=float, default=1e-3)
    p.set_defaults(func=cmd_check_inclusion)

    p = sub.add_parser("selftest", help="run the acceptance checks")
    p.add_argument("--only", type=int, nargs="*")
    p.set_defaults(func=cmd_selftest)

    for p in (*sub.choices.values(),):
        p.add_argument("--output", help="write to this file instead of stdout")
    return parser


def parse_args(argv=None) -> argparse.Namespace:
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.config:
        cfg = _load_json(args.config)
        if not isinstance(cfg, dict):
            raise ValidationError("--config must hold a JSON object")
        sub = parser._subparsers._group_actions[0].choices[args.command]
        known = {a.dest for a in sub._actions}
        unknown = set(cfg) - known
        if unknown:
            raise ValidationError(f"unknown config keys: {sorted(unknown)}")
        sub.set_defaults(**cfg)
        args = parser.parse_args(argv)
    for name in ("tol",):
        v = getattr(args, name, None)
        if v is not None and not v > 0:
            raise ValidationError(f"--{name} must be positive")
    return args


def main(argv=None) -> int:
    try:
        args = parse_args(argv)
        return args.func(args)
    except HbsummaError as exc:
        code = 2 if isinstance(exc, CertificationError) else 1
        kind = "certification" if code == 2 else "validation"
        sys.stderr.write(json.dumps({"error": kind, "type": type(exc).__name__,
                                     "message": str(exc), "exit_code": code}) + "\n")
        return code
    except (ValueError, TypeError) as exc:
        sys.stderr.write(json.dumps({"error": "validation", "type": type(exc).__name__,
                                     "message": str(exc), "exit_code": 1}) + "\n")
        return 1


if __name__ == "__main__":
    sys.exit(main())
