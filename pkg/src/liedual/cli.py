"""Command-line front end.

Subcommands::

    grid       write the quadrature nodes used for a band (CSV)
    symbol     write a built-in symbol (JSON)
    transform  forward transform of sampled values (CSV in, JSON out)
    check      Mihlin / Hormander / Marcinkiewicz constants of a symbol
    verify     run the identity and invariant suite
    bench      heat scaling, heat moments or imaginary-power tables (CSV)

Exit codes: 0 success, 1 a property or verdict failed, 2 usage or I/O error.
"""
from __future__ import annotations

import argparse
import json
import math
import sys

import numpy as np

from . import multipliers as mult
from . import reps
from . import symbols as sym
from .fields import MarginError, field_from_json, field_to_json
from .fourier import (forward_transform, grid_from_csv, inverse_transform, plancherel_norm_sq,
                      rule_for_band)
from .groups import Group
from .verify import DEFAULTS as VERIFY_DEFAULTS
from .verify import run_suite

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2


class UsageError(Exception):
    pass


# -- formatting ---------------------------------------------------------------
def _fmt_float(x):
    if math.isnan(x) or math.isinf(x):
        return "null"
    return format(x, ".17g")


def dumps(obj, indent=0, step=2):
    """JSON with every float written at 17 significant digits."""
    pad = " " * (indent + step)
    end = " " * indent
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        items = [f"{pad}{json.dumps(str(k))}: {dumps(v, indent + step, step)}" for k, v in obj.items()]
        return "{\n" + ",\n".join(items) + "\n" + end + "}"
    if isinstance(obj, (list, tuple)):
        if not obj:
            return "[]"
        if all(isinstance(v, (int, float, np.floating, np.integer)) and not isinstance(v, bool) for v in obj):
            return "[" + ", ".join(dumps(v) for v in obj) + "]"
        items = [pad + dumps(v, indent + step, step) for v in obj]
        return "[\n" + ",\n".join(items) + "\n" + end + "]"
    if isinstance(obj, (bool, np.bool_)):
        return "true" if obj else "false"
    if isinstance(obj, (int, np.integer)):
        return str(int(obj))
    if isinstance(obj, (float, np.floating)):
        return _fmt_float(float(obj))
    if obj is None:
        return "null"
    return json.dumps(str(obj))


def _write(text, out):
    if out in (None, "-"):
        sys.stdout.write(text)
        if not text.endswith("\n"):
            sys.stdout.write("\n")
    else:
        with open(out, "w", encoding="utf-8") as fh:
            fh.write(text if text.endswith("\n") else text + "\n")


def _read(path):
    if path == "-":
        return sys.stdin.read()
    with open(path, encoding="utf-8") as fh:
        return fh.read()


# -- argument helpers --------------------------------------------------------
def _parse_group(text):
    try:
        return Group.parse(text)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None


def _parse_tolerance(text):
    key, sep, val = text.partition("=")
    if not sep:
        raise argparse.ArgumentTypeError("tolerance must look like key=value")
    try:
        return key.strip(), float(val)
    except ValueError:
        raise argparse.ArgumentTypeError(f"bad tolerance value {val!r}") from None


def _parse_floats(text):
    """``a,b,c`` or ``log2:lo:hi`` (powers 2^k for integer k in [lo, hi])."""
    text = text.strip()
    if not text:
        return []
    if text.startswith("log2:"):
        _, lo, hi = text.split(":")
        return [2.0**k for k in range(int(lo), int(hi) + 1)]
    return [float(v) for v in text.split(",") if v.strip()]


def _common(p):
    p.add_argument("--group", type=_parse_group, default=Group.su2(),
                   help="torus:d | su2 | product:[...] (default su2)")
    p.add_argument("--band", type=float, default=16.0, help="eigenvalue cutoff (default 16)")
    p.add_argument("--margin", type=int, default=None, help="frequency margin (symbols)")
    p.add_argument("--s", type=float, default=None, help="smoothness order")
    p.add_argument("--s0", type=int, default=1, help="trace-norm order for Marcinkiewicz")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", default=None, help="output path (default stdout)")
    p.add_argument("--tolerance", type=_parse_tolerance, action="append", default=[],
                   metavar="KEY=VALUE", help="override a default tolerance")


def build_parser():
    ap = argparse.ArgumentParser(prog="liedual", description=__doc__.splitlines()[0])
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("grid", help="write quadrature nodes for a band")
    _common(p)

    p = sub.add_parser("symbol", help="write a built-in symbol")
    _common(p)
    p.add_argument("--builtin", required=True,
                   help="identity | X:i,j,.. | spectral:heat:t | spectral:imag:a | spectral:bump | "
                        "parity | sign | random")
    p.add_argument("--decay", type=float, default=0.0)

    p = sub.add_parser("transform", help="forward transform of sampled values")
    _common(p)
    p.add_argument("--input", required=True, help="CSV with node,re,im")
    p.add_argument("--roundtrip", action="store_true", help="verify inversion on the grid")

    p = sub.add_parser("check", help="multiplier-condition constants")
    _common(p)
    src = p.add_mutually_exclusive_group(required=True)
    src.add_argument("--symbol", help="symbol JSON file")
    src.add_argument("--builtin", help="built-in symbol (see 'symbol --help')")
    p.add_argument("--decay", type=float, default=0.0)
    which = p.add_mutually_exclusive_group(required=True)
    which.add_argument("--mihlin", action="store_true")
    which.add_argument("--hormander", action="store_true")
    which.add_argument("--marcinkiewicz", action="store_true")
    p.add_argument("--sweep-bands", default=None, help="comma list of bands for a stability sweep")

    p = sub.add_parser("verify", help="run the invariant suite")
    _common(p)
    p.add_argument("--symbol", default=None, help="also check a symbol file (Leibniz, isometry)")

    p = sub.add_parser("bench", help="scaling tables")
    _common(p)
    which = p.add_mutually_exclusive_group(required=True)
    which.add_argument("--heat-scaling", action="store_true")
    which.add_argument("--imaginary-powers", action="store_true")
    which.add_argument("--moments", action="store_true")
    p.add_argument("--t-grid", default="log2:-10:-4", help="t values: a,b,c or log2:lo:hi")
    p.add_argument("--alpha-grid", default="0,1,2,4,8,16")
    return ap


# -- builtin symbols ------------------------------------------------------------
def _label_integer(G, label):
    if G.kind == "su2":
        return label
    if G.kind == "torus" and G.d == 1:
        return label[0]
    raise UsageError("parity/sign symbols need su2 or torus:1")


def builtin_symbol(spec, G, band, margin=None, seed=0, decay=0.0):
    parts = spec.split(":")
    name = parts[0]
    if name == "identity":
        return sym.identity(G, band)
    if name == "X":
        beta = tuple(int(v) for v in parts[1].split(",") if v.strip()) if len(parts) > 1 else ()
        if any(not 0 <= j < G.dim for j in beta):
            raise UsageError(f"generator index out of range for dim {G.dim}")
        return sym.fourier_of_X(G, band, beta)
    if name == "spectral":
        if len(parts) < 2:
            raise UsageError("spectral needs a function name")
        kind = parts[1]
        if kind == "heat":
            t = float(parts[2])
            return sym.spectral(lambda lam: math.exp(-t * lam), G, band, margin=margin)
        if kind == "imag":
            a = float(parts[2])
            return sym.spectral(lambda lam: (1.0 + lam) ** (1j * a), G, band, margin=margin)
        if kind == "bump":
            scale = float(parts[2]) if len(parts) > 2 else band
            return sym.spectral(lambda lam: mult.spectral_bump(lam / scale), G, band, margin=margin)
        if kind == "indicator":
            a, b = float(parts[2]), float(parts[3])
            return sym.spectral(lambda lam: 1.0 if a <= lam <= b else 0.0, G, band, margin=margin)
        raise UsageError(f"unknown spectral function {kind!r}")
    if name in ("parity", "sign"):
        fn = (lambda n: (-1.0) ** n) if name == "parity" else (lambda n: float(np.sign(n)))
        if name == "sign" and G.kind != "torus":
            raise UsageError("sign symbol needs torus:1")
        ent = {p: fn(_label_integer(G, p)) * np.eye(reps.dim(G, p)) for p in reps.enumerate_band(G, band)}
        return sym.Symbol(G, band, ent, margin=0 if margin is None else margin)
    if name == "random":
        return sym.random_symbol(G, band, seed=seed, decay=decay, margin=margin or 0)
    raise UsageError(f"unknown builtin {spec!r}")


# -- commands ---------------------------------------------------------------
def cmd_grid(args):
    rule = rule_for_band(args.group, args.band)
    G = rule.group
    lines = ["node,weight," + ",".join(_coord_names(G))]
    for k in range(rule.size):
        coords = _coords(G, rule.node(k).value)
        lines.append(f"{k},{_fmt_float(rule.weights[k])}," + ",".join(_fmt_float(c) for c in coords))
    _write("\n".join(lines), args.out)
    return EXIT_OK


def _coord_names(G, prefix=""):
    if G.kind == "torus":
        return [f"{prefix}theta{j}" for j in range(G.d)]
    if G.kind == "su2":
        return [f"{prefix}{n}" for n in ("a_re", "a_im", "b_re", "b_im")]
    out = []
    for i, F in enumerate(G.factors):
        out.extend(_coord_names(F, f"{prefix}f{i}_"))
    return out


def _coords(G, value):
    if G.kind == "torus":
        return list(np.asarray(value, dtype=float))
    if G.kind == "su2":
        a, b = value[0, 0], value[1, 0]
        return [a.real, a.imag, b.real, b.imag]
    out = []
    for F, v in zip(G.factors, value):
        out.extend(_coords(F, v))
    return out


def cmd_symbol(args):
    s = builtin_symbol(args.builtin, args.group, args.band, args.margin, args.seed, args.decay)
    _write(dumps(field_to_json(s)), args.out)
    return EXIT_OK


def cmd_transform(args, tol):
    rule = rule_for_band(args.group, args.band)
    f = grid_from_csv(_read(args.input), rule)
    c = forward_transform(f, args.band)
    obj = field_to_json(c)
    status = EXIT_OK
    if args.roundtrip:
        g = inverse_transform(c, rule)
        err = float(np.sqrt(np.sum(rule.weights * np.abs(g.values - f.values) ** 2)))
        scale = math.sqrt(max(f.l2_norm_sq(), 1e-300))
        obj["roundtrip_relative_error"] = err / scale
        obj["roundtrip_ok"] = err <= tol["roundtrip"] * scale
        if not obj["roundtrip_ok"]:
            status = EXIT_FAIL
    _write(dumps(obj), args.out)
    return status


def _load_symbol(args, band=None):
    if getattr(args, "symbol", None):
        try:
            s = field_from_json(json.loads(_read(args.symbol)))
        except json.JSONDecodeError as exc:
            raise ValueError(f"{args.symbol}: invalid JSON ({exc})") from None
        if args.margin is not None:
            s = s.with_margin(args.margin)
        if band is not None and band < s.band:
            s = s.restrict(reps.enumerate_band(s.group, band))
        return s
    return builtin_symbol(args.builtin, args.group, args.band if band is None else band,
                          args.margin, args.seed, args.decay)


def _run_checker(args, s):
    if args.mihlin:
        return mult.mihlin_report(s)
    if args.hormander:
        return mult.hormander_report(s, None if args.s is None else args.s)
    return mult.marcinkiewicz_report(s, args.s0)


def cmd_check(args, tol):
    if args.sweep_bands is None:
        rep = _run_checker(args, _load_symbol(args))
        _write(dumps(rep.to_json()), args.out)
        return EXIT_OK
    bands = _parse_floats(args.sweep_bands)
    if len(bands) < 2:
        raise UsageError("--sweep-bands needs at least two bands")
    rows = []
    for b in bands:
        rep = _run_checker(args, _load_symbol(args, band=b))
        rows.append({"band": b, "constant": rep.constant, "report": rep.to_json()})
    consts = np.array([r["constant"] for r in rows])
    slope = float(np.polyfit(np.log(bands), np.log(np.maximum(consts, 1e-300)), 1)[0])
    spread = float(consts.max() / consts.min()) if consts.min() > 0 else float("inf")
    ok = spread <= 1.0 + tol["stability"]
    out = {"checker": rows[0]["report"]["checker"], "sweep": rows, "growth_slope": slope,
           "spread": spread, "stability_tolerance": tol["stability"],
           "verdict": "passes" if ok else "fails"}
    _write(dumps(out), args.out)
    return EXIT_OK if ok else EXIT_FAIL


def cmd_verify(args, tol):
    extra = None
    if args.symbol:
        extra = field_from_json(json.loads(_read(args.symbol)))
    report = run_suite(args.group, args.band, seed=args.seed, tolerances=tol, symbol=extra)
    _write(dumps(report), args.out)
    return EXIT_OK if report["all_pass"] else EXIT_FAIL


def cmd_bench(args, tol):
    G = args.group
    lines = ["parameter,value,fitted_slope"]
    if args.heat_scaling or args.moments:
        grid = _parse_floats(args.t_grid)
        if len(grid) < 2 or any(t <= 0 for t in grid):
            raise UsageError("t grid needs at least two positive values")
        if args.heat_scaling:
            s = mult.default_s(G) if args.s is None else int(args.s)
            slope, vals = mult.heat_scaling_probe(G, s, grid)
            target = (s - G.dim / 2) / 2
        else:
            s = 2.0 if args.s is None else args.s
            vals, slope = mult.moments(G, s, grid)
            target = s / 2
        for t, v in zip(grid, vals):
            lines.append(f"{_fmt_float(t)},{_fmt_float(v)},{_fmt_float(slope)}")
        ok = abs(slope - target) <= tol["slope"] * abs(target)
        verdict = f"# target_slope={_fmt_float(target)} verdict={'pass' if ok else 'fail'}"
    else:
        alphas = _parse_floats(args.alpha_grid)
        if not alphas:
            raise UsageError("empty alpha grid")
        rows, expo = mult.imaginary_power_probe(G, args.band, alphas, args.s)
        for a, v in rows:
            lines.append(f"{_fmt_float(a)},{_fmt_float(v)},{_fmt_float(expo)}")
        s = mult.default_s(G) if args.s is None else args.s
        vals = [v for _, v in sorted((abs(a), v) for a, v in rows)]
        monotone = all(b >= (1 - tol["monotone"]) * a for a, b in zip(vals, vals[1:]))
        ok = monotone and math.isfinite(expo) and 1.0 <= expo <= s + 1
        verdict = (f"# growth_exponent={_fmt_float(expo)} expected=[1,{_fmt_float(s + 1)}] "
                   f"monotone={'yes' if monotone else 'no'} verdict={'pass' if ok else 'fail'}")
    lines.append(verdict)
    _write("\n".join(lines), args.out)
    return EXIT_OK if ok else EXIT_FAIL


DEFAULT_TOLERANCES = dict(VERIFY_DEFAULTS, roundtrip=1e-10, stability=0.2, slope=0.1, monotone=0.05)


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    tol = dict(DEFAULT_TOLERANCES)
    for k, v in args.tolerance:
        tol[k] = v
    if args.band < 0:
        parser.error("--band must be nonnegative")
    try:
        if args.command == "grid":
            return cmd_grid(args)
        if args.command == "symbol":
            return cmd_symbol(args)
        if args.command == "transform":
            return cmd_transform(args, tol)
        if args.command == "check":
            return cmd_check(args, tol)
        if args.command == "verify":
            return cmd_verify(args, tol)
        if args.command == "bench":
            return cmd_bench(args, tol)
    except (UsageError, MarginError, ValueError, OSError, KeyError) as exc:
        print(f"liedual {args.command}: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    parser.error("unknown command")
    return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
