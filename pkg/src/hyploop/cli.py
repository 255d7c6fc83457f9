"""Command-line front end: ``hyploop <subcommand> [options]``."""
from __future__ import annotations

import argparse
import json
import math
import sys
from pathlib import Path

import numpy as np

from . import __version__
from .errors import NumericalFailure, ValidationError

EXIT_OK, EXIT_VALIDATION, EXIT_NUMERIC, EXIT_USAGE = 0, 2, 3, 64

SUBCOMMANDS = ("density", "length", "reroute", "scan-upper", "scan-lower", "kershner", "growth", "bounds", "cover")


# --------------------------------------------------------------------------
# input helpers
# --------------------------------------------------------------------------

def _read_json(path: str):
    try:
        return json.loads(Path(path).read_text())
    except FileNotFoundError:
        raise ValidationError(f"file not found: {path}") from None
    except json.JSONDecodeError as e:
        raise ValidationError(f"{path}: invalid JSON ({e})") from None


def load_config(path: str) -> dict:
    """Flat TOML or JSON table of option values; dashes and underscores are interchangeable."""
    p = Path(path)
    try:
        text = p.read_text()
    except FileNotFoundError:
        raise ValidationError(f"config file not found: {path}") from None
    if p.suffix.lower() == ".json":
        obj = json.loads(text)
    else:
        try:
            import tomllib
        except ModuleNotFoundError:
            import tomli as tomllib
        try:
            obj = tomllib.loads(text)
        except tomllib.TOMLDecodeError as e:
            raise ValidationError(f"{path}: invalid TOML ({e})") from None
    if not isinstance(obj, dict):
        raise ValidationError("config must be a table")
    return {k.replace("-", "_"): v for k, v in obj.items()}


def load_domain(args):
    from .geometry import Domain, annulus, pair_of_pants

    if getattr(args, "domain", None):
        return Domain.from_json(_read_json(args.domain))
    preset = getattr(args, "preset", None) or "annulus:1,4"
    kind, _, rest = preset.partition(":")
    nums = [float(x) for x in rest.split(",") if x] if rest else []
    if kind == "annulus":
        return annulus(*(nums or [1.0, 4.0]))
    if kind in ("pants", "pair-of-pants"):
        return pair_of_pants(*nums)
    raise ValidationError(f"unknown preset {preset!r}")


def load_loop(path: str):
    from .geometry import PolyLoop

    return PolyLoop.from_json(_read_json(path))


def parse_points(text: str | None) -> list[complex]:
    """'x,y;x,y;...' or a JSON file of [[x, y], ...]."""
    if not text:
        return []
    if Path(text).suffix == ".json" or Path(text).exists():
        return [complex(a, b) for a, b in _read_json(text)]
    try:
        return [complex(*(float(v) for v in item.split(","))) for item in text.split(";") if item.strip()]
    except (TypeError, ValueError):
        raise ValidationError(f"cannot parse points {text!r}") from None


def parse_s_list(values) -> list[int]:
    if values is None:
        return []
    if isinstance(values, str):
        values = values.replace(",", " ").split()
    try:
        out = [int(v) for v in values]
    except (TypeError, ValueError):
        raise ValidationError("s list must be integers") from None
    if any(b <= a for a, b in zip(out, out[1:])):
        raise ValidationError("s list must be strictly increasing")
    return out


def _plain(x):
    if isinstance(x, dict):
        return {str(k): _plain(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_plain(v) for v in x]
    if isinstance(x, (complex, np.complexfloating)):
        return [float(x.real), float(x.imag)]
    if isinstance(x, np.ndarray):
        return _plain(x.tolist())
    if isinstance(x, np.integer):
        return int(x)
    if isinstance(x, (float, np.floating)):
        x = float(x)
        return x if math.isfinite(x) else str(x)
    return x


def dumps(obj) -> str:
    return json.dumps(_plain(obj), sort_keys=True, indent=2) + "\n"


def _emit(args, obj) -> None:
    text = dumps(obj)
    if getattr(args, "json", None):
        Path(args.json).write_text(text, newline="\n")
    else:
        sys.stdout.write(text)


# --------------------------------------------------------------------------
# subcommands
# --------------------------------------------------------------------------

def cmd_density(args):
    from .kobayashi import DensityBand, model_band, oracle_density

    z = parse_points(args.point)[0] if args.point else 0j
    if args.model:
        band = model_band(args.model, args.param)
        out = {"model": args.model, "param": args.param, "oracle": oracle_density(args.model, z, args.param)}
    else:
        band = DensityBand(load_domain(args))
        out = {}
    out.update(point=z, lower=band.lower_density(z), upper=band.upper_density(z))
    _emit(args, out)


def cmd_length(args):
    from .homotopy import loop_word, make_cut_system
    from .kobayashi import DensityBand, length_bounds

    dom = load_domain(args)
    loop = load_loop(args.loop)
    lb = length_bounds(loop, DensityBand(dom), args.eta)
    out = {"lower": lb.lower, "upper": lb.upper, "pieces": lb.pieces, "eta": lb.eta,
           "euclidean_length": loop.length()}
    if dom.holes:
        out["word"] = str(loop_word(loop, make_cut_system(dom)))
    _emit(args, out)


def cmd_reroute(args):
    from .reroute import StarParams, procedure_star

    dom = load_domain(args)
    loop = load_loop(args.loop)
    S = parse_points(args.punctures)
    s = args.s if args.s is not None else max(1, len(S))
    res = procedure_star(dom, loop, S, StarParams(args.a, s))
    _emit(args, res.to_json())


def _alpha(args):
    from .homotopy import Word

    return Word.parse(args.alpha)


def _strategies(names):
    from .extremal import default_strategies, strategy_by_name

    if not names:
        return default_strategies()
    if isinstance(names, str):
        names = names.replace(",", " ").split()
    return [strategy_by_name(n) for n in names]


def _write_report(args, rep):
    if args.csv:
        Path(args.csv).write_text(rep.to_csv(), newline="\n")
    text = rep.to_json()
    if args.json:
        Path(args.json).write_text(text, newline="\n")
    if not args.csv and not args.json:
        sys.stdout.write(rep.to_csv())
    elif not args.json:
        sys.stdout.write(text)


def cmd_scan_upper(args):
    from .errors import InsufficientData
    from .extremal import fit_growth, scan_upper

    rep = scan_upper(load_domain(args), _alpha(args), parse_s_list(args.s_list), _strategies(args.strategies),
                     args.trials, args.seed, args.eta, args.workers)
    try:
        rep.fit = fit_growth(rep.rows)
    except InsufficientData:
        pass
    _write_report(args, rep)


def cmd_scan_lower(args):
    from .errors import InsufficientData
    from .extremal import fit_growth, scan_lower

    rep = scan_lower(load_domain(args), _alpha(args), parse_s_list(args.s_list))
    try:
        rep.fit = fit_growth(rep.rows)
    except InsufficientData:
        pass
    _write_report(args, rep)


def cmd_kershner(args):
    from .covering import KERSHNER_DENSITY, kershner_cover

    out = []
    for s in parse_s_list(args.s_list) or [args.s]:
        cov = kershner_cover(s)
        out.append({
            "s": s, "radius": cov.radius, "r0": cov.r0, "density": cov.density,
            "area_fraction": s * 2.0 * math.pi * (1.0 - math.cos(cov.radius)) / (4.0 * math.pi),
            "reference": KERSHNER_DENSITY, "ratio": cov.density / KERSHNER_DENSITY,
            "uncovered": cov.audit(args.samples, args.seed),
        })
    _emit(args, out if len(out) > 1 else out[0])


def cmd_growth(args):
    from .growth import (Lattice, ball_size, exponential_bound, homotopy_count_torus, parse_model,
                         quasi_isometry_constants)

    model = parse_model(args.model)
    R = args.radius
    sizes = {r: ball_size(model, r) for r in range(R + 1)}
    out = {
        "model": args.model,
        "radius": R,
        "ball_size": sizes[R],
        "sizes": sizes,
        "exponential_bound_holds": all(sizes[r] <= exponential_bound(model, r) for r in range(1, R + 1)),
    }
    if isinstance(model, Lattice):
        q = quasi_isometry_constants(model, max(1, R))
        out.update(qi_L=q.L, qi_A=q.A, qi_L_squared=str(q.L_squared), qi_deviation=q.max_deviation,
                   homotopy_count=homotopy_count_torus(model, R))
    _emit(args, out)


def cmd_bounds(args):
    from fractions import Fraction

    from .arithbounds import FibrationData, evaluate_all

    data = FibrationData(args.dimA, args.g, args.t, Fraction(args.m), args.conductor)
    out = evaluate_all(data, args.s, Fraction(args.c), None if args.p is None else Fraction(args.p))
    out = {k: (str(v) if isinstance(v, Fraction) else v) for k, v in out.items()}
    _emit(args, out)


def cmd_cover(args):
    from .geometry import cover_by_disjoint_discs, verify_cover

    pts = parse_points(args.points)
    special = parse_points(args.special)
    discs = cover_by_disjoint_discs(pts, special, args.eps)
    _emit(args, {
        "discs": [d.to_json() for d in discs],
        "total_area": sum(d.area() for d in discs),
        "failures": verify_cover(pts, special, args.eps, discs),
    })


# --------------------------------------------------------------------------
# parser
# --------------------------------------------------------------------------

def _domain_opts(p):
    p.add_argument("--domain", help="domain JSON file")
    p.add_argument("--preset", help="annulus:r,R or pants[:R,sep,rho] (default annulus:1,4)")


def _out_opts(p, csv=False):
    p.add_argument("--config", default=argparse.SUPPRESS, help="TOML or JSON file mirroring these flags")
    p.add_argument("--json", help="write JSON here instead of stdout")
    if csv:
        p.add_argument("--csv", help="write the row table here")


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="hyploop", description="Certified Kobayashi length bounds for loops.")
    ap.add_argument("--version", action="version", version=f"hyploop {__version__}")
    ap.add_argument("--config", help="TOML or JSON file mirroring the subcommand's flags")
    sub = ap.add_subparsers(dest="command", metavar="subcommand")

    p = sub.add_parser("density", help="density bounds at a point")
    _domain_opts(p)
    p.add_argument("--model", help="closed-form model instead of a domain")
    p.add_argument("--param", type=float, default=1.0)
    p.add_argument("--point", help="x,y")
    _out_opts(p)
    p.set_defaults(func=cmd_density)

    p = sub.add_parser("length", help="certified length bounds of a loop")
    _domain_opts(p)
    p.add_argument("--loop", required=True, help="loop JSON file")
    p.add_argument("--eta", type=float, default=0.05)
    _out_opts(p)
    p.set_defaults(func=cmd_length)

    p = sub.add_parser("reroute", help="reroute a loop around punctures")
    _domain_opts(p)
    p.add_argument("--loop", required=True)
    p.add_argument("--punctures", help="x,y;x,y or JSON file")
    p.add_argument("--a", type=float, required=True)
    p.add_argument("--s", type=int)
    _out_opts(p)
    p.set_defaults(func=cmd_reroute)

    for name, fn in (("scan-upper", cmd_scan_upper), ("scan-lower", cmd_scan_lower)):
        p = sub.add_parser(name, help=f"{name.split('-')[1]} bounds over a range of s")
        _domain_opts(p)
        p.add_argument("--alpha", default="x1")
        p.add_argument("--s-list", nargs="+", default=["1", "2", "4", "8", "16"])
        p.add_argument("--seed", type=int, default=0)
        if name == "scan-upper":
            p.add_argument("--eta", type=float, default=0.05)
            p.add_argument("--trials", type=int, default=1)
            p.add_argument("--strategies", nargs="+")
            p.add_argument("--workers", type=int, default=1)
        _out_opts(p, csv=True)
        p.set_defaults(func=fn)

    p = sub.add_parser("kershner", help="sphere covering by s equal discs")
    p.add_argument("--s", type=int, default=100)
    p.add_argument("--s-list", nargs="+")
    p.add_argument("--samples", type=int, default=100_000)
    p.add_argument("--seed", type=int, default=0)
    _out_opts(p)
    p.set_defaults(func=cmd_kershner)

    p = sub.add_parser("growth", help="word-metric ball growth")
    p.add_argument("--model", required=True, help="free:k | abelian:r:t | lattice:a,b,c,d | lattice:hex")
    p.add_argument("--radius", type=int, required=True)
    _out_opts(p)
    p.set_defaults(func=cmd_growth)

    p = sub.add_parser("bounds", help="counting bounds for integral points")
    p.add_argument("--dimA", type=int, required=True)
    p.add_argument("--g", type=int, required=True)
    p.add_argument("--t", type=int, required=True)
    p.add_argument("--m", default="1")
    p.add_argument("--s", type=int, required=True)
    p.add_argument("--conductor", type=int)
    p.add_argument("--c", default="1", help="comparator constant")
    p.add_argument("--p", help="comparator height polynomial value (default s)")
    _out_opts(p)
    p.set_defaults(func=cmd_bounds)

    p = sub.add_parser("cover", help="disjoint small discs around a point set")
    p.add_argument("--points", required=True)
    p.add_argument("--special")
    p.add_argument("--eps", type=float, default=0.1)
    _out_opts(p)
    p.set_defaults(func=cmd_cover)
    return ap


def _subcommand(argv: list[str]) -> str | None:
    it = iter(argv)
    for tok in it:
        if tok == "--config":
            next(it, None)
        elif not tok.startswith("-"):
            return tok
    return None


def _config_path(argv: list[str]) -> str | None:
    for i, tok in enumerate(argv):
        if tok == "--config" and i + 1 < len(argv):
            return argv[i + 1]
        if tok.startswith("--config="):
            return tok.split("=", 1)[1]
    return None


def main(argv: list[str] | None = None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    ap = build_parser()
    cmd = _subcommand(argv)
    if cmd not in SUBCOMMANDS and not any(t in ("--version", "-h", "--help") for t in argv):
        ap.print_usage(sys.stderr)
        if cmd is not None:
            print(f"hyploop: unknown subcommand {cmd!r}", file=sys.stderr)
        return EXIT_USAGE
    try:
        cfg_path = _config_path(argv)
        if cfg_path:
            cfg = load_config(cfg_path)
            sub = ap._subparsers._group_actions[0].choices[cmd]
            actions = {a.dest: a for a in sub._actions}
            unknown = sorted(set(cfg) - set(actions))
            if unknown:
                raise ValidationError(f"unknown config keys: {', '.join(unknown)}")
            for k in cfg:
                actions[k].required = False
            sub.set_defaults(**cfg)
        args = ap.parse_args(argv)
        args.func(args)
    except SystemExit as e:
        return EXIT_VALIDATION if e.code not in (0, None) else EXIT_OK
    except (ValidationError, OSError) as e:
        print(f"hyploop: error: {e}", file=sys.stderr)
        return EXIT_VALIDATION
    except NumericalFailure as e:
        print(f"hyploop: numerical failure: {e}", file=sys.stderr)
        return EXIT_NUMERIC
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
