"""``packlab`` command line.

Every command writes a run manifest (argv, flags, seed, input hashes,
version, wall time).  ``packlab replay MANIFEST`` re-runs a manifest,
optionally with a different ``--threads`` value or output path.

Exit codes: 0 success, 2 invalid input, 3 arithmetic overflow,
4 degenerate data, 5 insufficient data.
"""
from __future__ import annotations

import argparse
import hashlib
import json
import os
import sys
import time
import warnings
from pathlib import Path

import numpy as np

from . import __version__
from .errors import InvalidInput, PacklabError

TORUS_NOTE = (
    "Torus pairings from genuine quasiconformal deformations cannot be built at "
    "desk scale; Moebius pairings and non-conjugate Schottky pairs stand in for them."
)


def _sha256(path) -> str:
    h = hashlib.sha256()
    with open(path, "rb") as fh:
        for block in iter(lambda: fh.read(1 << 20), b""):
            h.update(block)
    return h.hexdigest()


def _threads(args) -> int:
    if args.threads is not None:
        return max(1, args.threads)
    env = os.environ.get("PACKLAB_THREADS")
    if env:
        try:
            return max(1, int(env))
        except ValueError:
            raise InvalidInput(f"PACKLAB_THREADS={env!r} is not an integer")
    return os.cpu_count() or 1


def _read_text(path) -> str:
    try:
        with open(path, encoding="utf-8") as fh:
            return fh.read()
    except OSError as exc:
        raise InvalidInput(f"cannot read {path}: {exc}") from exc


def _emit(text: str, out) -> None:
    if out:
        with open(out, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _load_json(path):
    try:
        return json.loads(_read_text(path))
    except json.JSONDecodeError as exc:
        raise InvalidInput(f"{path}: {exc}") from exc


# --------------------------------------------------------------------------
# commands; each returns (output text, seed or None)

def cmd_gen(args):
    from .descartes import generate, place_root, root_quadruple_bounded
    from .io_render import emit_csv

    if args.root_default:
        root = root_quadruple_bounded()
    else:
        try:
            k = [int(x) for x in args.root.split(",")]
        except ValueError:
            raise InvalidInput(f"--root must be four comma separated integers, got {args.root!r}")
        root = place_root(k)
    run = generate(root, args.max_curv, workers=_threads(args))
    return emit_csv(run), None


def _data_max(path, curvatures) -> float:
    """Generation threshold from the sibling manifest, else the largest curvature."""
    man = Path(str(path) + ".manifest.json")
    if man.exists():
        try:
            return float(json.loads(man.read_text())["flags"]["max_curv"])
        except (KeyError, ValueError, TypeError, json.JSONDecodeError):
            pass
    return float(np.max(np.abs(curvatures)))


def cmd_fit(args):
    from .io_render import dumps_report, parse_circles_csv
    from .stats import count_series, dyadic_grid, fit_power_law

    table = parse_circles_csv(_read_text(args.input))
    if not len(table):
        raise InvalidInput("circle list is empty")
    k = np.abs(table.curvature)
    hi_data = _data_max(args.input, k)
    lo_data = float(k.min())
    if not (0 < args.tmin < args.tmax):
        raise InvalidInput("need 0 < tmin < tmax")
    if args.tmin < lo_data or args.tmax > hi_data * (1 + 1e-12):
        raise InvalidInput(f"window [{args.tmin}, {args.tmax}] lies outside the data range [{lo_data}, {hi_data}]")
    grid = dyadic_grid(args.tmin, args.tmax, args.per_octave)
    series = count_series(k, grid)
    try:
        exponent, stderr = fit_power_law(series, (args.tmin, args.tmax), min_points=args.min_points)
    except PacklabError as exc:
        raise InvalidInput(f"empty or too small fit window: {exc}") from exc
    report = {
        "exponent": exponent,
        "stderr": stderr,
        "window": [args.tmin, args.tmax],
        "points": len(series),
        "per_octave": args.per_octave,
        "circles": len(table),
        "data_max": hi_data,
        "series": {"t": series.t.tolist(), "n": series.n.tolist()},
    }
    return dumps_report(report), None


def cmd_dim(args):
    from .io_render import dumps_report
    from .orbits import critical_exponent, enumerate_orbit, limit_set_dimension, load_presentation

    pres = load_presentation(args.group, normalize=args.normalize)
    depth = int(args.depth) if args.method == "loxodromic" else float(args.depth)
    dim = limit_set_dimension(pres, depth, args.method, min_octaves=args.eps_decades)
    orb = enumerate_orbit(pres, T=args.T, L_max=args.L_max, workers=_threads(args))
    ce = critical_exponent(orb)
    report = {
        "group": Path(args.group).name,
        "method": args.method,
        "depth": depth,
        "box_dimension": dim.as_dict(),
        "critical_exponent": ce.as_dict(),
        "gap": ce.value - dim.value,
        "orbit_T": args.T,
        "orbit_records": int(np.count_nonzero(orb.record_mask)),
        "orbit_complete": bool(orb.complete),
    }
    return dumps_report(report), None


def cmd_sieve(args):
    from .io_render import dumps_report, parse_circles_csv
    from .stats import sieve

    table = parse_circles_csv(_read_text(args.input))
    values, counts = np.unique(table.curvature, return_counts=True)
    census = {int(v): int(c) for v, c in zip(values, counts)}
    if args.factors < 1:
        raise InvalidInput("--factors must be at least 1")
    reports = [sieve(census, int(T), args.factors, args.delta).as_dict() for T in args.max]
    return dumps_report({"reports": reports} if len(reports) > 1 else reports[0]), None


def cmd_crtest(args):
    from .io_render import dumps_report
    from .joinings import boundary_pairs, conformality_stat, load_pair

    pair = load_pair(args.pair, normalize=args.normalize)
    sample = boundary_pairs(pair, args.depth)
    rep = conformality_stat(sample, args.samples, args.tol, seed=args.seed)
    out = rep.as_dict()
    out["boundary_pairs"] = len(sample)
    out["depth"] = args.depth
    return dumps_report(out), args.seed


def cmd_joint(args):
    from .io_render import dumps_report
    from .joinings import JOINT_BOUND, joint_exponent, load_pair
    from .moebius import BASEPOINT, H3Point

    pair = load_pair(args.pair, normalize=args.normalize)
    o = BASEPOINT
    if args.o != "default":
        try:
            x, y, t = (float(v) for v in args.o.split(","))
        except ValueError:
            raise InvalidInput("--o must be 'default' or 'x,y,t'")
        if not t > 0:
            raise InvalidInput("basepoint height must be positive")
        o = H3Point(complex(x, y), t)
    est = joint_exponent(pair, o, args.T, L_max=args.L_max, workers=_threads(args))
    out = est.as_dict()
    out["bound"] = JOINT_BOUND
    out["below_bound"] = bool(est.value < JOINT_BOUND)
    return dumps_report(out), None


def cmd_render(args):
    from .io_render import emit_svg, packing_scene, parse_circles_csv

    table = parse_circles_csv(_read_text(args.input))
    viewport = None
    if args.viewport != "auto":
        try:
            viewport = tuple(float(v) for v in args.viewport.split(","))
        except ValueError:
            raise InvalidInput("--viewport must be 'auto' or 'x0,x1,y0,y1'")
        if len(viewport) != 4:
            raise InvalidInput("--viewport needs four numbers")
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        return emit_svg(packing_scene(table, viewport)), None


# --------------------------------------------------------------------------
# parser

def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="packlab", description=__doc__.split("\n")[0],
                                epilog=TORUS_NOTE)
    p.add_argument("--version", action="version", version=f"packlab {__version__}")
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp, inputs=(), out=True):
        sp.add_argument("--threads", type=int, default=None,
                        help="worker cap (default: $PACKLAB_THREADS or all cores)")
        if out:
            sp.add_argument("--out", default=None, help="output file (default: stdout)")
        sp.add_argument("--manifest", default=None,
                        help="manifest path (default: <out>.manifest.json, or stderr without --out)")
        sp.set_defaults(_inputs=inputs)
        return sp

    g = common(sub.add_parser("gen", help="generate an integral Apollonian packing as CSV"))
    src = g.add_mutually_exclusive_group(required=True)
    src.add_argument("--root", help="bounded root curvatures, written --root=k1,k2,k3,k4 when k1 is negative")
    src.add_argument("--root-default", action="store_true", help="use the root (-1,2,2,3)")
    g.add_argument("--max-curv", type=int, required=True, help="curvature threshold t")
    g.set_defaults(func=cmd_gen)

    f = common(sub.add_parser("fit", help="fit the circle-count exponent of a CSV"), inputs=("input",))
    f.add_argument("--in", dest="input", required=True)
    f.add_argument("--tmin", type=float, required=True)
    f.add_argument("--tmax", type=float, required=True)
    f.add_argument("--per-octave", type=int, default=4)
    f.add_argument("--min-points", type=int, default=10)
    f.set_defaults(func=cmd_fit)

    d = common(sub.add_parser("dim", help="box dimension and critical exponent of a group"), inputs=("group",))
    d.add_argument("--group", required=True, help="presentation JSON")
    d.add_argument("--depth", type=float, required=True,
                   help="word length (loxodromic) or hyperbolic ball radius (orbit)")
    d.add_argument("--method", choices=("loxodromic", "orbit"), default="loxodromic")
    d.add_argument("--eps-decades", type=int, default=3, help="minimum dyadic octaves in the box grid")
    d.add_argument("--T", type=float, default=30.0, help="orbit enumeration radius")
    d.add_argument("--L-max", type=int, default=2000)
    d.add_argument("--normalize", action="store_true", help="rescale generators to det 1")
    d.set_defaults(func=cmd_dim)

    s = common(sub.add_parser("sieve", help="prime and almost-prime curvature counts"), inputs=("input",))
    s.add_argument("--in", dest="input", required=True)
    s.add_argument("--max", type=int, nargs="+", required=True, help="one or more thresholds T")
    s.add_argument("--factors", type=int, default=2, help="largest r for almost-prime counts")
    s.add_argument("--delta", type=float, default=1.3057)
    s.set_defaults(func=cmd_sieve)

    c = common(sub.add_parser("cr-test", help="cross-ratio test of the boundary map of a pair",
                              epilog=TORUS_NOTE), inputs=("pair",))
    c.add_argument("--pair", required=True)
    c.add_argument("--depth", type=int, default=6)
    c.add_argument("--samples", type=int, default=1000)
    c.add_argument("--tol", type=float, default=1e-6)
    c.add_argument("--seed", type=int, required=True)
    c.add_argument("--normalize", action="store_true")
    c.set_defaults(func=cmd_crtest)

    j = common(sub.add_parser("joint", help="joint critical exponent of a pair", epilog=TORUS_NOTE),
               inputs=("pair",))
    j.add_argument("--pair", required=True)
    j.add_argument("--T", type=float, default=40.0)
    j.add_argument("--o", default="default", help="basepoint 'x,y,t' or 'default' (0,0,1)")
    j.add_argument("--L-max", type=int, default=1000)
    j.add_argument("--normalize", action="store_true")
    j.set_defaults(func=cmd_joint)

    r = common(sub.add_parser("render", help="render a circle CSV as SVG"), inputs=("input",))
    r.add_argument("--in", dest="input", required=True)
    r.add_argument("--viewport", default="auto", help="'auto' or --viewport=x0,x1,y0,y1")
    r.set_defaults(func=cmd_render)

    rp = sub.add_parser("replay", help="re-run a manifest")
    rp.add_argument("manifest")
    rp.add_argument("--threads", type=int, default=None)
    rp.add_argument("--out", default=None, help="write the output here instead")
    rp.add_argument("--manifest-out", default=None)
    rp.set_defaults(func=None)
    return p


def _flags(args) -> dict:
    return {k: v for k, v in sorted(vars(args).items()) if not k.startswith("_") and k != "func"}


def _run(args, argv) -> int:
    t0 = time.perf_counter()
    inputs = {}
    for attr in args._inputs:
        path = getattr(args, attr)
        if not os.path.isfile(path):
            raise InvalidInput(f"input file {path} does not exist")
        inputs[path] = _sha256(path)
    text, seed = args.func(args)
    _emit(text, args.out)
    manifest = {
        "subcommand": args.command,
        "argv": list(argv),
        "flags": _flags(args),
        "seed": seed,
        "input_hashes": inputs,
        "output_sha256": hashlib.sha256(text.encode("utf-8")).hexdigest(),
        "tool_version": __version__,
        "wall_time_s": time.perf_counter() - t0,
    }
    body = json.dumps(manifest, indent=2) + "\n"
    target = args.manifest or (args.out + ".manifest.json" if args.out else None)
    if target:
        with open(target, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(body)
    else:
        sys.stderr.write(body)
    return 0


def _replay(args, parser) -> int:
    man = _load_json(args.manifest)
    try:
        argv = list(man["argv"])
        hashes = dict(man.get("input_hashes", {}))
    except (KeyError, TypeError) as exc:
        raise InvalidInput(f"malformed manifest: {exc}") from exc
    for path, digest in hashes.items():
        if not os.path.isfile(path) or _sha256(path) != digest:
            raise InvalidInput(f"input {path} is missing or changed since the manifest was written")
    new = parser.parse_args(argv)
    if new.command == "replay":
        raise InvalidInput("cannot replay a replay")
    if args.threads is not None:
        new.threads = args.threads
    if args.out is not None:
        new.out = args.out
        new.manifest = args.manifest_out
    elif args.manifest_out is not None:
        new.manifest = args.manifest_out
    rebuilt = _rebuild_argv(argv, new)
    return _run(new, rebuilt)


def _rebuild_argv(argv, args) -> list[str]:
    out, skip = [], False
    for i, a in enumerate(argv):
        if skip:
            skip = False
            continue
        if a in ("--threads", "--out", "--manifest"):
            skip = True
            continue
        if a.startswith(("--threads=", "--out=", "--manifest=")):
            continue
        out.append(a)
    if args.threads is not None:
        out += ["--threads", str(args.threads)]
    if args.out:
        out += ["--out", args.out]
    if args.manifest:
        out += ["--manifest", args.manifest]
    return out


def main(argv=None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0) if exc.code in (0, None) else 2
    try:
        if args.command == "replay":
            return _replay(args, parser)
        return _run(args, argv)
    except PacklabError as exc:
        print(f"packlab {args.command}: {type(exc).__name__}: {exc}", file=sys.stderr)
        return exc.exit_code
    except OverflowError as exc:
        print(f"packlab {args.command}: overflow: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
