"""``shiftchaos`` command line: verify, witness, spectrum-map.

Exit codes: 0 every report passes, 1 some report fails, 2 usage error.
"""
from __future__ import annotations

import argparse
import json
import sys

from . import constructions, verify
from .operators import InvalidSpec, ShiftSpec, parse_complex
from .piecewise import PiecewiseFn, Space
from .spectrum import spectrum_grid

DEFAULTS = {
    "space": "lp:2",
    "kind": "bounded",
    "w": "2",
    "a": "1",
    "tol": 1e-9,
    "seed": 0,
    "out": None,
    "suite": "all",
    "N": 1,
    "lambda": "1",
    "eps": 0.2,
    "x": None,
    "y": None,
    "re_range": [-3.0, 3.0],
    "im_range": [-3.0, 3.0],
    "resolution": None,
    "step": None,
}


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{self.prog}: {message}")


def _common(p):
    p.add_argument("--config", help="JSON file with any of the flag values; flags win")
    p.add_argument("--space", help="lp:<p> or c0 (default lp:2)")
    p.add_argument("--kind", choices=("bounded", "unbounded"))
    p.add_argument("--w", help="weight, e.g. 2 or 1.5+0.5i")
    p.add_argument("--a", help="step, rational such as 1 or 1/2")
    p.add_argument("--tol", type=float)
    p.add_argument("--seed", type=int)
    p.add_argument("--out", help="output path (default stdout)")


def build_parser():
    parser = _Parser(prog="shiftchaos", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", parser_class=_Parser)
    sub.required = True

    v = sub.add_parser("verify", help="run verification suites, one JSON report per line")
    _common(v)
    v.add_argument("--suite", choices=("all",) + verify.SUITES)

    w = sub.add_parser("witness", help="build and serialize a witness object")
    _common(w)
    w.add_argument("witness_kind", choices=("periodic", "eigen", "transitivity"))
    w.add_argument("--N", type=int, help="period (periodic)")
    w.add_argument("--lambda", dest="lambda_", help="eigenvalue (eigen)")
    w.add_argument("--eps", type=float, help="target distance (transitivity)")
    w.add_argument("--x", help="JSON file with a function document (kernel profile / start point)")
    w.add_argument("--y", help="JSON file with the target function (transitivity)")

    s = sub.add_parser("spectrum-map", help="classify a grid of lambdas and write CSV")
    _common(s)
    s.add_argument("--re-range", nargs=2, type=float, metavar=("LO", "HI"))
    s.add_argument("--im-range", nargs=2, type=float, metavar=("LO", "HI"))
    g = s.add_mutually_exclusive_group()
    g.add_argument("--resolution", type=int, help="points per axis (>= 2)")
    g.add_argument("--step", type=float, help="grid spacing; overrides the default resolution")
    return parser


def _settings(args):
    cfg = {}
    if args.config:
        try:
            with open(args.config, encoding="utf-8") as fh:
                cfg = json.load(fh)
        except (OSError, ValueError) as exc:
            raise UsageError(f"cannot read config {args.config}: {exc}") from exc
        if not isinstance(cfg, dict):
            raise UsageError("config must be a JSON object")
    flags = {k: v for k, v in vars(args).items() if v is not None}
    if "lambda_" in flags:
        flags["lambda"] = flags.pop("lambda_")
    merged = dict(DEFAULTS)
    merged.update({k.replace("-", "_"): v for k, v in cfg.items()})
    merged.update(flags)
    return merged


def _spec(st):
    try:
        space = Space.parse(st["space"])
        return ShiftSpec(space, st["kind"], parse_complex(st["w"]), str(st["a"]))
    except (ValueError, TypeError) as exc:
        raise UsageError(str(exc)) from exc


def _emit(text, out):
    if out:
        with open(out, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _load_fn(path, space):
    with open(path, encoding="utf-8") as fh:
        return PiecewiseFn.from_dict(json.load(fh)).with_space(space)


def cmd_verify(st):
    spec = _spec(st)
    reports = verify.run(spec, st["suite"], int(st["seed"]), float(st["tol"]))
    _emit("".join(r.to_json() + "\n" for r in reports), st["out"])
    return 0 if all(r.passed for r in reports) else 1


def cmd_witness(st):
    spec = _spec(st)
    kind = st["witness_kind"]
    tol = float(st["tol"])
    N = int(st["N"])
    if N < 1:
        raise UsageError("--N must be >= 1")
    x = _load_fn(st["x"], spec.space) if st["x"] else None
    if kind == "periodic":
        x = x or constructions.default_kernel_profile(spec, N)
        obj = constructions.periodic_point(spec, x, N, tol)
        ok = obj.relative_residual <= 2 * tol
    elif kind == "eigen":
        lam = parse_complex(st["lambda"])
        obj = constructions.eigenvector(spec, lam, x, tol)
        ok = obj.passes
    else:
        eps = float(st["eps"])
        if eps <= 0:
            raise UsageError("--eps must be positive")
        y = _load_fn(st["y"], spec.space) if st["y"] else None
        base = constructions.default_kernel_profile(spec, 1)
        x = x or base
        y = y or base
        obj = constructions.transitivity_witness(spec, x, y, eps)
        ok = obj.distance.value < eps
    doc = obj.to_dict()
    doc["pass"] = bool(ok)
    _emit(json.dumps(doc, sort_keys=True, indent=2) + "\n", st["out"])
    return 0 if ok else 1


def cmd_spectrum_map(st):
    spec = _spec(st)
    re_lo, re_hi = map(float, st["re_range"])
    im_lo, im_hi = map(float, st["im_range"])
    if st["resolution"] is not None:
        n_re = n_im = int(st["resolution"])
    elif st["step"] is not None:
        step = float(st["step"])
        if step <= 0:
            raise UsageError("--step must be positive")
        n_re = int(round((re_hi - re_lo) / step)) + 1
        n_im = int(round((im_hi - im_lo) / step)) + 1
    else:
        n_re = n_im = 101
    if n_re < 2 or n_im < 2:
        raise UsageError("resolution must be >= 2 per axis")
    grid = spectrum_grid(spec, (re_lo, re_hi), (im_lo, im_hi), (n_re, n_im))
    _emit(grid.to_csv(), st["out"])
    return 0


COMMANDS = {"verify": cmd_verify, "witness": cmd_witness, "spectrum-map": cmd_spectrum_map}


def main(argv=None):
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        st = _settings(args)
        return COMMANDS[args.command](st)
    except UsageError as exc:
        print(str(exc), file=sys.stderr)
        print(parser.format_usage().strip(), file=sys.stderr)
        return 2
    except InvalidSpec as exc:
        print(f"shiftchaos: invalid spec: {exc}", file=sys.stderr)
        return 2
    except (constructions.NotInKernel, constructions.LambdaOutOfDisk, constructions.ProfileMismatch,
            constructions.PeriodTooSmall) as exc:
        print(f"shiftchaos: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
