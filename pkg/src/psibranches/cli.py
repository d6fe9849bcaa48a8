"""Command-line front end: ``psibranches {eval,geometry,continue,verify}``.

Records go to stdout as CSV (default) or JSON; diagnostics go to stderr.
Exit codes: 0 ok, 1 malformed flags or degenerate path, 2 domain error or
unsupported category, 3 convergence/singularity/residual failure, 4 a
verification check failed.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
from typing import Iterable, Optional

from . import __version__
from .branches import BranchId, branch_domain, psi_branch
from .checks import SUITES, run_suite
from .continuation import PathSpec, continue_path, start_angle
from .core import (
    Parameter,
    branch_points,
    critical_points,
    eval_f,
    period,
    psi_prime,
    strips_per_period,
)
from .errors import ConvergenceError, DomainError, PsiError, RangeError, SingularityError
from .geometry import gamma_curves, g_curve, region_of, sample_xi_graph, xi_domain

EXIT_OK, EXIT_USAGE, EXIT_DOMAIN, EXIT_NUMERIC, EXIT_CHECK = 0, 1, 2, 3, 4


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


# ---------------------------------------------------------------------------
# Output


def _fmt(v) -> str:
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, (int,)):
        return str(v)
    if isinstance(v, float):
        return f"{v:.17g}"
    return str(v)


def _json_value(v) -> str:
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, int):
        return str(v)
    if isinstance(v, float):
        return f"{v:.17g}" if math.isfinite(v) else json.dumps(str(v))
    return json.dumps(str(v))


def write_records(records: list[dict], meta: dict, fmt: str, out=None) -> None:
    out = out or sys.stdout
    if fmt == "json":
        body = ",\n".join("  {" + ", ".join(f"{json.dumps(k)}: {_json_value(v)}" for k, v in r.items()) + "}" for r in records)
        head = ", ".join(f"{json.dumps(k)}: {json.dumps(str(v))}" for k, v in meta.items())
        out.write('{"meta": {' + head + '}, "records": [\n' + body + "\n]}\n")
        return
    for k, v in meta.items():
        out.write(f"# {k}={v}\n")
    cols: list[str] = []
    for r in records:
        cols.extend(k for k in r if k not in cols)
    out.write(",".join(cols) + "\n")
    for r in records:
        out.write(",".join(_fmt(r[c]) if c in r else "" for c in cols) + "\n")


# ---------------------------------------------------------------------------
# Argument parsing helpers


def _complex(text: str) -> complex:
    try:
        re_, im = text.split(",")
        z = complex(float(re_), float(im))
    except ValueError as exc:
        raise UsageError(f"expected re,im but got {text!r}") from exc
    if not (math.isfinite(z.real) and math.isfinite(z.imag)):
        raise UsageError(f"non-finite complex number {text!r}")
    return z


def _branch(text: str) -> BranchId:
    try:
        return BranchId.parse(text)
    except ValueError as exc:
        raise UsageError(str(exc)) from exc


def _param(text: str) -> Parameter:
    try:
        return Parameter.parse(text)
    except DomainError as exc:
        if "/" in text or not _is_number(text):
            raise UsageError(str(exc)) from exc
        raise


def _is_number(text: str) -> bool:
    try:
        float(text)
        return True
    except ValueError:
        return False


def parse_path(text: str, a: Parameter, start: BranchId, samples: Optional[int]) -> PathSpec:
    """``circle:cx,cy,r,turns[,start_angle]`` or ``poly:x1,y1;x2,y2;...``."""
    kind, _, body = text.partition(":")
    try:
        if kind == "circle":
            vals = [float(v) for v in body.split(",")]
            if len(vals) not in (4, 5):
                raise ValueError
            c = complex(vals[0], vals[1])
            r, turns = vals[2], vals[3]
            if not r > 0 or turns == 0:
                raise UsageError("circle needs a positive radius and nonzero turns")
            th = vals[4] if len(vals) == 5 else start_angle(a, c, r, start)
            return PathSpec.circle(c, r, turns, th, samples)
        if kind == "poly":
            pts = [_complex(p) for p in body.split(";")]
            if len(pts) < 2:
                raise UsageError("a polyline needs at least two points")
            if sum(abs(q - p) for p, q in zip(pts, pts[1:])) == 0.0:
                raise UsageError("degenerate path of zero length")
            return PathSpec.polyline(pts, samples)
    except ValueError as exc:
        if isinstance(exc, DomainError):
            raise
        raise UsageError(f"malformed path {text!r}") from exc
    raise UsageError(f"unknown path kind {kind!r}; use circle: or poly:")


# ---------------------------------------------------------------------------
# Commands


def cmd_eval(args) -> tuple[int, list[dict]]:
    a, z, b = _param(args.a), _complex(args.z), _branch(args.branch)
    w = psi_branch(a, z, b, extended=args.extended)
    resid = abs(eval_f(a, w) - z)
    d = psi_prime(a, z, w)
    rec = {
        "schema": "point",
        "a": str(a),
        "branch": str(b),
        "z_re": z.real,
        "z_im": z.imag,
        "w_re": w.real,
        "w_im": w.imag,
        "residual": resid,
        "dpsi_re": d.real,
        "dpsi_im": d.imag,
        "region": str(region_of(a, w)),
    }
    return EXIT_OK, [rec]


def _geometry_xi(a: Parameter, eta_max: float, n: int) -> list[dict]:
    out = []
    for iv in xi_domain(a, eta_max):
        for eta, v in sample_xi_graph(a, iv, n):
            out.append(
                {"schema": "curve", "a": str(a), "curve": f"xi:{iv.k}", "left": iv.left.value,
                 "right": iv.right.value, "eta": eta, "xi": v}
            )
    return out


def _geometry_gamma(a: Parameter, n: int) -> list[dict]:
    out = []
    curves = gamma_curves(a)
    ivs = {iv.k: iv for iv in xi_domain(a, strips_per_period(a) * math.pi / a.value * (1 + 1e-15))}
    for g in curves:
        for eta, v in sample_xi_graph(a, ivs[g.k], n):
            out.append(
                {"schema": "curve", "a": str(a), "curve": f"gamma:{g.k}", "shape": g.shape.value,
                 "includes_ray": g.includes_ray, "eta": eta, "xi": v}
            )
    return out


def _geometry_gcurve(a: Parameter, xi0: float, eta_max: float, n: int) -> list[dict]:
    out = []
    for i in range(n + 1):
        eta = eta_max * i / n
        z = g_curve(a, xi0, eta)
        out.append({"schema": "curve", "a": str(a), "curve": f"g:{xi0!r}", "xi": xi0, "eta": eta,
                    "x": z.real, "y": z.imag})
    return out


def _geometry_regions(a: Parameter, eta_max: float, n: int, box: float) -> list[dict]:
    out = []
    for i in range(n):
        for j in range(n):
            w = complex(-box + 2 * box * (i + 0.5) / n, eta_max * (j + 0.5) / n)
            out.append({"schema": "region", "a": str(a), "xi": w.real, "eta": w.imag,
                        "region": str(region_of(a, w))})
    return out


def _geometry_points(a: Parameter) -> list[dict]:
    out = []
    k_max = strips_per_period(a) - 1 if a.is_rational else 0
    for c in critical_points(a, 0, k_max):
        out.append({"schema": "point", "a": str(a), "kind": "critical", "k": c.k, "w_re": c.w.real,
                    "w_im": c.w.imag, "z_re": c.z.real, "z_im": c.z.imag})
    for bp in branch_points(a):
        out.append({"schema": "point", "a": str(a), "kind": "branch_point", "z_re": bp.real, "z_im": bp.imag})
    return out


def cmd_geometry(args) -> tuple[int, list[dict]]:
    a = _param(args.a)
    if args.eta_max is not None:
        eta_max = args.eta_max
    elif a.is_rational:
        eta_max = abs(period(a))
    else:
        eta_max = 2 * math.pi / a.value
    if not eta_max > 0:
        raise UsageError("--eta-max must be positive")
    n = args.resolution
    if args.what == "xi":
        return EXIT_OK, _geometry_xi(a, eta_max, n)
    if args.what == "gamma":
        return EXIT_OK, _geometry_gamma(a, n)
    if args.what == "gcurve":
        return EXIT_OK, _geometry_gcurve(a, args.xi0, eta_max, n)
    if args.what == "regions":
        return EXIT_OK, _geometry_regions(a, eta_max, n, args.box)
    return EXIT_OK, _geometry_points(a)


def cmd_continue(args) -> tuple[int, list[dict]]:
    a, start = _param(args.a), _branch(args.start_branch)
    branch_domain(a, start)
    path = parse_path(args.path, a, start, args.samples)
    z0 = path.z(0.0)
    w0 = psi_branch(a, z0, start, extended=True)
    res = continue_path(a, path, w0)
    out = []
    for i, (t, z, w) in enumerate(res.samples):
        if i % args.every == 0 or i == len(res.samples) - 1:
            out.append({"schema": "point", "a": str(a), "t": t, "z_re": z.real, "z_im": z.imag,
                        "w_re": w.real, "w_im": w.imag})
    for e in res.events:
        out.append({"schema": "event", "a": str(a), "t": e.t, "z_re": e.z.real, "z_im": e.z.imag,
                    "cut": e.cut or "", "from": str(e.from_sheet or e.from_region),
                    "to": str(e.to_sheet or e.to_region), "side": e.side or "",
                    "direction": "ccw" if e.ccw else "cw"})
    final = res.final_sheet or res.final_region
    out.append({"schema": "event", "a": str(a), "t": 1.0, "cut": "final", "from": str(start), "to": str(final),
                "max_residual": res.max_residual})
    return EXIT_OK, out


def cmd_verify(args) -> tuple[int, list[dict]]:
    params = [_param(t) for t in (args.a or ["1/2", "1/3", "1/4"])]
    checks = run_suite(args.suite, params, args.seed)
    recs = [{"schema": "check", "name": c.name, "passed": c.passed, "error": c.error, "tol": c.tol} for c in checks]
    return (EXIT_OK if all(c.passed for c in checks) else EXIT_CHECK), recs


# ---------------------------------------------------------------------------
# Entry point


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="psibranches", description="Branches of the inverse of sinh(a w) e^w")
    p.add_argument("--version", action="version", version=__version__)
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def common(sp):
        sp.add_argument("--format", choices=("csv", "json"), default="csv")

    e = sub.add_parser("eval", help="evaluate one branch at one point")
    e.add_argument("--a", required=True, help="p/q for exact rationals, a decimal otherwise")
    e.add_argument("--z", required=True, help="re,im")
    e.add_argument("--branch", default="principal:0", help="family:k")
    e.add_argument("--extended", action="store_true", help="allow the owned edge of the branch domain")
    common(e)

    g = sub.add_parser("geometry", help="emit curves and point sets of the w- and z-planes")
    g.add_argument("--a", required=True)
    g.add_argument("--what", choices=("xi", "gamma", "gcurve", "regions", "critical-points"), required=True)
    g.add_argument("--eta-max", type=float, default=None)
    g.add_argument("--resolution", type=int, default=64)
    g.add_argument("--xi0", type=float, default=0.0)
    g.add_argument("--box", type=float, default=4.0, help="half-width in xi for --what regions")
    common(g)

    c = sub.add_parser("continue", help="continue a branch along a path")
    c.add_argument("--a", required=True)
    c.add_argument("--path", required=True, help="circle:cx,cy,r,turns[,angle] or poly:x1,y1;x2,y2;...")
    c.add_argument("--start-branch", default="principal:0")
    c.add_argument("--samples", type=int, default=None)
    c.add_argument("--every", type=int, default=1, help="emit every n-th trajectory sample")
    common(c)

    v = sub.add_parser("verify", help="run a verification suite")
    v.add_argument("--a", action="append")
    v.add_argument("--suite", choices=(*SUITES, "all"), default="all")
    v.add_argument("--seed", type=int, default=0)
    common(v)
    return p


COMMANDS = {"eval": cmd_eval, "geometry": cmd_geometry, "continue": cmd_continue, "verify": cmd_verify}


def main(argv: Optional[Iterable[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(None if argv is None else list(argv))
    if getattr(args, "resolution", 1) < 1 or getattr(args, "every", 1) < 1:
        parser.error("--resolution and --every must be positive")
    if getattr(args, "samples", None) is not None and args.samples < 1:
        parser.error("--samples must be positive")
    try:
        code, records = COMMANDS[args.command](args)
    except UsageError as exc:
        print(f"psibranches: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (ConvergenceError, SingularityError) as exc:
        print(f"psibranches: numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except (DomainError, RangeError) as exc:
        print(f"psibranches: domain error: {exc}", file=sys.stderr)
        return EXIT_DOMAIN
    except PsiError as exc:
        print(f"psibranches: error: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    meta = {"tool": "psibranches", "version": __version__, "command": args.command}
    if isinstance(getattr(args, "a", None), str):
        meta["a"] = args.a
    elif getattr(args, "a", None):
        meta["a"] = " ".join(args.a)
    write_records(records, meta, args.format)
    return code


if __name__ == "__main__":
    sys.exit(main())
