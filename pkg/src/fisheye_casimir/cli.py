"""Command-line entry point: ``fisheye-casimir {profile,stress,green,scalar,verify}``.

Exit codes: 0 success, 1 verification failure, 2 usage or domain error.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import sys
import time
from dataclasses import asdict, dataclass

import numpy as np

from . import em_green, scalar_green, stress, verify
from .errors import DomainError
from .geometry import MediumParams, refractive_index
from .numerics import QuadratureConfig

CSV_HEADER = ("r_over_a", "n", "sigma_eigenvalue", "force_density")


@dataclass(frozen=True)
class RadialProfileSample:
    r_over_a: float
    n: float
    sigma_eigenvalue: float
    force_density: float


def _g(x):
    return format(float(x) + 0.0, ".15g")  # + 0.0 maps -0 to 0


def profile_rows(a: float, n1: float, r_min: float, r_max: float, points: int) -> list[RadialProfileSample]:
    """Uniform radial grid of index, stress eigenvalue and force density (lengths in the unit of ``a``)."""
    params = MediumParams(a, n1)
    if points < 2:
        raise DomainError("need at least 2 points")
    if not 0.0 <= r_min < r_max < a:
        raise DomainError(f"need 0 <= rmin < rmax < a, got rmin={r_min}, rmax={r_max}, a={a}")
    r = np.linspace(r_min, r_max, points)
    n = refractive_index(r, params)
    s = stress.stress_eigenvalue(r, params)
    f = stress.force_density(r, params)
    return [RadialProfileSample(*row) for row in zip(r / a, n, s, f)]


def format_rows(rows, fmt: str = "csv") -> str:
    buf = io.StringIO()
    if fmt == "csv":
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(CSV_HEADER)
        for row in rows:
            w.writerow([_g(v) for v in asdict(row).values()])
    elif fmt == "json-lines":
        for row in rows:
            buf.write(json.dumps({k: float(_g(v)) for k, v in asdict(row).items()}) + "\n")
    else:
        raise DomainError(f"unknown format {fmt!r}")
    return buf.getvalue()


def _cmd_profile(args):
    rmax = 0.99 * args.a if args.rmax is None else args.rmax
    rows = profile_rows(args.a, args.n1, args.rmin, rmax, args.points)
    sys.stdout.write(format_rows(rows, args.format))
    return 0


def _cmd_stress(args):
    params = MediumParams(args.a, args.n1)
    sigma = stress.casimir_stress(args.r, params)
    print(f"r_over_a {_g(args.r / args.a)}")
    print(f"n {_g(refractive_index(args.r, params))}")
    print(f"sigma_eigenvalue {_g(sigma[0, 0])}")
    print(f"force_density {_g(stress.force_density(args.r, params))}")
    return 0


def _cmd_green(args):
    G = em_green.green_total(np.array(args.r), np.array(args.r0), args.kappa) if args.part == "total" else \
        {"free": em_green.green_free, "reflected": em_green.green_reflected}[args.part](
            np.array(args.r), np.array(args.r0), args.kappa)
    for row in G:
        print(" ".join(_g(v) for v in row))
    return 0


def _cmd_scalar(args):
    print(_g(scalar_green.scalar_D(args.r_prime, args.kappa)))
    return 0


def _cmd_verify(args):
    quad = QuadratureConfig(rel_tol=args.tol)
    ok = True
    start = time.perf_counter()
    for check in verify.checks(args.level, quad):
        report = check()
        ok &= report.passed
        print(report.line(), flush=True)
    print(f"{'ALL PASS' if ok else 'FAILURES'}  level={args.level}  runtime={time.perf_counter() - start:.1f}s")
    return 0 if ok else 1


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="fisheye-casimir",
        description="Casimir stress inside Maxwell's fish eye bounded by a perfect spherical mirror.")
    sub = parser.add_subparsers(dest="command", required=True)

    def medium(p):
        p.add_argument("--a", type=float, default=1.0, help="mirror radius (default 1)")
        p.add_argument("--n1", type=float, default=1.0, help="index constant (default 1)")

    p = sub.add_parser("profile", help="radial profile of n, stress and force density")
    medium(p)
    p.add_argument("--rmin", type=float, default=0.0)
    p.add_argument("--rmax", type=float, default=None, help="default 0.99*a")
    p.add_argument("--points", type=int, default=100)
    p.add_argument("--format", choices=("csv", "json-lines"), default="csv")
    p.set_defaults(func=_cmd_profile)

    p = sub.add_parser("stress", help="stress and force density at one radius")
    p.add_argument("r", type=float, help="radius, same unit as --a")
    medium(p)
    p.set_defaults(func=_cmd_stress)

    p = sub.add_parser("green", help="3x3 Green function (reduced units)")
    p.add_argument("--r", type=float, nargs=3, required=True, metavar=("X", "Y", "Z"))
    p.add_argument("--r0", type=float, nargs=3, required=True, metavar=("X0", "Y0", "Z0"))
    p.add_argument("--kappa", type=float, required=True)
    p.add_argument("--part", choices=("total", "free", "reflected"), default="total")
    p.set_defaults(func=_cmd_green)

    p = sub.add_parser("scalar", help="scalar Green function D(r', kappa)")
    p.add_argument("r_prime", type=float)
    p.add_argument("kappa", type=float)
    p.set_defaults(func=_cmd_scalar)

    p = sub.add_parser("verify", help="run the verification suite")
    p.add_argument("--level", choices=("fast", "full"), default="fast")
    p.add_argument("--tol", type=float, default=1e-12, help="quadrature relative tolerance")
    p.set_defaults(func=_cmd_verify)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except DomainError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
