"""Command-line interface: kernel evaluation, tables, verification, lattice runs.

Exit codes: 0 success, 1 verification failure, 2 usage error, 3 numerical
nonconvergence.  All outputs are deterministic given the full configuration
(including seed and thread count).
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from concurrent.futures import ThreadPoolExecutor

from .geometry import HoricyclicPoint, geodesic_distance
from .kernels import EvalParams, kernel
from .lattice import LatticeSpec, convergence_order, lattice_kernel
from .quadrature import NonConvergenceError, QuadratureSpec
from . import verify as verify_mod

CSV_HEADER = "D,tau,s,value,err_est"

_SUITES = ("abel", "pde-radial", "pde-horicyclic", "ck", "mass", "gfunc", "all")


def _parse_grid(text: str) -> list[float]:
    """start:stop:count with count >= 1 and stop >= start."""
    bits = text.split(":")
    if len(bits) != 3:
        raise ValueError(f"grid must be start:stop:count, got {text!r}")
    start, stop = float(bits[0]), float(bits[1])
    count = int(bits[2])
    if count < 1 or stop < start:
        raise ValueError("grid needs count >= 1 and stop >= start")
    if count == 1:
        return [start]
    step = (stop - start) / (count - 1)
    return [start + i * step for i in range(count)]


def _parse_floats(text: str) -> list[float]:
    return [float(v) for v in text.split(",") if v != ""]


def _parse_ints(text: str) -> list[int]:
    return [int(v) for v in text.split(",") if v != ""]


def _threads(args) -> int:
    if args.threads is not None:
        return max(1, args.threads)
    env = os.environ.get("PSEUDOHEAT_THREADS")
    if env:
        return max(1, int(env))
    return os.cpu_count() or 1


def _defaults_block(args) -> dict:
    return {"m": args.m, "hbar": args.hbar, "rel_tol": args.rel_tol, "abs_tol": args.abs_tol}


def _quad_spec(args) -> QuadratureSpec:
    return QuadratureSpec(rel_tol=args.rel_tol, abs_tol=args.abs_tol)


def _emit_json(doc: dict) -> None:
    print(json.dumps(doc, indent=2, sort_keys=False))


def _resolve_s(args) -> float:
    if args.s is not None:
        return args.s
    if args.y1 is None or args.y2 is None:
        raise ValueError("give either --s or the point pair --y1/--x1/--y2/--x2")
    x1 = _parse_floats(args.x1) if args.x1 else [0.0]
    x2 = _parse_floats(args.x2) if args.x2 else [0.0] * len(x1)
    q1 = HoricyclicPoint(args.y1, x1)
    q2 = HoricyclicPoint(args.y2, x2)
    if q1.dim != args.dim or q2.dim != args.dim:
        raise ValueError(f"point pair has dimension {q1.dim}, expected {args.dim}")
    return geodesic_distance(q1, q2)


def cmd_eval(args) -> int:
    params = EvalParams(args.dim, args.tau, args.m, args.hbar)
    s = _resolve_s(args)
    kv = kernel(params, s, _quad_spec(args))
    if args.format == "csv":
        print(CSV_HEADER)
        print(f"{kv.D},{kv.tau!r},{kv.s!r},{kv.value!r},{kv.err_est!r}")
    else:
        _emit_json(
            {
                "defaults": _defaults_block(args),
                "command": "eval",
                "record": {
                    "D": kv.D,
                    "tau": kv.tau,
                    "s": kv.s,
                    "value": kv.value,
                    "err_est": kv.err_est,
                },
            }
        )
    return 0


def cmd_table(args) -> int:
    params_of = lambda tau: EvalParams(args.dim, tau, args.m, args.hbar)
    taus = _parse_grid(args.tau_grid)
    ss = _parse_grid(args.s_grid)
    spec = _quad_spec(args)
    cells = [(tau, s) for tau in taus for s in ss]  # tau-major row order

    def one(cell):
        tau, s = cell
        try:
            kv = kernel(params_of(tau), s, spec)
            return (args.dim, tau, s, kv.value, kv.err_est, None)
        except NonConvergenceError as exc:
            return (args.dim, tau, s, None, exc.err_est, str(exc))

    n_threads = _threads(args)
    if n_threads > 1:
        with ThreadPoolExecutor(max_workers=n_threads) as pool:
            rows = list(pool.map(one, cells))
    else:
        rows = [one(c) for c in cells]

    failed = any(r[5] is not None for r in rows)
    if args.format == "csv":
        print(CSV_HEADER)
        for d, tau, s, value, err, note in rows:
            vtxt = "" if value is None else repr(value)
            print(f"{d},{tau!r},{s!r},{vtxt},{err!r}")
    else:
        _emit_json(
            {
                "defaults": _defaults_block(args),
                "command": "table",
                "rows": [
                    {"D": d, "tau": tau, "s": s, "value": value, "err_est": err,
                     **({"error": note} if note else {})}
                    for d, tau, s, value, err, note in rows
                ],
            }
        )
    return 3 if failed else 0


def _verify_reports(suite: str, dims: list[int], tau: float):
    reports = []
    if suite in ("abel", "all"):
        for d in dims:
            reports.append(verify_mod.abel_residual(EvalParams(d, tau)))
    if suite in ("pde-radial", "all"):
        for d in dims:
            reports.append(verify_mod.radial_pde_residual(EvalParams(d, tau)))
    if suite in ("pde-horicyclic", "all"):
        for d in dims:
            if d in (3, 4):
                pairs = [
                    (HoricyclicPoint(1.0, (0.0,) * (d - 2)), HoricyclicPoint(2.0, (1.0,) * (d - 2))),
                    (HoricyclicPoint(0.8, (0.5,) * (d - 2)), HoricyclicPoint(1.4, (-0.3,) * (d - 2))),
                ]
                reports.append(verify_mod.horicyclic_pde_residual(EvalParams(d, tau), pairs))
    if suite in ("ck", "all"):
        for d in dims:
            if d in (3, 4, 5):
                half = EvalParams(d, tau / 2.0)
                reports.extend(verify_mod.chapman_kolmogorov_many(half, half, [0.0, 1.0, 2.0]))
    if suite in ("mass", "all"):
        for d in dims:
            if 3 <= d <= 6:
                reports.append(verify_mod.mass_multiplicativity(EvalParams(d, tau)))
    if suite in ("gfunc", "all"):
        reports.extend(verify_mod.gfunc_reports())
    return reports


def cmd_verify(args) -> int:
    if args.suite not in _SUITES:
        raise ValueError(f"unknown suite {args.suite!r}; choose from {', '.join(_SUITES)}")
    dims = _parse_ints(args.dims)
    if any(d < 3 for d in dims):
        raise ValueError("D must be >= 3")
    reports = _verify_reports(args.suite, dims, args.tau)
    _emit_json(
        {
            "defaults": _defaults_block(args),
            "command": "verify",
            "suite": args.suite,
            "reports": [r.to_json_dict() for r in reports],
        }
    )
    return 0 if all(r.passed for r in reports) else 1


def cmd_oracle(args) -> int:
    if args.dim not in (3, 4):
        raise ValueError("oracle runs support --dim 3 or 4 only")
    params = EvalParams(args.dim, args.tau, args.m, args.hbar)
    x1 = _parse_floats(args.x1) if args.x1 else [0.0] * (args.dim - 2)
    x2 = _parse_floats(args.x2) if args.x2 else [0.3] + [0.0] * (args.dim - 3)
    q1 = HoricyclicPoint(args.y1 if args.y1 is not None else 1.0, x1)
    q2 = HoricyclicPoint(args.y2 if args.y2 is not None else 1.2, x2)
    closed = kernel(params, geodesic_distance(q1, q2), _quad_spec(args)).value
    n_threads = _threads(args)
    rows = []
    for n in _parse_ints(args.n):
        spec = LatticeSpec(n, samples=args.samples, seed=args.seed)
        value, err = lattice_kernel(params, q1, q2, spec, threads=n_threads)
        rows.append((n, value, err, closed, value / closed - 1.0))
    fitted = convergence_order([(n, dev) for n, value, err, c, dev in rows if dev != 0.0])
    if args.format == "csv":
        print("N,lattice_value,err_est,closed_value,rel_dev")
        for n, value, err, c, dev in rows:
            print(f"{n},{value!r},{err!r},{c!r},{dev!r}")
        print(f"fitted_order,{fitted!r}")
    else:
        _emit_json(
            {
                "defaults": _defaults_block(args),
                "command": "oracle",
                "seed": args.seed,
                "rows": [
                    {"N": n, "lattice_value": value, "err_est": err,
                     "closed_value": c, "rel_dev": dev}
                    for n, value, err, c, dev in rows
                ],
                "fitted_order": fitted,
            }
        )
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="pseudoheat", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--m", type=float, default=0.5, help="mass (default 1/2)")
        p.add_argument("--hbar", type=float, default=1.0, help="Planck constant (default 1)")
        p.add_argument("--rel-tol", type=float, default=1e-9)
        p.add_argument("--abs-tol", type=float, default=1e-14)
        p.add_argument("--format", choices=("csv", "json"), default="json")
        p.add_argument("--threads", type=int, default=None,
                       help="worker threads (default: PSEUDOHEAT_THREADS or cpu count)")

    p = sub.add_parser("eval", help="evaluate the kernel at one point")
    common(p)
    p.add_argument("--dim", type=int, required=True)
    p.add_argument("--tau", type=float, required=True)
    p.add_argument("--s", type=float, default=None)
    p.add_argument("--y1", type=float, default=None)
    p.add_argument("--x1", type=str, default=None, help="comma-separated flat coordinates")
    p.add_argument("--y2", type=float, default=None)
    p.add_argument("--x2", type=str, default=None)
    p.set_defaults(func=cmd_eval)

    p = sub.add_parser("table", help="evaluate the kernel on a (tau, s) grid")
    common(p)
    p.add_argument("--dim", type=int, required=True)
    p.add_argument("--tau-grid", type=str, required=True, help="start:stop:count")
    p.add_argument("--s-grid", type=str, required=True, help="start:stop:count")
    p.set_defaults(func=cmd_table)

    p = sub.add_parser("verify", help="run a verification suite")
    common(p)
    p.add_argument("suite", type=str, help=f"one of {', '.join(_SUITES)}")
    p.add_argument("--dims", type=str, default="3,4")
    p.add_argument("--tau", type=float, default=1.0)
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("oracle", help="run the lattice path-integral oracle")
    common(p)
    p.add_argument("--dim", type=int, required=True)
    p.add_argument("--tau", type=float, default=0.25)
    p.add_argument("--n", type=str, default="2,4,8,16,32", help="comma-separated slice counts")
    p.add_argument("--samples", type=int, default=200_000)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--y1", type=float, default=None)
    p.add_argument("--x1", type=str, default=None)
    p.add_argument("--y2", type=float, default=None)
    p.add_argument("--x2", type=str, default=None)
    p.set_defaults(func=cmd_oracle)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if getattr(args, "dim", None) is not None and args.dim < 3:
        print("error: D must be >= 3", file=sys.stderr)
        return 2
    try:
        return args.func(args)
    except NonConvergenceError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
