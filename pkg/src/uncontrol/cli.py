"""Command-line surface: estimators, closed forms, bounds, and figure data.

Commands
    estimate   Monte Carlo estimate of P_eps (or P_{eps,b} with --b)
    exact2     n=2 closed forms: P_eps, or P_{eps,b} with --b-norm
    bound      per-b union bound, integral bound, or polynomial bound
    caps       spherical cap measure: exact, bounds, optional MC check
    sweep      CSV/JSON grid of estimates, bounds, and exact values
    growth     CSV/JSON table of the growth-rate bound for n = 2..n_max

Exit codes: 0 success, 2 argument error, 3 numerical failure. The default
seed is 0, overridden by the UNCONTROL_SEED environment variable, overridden
by --seed. CSV output uses 9 significant digits, LF line endings, and empty
strings for absent values; JSON output is a single object carrying
schema_version 1 and full-precision values.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys

from .mc import (
    estimate_cap_measure,
    estimate_p_eps,
    estimate_p_eps_b,
    sweep,
)
from .numerics import Tolerance, sphere_area
from .sampling import InputVector
from .theory import (
    CapSpec,
    cap_area_lower,
    cap_area_upper,
    cap_measure_exact,
    growth_rate_bound,
    p_eps_b_bound,
    p_eps_b_exact_n2,
    p_eps_bound_integral,
    p_eps_bound_poly,
    p_eps_exact_n2,
)

__all__ = ["main"]

SCHEMA_VERSION = 1

SWEEP_HEADER = "n,epsilon,estimate,std_err,ci_lo,ci_hi,bound_poly,bound_integral,bound_per_b,exact_n2,trials"


def _fmt(value) -> str:
    if value is None:
        return ""
    if isinstance(value, float):
        return f"{value:.9g}"
    return str(value)


def _emit_text(text: str, out_path: str | None) -> None:
    if out_path is None:
        sys.stdout.write(text)
        return
    try:
        with open(out_path, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    except OSError:
        try:
            os.unlink(out_path)
        except OSError:
            pass
        raise


def _emit_csv(header: str, rows: list[list], out_path: str | None = None) -> None:
    lines = [header] + [",".join(_fmt(v) for v in row) for row in rows]
    _emit_text("\n".join(lines) + "\n", out_path)


def _emit_json(obj, out_path: str | None = None) -> None:
    _emit_text(json.dumps(obj) + "\n", out_path)


def _resolve_seed(arg_seed: int | None) -> int:
    if arg_seed is not None:
        seed = arg_seed
    else:
        env = os.environ.get("UNCONTROL_SEED")
        if env is not None:
            try:
                seed = int(env)
            except ValueError:
                raise ValueError(f"UNCONTROL_SEED must be an integer, got {env!r}") from None
        else:
            seed = 0
    if not 0 <= seed < (1 << 64):
        raise ValueError(f"seed must be a 64-bit unsigned integer, got {seed}")
    return seed


def _parse_grid(text: str) -> list[float]:
    parts = text.split(":")
    if len(parts) != 3:
        raise ValueError(f"grid must be start:stop:step, got {text!r}")
    try:
        start, stop, step = (float(p) for p in parts)
    except ValueError:
        raise ValueError(f"grid values must be numbers, got {text!r}") from None
    if step < 0:
        raise ValueError(f"grid step must be >= 0, got {step}")
    if step == 0:
        if start == stop:
            return [start]
        raise ValueError("grid step 0 requires start == stop")
    if stop < start - 1e-9:
        raise ValueError(f"grid stop {stop} is below start {start}")
    # The stop value is included when (stop-start)/step is integral within 1e-9.
    count = math.floor((stop - start) / step + 1e-9)
    return [start + i * step for i in range(count + 1)]


def _parse_int_list(text: str, minimum: int, what: str) -> list[int]:
    try:
        values = [int(p) for p in text.split(",") if p != ""]
    except ValueError:
        raise ValueError(f"{what} must be comma-separated integers, got {text!r}") from None
    if not values:
        raise ValueError(f"{what} must be nonempty")
    for v in values:
        if v < minimum:
            raise ValueError(f"{what} entries must be >= {minimum}, got {v}")
    return values


def _parse_b(text: str) -> InputVector:
    try:
        comps = [float(p) for p in text.split(",") if p != ""]
    except ValueError:
        raise ValueError(f"--b must be comma-separated reals, got {text!r}") from None
    if not comps:
        raise ValueError("--b must be nonempty")
    return InputVector.from_values(comps)


def _tolerance(abs_tol: float) -> Tolerance:
    if abs_tol <= 0:
        raise ValueError(f"--tol must be > 0, got {abs_tol}")
    return Tolerance(abs_tol=abs_tol)


def _cmd_estimate(args) -> int:
    seed = _resolve_seed(args.seed)
    if args.b is not None:
        b = _parse_b(args.b)
        if b.n != args.n:
            raise ValueError(f"--b has {b.n} components, expected n = {args.n}")
        est = estimate_p_eps_b(args.n, args.epsilon, b, args.trials, seed, args.workers)
    else:
        est = estimate_p_eps(args.n, args.epsilon, args.trials, seed, args.workers)
    columns = [
        ("n", args.n),
        ("epsilon", args.epsilon),
        ("p_hat", est.p_hat),
        ("std_err", est.std_err),
        ("ci95_lo", est.ci95_lo),
        ("ci95_hi", est.ci95_hi),
        ("successes", est.successes),
        ("resampled", est.resampled),
        ("trials", est.trials),
    ]
    if args.format == "csv":
        _emit_csv(",".join(k for k, _ in columns), [[v for _, v in columns]])
    else:
        obj = {"schema_version": SCHEMA_VERSION}
        obj.update(columns)
        obj["seed"] = est.seed
        _emit_json(obj)
    return 0


def _cmd_exact2(args) -> int:
    tol = _tolerance(args.tol)
    if args.b_norm is not None:
        value = p_eps_b_exact_n2(args.epsilon, args.b_norm)
    else:
        value = p_eps_exact_n2(args.epsilon, tol)
    columns = [
        ("epsilon", args.epsilon),
        ("b_norm", args.b_norm),
        ("kind", value.kind),
        ("raw", value.raw),
        ("clamped", value.clamped),
    ]
    if args.format == "csv":
        _emit_csv(",".join(k for k, _ in columns), [[v for _, v in columns]])
    else:
        obj = {"schema_version": SCHEMA_VERSION}
        obj.update(columns)
        _emit_json(obj)
    return 0


def _cmd_bound(args) -> int:
    tol = _tolerance(args.tol)
    if args.method == "per-b":
        if args.b_norm is None:
            raise ValueError("--b-norm is required for --method per-b")
        value = p_eps_b_bound(args.epsilon, args.b_norm, args.n)
    elif args.method == "integral":
        value = p_eps_bound_integral(args.epsilon, args.n, tol)
    else:
        value = p_eps_bound_poly(args.epsilon, args.n)
    columns = [
        ("n", args.n),
        ("epsilon", args.epsilon),
        ("b_norm", args.b_norm),
        ("method", args.method),
        ("raw", value.raw),
        ("clamped", value.clamped),
    ]
    if args.format == "csv":
        _emit_csv(",".join(k for k, _ in columns), [[v for _, v in columns]])
    else:
        obj = {"schema_version": SCHEMA_VERSION}
        obj.update(columns)
        _emit_json(obj)
    return 0


def _cmd_caps(args) -> int:
    if not 0.0 <= args.height < 1.0:
        raise ValueError(f"--height must be in [0, 1), got {args.height}")
    spec = CapSpec(n=args.n, height=args.height)
    area = sphere_area(args.n)
    exact = cap_measure_exact(args.n, args.height)
    upper = cap_area_upper(spec) / area
    lower = cap_area_lower(spec) / area
    est = None
    seed = None
    if args.trials > 0:
        seed = _resolve_seed(args.seed)
        est = estimate_cap_measure(args.n, args.height, args.trials, seed)
    columns = [
        ("n", args.n),
        ("height", args.height),
        ("chord_radius", spec.chord_radius),
        ("exact", exact),
        ("upper", upper),
        ("lower", lower),
        ("estimate", None if est is None else est.p_hat),
        ("std_err", None if est is None else est.std_err),
        ("ci_lo", None if est is None else est.ci95_lo),
        ("ci_hi", None if est is None else est.ci95_hi),
        ("trials", None if est is None else est.trials),
    ]
    if args.format == "csv":
        _emit_csv(",".join(k for k, _ in columns), [[v for _, v in columns]])
    else:
        obj = {"schema_version": SCHEMA_VERSION}
        obj.update(columns)
        obj["seed"] = seed
        _emit_json(obj)
    return 0


def _sweep_row_cells(row) -> list:
    return [
        row.n,
        row.epsilon,
        row.estimate,
        row.std_err,
        row.ci_lo,
        row.ci_hi,
        row.bound_poly,
        row.bound_integral,
        row.bound_per_b,
        row.exact_n2,
        row.trials,
    ]


def _cmd_sweep(args) -> int:
    seed = _resolve_seed(args.seed)
    n_list = _parse_int_list(args.n_list, 2, "--n-list")
    eps_grid = _parse_grid(args.eps_grid)
    tol = _tolerance(args.tol)
    rows = sweep(n_list, eps_grid, args.trials, seed, args.workers, tol)
    if args.format == "csv":
        _emit_csv(SWEEP_HEADER, [_sweep_row_cells(r) for r in rows], args.out)
    else:
        keys = SWEEP_HEADER.split(",")
        obj = {
            "schema_version": SCHEMA_VERSION,
            "seed": seed,
            "rows": [
                dict(
                    zip(keys, _sweep_row_cells(r)),
                    raw_bound_poly=r.raw_bound_poly,
                    raw_bound_integral=r.raw_bound_integral,
                    raw_bound_per_b=r.raw_bound_per_b,
                    raw_exact_n2=r.raw_exact_n2,
                )
                for r in rows
            ],
        }
        _emit_json(obj, args.out)
    return 0


def _cmd_growth(args) -> int:
    if args.n_max < 2:
        raise ValueError(f"--n-max must be >= 2, got {args.n_max}")
    rows = [[n, growth_rate_bound(n)] for n in range(2, args.n_max + 1)]
    if args.format == "csv":
        _emit_csv("n,growth_bound", rows, args.out)
    else:
        obj = {
            "schema_version": SCHEMA_VERSION,
            "rows": [{"n": n, "growth_bound": g} for n, g in rows],
        }
        _emit_json(obj, args.out)
    return 0


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="uncontrol",
        description="Estimate and bound near-uncontrollability probabilities of random linear systems.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("estimate", help="Monte Carlo estimate of P_eps or P_{eps,b}")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--epsilon", type=float, required=True)
    p.add_argument("--trials", type=int, default=100_000)
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--b", type=str, default=None, help="fix b to these comma-separated components")
    p.add_argument("--workers", type=int, default=None)
    p.add_argument("--format", choices=("json", "csv"), default="json")
    p.set_defaults(func=_cmd_estimate)

    p = sub.add_parser("exact2", help="n=2 closed form for P_eps, or P_{eps,b} with --b-norm")
    p.add_argument("--epsilon", type=float, required=True)
    p.add_argument("--b-norm", dest="b_norm", type=float, default=None)
    p.add_argument("--tol", type=float, default=1e-10)
    p.add_argument("--format", choices=("json", "csv"), default="json")
    p.set_defaults(func=_cmd_exact2)

    p = sub.add_parser("bound", help="evaluate an upper bound on P_eps or P_{eps,b}")
    p.add_argument("--method", choices=("per-b", "integral", "poly"), required=True)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--epsilon", type=float, required=True)
    p.add_argument("--b-norm", dest="b_norm", type=float, default=None)
    p.add_argument("--tol", type=float, default=1e-10)
    p.add_argument("--format", choices=("json", "csv"), default="json")
    p.set_defaults(func=_cmd_bound)

    p = sub.add_parser("caps", help="spherical cap measure: exact value, bounds, optional MC check")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--height", type=float, required=True)
    p.add_argument("--trials", type=int, default=0)
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--format", choices=("json", "csv"), default="json")
    p.set_defaults(func=_cmd_caps)

    p = sub.add_parser("sweep", help="grid of estimates, bounds, and exact values")
    p.add_argument("--n-list", dest="n_list", type=str, required=True)
    p.add_argument("--eps-grid", dest="eps_grid", type=str, required=True)
    p.add_argument("--trials", type=int, default=100_000, help="0 disables estimation")
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--workers", type=int, default=None)
    p.add_argument("--tol", type=float, default=1e-10)
    p.add_argument("--out", type=str, default=None)
    p.add_argument("--format", choices=("csv", "json"), default="csv")
    p.set_defaults(func=_cmd_sweep)

    p = sub.add_parser("growth", help="growth-rate bound for n = 2..n_max")
    p.add_argument("--n-max", dest="n_max", type=int, required=True)
    p.add_argument("--out", type=str, default=None)
    p.add_argument("--format", choices=("csv", "json"), default="csv")
    p.set_defaults(func=_cmd_growth)

    return parser


def main(argv=None) -> int:
    try:
        args = _build_parser().parse_args(argv)
    except SystemExit as exc:
        code = exc.code
        if code in (0, None):
            return 0
        return 2
    try:
        return args.func(args)
    except (ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except Exception as exc:  # quadrature, eigensolver, resample-budget failures
        print(f"numerical failure: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
