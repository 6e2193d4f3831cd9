"""Command-line interface.

Subcommands: det, inverse, approx (problem JSON in, JSON out) and bench
(randomized convergence study, CSV out plus report figures).

Exit codes: 0 success, 2 bad command line, 3 malformed problem JSON,
4 dimension or value errors in the problem data, 5 singular or degenerate
inputs, 1 anything else.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from pathlib import Path

import numpy as np

from . import bench, oracle, report
from .approx import approx_report
from .errors import (
    DegenerateMetric,
    DimensionMismatch,
    LowRankError,
    ProblemFormatError,
    SingularBase,
    SingularMatrix,
    SingularPerturbation,
    TruncatedDetSingular,
)
from .exact import (
    PerturbedIdentity,
    det_perturbed_identity,
    perturbed_inverse_exact,
)
from .metric import perturbed_dual_inverse
from .problems import Problem, load_problem
from .tensor import DyadicPerturbation

EXIT_USAGE = 2
EXIT_FORMAT = 3
EXIT_DATA = 4
EXIT_SINGULAR = 5

_SINGULAR_ERRORS = (
    SingularMatrix,
    SingularBase,
    SingularPerturbation,
    TruncatedDetSingular,
    DegenerateMetric,
)


def _read_problem(path: str) -> Problem:
    text = sys.stdin.read() if path == "-" else Path(path).read_text(encoding="utf-8")
    return load_problem(text)


def _matrix_rows(entries: np.ndarray) -> list[list[float]]:
    return [[float(x) for x in row] for row in entries]


def _parse_int_list(spec: str) -> list[int]:
    """Parse "2", "2,5,9" or "2..10" (ranges are inclusive, comma-combinable)."""
    values: list[int] = []
    for token in spec.split(","):
        token = token.strip()
        if not token:
            raise ValueError(f"empty entry in list {spec!r}")
        if ".." in token:
            lo_text, hi_text = token.split("..", 1)
            lo, hi = int(lo_text), int(hi_text)
            if hi < lo:
                raise ValueError(f"descending range {token!r}")
            values.extend(range(lo, hi + 1))
        else:
            values.append(int(token))
    return values


def _lift_problem(problem: Problem) -> tuple[float, float, DyadicPerturbation]:
    """Determinants of the update factor and of the perturbed operator."""
    if problem.dyads.dim != problem.base.dim:
        raise DimensionMismatch(
            f'"B" has dimension {problem.base.dim} but the dyads have '
            f"dimension {problem.dyads.dim}"
        )
    f = oracle.lu_factor(problem.base)
    u_mat = oracle.lu_solve(f, problem.dyads.vector_matrix())
    lifted = DyadicPerturbation.from_arrays(u_mat.T, problem.dyads.covector_matrix().T)
    det_factor = det_perturbed_identity(PerturbedIdentity(lifted))
    return det_factor, det_factor * oracle.lu_det(f), lifted


def _cmd_det(args) -> int:
    problem = _read_problem(args.problem)
    if problem.dyads is None:
        raise DimensionMismatch(
            'det needs a "dyads" problem; a dual ("g"/"w") problem has no '
            "determinant factor on the primal side"
        )
    det_factor, det_perturbed, _ = _lift_problem(problem)
    json.dump({"det_factor": det_factor, "det_perturbed": det_perturbed}, sys.stdout, indent=2)
    sys.stdout.write("\n")
    return 0


def _cmd_inverse(args) -> int:
    problem = _read_problem(args.problem)
    if problem.dual is not None:
        result = perturbed_dual_inverse(
            problem.metric, problem.base, problem.dual, m=len(problem.dual)
        )
        payload = {"inverse": _matrix_rows(result)}
    else:
        inverse = perturbed_inverse_exact(problem.base, problem.dyads)
        det_factor, det_perturbed, _ = _lift_problem(problem)
        payload = {
            "det_factor": det_factor,
            "det_perturbed": det_perturbed,
            "inverse": _matrix_rows(inverse.entries),
        }
    json.dump(payload, sys.stdout, indent=2)
    sys.stdout.write("\n")
    return 0


def _cmd_approx(args) -> int:
    problem = _read_problem(args.problem)
    if args.order < 0:
        raise ValueError("--order must be >= 0")
    if problem.dual is not None:
        result = perturbed_dual_inverse(problem.metric, problem.base, problem.dual, args.order)
        w_matrix = sum(
            np.outer(q.coords, p.coords) for q, p in problem.dual
        )
        exact = oracle.lu_inverse(oracle.lu_factor(problem.base.entries + w_matrix)).entries
        error = float(np.linalg.norm(result - exact) / np.linalg.norm(exact))
        payload = {"order": args.order, "inverse": _matrix_rows(result), "error": error}
    else:
        rep = approx_report(problem.base, problem.dyads, args.order)
        payload = {
            "order": rep.order,
            "det_m": rep.det_m,
            "approx_inverse": _matrix_rows(rep.approx_inverse.entries),
            "taylor_inverse": _matrix_rows(rep.taylor_inverse.entries),
            "approx_error": rep.approx_error,
            "taylor_error": rep.taylor_error,
        }
    json.dump(payload, sys.stdout, indent=2)
    sys.stdout.write("\n")
    return 0


def _cmd_bench(args) -> int:
    seed = args.seed
    if seed is None:
        seed = int(os.environ.get("LOWRANK_SEED", "0"))
    cfg = bench.ExperimentConfig(
        dims=_parse_int_list(args.dims),
        ranks=_parse_int_list(args.ranks),
        orders=_parse_int_list(args.orders) if args.orders else None,
        trials=args.trials,
        seed=seed,
        distribution=args.dist,
        metric=args.metric,
        output=Path(args.output) if args.output else None,
        fmt=args.format,
    )
    records = list(bench.run_experiment(cfg))
    rows = bench.summarize(records)

    if cfg.output is None:
        sys.stdout.write(",".join(bench.RECORD_COLUMNS) + "\n")
        for r in records:
            sys.stdout.write(
                f"{r.dim},{r.rank},{r.trial},{r.order},"
                f"{format(r.approx_error, '.17g')},{format(r.taylor_error, '.17g')},"
                f"{format(r.det_a, '.17g')},{'true' if r.regenerated else 'false'}\n"
            )
    else:
        count = bench.write_records_csv(records, cfg.output)
        print(f"wrote {count} records to {cfg.output}")
        if not args.no_plots:
            plot_dir = Path(args.plot_dir) if args.plot_dir else cfg.output.parent
            paths = report.render_figures(rows, plot_dir, cfg.output.stem)
            for p in paths:
                print(f"wrote figure {p}")

    if args.summary:
        bench.write_summary_csv(rows, args.summary)
        print(f"wrote {len(rows)} summary rows to {args.summary}")

    win_cells = [r for r in rows if r.order < r.rank]
    if win_cells and cfg.output is not None:
        healthy = sum(1 for r in win_cells if r.win_rate >= 0.5)
        print(
            f"win rate >= 0.5 in {healthy}/{len(win_cells)} cells with m < k"
        )
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="lowrank",
        description=(
            "Determinants and inverses of operators perturbed by sums of "
            "dyadic products, with truncated-order approximations."
        ),
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_det = sub.add_parser("det", help="determinants of the update factor and the perturbed operator")
    p_det.add_argument("problem", help='problem JSON path, or "-" for stdin')
    p_det.set_defaults(func=_cmd_det)

    p_inv = sub.add_parser("inverse", help="exact inverse of the perturbed operator")
    p_inv.add_argument("problem", help='problem JSON path, or "-" for stdin')
    p_inv.set_defaults(func=_cmd_inverse)

    p_approx = sub.add_parser("approx", help="order-m approximate inverse and its error")
    p_approx.add_argument("problem", help='problem JSON path, or "-" for stdin')
    p_approx.add_argument("--order", type=int, required=True, help="truncation order m")
    p_approx.set_defaults(func=_cmd_approx)

    p_bench = sub.add_parser("bench", help="randomized convergence study (CSV + figures)")
    p_bench.add_argument("--dims", default="2..10", help='dimensions, e.g. "2..10" or "3,5"')
    p_bench.add_argument("--ranks", default="2..15", help='perturbation ranks, e.g. "2..15"')
    p_bench.add_argument("--orders", default=None, help="truncation orders (default 0..max rank)")
    p_bench.add_argument("--trials", type=int, default=100, help="trials per (dim, rank) cell")
    p_bench.add_argument(
        "--seed", type=int, default=None, help="RNG seed (fallback: env LOWRANK_SEED, then 0)"
    )
    p_bench.add_argument("--dist", choices=["normal", "uniform"], default="normal")
    p_bench.add_argument("--metric", choices=["none", "euclidean"], default="none")
    p_bench.add_argument("--output", default=None, help="records CSV path (default: stdout)")
    p_bench.add_argument("--format", choices=["csv"], default="csv")
    p_bench.add_argument("--summary", default=None, help="also write the per-cell summary CSV here")
    p_bench.add_argument("--plot-dir", default=None, help="figure directory (default: next to --output)")
    p_bench.add_argument("--no-plots", action="store_true", help="skip figure rendering")
    p_bench.set_defaults(func=_cmd_bench)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except ProblemFormatError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_FORMAT
    except _SINGULAR_ERRORS as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_SINGULAR
    except (DimensionMismatch, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DATA
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except LowRankError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    raise SystemExit(main())
