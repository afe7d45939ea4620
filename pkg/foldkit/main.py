"""
Command-line entry point.

    foldkit fit DATASET [--config RUN.json] [flags]
    foldkit simulate --model example1 --n 100 --p 5 --seed 1 --out data.csv
    foldkit bench --table 1 --N 100 --seed 1 --out results/
    foldkit classify DATASET [--config RUN.json] [flags]

Exit codes: 0 success, 2 input error, 3 numerical singularity, 4 I/O.
"""

import argparse
import logging
import sys
from typing import List, Optional

from pydantic import ValidationError

from foldkit import __version__
from foldkit.cli.commands import cmd_bench, cmd_classify, cmd_fit, cmd_simulate, config_error
from foldkit.config import settings
from foldkit.core.exceptions import FoldkitError
from foldkit.envelope.schemas import FoldingConfig
from foldkit.linalg.schemas import InversionMode

logger = logging.getLogger(__name__)

RUN_FLAGS = (
    "method", "slices", "ml", "mr", "screen_l", "screen_r", "inversion",
    "epsilon", "restarts", "tol", "max_iters", "seed", "conventional_dim", "robust_cutoff",
)


def _int_list(text: str) -> List[int]:
    try:
        return [int(part) for part in text.split(",") if part.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got '{text}'")


def _add_run_flags(parser: argparse.ArgumentParser) -> None:
    """Flags that override keys of the JSON run configuration."""
    parser.add_argument("dataset", help="Dataset file ('# foldkit v1 ...' header)")
    parser.add_argument("--config", dest="config_path", help="JSON run configuration")
    parser.add_argument("--method", choices=["sir", "save", "dr", "csir", "csave", "cdr"])
    parser.add_argument("--slices", type=int)
    parser.add_argument("--ml", type=int)
    parser.add_argument("--mr", type=int)
    parser.add_argument("--screen-l", dest="screen_l", type=int)
    parser.add_argument("--screen-r", dest="screen_r", type=int)
    parser.add_argument("--inversion", choices=["exact", "pinv", "ridge"])
    parser.add_argument("--epsilon", type=float)
    parser.add_argument("--restarts", type=int)
    parser.add_argument("--tol", type=float)
    parser.add_argument("--max-iters", dest="max_iters", type=int)
    parser.add_argument("--seed", type=int)
    parser.add_argument("--conventional-dim", dest="conventional_dim", type=int)
    parser.add_argument("--robust-cutoff", dest="robust_cutoff", type=float)
    parser.add_argument("--out", help="Output file")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog=settings.app_name, description="Dimension folding for matrix-valued predictors")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    parser.add_argument("--verbose", "-v", action="store_true", help="Debug logging")
    sub = parser.add_subparsers(dest="command", required=True)

    fit = sub.add_parser("fit", help="Fit a folded or conventional reduction")
    _add_run_flags(fit)

    classify = sub.add_parser("classify", help="Leave-one-out QDA after reduction")
    _add_run_flags(classify)

    simulate = sub.add_parser("simulate", help="Draw a dataset from a mixture model")
    simulate.add_argument("--model", choices=["example1", "example2"], default="example1")
    simulate.add_argument("--n", type=int, required=True)
    simulate.add_argument("--p", type=int, required=True)
    simulate.add_argument("--seed", type=int, default=0)
    simulate.add_argument("--mu", type=float)
    simulate.add_argument("--out", required=True)

    bench = sub.add_parser("bench", help="Monte-Carlo comparison table")
    bench.add_argument("--table", type=int, choices=[1, 2], required=True)
    bench.add_argument("--N", type=int, default=100)
    bench.add_argument("--seed", type=int, default=0)
    bench.add_argument("--n-list", dest="n_list", type=_int_list)
    bench.add_argument("--p-list", dest="p_list", type=_int_list)
    bench.add_argument("--restarts", type=int)
    bench.add_argument("--tol", type=float)
    bench.add_argument("--max-iters", dest="max_iters", type=int)
    bench.add_argument("--inversion", choices=["exact", "pinv", "ridge"], default="pinv")
    bench.add_argument("--epsilon", type=float)
    bench.add_argument("--mu", type=float)
    bench.add_argument("--benchmark-reps", dest="benchmark_reps", type=int)
    bench.add_argument("--out", required=True, help="Output directory")
    return parser


def _bench_config(args: argparse.Namespace) -> FoldingConfig:
    mode = InversionMode(kind=args.inversion, epsilon=args.epsilon)
    values = {"ml": 2, "mr": 2, "inversion": mode, "seed": args.seed}
    for key, field in (("restarts", "restarts"), ("tol", "rel_tol"), ("max_iters", "max_iters")):
        if getattr(args, key) is not None:
            values[field] = getattr(args, key)
    return FoldingConfig(**values)


def run(args: argparse.Namespace) -> int:
    if args.command in ("fit", "classify"):
        overrides = {key: getattr(args, key) for key in RUN_FLAGS}
        command = cmd_fit if args.command == "fit" else cmd_classify
        command(args.dataset, args.config_path, overrides, args.out)
    elif args.command == "simulate":
        cmd_simulate(args.model, args.n, args.p, args.seed, args.out, mu=args.mu)
    elif args.command == "bench":
        cmd_bench(
            args.table, args.N, args.seed, args.out,
            n_list=args.n_list, p_list=args.p_list, config=_bench_config(args),
            mu=args.mu, benchmark_reps=args.benchmark_reps,
        )
    return 0


def main(argv: Optional[List[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(
        level=logging.DEBUG if args.verbose or settings.debug else settings.log_level,
        format="%(asctime)s %(levelname)s %(name)s: %(message)s",
        stream=sys.stderr,
    )

    try:
        return run(args)
    except ValidationError as e:
        error = config_error(e)
    except FoldkitError as e:
        error = e

    logger.error(f"❌ {error}")
    print(f"error: {error}", file=sys.stderr)
    return error.exit_code


if __name__ == "__main__":
    sys.exit(main())
