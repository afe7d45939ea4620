"""
Command implementations behind the `foldkit` entry point.

Each command reads its inputs, calls the library and writes its outputs.
Errors propagate as FoldkitError subclasses; the entry point turns them
into exit codes.
"""

import logging
from pathlib import Path
from typing import Any, Dict, List, Optional, Sequence

import numpy as np
import pandas as pd
from pydantic import ValidationError

from foldkit.cli.io import read_dataset, read_json, write_dataset, write_frame, write_json
from foldkit.cli.schemas import RunConfigFile
from foldkit.core.exceptions import ConfigError, InputError
from foldkit.core.utils import atomic_write_text
from foldkit.envelope.schemas import FoldingConfig
from foldkit.envelope.solver import fit_folded, reduce_predictors
from foldkit.pipeline.loocv import loocv_classify
from foldkit.pipeline.schemas import LoocvResult
from foldkit.pipeline.screening import prescreen
from foldkit.simbench.conventional import conventional_fit
from foldkit.simbench.generators import gen_mixture
from foldkit.simbench.harness import monte_carlo
from foldkit.simbench.schemas import BenchReport, MixtureModelSpec

logger = logging.getLogger(__name__)


def config_error(error: ValidationError) -> ConfigError:
    """First pydantic validation failure as a ConfigError naming the key."""
    first = error.errors()[0]
    key = ".".join(str(part) for part in first["loc"]) or None
    if first["type"] == "missing":
        message = f"missing config key '{key}'"
    elif first["type"] == "extra_forbidden":
        message = f"unknown config key '{key}'"
    else:
        message = f"invalid value for '{key}': {first['msg']}" if key else first["msg"]
    return ConfigError(message, key=key)


def load_run_config(path: Optional[str], overrides: Optional[Dict[str, Any]] = None) -> RunConfigFile:
    """
    Read a JSON run configuration and apply command-line overrides.

    Overrides whose value is None are ignored.

    Raises:
        ConfigError: Unknown or missing keys, or a constraint violation
    """
    payload: Dict[str, Any] = {}
    if path is not None:
        payload = read_json(path)
        if not isinstance(payload, dict):
            raise ConfigError("run configuration must be a JSON object")
    for key, value in (overrides or {}).items():
        if value is not None:
            payload[key] = value
    try:
        return RunConfigFile.model_validate(payload)
    except ValidationError as e:
        raise config_error(e) from e


def _reduced_columns(ml: int, mr: int) -> List[str]:
    # vec order: row index varies fastest
    return [f"z_{r + 1}_{c + 1}" for c in range(mr) for r in range(ml)]


def cmd_fit(
    dataset: str,
    config_path: Optional[str],
    overrides: Optional[Dict[str, Any]] = None,
    out: Optional[str] = None,
) -> Dict[str, Any]:
    """
    Fit a folded (or conventional) reduction and report it as JSON.

    With --out the JSON goes to that file and the reduced predictors to
    `<out>.reduced.csv`; otherwise the JSON is printed.

    Returns:
        The report dictionary
    """
    samples = read_dataset(dataset)
    cfg = load_run_config(config_path, overrides)

    report: Dict[str, Any] = {
        "method": cfg.method,
        "n": samples.n,
        "pl": samples.pl,
        "pr": samples.pr,
        "inversion": cfg.inversion_mode().describe(),
        "seed": cfg.seed,
        "screen": None,
    }

    working = samples
    if cfg.screen_l is not None or cfg.screen_r is not None:
        bases, working = prescreen(samples, cfg.screen_l or samples.pl, cfg.screen_r or samples.pr)
        report["screen"] = {"left": bases.left.tolist(), "right": bases.right.tolist()}

    if cfg.conventional:
        d = cfg.conventional_dim or cfg.ml * cfg.mr
        basis = conventional_fit(working, cfg.method[1:], cfg.slices, d, cfg.inversion_mode())
        reduced = working.vectors() @ basis.matrix
        columns = [f"z_{k + 1}" for k in range(reduced.shape[1])]
        report["directions"] = basis.matrix.tolist()
    else:
        fit = fit_folded(working, cfg.method, cfg.slices, cfg.folding_config(), cfg.robust_cutoff)
        reduced = reduce_predictors(fit, working)
        columns = _reduced_columns(cfg.ml, cfg.mr)
        report.update(
            {
                "ml": cfg.ml,
                "mr": cfg.mr,
                "a": fit.a.tolist(),
                "b": fit.b.tolist(),
                "f": fit.f.tolist(),
                "objective": fit.objective,
                "objective_trace": fit.objective_trace,
                "converged": fit.converged,
                "iterations": fit.iterations,
                "restart_index": fit.restart_index,
                "restart_objectives": fit.restart_objectives,
            }
        )

    report["reduced_columns"] = columns
    report["reduced"] = reduced.tolist()
    write_json(report, out)

    if out is not None:
        frame = pd.DataFrame(reduced, columns=columns)
        frame.insert(0, "y", samples.y)
        frame.insert(0, "id", samples.ids)
        write_frame(frame, f"{out}.reduced.csv")
        logger.info(f"✅ Fit written to {out} and {out}.reduced.csv")
    return report


def cmd_simulate(
    model: str,
    n: int,
    p: int,
    seed: int,
    out: str,
    mu: Optional[float] = None,
) -> Path:
    """
    Draw a dataset from one mixture model and write it with its true bases.

    Writes `<out>` and `<out>.truth.json`. Same arguments, same bytes.
    """
    spec_kwargs: Dict[str, Any] = {"variant": model, "p": p}
    if mu is not None:
        spec_kwargs["mu"] = mu
    try:
        spec = MixtureModelSpec(**spec_kwargs)
    except ValidationError as e:
        raise config_error(e) from e
    if n < 2:
        raise InputError(f"n must be at least 2, got {n}")

    samples, left, right = gen_mixture(spec, n, np.random.default_rng(seed))
    path = write_dataset(samples, out)
    write_json(
        {
            "model": spec.model_dump(),
            "n": n,
            "seed": seed,
            "left": left.matrix.tolist(),
            "right": right.matrix.tolist(),
        },
        f"{out}.truth.json",
    )
    logger.info(f"✅ Simulated {model} (n={n}, p={p}, seed={seed}) to {out}")
    return path


def cmd_bench(
    table: int,
    N: int,
    seed: int,
    out_dir: str,
    n_list: Optional[Sequence[int]] = None,
    p_list: Optional[Sequence[int]] = None,
    config: Optional[FoldingConfig] = None,
    mu: Optional[float] = None,
    benchmark_reps: Optional[int] = None,
) -> BenchReport:
    """
    Run one Monte-Carlo table and write `table<k>.csv` and `table<k>.json`.

    Prints one "benchmark distance = ..." line per p.
    """
    report = monte_carlo(table, n_list, p_list, N, config, seed, mu=mu, benchmark_reps=benchmark_reps)
    out = Path(out_dir)
    atomic_write_text(out / f"table{table}.csv", report.to_csv())
    write_json(report.summary(), out / f"table{table}.json")

    for p in report.p_list:
        mean, se = report.benchmark[p]
        print(f"pL = pR = {p} (benchmark distance = {mean:.3f}, SE {se:.4f})")
    logger.info(f"✅ Table {table} written to {out}")
    return report


def cmd_classify(
    dataset: str,
    config_path: Optional[str],
    overrides: Optional[Dict[str, Any]] = None,
    out: Optional[str] = None,
) -> LoocvResult:
    """
    Leave-one-out classification; prints the summary line "k/n".

    With --out the per-item predictions are written there as CSV.
    """
    samples = read_dataset(dataset)
    if samples.response_kind != "categorical":
        raise InputError("classify needs a dataset with response=cat")
    cfg = load_run_config(config_path, overrides)

    result = loocv_classify(
        samples,
        cfg.method,
        cfg.slices,
        cfg.screen_l or samples.pl,
        cfg.screen_r or samples.pr,
        cfg.folding_config(),
        conventional_dim=cfg.conventional_dim,
        robust_cutoff=cfg.robust_cutoff,
    )

    if out is not None:
        frame = pd.DataFrame(
            {
                "id": result.ids,
                "truth": result.truth,
                "prediction": result.predictions,
                "correct": [int(p == t) for p, t in zip(result.predictions, result.truth)],
            }
        )
        write_frame(frame, out)
    print(result.summary())
    return result
