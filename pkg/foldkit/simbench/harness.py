"""
Monte-Carlo comparison of folded and conventional estimators.

Table 1 runs folded SIR/SAVE/DR on the first mixture; table 2 adds the
conventional methods on the second mixture. Every replication draws one
dataset from a seed derived from (seed, table, n, p, replication) and fits
every method on it.
"""

import logging
import math
import time
from typing import Dict, List, Optional, Sequence

import numpy as np
from joblib import Parallel, delayed

from foldkit.config import settings
from foldkit.core.exceptions import DimensionError, FoldkitError, InputError
from foldkit.core.utils import derive_seed
from foldkit.envelope.schemas import FoldingConfig
from foldkit.envelope.solver import fit_folded
from foldkit.linalg.schemas import InversionMode
from foldkit.linalg.subspace import benchmark_distance, kron_projection_distance, subspace_distance
from foldkit.simbench.conventional import conventional_fit
from foldkit.simbench.generators import gen_mixture
from foldkit.simbench.schemas import BenchCell, BenchReport, MixtureModelSpec

logger = logging.getLogger(__name__)

TABLE_METHODS: Dict[int, List[str]] = {
    1: ["folded-sir", "folded-save", "folded-dr"],
    2: ["folded-sir", "sir", "folded-save", "save", "folded-dr", "dr"],
}
TABLE_VARIANTS = {1: "example1", 2: "example2"}
DEFAULT_N_LIST = [100, 200, 300, 500, 800]
DEFAULT_P_LIST = [5, 10]


def _replication(
    table: int, spec: MixtureModelSpec, n: int, rep: int, config: FoldingConfig, seed: int
) -> Dict[str, float]:
    """Distances of every method of the table on one dataset; NaN marks a failed fit."""
    rng = np.random.default_rng(derive_seed(seed, table, n, spec.p, rep))
    samples, left, right = gen_mixture(spec, n, rng)
    truth = np.kron(right.matrix, left.matrix)

    distances: Dict[str, float] = {}
    for method in TABLE_METHODS[table]:
        try:
            if method.startswith("folded-"):
                fold_config = config.model_copy(update={"seed": derive_seed(seed, table, n, spec.p, rep, method)})
                fit = fit_folded(samples, method.split("-", 1)[1], None, fold_config)
                distances[method] = kron_projection_distance(fit.a, fit.b, left, right)
            else:
                basis = conventional_fit(samples, method, None, spec.conventional_dim, config.inversion)
                distances[method] = subspace_distance(basis, truth)
        except FoldkitError as e:
            logger.debug(f"Replication {rep} of (n={n}, p={spec.p}) failed for {method}: {e}")
            distances[method] = float("nan")
    return distances


def _summarize(method: str, n: int, p: int, values: Sequence[float], replications: int) -> BenchCell:
    finite = [v for v in values if math.isfinite(v)]
    failures = replications - len(finite)
    if finite:
        mean = math.fsum(finite) / len(finite)
        se = float(np.std(finite, ddof=1) / math.sqrt(len(finite))) if len(finite) > 1 else 0.0
    else:
        mean, se = float("nan"), float("nan")

    flagged = failures > 0.01 * replications
    if flagged:
        logger.warning(f"⚠️ {method} at n={n}, p={p}: {failures}/{replications} replications failed")
    return BenchCell(
        method=method, n=n, p=p, mean=mean, se=se,
        replications=replications, failures=failures, flagged=flagged,
    )


def monte_carlo(
    table: int,
    n_list: Optional[Sequence[int]] = None,
    p_list: Optional[Sequence[int]] = None,
    N: int = 100,
    config: Optional[FoldingConfig] = None,
    seed: int = 0,
    mu: Optional[float] = None,
    benchmark_reps: Optional[int] = None,
) -> BenchReport:
    """
    Reproduce one simulation table at the requested scale.

    Args:
        table: 1 (folded methods, first mixture) or 2 (folded vs conventional, second mixture)
        n_list: Sample sizes (default 100, 200, 300, 500, 800)
        p_list: Values of pL = pR (default 5, 10)
        N: Replications per cell (>= 2)
        config: Folding configuration (default mL = mR = 2 with pinv inversion,
            so cells with pL*pR >= n still produce estimates)
        seed: Root seed; every replication derives its own
        mu: Class-1 mean shift (default settings.mixture_mu)
        benchmark_reps: Draws for the benchmark distance (default settings.benchmark_reps)

    Returns:
        BenchReport with mean distances, SEs and the benchmark per p

    Raises:
        InputError: Unknown table or N < 2
    """
    if table not in TABLE_METHODS:
        raise InputError(f"table must be 1 or 2, got {table}")
    if N < 2:
        raise InputError("N must be at least 2")
    n_list = list(n_list or DEFAULT_N_LIST)
    p_list = list(p_list or DEFAULT_P_LIST)
    config = config or FoldingConfig(ml=2, mr=2, inversion=InversionMode.pseudo())
    if config.ml != 2 or config.mr != 2:
        raise DimensionError("the simulation models have a 2 x 2 folding subspace; use mL = mR = 2")
    benchmark_reps = benchmark_reps or settings.benchmark_reps
    methods = TABLE_METHODS[table]

    started = time.perf_counter()
    logger.info(f"🧠 Table {table}: n={n_list}, p={p_list}, N={N}, seed={seed}")

    cells: List[BenchCell] = []
    benchmark = {}
    for p in p_list:
        spec_kwargs = {"variant": TABLE_VARIANTS[table], "p": p}
        if mu is not None:
            spec_kwargs["mu"] = mu
        spec = MixtureModelSpec(**spec_kwargs)

        bench_rng = np.random.default_rng(derive_seed(seed, "benchmark", p))
        benchmark[p] = benchmark_distance(p, p, 2, 2, benchmark_reps, bench_rng)

        for n in n_list:
            if config.inversion.kind == "exact" and p * p >= n:
                logger.warning(
                    f"⚠️ n={n} <= pL*pR={p * p}: the sample covariance is singular and exact inversion "
                    f"fails every replication; use pinv or ridge"
                )
            results = Parallel(n_jobs=settings.n_jobs)(
                delayed(_replication)(table, spec, n, rep, config, seed) for rep in range(N)
            )
            for method in methods:
                cell = _summarize(method, n, p, [r[method] for r in results], N)
                bench_mean, bench_se = benchmark[p]
                if cell.mean > bench_mean + 3 * bench_se:
                    logger.warning(f"⚠️ {method} at n={n}, p={p} averages {cell.mean:.3f}, above the benchmark band")
                cells.append(cell)
            logger.info(
                f"📊 n={n}, p={p}: " + ", ".join(f"{c.method}={c.mean:.3f}" for c in cells[-len(methods):])
            )

    runtime = time.perf_counter() - started
    logger.info(f"✅ Table {table} done in {runtime:.1f}s")
    return BenchReport(
        table=table, methods=methods, n_list=n_list, p_list=p_list, replications=N,
        seed=seed, cells=cells, benchmark=benchmark, runtime_seconds=runtime,
    )
