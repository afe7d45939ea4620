"""
Alternating least squares for the sample Kronecker envelope.

Each restart draws a0 and f0 with standard normal entries, then sweeps
b -> a -> f (each step uses the most recent values) until the relative
decrease of the objective falls below rel_tol. The restart with the
smallest final objective wins; ties go to the lowest restart index.
"""

import logging
from typing import List, Optional, Tuple, Union

import numpy as np
from joblib import Parallel, delayed

from foldkit.config import settings
from foldkit.core.exceptions import DimensionError, FoldkitError
from foldkit.core.utils import spawn_generators
from foldkit.envelope.schemas import FoldingConfig, FoldingFit
from foldkit.envelope.updates import objective, update_a, update_b, update_f
from foldkit.moments.robust import robust_weights
from foldkit.moments.schemas import MomentTargets, SampleSet
from foldkit.moments.targets import Method, build_targets

logger = logging.getLogger(__name__)


def _orthonormalize(a: np.ndarray, b: np.ndarray, f: np.ndarray) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
    """
    QR both bases and push the triangular factors into f.

    b kron a = (Qb kron Qa)(Rb kron Ra), so (b kron a) f is unchanged when
    f becomes (Rb kron Ra) f.
    """
    qa, ra = np.linalg.qr(a)
    qb, rb = np.linalg.qr(b)
    # positive diagonal in R for a unique representation
    sa = np.where(np.diag(ra) < 0, -1.0, 1.0)
    sb = np.where(np.diag(rb) < 0, -1.0, 1.0)
    qa, ra = qa * sa, ra * sa[:, None]
    qb, rb = qb * sb, rb * sb[:, None]
    return qa, qb, np.kron(rb, ra) @ f


def _run_restart(
    targets: MomentTargets, config: FoldingConfig, rng: np.random.Generator, restart: int
) -> Tuple[np.ndarray, np.ndarray, np.ndarray, List[float], bool]:
    mode = config.inversion
    a = rng.standard_normal((targets.pl, config.ml))
    f = rng.standard_normal((targets.count, config.ml * config.mr, targets.k))
    b = None
    trace: List[float] = []
    converged = False

    for iteration in range(1, config.max_iters + 1):
        try:
            b = update_b(targets, a, f, mode)
            a = update_a(targets, b, f, mode)
            f = update_f(targets, a, b, mode)
        except FoldkitError as e:
            raise e.with_context(restart=restart, iteration=iteration)

        value = objective(targets, a, b, f)
        if not np.isfinite(value):
            raise FoldkitError("objective is not finite", restart=restart, iteration=iteration)
        trace.append(value)

        if value <= config.abs_tol:
            converged = True
            break
        if len(trace) > 1:
            previous = trace[-2]
            if (previous - value) / max(previous, 1e-300) < config.rel_tol:
                converged = True
                break

    return a, b, f, trace, converged


def fold(targets: MomentTargets, config: FoldingConfig) -> FoldingFit:
    """
    Fit span(b kron a) to moment targets by alternating least squares.

    Args:
        targets: Premultiplied inverse-regression targets
        config: Envelope dimensions and iteration policy

    Returns:
        FoldingFit of the best restart

    Raises:
        DimensionError: mL > pL or mR > pR
        SingularityError: Annotated with the failing restart and iteration

    Example:
        fit = fold(dr_targets(samples, slices), FoldingConfig(ml=2, mr=2))
    """
    if config.ml > targets.pl or config.mr > targets.pr:
        raise DimensionError(
            f"envelope dimensions ({config.ml}, {config.mr}) exceed predictor dimensions ({targets.pl}, {targets.pr})"
        )

    logger.info(
        f"🧠 Folding {targets.method} targets: ({targets.pl}x{targets.pr}) -> ({config.ml}x{config.mr}), "
        f"{config.restarts} restarts"
    )
    generators = spawn_generators(config.seed, config.restarts)
    results = Parallel(n_jobs=settings.n_jobs)(
        delayed(_run_restart)(targets, config, generators[r], r) for r in range(config.restarts)
    )

    finals = [trace[-1] for _, _, _, trace, _ in results]
    best = int(np.argmin(finals))  # first minimum wins ties
    a, b, f, trace, converged = results[best]
    for side, factor, m in (("left", a, config.ml), ("right", b, config.mr)):
        singular_values = np.linalg.svd(factor, compute_uv=False)
        rank = int(np.sum(singular_values > settings.rank_tol * singular_values[0]))
        if rank < m:
            logger.warning(
                f"⚠️ Fitted {side} basis has rank {rank} < {m}; the targets do not identify "
                f"a {m}-dimensional {side} factor"
            )
    if config.normalize_bases:
        a, b, f = _orthonormalize(a, b, f)

    if not converged:
        logger.warning(f"⚠️ Best restart {best} stopped at max_iters={config.max_iters} without converging")
    logger.info(f"✅ Folding done: objective {finals[best]:.6g} after {len(trace)} sweeps (restart {best})")

    return FoldingFit(
        a=a,
        b=b,
        f=f,
        objective=finals[best],
        objective_trace=trace,
        converged=converged,
        iterations=len(trace),
        restart_index=best,
        restart_objectives=finals,
        method=targets.method,
    )


def fit_folded(
    samples: SampleSet,
    method: Method,
    s: Optional[int],
    config: FoldingConfig,
    robust_cutoff: Optional[float] = None,
) -> FoldingFit:
    """
    Folded SIR, SAVE or DR end to end: slice, build targets, fold.

    Args:
        samples: The sample
        method: "sir", "save" or "dr"
        s: Number of slices (ignored for categorical responses)
        config: Folding configuration; its inversion mode also governs Sigma
        robust_cutoff: If set, the Mahalanobis quantile for robust weights

    Returns:
        FoldingFit; deterministic given config.seed
    """
    weights = None
    if robust_cutoff is not None:
        weights = robust_weights(samples, robust_cutoff, config.inversion)
    targets = build_targets(samples, method, s, config.inversion, weights)
    return fold(targets, config)


def reduce_predictors(fit: FoldingFit, samples: Union[SampleSet, np.ndarray]) -> np.ndarray:
    """
    Reduced predictors a' X_i b, one vec-ordered row of length mL*mR per item.

    Accepts a SampleSet or a raw (n, pL, pR) stack, e.g. a single held-out item.
    """
    X = samples.X if isinstance(samples, SampleSet) else np.asarray(samples, dtype=float)
    if X.ndim == 2:
        X = X[None]
    if X.shape[1:] != (fit.a.shape[0], fit.b.shape[0]):
        raise DimensionError("fit bases do not match the sample dimensions")
    reduced = np.einsum("pl,ipq,qr->ilr", fit.a, X, fit.b)
    return np.swapaxes(reduced, 1, 2).reshape(X.shape[0], -1)
