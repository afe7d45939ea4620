"""
Leave-one-out classification after dimension folding.

For every item i the whole pipeline (pre-screening, folding or a
conventional reduction, QDA) is refit on the other n - 1 items, and item i
is pushed through the fold's own screen bases and reduction only.
"""

import logging
from typing import Literal, NamedTuple, Optional

import numpy as np
from joblib import Parallel, delayed

from foldkit.config import settings
from foldkit.core.exceptions import FoldkitError, InputError
from foldkit.core.utils import derive_seed
from foldkit.envelope.schemas import FoldingConfig
from foldkit.envelope.solver import fit_folded, reduce_predictors
from foldkit.linalg.schemas import InversionMode
from foldkit.linalg.tensor_ops import vec_batch
from foldkit.moments.schemas import SampleSet
from foldkit.pipeline.qda import qda_fit, qda_predict
from foldkit.pipeline.schemas import LoocvResult, QdaModel, ScreenBases
from foldkit.pipeline.screening import apply_screen, prescreen
from foldkit.simbench.conventional import conventional_fit

logger = logging.getLogger(__name__)

ClassifyMethod = Literal["sir", "save", "dr", "csir", "csave", "cdr"]
CLASSIFY_METHODS = ("sir", "save", "dr", "csir", "csave", "cdr")


class FoldModel(NamedTuple):
    """Everything fitted on one training fold."""

    screen: ScreenBases
    reducer: object  # FoldingFit for folded methods, (P x d) directions for conventional ones
    qda: QdaModel
    conventional: bool

    def features(self, X: np.ndarray) -> np.ndarray:
        """Feature rows for raw (n, pL, pR) predictors."""
        screened = apply_screen(self.screen, X)
        if screened.ndim == 2:
            screened = screened[None]
        if self.conventional:
            return vec_batch(screened) @ self.reducer
        return reduce_predictors(self.reducer, screened)

    def predict(self, X: np.ndarray) -> np.ndarray:
        return qda_predict(self.qda, self.features(X))


def _fold_model(
    train: SampleSet,
    method: ClassifyMethod,
    s: Optional[int],
    sl: int,
    sr: int,
    config: FoldingConfig,
    conventional_dim: Optional[int] = None,
    robust_cutoff: Optional[float] = None,
    qda_mode: Optional[InversionMode] = None,
) -> FoldModel:
    """Fit screening, reduction and QDA on one training set."""
    screen, screened = prescreen(train, sl, sr)

    if method.startswith("c"):
        d = conventional_dim or config.ml * config.mr
        basis = conventional_fit(screened, method[1:], s, d, config.inversion)
        reducer = basis.matrix
        features = screened.vectors() @ reducer
        conventional = True
    else:
        reducer = fit_folded(screened, method, s, config, robust_cutoff)
        features = reduce_predictors(reducer, screened)
        conventional = False

    qda = qda_fit(features, train.y, qda_mode)
    return FoldModel(screen=screen, reducer=reducer, qda=qda, conventional=conventional)


def _run_fold(
    samples: SampleSet,
    index: int,
    method: ClassifyMethod,
    s: Optional[int],
    sl: int,
    sr: int,
    config: FoldingConfig,
    conventional_dim: Optional[int],
    robust_cutoff: Optional[float],
    qda_mode: Optional[InversionMode],
) -> float:
    item_id = samples.ids[index]
    train = samples.subset(np.delete(np.arange(samples.n), index))
    fold_config = config.model_copy(update={"seed": derive_seed(config.seed, item_id)})
    try:
        model = _fold_model(train, method, s, sl, sr, fold_config, conventional_dim, robust_cutoff, qda_mode)
        return float(model.predict(samples.X[index])[0])
    except FoldkitError as e:
        raise e.with_context(fold=index, item=item_id)


def loocv_classify(
    samples: SampleSet,
    method: ClassifyMethod,
    s: Optional[int],
    sl: int,
    sr: int,
    config: FoldingConfig,
    conventional_dim: Optional[int] = None,
    robust_cutoff: Optional[float] = None,
    qda_mode: Optional[InversionMode] = None,
) -> LoocvResult:
    """
    Leave-one-out accuracy of reduction + QDA.

    Args:
        samples: Sample with a categorical response (n >= 3)
        method: Folded "sir" | "save" | "dr" or conventional "csir" | "csave" | "cdr"
        s: Slice count for the reduction (categorical responses use one slice per class)
        sl, sr: Pre-screening sizes
        config: Folding configuration; folds reseed with hash(config.seed, item id)
        conventional_dim: d for the conventional methods (default mL * mR)
        robust_cutoff: Robust-weight quantile for the folded methods
        qda_mode: Inversion mode for the class covariances (default exact)

    Returns:
        LoocvResult with predictions in the original item order

    Raises:
        InputError: Continuous response, n < 3 or an unknown method
    """
    if samples.response_kind != "categorical":
        raise InputError("classification needs a categorical response")
    if samples.n < 3:
        raise InputError(f"leave-one-out needs at least 3 items, got {samples.n}")
    if method not in CLASSIFY_METHODS:
        raise InputError(f"unknown method '{method}', expected one of {list(CLASSIFY_METHODS)}")

    logger.info(f"🧠 LOOCV with {method}: {samples.n} folds, screen {sl}x{sr}, fold ({config.ml}x{config.mr})")
    predictions = Parallel(n_jobs=settings.n_jobs)(
        delayed(_run_fold)(samples, i, method, s, sl, sr, config, conventional_dim, robust_cutoff, qda_mode)
        for i in range(samples.n)
    )

    truth = [float(v) for v in samples.y]
    correct = int(sum(p == t for p, t in zip(predictions, truth)))
    result = LoocvResult(
        method=method,
        ids=list(samples.ids),
        truth=truth,
        predictions=predictions,
        correct_count=correct,
        total=samples.n,
    )
    logger.info(f"✅ LOOCV {method}: {result.summary()} correct")
    return result
