"""
Objective and closed-form alternating updates of the Kronecker envelope fit.

The fitted objective is

    sum_j w_j || T_j - A (b kron a) f_j ||_F^2

with T_j the premultiplied targets and A = cov^{1/2}. Each update is the
exact least-squares minimizer over one block with the other two fixed.

Normal equations for a and b can be assembled three ways:

- "factored": aggregate C = sum_j w_j A T_j f_j' and H = sum_j w_j f_j f_j',
  then contract the 4-way covariance tensor with einsum. Never forms Pi or
  any pRpL*mRmL-column design matrix. Default.
- "pi": the literal design matrices V2 = (f_j' kron A) Pi (...) built with
  the Kronecker rearrangement permutation. Small problems and tests only.
- "mat": the reshaping shortcut available when every target is a vector (k = 1).
"""

import logging
from typing import Literal, Optional

import numpy as np

from foldkit.core.exceptions import DimensionError, InputError
from foldkit.linalg.inversion import solve_normal
from foldkit.linalg.schemas import InversionMode
from foldkit.linalg.tensor_ops import commutation_matrix, mat, pi_matrix, vec
from foldkit.moments.schemas import MomentTargets

logger = logging.getLogger(__name__)

Strategy = Literal["factored", "pi", "mat"]


def _check_left(targets: MomentTargets, a: np.ndarray) -> None:
    if a.ndim != 2 or a.shape[0] != targets.pl:
        raise DimensionError(f"a must have {targets.pl} rows, got shape {a.shape}")


def _check_right(targets: MomentTargets, b: np.ndarray) -> None:
    if b.ndim != 2 or b.shape[0] != targets.pr:
        raise DimensionError(f"b must have {targets.pr} rows, got shape {b.shape}")


def _check_coefficients(targets: MomentTargets, f: np.ndarray, ml: int, mr: int) -> None:
    expected = (targets.count, ml * mr, targets.k)
    if f.shape != expected:
        raise DimensionError(f"f must have shape {expected}, got {f.shape}")


def objective(targets: MomentTargets, a: np.ndarray, b: np.ndarray, f: np.ndarray) -> float:
    """
    Weighted sum of squared Frobenius residuals.

    Args:
        targets: Premultiplied moment targets
        a: Left basis, pL x mL
        b: Right basis, pR x mR
        f: Coefficients, (J, mR*mL, k)

    Returns:
        Objective value (>= 0)

    Raises:
        DimensionError: If shapes do not conform to the targets
    """
    a, b, f = np.asarray(a, float), np.asarray(b, float), np.asarray(f, float)
    _check_left(targets, a)
    _check_right(targets, b)
    _check_coefficients(targets, f, a.shape[1], b.shape[1])

    AG = targets.cov_root @ np.kron(b, a)
    residuals = targets.matrices - AG @ f
    return float(np.einsum("j,jpk,jpk->", targets.weights, residuals, residuals))


def _aggregates(targets: MomentTargets, f: np.ndarray):
    """C = sum_j w_j A T_j f_j' (P x M) and H = sum_j w_j f_j f_j' (M x M)."""
    AT = targets.cov_root @ targets.matrices
    C = np.einsum("j,jpk,jmk->pm", targets.weights, AT, f)
    H = np.einsum("j,jmk,jnk->mn", targets.weights, f, f)
    return C, H


def _factored_tensors(targets: MomentTargets, f: np.ndarray, ml: int, mr: int):
    pl, pr = targets.pl, targets.pr
    A = targets.cov_root
    gram = A @ A
    C, H = _aggregates(targets, f)
    S = gram.reshape((pl, pr, pl, pr), order="F")
    Ct = C.reshape((pl, pr, ml, mr), order="F")
    Ht = H.reshape((ml, mr, ml, mr), order="F")
    return S, Ct, Ht


def _pi_system(targets: MomentTargets, f: np.ndarray, design: np.ndarray):
    """Sum of w_j V2' V2 and w_j V2' vec(T_j) with V2 = (f_j' kron A) @ design."""
    A = targets.cov_root
    width = design.shape[1]
    N = np.zeros((width, width))
    rhs = np.zeros(width)
    for j in range(targets.count):
        V2 = np.kron(f[j].T, A) @ design
        N += targets.weights[j] * V2.T @ V2
        rhs += targets.weights[j] * V2.T @ vec(targets.matrices[j])
    return N, rhs


def _mat_system(targets: MomentTargets, f: np.ndarray, build_design):
    """Same normal equations for vector targets using per-slice reshaped designs."""
    if targets.k != 1:
        raise InputError("the mat strategy needs vector targets (k = 1)")
    N = None
    rhs = None
    for j in range(targets.count):
        V2 = targets.cov_root @ build_design(f[j][:, 0])
        V1 = targets.matrices[j][:, 0]
        term_N = targets.weights[j] * V2.T @ V2
        term_rhs = targets.weights[j] * V2.T @ V1
        N = term_N if N is None else N + term_N
        rhs = term_rhs if rhs is None else rhs + term_rhs
    return N, rhs


def update_b(
    targets: MomentTargets,
    a: np.ndarray,
    f: np.ndarray,
    mode: Optional[InversionMode] = None,
    strategy: Strategy = "factored",
) -> np.ndarray:
    """
    Minimize the objective over b with a and f fixed.

    Args:
        targets: Premultiplied moment targets
        a: Left basis, pL x mL
        f: Coefficients, (J, mR*mL, k)
        mode: Inversion mode for the normal matrix (defaults to the targets' mode)
        strategy: "factored", "pi" or "mat"

    Returns:
        b, pR x mR

    Raises:
        SingularityError: Singular normal matrix under exact inversion
    """
    a, f = np.asarray(a, float), np.asarray(f, float)
    _check_left(targets, a)
    pl, pr, ml = targets.pl, targets.pr, a.shape[1]
    if f.ndim != 3 or f.shape[1] % ml != 0:
        raise DimensionError(f"f has shape {f.shape}, incompatible with mL = {ml}")
    mr = f.shape[1] // ml
    _check_coefficients(targets, f, ml, mr)
    mode = mode or targets.mode

    if strategy == "factored":
        S, Ct, Ht = _factored_tensors(targets, f, ml, mr)
        N = np.einsum("irjq,it,ju,tsuv->rsqv", S, a, a, Ht, optimize=True)
        N = N.reshape((pr * mr, pr * mr), order="F")
        rhs = np.einsum("irts,it->rs", Ct, a).reshape(-1, order="F")
    elif strategy == "pi":
        Pi = pi_matrix(pr, mr, pl, ml)
        design = Pi.apply(np.kron(np.eye(pr * mr), vec(a)[:, None]))
        N, rhs = _pi_system(targets, f, design)
    elif strategy == "mat":
        K = commutation_matrix(pr, mr)
        N, rhs = _mat_system(
            targets, f, lambda fj: K.apply_right(np.kron(np.eye(pr), a @ mat(fj, ml)))
        )
    else:
        raise InputError(f"unknown update strategy '{strategy}'")

    solution = solve_normal(N, rhs, mode, "normal matrix of the b-update")
    return mat(solution, pr)


def update_a(
    targets: MomentTargets,
    b: np.ndarray,
    f: np.ndarray,
    mode: Optional[InversionMode] = None,
    strategy: Strategy = "factored",
) -> np.ndarray:
    """Minimize the objective over a with b and f fixed (mirror of update_b)."""
    b, f = np.asarray(b, float), np.asarray(f, float)
    _check_right(targets, b)
    pl, pr, mr = targets.pl, targets.pr, b.shape[1]
    if f.ndim != 3 or f.shape[1] % mr != 0:
        raise DimensionError(f"f has shape {f.shape}, incompatible with mR = {mr}")
    ml = f.shape[1] // mr
    _check_coefficients(targets, f, ml, mr)
    mode = mode or targets.mode

    if strategy == "factored":
        S, Ct, Ht = _factored_tensors(targets, f, ml, mr)
        N = np.einsum("irjq,rs,qv,tsuv->itju", S, b, b, Ht, optimize=True)
        N = N.reshape((pl * ml, pl * ml), order="F")
        rhs = np.einsum("irts,rs->it", Ct, b).reshape(-1, order="F")
    elif strategy == "pi":
        Pi = pi_matrix(pr, mr, pl, ml)
        design = Pi.apply(np.kron(vec(b)[:, None], np.eye(pl * ml)))
        N, rhs = _pi_system(targets, f, design)
    elif strategy == "mat":
        N, rhs = _mat_system(targets, f, lambda fj: np.kron(b @ mat(fj, ml).T, np.eye(pl)))
    else:
        raise InputError(f"unknown update strategy '{strategy}'")

    solution = solve_normal(N, rhs, mode, "normal matrix of the a-update")
    return mat(solution, pl)


def update_f(
    targets: MomentTargets,
    a: np.ndarray,
    b: np.ndarray,
    mode: Optional[InversionMode] = None,
) -> np.ndarray:
    """
    Per-target least-squares coefficients with a and b fixed.

    f_j = [(b kron a)' cov (b kron a)]^-1 (b kron a)' A T_j, solved for all
    targets at once against the single M x M normal matrix.

    Raises:
        SingularityError: b kron a rank deficient under exact inversion
    """
    a, b = np.asarray(a, float), np.asarray(b, float)
    _check_left(targets, a)
    _check_right(targets, b)
    mode = mode or targets.mode

    AG = targets.cov_root @ np.kron(b, a)
    M = AG.shape[1]
    J, _, k = targets.matrices.shape
    N = AG.T @ AG
    rhs = np.transpose(AG.T @ targets.matrices, (1, 0, 2)).reshape(M, J * k)
    solution = solve_normal(N, rhs, mode, "normal matrix of the f-update")
    return np.transpose(solution.reshape(M, J, k), (1, 0, 2))
