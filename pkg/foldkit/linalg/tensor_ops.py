"""
Reshaping operators and Kronecker permutations.

Everything here uses column-major (vec) order: the first index changes
fastest. Permutation matrices (commutation K and the Kronecker
rearrangement Pi) are kept as index arrays and applied lazily; call
`to_dense()` only for small cases and tests.
"""

from typing import Sequence

import numpy as np

from foldkit.core.exceptions import DimensionError


def vec(matrix: np.ndarray) -> np.ndarray:
    """
    Stack the columns of a matrix into one vector.

    Example:
        >>> vec(np.array([[1, 2], [3, 4]]))
        array([1, 3, 2, 4])
    """
    return np.asarray(matrix).reshape(-1, order="F")


def mat(vector: np.ndarray, rows: int) -> np.ndarray:
    """
    Inverse of vec: unstack a vector of length rows*s into a rows x s matrix.

    Raises:
        DimensionError: If the length is not divisible by `rows`
    """
    v = np.asarray(vector).reshape(-1)
    if rows < 1 or v.size % rows != 0:
        raise DimensionError(f"cannot reshape vector of length {v.size} into {rows} rows")
    return v.reshape((rows, v.size // rows), order="F")


def vec_u(tensor: np.ndarray) -> np.ndarray:
    """vec for a u-way array (first index fastest)."""
    return np.asarray(tensor).reshape(-1, order="F")


def arr(vector: np.ndarray, dims: Sequence[int]) -> np.ndarray:
    """
    Inverse of vec_u: rebuild a u-way array of shape `dims`.

    Raises:
        DimensionError: If prod(dims) differs from the vector length
    """
    v = np.asarray(vector).reshape(-1)
    dims = tuple(int(d) for d in dims)
    if any(d < 1 for d in dims) or int(np.prod(dims)) != v.size:
        raise DimensionError(f"cannot arrange {v.size} entries as {dims}")
    return v.reshape(dims, order="F")


def vec_batch(matrices: np.ndarray) -> np.ndarray:
    """Row i of the result is vec(matrices[i]) for an (n, p, q) stack."""
    stack = np.asarray(matrices)
    if stack.ndim != 3:
        raise DimensionError(f"expected an (n, p, q) stack, got shape {stack.shape}")
    n = stack.shape[0]
    return np.swapaxes(stack, 1, 2).reshape(n, -1)


def mat_batch(rows: np.ndarray, p: int) -> np.ndarray:
    """Inverse of vec_batch: (n, p*q) rows back to an (n, p, q) stack."""
    data = np.asarray(rows)
    n, length = data.shape
    if length % p != 0:
        raise DimensionError(f"row length {length} not divisible by {p}")
    return np.swapaxes(data.reshape(n, length // p, p), 1, 2)


def kron(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Kronecker product; block (i, j) of the result is a[i, j] * b."""
    return np.kron(np.atleast_2d(a), np.atleast_2d(b))


class Permutation:
    """
    A permutation matrix P stored as an index array.

    (P @ x)[q] = x[indices[q]], so P[q, indices[q]] = 1.
    """

    __slots__ = ("indices",)

    def __init__(self, indices: np.ndarray):
        idx = np.asarray(indices, dtype=np.intp).reshape(-1)
        if not np.array_equal(np.sort(idx), np.arange(idx.size)):
            raise DimensionError("indices do not form a permutation")
        idx.flags.writeable = False
        self.indices = idx

    @classmethod
    def identity(cls, size: int) -> "Permutation":
        return cls(np.arange(size))

    @property
    def size(self) -> int:
        return self.indices.size

    def apply(self, x: np.ndarray) -> np.ndarray:
        """P @ x, acting on the first axis of x."""
        x = np.asarray(x)
        if x.shape[0] != self.size:
            raise DimensionError(f"permutation of size {self.size} applied to {x.shape[0]} rows")
        return x[self.indices]

    def apply_transpose(self, x: np.ndarray) -> np.ndarray:
        """P.T @ x."""
        return self.transpose().apply(x)

    def apply_right(self, m: np.ndarray) -> np.ndarray:
        """m @ P, permuting the columns of m."""
        m = np.asarray(m)
        if m.shape[-1] != self.size:
            raise DimensionError(f"permutation of size {self.size} applied to {m.shape[-1]} columns")
        return m[..., np.argsort(self.indices)]

    def transpose(self) -> "Permutation":
        return Permutation(np.argsort(self.indices))

    def compose(self, other: "Permutation") -> "Permutation":
        """self @ other."""
        if other.size != self.size:
            raise DimensionError("cannot compose permutations of different sizes")
        return Permutation(other.indices[self.indices])

    def __matmul__(self, other):
        if isinstance(other, Permutation):
            return self.compose(other)
        return self.apply(other)

    def left_identity_kron(self, m: int) -> "Permutation":
        """I_m kron P (block diagonal)."""
        n = self.size
        return Permutation((np.arange(m)[:, None] * n + self.indices[None, :]).reshape(-1))

    def right_identity_kron(self, m: int) -> "Permutation":
        """P kron I_m."""
        return Permutation((self.indices[:, None] * m + np.arange(m)[None, :]).reshape(-1))

    def to_dense(self) -> np.ndarray:
        return np.eye(self.size)[self.indices]

    def __repr__(self) -> str:
        return f"Permutation(size={self.size})"


def commutation_matrix(r1: int, r2: int) -> Permutation:
    """
    K_{r1,r2}: K @ vec(A) = vec(A.T) for every r1 x r2 matrix A.

    Example:
        >>> commutation_matrix(2, 2).apply(vec(np.array([[1, 2], [3, 4]])))
        array([1, 2, 3, 4])
    """
    if r1 < 1 or r2 < 1:
        raise DimensionError(f"commutation matrix needs positive sizes, got ({r1}, {r2})")
    grid = np.arange(r1 * r2).reshape((r1, r2), order="F")
    return Permutation(grid.T.reshape(-1, order="F"))


def pi_matrix(p_right: int, m_right: int, p_left: int, m_left: int) -> Permutation:
    """
    Pi with vec(b kron a) = Pi @ (vec(b) kron vec(a)).

    b is p_right x m_right and a is p_left x m_left. Assembled as
    I_{mR} kron [(I_{mL} kron K_{pR,pL}) K_{pL mL, pR}].
    """
    for count in (p_right, m_right, p_left, m_left):
        if count < 1:
            raise DimensionError("pi_matrix needs positive sizes")
    inner = commutation_matrix(p_right, p_left).left_identity_kron(m_left)
    inner = inner.compose(commutation_matrix(p_left * m_left, p_right))
    return inner.left_identity_kron(m_right)
