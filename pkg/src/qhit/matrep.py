"""Row-stacking vec calculus and matrix representations of maps on M_n.

The convention throughout is *row* stacking: ``vec(A)`` lists the rows of
``A`` one after another.  Under this convention ``vec(A X B^T) =
(A kron B) vec(X)``, so the representation of the conjugation
``X -> B X B*`` is ``B kron conj(B)``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DimensionError, ValidationError

DEFAULT_ATOL = 1e-10


def as_complex(A) -> np.ndarray:
    """Coerce input to a complex128 ndarray and reject non-finite entries."""
    M = np.asarray(A, dtype=np.complex128)
    if not np.all(np.isfinite(M.view(np.float64))):
        raise ValidationError("matrix contains NaN or Inf entries")
    return M


def vec(X) -> np.ndarray:
    """Stack the rows of X into a column vector (returned as a 1-d array)."""
    return as_complex(X).reshape(-1)


def unvec(v, rows: int, cols: int) -> np.ndarray:
    """Inverse of :func:`vec` for a ``rows x cols`` matrix."""
    v = np.asarray(v, dtype=np.complex128).reshape(-1)
    if v.size != rows * cols:
        raise DimensionError(
            f"vector of length {v.size} cannot fill a {rows}x{cols} matrix"
        )
    return v.reshape(rows, cols)


def kron(A, B) -> np.ndarray:
    """Kronecker product."""
    return np.kron(as_complex(A), as_complex(B))


def conj_kron(B) -> np.ndarray:
    """Representation ``B kron conj(B)`` of the conjugation ``X -> B X B*``."""
    B = as_complex(B)
    return np.kron(B, B.conj())


@dataclass(frozen=True)
class SuperOp:
    """Matrix representation of a linear map on M_dim (a dim^2 x dim^2 matrix)."""

    dim: int
    mat: np.ndarray

    def __post_init__(self):
        mat = as_complex(self.mat)
        if mat.shape != (self.dim**2, self.dim**2):
            raise DimensionError(
                f"superoperator on M_{self.dim} must be "
                f"{self.dim**2}x{self.dim**2}, got {mat.shape}"
            )
        object.__setattr__(self, "mat", mat)

    def __call__(self, X) -> np.ndarray:
        return apply(self, X)


def identity_superop(dim: int) -> SuperOp:
    return SuperOp(dim, np.eye(dim**2))


def apply(S: SuperOp, X) -> np.ndarray:
    """Apply a superoperator to a matrix: unvec(S.mat @ vec(X))."""
    X = as_complex(X)
    if X.shape != (S.dim, S.dim):
        raise DimensionError(f"expected a {S.dim}x{S.dim} matrix, got {X.shape}")
    return unvec(S.mat @ vec(X), S.dim, S.dim)


def _same_dim(S1: SuperOp, S2: SuperOp):
    if S1.dim != S2.dim:
        raise DimensionError(f"superoperator dims differ: {S1.dim} vs {S2.dim}")


def compose(S1: SuperOp, S2: SuperOp) -> SuperOp:
    """Composition S1 after S2."""
    _same_dim(S1, S2)
    return SuperOp(S1.dim, S1.mat @ S2.mat)


def add(S1: SuperOp, S2: SuperOp) -> SuperOp:
    _same_dim(S1, S2)
    return SuperOp(S1.dim, S1.mat + S2.mat)


def scale(S: SuperOp, c: complex) -> SuperOp:
    return SuperOp(S.dim, c * S.mat)


def power(S: SuperOp, m: int) -> SuperOp:
    if m < 0:
        raise ValueError("negative powers are not defined for general maps")
    return SuperOp(S.dim, np.linalg.matrix_power(S.mat, m))


def close(A, B, atol: float = DEFAULT_ATOL) -> bool:
    """Entrywise absolute comparison with the package default tolerance."""
    A = np.asarray(A, dtype=np.complex128)
    B = np.asarray(B, dtype=np.complex128)
    return A.shape == B.shape and bool(np.max(np.abs(A - B), initial=0.0) <= atol)
