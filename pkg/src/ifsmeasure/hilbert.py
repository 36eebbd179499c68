"""Finite-dimensional coefficient spaces R^n / C^n and their operators.

Vectors are 1-D numpy arrays, operators square 2-D arrays.  The scalar
product is linear in the first argument and conjugate-linear in the second:
(x, y) = sum_i x_i * conj(y_i).  Operator norm means the norm induced by the
Euclidean vector norm, i.e. the largest singular value.
"""

from __future__ import annotations

import numpy as np

from .exceptions import DimensionMismatch

__all__ = ["scalar_product", "vector_norm", "operator_norm", "adjoint",
           "matrix_exp", "identity"]


def _as_vector(x) -> np.ndarray:
    a = np.asarray(x)
    if a.ndim != 1:
        raise DimensionMismatch(f"expected a 1-D vector, got shape {a.shape}")
    return a


def _as_operator(r) -> np.ndarray:
    a = np.asarray(r)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise DimensionMismatch(f"expected a square matrix, got shape {a.shape}")
    return a


def scalar_product(x, y):
    """(x, y) = sum_i x_i conj(y_i); real inputs give a real result."""
    xv = _as_vector(x)
    yv = _as_vector(y)
    if xv.shape != yv.shape:
        raise DimensionMismatch(f"vector shapes differ: {xv.shape} vs {yv.shape}")
    out = np.sum(xv * np.conj(yv))
    return complex(out) if np.iscomplexobj(out) else float(out)


def vector_norm(x) -> float:
    return float(np.linalg.norm(_as_vector(x)))


def operator_norm(r) -> float:
    """Largest singular value of the matrix."""
    a = _as_operator(r)
    if not np.all(np.isfinite(a)):
        raise ValueError("operator has non-finite entries")
    return float(np.linalg.svd(a, compute_uv=False)[0])


def adjoint(r) -> np.ndarray:
    """Conjugate transpose; satisfies (Rx, y) = (x, adjoint(R) y)."""
    return _as_operator(r).conj().T.copy()


def identity(n: int, complex_field: bool = False) -> np.ndarray:
    return np.eye(n, dtype=complex if complex_field else float)


def matrix_exp(a, t: float = 1.0) -> np.ndarray:
    """exp(t*A) by scaling and squaring of a 20-term Taylor series.

    The argument is halved until its norm is at most 1/2; 20 series terms
    at that size leave a truncation error near machine precision, and the
    squarings undo the scaling.
    """
    b = t * _as_operator(a).astype(complex if np.iscomplexobj(a) else float)
    n = b.shape[0]
    nrm = operator_norm(b) if np.any(b) else 0.0
    k = 0 if nrm <= 0.5 else int(np.ceil(np.log2(nrm / 0.5)))
    s = b / (2.0 ** k)
    eye = np.eye(n, dtype=s.dtype)
    acc = eye.copy()
    for j in range(20, 0, -1):
        acc = eye + (s @ acc) / j
    for _ in range(k):
        acc = acc @ acc
    return acc
