"""Integration of vector-valued functions against vector measures.

The pairing is the uniform (sesquilinear) integral: for a simple function
f = sum_i x_i 1_{A_i} it is sum_i (x_i, mu(A_i)), linear in the function and
conjugate-linear in the measure, with |integral| <= sup||f|| * ||mu||.
Continuous integrands are handled atom-by-atom exactly and piece-by-piece by
adaptive Gauss-Legendre quadrature.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np

from ._quadrature import adaptive_gauss
from .exceptions import DimensionMismatch, PartitionError
from .hilbert import scalar_product
from .measure import VectorMeasure
from .space import QuerySet

__all__ = ["SimpleFunction", "ContinuousFunction", "vector_polynomial",
           "integrate_simple", "integrate"]


@dataclass(frozen=True)
class SimpleFunction:
    """Finitely-valued function: constant vector value on each cell of a
    partition of [0, 1] into evaluable sets."""
    cells: tuple
    values: tuple

    def __post_init__(self):
        if len(self.cells) != len(self.values):
            raise ValueError("cells and values must have equal length")
        object.__setattr__(self, "cells", tuple(self.cells))
        object.__setattr__(self, "values",
                          tuple(np.atleast_1d(np.asarray(v)) for v in self.values))

    @property
    def dim(self) -> int:
        return len(self.values[0]) if self.values else 0

    def validate_partition(self):
        """Cells must be pairwise disjoint and cover [0, 1] exactly."""
        union = QuerySet.empty()
        for i, a in enumerate(self.cells):
            for b in self.cells[i + 1:]:
                if not a.intersect(b).is_empty:
                    raise PartitionError(f"cells overlap: {a} and {b}")
            union = union.union(a)
        if union != QuerySet.unit():
            raise PartitionError(f"cells do not cover [0, 1]: union is {union}")

    def __call__(self, t: float) -> np.ndarray:
        for cell, v in zip(self.cells, self.values):
            if cell.contains(t):
                return v
        raise ValueError(f"point {t!r} not covered by any cell")


@dataclass(frozen=True)
class ContinuousFunction:
    """Pointwise-defined integrand with declared bounds.

    ``sup_bound`` dominates sup ||f||; ``lip_bound`` (optional) dominates
    the Lipschitz constant.  The bounds travel through operator transforms,
    so norm estimates stay certified without re-sampling.
    """
    func: Callable[[float], np.ndarray]
    dim: int
    sup_bound: float
    lip_bound: Optional[float] = None

    def __call__(self, t: float) -> np.ndarray:
        v = np.atleast_1d(np.asarray(self.func(t)))
        if v.shape != (self.dim,):
            raise DimensionMismatch(
                f"integrand returned shape {v.shape}, expected ({self.dim},)")
        return v


def vector_polynomial(coeffs) -> ContinuousFunction:
    """Polynomial t -> sum_k c_k t^k with vector coefficients, with
    certified sup and Lipschitz bounds on [0, 1]."""
    c = np.atleast_2d(np.asarray(coeffs))
    degp1, n = c.shape
    norms = np.sqrt(np.sum(np.abs(c) ** 2, axis=1))
    sup = float(norms.sum())
    lip = float(sum(k * norms[k] for k in range(degp1)))

    def f(t, _c=c, _deg=degp1):
        powers = np.power(float(t), np.arange(_deg))
        return powers @ _c

    return ContinuousFunction(f, dim=n, sup_bound=sup, lip_bound=lip)


def integrate_simple(f: SimpleFunction, mu: VectorMeasure):
    """Exact pairing of a simple function with a measure."""
    f.validate_partition()
    if f.dim != mu.dim:
        raise DimensionMismatch(f"function dim {f.dim} vs measure dim {mu.dim}")
    out = 0.0
    for cell, v in zip(f.cells, f.values):
        out = out + scalar_product(v, mu.evaluate(cell))
    return out


def integrate(f: ContinuousFunction, mu: VectorMeasure, tol: float = 1e-10):
    """Pairing of a continuous integrand with a measure.

    Atom contributions (f(t_j), w_j) are exact; each density piece is
    integrated adaptively with budget tol / (number of pieces), so the
    quadrature error is at most tol.
    """
    if f.dim != mu.dim:
        raise DimensionMismatch(f"function dim {f.dim} vs measure dim {mu.dim}")
    out = 0.0
    for t, w in zip(mu.atom_points, mu.atom_weights):
        v = f(t)
        if not np.all(np.isfinite(v)):
            raise ValueError(f"integrand not finite at atom {t!r}")
        out = out + scalar_product(v, w)
    if mu.n_pieces:
        per_piece = tol / mu.n_pieces
        for lo, hi, dens in zip(mu.piece_lo, mu.piece_hi, mu.piece_density):
            out = out + adaptive_gauss(
                lambda t, _d=dens: scalar_product(f(t), _d), lo, hi, per_piece)
    return out
