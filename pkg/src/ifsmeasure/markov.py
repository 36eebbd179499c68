"""Markov-type operators from iterated function systems with operator weights.

A system pairs contractive affine self-maps omega_i of [0, 1] with matrices
R_i on the coefficient space, plus an optional base measure mu0.  The
operator acts on vector measures by

    M(nu)  =  sum_i R_i (pushforward(omega_i, nu))  (+ mu0)

and its dual acts on integrands by f -> sum_i adjoint(R_i) f(omega_i(t)),
related through the change-of-variables identity

    integral f d(M nu)  =  integral (dual f) d nu  (+ integral f dmu0).

Three contraction factors govern convergence, one per norm: the variation
factor sum ||R_i||, the bounded-Lipschitz factor sum ||R_i|| (1 + r_i), and
the Lipschitz-ball factor sum ||R_i|| r_i, where r_i is the map's
contraction ratio.  Two solvers compute the fixed point: contraction
iteration in either metric, and exact evaluation on a query set via the
finite transition graph its preimages generate.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np

from .exceptions import (DimensionMismatch, FieldMismatch, IterationLimit,
                         NotContractive)
from .hilbert import adjoint, operator_norm
from .integral import ContinuousFunction
from .measure import VectorMeasure, accumulate, apply_operator, prune, pushforward
from .mk_norm import mk_star_exact
from .space import AffineMap, QuerySet, preimage

__all__ = ["IFSystem", "ContractionFactors", "FixedPointResult", "factors",
           "apply_markov", "dual_apply", "iterate_fixed_point",
           "eval_fixed_point", "residual"]

_MASS_TOL = 1e-12
# refuse, rather than exhaust memory, when the exact representation of an
# iterate outgrows what pruning keeps in check (components multiply by the
# map count per step until whole generations fall under the prune budget)
_MAX_COMPONENTS = 2_000_000


def _check_size(mu: VectorMeasure, k: int) -> None:
    n = mu.n_atoms + mu.n_pieces
    if n > _MAX_COMPONENTS:
        raise IterationLimit(
            f"iterate {k} holds {n} atoms/pieces (cap {_MAX_COMPONENTS}); "
            "the tolerance asks for more steps than the exact representation "
            "supports -- loosen tol or reduce the number of maps")


class IFSystem:
    """Affine maps paired with operator weights and an optional base measure."""

    __slots__ = ("maps", "operators", "base", "dim", "field")

    def __init__(self, maps, operators, base: Optional[VectorMeasure] = None,
                 dim: Optional[int] = None, field: Optional[str] = None):
        maps = tuple(m if isinstance(m, AffineMap) else AffineMap(*m)
                     for m in maps)
        if not maps:
            raise ValueError("a system needs at least one map")
        ops = []
        for r in operators:
            a = np.asarray(r)
            if a.ndim != 2 or a.shape[0] != a.shape[1]:
                raise DimensionMismatch(f"operator of shape {a.shape} is not square")
            ops.append(a)
        if len(ops) != len(maps):
            raise ValueError(f"{len(maps)} maps but {len(ops)} operators")
        if dim is None:
            dim = ops[0].shape[0]
        if any(a.shape != (dim, dim) for a in ops):
            raise DimensionMismatch("operators of inconsistent dimension")
        any_complex = any(np.iscomplexobj(a) for a in ops)
        if field is None:
            field = "complex" if any_complex or (
                base is not None and base.field == "complex") else "real"
        if field == "real" and any(np.iscomplexobj(a) and np.any(a.imag)
                                   for a in ops):
            raise FieldMismatch("complex operator in a real system")
        if base is not None:
            if base.dim != dim:
                raise DimensionMismatch(
                    f"base dimension {base.dim} differs from system dimension {dim}")
            if field == "real" and base.field == "complex":
                raise FieldMismatch("complex base measure in a real system")
        dtype = np.complex128 if field == "complex" else np.float64
        frozen = []
        for a in ops:
            b = a.astype(dtype) if not (field == "real" and np.iscomplexobj(a)) \
                else a.real.astype(dtype)
            b.setflags(write=False)
            frozen.append(b)
        object.__setattr__(self, "maps", maps)
        object.__setattr__(self, "operators", tuple(frozen))
        object.__setattr__(self, "base", base)
        object.__setattr__(self, "dim", dim)
        object.__setattr__(self, "field", field)

    def __setattr__(self, name, value):
        raise AttributeError("IFSystem is immutable")

    def __repr__(self):
        return (f"IFSystem({len(self.maps)} maps, dim={self.dim}, "
                f"field={self.field}, base={'yes' if self.base else 'no'})")


@dataclass(frozen=True)
class ContractionFactors:
    """Operator-norm bounds of the Markov operator in the three metrics."""
    variation: float
    mk: float
    mk_star: float

    def __iter__(self):
        return iter((self.variation, self.mk, self.mk_star))


def factors(sys: IFSystem) -> ContractionFactors:
    """(variation, mk, mk_star) contraction factors of the system."""
    e = d = c = 0.0
    for m, r in zip(sys.maps, sys.operators):
        nrm = operator_norm(r)
        ratio = m.lipschitz
        e += nrm
        d += nrm * (1.0 + ratio)
        c += nrm * ratio
    return ContractionFactors(e, d, c)


def apply_markov(sys: IFSystem, nu: VectorMeasure) -> VectorMeasure:
    """One application of the Markov-type operator (base included)."""
    if nu.dim != sys.dim:
        raise DimensionMismatch(
            f"measure dimension {nu.dim} differs from system dimension {sys.dim}")
    terms = [apply_operator(r, pushforward(m, nu))
             for m, r in zip(sys.maps, sys.operators)]
    if sys.base is not None:
        terms.append(sys.base)
    return accumulate(terms)


def dual_apply(sys: IFSystem, f: ContinuousFunction) -> ContinuousFunction:
    """Dual action on integrands: t -> sum_i adjoint(R_i) f(omega_i(t)).

    Certified bounds travel along: the sup bound scales by the variation
    factor and the Lipschitz bound by the mk_star factor.
    """
    if f.dim != sys.dim:
        raise DimensionMismatch(
            f"function dimension {f.dim} differs from system dimension {sys.dim}")
    adjs = [adjoint(r) for r in sys.operators]
    maps = sys.maps

    def g(t, _adjs=adjs, _maps=maps, _f=f):
        out = None
        for a, m in zip(_adjs, _maps):
            v = a @ _f(m(t))
            out = v if out is None else out + v
        return out

    fac = factors(sys)
    lip = None if f.lip_bound is None else fac.mk_star * f.lip_bound
    return ContinuousFunction(g, dim=f.dim, sup_bound=fac.variation * f.sup_bound,
                              lip_bound=lip)


def residual(sys: IFSystem, mu: VectorMeasure) -> float:
    """Variation norm of M(mu) - mu; zero exactly at the fixed point."""
    return (apply_markov(sys, mu) - mu).variation_norm()


@dataclass(frozen=True)
class FixedPointResult:
    measure: VectorMeasure
    iterations: int
    error_bound: float
    norm: str

    def __iter__(self):
        return iter((self.measure, self.iterations, self.error_bound))


def iterate_fixed_point(sys: IFSystem, start: VectorMeasure, tol: float = 1e-8,
                        max_iter: int = 200, norm: str = "variation",
                        on_iterate: Optional[Callable[[int, VectorMeasure], None]] = None
                        ) -> FixedPointResult:
    """Contraction iteration to the fixed point with a certified error bound.

    norm="variation" requires variation factor e < 1.  Each iterate is
    pruned with budget p = tol*(1-e)/4; the a-posteriori bound
    ||mu_k - mu*|| <= (e*||mu_k - mu_{k-1}|| + p) / (1-e) certifies the
    stop, so the returned error_bound is rigorous despite the pruning.

    norm="mk_star" serves systems that preserve mass exactly
    (sum_i R_i = I, so e = 1) but contract the Lipschitz-ball metric
    (mk_star factor c < 1).  Iterates are never pruned there: pruning
    would perturb totals, and the metric only controls measures of equal
    total mass.  A base measure, if present, must have zero total.

    ``on_iterate(k, mu_k)`` is called after every step when provided.
    """
    if start.dim != sys.dim:
        raise DimensionMismatch(
            f"start dimension {start.dim} differs from system dimension {sys.dim}")
    fac = factors(sys)
    if norm == "variation":
        e = fac.variation
        if e >= 1.0:
            raise NotContractive(
                f"variation factor {e:.6g} >= 1; iteration will not certify "
                "(a mass-preserving system may converge in the mk_star norm)")
        budget = tol * (1.0 - e) / 4.0
        cur = start
        for k in range(1, max_iter + 1):
            nxt = prune(apply_markov(sys, cur), budget)
            _check_size(nxt, k)
            delta = (nxt - cur).variation_norm()
            bound = (e * delta + budget) / (1.0 - e)
            if on_iterate is not None:
                on_iterate(k, nxt)
            if bound <= tol:
                return FixedPointResult(nxt, k, bound, norm)
            cur = nxt
        raise IterationLimit(
            f"tolerance {tol:g} not certified in {max_iter} iterations "
            f"(last bound {bound:g})")
    if norm == "mk_star":
        c = fac.mk_star
        if c >= 1.0:
            raise NotContractive(f"mk_star factor {c:.6g} >= 1")
        op_sum = np.sum(np.stack(sys.operators), axis=0)
        if np.abs(op_sum - np.eye(sys.dim)).max() > _MASS_TOL:
            raise NotContractive(
                "mk_star iteration requires exact mass preservation "
                "(operators must sum to the identity)")
        if sys.base is not None and float(
                np.linalg.norm(sys.base.total())) > _MASS_TOL:
            raise NotContractive(
                "mk_star iteration with a base measure requires the base "
                "to have zero total mass")
        cur = start
        for k in range(1, max_iter + 1):
            nxt = apply_markov(sys, cur)
            _check_size(nxt, k)
            diff = nxt - cur
            dstar = mk_star_exact(diff)
            bound = c * dstar / (1.0 - c)
            if on_iterate is not None:
                on_iterate(k, nxt)
            if bound <= tol:
                return FixedPointResult(nxt, k, bound, norm)
            cur = nxt
        raise IterationLimit(
            f"tolerance {tol:g} not certified in {max_iter} iterations "
            f"(last bound {bound:g})")
    raise ValueError(f"unknown norm {norm!r}")


def _memo_key(B: QuerySet):
    """Hashable canonical key on a 1e-14 grid, absorbing rounding noise in
    repeated preimage arithmetic."""
    return (tuple((round(s.lo, 14), round(s.hi, 14), s.lo_incl, s.hi_incl)
                  for s in B.spans),
            tuple(round(a, 14) for a in B.atoms))


def eval_fixed_point(sys: IFSystem, B: QuerySet, tol: float = 1e-10,
                     max_nodes: int = 100000) -> np.ndarray:
    """Exact fixed-point evaluation mu*(B) via the set-transition graph.

    The fixed-point identity localizes: mu*(C) = sum_i R_i mu*(preimage_i C)
    + mu0(C).  Preimages of an evaluable set stay evaluable, so breadth-first
    exploration with memoized canonical sets either closes into a finite
    graph (one dense linear solve, exact up to rounding) or is truncated at
    a depth where the remaining contribution is below tol; truncated
    children act as zero, adding at most ||mu0||/(1-e) * e^(D+1)/(1-e).

    Requires variation factor e < 1; deterministic by construction.
    """
    fac = factors(sys)
    e = fac.variation
    if e >= 1.0:
        raise NotContractive(
            f"variation factor {e:.6g} >= 1; set evaluation needs a "
            "variation contraction")
    zero = np.zeros(sys.dim,
                    dtype=np.complex128 if sys.field == "complex" else np.float64)
    if sys.base is None:
        return zero  # the only fixed point of the homogeneous contraction
    a_bound = sys.base.variation_norm() / (1.0 - e)
    depth_cap = 0
    while a_bound * e ** (depth_cap + 1) / (1.0 - e) > tol:
        depth_cap += 1
    nodes = [B]
    keys = {_memo_key(B): 0}
    depth = [0]
    children: list = [None]
    frontier = [0]
    while frontier:
        nxt_frontier = []
        for j in frontier:
            if depth[j] >= depth_cap:
                continue
            kids = []
            for m in sys.maps:
                C = preimage(m, nodes[j])
                key = _memo_key(C)
                idx = keys.get(key)
                if idx is None:
                    if len(nodes) >= max_nodes:
                        raise IterationLimit(
                            f"set-transition graph exceeded {max_nodes} nodes")
                    idx = len(nodes)
                    keys[key] = idx
                    nodes.append(C)
                    depth.append(depth[j] + 1)
                    children.append(None)
                    nxt_frontier.append(idx)
                kids.append(idx)
            children[j] = kids
        frontier = nxt_frontier
    n = sys.dim
    N = len(nodes)
    dtype = zero.dtype
    A = np.eye(N * n, dtype=dtype)
    b = np.zeros(N * n, dtype=dtype)
    for j in range(N):
        b[j * n:(j + 1) * n] = sys.base.evaluate(nodes[j])
        if children[j] is None:
            continue  # truncated leaf: children treated as zero
        for r, idx in zip(sys.operators, children[j]):
            A[j * n:(j + 1) * n, idx * n:(idx + 1) * n] -= r
    x = np.linalg.solve(A, b)
    return x[:n]
