"""Vector measures on [0, 1] with finite exact representations.

A measure is a finite set of Dirac atoms plus a finite set of
constant-density pieces, with coefficients in R^n or C^n:

    mu(B)  =  sum_{atoms: t_j in B} w_j  +  sum_{pieces k} d_k * len(B n I_k)

All point mass lives in atoms; pieces are absolutely continuous, so endpoint
membership of a query set never affects their contribution.  The class is
closed under affine pushforward, application of a matrix operator to the
coefficients, and linear combination, which keeps Markov-type operator
iterates exactly representable.

Canonical form: atoms sorted with coincident points merged (a configurable
snap tolerance, default 1e-12, also merges nearly-coincident points produced
by rounding) and zero weights dropped; pieces resolved into disjoint
segments with densities summed, zero densities dropped, and adjacent
segments with exactly equal densities merged.  Equality is structural on the
canonical arrays.
"""

from __future__ import annotations

import json

import numpy as np

from .exceptions import DimensionMismatch, FieldMismatch
from .space import AffineMap, Interval, QuerySet

__all__ = ["VectorMeasure", "pushforward", "apply_operator", "combine",
           "accumulate", "prune"]

_DEFAULT_SNAP = 1e-12


def _row_norms(a: np.ndarray) -> np.ndarray:
    return np.sqrt(np.sum(np.abs(a) ** 2, axis=1))


def _canonical_atoms(points, weights, snap):
    if len(points) == 0:
        return points, weights
    order = np.argsort(points, kind="stable")
    p = points[order]
    w = weights[order]
    starts = np.concatenate(([True], np.diff(p) > snap))
    idx = np.flatnonzero(starts)
    merged_w = np.add.reduceat(w, idx, axis=0)
    merged_p = p[idx]
    keep = _row_norms(merged_w) != 0.0
    return merged_p[keep], merged_w[keep]


def _canonical_pieces(lo, hi, dens):
    keep = (hi > lo) & (_row_norms(dens) != 0.0)
    lo, hi, dens = lo[keep], hi[keep], dens[keep]
    if len(lo) == 0:
        return lo, hi, dens
    events = np.unique(np.concatenate([lo, hi]))
    n = dens.shape[1]
    delta = np.zeros((len(events), n), dtype=dens.dtype)
    i0 = np.searchsorted(events, lo)
    i1 = np.searchsorted(events, hi)
    np.add.at(delta, i0, dens)
    np.subtract.at(delta, i1, dens)
    seg_d = np.cumsum(delta[:-1], axis=0)
    seg_lo = events[:-1]
    seg_hi = events[1:]
    keep = _row_norms(seg_d) != 0.0
    seg_lo, seg_hi, seg_d = seg_lo[keep], seg_hi[keep], seg_d[keep]
    if len(seg_lo) == 0:
        return seg_lo, seg_hi, seg_d
    # merge runs of contiguous segments carrying bitwise-equal densities
    contiguous = seg_lo[1:] == seg_hi[:-1]
    same = np.all(seg_d[1:] == seg_d[:-1], axis=1)
    starts = np.concatenate(([True], ~(contiguous & same)))
    idx = np.flatnonzero(starts)
    ends = np.concatenate((idx[1:], [len(seg_lo)])) - 1
    return seg_lo[idx], seg_hi[ends], seg_d[idx]


class VectorMeasure:
    """Finitely representable vector measure: Dirac atoms + density pieces."""

    __slots__ = ("atom_points", "atom_weights", "piece_lo", "piece_hi",
                 "piece_density", "dim")

    def __init__(self, atoms=(), pieces=(), dim=None, field=None,
                 snap=_DEFAULT_SNAP):
        """Build from iterables of ``(point, weight)`` and
        ``(interval_or_pair, density)``; ``dim`` is only needed when both
        lists are empty.  ``field`` is "real", "complex", or None to infer
        from the coefficients.
        """
        a_pts, a_wts, p_lo, p_hi, p_d = [], [], [], [], []
        for t, w in atoms:
            a_pts.append(float(t))
            a_wts.append(np.atleast_1d(np.asarray(w)))
        for iv, d in pieces:
            if isinstance(iv, Interval):
                lo_, hi_ = iv.lo, iv.hi
            else:
                lo_, hi_ = iv
            p_lo.append(float(lo_))
            p_hi.append(float(hi_))
            p_d.append(np.atleast_1d(np.asarray(d)))
        coeffs = a_wts + p_d
        if dim is None:
            if not coeffs:
                raise ValueError("dim is required for an empty measure")
            dim = len(coeffs[0])
        for c in coeffs:
            if c.shape != (dim,):
                raise DimensionMismatch(
                    f"coefficient of shape {c.shape} in a dimension-{dim} measure")
        want_complex = (field == "complex") or (
            field is None and any(np.iscomplexobj(c) for c in coeffs))
        if field == "real" and any(np.iscomplexobj(c) and np.any(c.imag) for c in coeffs):
            raise FieldMismatch("complex coefficients in a real measure")
        dtype = np.complex128 if want_complex else np.float64

        def cast(stack):
            if not want_complex and np.iscomplexobj(stack):
                stack = stack.real
            return stack.astype(dtype)

        pts = np.asarray(a_pts, dtype=float)
        wts = cast(np.stack(a_wts)) if a_wts else np.zeros((0, dim), dtype=dtype)
        lo = np.asarray(p_lo, dtype=float)
        hi = np.asarray(p_hi, dtype=float)
        dd = cast(np.stack(p_d)) if p_d else np.zeros((0, dim), dtype=dtype)
        self._finish(pts, wts, lo, hi, dd, dim, snap)

    def _finish(self, pts, wts, lo, hi, dens, dim, snap):
        if np.any(pts < 0.0) or np.any(pts > 1.0):
            raise ValueError("atom outside [0, 1]")
        if np.any(lo > hi) or (len(lo) and (lo.min() < 0.0 or hi.max() > 1.0)):
            raise ValueError("piece interval outside [0, 1] or reversed")
        pts, wts = _canonical_atoms(pts, wts, snap)
        lo, hi, dens = _canonical_pieces(lo, hi, dens)
        for arr in (pts, wts, lo, hi, dens):
            arr.setflags(write=False)
        object.__setattr__(self, "atom_points", pts)
        object.__setattr__(self, "atom_weights", wts)
        object.__setattr__(self, "piece_lo", lo)
        object.__setattr__(self, "piece_hi", hi)
        object.__setattr__(self, "piece_density", dens)
        object.__setattr__(self, "dim", dim)

    def __setattr__(self, name, value):
        raise AttributeError("VectorMeasure is immutable")

    @classmethod
    def _from_arrays(cls, pts, wts, lo, hi, dens, dim, snap=_DEFAULT_SNAP):
        self = cls.__new__(cls)
        self._finish(np.asarray(pts, float), np.asarray(wts),
                     np.asarray(lo, float), np.asarray(hi, float),
                     np.asarray(dens), dim, snap)
        return self

    # -- constructors -------------------------------------------------

    @classmethod
    def zero(cls, dim: int, field: str = "real") -> "VectorMeasure":
        return cls(dim=dim, field=field)

    @classmethod
    def dirac(cls, t: float, weight) -> "VectorMeasure":
        return cls(atoms=[(t, weight)])

    @classmethod
    def lebesgue(cls, density) -> "VectorMeasure":
        """Lebesgue measure on [0, 1] carrying a constant vector density."""
        return cls(pieces=[((0.0, 1.0), density)])

    # -- basic queries ------------------------------------------------

    @property
    def field(self) -> str:
        return "complex" if np.iscomplexobj(self.atom_weights) else "real"

    @property
    def n_atoms(self) -> int:
        return len(self.atom_points)

    @property
    def n_pieces(self) -> int:
        return len(self.piece_lo)

    def is_zero(self) -> bool:
        return self.n_atoms == 0 and self.n_pieces == 0

    def evaluate(self, B: QuerySet) -> np.ndarray:
        """mu(B) for an evaluable set, exactly from the representation."""
        out = np.zeros(self.dim, dtype=self.atom_weights.dtype)
        if self.n_atoms:
            mask = B.membership(self.atom_points)
            if mask.any():
                out += self.atom_weights[mask].sum(axis=0)
        if self.n_pieces:
            for s in B.spans:
                ov = np.minimum(self.piece_hi, s.hi) - np.maximum(self.piece_lo, s.lo)
                np.clip(ov, 0.0, None, out=ov)
                if np.any(ov):
                    out += (self.piece_density * ov[:, None]).sum(axis=0)
        return out

    def total(self) -> np.ndarray:
        """mu([0, 1]): all atom weights plus density mass."""
        out = self.atom_weights.sum(axis=0) if self.n_atoms else np.zeros(
            self.dim, dtype=self.atom_weights.dtype)
        if self.n_pieces:
            out = out + (self.piece_density
                         * (self.piece_hi - self.piece_lo)[:, None]).sum(axis=0)
        return out

    def variation_norm(self) -> float:
        """Total variation: sum of atom weight norms plus density norm * length.

        Exact for this representation because atoms and pieces (after
        canonicalization) live on disjoint parts of the interval.
        """
        v = float(_row_norms(self.atom_weights).sum()) if self.n_atoms else 0.0
        if self.n_pieces:
            v += float((_row_norms(self.piece_density)
                        * (self.piece_hi - self.piece_lo)).sum())
        return v

    def cumulative(self, t: float) -> np.ndarray:
        """mu([0, t]) as a function of the right endpoint."""
        return self.cumulative_all(np.array([float(t)]))[0]

    def cumulative_all(self, ts) -> np.ndarray:
        """Vectorized ``cumulative`` for a sorted array of points.

        The density part runs as an event sweep: prefix integrals at the
        piece endpoints plus the active density within each gap, so the
        cost is (pieces + points) log pieces rather than their product.
        """
        ts = np.asarray(ts, dtype=float)
        out = np.zeros((len(ts), self.dim), dtype=self.atom_weights.dtype)
        if self.n_atoms:
            prefix = np.concatenate(
                [np.zeros((1, self.dim), dtype=self.atom_weights.dtype),
                 np.cumsum(self.atom_weights, axis=0)])
            pos = np.searchsorted(self.atom_points, ts, side="right")
            out += prefix[pos]
        if self.n_pieces:
            ev = np.unique(np.concatenate([self.piece_lo, self.piece_hi]))
            delta = np.zeros((len(ev), self.dim), dtype=self.piece_density.dtype)
            np.add.at(delta, np.searchsorted(ev, self.piece_lo),
                      self.piece_density)
            np.subtract.at(delta, np.searchsorted(ev, self.piece_hi),
                           self.piece_density)
            active = np.cumsum(delta, axis=0)  # density on [ev[j], ev[j+1])
            prefix = np.concatenate(
                [np.zeros((1, self.dim), dtype=active.dtype),
                 np.cumsum(active[:-1] * np.diff(ev)[:, None], axis=0)])
            pos = np.clip(np.searchsorted(ev, ts, side="right") - 1,
                          0, len(ev) - 1)
            frac = np.clip(ts - ev[pos], 0.0, None)
            # beyond the last endpoint every piece is closed: active is 0
            out += prefix[pos] + active[pos] * frac[:, None]
        return out

    def breakpoints(self) -> np.ndarray:
        """Sorted points where the cumulative changes slope or jumps,
        always including 0 and 1."""
        return np.unique(np.concatenate(
            [self.atom_points, self.piece_lo, self.piece_hi, [0.0, 1.0]]))

    # -- algebra ------------------------------------------------------

    def scaled(self, a) -> "VectorMeasure":
        return VectorMeasure._from_arrays(
            self.atom_points, a * self.atom_weights,
            self.piece_lo, self.piece_hi, a * self.piece_density, self.dim)

    def __add__(self, other):
        return combine(1.0, self, 1.0, other)

    def __sub__(self, other):
        return combine(1.0, self, -1.0, other)

    def __neg__(self):
        return self.scaled(-1.0)

    def __mul__(self, a):
        return self.scaled(a)

    __rmul__ = __mul__

    def __eq__(self, other):
        if not isinstance(other, VectorMeasure) or self.dim != other.dim:
            return NotImplemented if not isinstance(other, VectorMeasure) else False
        return (np.array_equal(self.atom_points, other.atom_points)
                and np.array_equal(self.atom_weights, other.atom_weights)
                and np.array_equal(self.piece_lo, other.piece_lo)
                and np.array_equal(self.piece_hi, other.piece_hi)
                and np.array_equal(self.piece_density, other.piece_density))

    def __repr__(self):
        return (f"VectorMeasure(dim={self.dim}, {self.n_atoms} atoms, "
                f"{self.n_pieces} pieces, |mu|={self.variation_norm():.6g})")

    # -- serialization ------------------------------------------------

    def to_dict(self) -> dict:
        def enc(row):
            if self.field == "complex":
                return [[float(c.real), float(c.imag)] for c in row]
            return [float(c) for c in row]
        return {
            "dimension": self.dim,
            "field": self.field,
            "atoms": [[float(t), enc(w)] for t, w in
                      zip(self.atom_points, self.atom_weights)],
            "pieces": [[float(lo), float(hi), enc(d)] for lo, hi, d in
                       zip(self.piece_lo, self.piece_hi, self.piece_density)],
        }

    @classmethod
    def from_dict(cls, d: dict) -> "VectorMeasure":
        field = d.get("field", "real")

        def dec(row):
            if field == "complex":
                return np.array([complex(c[0], c[1]) for c in row])
            return np.array([float(c) for c in row])
        atoms = [(t, dec(w)) for t, w in d.get("atoms", [])]
        pieces = [((lo, hi), dec(dd)) for lo, hi, dd in d.get("pieces", [])]
        return cls(atoms=atoms, pieces=pieces, dim=d["dimension"], field=field)

    def to_json(self, **kw) -> str:
        return json.dumps(self.to_dict(), **kw)

    @classmethod
    def from_json(cls, s: str) -> "VectorMeasure":
        return cls.from_dict(json.loads(s))


# -- measure transforms ----------------------------------------------


def pushforward(m: AffineMap, mu: VectorMeasure) -> VectorMeasure:
    """Image measure under an affine map: (pushforward mu)(B) = mu(preimage B).

    Atoms move to their image points; densities rescale by 1/|slope|.  A
    constant map collapses everything onto one atom carrying the total.
    """
    s, o = m.slope, m.offset
    if s == 0.0:
        return VectorMeasure._from_arrays(
            np.array([o]), mu.total()[None, :],
            np.zeros(0), np.zeros(0),
            np.zeros((0, mu.dim), dtype=mu.atom_weights.dtype), mu.dim)
    pts = s * mu.atom_points + o
    lo = s * mu.piece_lo + o
    hi = s * mu.piece_hi + o
    if s < 0:
        lo, hi = hi, lo
    dens = mu.piece_density / abs(s)
    return VectorMeasure._from_arrays(pts, mu.atom_weights, lo, hi, dens, mu.dim)


def apply_operator(r, mu: VectorMeasure) -> VectorMeasure:
    """Apply a matrix to every coefficient: (R mu)(B) = R (mu(B))."""
    r = np.asarray(r)
    if r.ndim != 2 or r.shape != (mu.dim, mu.dim):
        raise DimensionMismatch(
            f"operator shape {r.shape} does not match measure dimension {mu.dim}")
    return VectorMeasure._from_arrays(
        mu.atom_points, mu.atom_weights @ r.T,
        mu.piece_lo, mu.piece_hi, mu.piece_density @ r.T, mu.dim)


def combine(a, mu: VectorMeasure, b, nu: VectorMeasure,
            snap=_DEFAULT_SNAP) -> VectorMeasure:
    """Linear combination a*mu + b*nu in canonical form."""
    if mu.dim != nu.dim:
        raise DimensionMismatch(f"dimensions differ: {mu.dim} vs {nu.dim}")
    dtype = np.result_type(mu.atom_weights.dtype, nu.atom_weights.dtype,
                           np.asarray(a), np.asarray(b))
    return VectorMeasure._from_arrays(
        np.concatenate([mu.atom_points, nu.atom_points]),
        np.concatenate([(a * mu.atom_weights).astype(dtype),
                        (b * nu.atom_weights).astype(dtype)]),
        np.concatenate([mu.piece_lo, nu.piece_lo]),
        np.concatenate([mu.piece_hi, nu.piece_hi]),
        np.concatenate([(a * mu.piece_density).astype(dtype),
                        (b * nu.piece_density).astype(dtype)]),
        mu.dim, snap)


def accumulate(measures, dim=None, snap=_DEFAULT_SNAP) -> VectorMeasure:
    """Sum of a sequence of measures with a single canonicalization pass."""
    measures = list(measures)
    if not measures:
        if dim is None:
            raise ValueError("dim required to sum an empty sequence")
        return VectorMeasure.zero(dim)
    dim = measures[0].dim
    if any(m.dim != dim for m in measures):
        raise DimensionMismatch("measures of different dimension in sum")
    dtype = np.result_type(*(m.atom_weights.dtype for m in measures))
    return VectorMeasure._from_arrays(
        np.concatenate([m.atom_points for m in measures]),
        np.concatenate([m.atom_weights.astype(dtype) for m in measures]),
        np.concatenate([m.piece_lo for m in measures]),
        np.concatenate([m.piece_hi for m in measures]),
        np.concatenate([m.piece_density.astype(dtype) for m in measures]),
        dim, snap)


def prune(mu: VectorMeasure, tol: float) -> VectorMeasure:
    """Drop the smallest variation contributions, total dropped mass <= tol.

    Candidates (atoms and pieces) are sorted by contribution and removed
    smallest-first while the running sum stays within the budget, so
    ||prune(mu) - mu|| <= tol.  tol = 0 returns the measure unchanged.
    """
    if tol < 0:
        raise ValueError("tol must be nonnegative")
    na = mu.n_atoms
    contrib = np.concatenate([
        _row_norms(mu.atom_weights),
        _row_norms(mu.piece_density) * (mu.piece_hi - mu.piece_lo)])
    if len(contrib) == 0:
        return mu
    order = np.argsort(contrib, kind="stable")
    csum = np.cumsum(contrib[order])
    n_drop = int(np.searchsorted(csum, tol, side="right"))
    if n_drop == 0:
        return mu
    dropped = order[:n_drop]
    keep_a = np.ones(na, dtype=bool)
    keep_p = np.ones(mu.n_pieces, dtype=bool)
    keep_a[dropped[dropped < na]] = False
    keep_p[dropped[dropped >= na] - na] = False
    return VectorMeasure._from_arrays(
        mu.atom_points[keep_a], mu.atom_weights[keep_a],
        mu.piece_lo[keep_p], mu.piece_hi[keep_p], mu.piece_density[keep_p],
        mu.dim)
