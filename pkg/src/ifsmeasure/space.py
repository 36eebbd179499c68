"""The unit interval as base space: evaluable sets and affine self-maps.

Evaluable sets are finite unions of subintervals plus finitely many isolated
points.  Endpoint inclusion is tracked exactly: constant-density pieces of a
measure never see endpoints, but Dirac atoms do, so ``[0, b]`` and
``(0, b]`` must stay distinct.  The family is closed under preimages of
affine maps, which is what makes exact set-evaluation of invariant measures
possible.

Sets are kept in a canonical form (intervals sorted and maximal, degenerate
intervals collapsed to points, points at an interval boundary absorbed by
closing the endpoint flag).  Canonical form is unique for a given point set,
so equality is structural and sets can be memoized.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

__all__ = ["Interval", "Span", "QuerySet", "AffineMap",
           "preimage", "image", "estimate_lipschitz"]

_EDGE_TOL = 1e-12  # slack for containment checks on constructor input


@dataclass(frozen=True)
class Interval:
    """Subinterval of [0, 1] given by its endpoints.

    Endpoint membership is not part of this type; it only matters for sets
    that atoms are tested against, which is QuerySet's job.
    """
    lo: float
    hi: float

    def __post_init__(self):
        if not (-_EDGE_TOL <= self.lo <= self.hi <= 1.0 + _EDGE_TOL):
            raise ValueError(f"invalid interval [{self.lo!r}, {self.hi!r}]")

    @property
    def length(self) -> float:
        return self.hi - self.lo


@dataclass(frozen=True)
class Span:
    """Interval with endpoint-inclusion flags; building block of QuerySet."""
    lo: float
    hi: float
    lo_incl: bool = True
    hi_incl: bool = True

    def contains(self, t: float) -> bool:
        if self.lo < t < self.hi:
            return True
        if t == self.lo and self.lo_incl:
            return True
        if t == self.hi and self.hi_incl:
            return True
        return False

    @property
    def length(self) -> float:
        return self.hi - self.lo


def _merge_spans(spans):
    out = []
    for s in spans:
        if out:
            p = out[-1]
            touches = s.lo == p.hi and (s.lo_incl or p.hi_incl)
            if s.lo < p.hi or touches:
                if s.lo == p.lo:
                    lo_incl = p.lo_incl or s.lo_incl
                else:
                    lo_incl = p.lo_incl
                if s.hi > p.hi:
                    hi, hi_incl = s.hi, s.hi_incl
                elif s.hi < p.hi:
                    hi, hi_incl = p.hi, p.hi_incl
                else:
                    hi, hi_incl = p.hi, p.hi_incl or s.hi_incl
                out[-1] = Span(p.lo, hi, lo_incl, hi_incl)
                continue
        out.append(s)
    return out


def _absorb_atoms(spans, atoms):
    spans = list(spans)
    kept = []
    for a in atoms:
        absorbed = False
        for i, s in enumerate(spans):
            if s.lo < a < s.hi:
                absorbed = True
                break
            if a == s.lo:
                if not s.lo_incl:
                    spans[i] = Span(s.lo, s.hi, True, s.hi_incl)
                absorbed = True
                break
            if a == s.hi:
                if not s.hi_incl:
                    spans[i] = Span(s.lo, s.hi, s.lo_incl, True)
                absorbed = True
                break
        if not absorbed:
            kept.append(a)
    return spans, kept


def _canonicalize(raw_spans, raw_atoms):
    spans = []
    atoms = []
    for s in raw_spans:
        if not (0.0 <= s.lo <= 1.0 and 0.0 <= s.hi <= 1.0):
            raise ValueError(f"span outside [0, 1]: {s}")
        if s.lo > s.hi:
            raise ValueError(f"span with lo > hi: {s}")
        if s.lo == s.hi:
            if s.lo_incl and s.hi_incl:
                atoms.append(s.lo)
            continue  # half-open degenerate span is empty
        spans.append(s)
    for a in raw_atoms:
        if not (0.0 <= a <= 1.0):
            raise ValueError(f"point outside [0, 1]: {a!r}")
        atoms.append(a)
    atoms = sorted(set(atoms))
    spans.sort(key=lambda s: (s.lo, not s.lo_incl, s.hi))
    # closing a flag can create a new mergeable touch, so iterate to fixpoint
    while True:
        merged = _merge_spans(spans)
        merged, kept = _absorb_atoms(merged, atoms)
        if merged == spans and kept == atoms:
            return tuple(spans), tuple(atoms)
        spans, atoms = merged, kept


class QuerySet:
    """Canonical finite union of flagged intervals and isolated points."""

    __slots__ = ("spans", "atoms")

    def __init__(self, intervals=(), atoms=()):
        raw = []
        for item in intervals:
            if isinstance(item, Span):
                raw.append(item)
            elif isinstance(item, Interval):
                raw.append(Span(float(item.lo), float(item.hi)))
            else:
                t = tuple(item)
                if len(t) == 2:
                    raw.append(Span(float(t[0]), float(t[1])))
                elif len(t) == 4:
                    raw.append(Span(float(t[0]), float(t[1]), bool(t[2]), bool(t[3])))
                else:
                    raise ValueError(f"cannot interpret interval spec {item!r}")
        spans, pts = _canonicalize(raw, [float(a) for a in atoms])
        object.__setattr__(self, "spans", spans)
        object.__setattr__(self, "atoms", pts)

    def __setattr__(self, name, value):
        raise AttributeError("QuerySet is immutable")

    # -- constructors -------------------------------------------------

    @classmethod
    def empty(cls) -> "QuerySet":
        return cls()

    @classmethod
    def unit(cls) -> "QuerySet":
        return cls(intervals=[(0.0, 1.0)])

    @classmethod
    def closed(cls, lo: float, hi: float) -> "QuerySet":
        return cls(intervals=[(lo, hi)])

    @classmethod
    def open(cls, lo: float, hi: float) -> "QuerySet":
        return cls(intervals=[(lo, hi, False, False)])

    @classmethod
    def point(cls, t: float) -> "QuerySet":
        return cls(atoms=[t])

    # -- queries ------------------------------------------------------

    @property
    def is_empty(self) -> bool:
        return not self.spans and not self.atoms

    def contains(self, t: float) -> bool:
        return any(s.contains(t) for s in self.spans) or t in self.atoms

    def membership(self, ts) -> np.ndarray:
        """Vectorized containment test for an array of points."""
        ts = np.asarray(ts, dtype=float)
        mask = np.zeros(ts.shape, dtype=bool)
        for s in self.spans:
            inside = (ts > s.lo) & (ts < s.hi)
            if s.lo_incl:
                inside |= ts == s.lo
            if s.hi_incl:
                inside |= ts == s.hi
            mask |= inside
        if self.atoms:
            mask |= np.isin(ts, np.asarray(self.atoms))
        return mask

    def length(self) -> float:
        return float(sum(s.length for s in self.spans))

    # -- algebra ------------------------------------------------------

    def union(self, other: "QuerySet") -> "QuerySet":
        return QuerySet(self.spans + other.spans, self.atoms + other.atoms)

    def intersect(self, other: "QuerySet") -> "QuerySet":
        spans = []
        atoms = []
        for a in self.spans:
            for b in other.spans:
                lo = max(a.lo, b.lo)
                hi = min(a.hi, b.hi)
                if lo > hi:
                    continue
                lo_incl = a.contains(lo) and b.contains(lo)
                hi_incl = a.contains(hi) and b.contains(hi)
                if lo == hi:
                    if lo_incl:
                        atoms.append(lo)
                else:
                    spans.append(Span(lo, hi, lo_incl, hi_incl))
        atoms.extend(t for t in self.atoms if other.contains(t))
        atoms.extend(t for t in other.atoms if self.contains(t))
        return QuerySet(spans, atoms)

    # -- identity -----------------------------------------------------

    def _key(self):
        return (self.spans, self.atoms)

    def __eq__(self, other):
        return isinstance(other, QuerySet) and self._key() == other._key()

    def __hash__(self):
        return hash(self._key())

    def __repr__(self):
        parts = []
        for s in self.spans:
            parts.append(f"{'[' if s.lo_incl else '('}{s.lo:g}, {s.hi:g}{']' if s.hi_incl else ')'}")
        parts.extend(f"{{{a:g}}}" for a in self.atoms)
        return "QuerySet(" + " u ".join(parts) + ")" if parts else "QuerySet(empty)"

    # -- serialization ------------------------------------------------

    def to_dict(self) -> dict:
        return {
            "intervals": [[s.lo, s.hi, s.lo_incl, s.hi_incl] for s in self.spans],
            "atoms": list(self.atoms),
        }

    @classmethod
    def from_dict(cls, d: dict) -> "QuerySet":
        return cls(intervals=d.get("intervals", ()), atoms=d.get("atoms", ()))


@dataclass(frozen=True)
class AffineMap:
    """Affine self-map t -> slope*t + offset of [0, 1]."""
    slope: float
    offset: float

    def __post_init__(self):
        ends = (self.offset, self.slope + self.offset)
        if not all(-_EDGE_TOL <= v <= 1.0 + _EDGE_TOL for v in ends):
            raise ValueError(f"map does not send [0, 1] into itself: {self}")

    def __call__(self, t: float) -> float:
        return self.slope * t + self.offset

    @property
    def lipschitz(self) -> float:
        return abs(self.slope)


def image(m: AffineMap, iv: Interval) -> Interval:
    """Forward image of an interval; exact affine endpoint arithmetic."""
    y0 = m.slope * iv.lo + m.offset
    y1 = m.slope * iv.hi + m.offset
    lo, hi = (y0, y1) if y0 <= y1 else (y1, y0)
    return Interval(min(max(lo, 0.0), 1.0), min(max(hi, 0.0), 1.0))


def preimage(m: AffineMap, B: QuerySet) -> QuerySet:
    """Preimage of an evaluable set under an affine map, clipped to [0, 1].

    For slope 0 the map is constant, so the preimage is all of [0, 1] or
    empty depending on whether the constant value lies in the set.
    Endpoints that the clipping moves strictly inward become included (the
    clipped-away part was interior to the unclipped preimage).
    """
    s, o = m.slope, m.offset
    if s == 0.0:
        return QuerySet.unit() if B.contains(o) else QuerySet.empty()
    spans = []
    atoms = []
    for sp in B.spans:
        a = (sp.lo - o) / s
        b = (sp.hi - o) / s
        li, hi_ = sp.lo_incl, sp.hi_incl
        if s < 0:
            a, b, li, hi_ = b, a, hi_, li
        if b < 0.0 or a > 1.0:
            continue
        if a < 0.0:
            a, li = 0.0, True
        if b > 1.0:
            b, hi_ = 1.0, True
        if a == b:
            if li and hi_:
                atoms.append(a)
        else:
            spans.append(Span(a, b, li, hi_))
    for t in B.atoms:
        x = (t - o) / s
        if 0.0 <= x <= 1.0:
            atoms.append(x)
    return QuerySet(spans, atoms)


def estimate_lipschitz(f, grid_size: int = 1000) -> float:
    """Largest difference quotient of ``f`` over an equispaced grid.

    A certified lower bound on the Lipschitz constant; for smooth functions
    on [0, 1] it converges to the true constant as the grid refines.
    """
    if grid_size < 2:
        raise ValueError("grid_size must be at least 2")
    ts = np.linspace(0.0, 1.0, grid_size)
    vals = np.stack([np.atleast_1d(np.asarray(f(t))) for t in ts])
    diff = vals[:, None, :] - vals[None, :, :]
    num = np.sqrt((np.abs(diff) ** 2).sum(axis=-1))
    den = np.abs(ts[:, None] - ts[None, :])
    mask = den > 0
    return float((num[mask] / den[mask]).max())
