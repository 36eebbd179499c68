"""Monge-Kantorovich-type norms of vector measures on [0, 1].

Two independent routes are implemented and cross-checked:

* ``mk_star_exact`` evaluates the Lipschitz-ball dual norm of a zero-total
  measure through a one-dimensional identity.  Writing F(t) = mu([0, t]),
  summation by parts turns sup { |integral f dmu| : Lip(f) <= 1 } into
  integral_0^1 ||F(t)|| dt: the optimal witness steers its (unit) derivative
  along F, which is piecewise affine for this representation, so each
  breakpoint panel integrates sqrt(quadratic) in closed form.
* ``mk_lower_bound`` maximizes |integral f dmu| directly by projected
  supergradient ascent over witness values at grid nodes.  Every reported
  value is certified feasible (the iterate is rescaled into the ball before
  evaluation), hence a true lower bound for either ball; it is the
  independent check on the closed form.

Balls: "l1" is the Lipschitz seminorm ball (zero-total measures only, the
pairing is otherwise unbounded); "bl1" is the bounded-Lipschitz ball
sup||f|| + Lip(f) <= 1, defined for every measure.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .measure import VectorMeasure

__all__ = ["mk_star_exact", "mk_lower_bound", "sandwich_check",
           "LipschitzWitness", "SandwichReport"]

_TOTAL_TOL = 1e-12


def _segment_norm_integral(f0: np.ndarray, rho: np.ndarray, h: float) -> float:
    """integral_0^h ||f0 + s*rho|| ds in closed form.

    With a = ||rho||^2, the integrand is sqrt(a w^2 + q) in the shifted
    variable w = s + b/(2a), where q >= 0 is the discriminant remainder;
    the antiderivative is G(w) = w sqrt(a w^2 + q)/2
    + q asinh(w sqrt(a/q)) / (2 sqrt(a)).  Evaluating G at the panel ends
    and subtracting loses all precision once the vertex sits far outside
    the panel (|b| >> a h, e.g. when the density is cancellation residue
    of overlapping pieces), so same-sign panels go through rationalized
    difference forms that stay accurate in that limit.
    """
    if h <= 0.0:
        return 0.0
    a = float(np.sum(np.abs(rho) ** 2))
    c = float(np.sum(np.abs(f0) ** 2))
    if a == 0.0 or np.sqrt(a) * h <= 1e-12 * np.sqrt(c):
        # flat, or the density moves F by a negligible fraction of ||f0||
        return float(np.linalg.norm(f0)) * h
    b = 2.0 * float(np.real(np.sum(f0 * np.conj(rho))))
    u = b / (2.0 * a)
    v = u + h
    q = max(c - b * b / (4.0 * a), 0.0)
    sqrt_a = np.sqrt(a)

    def g(w):
        return w * np.sqrt(a * w * w + q)

    if u < 0.0 < v:
        # vertex inside the panel: both halves contribute with the same
        # sign, the plain difference of antiderivatives is well posed
        first = 0.5 * (g(v) - g(u))
        if q <= 1e-300:
            return float(first)
        k = sqrt_a / np.sqrt(q)
        return float(first + q / (2.0 * sqrt_a)
                     * (np.arcsinh(k * v) - np.arcsinh(k * u)))
    # monotone panel: g(v) - g(u) = h (u+v) (a (u^2+v^2) + q) / (g(u)+g(v))
    # and asinh(y) - asinh(x) = asinh((y^2-x^2) / (y sqrt(1+x^2)
    # + x sqrt(1+y^2))), both cancellation-free for same-sign arguments
    first = 0.5 * h * (u + v) * (a * (u * u + v * v) + q) / (g(u) + g(v))
    if q <= 1e-300:
        return float(first)
    k = sqrt_a / np.sqrt(q)
    x, y = k * u, k * v
    arg = (k * k * h * (u + v)
           / (y * np.sqrt(1.0 + x * x) + x * np.sqrt(1.0 + y * y)))
    return float(first + q / (2.0 * sqrt_a) * np.arcsinh(arg))


def mk_star_exact(mu: VectorMeasure) -> float:
    """Lipschitz-ball dual norm of a zero-total measure, evaluated exactly.

    Requires ||mu([0, 1])|| <= 1e-12; raises ValueError otherwise, since the
    supremum over the unbounded ball is infinite for nonzero total.
    """
    tot = float(np.linalg.norm(mu.total()))
    if tot > _TOTAL_TOL:
        raise ValueError(
            f"defined only for zero-total measures (||total|| = {tot:g})")
    bps = mu.breakpoints()
    F = mu.cumulative_all(bps)  # value entering each panel from the left
    # density in force on each open panel (bps[j], bps[j+1])
    acc = 0.0
    zero = np.zeros(mu.dim, dtype=mu.atom_weights.dtype)
    piece_idx = 0
    for j in range(len(bps) - 1):
        a, b = bps[j], bps[j + 1]
        rho = zero
        while piece_idx < mu.n_pieces and mu.piece_hi[piece_idx] <= a:
            piece_idx += 1
        if (piece_idx < mu.n_pieces and mu.piece_lo[piece_idx] <= a
                and mu.piece_hi[piece_idx] >= b):
            rho = mu.piece_density[piece_idx]
        acc += _segment_norm_integral(F[j], rho, b - a)
    return acc


@dataclass(frozen=True)
class LipschitzWitness:
    """Piecewise-linear witness function: values at sorted grid nodes.

    The interpolant's Lipschitz constant equals the largest consecutive
    difference quotient and its sup norm the largest node value norm, so
    ball feasibility is checkable from the nodes alone.
    """
    points: np.ndarray
    values: np.ndarray
    ball: str

    def __call__(self, t: float) -> np.ndarray:
        out = np.empty(self.values.shape[1], dtype=self.values.dtype)
        if np.iscomplexobj(self.values):
            for k in range(self.values.shape[1]):
                out[k] = (np.interp(t, self.points, self.values[:, k].real)
                          + 1j * np.interp(t, self.points, self.values[:, k].imag))
        else:
            for k in range(self.values.shape[1]):
                out[k] = np.interp(t, self.points, self.values[:, k])
        return out

    def lipschitz(self) -> float:
        d = np.diff(self.values, axis=0)
        h = np.diff(self.points)
        if len(h) == 0:
            return 0.0
        return float((np.sqrt(np.sum(np.abs(d) ** 2, axis=1)) / h).max())

    def sup_norm(self) -> float:
        return float(np.sqrt(np.sum(np.abs(self.values) ** 2, axis=1)).max())

    def is_feasible(self, tol: float = 1e-9) -> bool:
        if self.ball == "l1":
            return self.lipschitz() <= 1.0 + tol
        return self.sup_norm() + self.lipschitz() <= 1.0 + tol

    def pairing(self, mu: VectorMeasure):
        """Exact integral of the interpolant against a measure."""
        out = 0.0
        for t, w in zip(mu.atom_points, mu.atom_weights):
            out = out + np.sum(self(t) * np.conj(w))
        for lo, hi, dens in zip(mu.piece_lo, mu.piece_hi, mu.piece_density):
            # the interpolant is linear between grid cuts, so a trapezoid
            # per overlapped segment integrates it exactly
            cuts = np.unique(np.concatenate([[lo], np.clip(self.points, lo, hi), [hi]]))
            for s0, s1 in zip(cuts[:-1], cuts[1:]):
                if s1 <= s0:
                    continue
                avg = 0.5 * (self(s0) + self(s1))
                out = out + (s1 - s0) * np.sum(avg * np.conj(dens))
        return complex(out) if np.iscomplexobj(self.values) else float(out)


def _influence_vectors(mu: VectorMeasure, nodes: np.ndarray) -> np.ndarray:
    """g_k with integral f dmu = sum_k (f(node_k), g_k) for every f that is
    piecewise linear on the node grid (conjugation lives in the pairing)."""
    m = len(nodes)
    G = np.zeros((m, mu.dim), dtype=mu.atom_weights.dtype)
    if mu.n_atoms:
        idx = np.searchsorted(nodes, mu.atom_points)
        np.add.at(G, idx, mu.atom_weights)
    h = np.diff(nodes)
    for lo, hi, dens in zip(mu.piece_lo, mu.piece_hi, mu.piece_density):
        s0 = np.maximum(nodes[:-1], lo)
        s1 = np.minimum(nodes[1:], hi)
        ov = s1 > s0
        ks = np.flatnonzero(ov)
        for k in ks:
            hk = h[k]
            a_left = ((nodes[k + 1] - s0[k]) ** 2 - (nodes[k + 1] - s1[k]) ** 2) / (2 * hk)
            a_right = ((s1[k] - nodes[k]) ** 2 - (s0[k] - nodes[k]) ** 2) / (2 * hk)
            G[k] += a_left * dens
            G[k + 1] += a_right * dens
    return G


def _witness_from_increments(f0: np.ndarray, u: np.ndarray,
                             h: np.ndarray) -> np.ndarray:
    steps = u * h[:, None]
    return f0[None, :] + np.concatenate(
        [np.zeros((1, len(f0)), dtype=u.dtype), np.cumsum(steps, axis=0)])


def _midrange(F: np.ndarray) -> np.ndarray:
    if np.iscomplexobj(F):
        return (0.5 * (F.real.max(axis=0) + F.real.min(axis=0))
                + 0.5j * (F.imag.max(axis=0) + F.imag.min(axis=0)))
    return 0.5 * (F.max(axis=0) + F.min(axis=0))


def _certified_value(F: np.ndarray, h: np.ndarray, G: np.ndarray, ball: str):
    """Rescale the iterate into the ball, then evaluate the pairing.

    The scaled copy is always feasible, so the value is a true lower bound.
    For the bounded ball a midrange-recentered copy is also tried: shifting
    by a constant costs nothing against a zero-total measure but shrinks
    the sup norm, and the pairing re-evaluation keeps the bound honest for
    nonzero totals too.
    """
    d = np.diff(F, axis=0)
    dn = np.sqrt(np.sum(np.abs(d) ** 2, axis=1))
    q = float((dn / h).max()) if len(h) else 0.0
    if ball == "l1":
        Fc = F / max(q, 1.0)
        return float(abs(np.sum(Fc * np.conj(G)))), Fc
    best = None
    for cand in (F, F - _midrange(F)[None, :]):
        sup = float(np.sqrt(np.sum(np.abs(cand) ** 2, axis=1)).max())
        Fc = cand / max(sup + q, 1.0)
        val = float(abs(np.sum(Fc * np.conj(G))))
        if best is None or val > best[0]:
            best = (val, Fc)
    return best


def mk_lower_bound(mu: VectorMeasure, ball: str = "l1", grid: int = 200,
                   iters: int = 2000, step0: float = 0.25):
    """Certified lower bound for the Monge-Kantorovich pairing supremum.

    The witness is piecewise linear on (atom points united with an
    equispaced grid) and is driven by projected supergradient ascent with
    step step0/sqrt(k) from the zero witness.  The ascent runs in the
    increment domain f(node_{j+1}) - f(node_j) = h_j u_j, where the
    Lipschitz polytope factorizes into independent unit balls ||u_j|| <= 1
    and projection is exact per-segment clipping; for the "bl1" ball the
    coupled bound sup||f|| + Lip(f) <= 1 is maintained by radial
    retraction.  Each iterate is certified by rescaling into the ball
    before evaluating the pairing, so the reported value is a true lower
    bound regardless of convergence, and the best certified value wins.

    The routine never consults the exact route; it stops early only when
    the iterate is stationary (constant gradient fully clipped).
    """
    if ball not in ("l1", "bl1"):
        raise ValueError(f"unknown ball {ball!r}")
    if grid < 2:
        raise ValueError("grid must be at least 2")
    if ball == "l1":
        tot = float(np.linalg.norm(mu.total()))
        if tot > _TOTAL_TOL:
            raise ValueError(
                f"l1 ball requires zero total mass (||total|| = {tot:g})")
    nodes = np.unique(np.concatenate([np.linspace(0.0, 1.0, grid),
                                      mu.atom_points]))
    G = _influence_vectors(mu, nodes)
    h = np.diff(nodes)
    m = len(nodes)
    if float(np.linalg.norm(G)) == 0.0:
        return 0.0, LipschitzWitness(nodes, np.zeros_like(G), ball)
    # suffix sums: d(objective)/d(u_j) = h_j * sum_{k > j} g_k, and the
    # constant part moves with f0 (only effective for the bounded ball);
    # directions are normalized per segment so every independent ball
    # constraint saturates at the same rate
    csum = np.cumsum(G[::-1], axis=0)[::-1]
    grad_u = csum[1:].copy()
    gnorms = np.sqrt(np.sum(np.abs(grad_u) ** 2, axis=1))
    active = gnorms > 0
    grad_u[active] /= gnorms[active][:, None]
    grad_u[~active] = 0.0
    f0_norm = float(np.linalg.norm(csum[0]))
    grad_f0 = csum[0] / f0_norm if f0_norm > 0 else np.zeros(mu.dim, G.dtype)
    u = np.zeros((m - 1, mu.dim), dtype=G.dtype)
    f0 = np.zeros(mu.dim, dtype=G.dtype)
    best_val = 0.0
    best_F = np.zeros_like(G)
    prev_F = None
    for k in range(1, iters + 1):
        step = step0 / np.sqrt(k)
        u += step * grad_u
        if ball == "bl1":
            f0 += step * grad_f0
        norms = np.sqrt(np.sum(np.abs(u) ** 2, axis=1))
        over = norms > 1.0
        if over.any():
            u[over] /= norms[over][:, None]
        F = _witness_from_increments(f0, u, h)
        if ball == "bl1":
            # radial retraction onto sup + Lip <= 1, after recentering
            mid = _midrange(F)
            f0 = f0 - mid
            F = F - mid[None, :]
            sup = float(np.sqrt(np.sum(np.abs(F) ** 2, axis=1)).max())
            q = float(norms.clip(max=1.0).max()) if len(norms) else 0.0
            r = sup + q
            if r > 1.0:
                u /= r
                f0 /= r
                F /= r
        val, Fc = _certified_value(F, h, G, ball)
        if val > best_val:
            best_val, best_F = val, Fc.copy()
        if prev_F is not None and float(np.abs(F - prev_F).max()) < 1e-15:
            break
        prev_F = F
    return best_val, LipschitzWitness(nodes, best_F, ball)


@dataclass(frozen=True)
class SandwichReport:
    """Cross-check of the two norm routes against the variation norm."""
    mk_star: float
    bl1_lower: float
    variation: float
    estimator_gap: float
    lower_vs_star: bool
    star_vs_doubled_lower: bool
    lower_vs_variation: bool

    @property
    def ok(self) -> bool:
        return (self.lower_vs_star and self.star_vs_doubled_lower
                and self.lower_vs_variation)


def sandwich_check(mu: VectorMeasure, grid: int = 200, iters: int = 3000,
                   estimator_gap: float = 0.15) -> SandwichReport:
    """Verify the norm chain on a zero-total measure.

    The certified "bl1" lower bound must sit below the exact Lipschitz-ball
    norm and below the variation norm; conversely the exact norm is at most
    twice the true bounded-Lipschitz norm (unit diameter), so it must not
    exceed 2 * lower / (1 - declared estimator gap).
    """
    star = mk_star_exact(mu)
    lower, _ = mk_lower_bound(mu, ball="bl1", grid=grid, iters=iters)
    var = mu.variation_norm()
    return SandwichReport(
        mk_star=star,
        bl1_lower=lower,
        variation=var,
        estimator_gap=estimator_gap,
        lower_vs_star=lower <= star + 1e-9,
        star_vs_doubled_lower=star <= 2.0 * lower / (1.0 - estimator_gap) + 1e-9,
        lower_vs_variation=lower <= var + 1e-9,
    )
