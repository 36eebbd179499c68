"""Transfer operators averaged over a continuum of contractions.

Instead of finitely many maps, a family indexed by theta in [0, inf) acts
through operators R_theta = exp(theta * A) with a declared decay rate
(||R_theta|| <= exp(-rho * theta)) and maps whose contraction profile
a(theta) shrinks as theta grows.  Pairings against the transferred measure
become weighted improper integrals, evaluated by truncating the exponential
tail and integrating adaptively.

Two closed-form fixed points are provided: the single-constant-target
family (every map collapses to one point, the fixed point is the base plus
one atom) and the countable-series construction, where the dual operator
acts only on total masses through powers of a fixed matrix and the fixed
point is a convergent series of atoms.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np

from ._quadrature import adaptive_gauss
from .exceptions import DimensionMismatch
from .hilbert import matrix_exp, operator_norm, scalar_product
from .integral import ContinuousFunction, integrate
from .measure import VectorMeasure, combine

__all__ = ["ExponentialFamily", "ThetaMaps", "hc_quadrature",
           "constant_map_transfer", "exp_decay_fixed_point",
           "transfer_residual", "countable_series_fixed_point",
           "countable_series_residual"]

_DECAY_SLACK = 1e-10


@dataclass(frozen=True)
class ExponentialFamily:
    """Operator family R_theta = exp(theta * generator) with declared decay.

    ``decay_rate`` rho asserts ||R_theta|| <= exp(-rho * theta); the claim
    is sampled defensively wherever the family is integrated.  For a scalar
    generator -rate * I the bound is exact and ``scalar_rate`` short-cuts
    the matrix exponential.
    """
    generator: np.ndarray
    decay_rate: float
    scalar_rate: Optional[float] = None

    def __post_init__(self):
        g = np.asarray(self.generator)
        if g.ndim != 2 or g.shape[0] != g.shape[1]:
            raise DimensionMismatch(f"generator of shape {g.shape} is not square")
        if self.decay_rate <= 0:
            raise ValueError("decay_rate must be positive")
        gg = g.copy()
        gg.setflags(write=False)
        object.__setattr__(self, "generator", gg)

    @classmethod
    def scalar(cls, rate: float, dim: int) -> "ExponentialFamily":
        return cls(-rate * np.eye(dim), decay_rate=rate, scalar_rate=rate)

    @property
    def dim(self) -> int:
        return self.generator.shape[0]

    def operator(self, theta: float) -> np.ndarray:
        if self.scalar_rate is not None:
            return np.exp(-self.scalar_rate * theta) * np.eye(self.dim)
        return matrix_exp(self.generator, theta)

    def check_decay(self, theta: float):
        if self.scalar_rate is not None:
            return
        nrm = operator_norm(self.operator(theta))
        bound = np.exp(-self.decay_rate * theta)
        if nrm > bound + _DECAY_SLACK:
            raise ValueError(
                f"declared decay violated: ||R({theta:g})|| = {nrm:.12g} "
                f"> exp(-rho theta) = {bound:.12g}")


@dataclass(frozen=True)
class ThetaMaps:
    """Map family omega_theta(t) = profile(theta) * u(t) with u Lipschitz.

    ``profile`` is the contraction amplitude a(theta); the default family
    uses u = identity and a(theta) = 1/(1 + theta).
    """
    u: Callable[[float], float]
    u_lip: float
    profile: Callable[[float], float]

    @classmethod
    def default(cls) -> "ThetaMaps":
        return cls(u=lambda t: t, u_lip=1.0, profile=lambda th: 1.0 / (1.0 + th))

    def __call__(self, theta: float, t: float) -> float:
        return self.profile(theta) * self.u(t)


def hc_quadrature(fam: ExponentialFamily, maps: ThetaMaps,
                  f: ContinuousFunction, t: float, tol: float = 1e-10) -> np.ndarray:
    """Dual transfer value H(f)(t) = integral_0^inf e^-theta f(omega_theta(t)) dtheta.

    Requires the unit-decay scalar family (generator -I): the exponential
    weight is then exactly the operator norm and the tail truncates at
    Theta with e^-Theta * sup||f|| <= tol/2; the finite part is integrated
    adaptively with the other half of the budget.
    """
    if fam.scalar_rate != 1.0:
        raise ValueError("hc_quadrature requires the unit-decay family "
                         "(generator -I, scalar rate 1)")
    if fam.dim != f.dim:
        raise DimensionMismatch(
            f"family dimension {fam.dim} differs from integrand dimension {f.dim}")
    sup = max(f.sup_bound, 1e-300)
    theta_max = max(1.0, np.log(2.0 * sup / tol))

    def integrand(theta):
        return np.exp(-theta) * f(maps(theta, t))

    return adaptive_gauss(integrand, 0.0, theta_max, tol / 2.0)


def constant_map_transfer(fam: ExponentialFamily, phi: Callable[[float], float],
                          nu: VectorMeasure, f: ContinuousFunction,
                          tol: float = 1e-10):
    """Pairing of f with the transfer of nu through constant maps.

    When every map omega_theta is constant at phi(theta), the transferred
    measure acts on f only through nu's total mass:

        integral f d(transfer nu)
            = integral_0^inf (f(phi(theta)), adjoint(R_theta)(nu total)) dtheta.

    The declared decay rate truncates the tail; the decay claim is checked
    at every quadrature node for non-scalar generators.
    """
    if fam.dim != f.dim or nu.dim != f.dim:
        raise DimensionMismatch("family, measure, and integrand dimensions differ")
    tot = nu.total()
    tnorm = float(np.linalg.norm(tot))
    if tnorm == 0.0:
        return 0.0
    rho = fam.decay_rate
    sup = max(f.sup_bound, 1e-300)
    theta_max = max(1.0, np.log(2.0 * sup * tnorm / (rho * tol)) / rho)
    adj_gen = fam.generator.conj().T

    def integrand(theta):
        if fam.scalar_rate is not None:
            weighted = np.exp(-fam.scalar_rate * theta) * tot
        else:
            fam.check_decay(theta)
            weighted = matrix_exp(adj_gen, theta) @ tot
        return scalar_product(f(phi(theta)), weighted)

    return adaptive_gauss(integrand, 0.0, theta_max, tol / 2.0)


def exp_decay_fixed_point(rate: float, target: float, base: VectorMeasure,
                          ball_radius: Optional[float] = None,
                          tol: float = 1e-12,
                          verify: bool = True) -> VectorMeasure:
    """Fixed point of the decaying constant-target transfer plus base.

    With family R_theta = exp(-rate * theta) I, all maps constant at
    ``target``, and the operator nu -> transfer(nu) + base, the fixed point
    is the base plus a single atom at the target:

        mu* = base + dirac(target) * total(base) / (rate - 1),

    because the transfer of any measure collapses to an atom at the target
    carrying total/rate, and repeated transfers sum a geometric series.
    Requires rate > 1.  If ``ball_radius`` is given, the precondition
    ||base|| <= ball_radius * (1 - 1/rate) is enforced (the radius on which
    the operator is a self-map).  With ``verify`` the result is checked by
    quadrature residual on a small family of polynomial integrands.
    """
    if rate <= 1.0:
        raise ValueError("rate must exceed 1 for the transfer to contract")
    if ball_radius is not None:
        if base.variation_norm() > ball_radius * (1.0 - 1.0 / rate) + 1e-12:
            raise ValueError(
                "base variation exceeds ball_radius * (1 - 1/rate); the "
                "operator is not a self-map of the declared ball")
    tot = base.total()
    mu = combine(1.0, base, 1.0,
                 VectorMeasure.dirac(target, tot / (rate - 1.0)))
    if verify:
        res = transfer_residual(rate, target, base, mu, tol=tol)
        if res > 1e-9:
            raise ArithmeticError(
                f"closed-form fixed point failed residual check: {res:g}")
    return mu


def transfer_residual(rate: float, target: float, base: VectorMeasure,
                      mu: VectorMeasure, tol: float = 1e-12) -> float:
    """max_k |integral f_k d(transfer(mu) + base) - integral f_k dmu| over
    polynomial test integrands t^p e_j, p <= 3."""
    fam = ExponentialFamily.scalar(rate, base.dim)
    worst = 0.0
    for p in range(4):
        for j in range(base.dim):
            ej = np.zeros(base.dim)
            ej[j] = 1.0
            f = ContinuousFunction(
                lambda t, _p=p, _e=ej: (t ** _p) * _e, dim=base.dim,
                sup_bound=1.0, lip_bound=float(max(p, 1)))
            lhs = (constant_map_transfer(fam, lambda th: target, mu, f, tol=tol)
                   + integrate(f, base, tol=tol))
            rhs = integrate(f, mu, tol=tol)
            worst = max(worst, abs(lhs - rhs))
    return worst


def _series_depth(p_norm: float, prefactor: float, tol: float) -> int:
    """Smallest K with a certified series tail below tol.

    The tail sum_{i > K} ||P||^i / i! is at most the first term times the
    geometric factor 1/(1 - ||P||/(K+2)); the prefactor carries the fixed
    norms and the residual inflation max(e, e^||P||).
    """
    K = 1
    term = p_norm * p_norm / 2.0  # ||P||^(K+1) / (K+1)!
    while True:
        if p_norm < K + 2:
            geo = 1.0 / (1.0 - p_norm / (K + 2))
            if term * geo * prefactor <= tol:
                return K
        K += 1
        term *= p_norm / (K + 1)
        if K > 400:
            raise ValueError("series depth not reachable; check ||P|| and tol")


def countable_series_fixed_point(P, points, base: VectorMeasure,
                                 tol: float = 1e-10) -> VectorMeasure:
    """Fixed point of the countable constant-target transfer family.

    The i-th branch sends everything to the point points[i-1] through the
    operator -(1/i!) P^i applied to total masses; adding the base, the
    fixed point has total s = exp(-P) (base total) and atoms

        mu* = base + sum_{i >= 1} dirac(points[i-1]) * (-(1/i!) P^i s),

    truncated at a depth K whose certified tail (including the residual
    inflation of the truncated dual) is below tol.  Needs at least K
    distinct points; raises ValueError otherwise.
    """
    P = np.asarray(P, dtype=float if not np.iscomplexobj(P) else complex)
    n = base.dim
    if P.shape != (n, n):
        raise DimensionMismatch(
            f"operator shape {P.shape} does not match base dimension {n}")
    p_norm = operator_norm(P)
    exp_neg = matrix_exp(P, -1.0)
    s = exp_neg @ base.total()
    prefactor = (max(np.e, np.exp(p_norm)) * operator_norm(exp_neg)
                 * float(np.linalg.norm(base.total())))
    if prefactor == 0.0:
        return base
    K = _series_depth(p_norm, prefactor, tol)
    pts = [float(t) for t in points]
    if len(set(pts)) != len(pts):
        raise ValueError("atom points must be distinct")
    if len(pts) < K:
        raise ValueError(
            f"need at least {K} points for tolerance {tol:g}, got {len(pts)}")
    atoms = []
    term = s  # P^i s / i! built incrementally
    for i in range(1, K + 1):
        term = (P @ term) / i
        atoms.append((pts[i - 1], -term))
    return combine(1.0, base, 1.0, VectorMeasure(atoms=atoms, dim=n))


def countable_series_residual(P, points, base: VectorMeasure,
                              mu: VectorMeasure) -> float:
    """Variation norm of (transfer(mu) + base) - mu, with the transfer
    truncated at the available points."""
    P = np.asarray(P)
    n = base.dim
    tot = mu.total()
    atoms = []
    term = tot  # P^i (mu total) / i! built incrementally
    for i, t in enumerate(points, start=1):
        term = (P @ term) / i
        if float(np.linalg.norm(term)) < 1e-300:
            break
        atoms.append((float(t), -term))
    image = combine(1.0, base, 1.0, VectorMeasure(atoms=atoms, dim=n))
    return (image - mu).variation_norm()
