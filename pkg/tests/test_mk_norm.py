"""Tests for the transport norms: exact formula, estimator, sandwich checks."""

import numpy as np
import pytest

from ifsmeasure import (LipschitzWitness, VectorMeasure, combine,
                        mk_lower_bound, mk_star_exact, sandwich_check)


def _dirac_pair(s, t, x):
    return combine(1.0, VectorMeasure.dirac(s, x), -1.0, VectorMeasure.dirac(t, x))


def _random_zero_mass(rng, dim=2, n_atoms=6, pieces=True):
    atoms = [(float(t), rng.standard_normal(dim))
             for t in rng.uniform(0, 1, n_atoms)]
    ps = []
    if pieces:
        ps = [((0.1, 0.55), rng.standard_normal(dim)),
              ((0.6, 0.9), rng.standard_normal(dim))]
    mu = VectorMeasure(atoms=atoms, pieces=ps, dim=dim)
    return combine(1.0, mu, -1.0, VectorMeasure.dirac(0.5, mu.total()))


def test_mk_star_requires_zero_total():
    with pytest.raises(ValueError):
        mk_star_exact(VectorMeasure.dirac(0.3, np.array([1.0])))


def test_mk_star_dirac_pair_formula():
    rng = np.random.default_rng(0)
    for _ in range(30):
        s, t = rng.uniform(0, 1, 2)
        x = rng.standard_normal(3)
        got = mk_star_exact(_dirac_pair(s, t, x))
        assert abs(got - abs(s - t) * np.linalg.norm(x)) < 1e-10


def test_mk_star_atom_minus_density():
    # mu = delta_0 - lambda: cumulative is 1 - t, integral of |1 - t| is 1/2
    mu = combine(1.0, VectorMeasure.dirac(0.0, np.array([1.0])),
                 -1.0, VectorMeasure.lebesgue(np.array([1.0])))
    assert mk_star_exact(mu) == pytest.approx(0.5, abs=1e-12)


def test_mk_star_matches_brute_force_quadrature():
    # midpoint rule on each smooth panel: the cumulative jumps at atoms,
    # so equispaced quadrature over the whole interval stalls at O(spacing)
    rng = np.random.default_rng(1)
    for _ in range(15):
        mu = _random_zero_mass(rng)
        bps = mu.breakpoints()
        brute = 0.0
        for a, b in zip(bps[:-1], bps[1:]):
            s = np.linspace(a, b, 2001)
            mid = 0.5 * (s[:-1] + s[1:])
            fm = mu.cumulative_all(mid)
            brute += np.sum(np.linalg.norm(fm, axis=1)) * (s[1] - s[0])
        assert mk_star_exact(mu) == pytest.approx(brute, abs=5e-6)


def test_mk_star_scales_linearly():
    rng = np.random.default_rng(2)
    mu = _random_zero_mass(rng)
    assert mk_star_exact(mu * 2.5) == pytest.approx(2.5 * mk_star_exact(mu),
                                                    abs=1e-12)


def test_witness_interpolation_and_constants():
    pts = np.array([0.0, 0.5, 1.0])
    vals = np.array([[0.0], [0.5], [0.25]])
    w = LipschitzWitness(points=pts, values=vals, ball="l1")
    assert w(0.25)[0] == pytest.approx(0.25)
    assert w(0.75)[0] == pytest.approx(0.375)
    assert w.lipschitz() == pytest.approx(1.0)
    assert w.sup_norm() == pytest.approx(0.5)
    assert w.is_feasible()


def test_witness_pairing_matches_direct_sum_for_atoms():
    rng = np.random.default_rng(3)
    pts = np.linspace(0, 1, 101)
    vals = rng.standard_normal((101, 2)) * 0.05
    w = LipschitzWitness(points=pts, values=vals, ball="l1")
    mu = VectorMeasure(atoms=[(float(t), rng.standard_normal(2))
                              for t in rng.uniform(0, 1, 8)])
    direct = sum(float(np.real(np.vdot(wt, w(float(t)))))
                 for t, wt in zip(mu.atom_points, mu.atom_weights))
    assert w.pairing(mu) == pytest.approx(direct, abs=1e-12)


def test_witness_pairing_of_density_piece():
    # f(t) = t against density 2 on [0, 1]: integral 2t dt = 1
    pts = np.array([0.0, 1.0])
    w = LipschitzWitness(points=pts, values=np.array([[0.0], [1.0]]),
                         ball="l1")
    mu = VectorMeasure.lebesgue(np.array([2.0]))
    assert w.pairing(mu) == pytest.approx(1.0, abs=1e-12)


def test_lower_bound_is_certified_and_tight_for_atoms():
    rng = np.random.default_rng(4)
    for _ in range(25):
        mu = _random_zero_mass(rng, dim=int(rng.integers(1, 4)),
                               n_atoms=int(rng.integers(2, 9)), pieces=False)
        star = mk_star_exact(mu)
        val, w = mk_lower_bound(mu, ball="l1", grid=200, iters=4000)
        assert val <= star + 1e-9
        assert val >= 0.98 * star
        assert w.is_feasible()
        assert w.pairing(mu) == pytest.approx(val, abs=1e-8)


def test_lower_bound_bl1_never_exceeds_l1():
    rng = np.random.default_rng(5)
    for _ in range(10):
        mu = _random_zero_mass(rng)
        l1, _ = mk_lower_bound(mu, ball="l1", grid=150, iters=1500)
        bl1, wb = mk_lower_bound(mu, ball="bl1", grid=150, iters=1500)
        assert bl1 <= l1 + 1e-9
        assert wb.sup_norm() + wb.lipschitz() <= 1.0 + 1e-9


def test_lower_bound_zero_measure():
    val, _ = mk_lower_bound(VectorMeasure.zero(2), ball="l1")
    assert val == 0.0


def test_sandwich_chain_on_random_measures():
    rng = np.random.default_rng(6)
    for _ in range(15):
        mu = _random_zero_mass(rng)
        rep = sandwich_check(mu, grid=150, iters=2000)
        assert rep.ok, rep
        assert rep.bl1_lower <= rep.mk_star + 1e-9
        assert rep.bl1_lower <= rep.variation + 1e-9


def test_sandwich_small_norm_measure():
    # tiny measures exercise the flat-ball regime of the estimator
    mu = _dirac_pair(0.49, 0.51, np.array([0.001, 0.002]))
    rep = sandwich_check(mu)
    assert rep.ok, rep
