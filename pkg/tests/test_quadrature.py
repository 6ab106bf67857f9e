import numpy as np
import pytest

import quadrature.oracle
from conftest import TAU, SIGMA_EDGE, SIGMA_VERTEX, SIGMA_FAR, rigid_motion
from mesh import SurfaceMesh, PairCase, triangle_geometry
from quadrature import (QuadratureOrderError, UnsupportedCaseError, Kernel, RegularizedIntegrand,
                        gauss_legendre, split_rule, duffy_triangle_rule, oracle_pair_integral,
                        oracle_certificate, oracle_pair_batch, singular_rule)


def test_gauss_legendre_midpoint():
    rule = gauss_legendre(1)
    np.testing.assert_allclose(rule.nodes, [0.5], atol=1e-15)
    np.testing.assert_allclose(rule.weights, [1.0], atol=1e-15)


def test_gauss_legendre_two_points():
    rule = gauss_legendre(2)
    offset = 1.0 / np.sqrt(3.0) / 2.0
    np.testing.assert_allclose(rule.nodes, [0.5 - offset, 0.5 + offset], atol=1e-15)
    np.testing.assert_allclose(rule.weights, [0.5, 0.5], atol=1e-15)


@pytest.mark.parametrize('n', [1, 2, 5, 8, 16, 24, 32, 48, 64])
def test_gauss_legendre_matches_numpy(n):
    rule = gauss_legendre(n)
    nodes, weights = np.polynomial.legendre.leggauss(n)
    np.testing.assert_allclose(rule.nodes, (nodes + 1.0) / 2.0, rtol=0, atol=1e-14)
    np.testing.assert_allclose(rule.weights, weights / 2.0, rtol=0, atol=1e-14)
    assert abs(rule.weights.sum() - 1.0) < 1e-14
    assert np.all((rule.nodes > 0) & (rule.nodes < 1))
    assert np.all(rule.weights > 0)


@pytest.mark.parametrize('n', [1, 3, 5, 10])
def test_gauss_legendre_exactness_degree(n):
    rule = gauss_legendre(n)
    for k in range(2 * n):
        assert rule.integrate(lambda x: x ** k) == pytest.approx(1.0 / (k + 1), abs=1e-13)


def test_gauss_legendre_x9_with_five_points():
    assert abs(gauss_legendre(5).integrate(lambda x: x ** 9) - 0.1) < 1e-14


@pytest.mark.parametrize('n', [0, 65, -1, 2.5])
def test_gauss_legendre_rejects_order(n):
    with pytest.raises(QuadratureOrderError):
        gauss_legendre(n)


def test_split_rule_and_tensor():
    rule = split_rule(6, split=0.3)
    assert rule.order == 12
    assert rule.weights.sum() == pytest.approx(1.0, abs=1e-14)
    assert rule.integrate(lambda x: x ** 11) == pytest.approx(1.0 / 12.0, abs=1e-14)

    points, weights = gauss_legendre(4).tensor(3)
    assert points.shape == (64, 3)
    assert weights.sum() == pytest.approx(1.0, abs=1e-14)
    assert np.dot(weights, points[:, 0] * points[:, 1] ** 2 * points[:, 2] ** 3) == \
        pytest.approx(1.0 / 24.0, abs=1e-14)


def test_duffy_triangle_rule():
    points, weights = duffy_triangle_rule(8)
    assert np.all(points[:, 1] <= points[:, 0])
    assert weights.sum() == pytest.approx(0.5, abs=1e-14)
    # int over {0 < x2 < x1 < 1} of x1 x2 = 1/8
    assert np.dot(weights, points[:, 0] * points[:, 1]) == pytest.approx(0.125, abs=1e-14)


def test_identical_dlp_is_zero():
    mesh = SurfaceMesh(TAU, [(0, 1, 2)])
    geometry = triangle_geometry(mesh, 0)
    integrand = RegularizedIntegrand(PairCase.IDENTICAL, Kernel.DLP, geometry, geometry,
                                     mesh.normals[0], np.eye(3))
    np.testing.assert_array_equal(oracle_pair_integral(integrand, 8), np.zeros(3))


def test_identical_slp_is_the_one_dimensional_reduction():
    mesh = SurfaceMesh(TAU, [(0, 1, 2)])
    geometry = triangle_geometry(mesh, 0)
    integrand = RegularizedIntegrand(PairCase.IDENTICAL, Kernel.SLP, geometry, geometry,
                                     mesh.normals[0])
    exact = (2.0 + np.sqrt(2.0)) * np.log(1.0 + np.sqrt(2.0)) / (12.0 * np.pi)
    assert oracle_pair_integral(integrand, 20) == pytest.approx(exact, rel=1e-12)


def test_farfield_asymptotics(pair_geometry):
    side = np.sqrt(2.0)
    tau = ((0, 0, 0), (side, 0, 0), (side, side, 0))
    sigma = tuple((x, y, z + 100.0) for x, y, z in tau)
    pair = pair_geometry(sigma, tau)
    assert pair.classification.case == PairCase.DISJOINT
    value = oracle_pair_integral(pair.integrand(Kernel.SLP), 8)
    assert value == pytest.approx(1.0 / (4.0 * np.pi * 100.0), rel=1e-2)


@pytest.mark.parametrize('sigma, case', [
    (SIGMA_EDGE, PairCase.SHARED_EDGE),
    (SIGMA_VERTEX, PairCase.SHARED_VERTEX),
    (SIGMA_FAR, PairCase.DISJOINT),
])
def test_oracle_self_convergence(pair_geometry, sigma, case):
    pair = pair_geometry(sigma, TAU)
    assert pair.classification.case == case
    for kernel in Kernel.ALL:
        value, difference = oracle_certificate(pair.integrand(kernel), 16)
        assert difference <= 1e-9 * np.max(np.abs(value))


def test_oracle_error_decreases_with_order(pair_geometry):
    integrand = pair_geometry(SIGMA_EDGE, TAU).integrand(Kernel.SLP)
    reference = oracle_pair_integral(integrand, 24)
    errors = [abs(oracle_pair_integral(integrand, k) - reference) for k in (4, 8, 12)]
    assert errors[0] > errors[1] > errors[2]


def test_oracle_slp_is_symmetric(pair_geometry):
    forward = pair_geometry(SIGMA_EDGE, TAU)
    backward = pair_geometry(TAU, SIGMA_EDGE)
    value = oracle_pair_integral(forward.integrand(Kernel.SLP), 16)
    assert oracle_pair_integral(backward.integrand(Kernel.SLP), 16) == pytest.approx(value, rel=1e-10)


@pytest.mark.parametrize('sigma', [SIGMA_EDGE, SIGMA_VERTEX, SIGMA_FAR])
def test_oracle_invariances(pair_geometry, sigma):
    pair = pair_geometry(sigma, TAU)
    moved = pair_geometry(rigid_motion(sigma), rigid_motion(TAU))
    scaled = pair_geometry(2.0 * np.array(sigma), 2.0 * np.array(TAU))

    slp = oracle_pair_integral(pair.integrand(Kernel.SLP), 12)
    assert oracle_pair_integral(moved.integrand(Kernel.SLP), 12) == pytest.approx(slp, rel=1e-12)
    assert oracle_pair_integral(scaled.integrand(Kernel.SLP), 12) == pytest.approx(8.0 * slp, rel=1e-12)

    dlp = oracle_pair_integral(pair.integrand(Kernel.DLP), 12)
    np.testing.assert_allclose(oracle_pair_integral(moved.integrand(Kernel.DLP), 12), dlp,
                               rtol=1e-11, atol=1e-14)
    np.testing.assert_allclose(oracle_pair_integral(scaled.integrand(Kernel.DLP), 12), 4.0 * dlp,
                               rtol=1e-12, atol=1e-14)


def test_oracle_rejects_bad_input(pair_geometry):
    pair = pair_geometry(SIGMA_EDGE, TAU)
    with pytest.raises(QuadratureOrderError):
        oracle_pair_integral(pair.integrand(Kernel.SLP), 33)
    geometry = triangle_geometry(pair.mesh, 0)
    with pytest.raises(UnsupportedCaseError):
        RegularizedIntegrand(PairCase.SHARED_EDGE, 'helmholtz', geometry, geometry, [0, 0, 1])
    with pytest.raises(UnsupportedCaseError):
        RegularizedIntegrand(7, Kernel.SLP, geometry, geometry, [0, 0, 1])


@pytest.mark.parametrize('case', [PairCase.SHARED_EDGE, PairCase.SHARED_VERTEX, PairCase.DISJOINT])
def test_singular_rule_covers_both_reference_triangles(case):
    points, weights = singular_rule(case, 8)
    x1, x2, y1, y2 = points.T
    assert np.all((0.0 <= x2) & (x2 <= x1) & (x1 <= 1.0))
    assert np.all((0.0 <= y2) & (y2 <= y1) & (y1 <= 1.0))
    assert weights.sum() == pytest.approx(0.25, abs=1e-14)
    # int x1 = 1/3 and int y2 = 1/6 over {0 < x2 < x1 < 1}
    assert np.dot(weights, x1 * y2) == pytest.approx(1.0 / 18.0, abs=1e-14)
    assert not weights.flags.writeable
    assert singular_rule(case, 8)[0] is points


def test_singular_rule_rejects_bad_input():
    with pytest.raises(UnsupportedCaseError):
        singular_rule(PairCase.IDENTICAL, 8)
    with pytest.raises(QuadratureOrderError):
        singular_rule(PairCase.SHARED_EDGE, 0)


@pytest.mark.parametrize('sigma', [SIGMA_EDGE, SIGMA_VERTEX, SIGMA_FAR])
def test_oracle_pair_batch_matches_single_pairs(pair_geometry, sigma):
    pairs = [pair_geometry(sigma, TAU),
             pair_geometry(rigid_motion(sigma, seed=3), rigid_motion(TAU, seed=3)),
             pair_geometry(0.5 * np.array(sigma), 0.5 * np.array(TAU))]
    case = pairs[0].classification.case
    S = np.array([pair.S for pair in pairs])
    T = np.array([pair.T for pair in pairs])

    slp = oracle_pair_batch(case, Kernel.SLP, S, T, order=12)
    expected = [oracle_pair_integral(pair.integrand(Kernel.SLP), 12) for pair in pairs]
    np.testing.assert_allclose(slp, expected, rtol=1e-12)

    dlp = oracle_pair_batch(case, Kernel.DLP, S, T, np.array([pair.normal for pair in pairs]),
                            np.array([pair.nodal_coeffs for pair in pairs]), order=12)
    expected = np.array([oracle_pair_integral(pair.integrand(Kernel.DLP), 12) for pair in pairs])
    assert dlp.shape == (3, 3)
    np.testing.assert_allclose(dlp, expected, rtol=1e-11, atol=1e-14)


def test_oracle_pair_batch_identical_pairs():
    exact = (2.0 + np.sqrt(2.0)) * np.log(1.0 + np.sqrt(2.0)) / (12.0 * np.pi)
    corners = np.array([TAU, 2.0 * np.array(TAU)])
    np.testing.assert_allclose(oracle_pair_batch(PairCase.IDENTICAL, Kernel.SLP, corners, corners,
                                                 order=20),
                               [exact, 8.0 * exact], rtol=1e-12)
    dlp = oracle_pair_batch(PairCase.IDENTICAL, Kernel.DLP, corners, corners,
                            np.tile([0.0, 0.0, 1.0], (2, 1)), np.tile(np.eye(3), (2, 1, 1)), order=8)
    np.testing.assert_array_equal(dlp, np.zeros((2, 3)))


def test_oracle_does_not_depend_on_the_point_chunk(pair_geometry, monkeypatch):
    pair = pair_geometry(SIGMA_EDGE, TAU)
    whole = oracle_pair_integral(pair.integrand(Kernel.DLP), 10)
    batch = oracle_pair_batch(PairCase.SHARED_EDGE, Kernel.DLP, [pair.S], [pair.T], [pair.normal],
                              [pair.nodal_coeffs], order=10)
    monkeypatch.setattr(quadrature.oracle, 'POINT_CHUNK', 1000)
    np.testing.assert_allclose(oracle_pair_integral(pair.integrand(Kernel.DLP), 10), whole,
                               rtol=1e-13, atol=1e-16)
    np.testing.assert_allclose(oracle_pair_batch(PairCase.SHARED_EDGE, Kernel.DLP, [pair.S], [pair.T],
                                                 [pair.normal], [pair.nodal_coeffs], order=10),
                               batch, rtol=1e-13, atol=1e-16)
