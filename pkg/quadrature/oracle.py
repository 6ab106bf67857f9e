# -*- coding: utf-8 -*-

"""
Fully numerical reference integration of Galerkin pair integrals.

Every singular case is mapped to a smooth integrand on the unit cube
and integrated with tensor Gauss-Legendre rules:

- shared edge: five maps, weight eta1^3 eta2^2 (q(A1) + eta3 sum q(A2..A5))
- shared vertex: two maps, weight eta1^3 eta3
- disjoint: (eta1, eta1 eta2, eta3, eta3 eta4), weight eta1 eta3
- identical: SLP through the exact one dimensional reduction, DLP is zero

Map components are (x1, x2, y1, y2) with x on sigma and y on tau.
"""

import functools
import logging

import numpy as np

from mesh.pairs import PairCase
from mesh.surface import TriangleGeometry, triangle_geometry, local_linear_coeffs
from quadrature.gauss import gauss_legendre, QuadratureOrderError, UnsupportedCaseError

log = logging.getLogger(__name__)

MAX_ORACLE_ORDER = 32
FOUR_PI = 4.0 * np.pi

# cube points evaluated at once, bounds the temporaries of one pair
POINT_CHUNK = 1 << 18


class Kernel(object):
    """
    Laplace boundary integral kernels.
    """
    SLP = 'slp'
    DLP = 'dlp'

    ALL = (SLP, DLP)


def slp_kernel(x, y):
    """
    1/(4 pi |x - y|) for points with a trailing axis of length 3.

    :rtype: numpy.ndarray
    """
    d = x - y
    return 1.0 / (FOUR_PI * np.sqrt(np.einsum('...i,...i->...', d, d)))


def dlp_kernel(x, y, normal):
    """
    (x - y).n/(4 pi |x - y|^3) with n the normal at y.

    :rtype: numpy.ndarray
    """
    d = x - y
    r2 = np.einsum('...i,...i->...', d, d)
    return np.einsum('...i,...i->...', d, normal) / (FOUR_PI * r2 * np.sqrt(r2))


class RegularizedIntegrand(object):
    """
    The pair integrand q(x, y) = g_sigma g_tau k(chi_sigma(x), chi_tau(y)) phi(y).

    For the DLP kernel phi(chi_tau(y)) = a0 + a1 y1 + a2 y2 with one row
    of coefficients per trial function; the SLP kernel uses phi = 1.
    """

    def __init__(self, case, kernel, sigma, tau, tau_normal, coeffs=None):
        """
        Initialize the integrand.

        :param case: A PairCase constant.
        :type case: int
        :param kernel: Kernel.SLP or Kernel.DLP.
        :type kernel: str
        :param sigma: Geometry of the test triangle in canonical order.
        :type sigma: TriangleGeometry
        :param tau: Geometry of the trial triangle in canonical order.
        :type tau: TriangleGeometry
        :param tau_normal: Outward normal of tau in stored order.
        :type tau_normal: array_like
        :param coeffs: (a0, a1, a2) or rows of them, DLP only.
        :type coeffs: array_like
        """
        if kernel not in Kernel.ALL:
            raise UnsupportedCaseError('unknown kernel `%s`' % kernel)
        if case not in (PairCase.IDENTICAL, PairCase.SHARED_EDGE,
                        PairCase.SHARED_VERTEX, PairCase.DISJOINT):
            raise UnsupportedCaseError('unknown pair case %r' % case)

        self.case = case
        self.kernel = kernel
        self.sigma = sigma
        self.tau = tau
        self.tau_normal = np.asarray(tau_normal, dtype=float)

        if coeffs is None:
            coeffs = (1.0, 0.0, 0.0)
        coeffs = np.asarray(coeffs, dtype=float)
        self.scalar = coeffs.ndim == 1
        self.coeffs = np.atleast_2d(coeffs)

    @classmethod
    def from_pair(cls, mesh, classification, kernel, coeffs=None):
        """
        Build the integrand of a classified pair.

        For the DLP kernel without coefficients, the three nodal basis
        functions of tau (in stored vertex order) are used.

        :param mesh: The mesh.
        :type mesh: SurfaceMesh
        :param classification: The pair.
        :type classification: PairClassification
        :param kernel: Kernel.SLP or Kernel.DLP.
        :type kernel: str
        :param coeffs: Optional trial coefficients.
        :rtype: RegularizedIntegrand
        """
        sigma = triangle_geometry(mesh, classification.sigma, classification.sigma_order)
        tau = triangle_geometry(mesh, classification.tau, classification.tau_order)
        if kernel == Kernel.DLP and coeffs is None:
            coeffs = np.array([local_linear_coeffs(e, classification.tau_order)
                               for e in np.eye(3)])
        return cls(classification.case, kernel, sigma, tau, classification.tau_normal, coeffs)

    def evaluate(self, x_ref, y_ref):
        """
        Evaluate q at reference points.

        :param x_ref: (P, 2) reference coordinates on sigma.
        :param y_ref: (P, 2) reference coordinates on tau.
        :return: (rows, P) integrand values.
        :rtype: numpy.ndarray
        """
        x = self.sigma.point(x_ref[:, 0], x_ref[:, 1])
        y = self.tau.point(y_ref[:, 0], y_ref[:, 1])
        grams = self.sigma.gram * self.tau.gram

        if self.kernel == Kernel.SLP:
            return grams * slp_kernel(x, y)[None, :]

        phi = self.coeffs[:, :1] + self.coeffs[:, 1:2] * y_ref[:, 0] + self.coeffs[:, 2:3] * y_ref[:, 1]
        return grams * dlp_kernel(x, y, self.tau_normal)[None, :] * phi


def _edge_points(eta):
    e1, e2, e3, e4 = eta.T
    maps = (
        (1.0, e2 * e4, 1.0 - e2 * e3, e2 * (1.0 - e3)),
        (1.0, e2, 1.0 - e2 * e3 * e4, e2 * e3 * (1.0 - e4)),
        (1.0 - e2 * e3, e2 * (1.0 - e3), 1.0, e2 * e3 * e4),
        (1.0 - e2 * e3 * e4, e2 * e3 * (1.0 - e4), 1.0, e2),
        (1.0 - e2 * e3 * e4, e2 * (1.0 - e3 * e4), 1.0, e2 * e3),
    )
    base = e1 ** 3 * e2 ** 2
    weights = (base, base * e3, base * e3, base * e3, base * e3)
    for components, weight in zip(maps, weights):
        yield e1[:, None] * np.column_stack(np.broadcast_arrays(*components)), weight


def _vertex_points(eta):
    e1, e2, e3, e4 = eta.T
    one = np.ones_like(e1)
    maps = (
        (one, e2, e3, e3 * e4),
        (e3, e3 * e4, one, e2),
    )
    weight = e1 ** 3 * e3
    for components in maps:
        yield e1[:, None] * np.column_stack(components), weight


def _disjoint_points(eta):
    e1, e2, e3, e4 = eta.T
    yield np.column_stack([e1, e1 * e2, e3, e3 * e4]), e1 * e3


_CUBE_MAPS = {PairCase.SHARED_EDGE: _edge_points,
              PairCase.SHARED_VERTEX: _vertex_points,
              PairCase.DISJOINT: _disjoint_points}


def _check_oracle_order(order):
    if not isinstance(order, (int, np.integer)) or not 1 <= order <= MAX_ORACLE_ORDER:
        raise QuadratureOrderError('oracle order must be in 1..%s, got %r' % (MAX_ORACLE_ORDER, order))


@functools.lru_cache(maxsize=4)
def singular_rule(case, order):
    """
    All cube maps of a pair case merged into one rule on sigma x tau.

    :param case: PairCase.SHARED_EDGE, SHARED_VERTEX or DISJOINT.
    :type case: int
    :param order: Gauss-Legendre order per direction, 1..32.
    :type order: int
    :return: Read-only (P, 4) points (x1, x2, y1, y2) and their (P,)
    weights, map Jacobians included.
    :rtype: tuple
    """
    maps = _CUBE_MAPS.get(case)
    if maps is None:
        raise UnsupportedCaseError('no cube rule for pair case %r' % case)
    _check_oracle_order(order)

    eta, weights = gauss_legendre(int(order)).tensor(4)
    points, scaled = [], []
    for mapped, jacobian in maps(eta):
        points.append(mapped)
        scaled.append(weights * jacobian)
    points = np.concatenate(points)
    scaled = np.concatenate(scaled)
    points.setflags(write=False)
    scaled.setflags(write=False)
    return points, scaled


def _chunked(total):
    return [slice(start, start + POINT_CHUNK) for start in range(0, total, POINT_CHUNK)]


def duffy_triangle_rule(order):
    """
    Duffy rule on the reference triangle: points (eta1, eta1 eta2).

    :param order: Gauss-Legendre order per direction.
    :type order: int
    :return: (order^2, 2) points and their weights (summing to 1/2).
    :rtype: tuple
    """
    eta, weights = gauss_legendre(order).tensor(2)
    points = np.column_stack([eta[:, 0], eta[:, 0] * eta[:, 1]])
    return points, weights * eta[:, 0]


def _slp_identical_1d(geometry, order):
    v, w = geometry.v, geometry.w

    def integrand(nodes):
        eta = nodes[:, None]
        return (1.0 / np.linalg.norm(eta * v + w, axis=1) +
                1.0 / np.linalg.norm(eta * w + v, axis=1) +
                1.0 / np.linalg.norm(eta * (w + v) - w, axis=1))

    return geometry.gram ** 2 / (12.0 * np.pi) * gauss_legendre(order).integrate(integrand)


def oracle_pair_integral(integrand, order):
    """
    Reference value of a pair integral by tensor Gauss-Legendre quadrature.

    :param integrand: The regularised pair integrand.
    :type integrand: RegularizedIntegrand
    :param order: Gauss-Legendre order per direction, 1..32.
    :type order: int
    :return: The integral, or one value per coefficient row for DLP
    integrands built with several rows.
    :rtype: float | numpy.ndarray
    """
    _check_oracle_order(order)

    rows = len(integrand.coeffs)
    if integrand.case == PairCase.IDENTICAL:
        if integrand.kernel == Kernel.DLP:
            values = np.zeros(rows)
        else:
            values = np.array([_slp_identical_1d(integrand.tau, order)])
    else:
        points, weights = singular_rule(integrand.case, order)
        values = np.zeros(rows if integrand.kernel == Kernel.DLP else 1)
        for part in _chunked(len(weights)):
            q = integrand.evaluate(points[part, :2], points[part, 2:])
            values += q @ weights[part]

    if integrand.scalar or integrand.kernel == Kernel.SLP:
        return float(values[0])
    return values


def oracle_pair_batch(case, kernel, sigma, tau, tau_normals=None, coeffs=None, order=20):
    """
    Reference values of many pairs of one case.

    Corners are given in the canonical order of the case, so the
    reference maps of both triangles agree on the shared vertices. With
    x - y linear in (x1, x2, y1, y2), the distance vectors of a pair are
    a single (P, 4) x (4, 3) product.

    :param case: A PairCase constant.
    :type case: int
    :param kernel: Kernel.SLP or Kernel.DLP.
    :type kernel: str
    :param sigma: (B, 3, 3) test triangle corners.
    :type sigma: numpy.ndarray
    :param tau: (B, 3, 3) trial triangle corners.
    :type tau: numpy.ndarray
    :param tau_normals: (B, 3) normals of tau, DLP only.
    :type tau_normals: numpy.ndarray
    :param coeffs: (B, rows, 3) trial coefficients, DLP only.
    :type coeffs: numpy.ndarray
    :param order: Gauss-Legendre order per direction, 1..32.
    :type order: int
    :return: (B,) SLP values or (B, rows) DLP values.
    :rtype: numpy.ndarray
    """
    if kernel not in Kernel.ALL:
        raise UnsupportedCaseError('unknown kernel `%s`' % kernel)
    _check_oracle_order(order)

    sigma = np.asarray(sigma, dtype=float).reshape(-1, 3, 3)
    tau = np.asarray(tau, dtype=float).reshape(-1, 3, 3)
    count = len(sigma)
    frames = np.stack([sigma[:, 1] - sigma[:, 0], sigma[:, 2] - sigma[:, 1],
                       tau[:, 1] - tau[:, 0], tau[:, 2] - tau[:, 1]], axis=1)
    grams = (np.linalg.norm(np.cross(frames[:, 0], frames[:, 1]), axis=1) *
             np.linalg.norm(np.cross(frames[:, 2], frames[:, 3]), axis=1))

    if kernel == Kernel.DLP:
        tau_normals = np.asarray(tau_normals, dtype=float).reshape(count, 3)
        coeffs = np.asarray(coeffs, dtype=float).reshape(count, -1, 3)

    if case == PairCase.IDENTICAL:
        if kernel == Kernel.DLP:
            return np.zeros(coeffs.shape[:2])
        return np.array([_slp_identical_1d(TriangleGeometry(t[0], t[1] - t[0], t[2] - t[1]), order)
                         for t in tau])

    points, weights = singular_rule(case, order)
    # x - y = (sigma_1 - tau_1) + x1 v + x2 w - y1 v' - y2 w'
    frames = frames * np.array([1.0, 1.0, -1.0, -1.0])[None, :, None]
    offsets = sigma[:, 0] - tau[:, 0]
    parts = _chunked(len(weights))

    if kernel == Kernel.SLP:
        values = np.zeros(count)
        for b in range(count):
            for part in parts:
                d = points[part] @ frames[b] + offsets[b]
                values[b] += weights[part] @ (1.0 / np.sqrt(np.einsum('ij,ij->i', d, d)))
        return grams * values / FOUR_PI

    # moments of 1, y1, y2 against the weighted kernel
    moments = np.zeros((count, 3))
    for b in range(count):
        normal = tau_normals[b]
        slopes = frames[b] @ normal
        for part in parts:
            d = points[part] @ frames[b] + offsets[b]
            r2 = np.einsum('ij,ij->i', d, d)
            k = weights[part] * (points[part] @ slopes + offsets[b] @ normal) / (r2 * np.sqrt(r2))
            moments[b] += (k.sum(), k @ points[part, 2], k @ points[part, 3])
    return grams[:, None] * np.einsum('brc,bc->br', coeffs, moments) / FOUR_PI


def oracle_certificate(integrand, order, step=4):
    """
    Self-convergence certificate of the oracle.

    :param integrand: The regularised pair integrand.
    :type integrand: RegularizedIntegrand
    :param order: The lower order.
    :type order: int
    :param step: Order increment.
    :type step: int
    :return: The value at order + step and its distance to the value at order.
    :rtype: tuple
    """
    low = oracle_pair_integral(integrand, order)
    high = oracle_pair_integral(integrand, order + step)
    difference = np.max(np.abs(np.asarray(high) - np.asarray(low)))
    log.debug('oracle certificate order %s->%s: diff=%.3e' % (order, order + step, difference))
    return high, float(difference)
