import os
import sys

import numpy as np
import pytest
from scipy.spatial.transform import Rotation

sys.path.insert(0, os.path.dirname(os.path.dirname(os.path.abspath(__file__))))

from analytic import TALLY  # noqa: E402
from mesh import SurfaceMesh, classify_pair, local_linear_coeffs  # noqa: E402
from quadrature import Kernel, RegularizedIntegrand, oracle_pair_batch  # noqa: E402


# unit right triangle in z=0 and its neighbours
TAU = ((0.0, 0.0, 0.0), (1.0, 0.0, 0.0), (1.0, 1.0, 0.0))
SIGMA_EDGE = ((0.0, 0.0, 0.0), (1.0, 0.0, 0.0), (1.0, 0.0, 1.0))
SIGMA_EDGE_COPLANAR = ((0.0, 0.0, 0.0), (1.0, 0.0, 0.0), (1.0, -1.0, 0.0))
SIGMA_VERTEX = ((0.0, 0.0, 0.0), (-1.0, 0.0, 1.0), (-1.0, -1.0, 1.0))
SIGMA_VERTEX_COPLANAR = ((0.0, 0.0, 0.0), (-1.0, 0.0, 0.0), (-1.0, -1.0, 0.0))
SIGMA_FAR = ((0.2, 0.1, 5.0), (1.2, 0.1, 5.5), (0.2, 1.1, 5.0))


class PairGeometry(object):
    """
    A (sigma, tau) pair as a two triangle mesh with the canonical vectors
    the assemblers pass to the pair integrators.
    """

    def __init__(self, sigma, tau):
        points, triangles = [], []
        for triangle in (sigma, tau):
            indices = []
            for corner in triangle:
                corner = np.asarray(corner, dtype=float)
                # moved copies of a shared corner may differ in the last bit
                match = [k for k, point in enumerate(points)
                         if np.allclose(point, corner, rtol=0, atol=1e-12)]
                if not match:
                    points.append(corner)
                    match = [len(points) - 1]
                indices.append(match[0])
            triangles.append(indices)

        self.mesh = SurfaceMesh(points, triangles, validate=False)
        self.classification = classify_pair(self.mesh, 0, 1)
        self.S = self.mesh.corners(0, self.classification.sigma_order)
        self.T = self.mesh.corners(1, self.classification.tau_order)

    @property
    def grams(self):
        return self.mesh.grams[0], self.mesh.grams[1]

    @property
    def normal(self):
        return self.classification.tau_normal

    @property
    def nodal_coeffs(self):
        """ Trial coefficients of the three nodal basis functions of tau. """
        return np.array([local_linear_coeffs(e, self.classification.tau_order)
                         for e in np.eye(3)])

    @property
    def edge_args(self):
        T, S = self.T, self.S
        return T[2] - T[1], T[1] - T[0], S[2] - S[1]

    @property
    def vertex_args(self):
        T, S = self.T, self.S
        return T[1] - T[0], T[2] - T[1], S[1] - S[0], S[2] - S[1]

    @property
    def far_args(self):
        T, S = self.T, self.S
        return T[0] - S[0], T[1] - T[0], T[2] - T[1], S[1] - S[0], S[2] - S[1]

    def integrand(self, kernel, coeffs=None):
        return RegularizedIntegrand.from_pair(self.mesh, self.classification, kernel, coeffs)


def rigid_motion(points, seed=7):
    rng = np.random.default_rng(seed)
    rotation = Rotation.from_euler('xyz', rng.uniform(-np.pi, np.pi, 3)).as_matrix()
    return np.asarray(points, dtype=float) @ rotation.T + rng.uniform(-3.0, 3.0, 3)


@pytest.fixture
def pair_geometry():
    return PairGeometry


@pytest.fixture(autouse=True)
def reset_tally():
    TALLY.reset()
    yield


def shape_quality(corners):
    """ 1 for an equilateral triangle, tending to 0 as it degenerates. """
    a, b, c = np.asarray(corners, dtype=float)
    twice_area = np.linalg.norm(np.cross(b - a, c - a))
    return 2.0 * np.sqrt(3.0) * twice_area / sum(np.dot(e, e) for e in (b - a, c - b, a - c))


def _random_frame(rng):
    rotation = Rotation.from_euler('xyz', rng.uniform(-np.pi, np.pi, 3)).as_matrix()
    return rotation, rng.uniform(-2.0, 2.0, 3), rng.uniform(0.3, 3.0)


def _place(rng, sigma, tau):
    rotation, shift, scale = _random_frame(rng)
    return [scale * np.asarray(t) @ rotation.T + shift for t in (sigma, tau)]


def _random_edge_pair(rng):
    # shared edge along x, tau apex in the half plane y > 0
    apex = np.array([rng.uniform(0.15, 0.85), rng.uniform(0.4, 1.2), 0.0])
    angle = rng.uniform(0.6, 2.0 * np.pi - 0.6)
    height = rng.uniform(0.4, 1.2)
    other = np.array([rng.uniform(0.15, 0.85), height * np.cos(angle), height * np.sin(angle)])
    return [(1.0, 0.0, 0.0), (0.0, 0.0, 0.0), other], [(0.0, 0.0, 0.0), (1.0, 0.0, 0.0), apex]


def _random_vertex_pair(rng):
    while True:
        tau = [np.zeros(3), rng.normal(size=3), rng.normal(size=3)]
        if shape_quality(tau) >= 0.3:
            break
    # every direction of sigma has a negative product with both tau edges
    while True:
        s1, s2 = rng.normal(size=(2, 3))
        if all(np.dot(s, t) < -0.2 * np.linalg.norm(s) * np.linalg.norm(t)
               for s in (s1, s2) for t in tau[1:]):
            return [np.zeros(3), s1, s2], tau


def _random_far_pair(rng):
    sigma, tau = rng.uniform(-1.0, 1.0, (2, 3, 3))
    radius = sum(np.max(np.linalg.norm(t - t.mean(axis=0), axis=1)) for t in (sigma, tau))
    direction = rng.normal(size=3)
    direction /= np.linalg.norm(direction)
    offset = tau.mean(axis=0) - sigma.mean(axis=0) + rng.uniform(2.0, 4.0) * radius * direction
    return list(sigma + offset), list(tau)


RANDOM_PAIRS = {'edge': _random_edge_pair, 'vertex': _random_vertex_pair, 'far': _random_far_pair}


def random_pairs(kind, count=200, seed=2024, min_quality=0.3):
    """
    Well shaped (sigma, tau) corner lists of one kind, randomly placed.

    :param kind: One of 'edge', 'vertex' and 'far'.
    :rtype: list
    """
    rng = np.random.default_rng(seed)
    pairs = []
    while len(pairs) < count:
        sigma, tau = RANDOM_PAIRS[kind](rng)
        if min(shape_quality(sigma), shape_quality(tau)) >= min_quality:
            pairs.append(_place(rng, sigma, tau))
    return pairs


def oracle_batch(pairs, kernel, order):
    """ oracle_pair_batch over PairGeometry objects of one case. """
    case = pairs[0].classification.case
    S = np.array([pair.S for pair in pairs])
    T = np.array([pair.T for pair in pairs])
    if kernel == Kernel.SLP:
        return oracle_pair_batch(case, kernel, S, T, order=order)
    return oracle_pair_batch(case, kernel, S, T, np.array([pair.normal for pair in pairs]),
                             np.array([pair.nodal_coeffs for pair in pairs]), order=order)
