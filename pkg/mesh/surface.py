# -*- coding: utf-8 -*-

"""
Surface meshes of flat triangles and their per-triangle geometry.

A triangle (p1, p2, p3) is parametrised over the reference triangle
{0 < x2 < x1 < 1} by

    chi(x1, x2) = p1 + x1 (p2 - p1) + x2 (p3 - p2)

so the Jacobian columns are v = p2 - p1 and w = p3 - p2 and the Gram
determinant is |v x w|, twice the triangle area.
"""

import logging

import numpy as np
from scipy.spatial import cKDTree

log = logging.getLogger(__name__)

# relative degeneracy threshold, gram < DEGENERATE_TOL * (longest edge)^2
DEGENERATE_TOL = 1e-12

# geometric coincidence threshold relative to the bounding box diagonal
COINCIDENCE_TOL = 1e-10

IDENTITY_ORDER = (0, 1, 2)


class MeshBaseError(Exception):
    """ Base mesh exception. """
    def __init__(self, message, element=None):
        if element is not None:
            message = '%s (element %s)' % (message, element)
        super(MeshBaseError, self).__init__(message)
        self.element = element


class MeshParseError(MeshBaseError):
    """ Raised when a mesh file is malformed. """
    pass


class MeshValidationError(MeshBaseError):
    """ Raised when a mesh violates a surface mesh invariant. """
    pass


def _check_order(order):
    if sorted(order) != [0, 1, 2]:
        raise MeshValidationError('invalid vertex permutation %s' % (order,))
    return tuple(int(k) for k in order)


class TriangleGeometry(object):
    """
    Reference map data of one triangle under a given vertex order.
    """
    __slots__ = ('_p', '_v', '_w', '_gram', '_normal')

    def __init__(self, p, v, w):
        self._p = np.asarray(p, dtype=float)
        self._v = np.asarray(v, dtype=float)
        self._w = np.asarray(w, dtype=float)

        cross = np.cross(self._v, self._w)
        self._gram = float(np.linalg.norm(cross))
        longest = max(np.dot(self._v, self._v), np.dot(self._w, self._w),
                      np.dot(self._v + self._w, self._v + self._w))
        if not self._gram > DEGENERATE_TOL * longest:
            raise MeshValidationError('degenerate triangle')
        self._normal = cross / self._gram

    @property
    def p(self):
        """
        The first vertex of the (permuted) triangle.

        :rtype: numpy.ndarray
        """
        return self._p

    @property
    def v(self):
        """
        The first Jacobian column, p2 - p1.

        :rtype: numpy.ndarray
        """
        return self._v

    @property
    def w(self):
        """
        The second Jacobian column, p3 - p2.

        :rtype: numpy.ndarray
        """
        return self._w

    @property
    def gram(self):
        """
        The Gram determinant sqrt(det(J^T J)).

        :rtype: float
        """
        return self._gram

    @property
    def area(self):
        return 0.5 * self._gram

    @property
    def normal(self):
        """
        Unit normal (v x w)/|v x w| of the permuted parametrisation.

        :rtype: numpy.ndarray
        """
        return self._normal

    def point(self, x1, x2):
        """
        Evaluate the reference map chi(x1, x2).

        :param x1: First reference coordinate(s).
        :param x2: Second reference coordinate(s).
        :return: Point(s) with a trailing axis of length 3.
        :rtype: numpy.ndarray
        """
        x1 = np.asarray(x1, dtype=float)[..., None]
        x2 = np.asarray(x2, dtype=float)[..., None]
        return self._p + x1 * self._v + x2 * self._w

    def __repr__(self):
        return 'TriangleGeometry(p=%s, v=%s, w=%s, gram=%r)' % \
               (self._p.tolist(), self._v.tolist(), self._w.tolist(), self._gram)


class SurfaceMesh(object):
    """
    Class representing a conforming, consistently oriented triangle mesh.

    Vertices and triangles are stored as read-only numpy arrays; every
    derived quantity is computed once on construction.
    """

    def __init__(self, vertices, triangles, validate=True):
        """
        Initialize the surface mesh.

        :param vertices: (M, 3) vertex coordinates.
        :type vertices: array_like
        :param triangles: (N, 3) vertex indices, 0-based.
        :type triangles: array_like
        :param validate: Check conformity and orientation.
        :type validate: bool
        """
        self._vertices = np.array(vertices, dtype=float).reshape(-1, 3)
        self._triangles = np.array(triangles, dtype=np.int64).reshape(-1, 3)

        if len(self._triangles) == 0:
            raise MeshValidationError('mesh has no triangles')

        self._check_indices()

        corners = self._vertices[self._triangles]
        v = corners[:, 1] - corners[:, 0]
        w = corners[:, 2] - corners[:, 1]
        cross = np.cross(v, w)
        grams = np.linalg.norm(cross, axis=1)

        longest = np.max(np.stack([np.einsum('ij,ij->i', e, e) for e in
                                   (v, w, corners[:, 0] - corners[:, 2])]), axis=0)
        bad = np.nonzero(~(grams > DEGENERATE_TOL * longest))[0]
        if len(bad) > 0:
            raise MeshValidationError('degenerate triangle', element=int(bad[0]))

        self._grams = grams
        self._normals = cross / grams[:, None]
        self._edges = self._collect_edges()

        if validate:
            self._check_conformity()

        for arr in (self._vertices, self._triangles, self._grams, self._normals):
            arr.setflags(write=False)

    def _check_indices(self):
        tri = self._triangles
        out_of_range = np.nonzero((tri < 0).any(axis=1) | (tri >= len(self._vertices)).any(axis=1))[0]
        if len(out_of_range) > 0:
            raise MeshValidationError('vertex index out of range', element=int(out_of_range[0]))

        repeated = np.nonzero((tri[:, 0] == tri[:, 1]) | (tri[:, 1] == tri[:, 2]) |
                              (tri[:, 0] == tri[:, 2]))[0]
        if len(repeated) > 0:
            raise MeshValidationError('triangle repeats a vertex index', element=int(repeated[0]))

    def _collect_edges(self):
        edges = {}
        for idx, (a, b, c) in enumerate(self._triangles.tolist()):
            for start, end in ((a, b), (b, c), (c, a)):
                key = (min(start, end), max(start, end))
                edges.setdefault(key, []).append((idx, start < end))
        return edges

    def _check_conformity(self):
        seen = {}
        for idx, tri in enumerate(self._triangles.tolist()):
            key = tuple(sorted(tri))
            if key in seen:
                raise MeshValidationError('duplicate triangle of %s' % seen[key], element=idx)
            seen[key] = idx

        for key, incident in self._edges.items():
            if len(incident) > 2:
                raise MeshValidationError('non-conforming mesh: edge %s shared by %s triangles' %
                                          (key, len(incident)), element=incident[2][0])
            if len(incident) == 2 and incident[0][1] == incident[1][1]:
                raise MeshValidationError('inconsistent orientation along edge %s' % (key,),
                                          element=incident[1][0])

        referenced = np.zeros(len(self._vertices), dtype=bool)
        referenced[self._triangles.ravel()] = True
        if not referenced.all():
            log.warning('%s vertices are not referenced by any triangle' %
                        int((~referenced).sum()))

        self._check_geometric_conformity(np.nonzero(referenced)[0])

    def _first_triangle_of(self, vertex):
        return int(np.nonzero((self._triangles == vertex).any(axis=1))[0][0])

    def _check_geometric_conformity(self, used):
        """
        Triangles that touch must do so through shared indices: no two
        used vertices coincide and no used vertex lies inside an edge it
        is not an end of.
        """
        points = self._vertices[used]
        tol = COINCIDENCE_TOL * max(float(np.linalg.norm(np.ptp(points, axis=0))), 1.0e-300)
        tree = cKDTree(points)

        close = sorted(tree.query_pairs(tol))
        if close:
            a, b = used[close[0][0]], used[close[0][1]]
            raise MeshValidationError('vertices %s and %s coincide' % (a, b),
                                      element=self._first_triangle_of(b))

        for (a, b), incident in sorted(self._edges.items()):
            pa, pb = self._vertices[a], self._vertices[b]
            edge = pb - pa
            length2 = float(edge @ edge)
            midpoint = 0.5 * (pa + pb)
            for k in tree.query_ball_point(midpoint, 0.5 * np.sqrt(length2) + tol):
                vertex = used[k]
                if vertex == a or vertex == b:
                    continue
                offset = self._vertices[vertex] - pa
                t = float(offset @ edge) / length2
                if 0.0 < t < 1.0 and np.linalg.norm(offset - t * edge) <= tol:
                    raise MeshValidationError('non-conforming mesh: vertex %s lies on edge %s' %
                                              (vertex, (a, b)), element=incident[0][0])

    @property
    def vertices(self):
        """
        The vertex coordinates, shape (M, 3).

        :rtype: numpy.ndarray
        """
        return self._vertices

    @property
    def triangles(self):
        """
        The triangle vertex indices, shape (N, 3).

        :rtype: numpy.ndarray
        """
        return self._triangles

    @property
    def num_vertices(self):
        return len(self._vertices)

    @property
    def num_triangles(self):
        return len(self._triangles)

    @property
    def grams(self):
        return self._grams

    @property
    def areas(self):
        return 0.5 * self._grams

    @property
    def normals(self):
        """
        Unit normals from the stored vertex order.

        :rtype: numpy.ndarray
        """
        return self._normals

    @property
    def centroids(self):
        return self._vertices[self._triangles].mean(axis=1)

    @property
    def is_closed(self):
        """
        True if every edge is shared by exactly two triangles.

        :rtype: bool
        """
        return all(len(incident) == 2 for incident in self._edges.values())

    @property
    def diameter(self):
        extent = self._vertices.max(axis=0) - self._vertices.min(axis=0)
        return float(np.linalg.norm(extent))

    def corners(self, idx, order=IDENTITY_ORDER):
        """
        The three vertex coordinates of a triangle in the given order.

        :param idx: Triangle index.
        :type idx: int
        :param order: Vertex permutation (0-based).
        :type order: tuple
        :rtype: numpy.ndarray
        """
        return self._vertices[self._triangles[idx][list(order)]]

    def __repr__(self):
        return 'SurfaceMesh(M=%s, N=%s)' % (self.num_vertices, self.num_triangles)


def triangle_geometry(mesh, idx, order=IDENTITY_ORDER):
    """
    Reference map data of a triangle under a vertex permutation.

    :param mesh: The mesh.
    :type mesh: SurfaceMesh
    :param idx: Triangle index.
    :type idx: int
    :param order: Vertex permutation (0-based), e.g. (1, 0, 2).
    :type order: tuple
    :return: The geometry of the permuted triangle.
    :rtype: TriangleGeometry
    """
    if not 0 <= idx < mesh.num_triangles:
        raise MeshValidationError('triangle index out of range', element=idx)
    order = _check_order(order)
    p1, p2, p3 = mesh.corners(idx, order)
    return TriangleGeometry(p1, p2 - p1, p3 - p2)


def local_linear_coeffs(nodal_values, order=IDENTITY_ORDER):
    """
    Coefficients (a0, a1, a2) of phi(chi(y)) = a0 + a1 y1 + a2 y2.

    :param nodal_values: Values at the three vertices in stored order.
    :type nodal_values: array_like
    :param order: The vertex permutation of the parametrisation.
    :type order: tuple
    :rtype: numpy.ndarray
    """
    order = _check_order(order)
    phi = np.asarray(nodal_values, dtype=float)[list(order)]
    return np.array([phi[0], phi[1] - phi[0], phi[2] - phi[1]])
