# -*- coding: utf-8 -*-

import numpy as np

from mesh.surface import IDENTITY_ORDER, MeshValidationError


class PairCase(object):
    """
    Singularity cases of a triangle pair.
    """
    # sigma and tau are the same triangle
    IDENTICAL = 0
    # the closures intersect in one edge
    SHARED_EDGE = 1
    # the closures intersect in one vertex
    SHARED_VERTEX = 2
    # the closures do not intersect
    DISJOINT = 3

    NAMES = ('identical', 'edge', 'vertex', 'disjoint')

    @classmethod
    def name(cls, case):
        return cls.NAMES[case]


class PairClassification(object):
    """
    Case and canonical vertex orderings of a (sigma, tau) pair.

    sigma is the test triangle (carries x), tau the trial triangle
    (carries y). tau_normal is the normal of tau in its stored order.
    """
    __slots__ = ('sigma', 'tau', 'case', 'sigma_order', 'tau_order', 'tau_normal')

    def __init__(self, sigma, tau, case, sigma_order, tau_order, tau_normal):
        self.sigma = sigma
        self.tau = tau
        self.case = case
        self.sigma_order = sigma_order
        self.tau_order = tau_order
        self.tau_normal = tau_normal

    def __repr__(self):
        return 'PairClassification(%s, %s, %s, sigma_order=%s, tau_order=%s)' % \
               (self.sigma, self.tau, PairCase.name(self.case),
                self.sigma_order, self.tau_order)


def _rotation_from(pos):
    return (pos, (pos + 1) % 3, (pos + 2) % 3)


def classify_pair(mesh, i, j):
    """
    Classify the pair (sigma=i, tau=j) by shared vertex indices.

    SharedEdge: tau is rotated so the shared edge is its first edge and
    sigma is reordered to start with the same two vertices in the same
    order. SharedVertex: both are rotated to start at the shared vertex.

    :param mesh: The mesh.
    :type mesh: SurfaceMesh
    :param i: Index of the test triangle sigma.
    :type i: int
    :param j: Index of the trial triangle tau.
    :type j: int
    :rtype: PairClassification
    """
    n = mesh.num_triangles
    if not (0 <= i < n and 0 <= j < n):
        raise MeshValidationError('triangle pair (%s, %s) out of range' % (i, j))

    tau_normal = mesh.normals[j]
    if i == j:
        return PairClassification(i, j, PairCase.IDENTICAL, IDENTITY_ORDER,
                                  IDENTITY_ORDER, tau_normal)

    sigma = mesh.triangles[i].tolist()
    tau = mesh.triangles[j].tolist()
    shared = set(sigma) & set(tau)

    if len(shared) == 3:
        raise MeshValidationError('triangles %s and %s share all vertices' % (i, j), element=j)

    if len(shared) == 2:
        for pos in range(3):
            if tau[pos] in shared and tau[(pos + 1) % 3] in shared:
                break
        tau_order = _rotation_from(pos)
        first, second = tau[tau_order[0]], tau[tau_order[1]]
        ia, ib = sigma.index(first), sigma.index(second)
        sigma_order = (ia, ib, 3 - ia - ib)
        return PairClassification(i, j, PairCase.SHARED_EDGE, sigma_order,
                                  tau_order, tau_normal)

    if len(shared) == 1:
        common = shared.pop()
        return PairClassification(i, j, PairCase.SHARED_VERTEX,
                                  _rotation_from(sigma.index(common)),
                                  _rotation_from(tau.index(common)), tau_normal)

    return PairClassification(i, j, PairCase.DISJOINT, IDENTITY_ORDER,
                              IDENTITY_ORDER, tau_normal)


def neighbours(mesh):
    """
    Triangles touching each triangle, split by case.

    :param mesh: The mesh.
    :type mesh: SurfaceMesh
    :return: Two lists of sorted index arrays: edge neighbours and
    vertex neighbours of every triangle.
    :rtype: tuple
    """
    incident = [[] for _ in range(mesh.num_vertices)]
    for idx, tri in enumerate(mesh.triangles.tolist()):
        for vertex in tri:
            incident[vertex].append(idx)

    edge, vertex = [], []
    for idx, tri in enumerate(mesh.triangles.tolist()):
        counts = {}
        for k in tri:
            for other in incident[k]:
                if other != idx:
                    counts[other] = counts.get(other, 0) + 1
        edge.append(np.array(sorted(o for o, c in counts.items() if c == 2), dtype=np.int64))
        vertex.append(np.array(sorted(o for o, c in counts.items() if c == 1), dtype=np.int64))
    return edge, vertex


def pair_counts(mesh):
    """
    Number of ordered pairs per case.

    :param mesh: The mesh.
    :type mesh: SurfaceMesh
    :return: Counts keyed by case name.
    :rtype: dict
    """
    edge, vertex = neighbours(mesh)
    n = mesh.num_triangles
    n_edge = sum(len(e) for e in edge)
    n_vertex = sum(len(v) for v in vertex)
    return {
        'identical': n,
        'edge': n_edge,
        'vertex': n_vertex,
        'disjoint': n * n - n - n_edge - n_vertex
    }
