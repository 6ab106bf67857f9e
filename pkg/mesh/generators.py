# -*- coding: utf-8 -*-

import logging

import numpy as np

from mesh.surface import SurfaceMesh, MeshValidationError

log = logging.getLogger(__name__)

MAX_LEVEL = 7

_PHI = (1.0 + np.sqrt(5.0)) / 2.0

_ICOSAHEDRON_VERTICES = (
    (-1, _PHI, 0), (1, _PHI, 0), (-1, -_PHI, 0), (1, -_PHI, 0),
    (0, -1, _PHI), (0, 1, _PHI), (0, -1, -_PHI), (0, 1, -_PHI),
    (_PHI, 0, -1), (_PHI, 0, 1), (-_PHI, 0, -1), (-_PHI, 0, 1)
)

_ICOSAHEDRON_FACES = (
    (0, 11, 5), (0, 5, 1), (0, 1, 7), (0, 7, 10), (0, 10, 11),
    (1, 5, 9), (5, 11, 4), (11, 10, 2), (10, 7, 6), (7, 1, 8),
    (3, 9, 4), (3, 4, 2), (3, 2, 6), (3, 6, 8), (3, 8, 9),
    (4, 9, 5), (2, 4, 11), (6, 2, 10), (8, 6, 7), (9, 8, 1)
)


def _subdivide(vertices, faces):
    vertices = list(vertices)
    cache = {}

    def midpoint(a, b):
        key = (min(a, b), max(a, b))
        if key not in cache:
            mid = (np.asarray(vertices[a]) + np.asarray(vertices[b])) / 2.0
            vertices.append(mid / np.linalg.norm(mid))
            cache[key] = len(vertices) - 1
        return cache[key]

    refined = []
    for a, b, c in faces:
        ab = midpoint(a, b)
        bc = midpoint(b, c)
        ca = midpoint(c, a)
        refined.extend([(a, ab, ca), (b, bc, ab), (c, ca, bc), (ab, bc, ca)])
    return vertices, refined


def _orient_outward(vertices, faces):
    faces = np.array(faces, dtype=np.int64)
    corners = vertices[faces]
    normals = np.cross(corners[:, 1] - corners[:, 0], corners[:, 2] - corners[:, 1])
    inward = np.einsum('ij,ij->i', normals, corners.mean(axis=1)) < 0
    faces[inward] = faces[inward][:, ::-1]
    return faces


def _unit_icosphere(level):
    if not 0 <= level <= MAX_LEVEL:
        raise MeshValidationError('icosphere level %s outside 0..%s' % (level, MAX_LEVEL))

    vertices = [np.asarray(p, dtype=float) / np.linalg.norm(p) for p in _ICOSAHEDRON_VERTICES]
    faces = list(_ICOSAHEDRON_FACES)
    for _ in range(level):
        vertices, faces = _subdivide(vertices, faces)

    vertices = np.array(vertices)
    return vertices, _orient_outward(vertices, faces)


def build_icosphere(level, radius=1.0):
    """
    Regular icosahedron subdivided `level` times and projected to a sphere.

    :param level: Number of subdivisions, 0..7.
    :type level: int
    :param radius: Sphere radius.
    :type radius: float
    :return: A mesh with 20*4^level outward oriented triangles.
    :rtype: SurfaceMesh
    """
    if not radius > 0:
        raise MeshValidationError('radius must be positive, got %r' % radius)
    vertices, faces = _unit_icosphere(level)
    log.debug('icosphere level=%s N=%s M=%s' % (level, len(faces), len(vertices)))
    return SurfaceMesh(radius * vertices, faces)


def build_bumpy_sphere(level, amplitude=0.2, radius=1.0):
    """
    Icosphere displaced radially by 1 + amplitude*sin(3x)cos(2y)cos(z).

    Gives a small irregular, star-shaped test surface with non-uniform
    element sizes.

    :param level: Number of subdivisions, 0..7.
    :type level: int
    :param amplitude: Relative displacement, |amplitude| < 1.
    :type amplitude: float
    :param radius: Mean radius.
    :type radius: float
    :rtype: SurfaceMesh
    """
    if not abs(amplitude) < 1.0:
        raise MeshValidationError('amplitude must satisfy |amplitude| < 1, got %r' % amplitude)
    vertices, faces = _unit_icosphere(level)
    x, y, z = vertices.T
    scale = 1.0 + amplitude * np.sin(3.0 * x) * np.cos(2.0 * y) * np.cos(z)
    return SurfaceMesh(radius * vertices * scale[:, None], faces)


def build_plate(n, size=1.0):
    """
    Flat square [0, size]^2 in the plane z=0, split into 2*n*n triangles.

    :param n: Subdivisions per side.
    :type n: int
    :param size: Side length.
    :type size: float
    :rtype: SurfaceMesh
    """
    if n < 1:
        raise MeshValidationError('plate needs at least one subdivision, got %s' % n)
    ticks = np.linspace(0.0, size, n + 1)
    xx, yy = np.meshgrid(ticks, ticks, indexing='ij')
    vertices = np.column_stack([xx.ravel(), yy.ravel(), np.zeros(xx.size)])

    faces = []
    for i in range(n):
        for j in range(n):
            a = i * (n + 1) + j
            b = (i + 1) * (n + 1) + j
            faces.append((a, b, b + 1))
            faces.append((a, b + 1, a + 1))
    return SurfaceMesh(vertices, faces)
