# -*- coding: utf-8 -*-

import logging

import numpy as np
from scipy import linalg

from assembly.assembler import assemble_M, assemble_V, assemble_K
from assembly.errors import DimensionMismatchError, SolverError

log = logging.getLogger(__name__)

RESIDUAL_TOL = 1e-10


class Factorization(object):
    CHOLESKY = 'cholesky'
    LU = 'lu'


class DirichletSolution(object):
    """
    Result of a Dirichlet solve.
    """

    def __init__(self, flux, rhs, residual, method):
        self.flux = flux
        self.rhs = rhs
        self.residual = residual
        self.method = method

    def as_dict(self):
        return dict(residual=self.residual, method=self.method)


def solve_dense(V, rhs):
    """
    Solve V t = rhs with a Cholesky factorization, falling back to LU
    when V is not numerically positive definite.

    :param V: The system matrix.
    :type V: DenseMatrix
    :param rhs: Right hand side.
    :type rhs: numpy.ndarray
    :return: The solution and the factorization used.
    :rtype: tuple
    """
    rhs = np.asarray(rhs, dtype=float)
    if V.rows != V.cols or V.rows != len(rhs):
        raise DimensionMismatchError('cannot solve a %sx%s system with %s right hand side entries' %
                                     (V.rows, V.cols, len(rhs)))
    try:
        factor = linalg.cho_factor(V.entries)
        return linalg.cho_solve(factor, rhs), Factorization.CHOLESKY
    except linalg.LinAlgError as lae:
        log.warning('cholesky factorization failed (%s), falling back to LU' % lae)

    lu, piv = linalg.lu_factor(V.entries, check_finite=True)
    pivots = np.abs(np.diag(lu))
    if pivots.min() <= np.finfo(float).eps * pivots.max() * V.rows:
        raise SolverError('V is numerically singular: smallest LU pivot %.3e, largest %.3e' %
                          (pivots.min(), pivots.max()))
    return linalg.lu_solve((lu, piv), rhs), Factorization.LU


def solve_dirichlet(mesh, g_nodal, config, matrices=None, report=None):
    """
    Galerkin solution of the interior Dirichlet problem V t = (M/2 + K) g.

    :param mesh: The mesh.
    :type mesh: SurfaceMesh
    :param g_nodal: Dirichlet data at the M vertices.
    :type g_nodal: array_like
    :param config: Orders and engine of the assembly.
    :type config: AssemblyConfig
    :param matrices: Optional pre-assembled (M, V, K).
    :type matrices: tuple
    :param report: Optional report for the V and K assembly.
    :type report: AssemblyReport
    :return: The Neumann data per triangle, the residual and the factorization.
    :rtype: DirichletSolution
    """
    g_nodal = np.asarray(g_nodal, dtype=float)
    if g_nodal.shape != (mesh.num_vertices,):
        raise DimensionMismatchError('expected %s nodal values, got shape %s' %
                                     (mesh.num_vertices, g_nodal.shape))

    if matrices is None:
        M = assemble_M(mesh)
        V = assemble_V(mesh, config, report)
        K = assemble_K(mesh, config, report)
    else:
        M, V, K = matrices

    rhs = (0.5 * M.entries + K.entries) @ g_nodal
    flux, method = solve_dense(V, rhs)

    rhs_norm = np.linalg.norm(rhs)
    residual = float(np.linalg.norm(V.entries @ flux - rhs))
    if residual > RESIDUAL_TOL * rhs_norm:
        raise SolverError('residual %.3e exceeds %.1e relative to |rhs| = %.3e (%s)' %
                          (residual, RESIDUAL_TOL, rhs_norm, method))
    log.info('dirichlet solve (%s): residual %.3e' % (method, residual))
    return DirichletSolution(flux, rhs, residual, method)


def sphere_flux_error(mesh, flux):
    """
    Relative L2 error of a flux against n3 of the sphere through each
    triangle centroid, the exact Neumann data of u = x3.

    :rtype: float
    """
    centroids = mesh.centroids
    exact = centroids[:, 2] / np.linalg.norm(centroids, axis=1)
    areas = mesh.areas
    error = np.sqrt(np.sum(areas * (np.asarray(flux) - exact) ** 2))
    return float(error / np.sqrt(np.sum(areas * exact ** 2)))
