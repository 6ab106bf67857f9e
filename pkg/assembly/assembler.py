# -*- coding: utf-8 -*-

"""
Dense Galerkin assembly of the mass matrix M, the single layer matrix V
and the double layer matrix K for piecewise constant test functions and
piecewise linear trial functions.

Pairs are grouped by singularity case and evaluated in fixed size
batches, optionally on a thread pool. Batches never depend on the thread
count, so the result is the same for any number of threads.
"""

import time
import logging
import threading
import contextlib

import numpy as np

from analytic import (AnalyticBaseError, TALLY, ANTIDERIVATIVE, FALLBACK, slp_identical_batch,
                      slp_edge, slp_vertex, slp_farfield, dlp_edge, dlp_vertex,
                      dlp_farfield_inner, dlp_farfield_combine)
from assembly.errors import (AssemblyBaseError, MeshTooLargeError, PairEvaluationError,
                             DimensionMismatchError)
from assembly.matrix import DenseMatrix
from mesh import (MeshBaseError, PairCase, classify_pair, neighbours, pair_counts,
                  local_linear_coeffs)
from quadrature import (QuadratureBaseError, QuadratureOrderError, Kernel, oracle_pair_batch,
                        duffy_triangle_rule)
from util import ThreadPool, WorkerTaskError, thread_count

log = logging.getLogger(__name__)

MAX_TRIANGLES = 6000
MAX_ORDER = 32

# batch sizes, in pairs or pair-node products
NEAR_BATCH = 256
FAR_BATCH = 16384
ORACLE_NEAR_BATCH = 64
ORACLE_FAR_BATCH = 1 << 20

FOUR_PI = 4.0 * np.pi

# nodal basis k of a triangle in stored vertex order
NODAL_COEFFS = np.array([local_linear_coeffs(e) for e in np.eye(3)])

PAIR_ERRORS = (AnalyticBaseError, QuadratureBaseError, MeshBaseError)


class Engine(object):
    SEMI_ANALYTIC = 'analytic'
    ORACLE = 'oracle'

    ALL = (SEMI_ANALYTIC, ORACLE)


class Operator(object):
    M = 'M'
    V = 'V'
    K = 'K'

    ALL = (M, V, K)


class AssemblyConfig(object):
    """
    Quadrature orders and execution settings of an assembly.

    r is the far field order, s the order of the singular cases
    (the outer rule of shared vertices, the oracle rule of singular pairs).
    """

    def __init__(self, r=8, s=None, engine=Engine.SEMI_ANALYTIC, threads=1):
        """
        Initialize the config.

        :param r: Far field quadrature order, 1..32.
        :type r: int
        :param s: Singular case order, 1..32, default r + 2.
        :type s: int
        :param engine: Engine.SEMI_ANALYTIC or Engine.ORACLE.
        :type engine: str
        :param threads: Worker threads, 0 means all cores.
        :type threads: int
        """
        if s is None:
            s = r + 2
        for name, order in (('r', r), ('s', s)):
            if not isinstance(order, (int, np.integer)) or not 1 <= order <= MAX_ORDER:
                raise QuadratureOrderError('%s must be an integer in 1..%s, got %r' %
                                           (name, MAX_ORDER, order))
        if engine not in Engine.ALL:
            raise AssemblyBaseError('unknown engine `%s`' % engine)

        self.r = int(r)
        self.s = int(s)
        self.engine = engine
        self.threads = thread_count(threads)

    def as_dict(self):
        return dict(r=self.r, s=self.s, engine=self.engine, threads=self.threads)

    def __repr__(self):
        return 'AssemblyConfig(r=%s, s=%s, engine=%s, threads=%s)' % \
               (self.r, self.s, self.engine, self.threads)


class AssemblyReport(object):
    """
    Timings, pair counts and evaluation counts of one assembly.
    """

    def __init__(self):
        self.timings = {}
        self.pair_counts = {}
        self.evaluated_pairs = {}
        self.evaluations = {}

    @contextlib.contextmanager
    def phase(self, name):
        start = time.perf_counter()
        try:
            yield
        finally:
            self.timings[name] = self.timings.get(name, 0.0) + time.perf_counter() - start

    def as_dict(self):
        return dict(timings=dict(self.timings), pair_counts=dict(self.pair_counts),
                    evaluated_pairs=dict(self.evaluated_pairs),
                    evaluations=dict(self.evaluations))


def check_mesh_size(mesh, limit=MAX_TRIANGLES):
    """
    Reject meshes too large for dense assembly.

    :param mesh: The mesh.
    :type mesh: SurfaceMesh
    :param limit: The largest allowed number of triangles.
    :type limit: int
    """
    if mesh.num_triangles > limit:
        raise MeshTooLargeError('%s triangles exceed the dense assembly limit of %s; '
                                'use a coarser mesh' % (mesh.num_triangles, limit))


_pools = {}
_pools_lock = threading.Lock()


def _get_pool(threads):
    with _pools_lock:
        pool = _pools.get(threads)
        if pool is None:
            pool = ThreadPool(threads)
            _pools[threads] = pool
        return pool


def _chunks(rows, cols, size):
    size = max(1, int(size))
    return [(rows[k:k + size], cols[k:k + size]) for k in range(0, len(rows), size)]


def _pair_lists(mesh, upper):
    """
    Ordered (sigma, tau) index arrays per case. With upper only pairs
    with tau > sigma are listed (identical pairs are always listed).
    """
    edge, vertex = neighbours(mesh)
    n = mesh.num_triangles
    lists = {PairCase.IDENTICAL: (np.arange(n), np.arange(n))}

    for case, table in ((PairCase.SHARED_EDGE, edge), (PairCase.SHARED_VERTEX, vertex)):
        rows, cols = [], []
        for i, js in enumerate(table):
            if upper:
                js = js[js > i]
            rows.append(np.full(len(js), i, dtype=np.int64))
            cols.append(js)
        lists[case] = (np.concatenate(rows), np.concatenate(cols))

    rows, cols = [], []
    for i in range(n):
        mask = np.ones(n, dtype=bool)
        mask[i] = False
        mask[edge[i]] = False
        mask[vertex[i]] = False
        if upper:
            mask[:i] = False
        js = np.flatnonzero(mask)
        rows.append(np.full(len(js), i, dtype=np.int64))
        cols.append(js)
    lists[PairCase.DISJOINT] = (np.concatenate(rows), np.concatenate(cols))
    return lists


class _Assembler(object):
    """
    Pair integral evaluation for one mesh and config.
    """

    def __init__(self, mesh, config, report):
        check_mesh_size(mesh)
        self.mesh = mesh
        self.config = config
        self.report = report if report is not None else AssemblyReport()

        corners = mesh.vertices[mesh.triangles]
        self.origin = corners[:, 0]
        self.jac1 = corners[:, 1] - corners[:, 0]
        self.jac2 = corners[:, 2] - corners[:, 1]
        self.grams = mesh.grams
        self.normals = mesh.normals
        self.triangles = mesh.triangles
        self._duffy = None

    # batch evaluation

    def _run(self, func, case, rows, cols, batch):
        chunks = _chunks(rows, cols, batch)
        task = _BatchTask(func, case)
        if self.config.threads > 1 and len(chunks) > 1:
            try:
                results = _get_pool(self.config.threads).map(task, chunks)
            except WorkerTaskError as wte:
                raise wte.error
        else:
            results = [task(chunk) for chunk in chunks]

        failures = [failure for _, batch_failures in results for failure in batch_failures]
        if failures:
            raise PairEvaluationError(failures)
        if not results:
            return np.zeros((0,))
        return np.concatenate([values for values, _ in results])

    def evaluate(self, case, func, rows, cols, batch):
        name = PairCase.name(case)
        before = TALLY.snapshot()
        with self.report.phase(name):
            values = self._run(func, case, rows, cols, batch)
        after = TALLY.snapshot()
        self.report.evaluated_pairs[name] = self.report.evaluated_pairs.get(name, 0) + len(rows)
        for key in (ANTIDERIVATIVE, FALLBACK):
            count = after.get(key, 0) - before.get(key, 0)
            label = '%s_%s' % (name, key)
            self.report.evaluations[label] = self.report.evaluations.get(label, 0) + count
        log.debug('%s pairs: %s evaluated in %.3fs' % (name, len(rows), self.report.timings[name]))
        return values

    def _canonical(self, rows, cols):
        classified = [classify_pair(self.mesh, int(i), int(j)) for i, j in zip(rows, cols)]
        sigma = np.array([self.triangles[c.sigma][list(c.sigma_order)] for c in classified])
        tau = np.array([self.triangles[c.tau][list(c.tau_order)] for c in classified])
        return classified, self.mesh.vertices[sigma], self.mesh.vertices[tau]

    @staticmethod
    def _tau_coeffs(classified):
        return np.array([[local_linear_coeffs(e, c.tau_order) for e in np.eye(3)]
                         for c in classified])

    # single layer, semi-analytic

    def slp_identical(self, rows, cols):
        return slp_identical_batch(self.jac1[rows], self.jac2[rows], self.grams[rows])

    def slp_edge(self, rows, cols):
        _, sigma, tau = self._canonical(rows, cols)
        return slp_edge(tau[:, 2] - tau[:, 1], tau[:, 1] - tau[:, 0], sigma[:, 2] - sigma[:, 1],
                        self.grams[rows], self.grams[cols])

    def slp_vertex(self, rows, cols):
        _, sigma, tau = self._canonical(rows, cols)
        return slp_vertex(tau[:, 1] - tau[:, 0], tau[:, 2] - tau[:, 1],
                          sigma[:, 1] - sigma[:, 0], sigma[:, 2] - sigma[:, 1],
                          self.grams[rows], self.grams[cols], self.config.s)

    def slp_disjoint(self, rows, cols):
        return slp_farfield(self.origin[cols] - self.origin[rows], self.jac1[cols], self.jac2[cols],
                            self.jac1[rows], self.jac2[rows],
                            self.grams[rows], self.grams[cols], self.config.r)

    # double layer, semi-analytic

    def dlp_edge(self, rows, cols):
        classified, sigma, tau = self._canonical(rows, cols)
        return dlp_edge((tau[:, 2] - tau[:, 1])[:, None], (tau[:, 1] - tau[:, 0])[:, None],
                        (sigma[:, 2] - sigma[:, 1])[:, None], self.normals[cols][:, None],
                        self._tau_coeffs(classified),
                        self.grams[rows][:, None], self.grams[cols][:, None])

    def dlp_vertex(self, rows, cols):
        classified, sigma, tau = self._canonical(rows, cols)
        return dlp_vertex((tau[:, 1] - tau[:, 0])[:, None], (tau[:, 2] - tau[:, 1])[:, None],
                          (sigma[:, 1] - sigma[:, 0])[:, None], (sigma[:, 2] - sigma[:, 1])[:, None],
                          self.normals[cols][:, None], self._tau_coeffs(classified),
                          self.grams[rows][:, None], self.grams[cols][:, None], self.config.s)

    def dlp_disjoint(self, rows, cols):
        inner = dlp_farfield_inner(self.origin[cols] - self.origin[rows], self.jac1[cols],
                                   self.jac2[cols], self.jac1[rows], self.jac2[rows],
                                   self.normals[cols], self.config.r)
        return dlp_farfield_combine(inner[:, None], NODAL_COEFFS, self.grams[rows][:, None],
                                    self.grams[cols][:, None], self.config.r)

    # oracle

    def _oracle_pairs(self, rows, cols, kernel):
        classified, sigma, tau = self._canonical(rows, cols)
        cases = np.array([c.case for c in classified], dtype=np.int64)
        coeffs = self._tau_coeffs(classified) if kernel == Kernel.DLP else None
        values = np.zeros((len(rows), 3) if kernel == Kernel.DLP else len(rows))
        for case in np.unique(cases):
            mask = cases == case
            values[mask] = oracle_pair_batch(
                int(case), kernel, sigma[mask], tau[mask], self.normals[cols[mask]],
                None if coeffs is None else coeffs[mask], self.config.s)
        return values

    def oracle_slp_pairs(self, rows, cols):
        return self._oracle_pairs(rows, cols, Kernel.SLP)

    def oracle_dlp_pairs(self, rows, cols):
        return self._oracle_pairs(rows, cols, Kernel.DLP)

    def _duffy_points(self):
        # shared read-only data; the lock-free race only computes it twice
        if self._duffy is None:
            points, weights = duffy_triangle_rule(self.config.r)
            x1, x2 = points[:, 0], points[:, 1]
            physical = (self.origin[:, None, :] + x1[None, :, None] * self.jac1[:, None, :] +
                        x2[None, :, None] * self.jac2[:, None, :])
            scaled = weights[None, :] * self.grams[:, None]
            basis = np.column_stack([1.0 - x1, x1 - x2, x2])
            self._duffy = (physical, scaled, basis)
        return self._duffy

    def oracle_slp_disjoint(self, rows, cols):
        physical, scaled, _ = self._duffy_points()
        diff = physical[rows][:, :, None, :] - physical[cols][:, None, :, :]
        kernel = 1.0 / (FOUR_PI * np.sqrt(np.einsum('...i,...i->...', diff, diff)))
        weighted = np.einsum('ba,bac->bc', scaled[rows], kernel)
        return np.einsum('bc,bc->b', weighted, scaled[cols])

    def oracle_dlp_disjoint(self, rows, cols):
        physical, scaled, basis = self._duffy_points()
        diff = physical[rows][:, :, None, :] - physical[cols][:, None, :, :]
        r2 = np.einsum('...i,...i->...', diff, diff)
        kernel = np.einsum('baci,bi->bac', diff, self.normals[cols]) / (FOUR_PI * r2 * np.sqrt(r2))
        weighted = np.einsum('ba,bac->bc', scaled[rows], kernel)
        return (weighted * scaled[cols]) @ basis


class _BatchTask(object):
    """
    Evaluates one batch; on failure every pair of the batch is retried
    alone so that the failing pairs can be named.
    """

    def __init__(self, func, case):
        self.func = func
        self.case = case

    def __call__(self, chunk):
        rows, cols = chunk
        try:
            return np.asarray(self.func(rows, cols)), []
        except PAIR_ERRORS as e:
            log.warning('%s batch of %s pairs failed (%s), retrying pairwise' %
                        (PairCase.name(self.case), len(rows), e))

        values, failures = [], []
        for k in range(len(rows)):
            try:
                values.append(np.asarray(self.func(rows[k:k + 1], cols[k:k + 1]))[0])
            except PAIR_ERRORS as e:
                log.error('pair (%s, %s) failed: %s' % (rows[k], cols[k], e))
                failures.append((int(rows[k]), int(cols[k]), PairCase.name(self.case)))
                values.append(np.nan)
        return np.array(values), failures


def _far_batch(config):
    if config.engine == Engine.ORACLE:
        return ORACLE_FAR_BATCH // config.r ** 4
    return FAR_BATCH // config.r ** 2


def assemble_M(mesh):
    """
    Mass matrix M[n, m] = int_{tau_n} phi_m.

    :param mesh: The mesh.
    :type mesh: SurfaceMesh
    :rtype: DenseMatrix
    """
    check_mesh_size(mesh)
    entries = np.zeros((mesh.num_triangles, mesh.num_vertices))
    rows = np.repeat(np.arange(mesh.num_triangles), 3)
    np.add.at(entries, (rows, mesh.triangles.ravel()), np.repeat(mesh.areas / 3.0, 3))
    return DenseMatrix(entries)


def assemble_V(mesh, config, report=None):
    """
    Single layer matrix V[n, i] = <1_{tau_n}, V 1_{tau_i}>.

    Every unordered pair is evaluated once and mirrored.

    :param mesh: The mesh.
    :type mesh: SurfaceMesh
    :param config: Orders and engine.
    :type config: AssemblyConfig
    :param report: Optional report to fill.
    :type report: AssemblyReport
    :rtype: DenseMatrix
    """
    assembler = _Assembler(mesh, config, report)
    assembler.report.pair_counts = pair_counts(mesh)
    lists = _pair_lists(mesh, upper=True)
    entries = np.zeros((mesh.num_triangles, mesh.num_triangles))

    if config.engine == Engine.ORACLE:
        near = dict.fromkeys((PairCase.IDENTICAL, PairCase.SHARED_EDGE, PairCase.SHARED_VERTEX),
                             (assembler.oracle_slp_pairs, ORACLE_NEAR_BATCH))
        far = (assembler.oracle_slp_disjoint, _far_batch(config))
    else:
        near = {PairCase.IDENTICAL: (assembler.slp_identical, mesh.num_triangles),
                PairCase.SHARED_EDGE: (assembler.slp_edge, NEAR_BATCH),
                PairCase.SHARED_VERTEX: (assembler.slp_vertex, NEAR_BATCH)}
        far = (assembler.slp_disjoint, _far_batch(config))
    near[PairCase.DISJOINT] = far

    log.info('assembling V for %r with %r' % (mesh, config))
    with assembler.report.phase('total'):
        for case in (PairCase.IDENTICAL, PairCase.SHARED_EDGE,
                     PairCase.SHARED_VERTEX, PairCase.DISJOINT):
            rows, cols = lists[case]
            func, batch = near[case]
            values = assembler.evaluate(case, func, rows, cols, batch)
            entries[rows, cols] = values
            entries[cols, rows] = values
    log.info('V assembled in %.2fs' % assembler.report.timings['total'])
    return DenseMatrix(entries)


def assemble_K(mesh, config, report=None):
    """
    Double layer matrix K[n, m] = <1_{tau_n}, K phi_m>.

    Every ordered pair contributes to the columns of the three vertices of
    its trial triangle; contributions are added in a fixed order.

    :param mesh: The mesh.
    :type mesh: SurfaceMesh
    :param config: Orders and engine.
    :type config: AssemblyConfig
    :param report: Optional report to fill.
    :type report: AssemblyReport
    :rtype: DenseMatrix
    """
    assembler = _Assembler(mesh, config, report)
    assembler.report.pair_counts = pair_counts(mesh)
    lists = _pair_lists(mesh, upper=False)
    entries = np.zeros((mesh.num_triangles, mesh.num_vertices))

    if config.engine == Engine.ORACLE:
        funcs = {PairCase.SHARED_EDGE: (assembler.oracle_dlp_pairs, ORACLE_NEAR_BATCH),
                 PairCase.SHARED_VERTEX: (assembler.oracle_dlp_pairs, ORACLE_NEAR_BATCH),
                 PairCase.DISJOINT: (assembler.oracle_dlp_disjoint, _far_batch(config))}
    else:
        funcs = {PairCase.SHARED_EDGE: (assembler.dlp_edge, NEAR_BATCH),
                 PairCase.SHARED_VERTEX: (assembler.dlp_vertex, NEAR_BATCH),
                 PairCase.DISJOINT: (assembler.dlp_disjoint, _far_batch(config))}

    log.info('assembling K for %r with %r' % (mesh, config))
    with assembler.report.phase('total'):
        # identical pairs contribute 0
        assembler.report.evaluated_pairs[PairCase.name(PairCase.IDENTICAL)] = mesh.num_triangles
        for case in (PairCase.SHARED_EDGE, PairCase.SHARED_VERTEX, PairCase.DISJOINT):
            rows, cols = lists[case]
            func, batch = funcs[case]
            values = assembler.evaluate(case, func, rows, cols, batch)
            if len(rows):
                np.add.at(entries, (np.repeat(rows, 3), mesh.triangles[cols].ravel()),
                          values.reshape(-1))
    log.info('K assembled in %.2fs' % assembler.report.timings['total'])
    return DenseMatrix(entries)


def assemble(mesh, operator, config, report=None):
    """
    Assemble one of M, V, K.

    :param operator: Operator.M, Operator.V or Operator.K.
    :type operator: str
    :rtype: DenseMatrix
    """
    if operator == Operator.M:
        return assemble_M(mesh)
    if operator == Operator.V:
        return assemble_V(mesh, config, report)
    if operator == Operator.K:
        return assemble_K(mesh, config, report)
    raise AssemblyBaseError('unknown operator `%s`' % operator)


def oracle_matrix(mesh, kernel, r, s, threads=1, report=None):
    """
    V or K with every pair, the singular ones included, integrated by
    the regularized four dimensional quadrature.

    :param kernel: Kernel.SLP or Kernel.DLP.
    :type kernel: str
    :param r: Order of the disjoint pairs.
    :type r: int
    :param s: Order of the singular pairs.
    :type s: int
    :rtype: DenseMatrix
    """
    config = AssemblyConfig(r=r, s=s, engine=Engine.ORACLE, threads=threads)
    if kernel == Kernel.SLP:
        return assemble_V(mesh, config, report)
    if kernel == Kernel.DLP:
        return assemble_K(mesh, config, report)
    raise AssemblyBaseError('unknown kernel `%s`' % kernel)


def laplace_identity_residual(mesh, K, M):
    """
    max_n |((M/2 + K) 1)_n| / |K|_F, which tends to 0 for closed surfaces.

    :param mesh: The mesh the matrices belong to.
    :type mesh: SurfaceMesh
    :param K: Double layer matrix.
    :type K: DenseMatrix
    :param M: Mass matrix.
    :type M: DenseMatrix
    :rtype: float
    """
    expected = (mesh.num_triangles, mesh.num_vertices)
    if K.shape != expected or M.shape != expected:
        raise DimensionMismatchError('K and M must be %sx%s' % expected)
    norm = K.frobenius_norm()
    if norm == 0:
        raise AssemblyBaseError('K is zero, the identity does not apply')
    ones = np.ones(mesh.num_vertices)
    residual = (0.5 * M.entries + K.entries) @ ones
    return float(np.max(np.abs(residual)) / norm)
