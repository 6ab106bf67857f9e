# -*- coding: utf-8 -*-

"""
Command line front end: mesh generation, matrix assembly, engine
comparison, convergence sweeps and the Dirichlet demo.
"""

import os
import time
import logging
import argparse

import numpy as np

from analytic import AnalyticBaseError, set_fallback_order
from assembly import (AssemblyBaseError, MeshTooLargeError, DenseMatrix, Engine, Operator,
                      AssemblyConfig, AssemblyReport, assemble, assemble_M, assemble_V, assemble_K,
                      check_mesh_size, frobenius_rel_error, laplace_identity_residual,
                      solve_dirichlet, sphere_flux_error)
from handlers.manifest import RunManifest
from mesh import (MeshBaseError, build_icosphere, build_bumpy_sphere, build_plate, load_mesh,
                  save_mesh, pair_counts)
from quadrature import QuadratureBaseError
from util import file_handler
from util.file_handler import FileHandlerError

log = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_VALIDATION = 3
EXIT_NUMERIC = 4

MAX_ORDER = 32

CONVERGENCE_HEADER = ['r', 's', 'e', 'seconds', 'reference_engine']
SOLVE_HEADER = ['triangle', 't']
SPHERE_TOL = 1e-9


class CommandBaseError(Exception):
    """ Base command exception. """
    pass


class UsageError(CommandBaseError):
    """ Raised for invalid command line usage. """
    pass


class _ArgumentParser(argparse.ArgumentParser):
    """ Raises UsageError instead of exiting. """

    def error(self, message):
        raise UsageError(message)


def build_parser(conf):
    """
    Build the argument parser.

    :param conf: The config module.
    :rtype: argparse.ArgumentParser
    """
    parser = _ArgumentParser(prog='bemquad',
                             description='Galerkin BEM matrices for the 3D Laplace equation.')
    parser.add_argument('--version', action='version', version='%(prog)s ' + conf.VERSION)
    parser.add_argument('--quiet', action='store_true', help='only print errors')
    commands = parser.add_subparsers(dest='command', parser_class=_ArgumentParser)
    commands.required = True

    mesh_parser = commands.add_parser('mesh', help='generate a mesh')
    kinds = mesh_parser.add_subparsers(dest='kind', parser_class=_ArgumentParser)
    kinds.required = True
    for kind in ('icosphere', 'bumpy'):
        sub = kinds.add_parser(kind)
        sub.add_argument('--level', type=int, required=True)
        sub.add_argument('--radius', type=float, default=conf.SPHERE_RADIUS)
        sub.add_argument('--out', required=True)
        sub.add_argument('--manifest')
        if kind == 'bumpy':
            sub.add_argument('--amplitude', type=float, default=conf.BUMP_AMPLITUDE)
    plate = kinds.add_parser('plate')
    plate.add_argument('--n', type=int, required=True)
    plate.add_argument('--size', type=float, default=1.0)
    plate.add_argument('--out', required=True)
    plate.add_argument('--manifest')

    def add_orders(sub, reference=False):
        sub.add_argument('--r', type=int, default=conf.DEFAULT_R)
        sub.add_argument('--s', type=int, default=None)
        sub.add_argument('--threads', type=int, default=conf.THREADS)
        if reference:
            sub.add_argument('--reference-r', type=int, default=conf.REFERENCE_R)
            sub.add_argument('--reference-s', type=int, default=conf.REFERENCE_S)
            sub.add_argument('--reference', metavar='BEMM')

    sub = commands.add_parser('assemble', help='assemble M, V or K')
    sub.add_argument('--mesh', required=True)
    sub.add_argument('--operator', choices=Operator.ALL, required=True)
    sub.add_argument('--engine', choices=Engine.ALL, default=Engine.SEMI_ANALYTIC)
    add_orders(sub)
    sub.add_argument('--out', required=True)
    sub.add_argument('--csv')
    sub.add_argument('--manifest')

    sub = commands.add_parser('convergence', help='error versus quadrature order')
    sub.add_argument('--mesh', required=True)
    sub.add_argument('--operator', choices=(Operator.V, Operator.K), required=True)
    sub.add_argument('--rmin', type=int, required=True)
    sub.add_argument('--rmax', type=int, required=True)
    sub.add_argument('--threads', type=int, default=conf.THREADS)
    sub.add_argument('--reference-r', type=int, default=conf.REFERENCE_R)
    sub.add_argument('--reference-s', type=int, default=conf.REFERENCE_S)
    sub.add_argument('--reference', metavar='BEMM')
    sub.add_argument('--out', required=True)
    sub.add_argument('--manifest')

    sub = commands.add_parser('solve', help='interior Dirichlet problem')
    sub.add_argument('--mesh', required=True)
    sub.add_argument('--g', nargs='+', required=True, metavar='x3|file PATH')
    add_orders(sub)
    sub.add_argument('--out', required=True)
    sub.add_argument('--manifest')

    sub = commands.add_parser('compare', help='semi-analytic versus oracle matrix')
    sub.add_argument('--mesh', required=True)
    sub.add_argument('--operator', choices=(Operator.V, Operator.K), required=True)
    add_orders(sub, reference=True)
    sub.add_argument('--manifest')

    sub = commands.add_parser('info', help='mesh statistics')
    sub.add_argument('--mesh', required=True)

    return parser


def _check_order(name, order):
    if not 1 <= order <= MAX_ORDER:
        raise UsageError('%s must be in 1..%s, got %s' % (name, MAX_ORDER, order))
    return order


def _is_sphere(mesh):
    radii = np.linalg.norm(mesh.vertices, axis=1)
    return bool(np.all(np.abs(radii - radii.mean()) <= SPHERE_TOL * radii.mean()))


class CommandHandler:
    """
    Runs one parsed command.
    """

    def __init__(self, args, config, console):
        """
        Initialize the handler.

        :param args: The parsed arguments.
        :type args: argparse.Namespace
        :param config: The config module.
        :param console: Console for progress and results.
        :type console: Console
        """
        self._args = args
        self._conf = config
        self._console = console

    def handle(self):
        """
        Run the command.

        :return: The exit code.
        :rtype: int
        """
        log.debug('handling command `%s`, args: %s' % (self._args.command, vars(self._args)))
        set_fallback_order(self._conf.FALLBACK_ORDER)
        handler = getattr(self, 'do_%s' % self._args.command)
        handler()
        return EXIT_OK

    def _manifest_path(self, out=None):
        if getattr(self._args, 'manifest', None):
            return self._args.manifest
        directory = os.path.dirname(out) if out else ''
        return os.path.join(directory or self._conf.OUTPUT_PATH, self._conf.MANIFEST_FILE_NAME)

    def _load_mesh(self):
        mesh = load_mesh(self._args.mesh)
        check_mesh_size(mesh, self._conf.MAX_TRIANGLES)
        return mesh

    def _config(self, r, s=None, engine=Engine.SEMI_ANALYTIC):
        r = _check_order('r', r)
        s = _check_order('s', r + self._conf.DEFAULT_S_OFFSET if s is None else s)
        return AssemblyConfig(r=r, s=s, engine=engine, threads=self._args.threads)

    def do_mesh(self):
        """
        Generate a mesh and write it as OFF or OBJ.
        """
        args = self._args
        manifest = RunManifest('mesh', vars(args))
        with manifest.phase('generate'):
            if args.kind == 'plate':
                if args.n < 1:
                    raise UsageError('--n must be positive')
                mesh = build_plate(args.n, args.size)
            else:
                if not 0 <= args.level <= self._conf.MAX_LEVEL:
                    raise UsageError('level %s is outside 0..%s; finer meshes are too large '
                                     'for dense assembly' % (args.level, self._conf.MAX_LEVEL))
                if args.kind == 'icosphere':
                    mesh = build_icosphere(args.level, args.radius)
                else:
                    mesh = build_bumpy_sphere(args.level, args.amplitude, args.radius)

        with manifest.phase('write'):
            save_mesh(args.out, mesh)
        manifest.results = dict(N=mesh.num_triangles, M=mesh.num_vertices)
        manifest.write(self._manifest_path(args.out))
        self._console.result('wrote %s: N=%s M=%s' % (args.out, mesh.num_triangles, mesh.num_vertices))

    def do_assemble(self):
        """
        Assemble one matrix and write it in the BEMM format.
        """
        args = self._args
        mesh = self._load_mesh()
        config = self._config(args.r, args.s, args.engine)
        manifest = RunManifest('assemble', dict(vars(args), **config.as_dict()))
        report = AssemblyReport()

        self._console.progress('assembling %s (%s) for N=%s' %
                               (args.operator, args.engine, mesh.num_triangles))
        with manifest.phase('assemble'):
            matrix = assemble(mesh, args.operator, config, report)
        manifest.add_report(args.operator, report)

        with manifest.phase('write'):
            matrix.to_bemm(args.out)
            if args.csv:
                matrix.to_csv(args.csv)
        manifest.results = dict(rows=matrix.rows, cols=matrix.cols)
        manifest.write(self._manifest_path(args.out))
        self._console.result('wrote %sx%s %s to %s in %.2fs' %
                             (matrix.rows, matrix.cols, args.operator, args.out,
                              manifest.timings['assemble']))

    def _reference(self, mesh, operator, manifest, label):
        """
        The reference matrix, read from --reference or assembled by the oracle.

        :return: The matrix and where it came from, `file` or the engine.
        :rtype: tuple
        """
        args = self._args
        if args.reference:
            if not os.path.isfile(args.reference):
                raise FileHandlerError('reference file `%s` not found' % args.reference)
            reference = DenseMatrix.from_bemm(args.reference)
            columns = mesh.num_triangles if operator == Operator.V else mesh.num_vertices
            if reference.shape != (mesh.num_triangles, columns):
                raise UsageError('reference `%s` is %sx%s, %s of the mesh is %sx%s' %
                                 ((args.reference,) + reference.shape +
                                  (operator, mesh.num_triangles, columns)))
            self._console.progress('reference %s read from %s' % (operator, args.reference))
            return reference, 'file'

        config = AssemblyConfig(r=_check_order('reference-r', args.reference_r),
                                s=_check_order('reference-s', args.reference_s),
                                engine=Engine.ORACLE, threads=args.threads)
        self._console.progress('reference %s with %r' % (operator, config))
        report = AssemblyReport()
        reference = assemble(mesh, operator, config, report)
        manifest.add_report(label, report)
        return reference, config.engine

    def do_convergence(self):
        """
        Relative Frobenius error for r = rmin..rmax, s = r + 2, against an
        oracle reference assembled once or read from --reference.
        """
        args = self._args
        if args.rmin > args.rmax:
            raise UsageError('--rmin %s is larger than --rmax %s' % (args.rmin, args.rmax))
        _check_order('rmin', args.rmin)
        _check_order('rmax + s offset', args.rmax + self._conf.DEFAULT_S_OFFSET)

        mesh = self._load_mesh()
        manifest = RunManifest('convergence', vars(args))
        operator = assemble_V if args.operator == Operator.V else assemble_K

        with manifest.phase('reference'):
            reference, source = self._reference(mesh, args.operator, manifest, 'reference')

        rows = []
        for r in range(args.rmin, args.rmax + 1):
            config = self._config(r)
            report = AssemblyReport()
            start = time.perf_counter()
            matrix = operator(mesh, config, report)
            seconds = time.perf_counter() - start
            error = frobenius_rel_error(matrix, reference)
            manifest.add_report('r%s' % r, report)
            rows.append((r, config.s, error, seconds, source))
            self._console.progress('r=%2d s=%2d e=%.3e (%.2fs)' % (r, config.s, error, seconds))

        file_handler.write_csv(args.out, CONVERGENCE_HEADER, rows)
        manifest.results = dict(errors=[row[2] for row in rows])
        manifest.write(self._manifest_path(args.out))
        self._console.result('wrote %s rows to %s' % (len(rows), args.out))

    def _dirichlet_data(self, mesh):
        g_args = self._args.g
        if g_args == ['x3']:
            return mesh.vertices[:, 2].copy(), 'x3'
        if len(g_args) == 2 and g_args[0] == 'file':
            path = g_args[1]
            if not os.path.isfile(path):
                raise FileHandlerError('g file `%s` not found' % path)
            tokens = ' '.join(file_handler.reader(path, strict=True)).replace(',', ' ').split()
            try:
                values = np.array([float(t) for t in tokens])
            except ValueError:
                raise UsageError('g file `%s` contains non-numeric values' % path)
            if len(values) != mesh.num_vertices:
                raise UsageError('g file `%s` has %s values, the mesh has %s vertices' %
                                 (path, len(values), mesh.num_vertices))
            return values, 'file'
        raise UsageError('--g expects `x3` or `file PATH`')

    def do_solve(self):
        """
        Solve V t = (M/2 + K) g and write t per triangle.
        """
        args = self._args
        mesh = self._load_mesh()
        g, source = self._dirichlet_data(mesh)
        config = self._config(args.r, args.s)
        manifest = RunManifest('solve', dict(vars(args), **config.as_dict()))

        report_v, report_k = AssemblyReport(), AssemblyReport()
        with manifest.phase('assemble'):
            matrices = (assemble_M(mesh), assemble_V(mesh, config, report_v),
                        assemble_K(mesh, config, report_k))
        manifest.add_report('V', report_v)
        manifest.add_report('K', report_k)

        with manifest.phase('solve'):
            solution = solve_dirichlet(mesh, g, config, matrices=matrices)

        file_handler.write_csv(args.out, SOLVE_HEADER, enumerate(solution.flux))
        manifest.results = solution.as_dict()
        if mesh.is_closed and np.any(matrices[2].entries):
            manifest.results['laplace_identity_residual'] = \
                laplace_identity_residual(mesh, matrices[2], matrices[0])
        if source == 'x3' and _is_sphere(mesh):
            error = sphere_flux_error(mesh, solution.flux)
            manifest.results['relative_l2_error'] = error
            self._console.result('relative L2 error of t against n3: %.4e' % error)
        manifest.write(self._manifest_path(args.out))
        self._console.result('wrote t for %s triangles to %s (%s, residual %.2e)' %
                             (mesh.num_triangles, args.out, solution.method, solution.residual))

    def do_compare(self):
        """
        Assemble with both engines, or against a stored reference, and
        report their distance.
        """
        args = self._args
        mesh = self._load_mesh()
        config = self._config(args.r, args.s)
        manifest = RunManifest('compare', dict(vars(args), **config.as_dict()))

        with manifest.phase('oracle'):
            reference, source = self._reference(mesh, args.operator, manifest, 'oracle')
        report = AssemblyReport()
        with manifest.phase('analytic'):
            matrix = assemble(mesh, args.operator, config, report)
        manifest.add_report('analytic', report)

        error = frobenius_rel_error(matrix, reference)
        deviation = float(np.max(np.abs(matrix.entries - reference.entries)))
        manifest.results = dict(frobenius_rel_error=error, max_abs_deviation=deviation,
                                reference=source)
        manifest.write(self._manifest_path())
        self._console.result('%s: e=%.3e max|A-B|=%.3e analytic %.2fs %s %.2fs' %
                             (args.operator, error, deviation, manifest.timings['analytic'],
                              source, manifest.timings['oracle']))

    def do_info(self):
        """
        Print mesh statistics.
        """
        mesh = self._load_mesh()
        counts = pair_counts(mesh)
        self._console.result('N=%s M=%s area=%.6f closed=%s' %
                             (mesh.num_triangles, mesh.num_vertices, float(mesh.areas.sum()),
                              mesh.is_closed))
        self._console.result('pairs: ' + ' '.join('%s=%s' % (name, counts[name])
                                                  for name in ('identical', 'edge', 'vertex', 'disjoint')))


def run(argv, config, console):
    """
    Parse and run a command, mapping errors to exit codes.

    :param argv: The command line arguments without the program name.
    :type argv: list
    :param config: The config module.
    :param console: Console for progress and results.
    :type console: Console
    :return: The exit code.
    :rtype: int
    """
    try:
        args = build_parser(config).parse_args(argv)
        if args.quiet:
            console.quiet = True
        return CommandHandler(args, config, console).handle()
    except UsageError as ue:
        console.error('usage error: %s' % ue)
        return EXIT_USAGE
    except (MeshBaseError, MeshTooLargeError, FileHandlerError) as e:
        console.error('validation error: %s' % e)
        return EXIT_VALIDATION
    except (AnalyticBaseError, QuadratureBaseError, AssemblyBaseError) as e:
        log.error('numeric failure: %r' % e)
        console.error('numeric failure: %s' % e)
        return EXIT_NUMERIC
