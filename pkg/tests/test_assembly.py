import numpy as np
import pytest

from conftest import TAU
from assembly import (AssemblyBaseError, DimensionMismatchError, MeshTooLargeError, SolverError,
                      DenseMatrix, frobenius_rel_error, Engine, Operator, AssemblyConfig,
                      AssemblyReport, check_mesh_size, assemble, assemble_M, assemble_V,
                      assemble_K, laplace_identity_residual, Factorization, solve_dense,
                      solve_dirichlet, sphere_flux_error, oracle_matrix)
from analytic import slp_identical
from mesh import (SurfaceMesh, PairCase, triangle_geometry, classify_pair, build_icosphere,
                  build_bumpy_sphere, build_plate)
from quadrature import Kernel, QuadratureOrderError, RegularizedIntegrand, oracle_pair_integral
from util.file_handler import BemmFormatError


@pytest.fixture(scope='module')
def icosahedron():
    return build_icosphere(0)


@pytest.fixture(scope='module')
def icosphere1():
    return build_icosphere(1)


def test_mass_matrix_single_triangle():
    M = assemble_M(SurfaceMesh(TAU, [(0, 1, 2)]))
    np.testing.assert_allclose(M.entries, [[1.0 / 6.0] * 3], rtol=1e-15)


def test_mass_matrix_sums(icosahedron):
    M = assemble_M(icosahedron)
    assert M.shape == (20, 12)
    np.testing.assert_allclose(M.entries.sum(axis=1), icosahedron.areas, rtol=1e-14)
    assert M.entries.sum() == pytest.approx(icosahedron.areas.sum(), rel=1e-14)
    # every vertex of the icosahedron touches five triangles
    assert np.all(np.count_nonzero(M.entries, axis=0) == 5)


def test_single_layer_on_plate_is_symmetric_and_positive():
    mesh = build_plate(1)
    V = assemble_V(mesh, AssemblyConfig(r=8))
    assert V.shape == (2, 2)
    np.testing.assert_array_equal(V.entries, V.entries.T)
    assert np.all(V.entries > 0)
    assert np.all(np.linalg.eigvalsh(V.entries) > 0)


def test_double_layer_on_plate_is_zero():
    mesh = build_plate(2)
    K = assemble_K(mesh, AssemblyConfig(r=4))
    assert K.shape == (8, 9)
    np.testing.assert_array_equal(K.entries, np.zeros((8, 9)))
    with pytest.raises(AssemblyBaseError, match='K is zero'):
        laplace_identity_residual(mesh, K, assemble_M(mesh))


@pytest.mark.parametrize('operator', [Operator.V, Operator.K])
def test_engines_agree_on_icosahedron(icosahedron, operator):
    analytic = assemble(icosahedron, operator, AssemblyConfig(r=16, s=18))
    oracle = assemble(icosahedron, operator, AssemblyConfig(r=20, s=20, engine=Engine.ORACLE))
    assert frobenius_rel_error(analytic, oracle) <= 1e-8


@pytest.mark.slow
@pytest.mark.parametrize('operator', [Operator.V, Operator.K])
def test_engines_agree_on_icosphere(icosphere1, operator):
    analytic = assemble(icosphere1, operator, AssemblyConfig(r=16, s=18, threads=0))
    oracle = assemble(icosphere1, operator, AssemblyConfig(r=20, s=20, engine=Engine.ORACLE,
                                                           threads=0))
    assert frobenius_rel_error(analytic, oracle) <= 1e-8


def test_oracle_engine_matches_pairwise_integrals(icosahedron):
    # the triangles around one vertex form a fan without disjoint pairs
    fan = SurfaceMesh(icosahedron.vertices,
                      icosahedron.triangles[(icosahedron.triangles == 0).any(axis=1)])
    config = AssemblyConfig(r=6, s=8, engine=Engine.ORACLE)
    V = assemble_V(fan, config)
    K = assemble_K(fan, config)

    expected_K = np.zeros(fan.num_vertices)
    cases = set()
    for j in range(1, fan.num_triangles):
        classification = classify_pair(fan, 0, j)
        cases.add(classification.case)
        slp = RegularizedIntegrand.from_pair(fan, classification, Kernel.SLP)
        assert V.entries[0, j] == pytest.approx(oracle_pair_integral(slp, 8), rel=1e-12)
        dlp = RegularizedIntegrand.from_pair(fan, classification, Kernel.DLP)
        expected_K[fan.triangles[j]] += oracle_pair_integral(dlp, 8)

    assert cases == {PairCase.SHARED_EDGE, PairCase.SHARED_VERTEX}
    np.testing.assert_allclose(K.entries[0], expected_K, rtol=1e-12, atol=1e-15)


def test_single_layer_is_exactly_symmetric():
    mesh = build_bumpy_sphere(1, amplitude=0.15)
    V = assemble_V(mesh, AssemblyConfig(r=4))
    np.testing.assert_array_equal(V.entries, V.entries.T)


def test_interior_laplace_identity(icosphere1):
    K = assemble_K(icosphere1, AssemblyConfig(r=12))
    assert laplace_identity_residual(icosphere1, K, assemble_M(icosphere1)) <= 1e-3


@pytest.mark.parametrize('operator', [Operator.V, Operator.K])
def test_result_does_not_depend_on_threads(icosphere1, operator):
    single = assemble(icosphere1, operator, AssemblyConfig(r=4, threads=1))
    pooled = assemble(icosphere1, operator, AssemblyConfig(r=4, threads=4))
    np.testing.assert_array_equal(single.entries, pooled.entries)


def test_report_counts_bundles_per_disjoint_pair(icosphere1):
    r = 6
    for operator in (Operator.V, Operator.K):
        report = AssemblyReport()
        assemble(icosphere1, operator, AssemblyConfig(r=r), report)
        pairs = report.evaluated_pairs['disjoint']
        assert pairs > 0
        assert report.evaluations['disjoint_antiderivative_bundles'] <= r * r * pairs
        assert sum(report.pair_counts.values()) == 80 * 80
        assert report.timings['total'] > 0


def test_cholesky_succeeds_on_icosphere(icosphere1):
    V = assemble_V(icosphere1, AssemblyConfig(r=6))
    _, method = solve_dense(V, np.ones(V.rows))
    assert method == Factorization.CHOLESKY


@pytest.fixture(scope='module')
def icosphere2():
    return build_icosphere(2)


def assert_decreasing(errors, floor=1e-11):
    """ Strictly decreasing, except for single steps that stall below floor. """
    stalled = False
    for before, after in zip(errors, errors[1:]):
        if after < before:
            stalled = False
            continue
        assert after < floor and before < floor and not stalled, errors
        stalled = True


def test_assert_decreasing():
    assert_decreasing([1e-3, 1e-6, 1e-12, 2e-12, 1e-13])
    with pytest.raises(AssertionError):
        assert_decreasing([1e-3, 2e-3])
    with pytest.raises(AssertionError):
        assert_decreasing([1e-12, 2e-12, 3e-12])


@pytest.mark.slow
def test_convergence_on_icosphere_level_2(icosphere2):
    reference_config = AssemblyConfig(r=20, s=20, engine=Engine.ORACLE, threads=0)
    errors = {}
    for operator in (Operator.V, Operator.K):
        reference = assemble(icosphere2, operator, reference_config)
        errors[operator] = [frobenius_rel_error(assemble(icosphere2, operator,
                                                         AssemblyConfig(r=r, threads=0)), reference)
                            for r in range(2, 13)]
        assert_decreasing(errors[operator])

    assert errors[Operator.V][-1] <= 1e-9
    assert errors[Operator.K][-1] <= 1e-8
    assert all(k >= v for v, k in zip(errors[Operator.V], errors[Operator.K]))


@pytest.mark.slow
def test_cholesky_succeeds_on_icosphere_level_2(icosphere2):
    V = assemble_V(icosphere2, AssemblyConfig(r=8, threads=0))
    _, method = solve_dense(V, np.ones(V.rows))
    assert method == Factorization.CHOLESKY


@pytest.mark.slow
def test_bundle_counts_on_icosphere_level_2(icosphere2):
    config = AssemblyConfig(r=8, s=10, threads=0)
    for operator in (Operator.V, Operator.K):
        report = AssemblyReport()
        assemble(icosphere2, operator, config, report)
        pairs = report.evaluated_pairs['disjoint']
        assert pairs > 0
        assert report.evaluations['disjoint_antiderivative_bundles'] <= config.r ** 2 * pairs
        assert sum(report.pair_counts.values()) == 320 * 320


def test_zero_dirichlet_data_gives_zero_flux(icosahedron):
    solution = solve_dirichlet(icosahedron, np.zeros(12), AssemblyConfig(r=4))
    np.testing.assert_array_equal(solution.flux, np.zeros(20))
    assert solution.residual == 0.0


def test_dirichlet_reuses_matrices(icosahedron):
    config = AssemblyConfig(r=6)
    matrices = (assemble_M(icosahedron), assemble_V(icosahedron, config),
                assemble_K(icosahedron, config))
    g = icosahedron.vertices[:, 2]
    fresh = solve_dirichlet(icosahedron, g, config)
    reused = solve_dirichlet(icosahedron, g, config, matrices=matrices)
    np.testing.assert_array_equal(fresh.flux, reused.flux)
    with pytest.raises(DimensionMismatchError):
        solve_dirichlet(icosahedron, g[:-1], config, matrices=matrices)


@pytest.mark.slow
def test_dirichlet_flux_converges_on_the_sphere():
    errors = []
    for level in (2, 3):
        mesh = build_icosphere(level)
        solution = solve_dirichlet(mesh, mesh.vertices[:, 2], AssemblyConfig(r=6, threads=0))
        errors.append(sphere_flux_error(mesh, solution.flux))
    assert errors[0] <= 0.1
    assert errors[1] < errors[0]


def test_solve_dense_falls_back_to_lu():
    x, method = solve_dense(DenseMatrix([[0.0, 1.0], [1.0, 0.0]]), [2.0, 3.0])
    assert method == Factorization.LU
    np.testing.assert_allclose(x, [3.0, 2.0])
    with pytest.raises(SolverError):
        solve_dense(DenseMatrix([[1.0, 1.0], [1.0, 1.0]]), [1.0, 1.0])
    with pytest.raises(DimensionMismatchError):
        solve_dense(DenseMatrix([[1.0, 0.0], [0.0, 1.0]]), [1.0, 1.0, 1.0])


def test_dense_matrix_rejects_bad_entries():
    with pytest.raises(DimensionMismatchError):
        DenseMatrix([1.0, 2.0])
    with pytest.raises(DimensionMismatchError):
        DenseMatrix(np.zeros((0, 3)))
    with pytest.raises(AssemblyBaseError, match='non-finite'):
        DenseMatrix([[1.0, np.inf]])


def test_dense_matrix_is_read_only():
    matrix = DenseMatrix([[1.0, 2.0], [3.0, 4.0]])
    with pytest.raises(ValueError):
        matrix.entries[0, 0] = 5.0
    assert matrix.frobenius_norm() == pytest.approx(np.sqrt(30.0))


def test_bemm_round_trip(tmp_path):
    matrix = DenseMatrix(np.random.default_rng(1).normal(size=(4, 7)))
    path = str(tmp_path / 'out' / 'matrix.bemm')
    matrix.to_bemm(path)
    with open(path, 'rb') as f:
        assert f.read(4) == b'BEMM'
    loaded = DenseMatrix.from_bemm(path)
    assert loaded.shape == (4, 7)
    np.testing.assert_array_equal(loaded.entries, matrix.entries)


def test_bemm_rejects_corrupt_files(tmp_path):
    path = tmp_path / 'matrix.bemm'
    DenseMatrix(np.eye(3)).to_bemm(str(path))
    data = path.read_bytes()

    path.write_bytes(b'MTRX' + data[4:])
    with pytest.raises(BemmFormatError, match='bad magic'):
        DenseMatrix.from_bemm(str(path))

    path.write_bytes(data[:-8])
    with pytest.raises(BemmFormatError, match='expected 72 bytes'):
        DenseMatrix.from_bemm(str(path))

    path.write_bytes(data[:6])
    with pytest.raises(BemmFormatError, match='truncated header'):
        DenseMatrix.from_bemm(str(path))


def test_matrix_csv(tmp_path):
    path = str(tmp_path / 'matrix.csv')
    DenseMatrix([[1.0, 0.1], [2.0, 3.0]]).to_csv(path)
    with open(path) as f:
        lines = f.read().splitlines()
    assert lines[0] == 'row,col,value'
    assert lines[2] == '0,1,0.1'
    assert len(lines) == 5


def test_frobenius_rel_error():
    reference = DenseMatrix([[1.0, -2.0], [0.5, 4.0]])
    assert frobenius_rel_error(DenseMatrix(1.01 * reference.entries), reference) == \
        pytest.approx(0.01, rel=1e-12)
    assert frobenius_rel_error(reference, reference) == 0.0
    with pytest.raises(DimensionMismatchError):
        frobenius_rel_error(reference, DenseMatrix(np.eye(3)))
    with pytest.raises(AssemblyBaseError):
        frobenius_rel_error(reference, DenseMatrix(np.zeros((2, 2))))


def test_identity_residual_checks_shapes(icosahedron):
    M = assemble_M(icosahedron)
    with pytest.raises(DimensionMismatchError):
        laplace_identity_residual(icosahedron, DenseMatrix(np.ones((20, 11))), M)


def test_assembly_config():
    config = AssemblyConfig(r=5)
    assert (config.r, config.s, config.engine, config.threads) == (5, 7, Engine.SEMI_ANALYTIC, 1)
    assert AssemblyConfig(threads=0).threads >= 1
    for r in (0, 33, 2.5):
        with pytest.raises(QuadratureOrderError):
            AssemblyConfig(r=r)
    with pytest.raises(QuadratureOrderError):
        AssemblyConfig(r=31)
    with pytest.raises(AssemblyBaseError):
        AssemblyConfig(engine='fast')


def test_mesh_size_guard(icosphere1):
    check_mesh_size(icosphere1)
    with pytest.raises(MeshTooLargeError, match='coarser mesh'):
        check_mesh_size(icosphere1, limit=50)


def test_assemble_rejects_unknown_operator(icosahedron):
    with pytest.raises(AssemblyBaseError):
        assemble(icosahedron, 'W', AssemblyConfig())


def test_oracle_matrix():
    triangle = SurfaceMesh(TAU, [(0, 1, 2)])
    V = oracle_matrix(triangle, Kernel.SLP, 16, 16)
    assert V.shape == (1, 1)
    assert V.entries[0, 0] == pytest.approx(slp_identical(triangle_geometry(triangle, 0)), rel=1e-8)

    pair = SurfaceMesh(list(TAU) + [(1.0, 0.0, 1.0)], [(0, 1, 2), (1, 0, 3)])
    V = oracle_matrix(pair, Kernel.SLP, 16, 16)
    assert V.entries[0, 1] == pytest.approx(V.entries[1, 0], rel=1e-13)
    assert oracle_matrix(pair, Kernel.DLP, 8, 8).shape == (2, 4)
    with pytest.raises(AssemblyBaseError):
        oracle_matrix(pair, 'hypersingular', 8, 8)
