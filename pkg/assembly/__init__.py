from assembly.errors import (AssemblyBaseError, DimensionMismatchError, MeshTooLargeError,
                             PairEvaluationError, SolverError)
from assembly.matrix import DenseMatrix, frobenius_rel_error
from assembly.assembler import (Engine, Operator, AssemblyConfig, AssemblyReport, MAX_TRIANGLES,
                                check_mesh_size, assemble, assemble_M, assemble_V, assemble_K,
                                oracle_matrix, laplace_identity_residual)
from assembly.solver import (DirichletSolution, Factorization, solve_dense, solve_dirichlet,
                             sphere_flux_error)
