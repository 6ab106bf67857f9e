from mesh.surface import (SurfaceMesh, TriangleGeometry, MeshBaseError, MeshParseError,
                          MeshValidationError, triangle_geometry, local_linear_coeffs)
from mesh.pairs import PairCase, PairClassification, classify_pair, neighbours, pair_counts
from mesh.generators import build_icosphere, build_bumpy_sphere, build_plate
from mesh.reader import load_mesh, save_mesh
