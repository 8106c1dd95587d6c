"""Shared small grids and documents used across the test modules."""

import numpy as np
import pytest

from dfmbench.flow_tpfa import ConductivityField, FlowBC, solve_flow
from dfmbench.mesh_io import AxisRectangle, cartesian_dfm_mesher


# Minimal conforming DFM mesh: two tetrahedra sharing one tagged triangle.
SMALLEST_DFM_MSH = """$MeshFormat
2.2 0 8
$EndMeshFormat
$PhysicalNames
3
3 1 "MATRIX_0"
2 2 "FRACTURE_0"
2 3 "BOUNDARY_WEST"
$EndPhysicalNames
$Nodes
5
1 0.0 0.0 0.0
2 1.0 0.0 0.0
3 0.0 1.0 0.0
4 0.0 0.0 1.0
5 1.0 1.0 1.0
$EndNodes
$Elements
4
1 4 2 1 1 1 2 3 4
2 4 2 1 1 2 3 4 5
3 2 2 2 2 2 3 4
4 2 2 3 3 1 2 3
$EndElements
"""


@pytest.fixture(scope="session")
def two_cell_grid():
    """Two unit cubes in a row; interior face transmissibility 1 for K=1."""
    return cartesian_dfm_mesher((2, 1, 1), box=((0, 0, 0), (2, 1, 1)))


@pytest.fixture(scope="session")
def single_fracture_grid():
    """Unit cube, n=4, one fracture plane at x=0.5 with aperture 1e-2."""
    return cartesian_dfm_mesher(
        4, [AxisRectangle(0, 0.5, (0.0, 0.0), (1.0, 1.0))],
        apertures={2: 1e-2})


@pytest.fixture(scope="session")
def crossing_grid():
    """n=2 unit cube with two crossing fractures (1d line, no 0d point)."""
    return cartesian_dfm_mesher(
        2, [AxisRectangle(0, 0.5, (0.0, 0.0), (1.0, 1.0)),
            AxisRectangle(1, 0.5, (0.0, 0.0), (1.0, 1.0))],
        apertures={2: 1e-2, 1: 1e-4})


@pytest.fixture(scope="session")
def triple_grid():
    """n=2 unit cube with three crossing fractures (0d point at the center)."""
    return cartesian_dfm_mesher(
        2, [AxisRectangle(0, 0.5, (0.0, 0.0), (1.0, 1.0)),
            AxisRectangle(1, 0.5, (0.0, 0.0), (1.0, 1.0)),
            AxisRectangle(2, 0.5, (0.0, 0.0), (1.0, 1.0))],
        apertures={2: 1e-2, 1: 1e-4, 0: 1e-6})


def x_flow_bc(grid, h_left=1.0, h_right=0.0, dims=(3,)):
    """Dirichlet h_left at min x, h_right at max x, noflux elsewhere."""
    lo = grid.domain_box[0][0]
    hi = grid.domain_box[1][0]
    bc = FlowBC(grid)
    for dim in dims:
        if dim not in grid.subdomains:
            continue
        sub = grid.subdomains[dim]
        from dfmbench.mdgrid import DOMAIN_BOUNDARY
        on_b = sub.boundary_tags == DOMAIN_BOUNDARY
        left = on_b & (np.abs(sub.face_centroids[:, 0] - lo) < 1e-12)
        right = on_b & (np.abs(sub.face_centroids[:, 0] - hi) < 1e-12)
        if left.any():
            bc.set_dirichlet(dim, left, h_left)
        if right.any():
            bc.set_dirichlet(dim, right, h_right)
    return bc


def solve_x_flow(grid, tangential, normal=None, h_left=1.0, h_right=0.0,
                 **kw):
    cond = ConductivityField.from_values(grid, tangential, normal)
    bc = x_flow_bc(grid, h_left=h_left, h_right=h_right,
                   dims=tuple(sorted(grid.subdomains, reverse=True)))
    return solve_flow(grid, cond, bc, **kw)
