"""
A first flow solve on two cells
===============================

The smallest possible pressure problem: a 2x1x1 box split into two unit
cubes, unit conductivity, head fixed to 1 on the left face and 0 on the
right face. The two-point scheme is exact for this configuration, so the
cell heads land at 0.75 and 0.25 and the flux through every face is 0.5.
"""

import numpy as np

from dfmbench.flow_tpfa import ConductivityField, FlowBC, solve_flow
from dfmbench.mesh_io import cartesian_dfm_mesher

# A lattice mesh needs a cell shape and a bounding box; with no fracture
# rectangles the grid has a single 3d subdomain.
grid = cartesian_dfm_mesher((2, 1, 1), [], box=((0, 0, 0), (2, 1, 1)))
print("cells by dimension:", grid.cell_counts())

bc = FlowBC(grid)
bc.set_dirichlet(3, lambda c: np.abs(c[:, 0]) < 1e-12, 1.0)
bc.set_dirichlet(3, lambda c: np.abs(c[:, 0] - 2.0) < 1e-12, 0.0)

cond = ConductivityField.from_values(grid, {3: 1.0})
flow = solve_flow(grid, cond, bc)

print("heads:", flow.head[3])
print("face fluxes:", flow.face_flux[3])
print("largest cell imbalance:", flow.max_residual())
print("net boundary flux:", flow.boundary_flux_total())
