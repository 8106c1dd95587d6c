"""Reference-solver checks and dense reassembly of the sparse operators."""

import numpy as np
import pytest

from dfmbench.flow_tpfa import (ConductivityField, FlowBC, assemble_flow,
                                dof_offsets, effective_normal,
                                effective_tangential, solve_flow)
from dfmbench.mesh_io import AxisRectangle, cartesian_dfm_mesher, \
    build_mixed_grid, parse_msh
from dfmbench.oracle import (dense_flow_matrix, dense_transport_recursion,
                             equidim_flow, equidim_single_fracture,
                             slab_cuts)
from dfmbench.transport import TracerBC, run_transport
from conftest import SMALLEST_DFM_MSH, solve_x_flow, x_flow_bc

X_DIRICHLET = {(0, 0): 1.0, (0, 1): 0.0}


def _uniform_cuts(n):
    return tuple(np.linspace(0.0, 1.0, n + 1) for _ in range(3))


# ---------------------------------------------------------------------------
# Equi-dimensional solver on its own
# ---------------------------------------------------------------------------

def test_equidim_patch_test():
    cuts = _uniform_cuts(4)
    cell_k = np.ones((4, 4, 4, 3))
    sol = equidim_flow(cuts, cell_k, X_DIRICHLET)
    xc = sol.centroids_1d(0)
    expected = np.broadcast_to((1.0 - xc)[:, None, None], (4, 4, 4))
    assert np.max(np.abs(sol.head - expected)) <= 1e-10


def test_slab_cuts_structure():
    cuts = slab_cuts(8, 0, 0.5, 1e-2)
    x = cuts[0]
    assert np.all(np.diff(x) > 0)
    for v in (0.5 - 5e-3, 0.5, 0.5 + 5e-3):
        assert np.min(np.abs(x - v)) < 1e-15
    assert len(cuts[1]) == 9 and len(cuts[2]) == 9


def test_degenerate_slab_matches_uniform_medium():
    # When the slab carries the same conductivity as the matrix the widened
    # grid must reproduce the uniform solution exactly.
    sol_f = equidim_single_fracture(4, 0, 0.5, 1e-2, 2.0, 2.0, 2.0,
                                    X_DIRICHLET)
    cell_k = np.full(tuple(len(c) - 1 for c in sol_f.cuts) + (3,), 2.0)
    sol_u = equidim_flow(sol_f.cuts, cell_k, X_DIRICHLET)
    assert np.max(np.abs(sol_f.head - sol_u.head)) <= 1e-12
    xc = sol_f.centroids_1d(0)
    expected = np.broadcast_to((1.0 - xc)[:, None, None], sol_f.head.shape)
    assert np.max(np.abs(sol_f.head - expected)) <= 1e-10


# ---------------------------------------------------------------------------
# Mixed-dimensional solution against the equi-dimensional reference
# ---------------------------------------------------------------------------

def _mixed_single_fracture(n, eps, k_t, kappa):
    grid = cartesian_dfm_mesher(
        n, [AxisRectangle(0, 0.5, (0.0, 0.0), (1.0, 1.0))],
        apertures={2: eps})
    sol = solve_x_flow(grid, {3: 1.0, 2: effective_tangential(k_t, eps)},
                       {2: effective_normal(kappa, eps, 2)})
    return grid, sol


def _layer_means(xc, head, lo, hi):
    return float(np.mean(head[(xc > lo) & (xc < hi)]))


def test_conductive_fracture_matches_reference():
    eps = 1e-2
    grid, mixed = _mixed_single_fracture(8, eps, 1e2, 1e2)
    oracle = equidim_single_fracture(8, 0, 0.5, eps, 1.0, 1e2, 1e2,
                                     X_DIRICHLET)
    cents = grid.subdomains[3].cell_centroids
    ref = oracle.head_at(cents)
    err = np.linalg.norm(mixed.head[3] - ref) / np.linalg.norm(ref)
    assert err <= 0.02


def test_blocking_fracture_jump_agrees():
    eps = 1e-2
    grid, mixed = _mixed_single_fracture(8, eps, 1e-4, 1e-4)
    oracle = equidim_single_fracture(8, 0, 0.5, eps, 1.0, 1e-4, 1e-4,
                                     X_DIRICHLET)
    # Window means one cell layer to each side, excluding the slab interior.
    xc3 = grid.subdomains[3].cell_centroids[:, 0]
    jump_mixed = (_layer_means(xc3, mixed.head[3], 0.375, 0.49)
                  - _layer_means(xc3, mixed.head[3], 0.51, 0.625))
    xo = oracle.centroids_1d(0)
    mean_left = float(np.mean(oracle.head[(xo > 0.375) & (xo < 0.49)]))
    mean_right = float(np.mean(oracle.head[(xo > 0.51) & (xo < 0.625)]))
    jump_ref = mean_left - mean_right
    assert jump_ref > 0.5          # the barrier carries most of the drop
    assert jump_mixed > 0.0
    assert abs(jump_mixed - jump_ref) <= 0.05 * abs(jump_ref)


# ---------------------------------------------------------------------------
# Dense reassembly
# ---------------------------------------------------------------------------

def _compare_dense(grid, cond, bc):
    system = assemble_flow(grid, cond, bc)
    a_dense, b_dense, offsets = dense_flow_matrix(grid, cond, bc)
    assert offsets == system.offsets
    scale = max(float(np.max(np.abs(a_dense))), 1.0)
    assert np.max(np.abs(system.matrix.to_dense() - a_dense)) <= 1e-12 * scale
    assert np.max(np.abs(system.rhs - b_dense)) <= 1e-12 * scale


def test_dense_matches_two_cell(two_cell_grid):
    cond = ConductivityField.from_values(two_cell_grid, {3: 1.0})
    _compare_dense(two_cell_grid, cond, x_flow_bc(two_cell_grid))


def test_dense_matches_unstructured():
    grid = build_mixed_grid(parse_msh(SMALLEST_DFM_MSH))
    cond = ConductivityField.from_values(grid, {3: 1.0, 2: 5.0}, {2: 7.0})
    sub = grid.subdomains[3]
    from dfmbench.mdgrid import DOMAIN_BOUNDARY
    boundary = np.nonzero(sub.boundary_tags == DOMAIN_BOUNDARY)[0]
    bc = FlowBC(grid)
    mask_d = np.zeros(sub.num_faces, dtype=bool)
    mask_d[boundary[0]] = True
    mask_n = np.zeros(sub.num_faces, dtype=bool)
    mask_n[boundary[1]] = True
    bc.set_dirichlet(3, mask_d, 2.5).set_neumann(3, mask_n, -0.75)
    _compare_dense(grid, cond, bc)


def test_dense_matches_crossing(crossing_grid):
    cond = ConductivityField.from_values(
        crossing_grid, {3: 1.0, 2: 3.0, 1: 0.5}, {2: 2e4, 1: 4e2})
    _compare_dense(crossing_grid, cond,
                   x_flow_bc(crossing_grid, dims=(3, 2)))


def test_dense_transport_recursion_matches(single_fracture_grid):
    grid = single_fracture_grid
    flow = solve_x_flow(grid, {3: 1.0, 2: 1.0}, {2: 2e4})
    inflow = TracerBC(grid)
    inflow.set_inflow(3, lambda c: np.abs(c[:, 0]) < 1e-12, 1.0)
    porosity = {3: 0.2, 2: 0.4}
    result = run_transport(grid, flow, porosity, dt=0.1, n_steps=5,
                           inflow_conc=inflow)
    dense_c, offsets = dense_transport_recursion(
        grid, flow, porosity, 0.1, 5, inflow_conc=inflow)
    for dim, sub in grid.subdomains.items():
        got = result.concentration[dim]
        ref = dense_c[offsets[dim]:offsets[dim] + sub.num_cells]
        assert np.max(np.abs(got - ref)) <= 1e-10
