"""Implicit upwind tracer transport: exact steps, budgets, guard rails."""

import numpy as np
import pytest

from dfmbench.flow_tpfa import (ConductivityField, DIRICHLET, FlowBC,
                                solve_flow)
from dfmbench.mdgrid import DOMAIN_BOUNDARY
from dfmbench.mesh_io import cartesian_dfm_mesher
from dfmbench.transport import (NonConservativeFlowError, TracerBC,
                                assemble_transport, run_transport)
from conftest import solve_x_flow, x_flow_bc


def _left_inflow(grid, conc):
    bc = TracerBC(grid)
    bc.set_inflow(3, lambda c: np.abs(c[:, 0]) < 1e-12, conc)
    return bc


@pytest.fixture(scope="module")
def unit_cell():
    grid = cartesian_dfm_mesher((1, 1, 1))
    flow = solve_x_flow(grid, {3: 1.0})
    return grid, flow


def test_single_cell_exact_sequence(unit_cell):
    # One unit cell between h=1 and h=0: both half transmissibilities are 2,
    # the cell head is 0.5 and both boundary fluxes have magnitude 1. With
    # phi = dt = 1 each implicit step solves (1 + 1) c_new = c_old + 1.
    grid, flow = unit_cell
    result = run_transport(grid, flow, {3: 1.0}, dt=1.0, n_steps=2,
                           inflow_conc=_left_inflow(grid, 1.0))
    assert result.concentration[3] == pytest.approx([0.75], abs=1e-14)
    assert result.c_max == pytest.approx([0.5, 0.75], abs=1e-14)
    assert np.max(np.abs(result.budget_residuals)) <= 1e-14
    assert result.inflow_mass == pytest.approx(2.0, abs=1e-14)
    assert result.outflow_mass == pytest.approx(1.25, abs=1e-14)
    assert result.mass_final - result.mass_initial == pytest.approx(
        result.inflow_mass - result.outflow_mass, abs=1e-14)


def test_closed_box_preserves_concentration():
    grid = cartesian_dfm_mesher(2)
    sub = grid.subdomains[3]
    mask = np.zeros(sub.num_faces, dtype=bool)
    mask[np.nonzero(sub.boundary_tags == DOMAIN_BOUNDARY)[0][0]] = True
    bc = FlowBC(grid).set_dirichlet(3, mask, 1.0)
    flow = solve_flow(grid, ConductivityField.from_values(grid, {3: 1.0}), bc)
    initial = {3: np.full(8, 0.3)}
    result = run_transport(grid, flow, {3: 1.0}, dt=0.1, n_steps=5,
                           initial=initial)
    assert result.concentration[3] == pytest.approx(np.full(8, 0.3),
                                                    abs=1e-13)
    assert np.max(np.abs(result.budget_residuals)) <= 1e-13


def test_zero_inflow_concentration_stays_zero(unit_cell):
    grid, flow = unit_cell
    result = run_transport(grid, flow, {3: 1.0}, dt=1.0, n_steps=3)
    assert np.all(result.c_max == 0.0)
    assert np.all(result.c_min == 0.0)


def test_column_advection_budget_and_monotonicity():
    grid = cartesian_dfm_mesher((10, 1, 1), box=((0, 0, 0), (10, 1, 1)))
    flow = solve_x_flow(grid, {3: 1.0}, h_left=10.0, h_right=0.0)
    last = int(np.argmax(grid.subdomains[3].cell_centroids[:, 0]))
    breakthrough = lambda step, t, c: c[3][last]
    result = run_transport(grid, flow, {3: 1.0}, dt=0.5, n_steps=40,
                           inflow_conc=_left_inflow(grid, 1.0),
                           observers=(breakthrough,))
    assert np.max(np.abs(result.budget_residuals)) <= 1e-12
    assert np.all(result.c_min >= -1e-12)
    assert np.all(result.c_max <= 1.0 + 1e-12)
    curve = result.observations[0]
    assert np.all(np.diff(curve) >= -1e-12)
    assert curve[-1] > 0.5
    assert result.mass_final - result.mass_initial == pytest.approx(
        result.inflow_mass - result.outflow_mass,
        abs=1e-12 * max(result.inflow_mass, 1.0))


def test_tampered_flow_is_rejected():
    grid = cartesian_dfm_mesher((2, 1, 1), box=((0, 0, 0), (2, 1, 1)))
    flow = solve_x_flow(grid, {3: 1.0})
    flow.residual[0] += 1.0
    with pytest.raises(NonConservativeFlowError):
        assemble_transport(grid, flow, {3: 1.0}, dt=1.0)


def test_condensed_flow_is_rejected(crossing_grid):
    flow = solve_x_flow(crossing_grid, {3: 1.0, 2: 1e2, 1: 0.0},
                        {2: 2e4, 1: 2e4}, condense_lower=True)
    with pytest.raises(NotImplementedError):
        assemble_transport(crossing_grid, flow, {3: 1.0, 2: 1.0, 1: 1.0},
                           dt=1.0)


@pytest.mark.parametrize("dt", [0.0, -0.5])
def test_nonpositive_dt_is_rejected(unit_cell, dt):
    grid, flow = unit_cell
    with pytest.raises(ValueError):
        assemble_transport(grid, flow, {3: 1.0}, dt=dt)


def test_inflow_only_acts_on_flagged_faces(unit_cell):
    grid, flow = unit_cell
    bc = _left_inflow(grid, 1.0)
    assert np.sum(bc.kind[3] == DIRICHLET) == 1
    # Faces left at NOFLUX contribute nothing even if a value were stored.
    system = assemble_transport(grid, flow, {3: 1.0}, dt=1.0, inflow_conc=bc)
    assert float(np.sum(system.inflow_rhs)) == pytest.approx(1.0, abs=1e-14)


def test_observer_times_and_steps(unit_cell):
    grid, flow = unit_cell
    seen = []
    obs = lambda step, t, c: seen.append((step, t)) or c[3][0]
    result = run_transport(grid, flow, {3: 1.0}, dt=0.25, n_steps=4,
                           observers=(obs,))
    assert [s for s, _ in seen] == [1, 2, 3, 4]
    assert [t for _, t in seen] == pytest.approx([0.25, 0.5, 0.75, 1.0])
    assert result.times == pytest.approx([0.25, 0.5, 0.75, 1.0])
    assert len(result.observations[0]) == 4


def test_initial_condition_sets_starting_mass():
    grid = cartesian_dfm_mesher(2)
    sub = grid.subdomains[3]
    mask = np.zeros(sub.num_faces, dtype=bool)
    mask[np.nonzero(sub.boundary_tags == DOMAIN_BOUNDARY)[0][0]] = True
    bc = FlowBC(grid).set_dirichlet(3, mask, 1.0)
    flow = solve_flow(grid, ConductivityField.from_values(grid, {3: 1.0}), bc)
    result = run_transport(grid, flow, {3: 0.2}, dt=1.0, n_steps=1,
                           initial={3: np.full(8, 0.5)})
    assert result.mass_initial == pytest.approx(0.2 * 1.0 * 0.5, abs=1e-14)
