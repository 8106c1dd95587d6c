"""Grid model invariants, validation and the jump-operator incidence."""

import numpy as np
import pytest

from dfmbench import bench
from dfmbench.mdgrid import (InterfaceSet, MixedDimGrid, jump_incidence,
                             validate)
from dfmbench.mesh_io import cartesian_dfm_mesher


def hard_violations(grid):
    return [v for v in validate(grid) if not v.informational]


def test_single_hex_cell_validates_clean():
    grid = cartesian_dfm_mesher(1)
    assert grid.cell_counts() == [0, 0, 0, 1]
    assert validate(grid) == []


def test_fracture_grid_validates_clean(single_fracture_grid):
    assert hard_violations(single_fracture_grid) == []


def test_regular_case_grid_validates_clean():
    grid = bench.build_case_grid("regular", 0)
    assert hard_violations(grid) == []


def test_corrupted_pairing_is_reported(single_fracture_grid):
    grid = single_fracture_grid
    iset = grid.interfaces[2]
    # Re-point every pair at low cell 0: all but the true neighbors are now
    # geometrically distant from their face.
    bad = InterfaceSet(2, iset.high_face, iset.high_cell,
                       np.zeros_like(iset.low_cell), iset.area,
                       iset.orientation)
    tampered = MixedDimGrid(grid.subdomains, {2: bad}, grid.domain_box)
    kinds = {v.kind for v in hard_violations(tampered)}
    assert "interface" in kinds


def test_pair_out_of_range_is_reported(single_fracture_grid):
    grid = single_fracture_grid
    iset = grid.interfaces[2]
    low = iset.low_cell.copy()
    low[0] = grid.subdomains[2].num_cells + 7
    bad = InterfaceSet(2, iset.high_face, iset.high_cell, low, iset.area,
                       iset.orientation)
    tampered = MixedDimGrid(grid.subdomains, {2: bad}, grid.domain_box)
    assert any(v.kind == "interface" and "out of range" in v.message
               for v in hard_violations(tampered))


def test_interface_without_subdomain_is_reported(single_fracture_grid):
    grid = single_fracture_grid
    orphan = {2: grid.interfaces[2],
              1: InterfaceSet(1, np.zeros(0, dtype=int),
                              np.zeros(0, dtype=int), np.zeros(0, dtype=int),
                              np.zeros(0), np.zeros(0))}
    tampered = MixedDimGrid(grid.subdomains, orphan, grid.domain_box)
    assert any(v.kind == "interface" and "absent dimension" in v.message
               for v in hard_violations(tampered))


def test_fracture_cells_carry_two_matrix_pairs(single_fracture_grid):
    counts = np.bincount(single_fracture_grid.interfaces[2].low_cell,
                         minlength=single_fracture_grid.subdomains[2].num_cells)
    assert np.all(counts == 2)


def test_pair_areas_recount_total_fracture_area(single_fracture_grid):
    # Every interior fracture cell is paired once per side, so the pair
    # areas sum to twice the fracture area.
    grid = single_fracture_grid
    total = float(np.sum(grid.interfaces[2].area))
    assert total == pytest.approx(
        2.0 * float(np.sum(grid.subdomains[2].cell_measures)), rel=1e-12)


def test_jump_sums_four_equal_branch_fluxes(crossing_grid):
    # Two crossing fractures: each line cell sees four fracture branches.
    grid = crossing_grid
    inc = jump_incidence(grid, 1)
    pairs = grid.interfaces[1]
    assert grid.subdomains[1].num_cells == 2
    assert pairs.num_pairs == 8
    jump = inc.apply(np.full(pairs.num_pairs, 0.5))
    assert np.allclose(jump, 2.0)


def test_jump_cancels_antisymmetric_fluxes(single_fracture_grid):
    grid = single_fracture_grid
    inc = jump_incidence(grid, 2)
    pairs = grid.interfaces[2]
    flux = np.zeros(pairs.num_pairs)
    # +q from one side of cell 0, -q from the other
    sides = np.nonzero(pairs.low_cell == 0)[0]
    flux[sides[0]] = 3.5
    flux[sides[1]] = -3.5
    jump = inc.apply(flux)
    assert jump[0] == 0.0
    assert np.all(jump == 0.0)


def test_jump_matches_bruteforce_loop(crossing_grid):
    grid = crossing_grid
    rng = np.random.default_rng(7)
    for dim in (2, 1):
        inc = jump_incidence(grid, dim)
        pairs = grid.interfaces[dim]
        flux = rng.normal(size=pairs.num_pairs)
        expect = np.zeros(grid.subdomains[dim].num_cells)
        for p in range(pairs.num_pairs):
            expect[pairs.low_cell[p]] += pairs.orientation[p] * flux[p]
        assert np.array_equal(inc.apply(flux), expect)


def test_jump_entries_lists_pairs(crossing_grid):
    inc = jump_incidence(crossing_grid, 1)
    pairs = crossing_grid.interfaces[1]
    entries = inc.entries(0)
    assert len(entries) == 4
    assert all(pairs.low_cell[p] == 0 for p, _ in entries)


def test_jump_incidence_empty_without_interfaces():
    grid = cartesian_dfm_mesher(1)
    inc = jump_incidence(grid, 2)
    assert inc.apply(np.zeros(0)).shape == (0,)


def test_zero_d_cells_are_degenerate_unit_cells(triple_grid):
    sub0 = triple_grid.subdomains[0]
    assert sub0.num_cells == 1
    assert sub0.num_faces == 0
    assert sub0.cell_measures[0] == 1.0
    assert np.allclose(sub0.cell_centroids[0], (0.5, 0.5, 0.5))
    assert hard_violations(triple_grid) == []


def test_every_builtin_case_grid_validates_clean():
    for case in bench.CASES:
        grid = bench.build_case_grid(case, 0)
        assert hard_violations(grid) == [], case
