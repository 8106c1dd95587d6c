"""CSV dialect, line sampling, integrals and boundary diagnostics."""

import numpy as np
import pytest

from dfmbench.flow_tpfa import ConductivityField
from dfmbench.postproc import (DOL_ROWS, EmptySelectionError, FormatError,
                               boundary_faces, boundary_flux,
                               boundary_tracer_flux, format_value,
                               mean_boundary_head, parse_value, read_rows,
                               region_integral, sample_over_line,
                               upsert_results_row, write_dol, write_dot,
                               write_miss_log, write_rows)
from dfmbench.transport import TracerBC
from conftest import solve_x_flow

SAMPLE_LINES = ["0.0,3.36948657742311",
                "0.5,5.38490345323433",
                "1.0,8.34820934803293"]


# ---------------------------------------------------------------------------
# Value formatting
# ---------------------------------------------------------------------------

def test_format_value_kinds():
    assert format_value(3) == "3"
    assert format_value(np.int64(-12)) == "-12"
    assert format_value(0.1) == "0.1"
    assert format_value(np.float64(2.5)) == "2.5"
    assert format_value(float("nan")) == ""
    assert format_value(1.0 / 3.0) == "0.3333333333333333"


def test_parse_value_kinds():
    assert parse_value("3") == 3 and isinstance(parse_value("3"), int)
    assert parse_value("-0.25") == -0.25
    assert np.isnan(parse_value(""))


@pytest.mark.parametrize("value", [0.1, np.pi, 1e-300, 1e300,
                                   3.36948657742311, -7.25, 123456789,
                                   5.38490345323433])
def test_value_roundtrip_is_exact(value):
    assert parse_value(format_value(value)) == value


def test_rows_roundtrip_bytes(tmp_path):
    rows = [[0, 0, 64, 512, 576, 3392],
            [0.0, 3.36948657742311, float("nan")],
            [1.0 / 3.0, -1e-12, 2.0]]
    first = tmp_path / "a.csv"
    second = tmp_path / "b.csv"
    write_rows(first, rows)
    write_rows(second, read_rows(first))
    assert first.read_bytes() == second.read_bytes()


def test_sample_rows_reproduce_verbatim(tmp_path):
    path = tmp_path / "dol.csv"
    write_rows(path, [[0.0, 3.36948657742311],
                      [0.5, 5.38490345323433],
                      [1.0, 8.34820934803293]])
    assert path.read_text() == "\n".join(SAMPLE_LINES) + "\n"


# ---------------------------------------------------------------------------
# File writers
# ---------------------------------------------------------------------------

def test_write_dol_shape_rules(tmp_path):
    arc = np.linspace(0.0, 1.0, DOL_ROWS)
    vals = np.sin(arc)
    path = tmp_path / "dol.csv"
    write_dol(path, [arc, vals])
    lines = path.read_text().splitlines()
    assert len(lines) == DOL_ROWS
    assert all(line.count(",") == 1 for line in lines)

    with pytest.raises(FormatError):
        write_dol(path, [arc])
    with pytest.raises(FormatError):
        write_dol(path, [arc[:10], vals[:10]])


def test_write_dot_shape_rules(tmp_path):
    times = np.arange(1.0, 6.0)
    path = tmp_path / "dot.csv"
    write_dot(path, times, [times * 2.0, times * 3.0])
    rows = read_rows(path)
    assert len(rows) == 5
    assert all(len(r) == 3 for r in rows)
    assert rows[0] == [1.0, 2.0, 3.0]

    with pytest.raises(FormatError):
        write_dot(path, times, [times[:2]])


def test_upsert_results_row_orders_and_replaces(tmp_path):
    path = tmp_path / "results.csv"
    upsert_results_row(path, 1, [0, 0, 64, 4096, 9, 9])
    upsert_results_row(path, 0, [0, 0, 16, 512, 7, 7])
    rows = read_rows(path)
    assert rows[0][3] == 512 and rows[1][3] == 4096

    upsert_results_row(path, 1, [0, 0, 64, 4096, 8, 8])
    rows = read_rows(path)
    assert len(rows) == 2 and rows[1][4] == 8

    meta = (tmp_path / "results.csv.meta.json").read_text()
    assert '"refinements": [0, 1]' in meta


# ---------------------------------------------------------------------------
# Line sampling
# ---------------------------------------------------------------------------

def test_sample_constant_field(single_fracture_grid):
    grid = single_fracture_grid
    values = np.full(grid.subdomains[3].num_cells, 4.25)
    arc, out, misses = sample_over_line(
        grid, 3, values, (0.0, 0.0, 0.0), (1.0, 1.0, 1.0))
    assert misses == []
    assert np.all(out == 4.25)
    assert arc[0] == 0.0
    assert arc[-1] == pytest.approx(np.sqrt(3.0), rel=1e-14)
    steps = np.diff(arc)
    assert np.all(steps > 0)
    assert np.max(np.abs(steps - steps[0])) <= 1e-12


def test_sample_in_fracture_plane(single_fracture_grid):
    grid = single_fracture_grid
    values = grid.subdomains[2].cell_centroids[:, 1]
    arc, out, misses = sample_over_line(
        grid, 2, values, (0.5, 0.0, 0.5), (0.5, 1.0, 0.5), n=100)
    assert misses == []
    assert not np.any(np.isnan(out))
    assert set(np.round(out, 6)) == {0.125, 0.375, 0.625, 0.875}


def test_sample_coincident_endpoints(single_fracture_grid):
    with pytest.raises(ValueError):
        sample_over_line(single_fracture_grid, 3, np.zeros(64),
                         (0.5, 0.5, 0.5), (0.5, 0.5, 0.5))


def test_sample_nearest_cell_fallback(single_fracture_grid):
    grid = single_fracture_grid
    values = np.full(64, 2.0)
    # 1e-7 outside the domain: within the 1e-6 fallback tolerance.
    _, out, misses = sample_over_line(
        grid, 3, values, (-1e-7, 0.1, 0.1), (-1e-7, 0.9, 0.9), n=50)
    assert misses == []
    assert np.all(out == 2.0)
    # 1e-3 outside: beyond tolerance, sampled as NaN and reported.
    _, out, misses = sample_over_line(
        grid, 3, values, (-1e-3, 0.1, 0.1), (-1e-3, 0.9, 0.9), n=50)
    assert len(misses) == 50
    assert np.all(np.isnan(out))


def test_miss_log_appends(tmp_path):
    path = tmp_path / "misses.log"
    write_miss_log(path, "matrix_line", [(3, np.array([0.1, 0.2, 0.3]))])
    write_miss_log(path, "fracture_line", [(7, np.array([1.0, 2.0, 3.0]))])
    text = path.read_text()
    assert "matrix_line: sample 3" in text
    assert "fracture_line: sample 7" in text
    assert len(text.splitlines()) == 2


# ---------------------------------------------------------------------------
# Integrals and boundary quantities
# ---------------------------------------------------------------------------

def test_region_integral_weighted(two_cell_grid):
    ones = np.ones(2)
    assert region_integral(two_cell_grid, 3, ones) == pytest.approx(2.0)
    assert region_integral(two_cell_grid, 3, ones,
                           weight=0.25) == pytest.approx(0.5)
    assert region_integral(two_cell_grid, 3, np.zeros(2)) == 0.0


def test_region_integral_averages(two_cell_grid):
    vals = np.full(2, 3.5)
    assert region_integral(two_cell_grid, 3, vals,
                           average="measure") == pytest.approx(3.5)
    assert region_integral(two_cell_grid, 3, vals, weight=0.25,
                           average="weight") == pytest.approx(3.5)


def test_region_integral_empty_selection(two_cell_grid):
    with pytest.raises(EmptySelectionError) as err:
        region_integral(two_cell_grid, 3, np.ones(2),
                        mask=np.zeros(2, dtype=bool), name="inlet")
    assert "inlet" in str(err.value)


def test_boundary_flux_balance(two_cell_grid):
    flow = solve_x_flow(two_cell_grid, {3: 1.0})
    inlet = boundary_faces(two_cell_grid, 3,
                           lambda c: np.abs(c[:, 0]) < 1e-12)
    outlet = boundary_faces(two_cell_grid, 3,
                            lambda c: np.abs(c[:, 0] - 2.0) < 1e-12)
    q_in = boundary_flux(flow, 3, inlet)
    q_out = boundary_flux(flow, 3, outlet)
    assert q_in == pytest.approx(-0.5, abs=1e-12)
    assert q_out == pytest.approx(0.5, abs=1e-12)

    with pytest.raises(EmptySelectionError):
        boundary_flux(flow, 3, np.zeros(two_cell_grid.subdomains[3].num_faces,
                                        dtype=bool), name="nowhere")


def test_boundary_tracer_flux_upwinding(two_cell_grid):
    grid = two_cell_grid
    flow = solve_x_flow(grid, {3: 1.0})
    inlet = boundary_faces(grid, 3, lambda c: np.abs(c[:, 0]) < 1e-12)
    outlet = boundary_faces(grid, 3, lambda c: np.abs(c[:, 0] - 2.0) < 1e-12)
    conc = {3: np.ones(2)}
    bc = TracerBC(grid).set_inflow(3, inlet, 1.0)
    # Outflow carries the cell value, inflow the prescribed value.
    assert boundary_tracer_flux(grid, flow, conc, 3, outlet) == \
        pytest.approx(0.5, abs=1e-12)
    assert boundary_tracer_flux(grid, flow, conc, 3, inlet,
                                inflow_conc=bc) == \
        pytest.approx(-0.5, abs=1e-12)
    assert boundary_tracer_flux(grid, flow, conc, 3, inlet) == 0.0
    assert boundary_tracer_flux(grid, flow, {3: np.zeros(2)}, 3, outlet) == 0.0


def test_mean_boundary_head_exact_at_dirichlet(two_cell_grid):
    grid = two_cell_grid
    cond = ConductivityField.from_values(grid, {3: 1.0})
    flow = solve_x_flow(grid, {3: 1.0})
    left = boundary_faces(grid, 3, lambda c: np.abs(c[:, 0]) < 1e-12)
    right = boundary_faces(grid, 3, lambda c: np.abs(c[:, 0] - 2.0) < 1e-12)
    assert mean_boundary_head(grid, flow, cond, 3, left) == \
        pytest.approx(1.0, abs=1e-12)
    assert mean_boundary_head(grid, flow, cond, 3, right) == \
        pytest.approx(0.0, abs=1e-12)
