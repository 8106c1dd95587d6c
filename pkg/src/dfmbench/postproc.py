"""Derived quantities and the benchmark CSV dialect.

CSV files are comma-delimited with no header. Floats are written with the
shortest decimal representation that round-trips to the same double, so
re-reading an emitted file and re-serializing it reproduces identical
bytes. Missing values (line samples with no containing cell) are written
as empty fields.
"""

from __future__ import annotations

import json
import math
import re

import numpy as np

from . import geometry
from .flow_tpfa import half_transmissibility
from .mdgrid import DOMAIN_BOUNDARY

DOL_ROWS = 2000


class EmptySelectionError(ValueError):
    pass


class FormatError(ValueError):
    pass


# ---------------------------------------------------------------------------
# CSV dialect
# ---------------------------------------------------------------------------

_INT_RE = re.compile(r"-?\d+$")


def format_value(value):
    """Canonical field text: ints bare, floats at full precision, NaN empty."""
    if isinstance(value, (int, np.integer)) and not isinstance(value, bool):
        return str(int(value))
    value = float(value)
    if math.isnan(value):
        return ""
    return repr(value)


def parse_value(text):
    if text == "":
        return float("nan")
    if _INT_RE.match(text):
        return int(text)
    return float(text)


def write_rows(path, rows):
    lines = [",".join(format_value(v) for v in row) for row in rows]
    with open(path, "w") as handle:
        handle.write("\n".join(lines) + "\n")


def read_rows(path):
    with open(path) as handle:
        text = handle.read()
    return [[parse_value(field) for field in line.split(",")]
            for line in text.splitlines()]


def write_dol(path, columns):
    """Line-sample file: pairs of (arc length, value) columns, 2000 rows."""
    columns = [np.asarray(c, dtype=float) for c in columns]
    if len(columns) % 2 != 0:
        raise FormatError("dol files hold (arc length, value) column pairs")
    for c in columns:
        if c.shape != (DOL_ROWS,):
            raise FormatError(f"dol columns must have {DOL_ROWS} rows, "
                              f"got {c.shape[0]}")
    write_rows(path, zip(*columns))


def write_dot(path, times, series):
    """Time-series file: time first, one column per reported series."""
    times = np.asarray(times, dtype=float)
    columns = [times] + [np.asarray(s, dtype=float) for s in series]
    for c in columns[1:]:
        if c.shape != times.shape:
            raise FormatError("dot columns must match the time column length")
    write_rows(path, zip(*columns))


def upsert_results_row(path, refinement, row):
    """Insert or replace one results.csv row, keeping rows ordered by
    refinement level (coarsest first) via a sidecar json map."""
    meta_path = str(path) + ".meta.json"
    try:
        with open(meta_path) as handle:
            refinements = json.load(handle)["refinements"]
        existing = read_rows(path)
    except FileNotFoundError:
        refinements, existing = [], []
    table = dict(zip(refinements, existing))
    table[int(refinement)] = list(row)
    order = sorted(table)
    write_rows(path, [table[r] for r in order])
    with open(meta_path, "w") as handle:
        json.dump({"refinements": order}, handle)
        handle.write("\n")


# ---------------------------------------------------------------------------
# Line sampling
# ---------------------------------------------------------------------------

def _segment_distances(points, p0, p1):
    d = p1 - p0
    t = np.clip((points - p0) @ d / (d @ d), 0.0, 1.0)
    proj = p0 + t[:, None] * d
    return np.linalg.norm(points - proj, axis=1)


def _contains(dim, verts, points, tol):
    if dim == 3:
        if len(verts) == 4:
            return geometry.points_in_tet(points, verts, 1e-9)
        lo, hi = verts.min(axis=0), verts.max(axis=0)
        return geometry.points_in_box(points, lo, hi, tol)
    if dim == 2:
        return geometry.points_in_polygon3d(points, verts, tol)
    return geometry.points_on_segment(points, verts[0], verts[-1], tol)


def sample_over_line(grid, dim, cell_values, p0, p1, n=DOL_ROWS,
                     miss_tol=1e-6):
    """Piecewise-constant sampling at ``n`` equidistant points.

    Points inside no cell fall back to the nearest cell within ``miss_tol``
    meters; beyond that the sample is NaN and reported in the miss list.
    Returns (arc lengths, values, misses) with misses as (index, point).
    """
    p0 = np.asarray(p0, dtype=float)
    p1 = np.asarray(p1, dtype=float)
    cell_values = np.asarray(cell_values, dtype=float)
    if np.allclose(p0, p1):
        raise ValueError("line endpoints coincide")
    s = np.linspace(0.0, 1.0, n)
    points = p0 + s[:, None] * (p1 - p0)
    arc = s * float(np.linalg.norm(p1 - p0))

    sub = grid.subdomains[dim]
    scale = float(np.max(np.linalg.norm(
        sub.cell_centroids - sub.cell_centroids.mean(axis=0), axis=1)))
    geom_tol = 1e-9 * max(scale, 1.0)

    radii = np.array([np.max(np.linalg.norm(v - c, axis=1)) for v, c in
                      zip(sub.cell_vertices, sub.cell_centroids)])
    near = _segment_distances(sub.cell_centroids, p0, p1) <= radii + miss_tol
    candidates = np.nonzero(near)[0]

    values = np.full(n, np.nan)
    found = np.zeros(n, dtype=bool)
    for cell in candidates:
        open_idx = np.nonzero(~found)[0]
        if open_idx.size == 0:
            break
        inside = _contains(dim, sub.cell_vertices[cell], points[open_idx],
                           geom_tol)
        hit = open_idx[inside]
        values[hit] = cell_values[cell]
        found[hit] = True

    misses = []
    open_idx = np.nonzero(~found)[0]
    if open_idx.size and candidates.size:
        best = np.full(open_idx.size, np.inf)
        best_cell = np.full(open_idx.size, -1)
        for cell in candidates:
            dist = geometry.point_to_cell_distance(
                points[open_idx], sub.cell_vertices[cell], dim)
            closer = dist < best
            best[closer] = dist[closer]
            best_cell[closer] = cell
        ok = best <= miss_tol
        values[open_idx[ok]] = cell_values[best_cell[ok]]
        found[open_idx[ok]] = True
    for idx in np.nonzero(~found)[0]:
        misses.append((int(idx), points[idx]))
    return arc, values, misses


def write_miss_log(path, line_name, misses):
    with open(path, "a") as handle:
        for idx, point in misses:
            handle.write(f"{line_name}: sample {idx} at "
                         f"({point[0]!r}, {point[1]!r}, {point[2]!r}) "
                         "has no cell within tolerance\n")


# ---------------------------------------------------------------------------
# Integrals and boundary fluxes
# ---------------------------------------------------------------------------

def region_integral(grid, dim, values, mask=None, weight=None,
                    average=None, name="region"):
    """Weighted integral over selected cells of one subdomain.

    ``average='measure'`` divides by the selected plain measure,
    ``average='weight'`` by the weighted measure. An empty selection
    raises, naming the selector.
    """
    sub = grid.subdomains[dim]
    if mask is None:
        mask = np.ones(sub.num_cells, dtype=bool)
    mask = np.asarray(mask, dtype=bool)
    if not np.any(mask):
        raise EmptySelectionError(f"selector {name!r} matches no cells "
                                  f"in dimension {dim}")
    w = np.ones(sub.num_cells) if weight is None \
        else np.broadcast_to(np.asarray(weight, dtype=float), (sub.num_cells,))
    contrib = w[mask] * np.asarray(values)[mask] * sub.cell_measures[mask]
    total = float(np.sum(contrib))
    if average == "measure":
        return total / float(np.sum(sub.cell_measures[mask]))
    if average == "weight":
        return total / float(np.sum(w[mask] * sub.cell_measures[mask]))
    return total


def boundary_faces(grid, dim, predicate):
    """Mask of domain-boundary faces whose centroid satisfies the predicate."""
    sub = grid.subdomains[dim]
    mask = np.asarray(predicate(sub.face_centroids), dtype=bool)
    return mask & (sub.boundary_tags == DOMAIN_BOUNDARY)


def boundary_flux(flow, dim, mask, name="boundary"):
    """Signed outward flux summed over the selected boundary faces."""
    mask = np.asarray(mask, dtype=bool)
    if not np.any(mask):
        raise EmptySelectionError(f"selector {name!r} matches no faces")
    return float(np.sum(flow.face_flux[dim][mask]))


def boundary_tracer_flux(grid, flow, conc_by_dim, dim, mask, inflow_conc=None,
                         name="boundary"):
    """Advected tracer rate through selected boundary faces.

    Outflow faces carry the adjacent cell concentration, inflow faces the
    prescribed inflow concentration (zero when unset), matching the upwind
    rule of the transport operator.
    """
    mask = np.asarray(mask, dtype=bool)
    if not np.any(mask):
        raise EmptySelectionError(f"selector {name!r} matches no faces")
    sub = grid.subdomains[dim]
    faces = np.nonzero(mask)[0]
    flux = flow.face_flux[dim][faces]
    cells = sub.face_cells[faces, 0]
    c_up = np.asarray(conc_by_dim[dim])[cells]
    if inflow_conc is not None:
        cbar = inflow_conc.value[dim][faces] * \
            (inflow_conc.kind[dim][faces] != 0)
    else:
        cbar = np.zeros(faces.size)
    return float(np.sum(np.where(flux >= 0, flux * c_up, flux * cbar)))


def mean_boundary_head(grid, flow, conductivity, dim, mask, name="boundary"):
    """Area-weighted mean of the one-sided face heads on selected faces.

    The face head is reconstructed from the adjacent cell head and the
    recovered face flux through the one-sided transmissibility, which is
    exact for the two-point flux expression.
    """
    mask = np.asarray(mask, dtype=bool)
    if not np.any(mask):
        raise EmptySelectionError(f"selector {name!r} matches no faces")
    sub = grid.subdomains[dim]
    faces = np.nonzero(mask)[0]
    cells = sub.face_cells[faces, 0]
    k = conductivity.tangential[dim]
    t_half = half_transmissibility(
        sub.face_measures[faces], sub.face_normals[faces],
        sub.face_centroids[faces] - sub.cell_centroids[cells], k[cells])
    h_face = flow.head[dim][cells] - flow.face_flux[dim][faces] / t_half
    areas = sub.face_measures[faces] * sub.aperture[cells]
    return float(np.sum(areas * h_face) / np.sum(areas))
