"""Benchmark case definitions and the end-to-end runner.

Four cases are built in: ``single`` (one large fracture with a matrix
heterogeneity), ``regular`` (nine axis-aligned fractures, high- and
low-conductive variants), ``small_features`` (eight fractures with
near-touching geometry) and ``field`` (a 52-fracture network).  Each run
solves the pressure equation, advects a tracer with 100 implicit steps and
writes the case's report files (results.csv, dol_*.csv, dot_*.csv) under
``<out>/<case>/results/<INSTITUTION>/<SCHEME>/``.
"""

from __future__ import annotations

import os
from dataclasses import dataclass
from importlib import resources

import numpy as np

from . import postproc, samples
from .flow_tpfa import (BoundaryConditionError, ConductivityField, FlowBC,
                        per_cell_values, solve_flow)
from .mesh_io import AxisRectangle, build_mixed_grid, cartesian_dfm_mesher, \
    parse_msh
from .transport import TracerBC, run_transport

CASES = ("single", "regular", "small_features", "field")

CASE_BOXES = {
    "single": ((0.0, 0.0, 0.0), (100.0, 100.0, 100.0)),
    "regular": ((0.0, 0.0, 0.0), (1.0, 1.0, 1.0)),
    "small_features": samples.SMALL_FEATURES_BOX,
    "field": samples.FIELD_BOX,
}

CASE_APERTURES = {
    "single": {2: 1e-2},
    "regular": {2: 1e-4, 1: 1e-8, 0: 1e-12},
    "small_features": {2: 1e-2, 1: 1e-4},
    "field": {2: 1e-2, 1: 1e-4},
}

CASE_REFINEMENTS = {"single": 3, "regular": 3, "small_features": 2,
                    "field": 2}


# ---------------------------------------------------------------------------
# Matrix sub-regions of the regular case
# ---------------------------------------------------------------------------

def _octants(lo, mid, hi):
    spans = ((lo, mid), (mid, hi))
    return [(spans[bx], spans[by], spans[bz])
            for bz in range(2) for by in range(2) for bx in range(2)]


def _regular_regions():
    # 7 octants of the unit cube (the x,y,z > 0.5 octant is subdivided),
    # then the 7 blocks of (0.5,1)^3 around (0.5,0.75)^3, then the 8
    # sub-octants of (0.5,0.75)^3 split at 0.625.
    regions = _octants(0.0, 0.5, 1.0)[:7]
    inner = _octants(0.5, 0.75, 1.0)
    regions += [inner[i] for i in (7, 5, 6, 4, 3, 1, 2)]
    regions += _octants(0.5, 0.625, 0.75)
    return tuple(regions)


REGULAR_REGIONS = _regular_regions()

# Low-conductivity matrix region of the regular case, as region ids.
REGULAR_LOW_REGIONS = frozenset((1, 5, 8, 12, 15, 19))


def regular_region_id(point):
    """Region id (0..21) of a point strictly inside one matrix block.

    Points on a dividing plane belong to no block and raise ValueError.
    """
    x, y, z = (float(v) for v in point)
    for rid, bounds in enumerate(REGULAR_REGIONS):
        if all(lo < v < hi for v, (lo, hi) in zip((x, y, z), bounds)):
            return rid
    raise ValueError(f"point {(x, y, z)} lies on a region boundary")


# ---------------------------------------------------------------------------
# Parameter tables (effective conductivities)
# ---------------------------------------------------------------------------

def case_parameters(case, cond=None):
    """Effective parameters, schedule and report layout for one case."""
    if case == "regular":
        if cond not in (0, 1):
            raise ValueError("the regular case requires cond 0 "
                             "(high-conductive) or 1 (low-conductive)")
    elif cond is not None:
        raise ValueError(f"case {case!r} has no conductivity variants")

    if case == "single":
        return {
            "tangential": {3: {1: 1e-6, 2: 1e-6, 3: 1e-5}, 2: 1e-3},
            "normal": {2: 20.0},
            "porosity": {3: {1: 0.2, 2: 0.2, 3: 0.25}, 2: 0.4},
            "t_end": 1e9, "dt": 1e7, "c_in": 1e-2,
        }
    if case == "regular":
        k3 = {i: (0.1 if i in REGULAR_LOW_REGIONS else 1.0)
              for i in range(22)}
        if cond == 0:
            cnd = {"k2": 1.0, "kappa2": 2e8, "k1": 1e-4, "kappa1": 2e4,
                   "kappa0": 2.0, "phi_frac": 0.9}
        else:
            cnd = {"k2": 1e-8, "kappa2": 2.0, "k1": 1e-12, "kappa1": 2e-4,
                   "kappa0": 2e-8, "phi_frac": 1e-2}
        return {
            "tangential": {3: k3, 2: cnd["k2"], 1: cnd["k1"]},
            "normal": {2: cnd["kappa2"], 1: cnd["kappa1"],
                       0: cnd["kappa0"]},
            # intersection points inherit the line porosity
            "porosity": {3: 0.1, 2: cnd["phi_frac"], 1: cnd["phi_frac"],
                         0: cnd["phi_frac"]},
            "t_end": 0.25, "dt": 0.25 / 100, "c_in": 1.0,
        }
    if case in ("small_features", "field"):
        return {
            "tangential": {3: 1.0, 2: 1e2, 1: 1.0},
            "normal": {2: 2e6, 1: 2e4},
            "porosity": {3: 0.2, 2: 0.2, 1: 0.2},
            "t_end": 1.0 if case == "small_features" else 5e3,
            "dt": 1e-2 if case == "small_features" else 50.0,
            "c_in": 1.0,
        }
    raise ValueError(f"unknown case {case!r}")


# ---------------------------------------------------------------------------
# Grids
# ---------------------------------------------------------------------------

def _packaged_text(*parts):
    path = resources.files("dfmbench").joinpath("data", *parts)
    try:
        return path.read_text()
    except (FileNotFoundError, NotADirectoryError):
        return None


def field_network_rectangles():
    """Fracture polygons of the field case, in file (= report) order."""
    text = _packaged_text("field", "fracture_network.csv")
    if text is None:
        text = samples.network_csv_text(samples.synthesize_field_network())
    polygons = samples.parse_network_csv(text)
    return [AxisRectangle.from_corners(p) for p in polygons]


def build_case_grid(case, refinement, mesh=None):
    """Mixed-dimensional grid for a case at one refinement level.

    An explicit ``mesh`` path overrides the built-in geometry; otherwise
    packaged sample meshes and the lattice mesher are used.
    """
    if case not in CASES:
        raise ValueError(f"unknown case {case!r}")
    if not 0 <= int(refinement) < CASE_REFINEMENTS[case]:
        raise ValueError(f"case {case!r} supports refinement levels "
                         f"0..{CASE_REFINEMENTS[case] - 1}")
    box = CASE_BOXES[case]
    apertures = CASE_APERTURES[case]
    if mesh is not None:
        with open(mesh) as handle:
            doc = parse_msh(handle.read())
        return build_mixed_grid(doc, domain_box=box, apertures=apertures)
    scale = 2 ** int(refinement)
    if case == "single":
        text = _packaged_text(f"single_refinement_{int(refinement)}.msh")
        doc = parse_msh(text) if text is not None \
            else samples.single_case_doc(refinement)
        return build_mixed_grid(doc, domain_box=box, apertures=apertures)
    if case == "regular":
        return cartesian_dfm_mesher(
            8 * scale, samples.REGULAR_FRACTURES, box=box,
            region_classifier=regular_region_id, apertures=apertures)
    if case == "small_features":
        n = tuple(v * scale for v in samples.SMALL_FEATURES_CELLS)
        return cartesian_dfm_mesher(n, samples.SMALL_FEATURES_FRACTURES,
                                    box=box, apertures=apertures)
    n = tuple(v * scale for v in samples.FIELD_CELLS)
    return cartesian_dfm_mesher(n, field_network_rectangles(), box=box,
                                apertures=apertures)


# ---------------------------------------------------------------------------
# Boundary conditions
# ---------------------------------------------------------------------------

def _plane_tol(case):
    lo, hi = (np.asarray(v) for v in CASE_BOXES[case])
    return 1e-9 * float(np.max(hi - lo))


def _patch_masks(grid, predicate, dims=(3, 2, 1)):
    """Nonempty {dim: boundary-face mask} for a centroid predicate."""
    masks = {}
    for dim in dims:
        if dim not in grid.subdomains or \
                grid.subdomains[dim].num_cells == 0:
            continue
        mask = postproc.boundary_faces(grid, dim, predicate)
        if np.any(mask):
            masks[dim] = mask
    return masks


def _apply_dirichlet(bc, masks, value):
    for dim, mask in masks.items():
        bc.set_dirichlet(dim, mask, value)


def _scaled_inflow(bc, grid, mask3, total):
    """Uniform Neumann influx on matrix faces, scaled so the summed rate
    matches ``total`` exactly on meshes that only approximate the patch."""
    area = float(np.sum(grid.subdomains[3].face_measures[mask3]))
    bc.set_neumann(3, mask3, total / area)
    return total / area


@dataclass
class _Patches:
    """Boundary-face masks a case reports on."""

    tracer_inlet: dict
    outlets: list          # list of {dim: mask}, one entry per outlet patch
    inlet3: np.ndarray | None = None   # matrix faces of the influx patch


def _flow_bc(case, grid, outlet_variant):
    if outlet_variant != "full" and case != "single":
        raise ValueError("outlet variants exist only for the single case")
    tol = _plane_tol(case)
    bc = FlowBC(grid)

    if case == "single":
        lo, hi = CASE_BOXES[case]

        def inlet(c):
            return (np.abs(c[:, 0] - lo[0]) <= tol) & (c[:, 2] > 90.0)

        def outlet(c):
            keep = np.abs(c[:, 1] - lo[1]) <= tol
            if outlet_variant == "band":
                keep &= c[:, 2] < 10.0
            return keep

        in_masks = _patch_masks(grid, inlet)
        out_masks = _patch_masks(grid, outlet)
        if not in_masks or not out_masks:
            raise BoundaryConditionError(
                "inlet or outlet patch matches no boundary faces")
        _apply_dirichlet(bc, in_masks, 4.0)
        _apply_dirichlet(bc, out_masks, 1.0)
        return bc, _Patches(in_masks, [out_masks])

    if case == "regular":
        def head_patch(c):
            return np.all(c > 0.875, axis=1)

        def flux_patch(c):
            return np.all(c < 0.25, axis=1)

        dir_masks = _patch_masks(grid, head_patch, dims=(3,))
        neu_masks = _patch_masks(grid, flux_patch, dims=(3,))
        if 3 not in dir_masks or 3 not in neu_masks:
            raise BoundaryConditionError(
                "head or influx patch matches no matrix faces")
        _apply_dirichlet(bc, dir_masks, 1.0)
        bc.set_neumann(3, neu_masks[3], -1.0)
        return bc, _Patches(neu_masks, [], inlet3=neu_masks[3])

    if case == "small_features":
        def inlet(c):
            return (np.abs(c[:, 1]) <= tol) & \
                (c[:, 2] > 1 / 3) & (c[:, 2] < 2 / 3)

        def out0(c):
            return (np.abs(c[:, 1] - 2.25) <= tol) & (c[:, 2] < 1 / 3)

        def out1(c):
            return (np.abs(c[:, 1] - 2.25) <= tol) & (c[:, 2] > 2 / 3)

        total = -1.0 / 3.0
    else:
        def inlet(c):
            on_top = (np.abs(c[:, 1] - 1500.0) <= tol) & (c[:, 0] < -200.0)
            on_west = (np.abs(c[:, 0] + 500.0) <= tol) & (c[:, 1] > 1200.0)
            return (on_top | on_west) & (c[:, 2] > 300.0)

        def out0(c):
            return (np.abs(c[:, 0] + 500.0) <= tol) & \
                (c[:, 1] < 400.0) & (c[:, 2] < 100.0)

        def out1(c):
            return (np.abs(c[:, 0] - 350.0) <= tol) & \
                (c[:, 1] < 400.0) & (c[:, 2] < 100.0)

        total = -1.2e5

    in_masks = _patch_masks(grid, inlet, dims=(3,))
    if 3 not in in_masks:
        raise BoundaryConditionError("influx patch matches no matrix faces")
    out_patches = [_patch_masks(grid, out0), _patch_masks(grid, out1)]
    for masks in out_patches:
        _apply_dirichlet(bc, masks, 0.0)
    _scaled_inflow(bc, grid, in_masks[3], total)
    return bc, _Patches(in_masks, out_patches, inlet3=in_masks[3])


# ---------------------------------------------------------------------------
# Per-case tracer observers (dot series, excluding the time column)
# ---------------------------------------------------------------------------

def _make_observer(case, grid, flow, params, patches):
    phi = per_cell_values(grid, params["porosity"])

    if case == "single":
        sub3 = grid.subdomains[3]
        mask33 = sub3.region_tags == 3
        w2 = grid.subdomains[2].aperture * phi[2]

        def observe(step, time, c):
            stored = postproc.region_integral(
                grid, 3, c[3], mask=mask33, weight=phi[3],
                name="matrix heterogeneity")
            in_frac = postproc.region_integral(grid, 2, c[2], weight=w2,
                                               name="fracture")
            out = sum(postproc.boundary_tracer_flux(grid, flow, c, dim, mask)
                      for dim, mask in patches.outlets[0].items())
            return stored, in_frac, out

        return observe

    if case == "regular":
        sub3 = grid.subdomains[3]
        masks = [sub3.region_tags == i for i in range(22)]

        def observe(step, time, c):
            return tuple(
                postproc.region_integral(grid, 3, c[3], mask=masks[i],
                                         average="measure",
                                         name=f"matrix block {i}")
                for i in range(22))

        return observe

    sub2 = grid.subdomains[2]
    n_frac = int(sub2.region_tags.max()) + 1 if sub2.num_cells else 0
    w2 = sub2.aperture * phi[2]
    masks = [sub2.region_tags == k for k in range(n_frac)]

    def observe(step, time, c):
        return tuple(
            postproc.region_integral(grid, 2, c[2], mask=masks[k],
                                     weight=w2, average="weight",
                                     name=f"fracture {k}")
            for k in range(n_frac))

    return observe


# ---------------------------------------------------------------------------
# Report files
# ---------------------------------------------------------------------------

_REPORT_LINES = {
    "single": [
        (3, (0.0, 100.0, 100.0), (100.0, 0.0, 0.0)),
        (2, (0.0, 100.0, 80.0), (100.0, 0.0, 20.0)),
    ],
    "regular": [(3, (0.0, 0.0, 0.0), (1.0, 1.0, 1.0))],
    "small_features": [
        (3, (0.5, 1.1, 0.0), (0.5, 1.1, 1.0)),
        (3, (0.0, 2.15, 0.5), (1.0, 2.15, 0.5)),
    ],
    "field": [
        (3, (350.0, 100.0, -100.0), (-500.0, 1500.0, 500.0)),
        (3, (-500.0, 100.0, -100.0), (350.0, 1500.0, 500.0)),
    ],
}


def _write_dol(path, grid, columns):
    """Write (arc, value) column pairs sampled over lines; log misses."""
    cols = []
    log_path = path + ".misses.log"
    if os.path.exists(log_path):
        os.remove(log_path)
    for label, dim, values, p0, p1 in columns:
        arc, sampled, misses = postproc.sample_over_line(grid, dim, values,
                                                         p0, p1)
        cols += [arc, sampled]
        if misses:
            postproc.write_miss_log(log_path, label, misses)
    postproc.write_dol(path, cols)
    return path


@dataclass
class RunSummary:
    """Diagnostics of one benchmark run, plus the files it wrote."""

    case: str
    refinement: int
    cond: int | None
    out_dir: str
    files: list
    cell_counts: list
    ndof: int
    nnz: int
    dt: float
    n_steps: int
    flow_residual: float
    inflow_total: float
    conservation: float
    budget_max: float
    c_min: float
    c_max: float
    outflow: tuple = ()
    mean_inlet_head: float | None = None


def run_case(case, refinement, cond=None, mesh=None, out=".",
             institution="LOCAL", scheme="TPFA", dt=None, solver_tol=1e-10,
             outlet_variant="full"):
    """Run one benchmark configuration and write its report files."""
    params = case_parameters(case, cond)
    refinement = int(refinement)
    grid = build_case_grid(case, refinement, mesh)
    conductivity = ConductivityField.from_values(
        grid, params["tangential"], params["normal"])
    bc, patches = _flow_bc(case, grid, outlet_variant)
    flow = solve_flow(grid, conductivity, bc, tol=solver_tol)

    dt_val = params["dt"] if dt is None else float(dt)
    n_steps = int(round(params["t_end"] / dt_val))
    if n_steps < 1 or abs(n_steps * dt_val - params["t_end"]) > \
            1e-9 * params["t_end"]:
        raise ValueError("the time step must divide the simulation time")

    tracer = TracerBC(grid)
    for dim, mask in patches.tracer_inlet.items():
        tracer.set_inflow(dim, mask, params["c_in"])
    observer = _make_observer(case, grid, flow, params, patches)
    result = run_transport(grid, flow, params["porosity"], dt_val, n_steps,
                           inflow_conc=tracer, observers=(observer,),
                           solver_tol=solver_tol)
    series = result.observations[0]

    out_dir = os.path.join(out, case, "results", institution, scheme)
    os.makedirs(out_dir, exist_ok=True)
    files = []

    def emit(name):
        return os.path.join(out_dir, name)

    # results.csv row for this refinement
    counts = grid.cell_counts()
    row = list(counts) + [flow.system.ndof, flow.system.matrix.nnz]
    outflow = ()
    mean_head = None
    if case in ("small_features", "field"):
        outflow = tuple(
            sum(postproc.boundary_flux(flow, dim, mask)
                for dim, mask in masks.items())
            for masks in patches.outlets)
        mean_head = postproc.mean_boundary_head(grid, flow, conductivity, 3,
                                                patches.inlet3, name="inlet")
        row += [float(outflow[0]), float(outflow[1]), float(mean_head)]
    results_name = f"results_cond_{cond}.csv" if case == "regular" \
        else "results.csv"
    postproc.upsert_results_row(emit(results_name), refinement, row)
    files.append(emit(results_name))

    # dot file (time series)
    if case == "single":
        dot_name = f"dot_refinement_{refinement}.csv"
    elif case == "regular":
        dot_name = f"dot_cond_{cond}.csv" if refinement == 1 else None
    elif case == "small_features":
        dot_name = f"dot_refinement_{refinement}.csv"
    else:
        dot_name = "dot.csv"
    if dot_name is not None:
        postproc.write_dot(emit(dot_name), result.times, list(series.T))
        files.append(emit(dot_name))

    # dol files (line samples)
    lines = _REPORT_LINES[case]
    if case == "single":
        mat = lines[0]
        frac = lines[1]
        name = f"dol_refinement_{refinement}.csv"
        _write_dol(emit(name), grid, [
            ("matrix head", 3, flow.head[3], mat[1], mat[2]),
            ("matrix concentration", 3, result.concentration[3],
             mat[1], mat[2]),
            ("fracture concentration", 2, result.concentration[2],
             frac[1], frac[2]),
        ])
        files.append(emit(name))
    elif case == "regular":
        name = f"dol_cond_{cond}_refinement_{refinement}.csv"
        _write_dol(emit(name), grid, [
            ("matrix head", 3, flow.head[3], lines[0][1], lines[0][2])])
        files.append(emit(name))
    else:
        for idx, (dim, p0, p1) in enumerate(lines):
            name = f"dol_line_{idx}_refinement_{refinement}.csv" \
                if case == "small_features" else f"dol_line_{idx}.csv"
            _write_dol(emit(name), grid, [
                ("matrix head", dim, flow.head[dim], p0, p1)])
            files.append(emit(name))

    return RunSummary(
        case=case, refinement=refinement, cond=cond, out_dir=out_dir,
        files=files, cell_counts=list(counts), ndof=flow.system.ndof,
        nnz=flow.system.matrix.nnz, dt=dt_val, n_steps=n_steps,
        flow_residual=flow.max_residual(),
        inflow_total=flow.boundary_inflow_total(),
        conservation=abs(flow.boundary_flux_total()) /
        max(abs(flow.boundary_inflow_total()), 1e-300),
        budget_max=float(np.max(np.abs(result.budget_residuals))),
        c_min=float(result.c_min.min()), c_max=float(result.c_max.max()),
        outflow=outflow, mean_inlet_head=mean_head)


# ---------------------------------------------------------------------------
# Case descriptions
# ---------------------------------------------------------------------------

def case_info(case, cond=None):
    """Human-readable parameter and output summary for one case."""
    if case == "regular" and cond is None:
        parts = [case_info(case, cond=c) for c in (0, 1)]
        return parts[0] + "\n" + parts[1]
    params = case_parameters(case, cond)
    box = CASE_BOXES[case]
    lines = [f"case: {case}" + (f" (cond={cond})" if cond is not None
                                else "")]
    lines.append(f"domain: {box[0]} to {box[1]}")
    lines.append(f"refinement levels: 0..{CASE_REFINEMENTS[case] - 1}")
    lines.append("effective tangential conductivity by dimension: "
                 f"{params['tangential']}")
    lines.append("effective normal coupling by dimension: "
                 f"{params['normal']}")
    lines.append(f"porosity by dimension: {params['porosity']}")
    lines.append(f"apertures: {CASE_APERTURES[case]}")
    lines.append(f"time horizon: {params['t_end']} s in "
                 f"{int(round(params['t_end'] / params['dt']))} steps "
                 f"of {params['dt']} s")
    lines.append(f"inflow concentration: {params['c_in']}")
    if case == "single":
        outputs = ["results.csv", "dot_refinement_R.csv",
                   "dol_refinement_R.csv"]
    elif case == "regular":
        outputs = [f"results_cond_{cond}.csv", f"dot_cond_{cond}.csv",
                   f"dol_cond_{cond}_refinement_R.csv"]
    elif case == "small_features":
        outputs = ["results.csv", "dot_refinement_R.csv",
                   "dol_line_0_refinement_R.csv",
                   "dol_line_1_refinement_R.csv"]
    else:
        outputs = ["results.csv", "dot.csv", "dol_line_0.csv",
                   "dol_line_1.csv"]
    lines.append("outputs: " + ", ".join(outputs))
    return "\n".join(lines) + "\n"
