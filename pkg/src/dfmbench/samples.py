"""Built-in sample geometries for the benchmark cases.

The samples are sized for desk-scale runs and deliberately coarse.  The
regular case uses the exact published geometry (all coordinates sit on the
lattice).  The single-fracture case is meshed with a terrain-following
tetrahedral lattice whose interior surfaces track the fracture plane.  The
small-features case replaces the tilted and slanted fractures by nearby
axis-aligned rectangles; the crossing of fractures 4 and 5 degenerates to a
pair of parallel planes under that projection and is dropped.  The field
case ships a synthetic 52-fracture network generated from a fixed seed.
Generated mesh files carry a $SampleMeta section recording cell counts.
"""

from __future__ import annotations

import json

import numpy as np

from .mesh_io import AxisRectangle, Element, MshDocument, write_msh
from .postproc import format_value

# ---------------------------------------------------------------------------
# Kuhn subdivision of a hexahedron into six tetrahedra
# ---------------------------------------------------------------------------

_AXIS_PERMS = ((0, 1, 2), (0, 2, 1), (1, 0, 2), (1, 2, 0), (2, 0, 1),
               (2, 1, 0))


def _kuhn_tets(corner):
    """Six tets along the main diagonal of a hex.

    ``corner`` maps (bx, by, bz) bits to node ids.  Using the same pattern
    in every cell makes the induced face triangulations of neighbouring
    cells coincide.
    """
    tets = []
    for perm in _AXIS_PERMS:
        cur = [0, 0, 0]
        tet = [corner[0, 0, 0]]
        for axis in perm:
            cur[axis] = 1
            tet.append(corner[tuple(cur)])
        tets.append(tuple(tet))
    return tets


# ---------------------------------------------------------------------------
# Single-fracture case: terrain-following tetrahedral lattice
# ---------------------------------------------------------------------------

def single_case_doc(refinement=0):
    """Sample mesh for the single-fracture case.

    The box (0,100)^3 holds one planar fracture along z = 80 - 0.6 x and a
    horizontal material interface at z = 20.  Mesh columns interpolate
    between the surfaces z in {0, 20, 80 - 0.6 x, 100}; the middle band
    pinches to zero thickness at x = 100 where the fracture meets the
    interface, so coincident nodes are merged and collapsed tets dropped.
    Regions: MATRIX_1 above the fracture, MATRIX_2 between fracture and
    interface, MATRIX_3 below, FRACTURE_0 on the fracture plane.
    """
    scale = 2 ** int(refinement)
    nx = ny = 6 * scale
    lays = (2 * scale, 3 * scale, 3 * scale)
    xs = np.linspace(0.0, 100.0, nx + 1)
    ys = np.linspace(0.0, 100.0, ny + 1)

    def levels(x):
        zf = 80.0 - 0.6 * x
        return np.concatenate([
            np.linspace(0.0, 20.0, lays[0] + 1)[:-1],
            np.linspace(20.0, zf, lays[1] + 1)[:-1],
            np.linspace(zf, 100.0, lays[2] + 1)])

    zcols = [levels(x) for x in xs]
    ids = {}
    nodes = {}

    def nid(ix, iy, z):
        key = (ix, iy, round(float(z), 9))
        if key not in ids:
            ids[key] = len(ids) + 1
            nodes[ids[key]] = (float(xs[ix]), float(ys[iy]), float(z))
        return ids[key]

    elements = {}

    def add(etype, node_ids, physical):
        elements[len(elements) + 1] = Element(etype, tuple(node_ids),
                                              physical)

    nz = sum(lays)
    frac_level = lays[0] + lays[1]
    for k in range(nz):
        region = 3 if k < lays[0] else (2 if k < frac_level else 1)
        for j in range(ny):
            for i in range(nx):
                corner = {(bx, by, bz): nid(i + bx, j + by,
                                            zcols[i + bx][k + bz])
                          for bx in range(2) for by in range(2)
                          for bz in range(2)}
                for tet in _kuhn_tets(corner):
                    if len(set(tet)) == 4:
                        add("tetrahedron", tet, region)

    for j in range(ny):
        for i in range(nx):
            v00 = nid(i, j, zcols[i][frac_level])
            v10 = nid(i + 1, j, zcols[i + 1][frac_level])
            v11 = nid(i + 1, j + 1, zcols[i + 1][frac_level])
            v01 = nid(i, j + 1, zcols[i][frac_level])
            add("triangle", (v00, v10, v11), 4)
            add("triangle", (v00, v11, v01), 4)

    names = {1: (3, "MATRIX_1"), 2: (3, "MATRIX_2"), 3: (3, "MATRIX_3"),
             4: (2, "FRACTURE_0")}
    return MshDocument("2.2", nodes, elements, names)


def single_case_msh(refinement=0):
    """single_case_doc serialized with a $SampleMeta trailer."""
    doc = single_case_doc(refinement)
    n3 = sum(1 for el in doc.elements.values() if el.etype == "tetrahedron")
    n2 = sum(1 for el in doc.elements.values() if el.etype == "triangle")
    meta = {"case": "single", "refinement": int(refinement),
            "cells_3d": n3, "cells_2d": n2,
            "note": "coarse sample sized for desk-scale runs"}
    return write_msh(doc) + ("$SampleMeta\n" + json.dumps(meta, sort_keys=True)
                             + "\n$EndSampleMeta\n")


# ---------------------------------------------------------------------------
# Regular case: nine axis-aligned fractures in the unit cube
# ---------------------------------------------------------------------------

REGULAR_FRACTURES = (
    AxisRectangle(0, 0.5, (0.0, 0.0), (1.0, 1.0)),
    AxisRectangle(1, 0.5, (0.0, 0.0), (1.0, 1.0)),
    AxisRectangle(2, 0.5, (0.0, 0.0), (1.0, 1.0)),
    AxisRectangle(0, 0.75, (0.5, 0.5), (1.0, 1.0)),
    AxisRectangle(2, 0.75, (0.5, 0.5), (1.0, 1.0)),
    AxisRectangle(1, 0.75, (0.5, 0.5), (1.0, 1.0)),
    AxisRectangle(1, 0.625, (0.5, 0.5), (0.75, 0.75)),
    AxisRectangle(0, 0.625, (0.5, 0.5), (0.75, 0.75)),
    AxisRectangle(2, 0.625, (0.5, 0.5), (0.75, 0.75)),
)

# ---------------------------------------------------------------------------
# Small-features case: axis-aligned stand-ins on a 1/16 lattice
# ---------------------------------------------------------------------------

# Tilted fractures 2 and 3 are replaced by horizontal planes through their
# mid heights, the slanted pair 4/5 by parallel vertical planes (their
# mutual crossing is lost), 6/7 keep their true axis-aligned shape with
# corners snapped to the lattice.  Contacts of 1, 4, 5, 6, 7 with the large
# horizontal fracture 0 survive the projection.
SMALL_FEATURES_FRACTURES = (
    AxisRectangle(2, 0.5, (1 / 16, 4 / 16), (15 / 16, 32 / 16)),
    AxisRectangle(0, 0.5, (1 / 16, 1 / 16), (5 / 16, 15 / 16)),
    AxisRectangle(2, 11 / 16, (1 / 16, 16 / 16), (15 / 16, 35 / 16)),
    AxisRectangle(2, 5 / 16, (1 / 16, 16 / 16), (15 / 16, 35 / 16)),
    AxisRectangle(0, 3 / 16, (30 / 16, 6 / 16), (35 / 16, 10 / 16)),
    AxisRectangle(0, 4 / 16, (30 / 16, 6 / 16), (35 / 16, 10 / 16)),
    AxisRectangle(0, 12 / 16, (30 / 16, 6 / 16), (35 / 16, 10 / 16)),
    AxisRectangle(0, 13 / 16, (30 / 16, 6 / 16), (35 / 16, 10 / 16)),
)

SMALL_FEATURES_BOX = ((0.0, 0.0, 0.0), (1.0, 2.25, 1.0))
SMALL_FEATURES_CELLS = (16, 36, 16)

# ---------------------------------------------------------------------------
# Field case: synthetic fracture network on a coarse lattice
# ---------------------------------------------------------------------------

FIELD_BOX = ((-500.0, 100.0, -100.0), (350.0, 1500.0, 500.0))
FIELD_CELLS = (17, 14, 6)
_FIELD_SEED = 20240814


def synthesize_field_network(count=52, seed=_FIELD_SEED):
    """Vertical axis-aligned rectangles on the coarse field lattice.

    Rejection sampling keeps coplanar rectangles disjoint and allows at
    most one fracture crossing per vertical lattice column, so the network
    has line intersections but no intersection points.
    """
    rng = np.random.default_rng(seed)
    lo = np.asarray(FIELD_BOX[0])
    hi = np.asarray(FIELD_BOX[1])
    ncell = FIELD_CELLS
    step = (hi - lo) / ncell
    rects = []
    claimed = set()
    columns = set()
    for _ in range(20000):
        if len(rects) == count:
            break
        axis = int(rng.integers(0, 2))
        other = 1 - axis
        plane = int(rng.integers(1, ncell[axis]))
        u0 = int(rng.integers(0, ncell[other] - 1))
        u1 = u0 + int(rng.integers(2, min(7, ncell[other] - u0) + 1))
        v0 = int(rng.integers(0, ncell[2] - 1))
        v1 = v0 + int(rng.integers(2, min(5, ncell[2] - v0) + 1))
        cells = {(axis, plane, u, v)
                 for u in range(u0, u1) for v in range(v0, v1)}
        if cells & claimed:
            continue
        new_columns = set()
        ok = True
        for r in rects:
            if r["axis"] != other:
                continue
            crosses = (r["u0"] <= plane <= r["u1"] and
                       u0 <= r["plane"] <= u1)
            if not crosses:
                continue
            zlo = max(v0, r["v0"])
            zhi = min(v1, r["v1"])
            if zhi <= zlo:
                if zhi == zlo:
                    ok = False  # point contact, reject outright
                    break
                continue
            column = (plane, r["plane"]) if axis == 0 else (r["plane"], plane)
            if column in columns or column in new_columns:
                ok = False
                break
            new_columns.add(column)
        if not ok:
            continue
        rects.append({"axis": axis, "plane": plane, "u0": u0, "u1": u1,
                      "v0": v0, "v1": v1})
        claimed |= cells
        columns |= new_columns
    if len(rects) < count:
        raise RuntimeError("field network synthesis did not converge")

    corners = []
    for r in rects:
        axis, other = r["axis"], 1 - r["axis"]
        a = lo[axis] + r["plane"] * step[axis]
        ulo = lo[other] + r["u0"] * step[other]
        uhi = lo[other] + r["u1"] * step[other]
        zlo = lo[2] + r["v0"] * step[2]
        zhi = lo[2] + r["v1"] * step[2]
        quad = np.empty((4, 3))
        quad[:, axis] = a
        quad[:, other] = (ulo, uhi, uhi, ulo)
        quad[:, 2] = (zlo, zlo, zhi, zhi)
        corners.append(quad)
    return corners


def network_csv_text(corner_list):
    """One polygon per line: corner coordinates flattened to 3n fields."""
    lines = [",".join(format_value(float(v)) for v in
                      np.asarray(quad, dtype=float).ravel())
             for quad in corner_list]
    return "\n".join(lines) + "\n"


def parse_network_csv(text):
    """Polygons from a fracture network file, one per line."""
    polygons = []
    for line in text.splitlines():
        if not line.strip():
            continue
        values = np.array([float(v) for v in line.split(",")])
        if values.size % 3 != 0 or values.size < 9:
            raise ValueError("each network line must hold 3n coordinates "
                             "of at least three corners")
        polygons.append(values.reshape(-1, 3))
    return polygons


def write_sample_data(dest):
    """Regenerate the packaged sample data files under ``dest``."""
    import os

    os.makedirs(os.path.join(dest, "field"), exist_ok=True)
    with open(os.path.join(dest, "single_refinement_0.msh"), "w") as handle:
        handle.write(single_case_msh(0))
    with open(os.path.join(dest, "field", "fracture_network.csv"),
              "w") as handle:
        handle.write(network_csv_text(synthesize_field_network()))
