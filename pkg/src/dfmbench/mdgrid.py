"""Mixed-dimensional grid model.

A flow domain is decomposed by dimension: the 3d matrix, 2d fracture
surfaces, 1d intersection lines and 0d intersection points. Each dimension
is stored as one cell/face complex (SubdomainGrid); dimensional coupling is
stored as explicit face/cell pairings (InterfaceSet). Head is discontinuous
across lower-dimensional objects, so a face coinciding with a lower
dimensional cell never connects two same-dimensional cells directly; each
side keeps its own interface face and couples through the pairing.

All containers are immutable after construction and safe to share between
threads.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

# Face classification codes.
INTERIOR = 0
DOMAIN_BOUNDARY = 1
TIP = 2
INTERFACE = 3


@dataclass(frozen=True)
class SubdomainGrid:
    """Cell/face complex of a single dimension embedded in 3d space.

    Faces store one entry per side for interface faces: a fracture cell
    coinciding with a matrix facet yields two matrix faces (one per
    neighboring matrix cell) tagged INTERFACE. Face normals are unit vectors
    pointing out of ``face_cells[:, 0]``; for interior faces the second
    column holds the neighbor, otherwise -1. Dimension 0 carries a single
    cell of measure one and no faces; dimension 1 faces are points with
    measure one.
    """

    dim: int
    cell_measures: np.ndarray
    cell_centroids: np.ndarray
    region_tags: np.ndarray
    cell_vertices: tuple
    face_measures: np.ndarray
    face_centroids: np.ndarray
    face_normals: np.ndarray
    face_cells: np.ndarray
    boundary_tags: np.ndarray
    aperture: np.ndarray
    typical_length: np.ndarray

    @property
    def num_cells(self):
        return len(self.cell_measures)

    @property
    def num_faces(self):
        return len(self.face_measures)


@dataclass(frozen=True)
class InterfaceSet:
    """Pairings between dimension ``dim_low + 1`` cells and ``dim_low`` cells.

    Each pair couples one higher-dimensional cell through one of its
    interface faces to the coinciding lower-dimensional cell. ``area`` is
    the face measure; ``orientation`` is the sign relating the stored face
    normal to the outward direction of the higher-dimensional cell (+1 when
    the stored normal already points out of ``high_cell``).
    """

    dim_low: int
    high_face: np.ndarray
    high_cell: np.ndarray
    low_cell: np.ndarray
    area: np.ndarray
    orientation: np.ndarray

    @property
    def num_pairs(self):
        return len(self.low_cell)


@dataclass(frozen=True)
class MixedDimGrid:
    """Subdomain grids keyed by dimension plus the interface sets between them."""

    subdomains: dict
    interfaces: dict
    domain_box: np.ndarray | None = None

    def cell_counts(self):
        """Number of cells per dimension 0..3 (zero for absent dimensions)."""
        return [self.subdomains[d].num_cells if d in self.subdomains else 0
                for d in range(4)]

    @property
    def total_cells(self):
        return sum(self.cell_counts())


@dataclass(frozen=True)
class Violation:
    kind: str
    dim: int
    index: int
    message: str
    informational: bool = False


class JumpIncidence:
    """Sparse low-cell to interface-pair incidence for one interface set.

    ``apply(per_pair_flux)`` returns the jump per low cell: the sum of the
    paired higher-dimensional normal fluxes, with normals taken out of the
    higher-dimensional side.
    """

    def __init__(self, num_low_cells, pair_low_cells, signs):
        order = np.argsort(pair_low_cells, kind="stable")
        self.pair_ids = np.asarray(order, dtype=int)
        self.signs = np.asarray(signs, dtype=float)[order]
        counts = np.bincount(pair_low_cells, minlength=num_low_cells)
        self.indptr = np.concatenate(([0], np.cumsum(counts)))

    def entries(self, low_cell):
        sl = slice(self.indptr[low_cell], self.indptr[low_cell + 1])
        return list(zip(self.pair_ids[sl].tolist(), self.signs[sl].tolist()))

    def apply(self, per_pair):
        per_pair = np.asarray(per_pair, dtype=float)
        out = np.zeros(len(self.indptr) - 1)
        np.add.at(out, np.repeat(np.arange(len(out)),
                                 np.diff(self.indptr)),
                  self.signs * per_pair[self.pair_ids])
        return out


def jump_incidence(grid, dim_low):
    """Incidence map of the interface set coupling into dimension ``dim_low``.

    A dimension with no interface set yields an empty map.
    """
    sub = grid.subdomains.get(dim_low)
    nlow = sub.num_cells if sub is not None else 0
    iset = grid.interfaces.get(dim_low)
    if iset is None:
        return JumpIncidence(nlow, np.zeros(0, dtype=int), np.zeros(0))
    return JumpIncidence(nlow, iset.low_cell, iset.orientation)


def validate(grid, tol=1e-8):
    """Check structural and geometric invariants; returns a list of violations.

    An empty list means the grid is well formed. Violations flagged
    informational describe allowed but unusual structure (for example a
    one-sided fracture lying on the domain boundary).
    """
    out = []
    scale = _geometry_scale(grid)

    for dim, g in sorted(grid.subdomains.items()):
        if np.any(g.cell_measures <= 0.0):
            idx = int(np.argmin(g.cell_measures))
            out.append(Violation("cell_measure", dim, idx,
                                 f"non-positive cell measure in dim {dim}"))
        if dim == 0:
            if g.num_faces != 0:
                out.append(Violation("faces", 0, 0, "0d subdomain has faces"))
            if not np.allclose(g.cell_measures, 1.0):
                out.append(Violation("cell_measure", 0, 0,
                                     "0d cells must have measure 1"))
        elif np.any(g.face_measures <= 0.0):
            idx = int(np.argmin(g.face_measures))
            out.append(Violation("face_measure", dim, idx,
                                 f"non-positive face measure in dim {dim}"))
        if np.any(g.aperture <= 0.0):
            out.append(Violation("aperture", dim, 0,
                                 f"non-positive aperture in dim {dim}"))
        if dim == 3 and not np.allclose(g.aperture, 1.0):
            out.append(Violation("aperture", 3, 0, "3d aperture must be 1"))

        for f in range(g.num_faces):
            c0, c1 = g.face_cells[f]
            btag = g.boundary_tags[f]
            if c0 < 0 or c0 >= g.num_cells or c1 >= g.num_cells:
                out.append(Violation("adjacency", dim, f,
                                     "face references cell out of range"))
            elif btag == INTERIOR and c1 < 0:
                out.append(Violation("adjacency", dim, f,
                                     "interior face with a single cell"))
            elif btag != INTERIOR and c1 >= 0:
                out.append(Violation("adjacency", dim, f,
                                     "non-interior face with two cells"))

    for dim_low, iset in sorted(grid.interfaces.items()):
        high = grid.subdomains.get(dim_low + 1)
        low = grid.subdomains.get(dim_low)
        if high is None or low is None:
            out.append(Violation("interface", dim_low, 0,
                                 "interface set references absent dimension"))
            continue
        for p in range(iset.num_pairs):
            fc = int(iset.high_face[p])
            lc = int(iset.low_cell[p])
            hc = int(iset.high_cell[p])
            if fc < 0 or fc >= high.num_faces or lc < 0 or lc >= low.num_cells \
                    or hc < 0 or hc >= high.num_cells:
                out.append(Violation("interface", dim_low, p,
                                     "pair references entity out of range"))
                continue
            gap = np.linalg.norm(high.face_centroids[fc] - low.cell_centroids[lc])
            if gap > tol * scale:
                out.append(Violation("interface", dim_low, p,
                                     f"pair face centroid is {gap:.3e} away "
                                     "from its low cell"))

    # Every fracture cell interior to the matrix carries exactly two matrix
    # pairs; a single pair is allowed only for fractures on the domain
    # boundary and is reported as informational.
    if 2 in grid.interfaces and 2 in grid.subdomains:
        iset = grid.interfaces[2]
        ncells = grid.subdomains[2].num_cells
        # Out-of-range pairs were already reported above.
        in_range = iset.low_cell[(iset.low_cell >= 0)
                                 & (iset.low_cell < ncells)]
        counts = np.bincount(in_range, minlength=ncells)
        for c in np.flatnonzero(counts != 2):
            if counts[c] == 1 and _on_domain_box(grid,
                                                 grid.subdomains[2].cell_centroids[c],
                                                 tol * scale):
                out.append(Violation("pairing", 2, int(c),
                                     "one-sided fracture cell on the domain "
                                     "boundary", informational=True))
            else:
                out.append(Violation("pairing", 2, int(c),
                                     f"fracture cell has {counts[c]} matrix "
                                     "pairs, expected 2"))

    # Subdomains of different dimension must not occupy the same location.
    cents = {d: g.cell_centroids for d, g in grid.subdomains.items()}
    for d_lo in sorted(cents):
        for d_hi in sorted(cents):
            if d_lo >= d_hi:
                continue
            for i, c in enumerate(cents[d_lo]):
                clash = np.linalg.norm(cents[d_hi] - c, axis=1) <= 1e-12 * scale
                if np.any(clash):
                    out.append(Violation("overlap", d_lo, i,
                                         f"dim {d_lo} cell coincides with a "
                                         f"dim {d_hi} cell centroid"))
    return out


def _geometry_scale(grid):
    lo = np.full(3, np.inf)
    hi = np.full(3, -np.inf)
    for g in grid.subdomains.values():
        lo = np.minimum(lo, g.cell_centroids.min(axis=0))
        hi = np.maximum(hi, g.cell_centroids.max(axis=0))
    return max(float(np.max(hi - lo)), 1.0)


def _on_domain_box(grid, point, tol):
    if grid.domain_box is None:
        return False
    lo, hi = grid.domain_box
    return bool(np.any(np.abs(point - lo) <= tol) or
                np.any(np.abs(point - hi) <= tol))
