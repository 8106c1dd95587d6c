"""Independent reference solvers used to cross-check the main kernels.

Nothing here shares assembly code with the production modules: the
equi-dimensional solver discretizes fractures as thin anisotropic slabs on
a tensor-product grid, and the dense checkers rebuild the mixed-dimensional
operators entry by entry with plain loops.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.sparse
import scipy.sparse.linalg

from .mdgrid import DOMAIN_BOUNDARY, INTERIOR


@dataclass
class EquiDimSolution:
    cuts: tuple
    head: np.ndarray

    def centroids_1d(self, axis):
        c = self.cuts[axis]
        return 0.5 * (c[:-1] + c[1:])

    def head_at(self, points):
        """Nearest-cell head sample at the given points."""
        points = np.atleast_2d(points)
        idx = []
        for axis in range(3):
            i = np.searchsorted(self.cuts[axis], points[:, axis], "right") - 1
            idx.append(np.clip(i, 0, len(self.cuts[axis]) - 2))
        return self.head[tuple(idx)]


def equidim_flow(cuts, cell_k, dirichlet):
    """Cell-centered finite volumes on a tensor-product hexahedral grid.

    ``cell_k`` has shape (nx, ny, nz, 3) holding a diagonal conductivity
    per cell; ``dirichlet`` maps (axis, side) to a boundary head, all other
    boundaries are no-flow. Face transmissibilities combine the two
    one-sided conductances harmonically.
    """
    cuts = tuple(np.asarray(c, dtype=float) for c in cuts)
    shape = tuple(len(c) - 1 for c in cuts)
    widths = [np.diff(c) for c in cuts]
    ncell = int(np.prod(shape))

    def lin(i, j, k):
        return (i * shape[1] + j) * shape[2] + k

    a = scipy.sparse.lil_matrix((ncell, ncell))
    b = np.zeros(ncell)
    for axis in range(3):
        t_ax = [ax for ax in range(3) if ax != axis]
        for i in range(shape[0]):
            for j in range(shape[1]):
                for k in range(shape[2]):
                    idx = [i, j, k]
                    if idx[axis] + 1 >= shape[axis]:
                        continue
                    nbr = list(idx)
                    nbr[axis] += 1
                    area = widths[t_ax[0]][idx[t_ax[0]]] * \
                        widths[t_ax[1]][idx[t_ax[1]]]
                    g0 = cell_k[tuple(idx)][axis] / \
                        (0.5 * widths[axis][idx[axis]])
                    g1 = cell_k[tuple(nbr)][axis] / \
                        (0.5 * widths[axis][nbr[axis]])
                    t = area * g0 * g1 / (g0 + g1)
                    r, c = lin(*idx), lin(*nbr)
                    a[r, r] += t
                    a[c, c] += t
                    a[r, c] -= t
                    a[c, r] -= t
    for (axis, side), value in dirichlet.items():
        t_ax = [ax for ax in range(3) if ax != axis]
        pos = 0 if side == 0 else shape[axis] - 1
        ranges = [range(shape[ax]) if ax != axis else [pos]
                  for ax in range(3)]
        for i in ranges[0]:
            for j in ranges[1]:
                for k in ranges[2]:
                    idx = (i, j, k)
                    area = widths[t_ax[0]][idx[t_ax[0]]] * \
                        widths[t_ax[1]][idx[t_ax[1]]]
                    t = area * cell_k[idx][axis] / \
                        (0.5 * widths[axis][idx[axis]])
                    r = lin(*idx)
                    a[r, r] += t
                    b[r] += t * value
    head = scipy.sparse.linalg.spsolve(a.tocsc(), b)
    return EquiDimSolution(cuts, head.reshape(shape))


def slab_cuts(n, axis, coord, eps, box=None):
    """Uniform cuts with the cut at ``coord`` widened into a two-cell slab."""
    if box is None:
        box = ((0.0, 0.0, 0.0), (1.0, 1.0, 1.0))
    cuts = [np.linspace(box[0][ax], box[1][ax], n + 1) for ax in range(3)]
    base = cuts[axis]
    keep = base[np.abs(base - coord) > 1e-12]
    cuts[axis] = np.sort(np.concatenate(
        [keep, [coord - 0.5 * eps, coord, coord + 0.5 * eps]]))
    return tuple(cuts)


def equidim_single_fracture(n, axis, coord, eps, k_matrix, k_tangential,
                            kappa_normal, dirichlet, box=None):
    """Equi-dimensional single-fracture reference.

    The fracture is an ``eps``-thick slab at ``coord`` normal to ``axis``,
    resolved by two cells, with ``k_tangential`` in-plane and
    ``kappa_normal`` across. Material conductivities here are the intrinsic
    (unscaled) values.
    """
    cuts = slab_cuts(n, axis, coord, eps, box)
    shape = tuple(len(c) - 1 for c in cuts)
    cell_k = np.full(shape + (3,), float(k_matrix))
    centers = 0.5 * (cuts[axis][:-1] + cuts[axis][1:])
    in_slab = np.abs(centers - coord) < 0.5 * eps
    sel = [slice(None)] * 3
    sel[axis] = in_slab
    diag = np.full(3, float(k_tangential))
    diag[axis] = float(kappa_normal)
    cell_k[tuple(sel)] = diag
    return equidim_flow(cuts, cell_k, dirichlet)


# ---------------------------------------------------------------------------
# Dense re-assembly of the mixed-dimensional operators
# ---------------------------------------------------------------------------

def _dense_offsets(grid):
    offsets, total = {}, 0
    for dim in sorted(grid.subdomains, reverse=True):
        offsets[dim] = total
        total += grid.subdomains[dim].num_cells
    return offsets, total


def _half_conductance(sub, face, cell, k):
    d = sub.face_centroids[face] - sub.cell_centroids[cell]
    dist = float(np.linalg.norm(d))
    dhat = d / dist
    normal = sub.face_normals[face]
    if normal @ d < 0:
        normal = -normal
    kc = k[cell]
    if np.ndim(kc) == 0:
        proj = float(kc) * float(normal @ dhat)
    else:
        proj = float(normal @ kc @ dhat)
    return sub.face_measures[face] * proj / dist


def dense_flow_matrix(grid, conductivity, bc):
    """Entry-by-entry dense reconstruction of the flow system."""
    offsets, ndof = _dense_offsets(grid)
    a = np.zeros((ndof, ndof))
    b = np.zeros(ndof)
    for dim in sorted(grid.subdomains, reverse=True):
        sub = grid.subdomains[dim]
        k = conductivity.tangential[dim]
        off = offsets[dim]
        for face in range(sub.num_faces):
            tag = sub.boundary_tags[face]
            c0, c1 = sub.face_cells[face]
            if tag == INTERIOR:
                t0 = _half_conductance(sub, face, c0, k)
                t1 = _half_conductance(sub, face, c1, k)
                t = t0 * t1 / (t0 + t1)
                for r, c in ((c0, c0), (c1, c1)):
                    a[off + r, off + c] += t
                a[off + c0, off + c1] -= t
                a[off + c1, off + c0] -= t
            elif tag == DOMAIN_BOUNDARY:
                kind = bc.kind[dim][face]
                if kind == 1:
                    t = _half_conductance(sub, face, c0, k)
                    a[off + c0, off + c0] += t
                    b[off + c0] += t * bc.value[dim][face]
                elif kind == 2:
                    b[off + c0] -= sub.aperture[c0] * bc.value[dim][face] * \
                        sub.face_measures[face]
    for dim_low, pairs in grid.interfaces.items():
        sub_h = grid.subdomains[dim_low + 1]
        k_h = conductivity.tangential[dim_low + 1]
        kappa = conductivity.normal[dim_low]
        for p in range(pairs.num_pairs):
            face = pairs.high_face[p]
            cell = pairs.high_cell[p]
            low = pairs.low_cell[p]
            t_h = _half_conductance(sub_h, face, cell, k_h)
            t_l = pairs.area[p] * kappa[low]
            t = t_h * t_l / (t_h + t_l)
            r = offsets[dim_low + 1] + cell
            c = offsets[dim_low] + low
            a[r, r] += t
            a[c, c] += t
            a[r, c] -= t
            a[c, r] -= t
    return a, b, offsets


def dense_transport_recursion(grid, flow, porosity_by_dim, dt, n_steps,
                              inflow_conc=None):
    """Dense implicit upwind recursion driven by the recovered fluxes.

    Builds storage and upwind operators from the grid and the face fluxes
    alone, steps with dense solves, and returns the final global vector.
    """
    offsets, ndof = _dense_offsets(grid)
    s = np.zeros(ndof)
    for dim, sub in grid.subdomains.items():
        phi = porosity_by_dim[dim]
        if np.isscalar(phi):
            phi = np.full(sub.num_cells, float(phi))
        for cell in range(sub.num_cells):
            s[offsets[dim] + cell] = sub.aperture[cell] * phi[cell] * \
                sub.cell_measures[cell]

    u = np.zeros((ndof, ndof))
    rhs_in = np.zeros(ndof)
    for dim, sub in grid.subdomains.items():
        off = offsets[dim]
        for face in range(sub.num_faces):
            tag = sub.boundary_tags[face]
            flux = flow.face_flux[dim][face]
            c0, c1 = sub.face_cells[face]
            if tag == INTERIOR:
                donor = c0 if flux >= 0 else c1
                u[off + c0, off + donor] += flux
                u[off + c1, off + donor] -= flux
            elif tag == DOMAIN_BOUNDARY:
                if flux > 0:
                    u[off + c0, off + c0] += flux
                elif flux < 0:
                    cbar = 0.0
                    if inflow_conc is not None and \
                            inflow_conc.kind[dim][face] != 0:
                        cbar = inflow_conc.value[dim][face]
                    rhs_in[off + c0] -= flux * cbar
    for dim_low, pairs in grid.interfaces.items():
        sub_h = grid.subdomains[dim_low + 1]
        for p in range(pairs.num_pairs):
            flux = flow.face_flux[dim_low + 1][pairs.high_face[p]]
            hi = offsets[dim_low + 1] + pairs.high_cell[p]
            lo = offsets[dim_low] + pairs.low_cell[p]
            donor = hi if flux >= 0 else lo
            u[hi, donor] += flux
            u[lo, donor] -= flux

    m = np.diag(s / dt) + u
    conc = np.zeros(ndof)
    for _ in range(n_steps):
        conc = np.linalg.solve(m, s * conc / dt + rhs_in)
    return conc, offsets
