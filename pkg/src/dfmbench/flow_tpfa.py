"""Two-point flux flow solver on mixed-dimensional grids.

Pressure heads live in cell centers of every subdomain. Tangential flow
within a subdomain uses harmonically averaged half transmissibilities;
flow across a dimension gap couples the half transmissibility of the
high-dimensional cell in series with the interface coupling
``face measure * kappa`` of the receiving low-dimensional cell.

Unit convention: conductivities and couplings are the effective,
aperture-scaled quantities (tangential K_d in m^(4-d)/s, normal kappa of a
d-dimensional interface in m^(2-d)/s), so every transmissibility carries
m^2/s and every recovered flux m^3/s regardless of dimension.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
import scipy.sparse
import scipy.sparse.linalg

from .mdgrid import DOMAIN_BOUNDARY, INTERIOR
from .sparse import SparseMatrix, solve_spd

NOFLUX, DIRICHLET, NEUMANN = 0, 1, 2


class SingularSystemError(ValueError):
    """Raised when the assembled flow system admits no unique solution."""


class BoundaryConditionError(ValueError):
    pass


def per_cell_values(grid, spec):
    """Expand {dim: number | {region: number} | array} to per-cell arrays."""
    out = {}
    for dim, sub in grid.subdomains.items():
        if sub.num_cells == 0:
            out[dim] = np.zeros(0)
            continue
        if dim not in spec:
            raise KeyError(f"no value given for dimension {dim}")
        val = spec[dim]
        if isinstance(val, dict):
            arr = np.empty(sub.num_cells)
            for region in np.unique(sub.region_tags):
                if int(region) not in val:
                    raise KeyError(
                        f"dimension {dim} region {int(region)} has no value")
                arr[sub.region_tags == region] = val[int(region)]
        elif np.isscalar(val):
            arr = np.full(sub.num_cells, float(val))
        else:
            arr = np.asarray(val, dtype=float)
            if arr.shape[0] != sub.num_cells:
                raise ValueError(f"dimension {dim}: expected "
                                 f"{sub.num_cells} values, got {arr.shape[0]}")
        out[dim] = arr
    return out


@dataclass
class ConductivityField:
    """Effective conductivities: tangential per subdomain, normal per
    interface (keyed by the low dimension)."""

    tangential: dict
    normal: dict

    @classmethod
    def from_values(cls, grid, tangential, normal=None):
        tangential = dict(tangential)
        if 0 in grid.subdomains:
            # points have no tangential direction
            tangential.setdefault(0, 0.0)
        tang = per_cell_values(grid, tangential)
        norm = {}
        for dim_low in grid.interfaces:
            sub = grid.subdomains[dim_low]
            spec = (normal or {}).get(dim_low)
            if sub.num_cells == 0:
                norm[dim_low] = np.zeros(0)
                continue
            if spec is None:
                raise KeyError(f"no normal coupling for dimension {dim_low}")
            if isinstance(spec, dict):
                arr = np.empty(sub.num_cells)
                for region in np.unique(sub.region_tags):
                    arr[sub.region_tags == region] = spec[int(region)]
            elif np.isscalar(spec):
                arr = np.full(sub.num_cells, float(spec))
            else:
                arr = np.asarray(spec, dtype=float)
            norm[dim_low] = arr
        return cls(tang, norm)


def effective_tangential(k_eq, aperture):
    """Aperture-scaled tangential conductivity eps * K_eq."""
    return aperture * k_eq


def effective_normal(kappa_eq, aperture_low, dim_low, aperture_high=1.0):
    """Aperture-scaled normal coupling eps_high * (2 / a_low) * kappa_eq."""
    a = aperture_low ** (1.0 / (3 - dim_low))
    return aperture_high * (2.0 / a) * kappa_eq


class FlowBC:
    """Per-face boundary data. Faces default to no-flow; Dirichlet head or
    Neumann outward volumetric flux density can be set on domain-boundary
    faces, selected by mask or by centroid predicate."""

    def __init__(self, grid):
        self.grid = grid
        self.kind = {d: np.zeros(s.num_faces, dtype=int)
                     for d, s in grid.subdomains.items()}
        self.value = {d: np.zeros(s.num_faces)
                      for d, s in grid.subdomains.items()}

    def _resolve(self, dim, where):
        sub = self.grid.subdomains[dim]
        if callable(where):
            mask = np.asarray(where(sub.face_centroids), dtype=bool)
        else:
            mask = np.asarray(where, dtype=bool)
        if mask.shape != (sub.num_faces,):
            raise BoundaryConditionError(
                f"mask shape {mask.shape} does not match face count")
        if np.any(mask & (sub.boundary_tags != DOMAIN_BOUNDARY)):
            raise BoundaryConditionError(
                f"dimension {dim}: condition set on a non-boundary face")
        if np.any(mask & (self.kind[dim] != NOFLUX)):
            raise BoundaryConditionError(
                f"dimension {dim}: face assigned two boundary conditions")
        return mask

    def set_dirichlet(self, dim, where, value):
        mask = self._resolve(dim, where)
        self.kind[dim][mask] = DIRICHLET
        self.value[dim][mask] = value
        return self

    def set_neumann(self, dim, where, value):
        mask = self._resolve(dim, where)
        self.kind[dim][mask] = NEUMANN
        self.value[dim][mask] = value
        return self

    def n_dirichlet(self):
        return sum(int(np.sum(k == DIRICHLET)) for k in self.kind.values())


def half_transmissibility(area, normal, dvec, k):
    """One-sided transmissibility area * (n . K . d_hat) / |d|.

    ``dvec`` runs from the cell centroid to the face centroid and ``normal``
    points out of the cell; ``k`` is scalar per cell or a (n, 3, 3) tensor.
    """
    dvec = np.atleast_2d(dvec)
    normal = np.atleast_2d(normal)
    dist = np.linalg.norm(dvec, axis=1)
    dhat = dvec / dist[:, None]
    k = np.asarray(k, dtype=float)
    if k.ndim <= 1:
        proj = k * np.einsum("ni,ni->n", normal, dhat)
    else:
        proj = np.einsum("ni,nij,nj->n", normal, k, dhat)
    return np.asarray(area, dtype=float) * proj / dist


def series_transmissibility(t_a, t_b):
    """Harmonic combination of two one-sided transmissibilities."""
    t_a = np.asarray(t_a, dtype=float)
    t_b = np.asarray(t_b, dtype=float)
    total = t_a + t_b
    out = np.zeros_like(total)
    np.divide(t_a * t_b, total, out=out, where=total > 0)
    return out


def interface_transmissibility(t_high, area, kappa):
    """Interface coupling: high-side half transmissibility in series with
    the membrane conductance area * kappa of the low-dimensional cell."""
    return series_transmissibility(t_high, np.asarray(area) * np.asarray(kappa))


@dataclass
class _Interior:
    dim: int
    faces: np.ndarray
    dof_i: np.ndarray
    dof_j: np.ndarray
    trans: np.ndarray


@dataclass
class _Interface:
    dim_low: int
    faces: np.ndarray
    dof_high: np.ndarray
    dof_low: np.ndarray
    trans: np.ndarray


@dataclass
class _Dirichlet:
    dim: int
    faces: np.ndarray
    dof: np.ndarray
    trans: np.ndarray
    value: np.ndarray


@dataclass
class _Neumann:
    dim: int
    faces: np.ndarray
    dof: np.ndarray
    flux: np.ndarray


@dataclass
class FlowSystem:
    matrix: SparseMatrix
    rhs: np.ndarray
    offsets: dict
    ndof: int
    dropped_dims: tuple = ()
    interior: list = field(default_factory=list)
    interface: list = field(default_factory=list)
    dirichlet: list = field(default_factory=list)
    neumann: list = field(default_factory=list)


def dof_offsets(grid):
    """Global dof layout, highest dimension first."""
    offsets = {}
    pos = 0
    for dim in sorted(grid.subdomains, reverse=True):
        offsets[dim] = pos
        pos += grid.subdomains[dim].num_cells
    return offsets, pos


def assemble_flow(grid, conductivity, bc, drop_tangential_dims=()):
    """Assemble the symmetric flow system and its connection lists.

    ``drop_tangential_dims`` removes in-plane conduction (and boundary
    conditions other than no-flow are rejected) for the listed dimensions,
    leaving only the interface couplings; used by the condensation mode.
    """
    offsets, ndof = dof_offsets(grid)
    rows, cols, vals = [], [], []
    rhs = np.zeros(ndof)
    system = FlowSystem(None, rhs, offsets, ndof,
                        dropped_dims=tuple(drop_tangential_dims))

    def add_pairwise(i, j, t):
        rows.append(np.concatenate([i, j, i, j]))
        cols.append(np.concatenate([i, j, j, i]))
        vals.append(np.concatenate([t, t, -t, -t]))

    def add_diag(i, t):
        rows.append(i)
        cols.append(i)
        vals.append(t)

    for dim in sorted(grid.subdomains, reverse=True):
        sub = grid.subdomains[dim]
        if sub.num_faces == 0:
            continue
        k = conductivity.tangential[dim]
        off = offsets[dim]
        tangential = dim not in drop_tangential_dims

        interior = np.nonzero(sub.boundary_tags == INTERIOR)[0]
        if interior.size and tangential:
            ci = sub.face_cells[interior, 0]
            cj = sub.face_cells[interior, 1]
            area = sub.face_measures[interior]
            normals = sub.face_normals[interior]
            t_i = half_transmissibility(
                area, normals,
                sub.face_centroids[interior] - sub.cell_centroids[ci], k[ci])
            t_j = half_transmissibility(
                area, -normals,
                sub.face_centroids[interior] - sub.cell_centroids[cj], k[cj])
            trans = series_transmissibility(t_i, t_j)
            add_pairwise(off + ci, off + cj, trans)
            system.interior.append(
                _Interior(dim, interior, off + ci, off + cj, trans))

        dir_faces = np.nonzero(bc.kind[dim] == DIRICHLET)[0]
        if dir_faces.size:
            if not tangential:
                raise BoundaryConditionError(
                    f"dimension {dim} is condensed but carries Dirichlet data")
            cells = sub.face_cells[dir_faces, 0]
            t_half = half_transmissibility(
                sub.face_measures[dir_faces], sub.face_normals[dir_faces],
                sub.face_centroids[dir_faces] - sub.cell_centroids[cells],
                k[cells])
            hbar = bc.value[dim][dir_faces]
            add_diag(off + cells, t_half)
            rhs_add = np.zeros(ndof)
            np.add.at(rhs_add, off + cells, t_half * hbar)
            rhs += rhs_add
            system.dirichlet.append(
                _Dirichlet(dim, dir_faces, off + cells, t_half, hbar))

        neu_faces = np.nonzero(bc.kind[dim] == NEUMANN)[0]
        if neu_faces.size:
            if not tangential:
                raise BoundaryConditionError(
                    f"dimension {dim} is condensed but carries Neumann data")
            cells = sub.face_cells[neu_faces, 0]
            flux = (sub.aperture[cells] * bc.value[dim][neu_faces]
                    * sub.face_measures[neu_faces])
            rhs_add = np.zeros(ndof)
            np.add.at(rhs_add, off + cells, -flux)
            rhs += rhs_add
            system.neumann.append(_Neumann(dim, neu_faces, off + cells, flux))

    for dim_low in sorted(grid.interfaces, reverse=True):
        pairs = grid.interfaces[dim_low]
        if pairs.num_pairs == 0:
            continue
        dim_high = dim_low + 1
        sub_h = grid.subdomains[dim_high]
        k_h = conductivity.tangential[dim_high]
        kappa = conductivity.normal[dim_low]
        faces = pairs.high_face
        cells = pairs.high_cell
        t_high = half_transmissibility(
            sub_h.face_measures[faces], sub_h.face_normals[faces],
            sub_h.face_centroids[faces] - sub_h.cell_centroids[cells],
            k_h[cells])
        trans = interface_transmissibility(
            t_high, pairs.area, kappa[pairs.low_cell])
        dof_h = offsets[dim_high] + cells
        dof_l = offsets[dim_low] + pairs.low_cell
        add_pairwise(dof_h, dof_l, trans)
        system.interface.append(
            _Interface(dim_low, faces, dof_h, dof_l, trans))

    if rows:
        matrix = SparseMatrix.from_coo(
            np.concatenate(rows), np.concatenate(cols), np.concatenate(vals),
            (ndof, ndof))
    else:
        matrix = SparseMatrix.from_coo(
            np.array([], dtype=int), np.array([], dtype=int), np.array([]),
            (ndof, ndof))
    system.matrix = matrix
    return system


@dataclass
class FlowSolution:
    """Heads, recovered fluxes and conservation diagnostics.

    ``face_flux[dim]`` holds the flux through every face of that subdomain
    in the direction of the stored normal: out of the first adjacent cell
    for interior faces, outward for boundary faces and from the
    high-dimensional into the low-dimensional side for interface faces.
    """

    head: dict
    face_flux: dict
    interface_flux: dict
    residual: np.ndarray
    flux_scale: float
    system: FlowSystem
    grid: object

    def head_vector(self):
        return np.concatenate(
            [self.head[d] for d in sorted(self.head, reverse=True)])

    def boundary_flux_total(self):
        """Signed sum of all boundary fluxes (outflow positive)."""
        total = 0.0
        for group in self.system.dirichlet:
            total += float(np.sum(self.face_flux[group.dim][group.faces]))
        for group in self.system.neumann:
            total += float(np.sum(group.flux))
        return total

    def boundary_inflow_total(self):
        """Sum of inflow magnitudes over all boundary faces."""
        total = 0.0
        for group in self.system.dirichlet:
            f = self.face_flux[group.dim][group.faces]
            total += float(np.sum(-f[f < 0]))
        for group in self.system.neumann:
            total += float(np.sum(-group.flux[group.flux < 0]))
        return total

    def max_residual(self):
        return float(np.max(np.abs(self.residual))) if self.residual.size \
            else 0.0


def _split_by_dim(grid, offsets, vector):
    return {dim: vector[offsets[dim]:offsets[dim] + sub.num_cells]
            for dim, sub in grid.subdomains.items()}


def solve_flow(grid, conductivity, bc, tol=1e-10, condense_lower=False):
    """Solve for heads and recover conservative fluxes.

    ``condense_lower`` drops in-plane conduction in 1d and 0d subdomains
    and eliminates their dofs exactly before the sparse solve, mimicking
    schemes that route mass directly between intersecting fractures.
    """
    drop = tuple(d for d in (1, 0) if d in grid.subdomains) \
        if condense_lower else ()
    system = assemble_flow(grid, conductivity, bc,
                           drop_tangential_dims=drop)
    if bc.n_dirichlet() == 0:
        raise SingularSystemError(
            "no Dirichlet face anywhere: head is determined only up to a "
            "constant")

    if drop:
        head_vec = _solve_condensed(grid, system, drop, tol)
    else:
        head_vec = solve_spd(system.matrix, system.rhs, tol=tol)

    head = _split_by_dim(grid, system.offsets, head_vec)
    face_flux = {d: np.zeros(s.num_faces) for d, s in grid.subdomains.items()}
    interface_flux = {}
    residual = np.zeros(system.ndof)
    scale = 0.0

    for group in system.interior:
        f = group.trans * (head_vec[group.dof_i] - head_vec[group.dof_j])
        face_flux[group.dim][group.faces] = f
        np.add.at(residual, group.dof_i, f)
        np.add.at(residual, group.dof_j, -f)
        if f.size:
            scale = max(scale, float(np.max(np.abs(f))))
    for group in system.interface:
        f = group.trans * (head_vec[group.dof_high] - head_vec[group.dof_low])
        face_flux[group.dim_low + 1][group.faces] = f
        np.add.at(residual, group.dof_high, f)
        np.add.at(residual, group.dof_low, -f)
        interface_flux[group.dim_low] = f
        if f.size:
            scale = max(scale, float(np.max(np.abs(f))))
    for group in system.dirichlet:
        f = group.trans * (head_vec[group.dof] - group.value)
        face_flux[group.dim][group.faces] = f
        np.add.at(residual, group.dof, f)
        if f.size:
            scale = max(scale, float(np.max(np.abs(f))))
    for group in system.neumann:
        face_flux[group.dim][group.faces] = group.flux
        np.add.at(residual, group.dof, group.flux)
        if group.flux.size:
            scale = max(scale, float(np.max(np.abs(group.flux))))

    return FlowSolution(head, face_flux, interface_flux, residual,
                        scale, system, grid)


def _solve_condensed(grid, system, drop, tol):
    """Exact Schur elimination of the dropped-dimension dofs."""
    offsets = system.offsets
    low = np.zeros(system.ndof, dtype=bool)
    for dim in drop:
        off = offsets[dim]
        low[off:off + grid.subdomains[dim].num_cells] = True
    high = ~low
    a = system.matrix.scipy_csr()
    a_hh = a[high][:, high].tocsr()
    a_hl = a[high][:, low].tocsr()
    a_ll = a[low][:, low].tocsc()
    b_h = system.rhs[high]
    b_l = system.rhs[low]
    nh = int(high.sum())

    if np.any(a_ll.diagonal() <= 0):
        raise SingularSystemError("condensed dof with no interface coupling")
    lu = scipy.sparse.linalg.splu(a_ll)

    # Schur complement S = A_hh - A_hl A_ll^-1 A_lh; only the high dofs
    # actually coupled to eliminated ones contribute to the correction.
    coupled = np.unique(a_hl.nonzero()[0])
    if coupled.size:
        x_sub = lu.solve(a_hl[coupled].toarray().T)
        corr_sub = a_hl[coupled] @ x_sub
        corr = scipy.sparse.coo_matrix(
            (corr_sub.ravel(),
             (np.repeat(coupled, coupled.size),
              np.tile(coupled, coupled.size))),
            shape=(nh, nh)).tocsr()
        s_sp = a_hh - corr
    else:
        s_sp = a_hh
    s_sp = (0.5 * (s_sp + s_sp.T)).tocsr()
    s_sp.eliminate_zeros()

    rhs_h = b_h - a_hl @ lu.solve(b_l)
    h_high = solve_spd(SparseMatrix(s_sp), rhs_h, tol=tol)
    h_low = lu.solve(b_l - a_hl.T @ h_high)
    head = np.zeros(system.ndof)
    head[high] = h_high
    head[low] = h_low
    return head
