"""Geometric primitives shared by the mesh builders and the line sampler."""

import numpy as np


def tet_volumes(p0, p1, p2, p3):
    """Volumes of tetrahedra given stacked corner arrays of shape (n, 3)."""
    d1, d2, d3 = p1 - p0, p2 - p0, p3 - p0
    return np.abs(np.einsum("ij,ij->i", d1, np.cross(d2, d3))) / 6.0


def tri_areas_normals(p0, p1, p2):
    """Areas and unit normals of triangles given stacked corners (n, 3)."""
    cr = np.cross(p1 - p0, p2 - p0)
    nrm = np.linalg.norm(cr, axis=1)
    if np.any(nrm <= 0.0):
        raise ValueError("degenerate triangle with zero area")
    return 0.5 * nrm, cr / nrm[:, None]


def polygon_area_centroid_normal(verts):
    """Area, centroid and unit normal of a planar convex polygon (nv, 3).

    The polygon is fanned into triangles around vertex 0; the centroid is
    the area-weighted triangle centroid, exact for planar convex polygons.
    """
    verts = np.asarray(verts, dtype=float)
    p0 = verts[0]
    area = 0.0
    centroid = np.zeros(3)
    normal = np.zeros(3)
    for a, b in zip(verts[1:-1], verts[2:]):
        cr = np.cross(a - p0, b - p0)
        tri_area = 0.5 * np.linalg.norm(cr)
        area += tri_area
        centroid += tri_area * (p0 + a + b) / 3.0
        normal += cr
    if area <= 0.0:
        raise ValueError("degenerate polygon with zero area")
    return area, centroid / area, normal / np.linalg.norm(normal)


def points_in_tet(points, verts, tol):
    """Boolean mask of points inside a tetrahedron, tolerant at facets."""
    mat = (verts[1:] - verts[0]).T
    rhs = (points - verts[0]).T
    bary = np.linalg.solve(mat, rhs).T
    inside = np.all(bary >= -tol, axis=1)
    return inside & (bary.sum(axis=1) <= 1.0 + tol)


def points_in_box(points, lo, hi, tol):
    return np.all((points >= lo - tol) & (points <= hi + tol), axis=1)


def points_in_polygon3d(points, verts, tol):
    """Mask of points lying on a planar convex polygon within tolerance."""
    _, centroid, normal = polygon_area_centroid_normal(verts)
    dist = np.abs((points - centroid) @ normal)
    mask = dist <= tol
    if not np.any(mask):
        return mask
    # In-plane test: point is inside iff it is on the inner side of every edge.
    nv = len(verts)
    sub = points[mask]
    ok = np.ones(len(sub), dtype=bool)
    for i in range(nv):
        a, b = verts[i], verts[(i + 1) % nv]
        edge_n = np.cross(normal, b - a)
        ok &= (sub - a) @ edge_n >= -tol * max(np.linalg.norm(edge_n), 1.0)
    out = np.zeros(len(points), dtype=bool)
    out[np.flatnonzero(mask)[ok]] = True
    return out


def segment_distance(points, a, b):
    d = b - a
    t = np.clip((points - a) @ d / (d @ d), 0.0, 1.0)
    proj = a + t[:, None] * d
    return np.linalg.norm(points - proj, axis=1)


def points_on_segment(points, a, b, tol):
    return segment_distance(points, a, b) <= tol


def _polygon_distance(points, verts):
    """Exact distances to a planar convex polygon with ordered vertices."""
    _, centroid, normal = polygon_area_centroid_normal(verts)
    off = (points - centroid) @ normal
    proj = points - off[:, None] * normal
    inside = np.ones(len(points), dtype=bool)
    nv = len(verts)
    for i in range(nv):
        a, b = verts[i], verts[(i + 1) % nv]
        inside &= (proj - a) @ np.cross(normal, b - a) >= 0.0
    best = np.where(inside, np.abs(off), np.inf)
    for i in range(nv):
        best = np.minimum(
            best, segment_distance(points, verts[i], verts[(i + 1) % nv]))
    return best


def _tet_distance(points, verts):
    best = np.where(points_in_tet(points, verts, 0.0), 0.0, np.inf)
    for f in ((0, 1, 2), (0, 1, 3), (0, 2, 3), (1, 2, 3)):
        best = np.minimum(best, _polygon_distance(points, verts[list(f)]))
    return best


def point_to_cell_distance(points, verts, dim):
    """Exact distances from points to a cell given its vertex array.

    Cells with more than four 3d vertices are taken to be axis-aligned
    boxes, the only hexahedra the lattice mesher produces.
    """
    verts = np.asarray(verts, dtype=float)
    points = np.atleast_2d(np.asarray(points, dtype=float))
    if dim == 0 or len(verts) == 1:
        return np.linalg.norm(points - verts[0], axis=1)
    if dim == 1 or len(verts) == 2:
        return segment_distance(points, verts[0], verts[-1])
    if dim == 2:
        return _polygon_distance(points, verts)
    if len(verts) == 4:
        return _tet_distance(points, verts)
    lo, hi = verts.min(axis=0), verts.max(axis=0)
    gap = np.maximum(np.maximum(lo - points, points - hi), 0.0)
    return np.linalg.norm(gap, axis=1)
