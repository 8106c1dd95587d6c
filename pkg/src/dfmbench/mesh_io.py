"""Mesh ingestion: Gmsh MSH files and the lattice fracture mesher.

Two construction paths produce a MixedDimGrid: ``build_mixed_grid`` consumes
a parsed MSH document (tetrahedra with tagged fracture triangles, optional
tagged intersection lines and points), and ``cartesian_dfm_mesher`` builds a
hexahedral grid with axis-aligned rectangular fractures directly. Both
derive the intersection-line and intersection-point structure from fracture
adjacency when it is not tagged explicitly.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import geometry
from .mdgrid import (DOMAIN_BOUNDARY, INTERFACE, INTERIOR, TIP, InterfaceSet,
                     MixedDimGrid, SubdomainGrid)


class MeshFormatError(ValueError):
    def __init__(self, message, line=None):
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)
        self.line = line


class NonConformingMeshError(ValueError):
    pass


class TagError(ValueError):
    pass


class LatticeError(ValueError):
    pass


_TYPE_NAMES = {15: "point", 1: "line", 2: "triangle", 4: "tetrahedron"}
_TYPE_CODES = {name: code for code, name in _TYPE_NAMES.items()}
_TYPE_NNODES = {"point": 1, "line": 2, "triangle": 3, "tetrahedron": 4}
TYPE_DIMS = {"point": 0, "line": 1, "triangle": 2, "tetrahedron": 3}


@dataclass(frozen=True)
class Element:
    etype: str
    nodes: tuple
    physical: int


@dataclass
class MshDocument:
    """Typed view of an MSH file: nodes, elements and physical names."""

    version: str
    nodes: dict
    elements: dict
    physical_names: dict

    def elements_of_type(self, etype):
        return [(eid, el) for eid, el in self.elements.items()
                if el.etype == etype]


# ---------------------------------------------------------------------------
# MSH parsing and serialization
# ---------------------------------------------------------------------------

def parse_msh(text):
    """Parse MSH 2.2 ASCII (or the 4.1 ASCII subset) into an MshDocument.

    Unknown sections are skipped; malformed headers, counts and records
    raise MeshFormatError carrying the offending line number.
    """
    lines = text.splitlines()
    sections = _split_sections(lines)
    if "MeshFormat" not in sections:
        raise MeshFormatError("missing $MeshFormat section")
    start, body = sections["MeshFormat"]
    fmt = body[0].split() if body else []
    if len(fmt) < 3:
        raise MeshFormatError("malformed $MeshFormat record", start + 1)
    version = fmt[0]
    if fmt[1] != "0":
        raise MeshFormatError("binary MSH files are not supported", start + 1)
    if version.startswith("2."):
        return _parse_v2(version, sections)
    if version.startswith("4.1"):
        return _parse_v41(version, sections)
    raise MeshFormatError(f"unsupported MSH version {version}", start + 1)


def _split_sections(lines):
    sections = {}
    i = 0
    while i < len(lines):
        stripped = lines[i].strip()
        if stripped.startswith("$") and not stripped.startswith("$End"):
            name = stripped[1:]
            end = None
            for j in range(i + 1, len(lines)):
                if lines[j].strip() == f"$End{name}":
                    end = j
                    break
            if end is None:
                raise MeshFormatError(f"unterminated section ${name}", i + 1)
            sections[name] = (i + 1, lines[i + 1:end])
            i = end + 1
        else:
            if stripped:
                raise MeshFormatError(f"unexpected content {stripped!r}", i + 1)
            i += 1
    return sections


def _parse_count(body, start, what):
    if not body:
        raise MeshFormatError(f"missing {what} count", start + 1)
    try:
        return int(body[0].split()[0])
    except ValueError as exc:
        raise MeshFormatError(f"malformed {what} count", start + 1) from exc


def _parse_physical_names(sections):
    names = {}
    if "PhysicalNames" not in sections:
        return names
    start, body = sections["PhysicalNames"]
    count = _parse_count(body, start, "physical name")
    if len(body) < count + 1:
        raise MeshFormatError("physical name count mismatch", start + 1)
    for k in range(count):
        line_no = start + 2 + k
        parts = body[1 + k].split(None, 2)
        if len(parts) != 3 or not parts[2].startswith('"'):
            raise MeshFormatError("malformed physical name record", line_no)
        names[int(parts[1])] = (int(parts[0]), parts[2].strip().strip('"'))
    return names


def _parse_v2(version, sections):
    names = _parse_physical_names(sections)

    if "Nodes" not in sections:
        raise MeshFormatError("missing $Nodes section")
    start, body = sections["Nodes"]
    count = _parse_count(body, start, "node")
    if len(body) != count + 1:
        raise MeshFormatError(
            f"expected {count} node records, found {len(body) - 1}", start + 1)
    nodes = {}
    for k in range(count):
        parts = body[1 + k].split()
        if len(parts) != 4:
            raise MeshFormatError("malformed node record", start + 2 + k)
        nodes[int(parts[0])] = np.array([float(v) for v in parts[1:]])

    if "Elements" not in sections:
        raise MeshFormatError("missing $Elements section")
    start, body = sections["Elements"]
    count = _parse_count(body, start, "element")
    if len(body) != count + 1:
        raise MeshFormatError(
            f"expected {count} element records, found {len(body) - 1}",
            start + 1)
    elements = {}
    for k in range(count):
        line_no = start + 2 + k
        parts = [int(v) for v in body[1 + k].split()]
        if len(parts) < 3:
            raise MeshFormatError("malformed element record", line_no)
        eid, etype_code, ntags = parts[:3]
        if etype_code not in _TYPE_NAMES:
            raise MeshFormatError(
                f"unsupported element type {etype_code}", line_no)
        etype = _TYPE_NAMES[etype_code]
        node_ids = parts[3 + ntags:]
        if len(node_ids) != _TYPE_NNODES[etype]:
            raise MeshFormatError(
                f"{etype} element with {len(node_ids)} nodes", line_no)
        for nid in node_ids:
            if nid not in nodes:
                raise MeshFormatError(f"element references unknown node {nid}",
                                      line_no)
        physical = parts[3] if ntags >= 1 else 0
        elements[eid] = Element(etype, tuple(node_ids), physical)
    return MshDocument(version, nodes, elements, names)


def _parse_v41(version, sections):
    names = _parse_physical_names(sections)

    entity_phys = {}
    if "Entities" in sections:
        start, body = sections["Entities"]
        if not body:
            raise MeshFormatError("empty $Entities section", start + 1)
        counts = [int(v) for v in body[0].split()]
        if len(counts) != 4:
            raise MeshFormatError("malformed $Entities header", start + 1)
        row = 1
        for dim, count in enumerate(counts):
            for _ in range(count):
                parts = body[row].split()
                tag = int(parts[0])
                # Points store 3 coordinates, higher entities 6 bbox values.
                skip = 4 if dim == 0 else 7
                nphys = int(parts[skip])
                phys = int(parts[skip + 1]) if nphys > 0 else 0
                entity_phys[(dim, tag)] = phys
                row += 1

    if "Nodes" not in sections:
        raise MeshFormatError("missing $Nodes section")
    start, body = sections["Nodes"]
    header = body[0].split()
    nblocks = int(header[0])
    nodes = {}
    row = 1
    for _ in range(nblocks):
        _, _, _, block_n = (int(v) for v in body[row].split())
        ids = [int(body[row + 1 + k].split()[0]) for k in range(block_n)]
        for k in range(block_n):
            parts = body[row + 1 + block_n + k].split()
            nodes[ids[k]] = np.array([float(v) for v in parts[:3]])
        row += 1 + 2 * block_n

    if "Elements" not in sections:
        raise MeshFormatError("missing $Elements section")
    start, body = sections["Elements"]
    header = body[0].split()
    nblocks = int(header[0])
    elements = {}
    row = 1
    for _ in range(nblocks):
        edim, etag, etype_code, block_n = (int(v) for v in body[row].split())
        if etype_code not in _TYPE_NAMES:
            raise MeshFormatError(f"unsupported element type {etype_code}",
                                  start + row + 1)
        etype = _TYPE_NAMES[etype_code]
        physical = entity_phys.get((edim, etag), 0)
        for k in range(block_n):
            parts = [int(v) for v in body[row + 1 + k].split()]
            elements[parts[0]] = Element(etype, tuple(parts[1:]), physical)
        row += 1 + block_n
    return MshDocument(version, nodes, elements, names)


def write_msh(doc):
    """Serialize a document as MSH 2.2 ASCII."""
    out = ["$MeshFormat", "2.2 0 8", "$EndMeshFormat"]
    if doc.physical_names:
        out.append("$PhysicalNames")
        out.append(str(len(doc.physical_names)))
        for tag in sorted(doc.physical_names):
            dim, name = doc.physical_names[tag]
            out.append(f'{dim} {tag} "{name}"')
        out.append("$EndPhysicalNames")
    out.append("$Nodes")
    out.append(str(len(doc.nodes)))
    for nid in sorted(doc.nodes):
        x, y, z = (float(v) for v in doc.nodes[nid])
        out.append(f"{nid} {x!r} {y!r} {z!r}")
    out.append("$EndNodes")
    out.append("$Elements")
    out.append(str(len(doc.elements)))
    for eid in sorted(doc.elements):
        el = doc.elements[eid]
        nodes = " ".join(str(n) for n in el.nodes)
        out.append(f"{eid} {_TYPE_CODES[el.etype]} 2 {el.physical} "
                   f"{el.physical} {nodes}")
    out.append("$EndElements")
    return "\n".join(out) + "\n"


# ---------------------------------------------------------------------------
# Physical-name roles
# ---------------------------------------------------------------------------

class TagConvention:
    """Resolves physical names to roles.

    MATRIX_<r> tags matrix regions, FRACTURE_<k> tags fracture surfaces,
    INTERSECTION[_<j>] tags intersection lines, POINT[_<j>] intersection
    points and BOUNDARY_<label> marks boundary patches (consumed by boundary
    predicates, not by the grid builder). Every used physical tag must
    resolve; unresolvable names raise TagError.
    """

    def role(self, dim, name):
        for prefix, kind in (("MATRIX_", "matrix"), ("FRACTURE_", "fracture")):
            if name.startswith(prefix):
                try:
                    return kind, int(name[len(prefix):])
                except ValueError:
                    raise TagError(f"malformed physical name {name!r}")
        if name.startswith("BOUNDARY_"):
            return "boundary", name[len("BOUNDARY_"):]
        for prefix, kind in (("INTERSECTION", "intersection"),
                             ("POINT", "point")):
            if name == prefix:
                return kind, None
            if name.startswith(prefix + "_"):
                try:
                    return kind, int(name[len(prefix) + 1:])
                except ValueError:
                    raise TagError(f"malformed physical name {name!r}")
        raise TagError(f"physical name {name!r} does not resolve to a role")


# ---------------------------------------------------------------------------
# Shared grid accumulation
# ---------------------------------------------------------------------------

class _FaceBucket:
    """Collects faces of one subdomain before freezing into arrays."""

    def __init__(self):
        self.measures = []
        self.centroids = []
        self.normals = []
        self.cells = []
        self.btags = []

    def add(self, measure, centroid, normal, cell0, cell1, btag):
        self.measures.append(measure)
        self.centroids.append(centroid)
        self.normals.append(normal)
        self.cells.append((cell0, cell1))
        self.btags.append(btag)
        return len(self.measures) - 1


def _freeze_subdomain(dim, measures, centroids, regions, vertices, faces,
                      aperture):
    n = len(measures)
    eps = float(aperture)
    if dim == 3 and eps != 1.0:
        raise ValueError("3d aperture must be 1")
    a_typ = eps ** (1.0 / (3 - dim)) if dim < 3 else 1.0
    return SubdomainGrid(
        dim=dim,
        cell_measures=np.asarray(measures, dtype=float),
        cell_centroids=np.asarray(centroids, dtype=float).reshape(n, 3),
        region_tags=np.asarray(regions, dtype=int),
        cell_vertices=tuple(np.asarray(v, dtype=float) for v in vertices),
        face_measures=np.asarray(faces.measures, dtype=float),
        face_centroids=np.asarray(faces.centroids,
                                  dtype=float).reshape(len(faces.measures), 3),
        face_normals=np.asarray(faces.normals,
                                dtype=float).reshape(len(faces.measures), 3),
        face_cells=np.asarray(faces.cells, dtype=int).reshape(
            len(faces.measures), 2),
        boundary_tags=np.asarray(faces.btags, dtype=int),
        aperture=np.full(n, eps),
        typical_length=np.full(n, a_typ),
    )


def _segment_components(segments, node_segments, zero_d_nodes):
    """Label connected 1d components, cut at intersection points."""
    parent = list(range(len(segments)))

    def find(a):
        while parent[a] != a:
            parent[a] = parent[parent[a]]
            a = parent[a]
        return a

    for node, segs in node_segments.items():
        if node in zero_d_nodes or len(segs) < 2:
            continue
        root = find(segs[0])
        for s in segs[1:]:
            parent[find(s)] = root
    labels = {}
    comp = []
    for s in range(len(segments)):
        root = find(s)
        if root not in labels:
            labels[root] = len(labels)
        comp.append(labels[root])
    return comp


# ---------------------------------------------------------------------------
# Unstructured (MSH) builder
# ---------------------------------------------------------------------------

def build_mixed_grid(doc, convention=None, domain_box=None, apertures=None,
                     tol=1e-8):
    """Build a MixedDimGrid from a tetrahedral MSH document.

    Fracture triangles must conform to tetrahedron facets; intersection
    lines and points are taken from tagged elements when present and
    derived from fracture adjacency otherwise. ``apertures`` maps dimension
    to the cross-sectional measure (defaults to 1 for every dimension).
    """
    convention = convention or TagConvention()
    apertures = dict(apertures or {})
    apertures.setdefault(3, 1.0)

    node_xyz = {nid: np.asarray(xyz, dtype=float)
                for nid, xyz in doc.nodes.items()}
    tets, tris, tagged_lines, tagged_points = [], [], [], []
    for eid in sorted(doc.elements):
        el = doc.elements[eid]
        if el.physical == 0:
            continue
        if el.physical not in doc.physical_names:
            raise TagError(f"element {eid} uses undeclared physical tag "
                           f"{el.physical}")
        kind, idx = convention.role(*doc.physical_names[el.physical])
        if kind == "matrix":
            if el.etype != "tetrahedron":
                raise TagError(f"element {eid}: matrix tag on {el.etype}")
            tets.append((eid, el.nodes, idx))
        elif kind == "fracture":
            if el.etype != "triangle":
                raise TagError(f"element {eid}: fracture tag on {el.etype}")
            tris.append((eid, el.nodes, idx))
        elif kind == "intersection":
            if el.etype != "line":
                raise TagError(f"element {eid}: intersection tag on {el.etype}")
            tagged_lines.append(el.nodes)
        elif kind == "point":
            tagged_points.append(el.nodes[0])
        # boundary-tagged elements carry no cells of their own

    if not tets:
        raise NonConformingMeshError("document contains no tagged tetrahedra")

    all_xyz = np.array([node_xyz[n] for n in sorted(node_xyz)])
    if domain_box is None:
        domain_box = np.array([all_xyz.min(axis=0), all_xyz.max(axis=0)])
    else:
        domain_box = np.asarray(domain_box, dtype=float)
    scale = float(np.max(domain_box[1] - domain_box[0]))
    geo_tol = tol * scale

    # --- 3d cells -----------------------------------------------------------
    tet_pts = np.array([[node_xyz[n] for n in nodes] for _, nodes, _ in tets])
    vol = geometry.tet_volumes(tet_pts[:, 0], tet_pts[:, 1], tet_pts[:, 2],
                               tet_pts[:, 3])
    if np.any(vol <= 0.0):
        bad = int(np.argmin(vol))
        raise NonConformingMeshError(
            f"tetrahedron element {tets[bad][0]} has zero volume")
    cent3 = tet_pts.mean(axis=1)
    reg3 = [r for _, _, r in tets]

    tri_lookup = {}
    for cell2, (eid, nodes, _) in enumerate(tris):
        key = tuple(sorted(nodes))
        if key in tri_lookup:
            raise NonConformingMeshError(
                f"duplicate fracture triangle at element {eid}")
        tri_lookup[key] = cell2

    facets = {}
    for cell3, (_, nodes, _) in enumerate(tets):
        for skip in range(4):
            key = tuple(sorted(nodes[:skip] + nodes[skip + 1:]))
            facets.setdefault(key, []).append(cell3)

    faces3 = _FaceBucket()
    pairs2 = {"face": [], "high": [], "low": [], "area": []}
    matched_tris = set()
    for key, adj in facets.items():
        pts = np.array([node_xyz[n] for n in key])
        area, normal = geometry.tri_areas_normals(pts[None, 0], pts[None, 1],
                                                  pts[None, 2])
        area, normal = float(area[0]), normal[0]
        centroid = pts.mean(axis=0)
        if len(adj) > 2:
            raise NonConformingMeshError(
                f"facet shared by {len(adj)} tetrahedra")
        if key in tri_lookup:
            matched_tris.add(key)
            for cell3 in adj:
                n_out = normal if normal @ (centroid - cent3[cell3]) > 0 \
                    else -normal
                fid = faces3.add(area, centroid, n_out, cell3, -1, INTERFACE)
                pairs2["face"].append(fid)
                pairs2["high"].append(cell3)
                pairs2["low"].append(tri_lookup[key])
                pairs2["area"].append(area)
        elif len(adj) == 2:
            n_out = normal if normal @ (centroid - cent3[adj[0]]) > 0 \
                else -normal
            faces3.add(area, centroid, n_out, adj[0], adj[1], INTERIOR)
        else:
            n_out = normal if normal @ (centroid - cent3[adj[0]]) > 0 \
                else -normal
            faces3.add(area, centroid, n_out, adj[0], -1, DOMAIN_BOUNDARY)

    for key, cell2 in tri_lookup.items():
        if key not in matched_tris:
            raise NonConformingMeshError(
                f"fracture triangle element {tris[cell2][0]} is not a facet "
                "of any tetrahedron")

    subdomains = {}
    interfaces = {}
    subdomains[3] = _freeze_subdomain(
        3, vol, cent3, reg3, [tet_pts[i] for i in range(len(tets))], faces3,
        apertures.get(3, 1.0))

    if not tris:
        return MixedDimGrid(subdomains, interfaces, domain_box)

    # --- 2d cells -----------------------------------------------------------
    tri_pts = np.array([[node_xyz[n] for n in nodes] for _, nodes, _ in tris])
    area2, norm2 = geometry.tri_areas_normals(tri_pts[:, 0], tri_pts[:, 1],
                                              tri_pts[:, 2])
    cent2 = tri_pts.mean(axis=1)
    reg2 = [k for _, _, k in tris]

    edge_tris = {}
    for cell2, (_, nodes, frac) in enumerate(tris):
        for a in range(3):
            key = tuple(sorted((nodes[a], nodes[(a + 1) % 3])))
            edge_tris.setdefault(key, []).append((cell2, frac))

    segment_ids = {}
    segment_sig = []
    for nodes in tagged_lines:
        key = tuple(sorted(nodes))
        if key not in segment_ids:
            segment_ids[key] = len(segment_ids)
            segment_sig.append(("tagged",))
    for key, adj in sorted(edge_tris.items()):
        fracs = sorted({frac for _, frac in adj})
        if len(fracs) >= 2 and key not in segment_ids:
            segment_ids[key] = len(segment_ids)
            segment_sig.append(tuple(fracs))
        elif len(fracs) == 1 and len(adj) > 2:
            raise NonConformingMeshError(
                f"fracture {fracs[0]} is non-manifold at edge {key}")
    # Tagged segments inherit the fracture signature where derivable.
    for key, sid in segment_ids.items():
        if segment_sig[sid] == ("tagged",) and key in edge_tris:
            fracs = sorted({frac for _, frac in edge_tris[key]})
            if len(fracs) >= 2:
                segment_sig[sid] = tuple(fracs)

    faces2 = _FaceBucket()
    pairs1 = {"face": [], "high": [], "low": [], "area": []}
    seen_interior = set()
    for cell2, (_, nodes, frac) in enumerate(tris):
        for a in range(3):
            n0, n1 = nodes[a], nodes[(a + 1) % 3]
            key = tuple(sorted((n0, n1)))
            p0, p1 = node_xyz[n0], node_xyz[n1]
            length = float(np.linalg.norm(p1 - p0))
            mid = 0.5 * (p0 + p1)
            tangent = (p1 - p0) / length
            v = mid - cent2[cell2]
            n_edge = v - (v @ tangent) * tangent
            n_edge = n_edge / np.linalg.norm(n_edge)
            if key in segment_ids:
                fid = faces2.add(length, mid, n_edge, cell2, -1, INTERFACE)
                pairs1["face"].append(fid)
                pairs1["high"].append(cell2)
                pairs1["low"].append(segment_ids[key])
                pairs1["area"].append(length)
                continue
            adj = edge_tris[key]
            if len(adj) == 2:
                if key in seen_interior:
                    continue
                seen_interior.add(key)
                other = adj[1][0] if adj[0][0] == cell2 else adj[0][0]
                faces2.add(length, mid, n_edge, cell2, other, INTERIOR)
            else:
                btag = DOMAIN_BOUNDARY if _on_box(mid, domain_box, geo_tol) \
                    else TIP
                faces2.add(length, mid, n_edge, cell2, -1, btag)

    subdomains[2] = _freeze_subdomain(
        2, area2, cent2, reg2, [tri_pts[i] for i in range(len(tris))], faces2,
        apertures.get(2, 1.0))
    interfaces[2] = InterfaceSet(
        2, np.array(pairs2["face"], dtype=int),
        np.array(pairs2["high"], dtype=int),
        np.array(pairs2["low"], dtype=int),
        np.array(pairs2["area"], dtype=float),
        np.ones(len(pairs2["face"])))

    if not segment_ids:
        return MixedDimGrid(subdomains, interfaces, domain_box)

    # --- 1d cells -----------------------------------------------------------
    seg_keys = [None] * len(segment_ids)
    for key, sid in segment_ids.items():
        seg_keys[sid] = key
    node_segments = {}
    for sid, (n0, n1) in enumerate(seg_keys):
        node_segments.setdefault(n0, []).append(sid)
        node_segments.setdefault(n1, []).append(sid)

    zero_d = set(tagged_points)
    for node, segs in node_segments.items():
        if len(segs) > 2:
            zero_d.add(node)
        elif len(segs) == 2 and segment_sig[segs[0]] != segment_sig[segs[1]]:
            zero_d.add(node)
    for node in tagged_points:
        if node not in node_segments:
            raise NonConformingMeshError(
                f"tagged point at node {node} touches no intersection line")

    comp = _segment_components(seg_keys, node_segments, zero_d)
    len1, cent1, verts1 = [], [], []
    for n0, n1 in seg_keys:
        p0, p1 = node_xyz[n0], node_xyz[n1]
        len1.append(float(np.linalg.norm(p1 - p0)))
        cent1.append(0.5 * (p0 + p1))
        verts1.append(np.array([p0, p1]))

    zero_d_sorted = sorted(zero_d)
    zero_d_index = {node: i for i, node in enumerate(zero_d_sorted)}
    faces1 = _FaceBucket()
    pairs0 = {"face": [], "high": [], "low": []}
    for node in sorted(node_segments):
        segs = node_segments[node]
        pos = node_xyz[node]
        for sid in segs:
            n0, n1 = seg_keys[sid]
            other = node_xyz[n1] if node == n0 else node_xyz[n0]
            direction = (pos - other) / np.linalg.norm(pos - other)
            if node in zero_d_index:
                fid = faces1.add(1.0, pos, direction, sid, -1, INTERFACE)
                pairs0["face"].append(fid)
                pairs0["high"].append(sid)
                pairs0["low"].append(zero_d_index[node])
            elif len(segs) == 2:
                if sid == segs[0]:
                    faces1.add(1.0, pos, direction, segs[0], segs[1], INTERIOR)
            else:
                btag = DOMAIN_BOUNDARY if _on_box(pos, domain_box, geo_tol) \
                    else TIP
                faces1.add(1.0, pos, direction, sid, -1, btag)

    subdomains[1] = _freeze_subdomain(
        1, len1, cent1, comp, verts1, faces1, apertures.get(1, 1.0))
    interfaces[1] = InterfaceSet(
        1, np.array(pairs1["face"], dtype=int),
        np.array(pairs1["high"], dtype=int),
        np.array(pairs1["low"], dtype=int),
        np.array(pairs1["area"], dtype=float),
        np.ones(len(pairs1["face"])))

    if zero_d_sorted:
        pts = [node_xyz[n] for n in zero_d_sorted]
        subdomains[0] = _freeze_subdomain(
            0, np.ones(len(pts)), pts, list(range(len(pts))),
            [np.array([p]) for p in pts], _FaceBucket(),
            apertures.get(0, 1.0))
        interfaces[0] = InterfaceSet(
            0, np.array(pairs0["face"], dtype=int),
            np.array(pairs0["high"], dtype=int),
            np.array(pairs0["low"], dtype=int),
            np.ones(len(pairs0["face"])),
            np.ones(len(pairs0["face"])))

    return MixedDimGrid(subdomains, interfaces, domain_box)


def _on_box(point, box, tol):
    lo, hi = box
    return bool(np.any(np.abs(point - lo) <= tol) or
                np.any(np.abs(point - hi) <= tol))


# ---------------------------------------------------------------------------
# Cartesian lattice mesher
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class AxisRectangle:
    """Axis-aligned rectangle: plane ``axes[axis] = coord`` over spans.

    ``lo``/``hi`` give the extents along the two remaining axes in
    ascending axis order.
    """

    axis: int
    coord: float
    lo: tuple
    hi: tuple

    @classmethod
    def from_corners(cls, corners):
        corners = np.asarray(corners, dtype=float)
        for axis in range(3):
            if np.ptp(corners[:, axis]) == 0.0:
                others = [a for a in range(3) if a != axis]
                return cls(axis, float(corners[0, axis]),
                           tuple(corners[:, others].min(axis=0)),
                           tuple(corners[:, others].max(axis=0)))
        raise LatticeError("rectangle corners are not axis-aligned")

    def span(self, axis):
        others = [a for a in range(3) if a != self.axis]
        return self.lo[others.index(axis)], self.hi[others.index(axis)]


def cartesian_dfm_mesher(n, fractures=(), box=None, region_classifier=None,
                         apertures=None):
    """Hexahedral lattice grid with axis-aligned rectangular fractures.

    ``n`` is the cell count per axis (int or triple). Every fracture
    coordinate must lie on the lattice; off-lattice input raises
    LatticeError rather than distorting the geometry silently.
    """
    if box is None:
        box = ((0.0, 0.0, 0.0), (1.0, 1.0, 1.0))
    lo = np.asarray(box[0], dtype=float)
    hi = np.asarray(box[1], dtype=float)
    if isinstance(n, (int, np.integer)):
        n = (int(n),) * 3
    n = tuple(int(v) for v in n)
    cuts = [np.linspace(lo[a], hi[a], n[a] + 1) for a in range(3)]
    h = [(hi[a] - lo[a]) / n[a] for a in range(3)]
    apertures = dict(apertures or {})

    rects = [r if isinstance(r, AxisRectangle) else
             AxisRectangle.from_corners(r) for r in fractures]

    def cut_index(axis, value):
        idx = int(round((value - lo[axis]) / h[axis]))
        if idx < 0 or idx > n[axis] or \
                abs(cuts[axis][idx] - value) > 1e-9 * max(h[axis], 1.0):
            raise LatticeError(
                f"coordinate {value} on axis {axis} is not on the lattice")
        return idx

    def cell_id(i, j, k):
        return i + n[0] * (j + n[1] * k)

    ncells = n[0] * n[1] * n[2]
    ii, jj, kk = np.meshgrid(np.arange(n[0]), np.arange(n[1]), np.arange(n[2]),
                             indexing="ij")
    order = cell_id(ii, jj, kk).ravel()
    cent3 = np.empty((ncells, 3))
    cent3[order, 0] = (cuts[0][ii] + 0.5 * h[0]).ravel()
    cent3[order, 1] = (cuts[1][jj] + 0.5 * h[1]).ravel()
    cent3[order, 2] = (cuts[2][kk] + 0.5 * h[2]).ravel()
    vol = np.full(ncells, h[0] * h[1] * h[2])
    if region_classifier is None:
        reg3 = np.zeros(ncells, dtype=int)
    else:
        reg3 = np.array([int(region_classifier(c)) for c in cent3])
    verts3 = []
    for c in cent3:
        half = 0.5 * np.array(h)
        corners = np.array([c + half * s for s in
                            [(-1, -1, -1), (1, -1, -1), (-1, 1, -1),
                             (1, 1, -1), (-1, -1, 1), (1, -1, 1),
                             (-1, 1, 1), (1, 1, 1)]])
        verts3.append(corners)

    # Fracture cells: lattice faces covered by a rectangle.
    frac_cells = {}
    cell2_meta = []
    for fk, rect in enumerate(rects):
        a = rect.axis
        u_ax, v_ax = [ax for ax in range(3) if ax != a]
        p = cut_index(a, rect.coord)
        u0, u1 = (cut_index(u_ax, v) for v in rect.span(u_ax))
        v0, v1 = (cut_index(v_ax, v) for v in rect.span(v_ax))
        if u1 <= u0 or v1 <= v0:
            raise LatticeError(f"fracture {fk} has an empty lattice span")
        for u in range(u0, u1):
            for v in range(v0, v1):
                key = (a, p, u, v)
                if key in frac_cells:
                    raise LatticeError(
                        f"fractures {frac_cells[key][1]} and {fk} overlap")
                frac_cells[key] = (len(cell2_meta), fk)
                cell2_meta.append(key)

    # Intersection segments from pairwise rectangle overlap.
    line_edges = {}
    for r1_idx in range(len(rects)):
        for r2_idx in range(r1_idx + 1, len(rects)):
            r1, r2 = rects[r1_idx], rects[r2_idx]
            if r1.axis == r2.axis:
                continue
            e_ax = 3 - r1.axis - r2.axis
            lo1, hi1 = r1.span(r2.axis)
            lo2, hi2 = r2.span(r1.axis)
            if not (lo1 <= r2.coord <= hi1 and lo2 <= r1.coord <= hi2):
                continue
            a0 = max(r1.span(e_ax)[0], r2.span(e_ax)[0])
            a1 = min(r1.span(e_ax)[1], r2.span(e_ax)[1])
            if a1 <= a0:
                continue
            fixed = {r1.axis: cut_index(r1.axis, r1.coord),
                     r2.axis: cut_index(r2.axis, r2.coord)}
            for s in range(cut_index(e_ax, a0), cut_index(e_ax, a1)):
                idx = [0, 0, 0]
                idx[e_ax] = s
                for ax, val in fixed.items():
                    idx[ax] = val
                line_key = (e_ax,) + tuple(
                    fixed[ax] for ax in sorted(fixed))
                line_edges.setdefault((e_ax, tuple(idx)), set()).add(line_key)

    seg_keys = sorted(line_edges)
    seg_ids = {key: sid for sid, key in enumerate(seg_keys)}

    # Intersection points: lattice nodes touched by more than one line.
    node_segments = {}
    node_lines = {}
    for (e_ax, idx), lines in line_edges.items():
        sid = seg_ids[(e_ax, idx)]
        for step in (0, 1):
            nidx = list(idx)
            nidx[e_ax] += step
            node = tuple(nidx)
            node_segments.setdefault(node, []).append(sid)
            node_lines.setdefault(node, set()).update(lines)
    zero_d = sorted(node for node, lines in node_lines.items()
                    if len(lines) > 1)
    zero_d_index = {node: i for i, node in enumerate(zero_d)}

    comp = _segment_components(
        seg_keys, node_segments, set(zero_d)) if seg_keys else []

    def node_pos(idx):
        return np.array([cuts[a][idx[a]] for a in range(3)])

    # --- 3d faces -----------------------------------------------------------
    faces3 = _FaceBucket()
    pairs2 = {"face": [], "high": [], "low": [], "area": []}
    for a in range(3):
        u_ax, v_ax = [ax for ax in range(3) if ax != a]
        area = h[u_ax] * h[v_ax]
        normal = np.zeros(3)
        normal[a] = 1.0
        for p in range(n[a] + 1):
            for u in range(n[u_ax]):
                for v in range(n[v_ax]):
                    centroid = np.zeros(3)
                    centroid[a] = cuts[a][p]
                    centroid[u_ax] = cuts[u_ax][u] + 0.5 * h[u_ax]
                    centroid[v_ax] = cuts[v_ax][v] + 0.5 * h[v_ax]
                    idx = [0, 0, 0]
                    idx[u_ax], idx[v_ax] = u, v
                    idx[a] = p - 1
                    c_neg = cell_id(*idx) if p > 0 else -1
                    idx[a] = p
                    c_pos = cell_id(*idx) if p < n[a] else -1
                    key = (a, p, u, v)
                    if key in frac_cells:
                        low = frac_cells[key][0]
                        for cell3, sign in ((c_neg, 1.0), (c_pos, -1.0)):
                            if cell3 < 0:
                                continue
                            fid = faces3.add(area, centroid, sign * normal,
                                             cell3, -1, INTERFACE)
                            pairs2["face"].append(fid)
                            pairs2["high"].append(cell3)
                            pairs2["low"].append(low)
                            pairs2["area"].append(area)
                    elif c_neg < 0:
                        faces3.add(area, centroid, -normal, c_pos, -1,
                                   DOMAIN_BOUNDARY)
                    elif c_pos < 0:
                        faces3.add(area, centroid, normal, c_neg, -1,
                                   DOMAIN_BOUNDARY)
                    else:
                        faces3.add(area, centroid, normal, c_neg, c_pos,
                                   INTERIOR)

    subdomains = {3: _freeze_subdomain(3, vol, cent3, reg3, verts3, faces3,
                                       1.0)}
    interfaces = {}
    grid_box = np.array([lo, hi])
    if not cell2_meta:
        return MixedDimGrid(subdomains, interfaces, grid_box)

    # --- 2d cells and faces -------------------------------------------------
    area2, cent2, reg2, verts2 = [], [], [], []
    for key in cell2_meta:
        a, p, u, v = key
        u_ax, v_ax = [ax for ax in range(3) if ax != a]
        area2.append(h[u_ax] * h[v_ax])
        centroid = np.zeros(3)
        centroid[a] = cuts[a][p]
        centroid[u_ax] = cuts[u_ax][u] + 0.5 * h[u_ax]
        centroid[v_ax] = cuts[v_ax][v] + 0.5 * h[v_ax]
        cent2.append(centroid)
        reg2.append(frac_cells[key][1])
        corners = []
        for du, dv in ((0, 0), (1, 0), (1, 1), (0, 1)):
            c = np.zeros(3)
            c[a] = cuts[a][p]
            c[u_ax] = cuts[u_ax][u + du]
            c[v_ax] = cuts[v_ax][v + dv]
            corners.append(c)
        verts2.append(np.array(corners))

    faces2 = _FaceBucket()
    pairs1 = {"face": [], "high": [], "low": [], "area": []}
    seen_interior = set()
    for key in cell2_meta:
        a, p, u, v = key
        cell2, frac = frac_cells[key]
        u_ax, v_ax = [ax for ax in range(3) if ax != a]
        # Each quad edge: (edge axis, lattice index triple of its low node).
        for e_ax, fixed_ax, fixed_idx, along_idx, step in (
                (u_ax, v_ax, v, u, (0, -1)),
                (u_ax, v_ax, v + 1, u, (0, 1)),
                (v_ax, u_ax, u, v, (-1, 0)),
                (v_ax, u_ax, u + 1, v, (1, 0))):
            idx = [0, 0, 0]
            idx[a] = p
            idx[fixed_ax] = fixed_idx
            idx[e_ax] = along_idx
            edge = (e_ax, tuple(idx))
            length = h[e_ax]
            mid = node_pos(idx)
            mid[e_ax] += 0.5 * h[e_ax]
            n_edge = np.zeros(3)
            n_edge[fixed_ax] = 1.0 if fixed_idx > (v if fixed_ax == v_ax
                                                   else u) else -1.0
            if edge in seg_ids:
                fid = faces2.add(length, mid, n_edge, cell2, -1, INTERFACE)
                pairs1["face"].append(fid)
                pairs1["high"].append(cell2)
                pairs1["low"].append(seg_ids[edge])
                pairs1["area"].append(length)
                continue
            du, dv = step
            nkey = (a, p, u + du, v + dv)
            neighbor = frac_cells.get(nkey)
            if neighbor is not None and neighbor[1] == frac:
                pair_key = tuple(sorted((cell2, neighbor[0])))
                if pair_key in seen_interior:
                    continue
                seen_interior.add(pair_key)
                faces2.add(length, mid, n_edge, cell2, neighbor[0], INTERIOR)
            else:
                on_box = fixed_idx == 0 or fixed_idx == n[fixed_ax]
                faces2.add(length, mid, n_edge, cell2, -1,
                           DOMAIN_BOUNDARY if on_box else TIP)

    subdomains[2] = _freeze_subdomain(
        2, area2, cent2, reg2, verts2, faces2, apertures.get(2, 1.0))
    interfaces[2] = InterfaceSet(
        2, np.array(pairs2["face"], dtype=int),
        np.array(pairs2["high"], dtype=int),
        np.array(pairs2["low"], dtype=int),
        np.array(pairs2["area"], dtype=float),
        np.ones(len(pairs2["face"])))

    if not seg_keys:
        return MixedDimGrid(subdomains, interfaces, grid_box)

    # --- 1d cells and faces -------------------------------------------------
    len1, cent1, verts1 = [], [], []
    for e_ax, idx in seg_keys:
        p0 = node_pos(idx)
        p1 = p0.copy()
        p1[e_ax] += h[e_ax]
        len1.append(h[e_ax])
        cent1.append(0.5 * (p0 + p1))
        verts1.append(np.array([p0, p1]))

    faces1 = _FaceBucket()
    pairs0 = {"face": [], "high": [], "low": []}
    for node in sorted(node_segments):
        segs = node_segments[node]
        pos = node_pos(node)
        for sid in segs:
            e_ax, idx = seg_keys[sid]
            direction = np.zeros(3)
            direction[e_ax] = 1.0 if tuple(node) > tuple(idx) else -1.0
            if node in zero_d_index:
                fid = faces1.add(1.0, pos, direction, sid, -1, INTERFACE)
                pairs0["face"].append(fid)
                pairs0["high"].append(sid)
                pairs0["low"].append(zero_d_index[node])
            elif len(segs) == 2:
                if sid == segs[0]:
                    faces1.add(1.0, pos, direction, segs[0], segs[1], INTERIOR)
            else:
                on_box = any(node[ax] in (0, n[ax]) for ax in range(3))
                faces1.add(1.0, pos, direction, sid, -1,
                           DOMAIN_BOUNDARY if on_box else TIP)

    subdomains[1] = _freeze_subdomain(
        1, len1, cent1, comp, verts1, faces1, apertures.get(1, 1.0))
    interfaces[1] = InterfaceSet(
        1, np.array(pairs1["face"], dtype=int),
        np.array(pairs1["high"], dtype=int),
        np.array(pairs1["low"], dtype=int),
        np.array(pairs1["area"], dtype=float),
        np.ones(len(pairs1["face"])))

    if zero_d:
        pts = [node_pos(node) for node in zero_d]
        subdomains[0] = _freeze_subdomain(
            0, np.ones(len(pts)), pts, list(range(len(pts))),
            [np.array([p]) for p in pts], _FaceBucket(),
            apertures.get(0, 1.0))
        interfaces[0] = InterfaceSet(
            0, np.array(pairs0["face"], dtype=int),
            np.array(pairs0["high"], dtype=int),
            np.array(pairs0["low"], dtype=int),
            np.ones(len(pairs0["face"])),
            np.ones(len(pairs0["face"])))

    return MixedDimGrid(subdomains, interfaces, grid_box)
