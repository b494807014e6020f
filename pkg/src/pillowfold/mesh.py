"""Indexed triangle meshes: grid sampling, structured welding, queries, file IO.

The assembly helpers here know the layout of a quarter grid (rows of constant
v-fraction, columns of constant s, crease row at v = 0) so that reflected
copies can be welded by explicit row/column correspondences instead of global
coordinate hashing.  That distinction matters at the flat stage, where four
boundary rows coincide in space but only specific pairs are identified.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

import numpy as np

from .errors import (DegenerateTriangle, GridTooCoarse, IoError,
                     NonFiniteEvaluation, WeldFailure)

_DEDUPE_FACTOR = 1e-13     # in-column duplicate snap, relative to bbox diagonal
_WELD_TOL_FACTOR = 1e-6    # default weld tolerance, relative to bbox diagonal
_CONTACT_FACTOR = 1e-9     # seam contact tolerance for intersection tests
_DEGENERATE_AREA_FACTOR = 1e-14


@dataclass
class TriMesh:
    """Vertices (n, 3) float64 and triangles (m, 3) int64, 0-based."""

    vertices: np.ndarray
    faces: np.ndarray
    weld_report: dict | None = field(default=None, compare=False)

    def __post_init__(self):
        self.vertices = np.ascontiguousarray(self.vertices, dtype=float)
        self.faces = np.ascontiguousarray(self.faces, dtype=np.int64)
        if self.faces.size and (self.faces.min() < 0
                                or self.faces.max() >= len(self.vertices)):
            raise IndexError("face index out of range")

    @property
    def n_vertices(self) -> int:
        return int(self.vertices.shape[0])

    @property
    def n_faces(self) -> int:
        return int(self.faces.shape[0])

    def diagonal(self) -> float:
        if not len(self.vertices):
            return 0.0
        span = self.vertices.max(axis=0) - self.vertices.min(axis=0)
        return float(np.linalg.norm(span))

    def edges_with_counts(self) -> tuple[np.ndarray, np.ndarray]:
        """Undirected edges (k, 2) with the number of incident triangles."""
        e = np.concatenate([self.faces[:, [0, 1]], self.faces[:, [1, 2]],
                            self.faces[:, [2, 0]]])
        e = np.sort(e, axis=1)
        return np.unique(e, axis=0, return_counts=True)

    def n_edges(self) -> int:
        return int(self.edges_with_counts()[0].shape[0])

    def boundary_edge_count(self) -> int:
        _, counts = self.edges_with_counts()
        return int(np.count_nonzero(counts == 1))

    def nonmanifold_edge_count(self) -> int:
        _, counts = self.edges_with_counts()
        return int(np.count_nonzero(counts > 2))

    def is_closed(self) -> bool:
        if not self.n_faces:
            return False
        _, counts = self.edges_with_counts()
        return bool(np.all(counts == 2))

    def euler_characteristic(self) -> int:
        return self.n_vertices - self.n_edges() + self.n_faces

    def orientation_consistent(self) -> bool:
        """True when no directed edge is traversed twice in the same sense."""
        d = np.concatenate([self.faces[:, [0, 1]], self.faces[:, [1, 2]],
                            self.faces[:, [2, 0]]])
        keys = d[:, 0].astype(np.int64) * self.n_vertices + d[:, 1]
        return bool(np.unique(keys).size == keys.size)

    def triangle_areas(self) -> np.ndarray:
        p = self.vertices[self.faces]
        return 0.5 * np.linalg.norm(
            np.cross(p[:, 1] - p[:, 0], p[:, 2] - p[:, 0]), axis=1)

    def translated(self, offset) -> "TriMesh":
        return TriMesh(self.vertices + np.asarray(offset, dtype=float),
                       self.faces.copy(), weld_report=self.weld_report)


# ---------------------------------------------------------------------------
# Quarter-grid sampling and triangulation
# ---------------------------------------------------------------------------

def quarter_grid_v(zeta_values: np.ndarray, b: float, n_lower: int,
                   n_upper: int) -> np.ndarray:
    """Per-column v samples from v = zeta - b up to v = zeta, crease row at 0.

    Rows run bottom (vertical end) to top (horizontal end); row n_lower is
    exactly v = 0 so the crease is a mesh polyline.
    """
    z = np.asarray(zeta_values, dtype=float)
    lower = [(z - b) * (1.0 - j / n_lower) for j in range(n_lower)]
    upper = [z * (j / n_upper) for j in range(n_upper + 1)]
    return np.stack(lower + upper, axis=0)


def _grid_indices(points: np.ndarray, snap_tol: float):
    """Assign vertex ids over a (rows, cols, 3) grid, merging vertically
    coincident neighbours (collapsed corner columns)."""
    rows, cols, _ = points.shape
    idx = np.full((rows, cols), -1, dtype=np.int64)
    verts: list[np.ndarray] = []
    for i in range(cols):
        for j in range(rows):
            if j > 0 and np.linalg.norm(points[j, i] - points[j - 1, i]) <= snap_tol:
                idx[j, i] = idx[j - 1, i]
            else:
                idx[j, i] = len(verts)
                verts.append(points[j, i])
    return np.asarray(verts), idx


def _grid_faces(idx: np.ndarray, crease_row: int) -> np.ndarray:
    """Triangulate the quad grid, diagonal split toward the crease row."""
    rows, cols = idx.shape
    tris = []
    for j in range(rows - 1):
        for i in range(cols - 1):
            a, bb = idx[j, i], idx[j, i + 1]
            d, c = idx[j + 1, i], idx[j + 1, i + 1]
            if j >= crease_row:
                cand = ((a, d, c), (a, c, bb))
            else:
                cand = ((a, d, bb), (bb, d, c))
            for t in cand:
                if t[0] != t[1] and t[1] != t[2] and t[2] != t[0]:
                    tris.append(t)
    return np.asarray(tris, dtype=np.int64).reshape(-1, 3)


def sample_quarter(X, s_values: np.ndarray, zeta_values: np.ndarray, b: float,
                   n_lower: int, n_upper: int):
    """Evaluate X on the quarter grid; returns (points, idx, faces, crease_row).

    points has shape (rows, cols, 3) with rows = n_lower + n_upper + 1.
    """
    s = np.asarray(s_values, dtype=float)
    vmat = quarter_grid_v(zeta_values, b, n_lower, n_upper)
    smat = np.broadcast_to(s, vmat.shape)
    pts = X(smat, vmat)
    if not np.all(np.isfinite(pts)):
        raise NonFiniteEvaluation("surface sampler returned non-finite points")
    scale = float(np.linalg.norm(pts.max(axis=(0, 1)) - pts.min(axis=(0, 1))))
    verts, idx = _grid_indices(pts, _DEDUPE_FACTOR * max(scale, 1.0))
    faces = _grid_faces(idx, crease_row=n_lower)
    return verts, idx, faces, n_lower


def sample_and_triangulate(X, data, n_s: int, n_v: int) -> TriMesh:
    """Triangulate one quarter domain as an open mesh.

    n_v counts total v intervals per column and is split evenly between the
    lower and upper strips, keeping the v = 0 crease row.
    """
    if n_s < 2 or n_v < 2:
        raise GridTooCoarse("need n_s >= 2 and n_v >= 2")
    s_values = np.linspace(0.0, data.length, n_s + 1)
    zeta_values = _snapped_zeta(data, s_values)
    n_lower = n_v // 2
    n_upper = n_v - n_lower
    verts, _, faces, _ = sample_quarter(X, s_values, zeta_values, data.b,
                                        n_lower, n_upper)
    return TriMesh(verts, faces)


def _snapped_zeta(data, s_values: np.ndarray, bc_tol: float = 1e-9) -> np.ndarray:
    z = np.asarray(data.zeta.eval(s_values, 0), dtype=float).copy()
    ends = (s_values <= 0.0) | (s_values >= data.length)
    z[ends & (np.abs(z) <= bc_tol)] = 0.0
    return z


# ---------------------------------------------------------------------------
# Reflected assembly with structured welding
# ---------------------------------------------------------------------------

class _UnionFind:
    def __init__(self, n: int):
        self.parent = list(range(n))

    def find(self, i: int) -> int:
        p = self.parent
        while p[i] != i:
            p[i] = p[p[i]]
            i = p[i]
        return i

    def union(self, i: int, j: int) -> None:
        ri, rj = self.find(i), self.find(j)
        if ri != rj:
            if rj < ri:
                ri, rj = rj, ri
            self.parent[rj] = ri


def assemble_reflected(X, data, n_s: int, n_v: int, *,
                       weld_tol: float | None = None,
                       require_horizontal_weld: bool = False) -> TriMesh:
    """Weld the four reflected copies of a quarter into one mesh.

    Reflections: rho_V about the plane y = b, rho_H about z = 0. Corresponding
    boundaries: vertical-end rows between a piece and its rho_V image (always
    coincident), the s-endpoint columns and horizontal-end rows between a
    piece and its rho_H image (coincident only when the horizontal end lies in
    z = 0).  Welds outside tolerance are left open; with
    require_horizontal_weld they raise WeldFailure instead.
    """
    if n_s < 2 or n_v < 2:
        raise GridTooCoarse("need n_s >= 2 and n_v >= 2")
    b = data.b
    s_values = np.linspace(0.0, data.length, n_s + 1)
    zeta_values = _snapped_zeta(data, s_values)
    n_lower = n_v // 2
    n_upper = n_v - n_lower
    verts0, idx, faces0, _ = sample_quarter(X, s_values, zeta_values, b,
                                            n_lower, n_upper)

    def rho_v(p):
        q = p.copy()
        q[:, 1] = 2.0 * b - q[:, 1]
        return q

    def rho_h(p):
        q = p.copy()
        q[:, 2] = -q[:, 2]
        return q

    piece_verts = [verts0, rho_v(verts0), rho_h(verts0), rho_h(rho_v(verts0))]
    flip = [False, True, True, False]

    nv_local = len(verts0)
    offsets = [k * nv_local for k in range(4)]
    all_verts = np.concatenate(piece_verts)
    all_faces = []
    for k in range(4):
        f = faces0 + offsets[k]
        if flip[k]:
            f = f[:, [0, 2, 1]]
        all_faces.append(f)
    all_faces = np.concatenate(all_faces)

    diag = float(np.linalg.norm(all_verts.max(axis=0) - all_verts.min(axis=0)))
    tol = (_WELD_TOL_FACTOR * diag) if weld_tol is None else weld_tol

    uf = _UnionFind(len(all_verts))
    report = {"vertical_end": "welded", "endpoint_columns": "welded",
              "horizontal_end": "welded"}

    def weld_pairs(ids_a, ids_b, label, required):
        ok = True
        for la, lb in zip(np.ravel(ids_a), np.ravel(ids_b)):
            ga, gb = int(la), int(lb)
            d = float(np.linalg.norm(all_verts[ga] - all_verts[gb]))
            if d <= tol:
                uf.union(ga, gb)
            else:
                ok = False
                if required:
                    raise WeldFailure(
                        f"{label} correspondence off by {d:.3e} > tol {tol:.3e}")
        return ok

    top = idx.shape[0] - 1
    # vertical-end rows: piece <-> its rho_V image
    ok_v = weld_pairs(idx[0, :] + offsets[0], idx[0, :] + offsets[1],
                      "vertical end", True)
    ok_v &= weld_pairs(idx[0, :] + offsets[2], idx[0, :] + offsets[3],
                       "vertical end", True)
    if not ok_v:
        report["vertical_end"] = "open"
    # s-endpoint columns: piece <-> its rho_H image (z = 0 there)
    ok_c = True
    for col in (0, idx.shape[1] - 1):
        ok_c &= weld_pairs(idx[:, col] + offsets[0], idx[:, col] + offsets[2],
                           "endpoint column", True)
        ok_c &= weld_pairs(idx[:, col] + offsets[1], idx[:, col] + offsets[3],
                           "endpoint column", True)
    if not ok_c:
        report["endpoint_columns"] = "open"
    # horizontal-end rows: coincide only when the end lies in z = 0
    ok_h = weld_pairs(idx[top, :] + offsets[0], idx[top, :] + offsets[2],
                      "horizontal end", require_horizontal_weld)
    ok_h &= weld_pairs(idx[top, :] + offsets[1], idx[top, :] + offsets[3],
                       "horizontal end", require_horizontal_weld)
    if not ok_h:
        report["horizontal_end"] = "open"

    roots = np.fromiter((uf.find(i) for i in range(len(all_verts))),
                        dtype=np.int64, count=len(all_verts))
    unique_roots, new_ids = np.unique(roots, return_inverse=True)
    mesh = TriMesh(all_verts[unique_roots], new_ids[all_faces])
    mesh.weld_report = report
    report["boundary_edge_count"] = mesh.boundary_edge_count()
    return mesh


# ---------------------------------------------------------------------------
# Self-intersection (spatial-hash broad phase, Moller interval narrow phase)
# ---------------------------------------------------------------------------

def self_intersection_pairs(mesh: TriMesh,
                            contact_tol_factor: float = _CONTACT_FACTOR) -> list:
    """Transversally intersecting triangle pairs, excluding pairs that share a
    vertex and contacts within the seam tolerance (tangential touches and
    coplanar overlaps do not count)."""
    nf = mesh.n_faces
    if nf < 2:
        return []
    P = mesh.vertices[mesh.faces]          # (F, 3, 3)
    lo = P.min(axis=1)
    hi = P.max(axis=1)
    diag = mesh.diagonal()
    eps = contact_tol_factor * max(diag, 1e-300)

    extents = hi - lo
    cell = float(np.median(extents.max(axis=1))) * 2.0
    if cell <= 0:
        cell = max(diag, 1.0) / 16.0
    ilo = np.floor(lo / cell).astype(np.int64)
    ihi = np.floor(hi / cell).astype(np.int64)

    buckets: dict[tuple, list] = {}
    for t in range(nf):
        x0, y0, z0 = ilo[t]
        x1, y1, z1 = ihi[t]
        for cx in range(x0, x1 + 1):
            for cy in range(y0, y1 + 1):
                for cz in range(z0, z1 + 1):
                    buckets.setdefault((cx, cy, cz), []).append(t)

    pair_keys = set()
    for ids in buckets.values():
        k = len(ids)
        if k < 2:
            continue
        for a in range(k - 1):
            ta = ids[a]
            for bb in range(a + 1, k):
                tb = ids[bb]
                pair_keys.add(ta * nf + tb if ta < tb else tb * nf + ta)
    if not pair_keys:
        return []
    keys = np.fromiter(pair_keys, dtype=np.int64, count=len(pair_keys))
    keys.sort()
    i = keys // nf
    j = keys % nf

    # drop pairs sharing any vertex index
    fi, fj = mesh.faces[i], mesh.faces[j]
    shares = np.zeros(len(i), dtype=bool)
    for a in range(3):
        for bb in range(3):
            shares |= fi[:, a] == fj[:, bb]
    i, j = i[~shares], j[~shares]
    if not len(i):
        return []

    # AABB overlap filter
    ok = np.all((lo[i] <= hi[j] + eps) & (lo[j] <= hi[i] + eps), axis=1)
    i, j = i[ok], j[ok]
    if not len(i):
        return []

    mask = _tri_tri_batch(P[i], P[j], eps)
    return sorted(zip(i[mask].tolist(), j[mask].tolist()))


def _plane_side(T_other: np.ndarray, origin: np.ndarray, normal: np.ndarray,
                thresh: np.ndarray) -> tuple:
    d = np.einsum('mkj,mj->mk', T_other - origin[:, None, :], normal)
    pos = np.all(d > thresh[:, None], axis=1)
    neg = np.all(d < -thresh[:, None], axis=1)
    onp = np.all(np.abs(d) <= thresh[:, None], axis=1)
    return d, pos | neg, onp


def _interval_on_line(T: np.ndarray, d: np.ndarray, thresh: np.ndarray,
                      axis_dir: np.ndarray) -> tuple:
    """Projection interval of each triangle's plane cross-section onto the
    intersection line direction. Candidates: on-plane vertices and edge
    crossings."""
    m = T.shape[0]
    proj = np.einsum('mkj,mj->mk', T, axis_dir)          # (m, 3)
    cand = np.full((m, 6), np.nan)
    on_plane = np.abs(d) <= thresh[:, None]
    cand[:, :3] = np.where(on_plane, proj, np.nan)
    edges = ((0, 1), (1, 2), (2, 0))
    for e, (a, bb) in enumerate(edges):
        da, db = d[:, a], d[:, bb]
        crossing = ((da > thresh) & (db < -thresh)) | ((da < -thresh) & (db > thresh))
        denom = np.where(crossing, da - db, 1.0)
        t = da / denom
        pt = proj[:, a] + t * (proj[:, bb] - proj[:, a])
        cand[:, 3 + e] = np.where(crossing, pt, np.nan)
    valid = np.any(np.isfinite(cand), axis=1)
    lo = np.nanmin(np.where(np.isfinite(cand), cand, np.inf), axis=1)
    hi = np.nanmax(np.where(np.isfinite(cand), cand, -np.inf), axis=1)
    return lo, hi, valid


def _tri_tri_batch(T1: np.ndarray, T2: np.ndarray, eps: float) -> np.ndarray:
    """True where triangle pairs intersect transversally with crossing-segment
    overlap longer than eps."""
    n1 = np.cross(T1[:, 1] - T1[:, 0], T1[:, 2] - T1[:, 0])
    n2 = np.cross(T2[:, 1] - T2[:, 0], T2[:, 2] - T2[:, 0])
    th1 = eps * np.linalg.norm(n1, axis=1)
    th2 = eps * np.linalg.norm(n2, axis=1)

    d2, sep1, cop1 = _plane_side(T2, T1[:, 0], n1, th1)
    d1, sep2, cop2 = _plane_side(T1, T2[:, 0], n2, th2)
    alive = ~(sep1 | sep2 | cop1 | cop2)
    if not np.any(alive):
        return alive

    D = np.cross(n1, n2)
    Dn = np.linalg.norm(D, axis=1)
    near_parallel = Dn <= 1e-14 * np.linalg.norm(n1, axis=1) * np.linalg.norm(n2, axis=1)
    alive &= ~near_parallel
    Dhat = D / np.where(Dn > 0, Dn, 1.0)[:, None]

    lo1, hi1, v1 = _interval_on_line(T1, d1, th2, Dhat)
    lo2, hi2, v2 = _interval_on_line(T2, d2, th1, Dhat)
    overlap = np.minimum(hi1, hi2) - np.maximum(lo1, lo2)
    return alive & v1 & v2 & (overlap > eps)


def min_triangle_area_check(mesh: TriMesh) -> None:
    """Raise DegenerateTriangle when any triangle falls below the area floor."""
    if not mesh.n_faces:
        return
    floor = _DEGENERATE_AREA_FACTOR * mesh.diagonal() ** 2
    areas = mesh.triangle_areas()
    if np.any(areas < floor):
        worst = int(np.argmin(areas))
        raise DegenerateTriangle(
            f"triangle {worst} area {areas[worst]:.3e} below {floor:.3e}")


# ---------------------------------------------------------------------------
# File emission
# ---------------------------------------------------------------------------

def _fmt(x: float) -> str:
    return format(float(x), ".9g")


def export_obj(mesh: TriMesh, path) -> None:
    """ASCII OBJ, v/f records, 1-based indices, 9 significant digits."""
    try:
        with open(path, "w", encoding="ascii") as fh:
            fh.write("# pillowfold triangle mesh\n")
            for v in mesh.vertices:
                fh.write(f"v {_fmt(v[0])} {_fmt(v[1])} {_fmt(v[2])}\n")
            for f in mesh.faces:
                fh.write(f"f {f[0] + 1} {f[1] + 1} {f[2] + 1}\n")
    except OSError as exc:
        raise IoError(str(exc)) from exc


def load_obj(path) -> TriMesh:
    verts, faces = [], []
    try:
        with open(path, "r", encoding="ascii") as fh:
            for line in fh:
                parts = line.split()
                if not parts:
                    continue
                if parts[0] == "v":
                    verts.append([float(p) for p in parts[1:4]])
                elif parts[0] == "f":
                    faces.append([int(p.split("/")[0]) - 1 for p in parts[1:4]])
    except OSError as exc:
        raise IoError(str(exc)) from exc
    return TriMesh(np.asarray(verts, dtype=float),
                   np.asarray(faces, dtype=np.int64).reshape(-1, 3))


def export_svg(path, width: float, height: float, polylines: list,
               margin: float = 0.05) -> None:
    """Rectangle outline [0,w]x[0,h] plus polylines, y flipped to SVG."""
    pad = margin * max(width, height)
    try:
        with open(path, "w", encoding="ascii") as fh:
            fh.write('<?xml version="1.0" encoding="UTF-8"?>\n')
            fh.write(
                f'<svg xmlns="http://www.w3.org/2000/svg" viewBox='
                f'"{_fmt(-pad)} {_fmt(-pad)} {_fmt(width + 2 * pad)} '
                f'{_fmt(height + 2 * pad)}">\n')
            fh.write(
                f'<rect x="0" y="0" width="{_fmt(width)}" height="{_fmt(height)}" '
                'fill="none" stroke="black" stroke-width="0.004"/>\n')
            for pts in polylines:
                coords = " ".join(
                    f"{_fmt(p[0])},{_fmt(height - p[1])}" for p in pts)
                fh.write(f'<polyline points="{coords}" fill="none" '
                         'stroke="red" stroke-width="0.004"/>\n')
            fh.write("</svg>\n")
    except OSError as exc:
        raise IoError(str(exc)) from exc


def export_trace(rows: list, path) -> None:
    """Sweep trace as a JSON array, one row per requested t."""
    try:
        with open(path, "w", encoding="ascii") as fh:
            json.dump(rows, fh, indent=2)
            fh.write("\n")
    except OSError as exc:
        raise IoError(str(exc)) from exc
