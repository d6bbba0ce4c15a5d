"""Triangle-mesh ingestion and inspection-target extraction.

The object of interest arrives as a triangle mesh in a minimal text format
(``v x y z`` / ``f i j k`` lines, 1-based indices, a strict subset of the
Wavefront layout). Targets are the mesh vertices followed by the facet
centers, in file order; that ordering is part of the log contract, so the
status bit for target ``l`` is stable across runs. Each target carries an
outward unit normal, and a standoff point obtained by projecting the target
outward along its normal. Agents inspect targets by approaching the standoff
points, never the surface itself.

Points are plain ``(3,)`` float64 arrays throughout.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

MIN_FACET_AREA = 1e-9  # m^2

__all__ = [
    "MeshFormatError",
    "DegenerateMeshError",
    "TriangleMesh",
    "InspectionRegion",
    "TargetSet",
    "load_mesh",
    "parse_mesh",
    "facet_center",
    "build_target_set",
]


class MeshFormatError(ValueError):
    """Malformed mesh file: bad line, non-triangle face, index out of range."""


class DegenerateMeshError(ValueError):
    """Geometrically unusable mesh: zero-area facet or zero vertex normal."""


@dataclass(frozen=True)
class TriangleMesh:
    """Triangulated object boundary.

    ``vertices`` is (V, 3) float64, ``facets`` is (F, 3) int32 with 0-based
    vertex indices. Facet winding is outward: every facet normal points away
    from the interior reference point (the vertex centroid).
    """

    vertices: np.ndarray
    facets: np.ndarray

    @property
    def n_vertices(self) -> int:
        return self.vertices.shape[0]

    @property
    def n_facets(self) -> int:
        return self.facets.shape[0]

    def interior_point(self) -> np.ndarray:
        """Reference point used to decide outwardness (vertex centroid).

        Adequate for convex-ish / star-shaped structures; strongly concave
        meshes may need a better reference.
        """
        return self.vertices.mean(axis=0)

    def facet_normals(self) -> np.ndarray:
        """(F, 3) unit normals following the facet winding."""
        a = self.vertices[self.facets[:, 0]]
        b = self.vertices[self.facets[:, 1]]
        c = self.vertices[self.facets[:, 2]]
        cross = np.cross(b - a, c - a)
        norms = np.linalg.norm(cross, axis=1, keepdims=True)
        return cross / norms

    def facet_areas(self) -> np.ndarray:
        a = self.vertices[self.facets[:, 0]]
        b = self.vertices[self.facets[:, 1]]
        c = self.vertices[self.facets[:, 2]]
        return 0.5 * np.linalg.norm(np.cross(b - a, c - a), axis=1)


@dataclass(frozen=True)
class InspectionRegion:
    """Axis-aligned cuboid the agents operate in. ``lo < hi`` componentwise."""

    lo: np.ndarray
    hi: np.ndarray

    def __post_init__(self):
        lo = np.asarray(self.lo, dtype=np.float64)
        hi = np.asarray(self.hi, dtype=np.float64)
        object.__setattr__(self, "lo", lo)
        object.__setattr__(self, "hi", hi)
        if lo.shape != (3,) or hi.shape != (3,):
            raise ValueError("region corners must be 3-vectors")
        if not (np.isfinite(lo).all() and np.isfinite(hi).all()):
            raise ValueError("region corners must be finite")
        if not np.all(lo < hi):
            raise ValueError("region min corner must be below max corner")

    @property
    def extent(self) -> np.ndarray:
        return self.hi - self.lo

    def contains(self, points: np.ndarray, strict: bool = False) -> bool:
        pts = np.atleast_2d(points)
        if strict:
            return bool(np.all(pts > self.lo) and np.all(pts < self.hi))
        return bool(np.all(pts >= self.lo) and np.all(pts <= self.hi))


@dataclass(frozen=True)
class TargetSet:
    """Inspection targets with outward normals and standoff points.

    ``targets[l]`` for ``l < n_vertices`` is mesh vertex ``l``; the remaining
    entries are facet centers in facet order. ``projected[l] = targets[l] +
    d_proj * normals[l]``. ``facet_members[k]`` lists the four target indices
    that make up facet ``k``: its three vertices and its center.
    """

    targets: np.ndarray        # (L, 3)
    projected: np.ndarray      # (L, 3) outward standoff points
    normals: np.ndarray        # (L, 3) unit
    facet_members: np.ndarray  # (F, 4) int32 target indices
    n_vertices: int
    d_proj: float

    def __len__(self) -> int:
        return self.targets.shape[0]


def parse_mesh(text: str, name: str = "<mesh>") -> TriangleMesh:
    """Parse the ``v``/``f`` text format; validate and orient the mesh.

    Only vertex and triangular-face lines are accepted; blank lines are
    skipped, everything else (comments included) is a format error. Facets
    whose winding points toward the interior are flipped so that the outward
    invariant holds on return.
    """
    vertices: list[list[float]] = []
    facets: list[list[int]] = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        tokens = raw.split()
        if not tokens:
            continue
        kind = tokens[0]
        if kind == "v":
            if len(tokens) != 4:
                raise MeshFormatError(
                    f"{name}:{lineno}: vertex line needs exactly 3 coordinates")
            try:
                xyz = [float(t) for t in tokens[1:]]
            except ValueError as exc:
                raise MeshFormatError(f"{name}:{lineno}: bad vertex coordinate") from exc
            if not all(np.isfinite(xyz)):
                raise MeshFormatError(f"{name}:{lineno}: non-finite vertex coordinate")
            vertices.append(xyz)
        elif kind == "f":
            if len(tokens) != 4:
                raise MeshFormatError(
                    f"{name}:{lineno}: only triangular faces are supported")
            try:
                ijk = [int(t) for t in tokens[1:]]
            except ValueError as exc:
                raise MeshFormatError(f"{name}:{lineno}: bad face index") from exc
            if any(i < 1 for i in ijk):
                raise MeshFormatError(f"{name}:{lineno}: face indices are 1-based")
            facets.append([i - 1 for i in ijk])
        else:
            raise MeshFormatError(
                f"{name}:{lineno}: unsupported line type {kind!r}")

    if not vertices:
        raise MeshFormatError(f"{name}: no vertices")
    if not facets:
        raise MeshFormatError(f"{name}: no faces")

    verts = np.asarray(vertices, dtype=np.float64)
    faces = np.asarray(facets, dtype=np.int32)
    if faces.max() >= len(verts):
        bad = int(faces.max()) + 1
        raise MeshFormatError(
            f"{name}: face index {bad} out of range (only {len(verts)} vertices)")

    mesh = _orient_outward(TriangleMesh(verts, faces))
    _check_degeneracy(mesh)
    return mesh


def load_mesh(path) -> TriangleMesh:
    """Read a mesh file (see `parse_mesh` for the accepted format)."""
    with open(path, "r", encoding="utf-8") as fh:
        return parse_mesh(fh.read(), name=str(path))


def _check_degeneracy(mesh: TriangleMesh) -> None:
    areas = mesh.facet_areas()
    if np.any(areas <= MIN_FACET_AREA):
        k = int(np.argmin(areas))
        raise DegenerateMeshError(
            f"facet {k} is degenerate (area {areas[k]:.3e} m^2)")


def _orient_outward(mesh: TriangleMesh) -> TriangleMesh:
    """Flip facets whose normal points toward the interior reference point.

    A facet coplanar with the reference point (flat or near-flat meshes,
    e.g. a single facet) has no decidable side; its file winding is trusted.
    """
    interior = mesh.interior_point()
    a = mesh.vertices[mesh.facets[:, 0]]
    b = mesh.vertices[mesh.facets[:, 1]]
    c = mesh.vertices[mesh.facets[:, 2]]
    cross = np.cross(b - a, c - a)
    centers = (a + b + c) / 3.0
    side = (cross * (centers - interior)).sum(axis=1)
    flip = side < 0.0
    if not np.any(flip):
        return mesh
    facets = mesh.facets.copy()
    facets[flip] = facets[flip][:, [0, 2, 1]]
    return TriangleMesh(mesh.vertices, facets)


def facet_center(mesh: TriangleMesh, k: int) -> np.ndarray:
    """Arithmetic mean of facet k's three vertices."""
    tri = mesh.facets[k]
    return mesh.vertices[tri].mean(axis=0)


def build_target_set(mesh: TriangleMesh, d_proj: float) -> TargetSet:
    """Derive the target set from a mesh: vertices, facet centers, normals,
    and outward standoff points at distance ``d_proj``.

    Facet-center normals are the facet plane normals; vertex normals are the
    area-weighted mean of adjacent facet normals (the unnormalized winding
    cross product is already area-weighted). A vertex whose adjacent facets
    cancel out gets no usable direction and is rejected.
    """
    if d_proj <= 0:
        raise ValueError("d_proj must be positive")

    nv = mesh.n_vertices
    nf = mesh.n_facets
    a = mesh.vertices[mesh.facets[:, 0]]
    b = mesh.vertices[mesh.facets[:, 1]]
    c = mesh.vertices[mesh.facets[:, 2]]
    cross = np.cross(b - a, c - a)  # outward, magnitude 2*area
    centers = (a + b + c) / 3.0

    vertex_acc = np.zeros((nv, 3))
    for col in range(3):
        np.add.at(vertex_acc, mesh.facets[:, col], cross)
    norms = np.linalg.norm(vertex_acc, axis=1)
    if np.any(norms < 1e-12):
        v = int(np.nonzero(norms < 1e-12)[0][0])
        raise DegenerateMeshError(
            f"vertex {v} has opposing adjacent facets (zero mean normal)")
    vertex_normals = vertex_acc / norms[:, None]
    facet_normals = cross / np.linalg.norm(cross, axis=1, keepdims=True)

    targets = np.concatenate([mesh.vertices, centers], axis=0)
    normals = np.concatenate([vertex_normals, facet_normals], axis=0)
    projected = targets + d_proj * normals

    facet_members = np.empty((nf, 4), dtype=np.int32)
    facet_members[:, :3] = mesh.facets
    facet_members[:, 3] = nv + np.arange(nf, dtype=np.int32)

    return TargetSet(
        targets=targets,
        projected=projected,
        normals=normals,
        facet_members=facet_members,
        n_vertices=nv,
        d_proj=float(d_proj),
    )
