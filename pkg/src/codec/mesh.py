"""
Meshing der Randflächen von Voxel-Körpern

Jede Fläche zwischen einem konfidenten Voxel und einem leeren (oder wenig
konfidenten) Nachbarn wird ein Quad aus zwei Dreiecken, von außen gesehen
gegen den Uhrzeigersinn. Eckpunkte werden zwischen Flächen geteilt.
"""
from dataclasses import dataclass
from typing import List, Optional, Sequence

import numpy as np

from ..voxcore import SparseGrid
from .linear import CONFIDENCE_THRESHOLD


@dataclass(frozen=True)
class Mesh:
    """
    Attributes:
        vertices: (V, 3) float32 Meter
        faces: (F, 3) int32 Vertex-Indizes
        face_colors: (F, 3) uint8 RGB
    """
    vertices: np.ndarray
    faces: np.ndarray
    face_colors: np.ndarray

    @classmethod
    def empty(cls) -> "Mesh":
        return cls(np.zeros((0, 3), np.float32), np.zeros((0, 3), np.int32), np.zeros((0, 3), np.uint8))

    @property
    def triangle_count(self) -> int:
        return int(self.faces.shape[0])

    def euler_characteristic(self) -> int:
        if not self.triangle_count:
            return 0
        edges = np.sort(np.concatenate([self.faces[:, [0, 1]], self.faces[:, [1, 2]], self.faces[:, [2, 0]]]), axis=1)
        n_edges = np.unique(edges, axis=0).shape[0]
        used = np.unique(self.faces).size
        return int(used - n_edges + self.triangle_count)

    def face_normals(self) -> np.ndarray:
        v = self.vertices.astype(np.float64)
        a, b, c = v[self.faces[:, 0]], v[self.faces[:, 1]], v[self.faces[:, 2]]
        n = np.cross(b - a, c - a)
        return n / np.linalg.norm(n, axis=1, keepdims=True)

    def same_as(self, other: "Mesh") -> bool:
        return (np.array_equal(self.vertices, other.vertices) and np.array_equal(self.faces, other.faces)
                and np.array_equal(self.face_colors, other.face_colors))


def _rgb_bytes(features: np.ndarray) -> np.ndarray:
    rgb = np.clip(np.nan_to_num(features[:, :3].astype(np.float64)), 0.0, 1.0)
    return np.floor(rgb * 255.0 + 0.5).astype(np.uint8)


def _confident(features: SparseGrid, confidence: Optional[np.ndarray], threshold: float) -> np.ndarray:
    if confidence is None:
        return np.ones(len(features), dtype=bool)
    return np.asarray(confidence) >= threshold


def _padded_occupancy(resolution, coords: np.ndarray) -> np.ndarray:
    occ = np.zeros(tuple(np.asarray(resolution) + 2), dtype=bool)
    if len(coords):
        occ[tuple((coords + 1).T)] = True
    return occ


def _exposed_quads(occ: np.ndarray, coords: np.ndarray, colors: np.ndarray):
    """(Q, 4, 3) Gitterecken und (Q, 3) Farben der freiliegenden Flächen von coords"""
    corners, face_rgb = [], []
    for axis in range(3):
        for sign in (1, -1):
            step = np.zeros(3, dtype=np.int64)
            step[axis] = sign
            exposed = ~occ[tuple((coords + 1 + step).T)]
            if not np.any(exposed):
                continue
            c = coords[exposed]
            u, v = (axis + 1) % 3, (axis + 2) % 3
            if sign < 0:
                u, v = v, u
            base = c.copy()
            if sign > 0:
                base[:, axis] += 1
            eu = np.zeros(3, dtype=np.int64)
            ev = np.zeros(3, dtype=np.int64)
            eu[u] = 1
            ev[v] = 1
            corners.append(np.stack([base, base + eu, base + eu + ev, base + ev], axis=1))
            face_rgb.append(colors[exposed])
    if not corners:
        return np.zeros((0, 4, 3), np.int64), np.zeros((0, 3), np.uint8)
    return np.concatenate(corners), np.concatenate(face_rgb)


def _assemble(quads: np.ndarray, rgb: np.ndarray, cell_size, origin) -> Mesh:
    if not len(quads):
        return Mesh.empty()
    # canonical order so the mesh is independent of traversal order
    order = np.lexsort(quads.reshape(len(quads), -1).T[::-1])
    quads, rgb = quads[order], rgb[order]
    lattice, inverse = np.unique(quads.reshape(-1, 3), axis=0, return_inverse=True)
    inverse = inverse.reshape(-1, 4)
    tris = np.concatenate([inverse[:, [0, 1, 2]], inverse[:, [0, 2, 3]]], axis=1).reshape(-1, 3)
    tri_rgb = np.repeat(rgb, 2, axis=0)
    cell = np.asarray(cell_size, dtype=np.float64)
    verts = (lattice * cell + np.asarray(origin, dtype=np.float64)).astype(np.float32)
    return Mesh(verts, tris.astype(np.int32), tri_rgb)


def extract_mesh(
    features: SparseGrid,
    confidence: Optional[np.ndarray] = None,
    origin: Sequence[float] = (0.0, 0.0, 0.0),
    threshold: float = CONFIDENCE_THRESHOLD,
) -> Mesh:
    """
    Vernetzt die freiliegenden Flächen der konfidenten Voxel

    Args:
        features: Gitter, dessen erste drei Kanäle RGB sind
        confidence: pro Eintrag, None behandelt jeden Voxel als konfident
        origin: Weltposition der Voxelecke (0, 0, 0)
    """
    keep = _confident(features, confidence, threshold)
    coords = features.coords[keep]
    if not len(coords):
        return Mesh.empty()
    occ = _padded_occupancy(features.resolution, coords)
    quads, rgb = _exposed_quads(occ, coords, _rgb_bytes(features.features[keep]))
    return _assemble(quads, rgb, features.cell_size, origin)


def mesh_blocks(
    features: SparseGrid,
    block_shape: Sequence[int],
    confidence: Optional[np.ndarray] = None,
    origin: Sequence[float] = (0.0, 0.0, 0.0),
    threshold: float = CONFIDENCE_THRESHOLD,
) -> List[Mesh]:
    """
    Ein Mesh pro Block eines Weltgitters, in Raster-Reihenfolge

    Freiliegend wird gegen die ganze Welt geprüft, Flächen zwischen Voxeln
    benachbarter Blöcke entstehen daher nicht.
    """
    keep = _confident(features, confidence, threshold)
    coords = features.coords[keep]
    colors = _rgb_bytes(features.features[keep]) if len(coords) else np.zeros((0, 3), np.uint8)
    occ = _padded_occupancy(features.resolution, coords)
    block = np.asarray(block_shape, dtype=np.int64)
    counts = -(-np.asarray(features.resolution) // block)
    block_id = coords // block if len(coords) else np.zeros((0, 3), np.int64)
    meshes = []
    for bx in range(counts[0]):
        for by in range(counts[1]):
            for bz in range(counts[2]):
                sel = np.all(block_id == (bx, by, bz), axis=1)
                quads, rgb = _exposed_quads(occ, coords[sel], colors[sel])
                meshes.append(_assemble(quads, rgb, features.cell_size, origin))
    return meshes


def merge_meshes(meshes: Sequence[Mesh]) -> Mesh:
    """Hängt Meshes aneinander und verschiebt die Face-Indizes (ohne Verschweißen)"""
    meshes = [m for m in meshes if m.triangle_count]
    if not meshes:
        return Mesh.empty()
    offsets = np.cumsum([0] + [m.vertices.shape[0] for m in meshes[:-1]])
    return Mesh(
        np.concatenate([m.vertices for m in meshes]),
        np.concatenate([m.faces + off for m, off in zip(meshes, offsets)]).astype(np.int32),
        np.concatenate([m.face_colors for m in meshes]),
    )


def weld_vertices(mesh: Mesh) -> Mesh:
    """Verschmilzt bitidentische Vertex-Positionen"""
    if not mesh.triangle_count:
        return mesh
    verts, inverse = np.unique(mesh.vertices, axis=0, return_inverse=True)
    inverse = inverse.reshape(-1)
    return Mesh(verts, inverse[mesh.faces].astype(np.int32), mesh.face_colors)
