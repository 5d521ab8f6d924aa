"""
Flächengewichtetes Sampling von Oberflächenpunkten
"""
from dataclasses import dataclass
from typing import Optional, Union

import numpy as np

from ..codec.mesh import Mesh, extract_mesh
from ..voxcore import SparseGrid

DEFAULT_POINTS = 2048


@dataclass(frozen=True)
class PointSample:
    """n Punkte in [0, 1]^3 von der Oberfläche eines Blocks"""
    points: np.ndarray
    block_id: Optional[int] = None

    def __len__(self) -> int:
        return int(self.points.shape[0])


def triangle_areas(mesh: Mesh) -> np.ndarray:
    v = mesh.vertices.astype(np.float64)
    a, b, c = v[mesh.faces[:, 0]], v[mesh.faces[:, 1]], v[mesh.faces[:, 2]]
    return 0.5 * np.linalg.norm(np.cross(b - a, c - a), axis=1)


def sample_mesh_surface(mesh: Mesh, n: int, seed) -> np.ndarray:
    """(n, 3) Punkte, gleichverteilt über die Mesh-Oberfläche"""
    if not mesh.triangle_count:
        raise ValueError("Cannot sample points from empty geometry")
    rng = np.random.default_rng(seed)
    areas = triangle_areas(mesh)
    tri = rng.choice(len(areas), size=n, p=areas / areas.sum())
    r1 = np.sqrt(rng.uniform(size=n))
    r2 = rng.uniform(size=n)
    v = mesh.vertices.astype(np.float64)
    a, b, c = v[mesh.faces[tri, 0]], v[mesh.faces[tri, 1]], v[mesh.faces[tri, 2]]
    return (1.0 - r1)[:, None] * a + (r1 * (1.0 - r2))[:, None] * b + (r1 * r2)[:, None] * c


def sample_points(
    geometry: Union[Mesh, SparseGrid],
    n: int = DEFAULT_POINTS,
    seed=0,
    block_id: Optional[int] = None,
) -> PointSample:
    """
    Sampelt Oberflächenpunkte, normiert auf den umschließenden Würfel des Blocks

    Ein SparseGrid wird zuerst vernetzt und mit seiner größten Ausdehnung
    skaliert; ein Mesh wird auf sein Bounding-Box-Minimum verschoben und mit
    seiner längsten Seite skaliert.

    Raises:
        ValueError: leere Geometrie
    """
    if n < 1:
        raise ValueError(f"Point count must be >= 1, got {n}")
    if isinstance(geometry, SparseGrid):
        if not len(geometry):
            raise ValueError("Cannot sample points from an empty block")
        pts = sample_mesh_surface(extract_mesh(geometry), n, seed)
        pts = pts / max(geometry.extent)
    else:
        pts = sample_mesh_surface(geometry, n, seed)
        lo = geometry.vertices.min(axis=0).astype(np.float64)
        size = float((geometry.vertices.max(axis=0) - geometry.vertices.min(axis=0)).max())
        pts = (pts - lo) / (size if size > 0 else 1.0)
    return PointSample(np.clip(pts, 0.0, 1.0), block_id)
