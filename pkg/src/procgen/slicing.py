"""
Scene Slicing: Schnitt eines Block-Quaders mit der Voxel-Welt
"""
from fractions import Fraction
from typing import Sequence, Tuple

import numpy as np

from ..voxcore import BlockFrame, SparseGrid, linear_keys
from .world import SceneWorld


def _ratio(value: float, unit: float, what: str) -> int:
    r = value / unit
    k = int(round(r))
    if k < 1 or abs(r - k) > 1e-6:
        raise ValueError(f"{what} {value} is not an integer multiple of world voxel {unit}")
    return k


def block_voxel_box(world: SceneWorld, origin: Sequence[float], frame: BlockFrame) -> Tuple[np.ndarray, np.ndarray]:
    """
    Block-Box in Welt-Voxeln plus Pooling-Faktoren pro Achse

    Raises:
        ValueError: Ursprung nicht auf dem Welt-Gitter oder Box außerhalb der Welt
    """
    v = world.voxel_size
    if np.any(np.asarray(origin, dtype=np.float64) < -1e-12):
        raise ValueError(f"Block origin {tuple(origin)} lies outside the world")
    factors = np.array([_ratio(s, v, "cell size") for s in frame.cell_size], dtype=np.int64)
    lo = np.array([_ratio(o, v, "origin") if abs(o) > 1e-12 else 0 for o in origin], dtype=np.int64)
    hi = lo + factors * frame.resolution
    if np.any(hi > np.asarray(world.shape)):
        raise ValueError(
            f"Block box {tuple(lo)}..{tuple(hi)} exceeds world grid {world.shape}"
        )
    return lo, factors


def slice_block(world: SceneWorld, origin: Sequence[float], frame: BlockFrame) -> SparseGrid:
    """
    Aktive Welt-Voxel in der Block-Box, auf das Frame-Gitter umgerechnet

    Ein Block-Voxel ist aktiv, wenn ein Welt-Voxel in seiner Grundfläche aktiv
    ist; seine Features sind der Mittelwert über diese Voxel. Fine Frames
    haben die Voxelgröße der Welt, die Features werden unverändert kopiert.
    """
    lo, factors = block_voxel_box(world, origin, frame)
    hi = lo + factors * frame.resolution
    coords = world.grid.coords
    inside = np.all((coords >= lo) & (coords < hi), axis=1)
    local = (coords[inside] - lo) // factors
    feats = world.grid.features[inside].astype(np.float64)
    shape = frame.shape
    if not len(local):
        return SparseGrid.empty(shape, frame.cell_size, world.grid.channels)

    keys = linear_keys(local, shape)
    uniq, inverse, counts = np.unique(keys, return_inverse=True, return_counts=True)
    sums = np.zeros((len(uniq), feats.shape[1]), dtype=np.float64)
    np.add.at(sums, inverse, feats)
    mean = (sums / counts[:, None]).astype(np.float32)
    ny, nz = shape[1], shape[2]
    out = np.stack([uniq // (ny * nz), (uniq // nz) % ny, uniq % nz], axis=1)
    return SparseGrid(shape, frame.cell_size, out, mean)


def occupied_columns(block: SparseGrid) -> int:
    if not len(block):
        return 0
    nx, ny, _ = block.resolution
    cols = block.coords[:, 0] * ny + block.coords[:, 1]
    return int(np.unique(cols).size)


def occupancy_topdown(block: SparseGrid) -> float:
    """Anteil der (x, y) Spalten mit mindestens einem aktiven Voxel"""
    nx, ny, _ = block.resolution
    return occupied_columns(block) / float(nx * ny)


def exact_threshold(threshold: float) -> Fraction:
    """Dezimale Lesart der Schwelle (0.95 -> 19/20)"""
    return Fraction(repr(float(threshold)))


def passes_threshold(columns: int, total: int, threshold: float) -> bool:
    """columns / total >= threshold, als exakte Brüche verglichen"""
    return Fraction(columns, total) >= exact_threshold(threshold)
