"""
Software-Tiefen-Raycaster über sparse Voxel-Gitter

Voxel (i, j, k) belegt [i*sx, (i+1)*sx) x [j*sy, (j+1)*sy) x [k*sz, (k+1)*sz)
in blocklokalen Metern. Jeder Pixelstrahl läuft Zelle für Zelle durch das
Gitter (Amanatides & Woo), alle Strahlen einer Ansicht laufen gemeinsam.
"""
import logging
from dataclasses import dataclass
from typing import Tuple

import numpy as np

from ..voxcore import SparseGrid
from .camera import CameraPose

logger = logging.getLogger(__name__)


class CameraInsideVoxelError(ValueError):
    """Kameraposition liegt in einem aktiven Voxel"""


@dataclass(frozen=True)
class DepthMap:
    """(H, W) Strahlabstand zum ersten Treffer, +inf ohne Treffer"""
    depth: np.ndarray

    @property
    def resolution(self) -> Tuple[int, int]:
        h, w = self.depth.shape
        return (w, h)


@dataclass(frozen=True)
class ViewFeatureMap:
    """(H, W, C) Feature des ersten getroffenen Voxels, null wo die Tiefe +inf ist"""
    features: np.ndarray

    @property
    def resolution(self) -> Tuple[int, int]:
        h, w = self.features.shape[:2]
        return (w, h)


def ray_box_entry(origins: np.ndarray, dirs: np.ndarray, lo: np.ndarray, hi: np.ndarray) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
    """
    Slab-Test gegen achsenparallele Boxen

    Returns:
        (t_near, t_far, entry_axis); t_near > t_far bedeutet kein Treffer
    """
    with np.errstate(divide="ignore", invalid="ignore"):
        inv = 1.0 / dirs
        t1 = (lo - origins) * inv
        t2 = (hi - origins) * inv
    # a zero direction component never crosses that slab; keep it unbounded when inside
    parallel = dirs == 0.0
    inside_slab = (origins >= lo) & (origins <= hi)
    t_lo = np.where(parallel, np.where(inside_slab, -np.inf, np.inf), np.minimum(t1, t2))
    t_hi = np.where(parallel, np.where(inside_slab, np.inf, -np.inf), np.maximum(t1, t2))
    entry_axis = np.argmax(t_lo, axis=-1)
    return t_lo.max(axis=-1), t_hi.min(axis=-1), entry_axis


def raycast_depth(grid: SparseGrid, cam: CameraPose) -> Tuple[DepthMap, ViewFeatureMap]:
    """
    Rendert Tiefe und Features des ersten Treffers für eine Kamera

    Raises:
        CameraInsideVoxelError: Kamera in einem aktiven Voxel
    """
    h, w = cam.height, cam.width
    depth = np.full(h * w, np.inf, dtype=np.float64)
    feats = np.zeros((h * w, grid.channels), dtype=np.float32)
    if not len(grid):
        return DepthMap(depth.reshape(h, w)), ViewFeatureMap(feats.reshape(h, w, grid.channels))

    res = np.asarray(grid.resolution, dtype=np.int64)
    cell = np.asarray(grid.cell_size, dtype=np.float64)
    origin = np.asarray(cam.position, dtype=np.float64)
    index = grid.index_volume()

    cam_cell = np.floor(origin / cell).astype(np.int64)
    if np.all(cam_cell >= 0) and np.all(cam_cell < res) and index[tuple(cam_cell)] >= 0:
        raise CameraInsideVoxelError(f"Camera at {cam.position} lies inside active voxel {tuple(cam_cell)}")

    dirs = cam.ray_directions().reshape(-1, 3)
    n_rays = dirs.shape[0]
    origins = np.broadcast_to(origin, dirs.shape)
    t_near, t_far, _ = ray_box_entry(origins, dirs, np.zeros(3), res * cell)
    t0 = np.maximum(t_near, 0.0)
    alive = t0 <= t_far

    start = origin + dirs * t0[:, None]
    idx = np.clip(np.floor(start / cell).astype(np.int64), 0, res - 1)
    step = np.sign(dirs).astype(np.int64)
    with np.errstate(divide="ignore", invalid="ignore"):
        t_delta = np.where(dirs != 0.0, cell / np.abs(dirs), np.inf)
        boundary = (idx + (step > 0)) * cell
        t_max = np.where(dirs != 0.0, (boundary - origin) / dirs, np.inf)
    t_entry = t0.copy()

    rays = np.nonzero(alive)[0]
    for _ in range(int(res.sum()) + 3):
        if rays.size == 0:
            break
        ci = idx[rays]
        hit_index = index[ci[:, 0], ci[:, 1], ci[:, 2]]
        hit = hit_index >= 0
        if np.any(hit):
            hr = rays[hit]
            depth[hr] = t_entry[hr]
            feats[hr] = grid.features[hit_index[hit]]
        rays = rays[~hit]
        if rays.size == 0:
            break
        tm = t_max[rays]
        axis = np.argmin(tm, axis=1)
        sel = (rays, axis)
        t_entry[rays] = tm[np.arange(rays.size), axis]
        idx[sel] += step[sel]
        t_max[sel] += t_delta[sel]
        inside = np.all((idx[rays] >= 0) & (idx[rays] < res), axis=1)
        rays = rays[inside]

    return DepthMap(depth.reshape(h, w)), ViewFeatureMap(feats.reshape(h, w, grid.channels))


def voxel_entry_depth(grid: SparseGrid, cam: CameraPose) -> np.ndarray:
    """
    Abstand von der Kamera bis zum Eintritt des Strahls durch die Voxelmitte
    in diesen Voxel, pro aktivem Eintrag
    """
    cell = np.asarray(grid.cell_size, dtype=np.float64)
    lo = grid.coords * cell
    centers = lo + 0.5 * cell
    origin = np.asarray(cam.position, dtype=np.float64)
    v = centers - origin
    dist = np.linalg.norm(v, axis=1)
    dirs = v / np.where(dist > 0, dist, 1.0)[:, None]
    t_near, _, _ = ray_box_entry(np.broadcast_to(origin, dirs.shape), dirs, lo, lo + cell)
    return np.maximum(t_near, 0.0)
