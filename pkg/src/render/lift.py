"""
Multiview Feature-Lifting

Pro aktivem Voxel ist das geliftete Feature der Mittelwert der Pixel-Features,
auf die er projiziert, über alle Ansichten, in denen ihn der Tiefentest als
sichtbar markiert. Die naive Variante mittelt über jede Ansicht, in die der
Voxel projiziert.
"""
import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from pathlib import Path
from typing import List, Optional, Sequence, Tuple

import numpy as np

from ..utils.config import worker_count
from ..voxcore import SparseGrid
from .camera import DEFAULT_IMAGE_SIZE, DEFAULT_RADIUS_FACTOR, DEFAULT_VIEWS, CameraPose, view_rig
from .raycast import DepthMap, ViewFeatureMap, raycast_depth, voxel_entry_depth

logger = logging.getLogger(__name__)

DEFAULT_TAU_FACTOR = 0.75

View = Tuple[CameraPose, DepthMap, ViewFeatureMap]


@dataclass(frozen=True)
class LiftResult:
    """
    Attributes:
        grid: geliftete Features auf der aktiven Menge der Belegung
        unseen: bool pro Eintrag, True wo keine Ansicht den Voxel sah (Feature null)
        view_counts: Anzahl beitragender Ansichten pro Eintrag
    """
    grid: SparseGrid
    unseen: np.ndarray
    view_counts: np.ndarray

    @property
    def unseen_count(self) -> int:
        return int(self.unseen.sum())


def default_tau(grid: SparseGrid, factor: float = DEFAULT_TAU_FACTOR) -> float:
    return factor * min(grid.cell_size)


def visibility_mask(grid: SparseGrid, cam: CameraPose, depth: DepthMap, tau: float) -> np.ndarray:
    """
    bool pro aktivem Voxel: Mitte projiziert ins Bild und die Eintrittstiefe
    stimmt bis auf tau mit der Tiefenkarte überein
    """
    if not len(grid):
        return np.zeros(0, dtype=bool)
    col, row, inside = _sample_pixels(grid, cam)
    sampled = depth.depth[np.where(inside, row, 0), np.where(inside, col, 0)]
    projected = voxel_entry_depth(grid, cam)
    with np.errstate(invalid="ignore"):
        close = np.abs(projected - sampled) <= tau
    return inside & np.isfinite(sampled) & close


def _sample_pixels(grid: SparseGrid, cam: CameraPose):
    cell = np.asarray(grid.cell_size, dtype=np.float64)
    centers = (grid.coords + 0.5) * cell
    return cam.project(centers)


def aggregate_features(
    grid: SparseGrid,
    views: Sequence[View],
    tau: float,
    occlusion_aware: bool = True,
) -> LiftResult:
    """
    Hebt die Features aller Ansichten auf die aktiven Voxel eines Belegungsgitters

    Ansichten werden in Listen-Reihenfolge mit float64 Summen akkumuliert, das
    Ergebnis hängt also nicht davon ab, wie gerendert wurde.
    """
    if not views:
        raise ValueError("aggregate_features needs at least one view")
    channels = views[0][2].features.shape[-1]
    sums = np.zeros((len(grid), channels), dtype=np.float64)
    counts = np.zeros(len(grid), dtype=np.int64)
    for cam, depth, fmap in views:
        if occlusion_aware:
            mask = visibility_mask(grid, cam, depth, tau)
            col, row, _ = _sample_pixels(grid, cam)
        else:
            col, row, inside = _sample_pixels(grid, cam)
            sampled = depth.depth[np.where(inside, row, 0), np.where(inside, col, 0)]
            mask = inside & np.isfinite(sampled)
        if not np.any(mask):
            continue
        sums[mask] += fmap.features[row[mask], col[mask]].astype(np.float64)
        counts[mask] += 1

    unseen = counts == 0
    feats = np.zeros_like(sums)
    seen = ~unseen
    feats[seen] = sums[seen] / counts[seen, None]
    if np.any(unseen):
        logger.debug(f"{int(unseen.sum())} von {len(grid)} Voxeln in keiner Ansicht sichtbar")
    lifted = SparseGrid(grid.resolution, grid.cell_size, grid.coords, feats.astype(np.float32))
    return LiftResult(grid=lifted, unseen=unseen, view_counts=counts)


def render_views(grid: SparseGrid, cams: Sequence[CameraPose]) -> List[View]:
    """Rendert jede Kamera; Ergebnis in Reihenfolge der Kameraliste"""
    with ThreadPoolExecutor(max_workers=worker_count()) as pool:
        rendered = list(pool.map(lambda cam: raycast_depth(grid, cam), cams))
    return [(cam, depth, fmap) for cam, (depth, fmap) in zip(cams, rendered)]


def lift_block(
    features: SparseGrid,
    views: int = DEFAULT_VIEWS,
    image_size: int = DEFAULT_IMAGE_SIZE,
    radius_factor: float = DEFAULT_RADIUS_FACTOR,
    tau_factor: float = DEFAULT_TAU_FACTOR,
    occlusion_aware: bool = True,
    dump_dir: Optional[Path] = None,
) -> LiftResult:
    """
    Rendert einen Feature-Block aus dem Kamera-Rig und hebt die Bilder zurück
    auf seine Belegung
    """
    cams = view_rig(features.extent, views, image_size, radius_factor)
    rendered = render_views(features, cams)
    if dump_dir is not None:
        from .ppm import dump_views
        dump_views(dump_dir, rendered)
    return aggregate_features(features.occupancy(), rendered, default_tau(features, tau_factor), occlusion_aware)
