"""
Regionen-Algebra und Resampling auf Voxel-Gittern

Alle Boxen sind halboffen [lo, hi). Operationen liefern neue Gitter, die
Eingaben bleiben unverändert.
"""
from enum import Enum
from typing import Sequence, Tuple

import numpy as np

from .grid import Box, SparseGrid, linear_keys


class PasteMode(Enum):
    """Kollisions-Verhalten beim Einfügen"""
    REPLACE = "replace"
    KEEP_EXISTING = "keep_existing"


def dense_from_sparse(grid: SparseGrid, channel: int = 0) -> np.ndarray:
    """
    Schreibt einen Feature-Kanal in ein dichtes float64 Volumen

    Inaktive Zellen sind 0.
    """
    if channel < 0 or channel >= grid.channels:
        raise ValueError(f"Channel {channel} out of range for {grid.channels}-channel grid")
    volume = np.zeros(grid.resolution, dtype=np.float64)
    if len(grid):
        c = grid.coords
        volume[c[:, 0], c[:, 1], c[:, 2]] = grid.features[:, channel]
    return volume


def threshold_occupancy(
    volume: np.ndarray,
    theta: float,
    cell_size: Sequence[float] = (1.0, 1.0, 1.0),
) -> SparseGrid:
    """Aktive Menge = {p : volume(p) >= theta} als Belegungsgitter mit C = 1"""
    volume = np.asarray(volume)
    coords = np.argwhere(volume >= theta)
    return SparseGrid.occupancy_of(volume.shape, cell_size, coords)


def crop(grid: SparseGrid, box: Box) -> SparseGrid:
    """Einträge innerhalb der Box, relativ zum Box-Ursprung indiziert"""
    if box.is_degenerate:
        raise ValueError(f"Degenerate crop box {box}")
    if not box.fits_in(grid.resolution):
        raise ValueError(f"Crop box {box} exceeds grid resolution {grid.resolution}")
    inside = box.contains(grid.coords)
    coords = grid.coords[inside] - np.asarray(box.lo)
    return SparseGrid(box.shape, grid.cell_size, coords, grid.features[inside])


def erase(grid: SparseGrid, box: Box) -> SparseGrid:
    """Entfernt alle Einträge innerhalb der Box"""
    if box.is_degenerate:
        return grid
    return grid.select(~box.contains(grid.coords))


def paste(
    dst: SparseGrid,
    src: SparseGrid,
    offset: Sequence[int],
    mode: PasteMode = PasteMode.REPLACE,
) -> SparseGrid:
    """
    Fügt src an einem Voxel-Offset in dst ein

    REPLACE überschreibt kollidierende Einträge von dst, KEEP_EXISTING behält
    sie. Einträge von dst außerhalb der Kollisionsmenge ändern sich nie.
    """
    offset = np.asarray(tuple(offset), dtype=np.int64)
    if src.channels != dst.channels:
        raise ValueError(f"Channel mismatch: src {src.channels}, dst {dst.channels}")
    if np.any(offset < 0) or np.any(offset + np.asarray(src.resolution) > np.asarray(dst.resolution)):
        raise ValueError(
            f"Paste of {src.resolution} at {tuple(offset)} exceeds destination {dst.resolution}"
        )
    if not len(src):
        return dst

    moved = src.coords + offset
    src_keys = linear_keys(moved, dst.resolution)
    dst_keys = dst.keys()
    collide_dst = np.isin(dst_keys, src_keys)

    if mode is PasteMode.REPLACE:
        keep_dst = ~collide_dst
        coords = np.concatenate([dst.coords[keep_dst], moved])
        features = np.concatenate([dst.features[keep_dst], src.features])
    else:
        new_src = ~np.isin(src_keys, dst_keys)
        coords = np.concatenate([dst.coords, moved[new_src]])
        features = np.concatenate([dst.features, src.features[new_src]])
    return SparseGrid(dst.resolution, dst.cell_size, coords, features)


def overwrite_region(dst: SparseGrid, src: SparseGrid, offset: Sequence[int]) -> SparseGrid:
    """Setzt dst in [offset, offset + src.resolution) exakt gleich src"""
    offset = tuple(int(o) for o in offset)
    hi = tuple(o + r for o, r in zip(offset, src.resolution))
    return paste(erase(dst, Box(offset, hi)), src, offset, PasteMode.REPLACE)


def _upsample_axis(volume: np.ndarray, axis: int, factor: int) -> np.ndarray:
    if factor == 1:
        return volume
    n = volume.shape[axis]
    # output cell centers expressed in input index space, clamp-to-edge
    pos = (np.arange(n * factor, dtype=np.float64) + 0.5) / factor - 0.5
    pos = np.clip(pos, 0.0, n - 1)
    i0 = np.floor(pos).astype(np.int64)
    i1 = np.minimum(i0 + 1, n - 1)
    w = pos - i0
    shape = [1] * volume.ndim
    shape[axis] = -1
    w = w.reshape(shape)
    return np.take(volume, i0, axis=axis) * (1.0 - w) + np.take(volume, i1, axis=axis) * w


def trilinear_upsample(volume: np.ndarray, factors: Tuple[int, int, int]) -> np.ndarray:
    """
    Skaliert ein dichtes Volumen um ganzzahlige Faktoren pro Achse hoch

    Eingabewerte liegen in den Zellmitten; Ausgaben sind trilineare
    Interpolationen mit Clamp-to-Edge am Rand, der Wertebereich bleibt daher
    in [min(input), max(input)].
    """
    factors = tuple(int(f) for f in factors)
    if len(factors) != 3 or any(f < 1 for f in factors):
        raise ValueError(f"Upsampling factors must be positive integers, got {factors}")
    out = np.asarray(volume, dtype=np.float64)
    for axis, f in enumerate(factors):
        out = _upsample_axis(out, axis, f)
    if out is volume:
        out = out.copy()
    return out
