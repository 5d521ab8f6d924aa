"""
Quadranten-Trainingsmasken

Zwei Schnittpositionen teilen die Grundfläche des Blocks in vier
XY-Quadranten; einer bleibt als Kontext, die anderen drei (volle Z-Höhe)
werden maskiert.
"""
from dataclasses import dataclass
from typing import Optional, Tuple

import numpy as np

from ..voxcore import BlockFrame, DenseMask, SparseGrid, SparseMask


@dataclass(frozen=True)
class QuadrantSplit:
    """
    Attributes:
        x_split / y_split: Schnittpositionen in Voxeln
        kept: behaltener Quadrant; Bit 0 = x-Seite (0 unten, 1 oben), Bit 1 = y-Seite
    """
    x_split: int
    y_split: int
    kept: int

    def __post_init__(self):
        if self.kept not in (0, 1, 2, 3):
            raise ValueError(f"Kept quadrant must be 0..3, got {self.kept}")

    def check_bounds(self, resolution: int) -> None:
        lo, hi = resolution // 4, 3 * resolution // 4
        for s in (self.x_split, self.y_split):
            if not lo <= s <= hi:
                raise ValueError(f"Split {s} outside [{lo}, {hi}]")

    def kept_slices(self, resolution: int) -> Tuple[slice, slice]:
        xs = slice(0, self.x_split) if self.kept & 1 == 0 else slice(self.x_split, resolution)
        ys = slice(0, self.y_split) if self.kept & 2 == 0 else slice(self.y_split, resolution)
        return xs, ys

    def kept_area(self, resolution: int) -> int:
        xs, ys = self.kept_slices(resolution)
        return (xs.stop - xs.start) * (ys.stop - ys.start)

    def dense_mask(self, resolution: int) -> DenseMask:
        bits = np.ones((resolution,) * 3, dtype=bool)
        xs, ys = self.kept_slices(resolution)
        bits[xs, ys, :] = False
        return DenseMask((resolution,) * 3, bits)


def draw_split(resolution: int, seed: int) -> QuadrantSplit:
    rng = np.random.default_rng(seed)
    lo, hi = resolution // 4, 3 * resolution // 4
    x, y = (int(v) for v in rng.integers(lo, hi + 1, size=2))
    return QuadrantSplit(x, y, int(rng.integers(0, 4)))


def make_training_masks(
    frame: BlockFrame,
    seed: int,
    active: Optional[SparseGrid] = None,
) -> Tuple[DenseMask, SparseMask, QuadrantSplit]:
    """
    Args:
        frame: Block-Frame (Auflösung N)
        seed: Masken-Seed
        active: Block, auf dessen aktive Menge m_l beschränkt wird (leer bei None)

    Returns:
        (m_s, m_l, split)
    """
    n = frame.resolution
    split = draw_split(n, seed)
    m_s = split.dense_mask(n)
    if active is None:
        m_l = SparseMask(np.zeros((0, 3), dtype=np.int64), np.zeros(0, dtype=bool))
    else:
        m_l = SparseMask.from_dense(active, m_s)
    return m_s, m_l, split
