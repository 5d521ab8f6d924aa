"""
Expansions-Stabilität: Blockqualität nahe am Startblock gegen weit entfernt

Das Wachstumsgitter einer Welt ab 7x7 Blöcken wird in die anfängliche
3x3-Ecke (innen) und den Rest (außen) geteilt. Pro Gitterzelle wird ein fine
Block gezogen, beide Bereiche werden gegen dieselbe Referenzmenge bewertet.
"""
import logging
from typing import List, Sequence, Tuple

import numpy as np

from ..voxcore import Box, SparseGrid, crop
from .distribution import EvalReport, evaluate_blocks
from .points import DEFAULT_POINTS

logger = logging.getLogger(__name__)

INNER_SIZE = 3
MIN_WORLD = 7


def is_inner(i: int, j: int) -> bool:
    return i < INNER_SIZE and j < INNER_SIZE


def lattice_regions(n_x: int, n_y: int) -> Tuple[List[Tuple[int, int]], List[Tuple[int, int]]]:
    """(innere Zellen, äußere Zellen), zeilenweise"""
    cells = [(i, j) for j in range(n_y) for i in range(n_x)]
    return [c for c in cells if is_inner(*c)], [c for c in cells if not is_inner(*c)]


def fine_block_at(fine: SparseGrid, cell: Tuple[int, int], resolution: int, seed: int) -> SparseGrid:
    """Einer der 2x2 fine Blöcke unter einer Gitterzelle, pro Zelle geseedet"""
    i, j = cell
    pick = int(np.random.default_rng([seed, i, j]).integers(0, 4))
    fx, fy = 2 * i + (pick & 1), 2 * j + (pick >> 1)
    depth = fine.resolution[2]
    lo = (fx * resolution, fy * resolution, 0)
    return crop(fine, Box(lo, (lo[0] + resolution, lo[1] + resolution, depth)))


def _collect(fine: SparseGrid, cells: Sequence[Tuple[int, int]], resolution: int, seed: int, name: str) -> list:
    blocks = []
    for cell in cells:
        block = fine_block_at(fine, cell, resolution, seed)
        if len(block):
            blocks.append(block)
        else:
            logger.warning(f"{name}: Feinblock unter Zelle {cell} ist leer, übersprungen")
    return blocks


def stability_protocol(
    fine: SparseGrid,
    blocks: Tuple[int, int],
    reference: Sequence[SparseGrid],
    resolution: int = 32,
    seed: int = 9,
    points: int = DEFAULT_POINTS,
) -> Tuple[EvalReport, EvalReport]:
    """
    Reports für das innere 3x3 und den äußeren Ring gegen eine Referenzmenge

    Args:
        fine: feine Belegung der ganzen Welt
        blocks: Größe des Wachstumsgitters (n_x, n_y) in coarse Blöcken

    Raises:
        ValueError: Welt kleiner als 7x7 Blöcke oder feines Gitter zu klein
    """
    n_x, n_y = blocks
    if n_x < MIN_WORLD or n_y < MIN_WORLD:
        raise ValueError(f"Stability protocol needs >= {MIN_WORLD}x{MIN_WORLD} blocks, got {n_x}x{n_y}")
    if fine.resolution[0] < 2 * n_x * resolution or fine.resolution[1] < 2 * n_y * resolution:
        raise ValueError(f"Fine grid {fine.resolution} too small for {n_x}x{n_y} blocks at N={resolution}")
    inner_cells, outer_cells = lattice_regions(n_x, n_y)
    inner = _collect(fine, inner_cells, resolution, seed, "inner")
    outer = _collect(fine, outer_cells, resolution, seed, "outer")
    logger.info(f"Stabilität: {len(inner)} innere, {len(outer)} äußere Blöcke")
    return (
        evaluate_blocks(inner, reference, points, seed),
        evaluate_blocks(outer, reference, points, seed),
    )
