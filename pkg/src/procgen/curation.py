"""
Block Curation

Zufällige Platzierung von Block-Quadern in der Welt, Bewertung über die
Top-Down-Belegung und Annahme nach der 95%-Regel.
"""
import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import List, Optional, Tuple

import numpy as np

from ..utils.config import worker_count
from ..voxcore import BlockFrame, BlockLevel
from ..voxcore.frame import DEFAULT_HOUSE_HEIGHT, DEFAULT_RESOLUTION
from .slicing import passes_threshold
from .world import SceneWorld

logger = logging.getLogger(__name__)

_CHUNK = 256


@dataclass(frozen=True)
class CurationConfig:
    """
    Curation-Parameter

    Attributes:
        occupancy_threshold: Mindestanteil belegter Spalten (0 = ungefiltert)
        max_attempts: Ablehnungen pro Slot bevor abgebrochen wird
        fine_width: w^f in Metern (= house_height)
        coarse_width: w^c in Metern (= 2 * house_height)
        house_height: h in Metern
    """
    occupancy_threshold: float = 0.95
    max_attempts: int = 200
    fine_width: Optional[float] = None
    coarse_width: Optional[float] = None
    house_height: float = DEFAULT_HOUSE_HEIGHT
    resolution: int = DEFAULT_RESOLUTION

    def __post_init__(self):
        if not 0.0 <= self.occupancy_threshold <= 1.0:
            raise ValueError(f"occupancy_threshold must lie in [0, 1], got {self.occupancy_threshold}")
        if self.max_attempts < 1:
            raise ValueError(f"max_attempts must be >= 1, got {self.max_attempts}")
        if self.fine_width is None:
            object.__setattr__(self, "fine_width", self.house_height)
        if self.coarse_width is None:
            object.__setattr__(self, "coarse_width", 2.0 * self.house_height)
        if abs(self.fine_width - self.house_height) > 1e-9:
            raise ValueError(f"fine_width must equal house height {self.house_height}, got {self.fine_width}")
        if abs(self.coarse_width - 2.0 * self.house_height) > 1e-9:
            raise ValueError(f"coarse_width must equal 2h = {2 * self.house_height}, got {self.coarse_width}")

    def frame(self, level: BlockLevel) -> BlockFrame:
        if level is BlockLevel.FINE:
            return BlockFrame.fine(self.house_height, self.resolution)
        return BlockFrame.coarse(self.house_height, self.resolution)


@dataclass
class CurationResult:
    """Ergebnis eines Curation-Laufs"""
    level: BlockLevel
    target_count: int
    origins: List[Tuple[float, float, float]] = field(default_factory=list)
    occupancies: List[float] = field(default_factory=list)
    attempts: int = 0
    shortfall: int = 0

    @property
    def accepted(self) -> int:
        return len(self.origins)


class PlacementEvaluator:
    """Top-Down-Spaltenbelegung von Kandidaten-Blöcken, direkt aus der Spaltenkarte der Welt"""

    def __init__(self, world: SceneWorld, frame: BlockFrame):
        v = world.voxel_size
        self.factors = tuple(int(round(s / v)) for s in frame.cell_size)
        self.n = frame.resolution
        self.size = tuple(f * self.n for f in self.factors)
        z_hi = min(world.shape[2], self.size[2])
        cols = np.zeros(world.shape[:2], dtype=bool)
        c = world.grid.coords
        c = c[c[:, 2] < z_hi]
        if len(c):
            cols[c[:, 0], c[:, 1]] = True
        self.columns = cols
        self.world_shape = world.shape

    @property
    def fits(self) -> bool:
        return all(s <= w for s, w in zip(self.size[:2], self.world_shape[:2])) and self.size[2] <= self.world_shape[2]

    def column_count(self, x0: int, y0: int) -> int:
        fx, fy, _ = self.factors
        n = self.n
        sub = self.columns[x0:x0 + fx * n, y0:y0 + fy * n]
        return int(sub.reshape(n, fx, n, fy).any(axis=(1, 3)).sum())


def draw_placements(rng: np.random.Generator, evaluator: PlacementEvaluator, count: int) -> np.ndarray:
    """(count, 2) Voxel-Ursprünge, gleichverteilt über gültige Block-Positionen"""
    hi_x = evaluator.world_shape[0] - evaluator.size[0]
    hi_y = evaluator.world_shape[1] - evaluator.size[1]
    xs = rng.integers(0, hi_x + 1, size=count)
    ys = rng.integers(0, hi_y + 1, size=count)
    return np.stack([xs, ys], axis=1)


def curate_blocks(
    world: SceneWorld,
    level: BlockLevel,
    target_count: int,
    cfg: CurationConfig,
    seed: int,
) -> CurationResult:
    """
    Sammelt bis zu target_count akzeptierte Block-Positionen

    Die Platzierungen werden blockweise aus dem Seed vorgezogen und parallel
    bewertet; Annahme/Ablehnung läuft danach sequenziell, daher ist das
    Ergebnis unabhängig von der Thread-Anzahl.
    """
    if target_count < 1:
        raise ValueError(f"target_count must be >= 1, got {target_count}")
    frame = cfg.frame(level)
    evaluator = PlacementEvaluator(world, frame)
    result = CurationResult(level=level, target_count=target_count)
    if not evaluator.fits:
        result.shortfall = target_count
        logger.warning(f"Welt {world.shape} kleiner als {level.value}-Block {evaluator.size}; nichts kuratiert")
        return result

    rng = np.random.default_rng([seed, level.tag])
    total = frame.resolution * frame.resolution
    v = world.voxel_size
    rejected_in_slot = 0
    with ThreadPoolExecutor(max_workers=worker_count()) as pool:
        while result.accepted < target_count and rejected_in_slot < cfg.max_attempts:
            batch = draw_placements(rng, evaluator, _CHUNK)
            counts = list(pool.map(lambda p: evaluator.column_count(int(p[0]), int(p[1])), batch))
            for (x0, y0), cols in zip(batch, counts):
                result.attempts += 1
                if passes_threshold(cols, total, cfg.occupancy_threshold):
                    result.origins.append((float(x0 * v), float(y0 * v), 0.0))
                    result.occupancies.append(cols / float(total))
                    rejected_in_slot = 0
                    if result.accepted >= target_count:
                        break
                else:
                    rejected_in_slot += 1
                    if rejected_in_slot >= cfg.max_attempts:
                        break
            if result.attempts and result.attempts % (_CHUNK * 8) == 0:
                logger.info(f"Curation {level.value}: {result.accepted}/{target_count} nach {result.attempts} Versuchen")

    result.shortfall = target_count - result.accepted
    if result.shortfall:
        logger.warning(
            f"Curation {level.value}: nur {result.accepted}/{target_count} Blöcke "
            f"(Schwelle {cfg.occupancy_threshold}, {result.attempts} Versuche)"
        )
    return result
