"""
Welt-Zustand während des Wachstums

Jede Struktur-Ebene ist eine dichte Belegungs-Leinwand plus Herkunft pro
Spalte (welcher Schritt sie schrieb, -1 = nicht festgeschrieben) und
Vorläufig-Flags.
"""
import hashlib
from dataclasses import dataclass, field
from typing import List, Optional, Sequence, Tuple

import numpy as np

from ..voxcore import SparseGrid


def region_sha256(values: np.ndarray) -> str:
    """Hash eines Array-Bereichs inklusive seiner Form"""
    values = np.ascontiguousarray(values)
    h = hashlib.sha256()
    h.update(str(values.shape).encode("ascii"))
    h.update(values.astype(np.uint8 if values.dtype == bool else values.dtype).tobytes())
    return h.hexdigest()


def bytes_sha256(data: bytes) -> str:
    return hashlib.sha256(data).hexdigest()


def step_seed(seed: int, layer: int, index: int) -> int:
    """Unabhängiger Seed pro Schritt aus (Lauf-Seed, Ebene, Schritt)"""
    return int(np.random.SeedSequence([seed, layer, index]).generate_state(1)[0])


@dataclass
class StepRecord:
    layer: str
    index: int
    origin: Tuple[int, int]
    dependencies: Tuple[int, ...]
    context_sha256: str
    inpaint_sha256: str

    def to_dict(self) -> dict:
        return {
            "step": self.index,
            "origin": list(self.origin),
            "dependencies": list(self.dependencies),
            "context_sha256": self.context_sha256,
            "inpaint_sha256": self.inpaint_sha256,
        }


@dataclass
class LayerState:
    """Belegungs-Leinwand einer Struktur-Ebene"""
    name: str
    occupancy: np.ndarray
    cell_size: Tuple[float, float, float]
    provenance: np.ndarray = field(default=None)
    provisional: np.ndarray = field(default=None)
    records: List[StepRecord] = field(default_factory=list)

    def __post_init__(self):
        self.occupancy = np.asarray(self.occupancy, dtype=bool)
        xy = self.occupancy.shape[:2]
        if self.provenance is None:
            self.provenance = np.full(xy, -1, dtype=np.int64)
        if self.provisional is None:
            self.provisional = np.zeros(xy, dtype=bool)

    @classmethod
    def blank(cls, name: str, shape: Sequence[int], cell_size: Sequence[float]) -> "LayerState":
        return cls(name, np.zeros(tuple(shape), dtype=bool), tuple(float(s) for s in cell_size))

    @property
    def shape(self) -> Tuple[int, int, int]:
        return self.occupancy.shape

    @property
    def committed(self) -> np.ndarray:
        return self.provenance >= 0

    def grid(self) -> SparseGrid:
        return SparseGrid.occupancy_of(self.shape, self.cell_size, np.argwhere(self.occupancy))

    def committed_extent(self) -> Tuple[int, int]:
        """Ausdehnung der festgeschriebenen Spalten pro Achse, ab dem Ursprung gezählt"""
        cols = np.argwhere(self.committed)
        if not len(cols):
            return (0, 0)
        return (int(cols[:, 0].max()) + 1, int(cols[:, 1].max()) + 1)


@dataclass
class WorldState:
    """
    Attributes:
        coarse: coarse Struktur-Ebene (None bei fine-only)
        upsampled: coarse Belegung, auf das feine Gitter hochgesampelt
        fine: feine Struktur-Ebene
        latents: feine Latents auf der feinen aktiven Menge
    """
    blocks: Tuple[int, int]
    resolution: int
    coarse: Optional[LayerState] = None
    upsampled: Optional[np.ndarray] = None
    fine: Optional[LayerState] = None
    latents: Optional[SparseGrid] = None
    latent_records: List[StepRecord] = field(default_factory=list)
    current_step: Optional[int] = None
