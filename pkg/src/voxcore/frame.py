"""
Block-Frames

Ein fine Block ist ein Quader w × w × h mit w = h, ein coarse Block misst
2h × 2h × h und überdeckt 2×2 fine Blöcke. Beide nutzen dasselbe N³ Gitter,
coarse Voxel sind daher anisotrop: (2w/N, 2w/N, h/N).
"""
from dataclasses import dataclass
from enum import Enum
from typing import Optional, Tuple

DEFAULT_RESOLUTION = 32
DEFAULT_HOUSE_HEIGHT = 3.0


class BlockLevel(Enum):
    """Block-Ebenen"""
    COARSE = "coarse"
    FINE = "fine"

    @property
    def tag(self) -> int:
        return 0 if self is BlockLevel.COARSE else 1

    @classmethod
    def from_tag(cls, tag: int) -> "BlockLevel":
        if tag == 0:
            return cls.COARSE
        if tag == 1:
            return cls.FINE
        raise ValueError(f"Unknown level tag {tag}")


@dataclass(frozen=True)
class BlockFrame:
    """Ebene, Gitterposition und physische Größe eines Blocks"""
    level: BlockLevel
    lattice_index: Tuple[int, int]
    origin: Tuple[float, float, float]
    width: float
    height: float
    resolution: int = DEFAULT_RESOLUTION

    def __post_init__(self):
        if self.resolution <= 0 or self.resolution % 8 != 0:
            raise ValueError(f"Block resolution must be a positive multiple of 8, got {self.resolution}")
        if self.height <= 0:
            raise ValueError(f"Block height must be positive, got {self.height}")
        expected = self.height if self.level is BlockLevel.FINE else 2.0 * self.height
        if abs(self.width - expected) > 1e-9 * max(1.0, expected):
            raise ValueError(
                f"{self.level.value} block needs width {expected}, got {self.width}"
            )

    @classmethod
    def fine(
        cls,
        height: float = DEFAULT_HOUSE_HEIGHT,
        resolution: int = DEFAULT_RESOLUTION,
        lattice_index: Tuple[int, int] = (0, 0),
        origin: Optional[Tuple[float, float, float]] = None,
    ) -> "BlockFrame":
        if origin is None:
            origin = (lattice_index[0] * height, lattice_index[1] * height, 0.0)
        return cls(BlockLevel.FINE, tuple(lattice_index), tuple(origin), height, height, resolution)

    @classmethod
    def coarse(
        cls,
        height: float = DEFAULT_HOUSE_HEIGHT,
        resolution: int = DEFAULT_RESOLUTION,
        lattice_index: Tuple[int, int] = (0, 0),
        origin: Optional[Tuple[float, float, float]] = None,
    ) -> "BlockFrame":
        width = 2.0 * height
        if origin is None:
            origin = (lattice_index[0] * width, lattice_index[1] * width, 0.0)
        return cls(BlockLevel.COARSE, tuple(lattice_index), tuple(origin), width, height, resolution)

    @property
    def shape(self) -> Tuple[int, int, int]:
        return (self.resolution, self.resolution, self.resolution)

    @property
    def cell_size(self) -> Tuple[float, float, float]:
        n = self.resolution
        return (self.width / n, self.width / n, self.height / n)

    @property
    def footprint_area(self) -> float:
        """XY-Fläche in m²"""
        return self.width * self.width

    def with_origin(self, origin: Tuple[float, float, float]) -> "BlockFrame":
        return BlockFrame(self.level, self.lattice_index, tuple(origin), self.width, self.height, self.resolution)
