"""
Sparse und dichte Voxel-Container

Ein SparseGrid hält aktive Voxel als zwei parallele Arrays (Koordinaten und
Features pro Voxel) in lexikographischer (x, y, z) Reihenfolge; gleiche
Gitter haben damit immer gleiche Bytes.
"""
from dataclasses import dataclass, field
from typing import Dict, Mapping, NamedTuple, Sequence, Tuple

import numpy as np


Resolution = Tuple[int, int, int]
CellSize = Tuple[float, float, float]


class VoxelCoord(NamedTuple):
    """Ganzzahliger Voxel-Index im Block"""
    x: int
    y: int
    z: int


@dataclass(frozen=True)
class Box:
    """Halboffene Voxel-Box [lo, hi) pro Achse"""
    lo: Tuple[int, int, int]
    hi: Tuple[int, int, int]

    def __post_init__(self):
        object.__setattr__(self, "lo", tuple(int(v) for v in self.lo))
        object.__setattr__(self, "hi", tuple(int(v) for v in self.hi))

    @property
    def shape(self) -> Tuple[int, int, int]:
        return tuple(h - l for l, h in zip(self.lo, self.hi))

    @property
    def is_degenerate(self) -> bool:
        return any(h <= l for l, h in zip(self.lo, self.hi))

    def volume(self) -> int:
        sx, sy, sz = self.shape
        return max(sx, 0) * max(sy, 0) * max(sz, 0)

    def contains(self, coords: np.ndarray) -> np.ndarray:
        """Bool-Maske der Zeilen eines (L, 3) Koordinaten-Arrays innerhalb der Box"""
        lo = np.asarray(self.lo)
        hi = np.asarray(self.hi)
        return np.all((coords >= lo) & (coords < hi), axis=1)

    def fits_in(self, resolution: Sequence[int]) -> bool:
        return all(0 <= l and h <= r for l, h, r in zip(self.lo, self.hi, resolution))

    def intersect(self, other: "Box") -> "Box":
        lo = tuple(max(a, b) for a, b in zip(self.lo, other.lo))
        hi = tuple(min(a, b) for a, b in zip(self.hi, other.hi))
        return Box(lo, hi)

    def slices(self) -> Tuple[slice, slice, slice]:
        return tuple(slice(l, h) for l, h in zip(self.lo, self.hi))


def linear_keys(coords: np.ndarray, resolution: Sequence[int]) -> np.ndarray:
    """Linearer Index pro Koordinate (x langsamste, z schnellste Achse)"""
    coords = np.asarray(coords, dtype=np.int64).reshape(-1, 3)
    _, ny, nz = (int(r) for r in resolution)
    return (coords[:, 0] * ny + coords[:, 1]) * nz + coords[:, 2]


@dataclass(frozen=True, eq=False)
class SparseGrid:
    """
    Aktive Voxel mit je einem Feature-Vektor fester Länge

    Attributes:
        resolution: (Nx, Ny, Nz) Voxel
        cell_size: (sx, sy, sz) Meter pro Voxel
        coords: (L, 3) int64 Voxel-Indizes, lexikographisch sortiert, eindeutig
        features: (L, C) float32
    """
    resolution: Resolution
    cell_size: CellSize
    coords: np.ndarray = field(repr=False)
    features: np.ndarray = field(repr=False)

    def __post_init__(self):
        resolution = tuple(int(r) for r in self.resolution)
        cell_size = tuple(float(s) for s in self.cell_size)
        if len(resolution) != 3 or any(r <= 0 for r in resolution):
            raise ValueError(f"Invalid resolution {self.resolution}")
        if len(cell_size) != 3 or any(s <= 0 for s in cell_size):
            raise ValueError(f"Invalid cell size {self.cell_size}")

        coords = np.asarray(self.coords, dtype=np.int64).reshape(-1, 3)
        features = np.asarray(self.features, dtype=np.float32)
        if features.ndim != 2 or features.shape[0] != coords.shape[0]:
            raise ValueError(
                f"features shape {features.shape} does not match {coords.shape[0]} coordinates"
            )
        if coords.size and (np.any(coords < 0) or np.any(coords >= np.asarray(resolution))):
            raise ValueError(f"Coordinates outside resolution {resolution}")

        keys = linear_keys(coords, resolution)
        order = np.argsort(keys, kind="stable")
        keys = keys[order]
        if keys.size > 1 and np.any(np.diff(keys) == 0):
            raise ValueError("Duplicate voxel coordinates")

        coords = coords[order]
        features = features[order]
        coords.setflags(write=False)
        features.setflags(write=False)
        object.__setattr__(self, "resolution", resolution)
        object.__setattr__(self, "cell_size", cell_size)
        object.__setattr__(self, "coords", coords)
        object.__setattr__(self, "features", features)

    # -- construction -----------------------------------------------------

    @classmethod
    def empty(cls, resolution: Sequence[int], cell_size: Sequence[float], channels: int) -> "SparseGrid":
        return cls(tuple(resolution), tuple(cell_size),
                   np.zeros((0, 3), dtype=np.int64), np.zeros((0, channels), dtype=np.float32))

    @classmethod
    def from_dict(
        cls,
        resolution: Sequence[int],
        cell_size: Sequence[float],
        entries: Mapping[Tuple[int, int, int], Sequence[float]],
        channels: int = 1,
    ) -> "SparseGrid":
        if not entries:
            return cls.empty(resolution, cell_size, channels)
        coords = np.array([tuple(k) for k in entries.keys()], dtype=np.int64)
        features = np.array([np.atleast_1d(v) for v in entries.values()], dtype=np.float32)
        return cls(tuple(resolution), tuple(cell_size), coords, features)

    @classmethod
    def occupancy_of(cls, resolution: Sequence[int], cell_size: Sequence[float], coords: np.ndarray) -> "SparseGrid":
        coords = np.asarray(coords, dtype=np.int64).reshape(-1, 3)
        return cls(tuple(resolution), tuple(cell_size), coords, np.ones((len(coords), 1), dtype=np.float32))

    # -- views --------------------------------------------------------------

    def __len__(self) -> int:
        return int(self.coords.shape[0])

    @property
    def channels(self) -> int:
        return int(self.features.shape[1])

    @property
    def extent(self) -> Tuple[float, float, float]:
        """Physische Größe in Metern"""
        return tuple(r * s for r, s in zip(self.resolution, self.cell_size))

    def keys(self) -> np.ndarray:
        return linear_keys(self.coords, self.resolution)

    def active_set(self) -> set:
        return {VoxelCoord(*map(int, c)) for c in self.coords}

    def to_dict(self) -> Dict[VoxelCoord, np.ndarray]:
        return {VoxelCoord(*map(int, c)): f.copy() for c, f in zip(self.coords, self.features)}

    def occupancy_volume(self) -> np.ndarray:
        vol = np.zeros(self.resolution, dtype=bool)
        if len(self):
            vol[self.coords[:, 0], self.coords[:, 1], self.coords[:, 2]] = True
        return vol

    def index_volume(self) -> np.ndarray:
        """Dichtes int32 Volumen der Eintrags-Indizes, -1 wo inaktiv"""
        vol = np.full(self.resolution, -1, dtype=np.int32)
        if len(self):
            vol[self.coords[:, 0], self.coords[:, 1], self.coords[:, 2]] = np.arange(len(self), dtype=np.int32)
        return vol

    def lookup(self, coords: np.ndarray) -> np.ndarray:
        """Eintrags-Index pro Abfrage-Koordinate, -1 wenn inaktiv"""
        coords = np.asarray(coords, dtype=np.int64).reshape(-1, 3)
        if not len(self) or not len(coords):
            return np.full(len(coords), -1, dtype=np.int64)
        keys = self.keys()
        query = linear_keys(coords, self.resolution)
        pos = np.searchsorted(keys, query)
        pos_clipped = np.minimum(pos, len(keys) - 1)
        found = keys[pos_clipped] == query
        return np.where(found, pos_clipped, -1)

    # -- derived grids ------------------------------------------------------

    def with_features(self, features: np.ndarray) -> "SparseGrid":
        return SparseGrid(self.resolution, self.cell_size, self.coords, features)

    def select(self, keep: np.ndarray) -> "SparseGrid":
        keep = np.asarray(keep, dtype=bool)
        return SparseGrid(self.resolution, self.cell_size, self.coords[keep], self.features[keep])

    def occupancy(self) -> "SparseGrid":
        return SparseGrid.occupancy_of(self.resolution, self.cell_size, self.coords)

    def same_as(self, other: "SparseGrid") -> bool:
        return (
            self.resolution == other.resolution
            and self.cell_size == other.cell_size
            and np.array_equal(self.coords, other.coords)
            and np.array_equal(self.features, other.features)
        )

    def __eq__(self, other) -> bool:
        if not isinstance(other, SparseGrid):
            return NotImplemented
        return self.same_as(other)

    __hash__ = None

    def content_bytes(self) -> bytes:
        """Kanonische Bytes zum Hashen (erst Koordinaten, dann Features)"""
        return self.coords.astype("<i8").tobytes() + self.features.astype("<f4").tobytes()


@dataclass(frozen=True, eq=False)
class DenseMask:
    """Binäre Maske auf Voxel-Ebene, z.B. die Struktur-Inpainting-Maske"""
    resolution: Resolution
    bits: np.ndarray = field(repr=False)

    def __post_init__(self):
        resolution = tuple(int(r) for r in self.resolution)
        bits = np.asarray(self.bits, dtype=bool)
        if bits.size != int(np.prod(resolution)):
            raise ValueError(f"Mask has {bits.size} bits, expected {int(np.prod(resolution))}")
        object.__setattr__(self, "resolution", resolution)
        object.__setattr__(self, "bits", bits.reshape(resolution))

    @classmethod
    def full(cls, resolution: Sequence[int], value: bool) -> "DenseMask":
        return cls(tuple(resolution), np.full(tuple(resolution), value, dtype=bool))

    def masked_fraction(self) -> float:
        return float(self.bits.sum()) / float(self.bits.size)


@dataclass(frozen=True, eq=False)
class SparseMask:
    """Inpainting-Bits pro aktivem Voxel, ausgerichtet an den Koordinaten eines SparseGrid"""
    coords: np.ndarray = field(repr=False)
    bits: np.ndarray = field(repr=False)

    def __post_init__(self):
        coords = np.asarray(self.coords, dtype=np.int64).reshape(-1, 3)
        bits = np.asarray(self.bits, dtype=bool).reshape(-1)
        if len(coords) != len(bits):
            raise ValueError("SparseMask coordinates and bits differ in length")
        if len(coords) > 1:
            uniq = np.unique(coords, axis=0)
            if len(uniq) != len(coords):
                raise ValueError("Duplicate coordinates in SparseMask")
        object.__setattr__(self, "coords", coords)
        object.__setattr__(self, "bits", bits)

    def __len__(self) -> int:
        return int(len(self.bits))

    @classmethod
    def from_dense(cls, grid: SparseGrid, mask: DenseMask) -> "SparseMask":
        """Schränkt eine dichte Maske auf die aktiven Voxel eines Gitters ein"""
        c = grid.coords
        bits = mask.bits[c[:, 0], c[:, 1], c[:, 2]] if len(grid) else np.zeros(0, dtype=bool)
        return cls(c.copy(), bits)


