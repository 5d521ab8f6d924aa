"""
Procedural Indoor World Generator

Erzeugt deterministische Häuser aus rechteckigen Räumen: Boden, Wände mit
Türöffnungen, Möbel-Boxen und eine doppelseitige Trennwand mit zwei
verschiedenen Farben (macht Farbdurchmischung beim Feature-Lifting sichtbar).
"""
import logging
import math
from dataclasses import dataclass, field
from enum import IntEnum
from typing import List, Tuple

import numpy as np
from scipy import ndimage

from ..voxcore import SparseGrid
from ..voxcore.frame import DEFAULT_HOUSE_HEIGHT, DEFAULT_RESOLUTION

logger = logging.getLogger(__name__)

FEATURE_CHANNELS = 6  # RGB + normal XYZ
MARGIN_VOXELS = 8
DOOR_WIDTH = 8


class SemanticTag(IntEnum):
    """Semantische Klassen pro Voxel"""
    FLOOR = 1
    WALL = 2
    FURNITURE = 3


@dataclass(frozen=True)
class Room:
    """Raum-Rechteck in Welt-Voxeln, inklusive Wandring"""
    index: int
    x0: int
    y0: int
    x1: int
    y1: int
    floor_color: Tuple[float, float, float]
    wall_color: Tuple[float, float, float]

    @property
    def interior(self) -> Tuple[int, int, int, int]:
        return (self.x0 + 1, self.y0 + 1, self.x1 - 1, self.y1 - 1)


@dataclass(frozen=True)
class Door:
    """Türöffnung zwischen zwei Räumen (XY-Rechteck in Voxeln)"""
    rooms: Tuple[int, int]
    x0: int
    y0: int
    x1: int
    y1: int
    height: int


@dataclass(eq=False)
class SceneWorld:
    """
    Voxel-Welt mit Features (RGB + Normal) und semantischen Tags

    Attributes:
        grid: SparseGrid mit C_f = 6 Kanälen
        semantics: SemanticTag pro Eintrag (gleiche Reihenfolge wie grid)
        voxel_size: Kantenlänge eines Welt-Voxels in Metern
        rooms / doors: Layout-Beschreibung
    """
    grid: SparseGrid
    semantics: np.ndarray
    voxel_size: float
    rooms: List[Room] = field(default_factory=list)
    doors: List[Door] = field(default_factory=list)
    seed: int = 0

    @property
    def extent(self) -> Tuple[float, float]:
        """Ausdehnung in X/Y (Meter)"""
        return (self.grid.resolution[0] * self.voxel_size, self.grid.resolution[1] * self.voxel_size)

    @property
    def shape(self) -> Tuple[int, int, int]:
        return self.grid.resolution

    @classmethod
    def empty(cls, shape: Tuple[int, int, int], voxel_size: float) -> "SceneWorld":
        grid = SparseGrid.empty(shape, (voxel_size,) * 3, FEATURE_CHANNELS)
        return cls(grid=grid, semantics=np.zeros(0, dtype=np.uint8), voxel_size=voxel_size)

    def column_map(self) -> np.ndarray:
        """(X, Y) bool: mindestens ein aktiver Voxel in der Spalte"""
        cols = np.zeros(self.shape[:2], dtype=bool)
        if len(self.grid):
            cols[self.grid.coords[:, 0], self.grid.coords[:, 1]] = True
        return cols

    def tagged(self, tag: SemanticTag) -> np.ndarray:
        """Koordinaten aller Voxel mit dem gegebenen Tag"""
        return self.grid.coords[self.semantics == int(tag)]


def _distinct_color(rng: np.random.Generator, hue: float, sat: float, val: float) -> Tuple[float, float, float]:
    h = (hue % 1.0) * 6.0
    i = int(h) % 6
    f = h - int(h)
    p, q, t = val * (1 - sat), val * (1 - sat * f), val * (1 - sat * (1 - f))
    rgb = [(val, t, p), (q, val, p), (p, val, t), (p, q, val), (t, p, val), (val, p, q)][i]
    jitter = rng.uniform(-0.02, 0.02, size=3)
    return tuple(float(np.clip(c + j, 0.0, 1.0)) for c, j in zip(rgb, jitter))


class _Canvas:
    """Dichte Arbeits-Volumina während der Generierung"""

    def __init__(self, shape: Tuple[int, int, int]):
        self.tags = np.zeros(shape, dtype=np.uint8)
        self.color = np.zeros(shape + (3,), dtype=np.float32)
        self.normal = np.zeros(shape + (3,), dtype=np.float32)

    def put(self, sl, tag: SemanticTag, color, normal) -> None:
        self.tags[sl] = int(tag)
        self.color[sl] = color
        self.normal[sl] = normal

    def to_world(self, voxel_size: float, rooms, doors, seed) -> SceneWorld:
        coords = np.argwhere(self.tags > 0)
        feats = np.concatenate(
            [self.color[tuple(coords.T)], self.normal[tuple(coords.T)]], axis=1
        ) if len(coords) else np.zeros((0, FEATURE_CHANNELS), dtype=np.float32)
        grid = SparseGrid(self.tags.shape, (voxel_size,) * 3, coords, feats)
        # SparseGrid keeps argwhere order (already lexicographic)
        semantics = self.tags[grid.coords[:, 0], grid.coords[:, 1], grid.coords[:, 2]].astype(np.uint8)
        return SceneWorld(grid, semantics, voxel_size, list(rooms), list(doors), seed)


def _layout(rng: np.random.Generator, rooms: int, resolution: int) -> Tuple[List[Tuple[int, int, int, int]], int, int]:
    cols = int(math.ceil(math.sqrt(rooms)))
    rows = int(math.ceil(rooms / cols))
    lo, hi = int(1.25 * resolution), int(2.0 * resolution)
    widths = rng.integers(lo, hi + 1, size=cols)
    depths = rng.integers(lo, hi + 1, size=rows)
    xs = MARGIN_VOXELS + np.concatenate([[0], np.cumsum(widths)])
    ys = MARGIN_VOXELS + np.concatenate([[0], np.cumsum(depths)])
    rects = []
    for k in range(rooms):
        r, c = divmod(k, cols)
        rects.append((int(xs[c]), int(ys[r]), int(xs[c + 1]), int(ys[r + 1])))
    size_x = int(xs[-1]) + MARGIN_VOXELS
    size_y = int(ys[-1]) + MARGIN_VOXELS
    return rects, size_x, size_y


def _build_room(canvas: _Canvas, room: Room, nz: int) -> None:
    x0, y0, x1, y1 = room.x0, room.y0, room.x1, room.y1
    ix0, iy0, ix1, iy1 = room.interior
    canvas.put((slice(ix0, ix1), slice(iy0, iy1), 0), SemanticTag.FLOOR, room.floor_color, (0.0, 0.0, 1.0))
    # wall ring, one voxel thick, normals face into the room
    canvas.put((slice(x0, x1), y0, slice(0, nz)), SemanticTag.WALL, room.wall_color, (0.0, 1.0, 0.0))
    canvas.put((slice(x0, x1), y1 - 1, slice(0, nz)), SemanticTag.WALL, room.wall_color, (0.0, -1.0, 0.0))
    canvas.put((x0, slice(y0, y1), slice(0, nz)), SemanticTag.WALL, room.wall_color, (1.0, 0.0, 0.0))
    canvas.put((x1 - 1, slice(y0, y1), slice(0, nz)), SemanticTag.WALL, room.wall_color, (-1.0, 0.0, 0.0))


def _build_divider(canvas: _Canvas, room: Room, rng: np.random.Generator, nz: int) -> Tuple[int, int, int, int]:
    """Zweilagige Trennwand: jede Seite eine andere Farbe"""
    ix0, iy0, ix1, iy1 = room.interior
    cx = (ix0 + ix1) // 2
    length = max(4, (iy1 - iy0) // 3)
    ys = iy0 + (iy1 - iy0 - length) // 2
    back_color = _distinct_color(rng, rng.uniform(), 0.9, 0.9)
    canvas.put((cx, slice(ys, ys + length), slice(1, nz)), SemanticTag.WALL, room.wall_color, (-1.0, 0.0, 0.0))
    canvas.put((cx + 1, slice(ys, ys + length), slice(1, nz)), SemanticTag.WALL, back_color, (1.0, 0.0, 0.0))
    return (cx - 1, ys - 1, cx + 3, ys + length + 1)


def _furniture_shell(sx: int, sy: int, sz: int) -> np.ndarray:
    box = np.ones((sx, sy, sz), dtype=bool)
    if sx > 2 and sy > 2 and sz > 2:
        box[1:-1, 1:-1, 1:-1] = False
    return box


def _place_furniture(canvas: _Canvas, room: Room, rng: np.random.Generator, nz: int, blocked) -> int:
    ix0, iy0, ix1, iy1 = room.interior
    placed = 0
    wanted = int(rng.integers(1, 4))
    for _ in range(40):
        if placed >= wanted:
            break
        sx, sy = (int(v) for v in rng.integers(4, 13, size=2))
        sz = int(rng.integers(3, min(11, nz - 2) + 1))
        # one voxel clearance from the wall ring
        if ix1 - ix0 - 2 - sx <= 0 or iy1 - iy0 - 2 - sy <= 0:
            continue
        x = int(rng.integers(ix0 + 1, ix1 - 1 - sx + 1))
        y = int(rng.integers(iy0 + 1, iy1 - 1 - sy + 1))
        bx0, by0, bx1, by1 = blocked
        if x < bx1 and x + sx > bx0 and y < by1 and y + sy > by0:
            continue
        region = canvas.tags[x:x + sx, y:y + sy, 1:1 + sz]
        if np.any(region == int(SemanticTag.WALL)):
            continue
        color = _distinct_color(rng, rng.uniform(), rng.uniform(0.4, 0.9), rng.uniform(0.5, 1.0))
        shell = _furniture_shell(sx, sy, sz)
        idx = np.argwhere(shell)
        cx, cy, cz = (sx - 1) / 2.0, (sy - 1) / 2.0, (sz - 1) / 2.0
        for i, j, k in idx:
            d = np.array([(i - cx) / max(cx, 0.5), (j - cy) / max(cy, 0.5), (k - cz) / max(cz, 0.5)])
            axis = int(np.argmax(np.abs(d)))
            n = [0.0, 0.0, 0.0]
            n[axis] = float(np.sign(d[axis]) or 1.0)
            canvas.put((x + i, y + j, 1 + k), SemanticTag.FURNITURE, color, tuple(n))
        placed += 1
    return placed


def _doors_for(rects, cols: int, rng: np.random.Generator, nz: int) -> List[Door]:
    doors = []
    door_h = max(2, int(round(0.7 * nz)))
    for k, (x0, y0, x1, y1) in enumerate(rects):
        r, c = divmod(k, cols)
        if c > 0:
            # shared wall with the left neighbour: columns x0-1 (theirs) and x0 (ours)
            lo = max(y0, rects[k - 1][1]) + 2
            hi = min(y1, rects[k - 1][3]) - 2 - DOOR_WIDTH
            if hi >= lo:
                y = int(rng.integers(lo, hi + 1))
                doors.append(Door((k - 1, k), x0 - 1, y, x0 + 1, y + DOOR_WIDTH, door_h))
        elif r > 0:
            up = k - cols
            lo = max(x0, rects[up][0]) + 2
            hi = min(x1, rects[up][2]) - 2 - DOOR_WIDTH
            if hi >= lo:
                x = int(rng.integers(lo, hi + 1))
                doors.append(Door((up, k), x, y0 - 1, x + DOOR_WIDTH, y0 + 1, door_h))
    return doors


def _carve_door(canvas: _Canvas, door: Door, rooms: List[Room]) -> None:
    sl = (slice(door.x0, door.x1), slice(door.y0, door.y1))
    gap = sl + (slice(1, door.height),)
    canvas.tags[gap] = 0
    canvas.color[gap] = 0.0
    canvas.normal[gap] = 0.0
    canvas.put(sl + (0,), SemanticTag.FLOOR, rooms[door.rooms[1]].floor_color, (0.0, 0.0, 1.0))


def generate_world(
    seed: int,
    rooms: int,
    resolution: int = DEFAULT_RESOLUTION,
    house_height: float = DEFAULT_HOUSE_HEIGHT,
    doors: bool = True,
) -> SceneWorld:
    """
    Generiert eine deterministische Innenraum-Welt

    Args:
        seed: Zufalls-Seed
        rooms: Anzahl Räume (>= 1)
        resolution: Voxel pro Blockkante; Welt-Voxel = house_height / resolution
        house_height: Raumhöhe in Metern
        doors: False liefert die Welt vor dem Ausschneiden der Türen

    Returns:
        SceneWorld
    """
    if rooms < 1:
        raise ValueError(f"rooms muss >= 1 sein, ist {rooms}")
    rng = np.random.default_rng(seed)
    nz = resolution
    voxel_size = house_height / resolution
    rects, size_x, size_y = _layout(rng, rooms, resolution)
    cols = int(math.ceil(math.sqrt(rooms)))

    canvas = _Canvas((size_x, size_y, nz))
    hue0 = rng.uniform()
    room_list = []
    for k, (x0, y0, x1, y1) in enumerate(rects):
        hue = hue0 + k / (rooms + 1)
        room = Room(
            k, x0, y0, x1, y1,
            floor_color=_distinct_color(rng, hue + 0.5, 0.3, 0.6),
            wall_color=_distinct_color(rng, hue, 0.8, 0.95),
        )
        room_list.append(room)
        _build_room(canvas, room, nz)

    blocked = _build_divider(canvas, room_list[0], rng, nz)
    furniture = 0
    for room in room_list:
        furniture += _place_furniture(canvas, room, rng, nz, blocked if room.index == 0 else (0, 0, 0, 0))

    door_list = _doors_for(rects, cols, rng, nz)
    if doors:
        for door in door_list:
            _carve_door(canvas, door, room_list)

    world = canvas.to_world(voxel_size, room_list, door_list if doors else [], seed)
    logger.debug(
        f"Welt generiert: seed={seed}, {rooms} Räume, {furniture} Möbel, "
        f"{len(world.grid)} Voxel, Ausdehnung {world.extent[0]:.1f}x{world.extent[1]:.1f} m"
    )
    return world


def floor_components(world: SceneWorld) -> int:
    """Anzahl 4-zusammenhängender Bodenflächen (Schicht z = 0)"""
    floor = np.zeros(world.shape[:2], dtype=bool)
    coords = world.tagged(SemanticTag.FLOOR)
    coords = coords[coords[:, 2] == 0]
    if len(coords):
        floor[coords[:, 0], coords[:, 1]] = True
    _, count = ndimage.label(floor)
    return int(count)
