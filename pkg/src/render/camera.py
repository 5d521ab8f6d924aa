"""
Lochkameras und das blockzentrierte Kamera-Rig
"""
import itertools
import math
from dataclasses import dataclass
from typing import List, Sequence, Tuple

import numpy as np

DEFAULT_VIEWS = 26
DEFAULT_IMAGE_SIZE = 48
DEFAULT_RADIUS_FACTOR = 1.5


@dataclass(frozen=True)
class CameraPose:
    """
    Lochkamera

    Attributes:
        position / look_at: Meter im blocklokalen Frame
        up: ungefährer Up-Vektor (intern orthogonalisiert)
        fov: vertikaler Öffnungswinkel im Bogenmaß
        width / height: Bildgröße in Pixeln
    """
    position: Tuple[float, float, float]
    look_at: Tuple[float, float, float]
    up: Tuple[float, float, float] = (0.0, 0.0, 1.0)
    fov: float = math.radians(60.0)
    width: int = DEFAULT_IMAGE_SIZE
    height: int = DEFAULT_IMAGE_SIZE

    def __post_init__(self):
        object.__setattr__(self, "position", tuple(float(v) for v in self.position))
        object.__setattr__(self, "look_at", tuple(float(v) for v in self.look_at))
        object.__setattr__(self, "up", tuple(float(v) for v in self.up))
        if np.allclose(self.position, self.look_at):
            raise ValueError(f"Camera position {self.position} equals look_at")
        if not 0.0 < self.fov < math.pi:
            raise ValueError(f"fov must lie in (0, pi), got {self.fov}")
        if self.width < 1 or self.height < 1:
            raise ValueError(f"Invalid image size {self.width}x{self.height}")
        if np.linalg.norm(np.cross(self.forward, np.asarray(self.up))) < 1e-9:
            raise ValueError(f"up {self.up} is parallel to the viewing direction")

    @property
    def forward(self) -> np.ndarray:
        f = np.asarray(self.look_at) - np.asarray(self.position)
        return f / np.linalg.norm(f)

    def basis(self) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
        """(right, true_up, forward)"""
        f = self.forward
        r = np.cross(f, np.asarray(self.up))
        r /= np.linalg.norm(r)
        u = np.cross(r, f)
        return r, u, f

    @property
    def tan_half(self) -> float:
        return math.tan(self.fov / 2.0)

    @property
    def aspect(self) -> float:
        return self.width / self.height

    def ray_directions(self) -> np.ndarray:
        """(H, W, 3) Einheitsrichtungen durch die Pixelmitten; Zeile 0 ist oben"""
        r, u, f = self.basis()
        xs = ((np.arange(self.width) + 0.5) / self.width * 2.0 - 1.0) * self.tan_half * self.aspect
        ys = (1.0 - (np.arange(self.height) + 0.5) / self.height * 2.0) * self.tan_half
        d = f[None, None, :] + xs[None, :, None] * r[None, None, :] + ys[:, None, None] * u[None, None, :]
        return d / np.linalg.norm(d, axis=-1, keepdims=True)

    def project(self, points: np.ndarray) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
        """
        Projiziert Punkte auf Pixel-Indizes

        Returns:
            (col, row, in_front): ganzzahlige Pixel-Indizes und eine Maske der
            Punkte vor der Kamera, die im Bild landen
        """
        r, u, f = self.basis()
        v = np.asarray(points, dtype=np.float64) - np.asarray(self.position)
        z = v @ f
        in_front = z > 1e-12
        safe_z = np.where(in_front, z, 1.0)
        x = (v @ r) / safe_z / (self.tan_half * self.aspect)
        y = (v @ u) / safe_z / self.tan_half
        col = np.floor((x + 1.0) / 2.0 * self.width).astype(np.int64)
        row = np.floor((1.0 - y) / 2.0 * self.height).astype(np.int64)
        inside = in_front & (col >= 0) & (col < self.width) & (row >= 0) & (row < self.height)
        return col, row, inside


def rig_directions(count: int = DEFAULT_VIEWS) -> List[np.ndarray]:
    """Einheitsrichtungen aus den 26 Nachbarn des Ursprungs in {-1, 0, 1}^3"""
    dirs = [np.array(d, dtype=np.float64) for d in itertools.product((-1, 0, 1), repeat=3) if any(d)]
    dirs = [d / np.linalg.norm(d) for d in dirs]
    if count < 1 or count > len(dirs):
        raise ValueError(f"View count must lie in [1, {len(dirs)}], got {count}")
    if count == len(dirs):
        return dirs
    # evenly spread subset, deterministic
    picks = np.linspace(0, len(dirs) - 1, count).round().astype(int)
    return [dirs[i] for i in picks]


def view_rig(
    extent: Sequence[float],
    count: int = DEFAULT_VIEWS,
    image_size: int = DEFAULT_IMAGE_SIZE,
    radius_factor: float = DEFAULT_RADIUS_FACTOR,
) -> List[CameraPose]:
    """
    Kameras auf einer Kugel um die Blockmitte, alle auf die Mitte gerichtet

    Der Radius ist radius_factor mal die Blockdiagonale; der Öffnungswinkel
    deckt die Umkugel des Blocks mit etwas Rand ab.
    """
    extent = np.asarray(extent, dtype=np.float64)
    center = extent / 2.0
    diag = float(np.linalg.norm(extent))
    radius = radius_factor * diag
    half = math.asin(min(1.0, (diag / 2.0) / radius))
    fov = min(2.0 * half * 1.05, math.pi * 0.95)
    cams = []
    for d in rig_directions(count):
        up = (0.0, 1.0, 0.0) if abs(d[0]) < 1e-12 and abs(d[1]) < 1e-12 else (0.0, 0.0, 1.0)
        cams.append(CameraPose(tuple(center + radius * d), tuple(center), up, fov, image_size, image_size))
    return cams
