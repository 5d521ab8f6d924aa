"""Debug-Ausgabe gerenderter Ansichten als binäre PPM-Bilder"""
import logging
from pathlib import Path
from typing import Sequence

import numpy as np

logger = logging.getLogger(__name__)


def write_ppm(path: Path, rgb: np.ndarray) -> Path:
    """rgb: (H, W, 3) Floats in [0, 1]"""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    img = (np.clip(np.nan_to_num(rgb), 0.0, 1.0) * 255.0 + 0.5).astype(np.uint8)
    h, w = img.shape[:2]
    path.write_bytes(f"P6\n{w} {h}\n255\n".encode("ascii") + img.tobytes())
    return path


def depth_to_rgb(depth: np.ndarray) -> np.ndarray:
    finite = np.isfinite(depth)
    gray = np.zeros(depth.shape, dtype=np.float64)
    if np.any(finite):
        lo, hi = depth[finite].min(), depth[finite].max()
        gray[finite] = 1.0 - (depth[finite] - lo) / max(hi - lo, 1e-12)
    return np.repeat(gray[..., None], 3, axis=-1)


def dump_views(out_dir: Path, views: Sequence) -> None:
    out_dir = Path(out_dir)
    for k, (_, depth, fmap) in enumerate(views):
        write_ppm(out_dir / f"view_{k:02d}_depth.ppm", depth_to_rgb(depth.depth))
        write_ppm(out_dir / f"view_{k:02d}_color.ppm", fmap.features[..., :3])
    logger.debug(f"{len(views)} Ansichten nach {out_dir} geschrieben")
