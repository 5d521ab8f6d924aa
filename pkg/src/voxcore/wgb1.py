"""
WGB1 Block-Dateiformat

Header (little-endian):
    magic      4s   b"WGB1"
    level      u1   0 coarse, 1 fine
    resolution 3×u4
    cell_size  3×f8
    channels   u4
    entries    u4
Records: x, y, z als u2, danach C float32 Werte, in Gitter-Reihenfolge.
"""
import struct
from pathlib import Path
from typing import Tuple, Union

import numpy as np

from .frame import BlockLevel
from .grid import SparseGrid

MAGIC = b"WGB1"
_HEADER = struct.Struct("<4sB3I3dII")


class BlockFormatError(ValueError):
    """Fehlerhafte Block-Datei"""


def _record_dtype(channels: int) -> np.dtype:
    return np.dtype([("xyz", "<u2", (3,)), ("f", "<f4", (channels,))])


def encode_block(grid: SparseGrid, level: BlockLevel) -> bytes:
    if any(r > 65536 for r in grid.resolution):
        raise ValueError(f"Resolution {grid.resolution} exceeds 16-bit coordinate range")
    header = _HEADER.pack(MAGIC, level.tag, *grid.resolution, *grid.cell_size, grid.channels, len(grid))
    records = np.zeros(len(grid), dtype=_record_dtype(grid.channels))
    records["xyz"] = grid.coords.astype(np.uint16)
    records["f"] = grid.features
    return header + records.tobytes()


def decode_block(data: bytes) -> Tuple[SparseGrid, BlockLevel]:
    if len(data) < _HEADER.size:
        raise BlockFormatError("Truncated WGB1 header")
    magic, tag, nx, ny, nz, sx, sy, sz, channels, count = _HEADER.unpack_from(data, 0)
    if magic != MAGIC:
        raise BlockFormatError(f"Bad magic {magic!r}")
    dtype = _record_dtype(channels)
    expected = _HEADER.size + count * dtype.itemsize
    if len(data) != expected:
        raise BlockFormatError(f"WGB1 payload has {len(data)} bytes, expected {expected}")
    records = np.frombuffer(data, dtype=dtype, count=count, offset=_HEADER.size)
    coords = records["xyz"].astype(np.int64).reshape(-1, 3)
    features = np.array(records["f"], dtype=np.float32).reshape(count, channels)
    grid = SparseGrid((nx, ny, nz), (sx, sy, sz), coords, features)
    return grid, BlockLevel.from_tag(tag)


def save_block(path: Union[str, Path], grid: SparseGrid, level: BlockLevel) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_bytes(encode_block(grid, level))
    return path


def load_block(path: Union[str, Path]) -> Tuple[SparseGrid, BlockLevel]:
    return decode_block(Path(path).read_bytes())
