"""
Generator-Checkpoints

Header (little-endian):
    magic "WGCK", version u2, stage u1, C_in u4, C_out u4, hidden u4, seed i8,
    position features u4, time features u4, condition length u4,
    optimiser step u8, has_moments u1
Body: float32 zeilenweise W1, b1, W2, b2, danach, falls vorhanden, erstes und
zweites AdamW-Moment in derselben Reihenfolge.
"""
import struct
from pathlib import Path
from typing import Optional, Tuple, Union

import numpy as np

from ..voxcore import BlockFormatError
from .model import PARAM_NAMES, POSITION_FEATURES, TIME_FEATURES, GeneratorModel, ModelStage
from .optim import AdamW

MAGIC = b"WGCK"
VERSION = 1
_HEADER = struct.Struct("<4sHBIIIqIIIQB")


def _shapes(model: GeneratorModel):
    return [model.params[name].shape for name in PARAM_NAMES]


def encode_checkpoint(model: GeneratorModel, optimizer: Optional[AdamW] = None) -> bytes:
    has_moments = optimizer is not None and bool(optimizer.m)
    header = _HEADER.pack(
        MAGIC, VERSION, model.stage.value, model.c_in, model.c_out, model.hidden, model.seed,
        POSITION_FEATURES, TIME_FEATURES, model.cond_len,
        optimizer.step_count if optimizer else 0, int(has_moments),
    )
    blobs = [np.asarray(model.params[n], dtype="<f4").tobytes() for n in PARAM_NAMES]
    if has_moments:
        blobs += [np.asarray(optimizer.m[n], dtype="<f4").tobytes() for n in PARAM_NAMES]
        blobs += [np.asarray(optimizer.v[n], dtype="<f4").tobytes() for n in PARAM_NAMES]
    return header + b"".join(blobs)


def decode_checkpoint(data: bytes, lr: float = 1e-4, weight_decay: float = 0.01) -> Tuple[GeneratorModel, AdamW]:
    if len(data) < _HEADER.size:
        raise BlockFormatError("Truncated checkpoint header")
    (magic, version, stage, c_in, c_out, hidden, seed,
     pos_f, time_f, cond_len, step, has_moments) = _HEADER.unpack_from(data, 0)
    if magic != MAGIC:
        raise BlockFormatError(f"Bad checkpoint magic {magic!r}")
    if version != VERSION:
        raise BlockFormatError(f"Unsupported checkpoint version {version}")
    if pos_f != POSITION_FEATURES or time_f != TIME_FEATURES or c_in != 2 * c_out + 1:
        raise BlockFormatError("Checkpoint layout does not match this generator")

    d = 2 * c_in + pos_f + time_f + cond_len
    shapes = [(d, hidden), (hidden,), (hidden, c_out), (c_out,)]
    sizes = [int(np.prod(s)) for s in shapes]
    groups = 3 if has_moments else 1
    expected = _HEADER.size + 4 * sum(sizes) * groups
    if len(data) != expected:
        raise BlockFormatError(f"Checkpoint has {len(data)} bytes, expected {expected}")

    arrays = []
    offset = _HEADER.size
    for _ in range(groups):
        group = {}
        for name, shape, size in zip(PARAM_NAMES, shapes, sizes):
            group[name] = np.frombuffer(data, dtype="<f4", count=size, offset=offset).astype(np.float64).reshape(shape)
            offset += 4 * size
        arrays.append(group)

    model = GeneratorModel(ModelStage(stage), c_out, hidden, cond_len, seed, arrays[0])
    opt = AdamW(lr=lr, weight_decay=weight_decay, step_count=step)
    if has_moments:
        opt.m, opt.v = arrays[1], arrays[2]
    return model, opt


def save_checkpoint(path: Union[str, Path], model: GeneratorModel, optimizer: Optional[AdamW] = None) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_bytes(encode_checkpoint(model, optimizer))
    return path


def load_checkpoint(path: Union[str, Path], lr: float = 1e-4, weight_decay: float = 0.01) -> Tuple[GeneratorModel, AdamW]:
    return decode_checkpoint(Path(path).read_bytes(), lr, weight_decay)
