"""
Binärer Little-Endian PLY Export / Import für Dreiecksnetze mit RGB pro Face
"""
from pathlib import Path
from typing import Union

import numpy as np

from ..voxcore import BlockFormatError
from .mesh import Mesh

_VERTEX = np.dtype([("x", "<f4"), ("y", "<f4"), ("z", "<f4")])
_FACE = np.dtype([("n", "u1"), ("idx", "<i4", (3,)), ("rgb", "u1", (3,))])


def _header(n_vertices: int, n_faces: int) -> bytes:
    lines = [
        "ply",
        "format binary_little_endian 1.0",
        f"element vertex {n_vertices}",
        "property float x",
        "property float y",
        "property float z",
        f"element face {n_faces}",
        "property list uchar int vertex_indices",
        "property uchar red",
        "property uchar green",
        "property uchar blue",
        "end_header",
    ]
    return ("\n".join(lines) + "\n").encode("ascii")


def encode_ply(mesh: Mesh) -> bytes:
    verts = np.zeros(mesh.vertices.shape[0], dtype=_VERTEX)
    verts["x"], verts["y"], verts["z"] = (mesh.vertices[:, i] for i in range(3))
    faces = np.zeros(mesh.faces.shape[0], dtype=_FACE)
    faces["n"] = 3
    faces["idx"] = mesh.faces
    faces["rgb"] = mesh.face_colors
    return _header(len(verts), len(faces)) + verts.tobytes() + faces.tobytes()


def export_ply(mesh: Mesh, path: Union[str, Path]) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_bytes(encode_ply(mesh))
    return path


def decode_ply(data: bytes) -> Mesh:
    """Liest genau das Layout, das encode_ply schreibt"""
    marker = b"end_header\n"
    end = data.find(marker)
    if not data.startswith(b"ply\n") or end < 0:
        raise BlockFormatError("Not a PLY file")
    header = data[:end].decode("ascii").splitlines()
    if "format binary_little_endian 1.0" not in header:
        raise BlockFormatError("Only binary little-endian PLY is supported")
    counts = {}
    for line in header:
        parts = line.split()
        if len(parts) == 3 and parts[0] == "element":
            counts[parts[1]] = int(parts[2])
    if set(counts) != {"vertex", "face"}:
        raise BlockFormatError(f"Unexpected PLY elements {sorted(counts)}")
    body = data[end + len(marker):]
    nv, nf = counts["vertex"], counts["face"]
    expected = nv * _VERTEX.itemsize + nf * _FACE.itemsize
    if len(body) != expected:
        raise BlockFormatError(f"PLY body has {len(body)} bytes, expected {expected}")
    verts = np.frombuffer(body, dtype=_VERTEX, count=nv)
    faces = np.frombuffer(body, dtype=_FACE, count=nf, offset=nv * _VERTEX.itemsize)
    if nf and np.any(faces["n"] != 3):
        raise BlockFormatError("Only triangle faces are supported")
    vertices = np.stack([verts["x"], verts["y"], verts["z"]], axis=1).astype(np.float32).reshape(nv, 3)
    return Mesh(vertices, faces["idx"].astype(np.int32).reshape(nf, 3), faces["rgb"].astype(np.uint8).reshape(nf, 3))


def read_ply(path: Union[str, Path]) -> Mesh:
    return decode_ply(Path(path).read_bytes())
