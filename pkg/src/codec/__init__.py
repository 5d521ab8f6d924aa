"""Structured-Latent Codec Package"""
from .linear import (
    CONFIDENCE_THRESHOLD,
    CodecParams,
    LatentBlock,
    decode,
    encode,
    fit_on_blocks,
    fit_trained_linear,
    fixed_orthonormal,
    reconstruction_error,
)
from .mesh import Mesh, extract_mesh, merge_meshes, mesh_blocks, weld_vertices
from .ply import decode_ply, encode_ply, export_ply, read_ply
from .ablation import run_codec_ablation

__all__ = [
    'CONFIDENCE_THRESHOLD', 'CodecParams', 'LatentBlock', 'decode', 'encode',
    'fit_on_blocks', 'fit_trained_linear', 'fixed_orthonormal', 'reconstruction_error',
    'Mesh', 'extract_mesh', 'merge_meshes', 'mesh_blocks', 'weld_vertices',
    'decode_ply', 'encode_ply', 'export_ply', 'read_ply',
    'run_codec_ablation',
]
