"""Voxel Core Package"""
from .grid import Box, DenseMask, SparseGrid, SparseMask, VoxelCoord, linear_keys
from .frame import BlockFrame, BlockLevel
from .ops import (
    PasteMode,
    crop,
    dense_from_sparse,
    erase,
    overwrite_region,
    paste,
    threshold_occupancy,
    trilinear_upsample,
)
from .wgb1 import BlockFormatError, decode_block, encode_block, load_block, save_block

__all__ = [
    'Box', 'DenseMask', 'SparseGrid', 'SparseMask', 'VoxelCoord', 'linear_keys',
    'BlockFrame', 'BlockLevel',
    'PasteMode', 'crop', 'dense_from_sparse', 'erase', 'overwrite_region', 'paste',
    'threshold_occupancy', 'trilinear_upsample',
    'BlockFormatError', 'decode_block', 'encode_block', 'load_block', 'save_block',
]
