"""Metrics Package"""
from .points import DEFAULT_POINTS, PointSample, sample_mesh_surface, sample_points, triangle_areas
from .distances import EMDResult, auction_assignment, chamfer, emd, emd_with_certificate
from .frechet import FrechetResult, block_descriptor, frechet_distance, frechet_surrogate
from .distribution import (
    CONVENTIONS,
    EvalReport,
    cov,
    cov_from_matrix,
    evaluate_blocks,
    mmd,
    mmd_from_matrix,
    nna,
    nna_from_matrices,
    pairwise_distances,
)
from .stability import fine_block_at, is_inner, lattice_regions, stability_protocol

__all__ = [
    'DEFAULT_POINTS', 'PointSample', 'sample_mesh_surface', 'sample_points', 'triangle_areas',
    'EMDResult', 'auction_assignment', 'chamfer', 'emd', 'emd_with_certificate',
    'FrechetResult', 'block_descriptor', 'frechet_distance', 'frechet_surrogate',
    'CONVENTIONS', 'EvalReport', 'cov', 'cov_from_matrix', 'evaluate_blocks', 'mmd', 'mmd_from_matrix',
    'nna', 'nna_from_matrices', 'pairwise_distances',
    'fine_block_at', 'is_inner', 'lattice_regions', 'stability_protocol',
]
