"""Procedural World & Curation Package"""
from .world import Door, Room, SceneWorld, SemanticTag, floor_components, generate_world
from .slicing import occupancy_topdown, occupied_columns, passes_threshold, slice_block
from .curation import CurationConfig, CurationResult, curate_blocks
from .datasets import (
    BlockDataset,
    DatasetBuild,
    DatasetSeeds,
    build_datasets,
    load_dataset,
    load_manifest,
    write_manifest,
)

__all__ = [
    'Door', 'Room', 'SceneWorld', 'SemanticTag', 'floor_components', 'generate_world',
    'occupancy_topdown', 'occupied_columns', 'passes_threshold', 'slice_block',
    'CurationConfig', 'CurationResult', 'curate_blocks',
    'BlockDataset', 'DatasetBuild', 'DatasetSeeds', 'build_datasets',
    'load_dataset', 'load_manifest', 'write_manifest',
]
