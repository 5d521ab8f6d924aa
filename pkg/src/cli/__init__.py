"""CLI Package"""
from .app import build_parser, main, overrides_from, parse_extent
from .commands import COMMANDS, STAGE_CHOICES, load_generated_blocks
from .examples import latent_examples, occupancy_volume, split_world_blocks, structure_examples

__all__ = [
    'build_parser', 'main', 'overrides_from', 'parse_extent',
    'COMMANDS', 'STAGE_CHOICES', 'load_generated_blocks',
    'latent_examples', 'occupancy_volume', 'split_world_blocks', 'structure_examples',
]
