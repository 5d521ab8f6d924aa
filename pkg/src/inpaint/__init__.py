"""Block Inpainting Package"""
# conditioning first: flowgen imports it while this package initialises
from .conditioning import ConditioningBundle, assemble_condition
from .masks import QuadrantSplit, draw_split, make_training_masks
from .inpainting import OCCUPANCY_THRESHOLD, inpaint_latent, inpaint_structure

__all__ = [
    'ConditioningBundle', 'assemble_condition',
    'QuadrantSplit', 'draw_split', 'make_training_masks',
    'OCCUPANCY_THRESHOLD', 'inpaint_latent', 'inpaint_structure',
]
