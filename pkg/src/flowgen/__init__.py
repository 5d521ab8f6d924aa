"""Flow-Matching Generator Package"""
from .tokens import (
    TokenSet,
    add_noise,
    flow_target,
    mask_tokens,
    patch_positions,
    patchify,
    unpatchify,
    voxel_tokens,
)
from .model import GeneratorModel, ModelStage, condition_vector
from .optim import AdamW
from .training import TrainingDivergedError, TrainingExample, TrainingResult, train
from .sampler import NonFiniteSampleError, euler_integrate, model_velocity, sample
from .checkpoint import decode_checkpoint, encode_checkpoint, load_checkpoint, save_checkpoint

__all__ = [
    'TokenSet', 'add_noise', 'flow_target', 'mask_tokens', 'patch_positions', 'patchify',
    'unpatchify', 'voxel_tokens',
    'GeneratorModel', 'ModelStage', 'condition_vector',
    'AdamW',
    'TrainingDivergedError', 'TrainingExample', 'TrainingResult', 'train',
    'NonFiniteSampleError', 'euler_integrate', 'model_velocity', 'sample',
    'decode_checkpoint', 'encode_checkpoint', 'load_checkpoint', 'save_checkpoint',
]
