"""World Growth Package"""
from .plan import ExpansionPlan, ExpansionStep, PlanError, plan_expansion
from .state import LayerState, StepRecord, WorldState, region_sha256, step_seed
from .stages import (
    fine_plan,
    grow_appearance,
    grow_coarse,
    grow_fine_direct,
    grow_structure,
    refine_fine,
    seed_block,
    upsample_coarse,
)
from .pipeline import (
    CHECKPOINT_NAMES,
    CODEC_NAME,
    GrowthModels,
    GrowthOutcome,
    StageError,
    finish_world,
    generate_world,
    refine_world,
)

__all__ = [
    'ExpansionPlan', 'ExpansionStep', 'PlanError', 'plan_expansion',
    'LayerState', 'StepRecord', 'WorldState', 'region_sha256', 'step_seed',
    'fine_plan', 'grow_appearance', 'grow_coarse', 'grow_fine_direct', 'grow_structure',
    'refine_fine', 'seed_block', 'upsample_coarse',
    'CHECKPOINT_NAMES', 'CODEC_NAME', 'GrowthModels', 'GrowthOutcome', 'StageError',
    'finish_world', 'generate_world', 'refine_world',
]
