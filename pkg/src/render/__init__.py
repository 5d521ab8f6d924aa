"""Raycasting & Feature Lifting Package"""
from .camera import CameraPose, rig_directions, view_rig
from .raycast import CameraInsideVoxelError, DepthMap, ViewFeatureMap, raycast_depth, voxel_entry_depth
from .lift import LiftResult, aggregate_features, default_tau, lift_block, render_views, visibility_mask
from .ppm import dump_views, write_ppm

__all__ = [
    'CameraPose', 'rig_directions', 'view_rig',
    'CameraInsideVoxelError', 'DepthMap', 'ViewFeatureMap', 'raycast_depth', 'voxel_entry_depth',
    'LiftResult', 'aggregate_features', 'default_tau', 'lift_block', 'render_views', 'visibility_mask',
    'dump_views', 'write_ppm',
]
