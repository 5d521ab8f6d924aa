"""
Pytest Fixtures und Konfiguration
"""
import sys
from pathlib import Path

import numpy as np
import pytest

# Add project root to path
sys.path.insert(0, str(Path(__file__).parent.parent))

from src.cli.examples import structure_examples
from src.flowgen import GeneratorModel, ModelStage, condition_vector, train
from src.utils.config import RunConfig
from src.voxcore import BlockFrame, SparseGrid


@pytest.fixture
def unit_cell():
    """Isotrope Zellgröße 1 m"""
    return (1.0, 1.0, 1.0)


@pytest.fixture
def dense_cube(unit_cell):
    """Vollständig belegtes 4³ Gitter"""
    coords = np.argwhere(np.ones((4, 4, 4), dtype=bool))
    return SparseGrid.occupancy_of((4, 4, 4), unit_cell, coords)


@pytest.fixture
def single_voxel(unit_cell):
    """Ein roter Voxel in einem 3³ Gitter"""
    feats = np.array([[1.0, 0.0, 0.0, 0.0, 0.0, 1.0]], dtype=np.float32)
    return SparseGrid((3, 3, 3), unit_cell, np.array([[1, 1, 1]]), feats)


@pytest.fixture
def feature_block():
    """8³ Block mit Boden und einer farbigen Wand"""
    coords, feats = [], []
    for x in range(8):
        for y in range(8):
            coords.append((x, y, 0))
            feats.append((0.6, 0.6, 0.6, 0.0, 0.0, 1.0))
    for y in range(8):
        for z in range(1, 6):
            coords.append((0, y, z))
            feats.append((0.9, 0.2, 0.1, 1.0, 0.0, 0.0))
    return SparseGrid((8, 8, 8), (0.375, 0.375, 0.375), np.array(coords), np.array(feats))


@pytest.fixture
def tiny_config(tmp_path):
    """Kleine, schnelle Lauf-Konfiguration (N = 8)"""
    return RunConfig.model_validate({
        "world_seed": 7,
        "rooms": 1,
        "block": {"resolution": 8, "patch_size": 4, "latent_channels": 8},
        "curation": {"fine_count": 3, "coarse_count": 2, "threshold": 0.5},
        "training": {"steps": 3, "batch": 2, "hidden": 8, "blocks": 2},
        "sampler": {"steps": 2, "t_prime": 0.5},
        "growth": {"extent_x": 1, "extent_y": 1},
        "render": {"views": 6, "image_size": 12},
        "metrics": {"points": 32, "reference_blocks": 4},
        "paths": {"root": str(tmp_path / "run")},
    })


@pytest.fixture
def condition():
    """Fester Bedingungsvektor"""
    return condition_vector(16, 0)


@pytest.fixture
def structure_model():
    """Untrainierter Struktur-Generator für 8³ Blöcke mit Patch 4"""
    return GeneratorModel(ModelStage.FINE_STRUCTURE, 64, hidden=8, cond_len=16, seed=1)


@pytest.fixture
def coarse_model():
    """Untrainierter coarse Struktur-Generator"""
    return GeneratorModel(ModelStage.COARSE_STRUCTURE, 64, hidden=8, cond_len=16, seed=2)


@pytest.fixture
def latent_model():
    """Untrainierter Latent-Generator (C_z = 8)"""
    return GeneratorModel(ModelStage.FINE_LATENT, 8, hidden=8, cond_len=16, seed=3)


@pytest.fixture(scope="session")
def slab_model():
    """Struktur-Generator, 400 Schritte auf Bodenplatten trainiert"""
    coords = np.array([(x, y, 0) for x in range(8) for y in range(8)])
    slab = SparseGrid.occupancy_of((8, 8, 8), (0.375, 0.375, 0.375), coords)
    examples = structure_examples([slab] * 4, BlockFrame.fine(3.0, 8), 4, seed=5)
    model = GeneratorModel(ModelStage.FINE_STRUCTURE, 64, hidden=16, cond_len=16, seed=1)
    train(model, examples, 400, lr=1e-2, seed=2, condition=condition_vector(16, 0), batch=2)
    return model
