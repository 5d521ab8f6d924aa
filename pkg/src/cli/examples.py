"""
Trainingsbeispiele für die drei Generatoren

Struktur-Stufen trainieren auf gepatchter Belegung mit Quadranten-Masken plus
einer voll maskierten Kopie pro Block (Fall des Startblocks). Die Latent-Stufe
liftet jeden fine Block aus gerenderten Ansichten, kodiert ihn mit dem Codec
und maskiert die aktiven Voxel per Quadranten-Schnitt.
"""
import logging
from dataclasses import dataclass
from pathlib import Path
from typing import List, Sequence, Tuple, Union

import numpy as np
import pandas as pd

from ..codec import CodecParams, encode, fit_on_blocks, fixed_orthonormal
from ..flowgen import TrainingExample, mask_tokens, patchify, voxel_tokens
from ..grow.state import step_seed
from ..inpaint import make_training_masks
from ..render import lift_block
from ..utils.config import RunConfig
from ..voxcore import BlockFrame, Box, SparseGrid, crop

logger = logging.getLogger(__name__)

LATENT_MANIFEST = "latent_manifest.csv"
MASK_LAYER = 7


def occupancy_volume(block: SparseGrid) -> np.ndarray:
    volume = np.zeros(block.resolution, dtype=np.float64)
    if len(block):
        volume[tuple(block.coords.T)] = 1.0
    return volume


def structure_examples(blocks: Sequence[SparseGrid], frame: BlockFrame, patch: int, seed: int) -> List[TrainingExample]:
    examples = []
    for k, block in enumerate(blocks):
        tokens = patchify(occupancy_volume(block), patch)
        m_s, _, _ = make_training_masks(frame, step_seed(seed, MASK_LAYER, k))
        examples.append(TrainingExample(tokens.tokens, mask_tokens(m_s.bits, patch), tokens.positions))
        examples.append(TrainingExample(tokens.tokens, np.ones((len(tokens), 1)), tokens.positions))
    return examples


@dataclass
class LatentData:
    examples: List[TrainingExample]
    codec: CodecParams
    manifest: pd.DataFrame


def latent_examples(
    blocks: Sequence[SparseGrid],
    cfg: RunConfig,
    frame: BlockFrame,
    seed: int,
    out_dir: Union[str, Path, None] = None,
) -> LatentData:
    """
    Liftet, fittet oder baut den Codec, kodiert und maskiert jeden nicht leeren fine Block

    Raises:
        ValueError: kein nicht leerer Block zum Trainieren
    """
    blocks = [b for b in blocks if len(b)]
    if not blocks:
        raise ValueError("No non-empty fine blocks for the latent stage")
    r = cfg.render
    lifts = [
        lift_block(b, r.views, r.image_size, r.radius_factor, r.tau_factor, occlusion_aware=True,
                   dump_dir=(Path(out_dir) / "views" / f"block_{k:04d}") if (out_dir and r.dump_ppm) else None)
        for k, b in enumerate(blocks)
    ]
    lifted = [lift.grid for lift in lifts]
    if cfg.codec.mode == "trained_linear":
        codec = fit_on_blocks(lifted, blocks, cfg.block.latent_channels, cfg.codec.seed)
    else:
        codec = fixed_orthonormal(blocks[0].channels, cfg.block.latent_channels, cfg.codec.seed)

    examples, rows = [], []
    for k, (block, lift) in enumerate(zip(blocks, lifts)):
        latents = encode(lift.grid, codec, frame).latents
        tokens = voxel_tokens(latents)
        _, m_l, _ = make_training_masks(frame, step_seed(seed, MASK_LAYER, k), active=latents)
        examples.append(TrainingExample(tokens.tokens, m_l.bits.astype(np.float64)[:, None], tokens.positions))
        rows.append({"block": k, "active_voxels": len(block), "unseen_voxels": lift.unseen_count})
    manifest = pd.DataFrame(rows, columns=["block", "active_voxels", "unseen_voxels"])
    unseen = int(manifest["unseen_voxels"].sum())
    if unseen:
        logger.warning(f"{unseen} Voxel ohne Sichtbarkeit in den Latent-Trainingsblöcken")
    return LatentData(examples, codec, manifest)


def block_frame(cfg: RunConfig, coarse: bool) -> BlockFrame:
    n = cfg.block.resolution
    h = cfg.curation.house_height
    return BlockFrame.coarse(h, n) if coarse else BlockFrame.fine(h, n)


def split_world_blocks(grid: SparseGrid, resolution: int) -> List[Tuple[Tuple[int, int], SparseGrid]]:
    """Nicht leere N x N Spalten eines Weltgitters, zeilenweise"""
    nx, ny = grid.resolution[0] // resolution, grid.resolution[1] // resolution
    out = []
    for j in range(ny):
        for i in range(nx):
            lo = (i * resolution, j * resolution, 0)
            block = crop(grid, Box(lo, (lo[0] + resolution, lo[1] + resolution, grid.resolution[2])))
            if len(block):
                out.append(((i, j), block))
    return out
