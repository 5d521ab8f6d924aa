"""
Codec-Ablation auf Szenen-Blöcken

Vier Varianten: {naive, verdeckungsbewusste} Aggregation x {fester,
neu trainierter} Decoder, jeweils auf Held-out Blöcken per Feature-MSE und
Farb-PSNR gegen die echten Voxel-Features bewertet.
"""
import logging
import math
from typing import Dict, List, Sequence

import numpy as np
import pandas as pd

from ..render import lift_block
from ..voxcore import SparseGrid
from .linear import decode, encode, fit_on_blocks, fixed_orthonormal

logger = logging.getLogger(__name__)


def _lift_all(blocks: Sequence[SparseGrid], occlusion_aware: bool, render_kwargs: Dict) -> List[SparseGrid]:
    return [lift_block(b, occlusion_aware=occlusion_aware, **render_kwargs).grid for b in blocks]


def _scores(lifted: Sequence[SparseGrid], truth: Sequence[SparseGrid], params) -> Dict[str, float]:
    err, rgb_err, n = 0.0, 0.0, 0
    for a, b in zip(lifted, truth):
        if not len(b):
            continue
        out, _ = decode(encode(a, params), params)
        diff = out.features.astype(np.float64) - b.features.astype(np.float64)
        err += float(np.sum(diff ** 2)) / diff.shape[1]
        rgb_err += float(np.sum(diff[:, :3] ** 2)) / 3.0
        n += diff.shape[0]
    mse = err / n if n else 0.0
    rgb_mse = rgb_err / n if n else 0.0
    psnr = math.inf if rgb_mse == 0.0 else 10.0 * math.log10(1.0 / rgb_mse)
    return {"mse": mse, "psnr": psnr, "voxels": n}


def run_codec_ablation(
    train_blocks: Sequence[SparseGrid],
    heldout_blocks: Sequence[SparseGrid],
    latent_channels: int = 8,
    seed: int = 1,
    **render_kwargs,
) -> pd.DataFrame:
    """
    Returns:
        DataFrame mit den Spalten aggregation, decoder, mse, psnr, voxels
    """
    if not train_blocks or not heldout_blocks:
        raise ValueError("Codec ablation needs training and held-out blocks")
    channels = train_blocks[0].channels
    rows = []
    for aware in (False, True):
        label = "occlusion_aware" if aware else "naive"
        train_lifted = _lift_all(train_blocks, aware, render_kwargs)
        held_lifted = _lift_all(heldout_blocks, aware, render_kwargs)
        variants = {
            "fixed": fixed_orthonormal(channels, latent_channels, seed),
            "retrained": fit_on_blocks(train_lifted, train_blocks, latent_channels, seed),
        }
        for decoder_name, params in variants.items():
            row = {"aggregation": label, "decoder": decoder_name}
            row.update(_scores(held_lifted, heldout_blocks, params))
            rows.append(row)
            logger.info(f"Ablation {label}/{decoder_name}: MSE {row['mse']:.5f}, PSNR {row['psnr']:.2f} dB")
    return pd.DataFrame(rows, columns=["aggregation", "decoder", "mse", "psnr", "voxels"])
