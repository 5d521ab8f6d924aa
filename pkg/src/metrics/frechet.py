"""
Fréchet-Distanz auf handgebauten Block-Deskriptoren

Gekennzeichnetes Surrogat für FID-Werte auf gelernten Features; die Werte
sind nur untereinander vergleichbar.
"""
from dataclasses import dataclass
from typing import Sequence

import numpy as np
from scipy import linalg

from ..voxcore import SparseGrid

HEIGHT_BINS = 8
DESCRIPTOR_DIM = 1 + 3 + 6 + HEIGHT_BINS
REGULARIZATION = 1e-6


@dataclass(frozen=True)
class FrechetResult:
    score: float
    regularized: bool


def block_descriptor(block: SparseGrid) -> np.ndarray:
    """
    18-dim Deskriptor: Belegungsanteil, Schwerpunkt, zweite Momente
    (xx, yy, zz, xy, xz, yz), Höhen-Histogramm mit 8 Bins

    Koordinaten sind Voxelmitten, normiert auf die Block-Auflösung.
    """
    res = np.asarray(block.resolution, dtype=np.float64)
    out = np.zeros(DESCRIPTOR_DIM)
    if not len(block):
        return out
    p = (block.coords.astype(np.float64) + 0.5) / res
    out[0] = len(block) / float(np.prod(res))
    out[1:4] = p.mean(axis=0)
    x, y, z = p[:, 0], p[:, 1], p[:, 2]
    out[4:10] = [np.mean(x * x), np.mean(y * y), np.mean(z * z),
                 np.mean(x * y), np.mean(x * z), np.mean(y * z)]
    hist, _ = np.histogram(z, bins=HEIGHT_BINS, range=(0.0, 1.0))
    out[10:] = hist / len(block)
    return out


def _needs_regularization(cov: np.ndarray) -> bool:
    eig = np.linalg.eigvalsh(cov)
    return bool(eig.min() <= 1e-12 * max(float(eig.max()), 1.0))


def frechet_distance(x: np.ndarray, y: np.ndarray) -> FrechetResult:
    """Fréchet-Distanz zwischen Gauß-Fits zweier (n, d) Feature-Mengen"""
    x = np.atleast_2d(np.asarray(x, dtype=np.float64))
    y = np.atleast_2d(np.asarray(y, dtype=np.float64))
    if x.shape[0] < 2 or y.shape[0] < 2:
        raise ValueError(f"Need >= 2 samples per set, got {x.shape[0]} and {y.shape[0]}")
    if x.shape[1] != y.shape[1]:
        raise ValueError(f"Feature dimension mismatch: {x.shape[1]} vs {y.shape[1]}")
    mu_g, mu_r = x.mean(axis=0), y.mean(axis=0)
    sig_g = np.atleast_2d(np.cov(x, rowvar=False))
    sig_r = np.atleast_2d(np.cov(y, rowvar=False))
    regularized = _needs_regularization(sig_g) or _needs_regularization(sig_r)
    if regularized:
        eye = REGULARIZATION * np.eye(sig_g.shape[0])
        sig_g, sig_r = sig_g + eye, sig_r + eye

    root_r = linalg.sqrtm(sig_r)
    if np.iscomplexobj(root_r):
        root_r = root_r.real
    inner = linalg.sqrtm(root_r @ sig_g @ root_r)
    if np.iscomplexobj(inner):
        inner = inner.real
    diff = mu_g - mu_r
    score = float(diff @ diff + np.trace(sig_g) + np.trace(sig_r) - 2.0 * np.trace(inner))
    return FrechetResult(max(score, 0.0), regularized)


def frechet_surrogate(s_g: Sequence[SparseGrid], s_r: Sequence[SparseGrid]) -> FrechetResult:
    return frechet_distance(
        np.stack([block_descriptor(b) for b in s_g]) if len(s_g) else np.zeros((0, DESCRIPTOR_DIM)),
        np.stack([block_descriptor(b) for b in s_r]) if len(s_r) else np.zeros((0, DESCRIPTOR_DIM)),
    )
