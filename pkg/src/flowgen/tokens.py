"""
Token-Mengen und der gerade Rauschpfad

Struktur-Stufe: das dichte N³ Belegungsvolumen wird in p³ Patches zerlegt,
ein Token pro Patch (C' = p³). Latent-Stufe: ein Token pro aktivem Voxel.
"""
from dataclasses import dataclass

import numpy as np

from ..voxcore import SparseGrid


@dataclass(frozen=True)
class TokenSet:
    """
    Attributes:
        tokens: (L, C) float64
        positions: (L, 3) Token-Mitten in [0, 1]^3
    """
    tokens: np.ndarray
    positions: np.ndarray

    def __post_init__(self):
        tokens = np.asarray(self.tokens, dtype=np.float64)
        positions = np.asarray(self.positions, dtype=np.float64)
        if tokens.ndim != 2 or positions.shape != (tokens.shape[0], 3):
            raise ValueError(f"tokens {tokens.shape} and positions {positions.shape} do not form a token set")
        object.__setattr__(self, "tokens", tokens)
        object.__setattr__(self, "positions", positions)

    def __len__(self) -> int:
        return self.tokens.shape[0]

    @property
    def channels(self) -> int:
        return self.tokens.shape[1]

    def with_tokens(self, tokens: np.ndarray) -> "TokenSet":
        return TokenSet(tokens, self.positions)


def _check_shapes(a: np.ndarray, b: np.ndarray) -> None:
    if a.shape != b.shape:
        raise ValueError(f"Shape mismatch: {a.shape} vs {b.shape}")


def add_noise(l0: np.ndarray, t: float, eps: np.ndarray) -> np.ndarray:
    """(1 - t) * l0 + t * eps; an beiden Endpunkten exakt"""
    l0 = np.asarray(l0, dtype=np.float64)
    eps = np.asarray(eps, dtype=np.float64)
    _check_shapes(l0, eps)
    if not 0.0 <= t <= 1.0:
        raise ValueError(f"t must lie in [0, 1], got {t}")
    if t == 0.0:
        return l0.copy()
    if t == 1.0:
        return eps.copy()
    return (1.0 - t) * l0 + t * eps


def flow_target(l0: np.ndarray, eps: np.ndarray) -> np.ndarray:
    """Geschwindigkeit des Rauschpfads: eps - l0"""
    l0 = np.asarray(l0, dtype=np.float64)
    eps = np.asarray(eps, dtype=np.float64)
    _check_shapes(l0, eps)
    return eps - l0


def patch_positions(resolution: int, patch: int) -> np.ndarray:
    g = resolution // patch
    idx = np.stack(np.meshgrid(np.arange(g), np.arange(g), np.arange(g), indexing="ij"), axis=-1).reshape(-1, 3)
    return (idx + 0.5) / g


def patchify(volume: np.ndarray, patch: int) -> TokenSet:
    """(N, N, N) Volumen -> ((N/p)^3, p^3) Tokens in lexikographischer Patch-Reihenfolge"""
    volume = np.asarray(volume, dtype=np.float64)
    n = volume.shape[0]
    if volume.shape != (n, n, n) or n % patch:
        raise ValueError(f"Volume {volume.shape} cannot be split into {patch}^3 patches")
    g = n // patch
    t = volume.reshape(g, patch, g, patch, g, patch).transpose(0, 2, 4, 1, 3, 5).reshape(g ** 3, patch ** 3)
    return TokenSet(t, patch_positions(n, patch))


def unpatchify(tokens: np.ndarray, resolution: int, patch: int) -> np.ndarray:
    g = resolution // patch
    tokens = np.asarray(tokens, dtype=np.float64)
    if tokens.shape != (g ** 3, patch ** 3):
        raise ValueError(f"Token matrix {tokens.shape} does not match {resolution}^3 with patch {patch}")
    return tokens.reshape(g, g, g, patch, patch, patch).transpose(0, 3, 1, 4, 2, 5).reshape(
        resolution, resolution, resolution
    )


def voxel_tokens(grid: SparseGrid) -> TokenSet:
    """Ein Token pro aktivem Voxel, Position = normierte Voxelmitte"""
    res = np.asarray(grid.resolution, dtype=np.float64)
    return TokenSet(grid.features.astype(np.float64), (grid.coords + 0.5) / res)


def mask_tokens(mask_volume: np.ndarray, patch: int) -> np.ndarray:
    """(L', 1) Patch-Maske: 1, sobald ein Voxel im Patch maskiert ist"""
    patched = patchify(np.asarray(mask_volume, dtype=np.float64), patch).tokens
    return (patched.mean(axis=1, keepdims=True) > 0).astype(np.float64)
