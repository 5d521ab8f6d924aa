"""
Struktur- und Latent-Inpainting

Beide Operationen sampeln mit dem Bundle [noisy | mask | known] und
überschreiben danach den bekannten Bereich mit dem Eingabe-Inhalt; bekannte
Voxel und Latents kommen bitidentisch zurück.
"""
import logging
from typing import Optional, Union

import numpy as np

from ..codec.linear import LatentBlock
from ..flowgen.model import GeneratorModel, ModelStage
from ..flowgen.sampler import sample
from ..flowgen.tokens import mask_tokens, patchify, unpatchify, voxel_tokens
from ..voxcore import BlockFrame, DenseMask, SparseGrid, SparseMask

logger = logging.getLogger(__name__)

OCCUPANCY_THRESHOLD = 0.5


def _mask_bits(mask: Union[DenseMask, np.ndarray], shape) -> np.ndarray:
    bits = mask.bits if isinstance(mask, DenseMask) else np.asarray(mask, dtype=bool)
    if bits.shape != tuple(shape):
        raise ValueError(f"Mask shape {bits.shape} does not match volume {tuple(shape)}")
    return bits


def inpaint_structure(
    model: GeneratorModel,
    known: np.ndarray,
    mask: Union[DenseMask, np.ndarray],
    condition: np.ndarray,
    seed: int,
    steps: int = 50,
    patch: int = 4,
    reference: Optional[np.ndarray] = None,
    t_start: float = 1.0,
) -> np.ndarray:
    """
    Vervollständigt den maskierten Teil eines Belegungsvolumens

    Args:
        model: Struktur-Generator
        known: (N, N, N) Belegung; gelesen werden nur Voxel mit Maske 0
        mask: 1 = erzeugen
        reference: optionales Startvolumen, auf t_start verrauscht statt reinem Rauschen

    Returns:
        (N, N, N) bool Belegung
    """
    if not model.stage.is_structure:
        raise ValueError(f"{model.stage.name} is not a structure generator")
    known = np.asarray(known) >= OCCUPANCY_THRESHOLD
    bits = _mask_bits(mask, known.shape)
    n = known.shape[0]
    if model.c_out != patch ** 3:
        raise ValueError(f"Model token width {model.c_out} does not match patch {patch}^3")
    if not bits.any():
        return known.copy()

    known_tokens = patchify(np.where(bits, 0.0, known.astype(np.float64)), patch)
    ref_tokens = None if reference is None else patchify(np.asarray(reference, dtype=np.float64), patch).tokens
    tokens = sample(
        model, known_tokens.positions, condition, steps, seed,
        mask=mask_tokens(bits, patch), known=known_tokens.tokens,
        reference=ref_tokens, t_start=t_start,
    )
    generated = unpatchify(tokens, n, patch) >= OCCUPANCY_THRESHOLD
    return np.where(bits, generated, known)


def inpaint_latent(
    model: GeneratorModel,
    structure: SparseGrid,
    known_latents: SparseGrid,
    mask: SparseMask,
    condition: np.ndarray,
    seed: int,
    steps: int = 50,
    frame: Optional[BlockFrame] = None,
) -> LatentBlock:
    """
    Füllt Latents auf den maskierten aktiven Voxeln einer Struktur

    Voxel der Struktur ohne Maskeneintrag werden erzeugt. Jeder unmaskierte
    Voxel braucht einen bekannten Latent.

    Raises:
        ValueError: Maskenkoordinate außerhalb der Struktur oder bekannter Latent fehlt
    """
    if model.stage is not ModelStage.FINE_LATENT:
        raise ValueError(f"{model.stage.name} is not a latent generator")
    channels = model.c_out
    if not len(structure):
        return LatentBlock(frame, SparseGrid.empty(structure.resolution, structure.cell_size, channels))

    where = structure.lookup(mask.coords)
    if np.any(where < 0):
        bad = mask.coords[where < 0][0]
        raise ValueError(f"Mask coordinate {tuple(int(v) for v in bad)} is not an active structure voxel")
    gen = np.ones(len(structure), dtype=bool)
    gen[where] = mask.bits

    known = np.zeros((len(structure), channels), dtype=np.float64)
    keep = ~gen
    if np.any(keep):
        src = known_latents.lookup(structure.coords[keep])
        if np.any(src < 0):
            raise ValueError(f"{int(np.sum(src < 0))} unmasked voxels have no known latent")
        if known_latents.channels != channels:
            raise ValueError(f"Known latents have {known_latents.channels} channels, model expects {channels}")
        known[keep] = known_latents.features[src].astype(np.float64)

    if np.any(gen):
        positions = voxel_tokens(structure).positions
        tokens = sample(model, positions, condition, steps, seed, mask=gen.astype(np.float64)[:, None], known=known)
        out = np.where(gen[:, None], tokens, known)
    else:
        out = known
    latents = SparseGrid(structure.resolution, structure.cell_size, structure.coords, out.astype(np.float32))
    return LatentBlock(frame, latents)
