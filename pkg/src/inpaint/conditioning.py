"""
Inpainting-Bedingung: [noisy | mask | known] entlang der Kanal-Achse
"""
from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class ConditioningBundle:
    """
    Attributes:
        noisy: (L, C) Tokens auf dem aktuellen Rauschlevel
        mask: (L, 1) 1 = erzeugen, 0 = bekannt
        known: (L, C) saubere Tokens, maskierter Teil auf null
    """
    noisy: np.ndarray
    mask: np.ndarray
    known: np.ndarray

    @property
    def channels(self) -> int:
        return 2 * self.noisy.shape[1] + 1

    def concat(self) -> np.ndarray:
        return np.concatenate([self.noisy, self.mask, self.known], axis=1)

    @classmethod
    def split(cls, stacked: np.ndarray) -> "ConditioningBundle":
        stacked = np.asarray(stacked, dtype=np.float64)
        if stacked.ndim != 2 or stacked.shape[1] % 2 != 1:
            raise ValueError(f"Bundle matrix {stacked.shape} has no [noisy | mask | known] layout")
        c = (stacked.shape[1] - 1) // 2
        return cls(stacked[:, :c], stacked[:, c:c + 1], stacked[:, c + 1:])


def assemble_condition(noisy: np.ndarray, mask: np.ndarray, clean: np.ndarray) -> ConditioningBundle:
    """
    Baut das Bundle; known = clean * (1 - mask)

    Raises:
        ValueError: Formen passen nicht oder Maske nicht binär
    """
    noisy = np.asarray(noisy, dtype=np.float64)
    clean = np.asarray(clean, dtype=np.float64)
    mask = np.asarray(mask, dtype=np.float64)
    if mask.ndim == 1:
        mask = mask[:, None]
    if noisy.shape != clean.shape:
        raise ValueError(f"Noisy {noisy.shape} and clean {clean.shape} tokens differ in shape")
    if mask.shape != (noisy.shape[0], 1):
        raise ValueError(f"Mask shape {mask.shape}, expected {(noisy.shape[0], 1)}")
    if not np.all((mask == 0.0) | (mask == 1.0)):
        raise ValueError("Mask must be binary")
    known = np.where(mask == 1.0, 0.0, clean)
    return ConditioningBundle(noisy, mask, known)
