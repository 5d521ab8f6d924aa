"""
Flow-Matching Training mit Inpainting-Eingaben

Jeder Schritt zieht Batch, t und Rauschen aus default_rng([seed, step]); ein
vom Checkpoint fortgesetzter Lauf setzt denselben Strom exakt fort.
"""
import logging
import math
from dataclasses import dataclass, field
from typing import List, Optional, Sequence

import numpy as np

from ..inpaint.conditioning import assemble_condition
from .model import GeneratorModel
from .optim import AdamW
from .tokens import add_noise, flow_target

logger = logging.getLogger(__name__)

LOG_INTERVAL = 100


class TrainingDivergedError(RuntimeError):
    """Loss nicht mehr endlich"""

    def __init__(self, step: int, losses: List[float]):
        self.step = step
        self.losses = list(losses)
        super().__init__(f"Training diverged at step {step} (loss {losses[-1] if losses else 'n/a'})")


@dataclass(frozen=True)
class TrainingExample:
    """
    Attributes:
        tokens: (L, C) saubere Tokens
        mask: (L, 1) 1 = zu erzeugender Bereich
        positions: (L, 3) in [0, 1]
    """
    tokens: np.ndarray
    mask: np.ndarray
    positions: np.ndarray

    def __post_init__(self):
        tokens = np.asarray(self.tokens, dtype=np.float64)
        mask = np.asarray(self.mask, dtype=np.float64).reshape(-1, 1)
        if tokens.ndim != 2 or tokens.shape[0] == 0:
            raise ValueError(f"Training example needs a non-empty (L, C) token matrix, got {tokens.shape}")
        if mask.shape[0] != tokens.shape[0]:
            raise ValueError(f"Mask has {mask.shape[0]} rows for {tokens.shape[0]} tokens")
        object.__setattr__(self, "tokens", tokens)
        object.__setattr__(self, "mask", mask)
        object.__setattr__(self, "positions", np.asarray(self.positions, dtype=np.float64))


@dataclass
class TrainingResult:
    model: GeneratorModel
    optimizer: AdamW
    losses: List[float] = field(default_factory=list)


@dataclass(frozen=True)
class StepBatch:
    """Modell-Eingaben und Ziele für einen Optimierungsschritt"""
    inputs: List[np.ndarray]
    targets: List[np.ndarray]


def draw_batch(
    model: GeneratorModel,
    dataset: Sequence[TrainingExample],
    condition: np.ndarray,
    seed: int,
    step: int,
    batch: int,
) -> StepBatch:
    rng = np.random.default_rng([seed, step])
    picks = rng.integers(0, len(dataset), size=batch)
    inputs, targets = [], []
    for i in picks:
        ex = dataset[int(i)]
        t = float(rng.uniform(0.0, 1.0))
        eps = rng.standard_normal(ex.tokens.shape)
        noisy = add_noise(ex.tokens, t, eps)
        bundle = assemble_condition(noisy, ex.mask, ex.tokens).concat()
        inputs.append(model.features(bundle, ex.positions, t, condition))
        targets.append(flow_target(ex.tokens, eps))
    return StepBatch(inputs, targets)


def batch_loss(model: GeneratorModel, batch: StepBatch):
    """Mittlerer Loss pro Beispiel; Gradienten in Sample-Reihenfolge summiert"""
    weight = 1.0 / len(batch.inputs)
    total = 0.0
    grads = None
    for x, y in zip(batch.inputs, batch.targets):
        loss, g = model.loss_and_grads(x, y, weight)
        total += loss
        if grads is None:
            grads = g
        else:
            for k in grads:
                grads[k] += g[k]
    return total, grads


def train(
    model: GeneratorModel,
    dataset: Sequence[TrainingExample],
    steps: int,
    lr: float = 1e-4,
    seed: int = 0,
    condition: Optional[np.ndarray] = None,
    batch: int = 4,
    optimizer: Optional[AdamW] = None,
    start_step: int = 0,
    weight_decay: float = 0.01,
) -> TrainingResult:
    """
    Trainiert das Modell in-place

    Args:
        model: Generator (wird verändert)
        dataset: Trainingsbeispiele, nicht leer
        steps: Anzahl Optimierungsschritte ab start_step
        lr: Lernrate (der Default 1e-4 konvergiert auf CPU nur langsam, Toy-Läufe nutzen 1e-2)
        seed: Seed des Batch-Streams
        optimizer: vorhandener Optimizer-Zustand zum Fortsetzen

    Returns:
        TrainingResult mit Loss pro Schritt

    Raises:
        TrainingDivergedError: Loss nicht endlich
    """
    if not dataset:
        raise ValueError("Training dataset is empty")
    if condition is None:
        condition = np.zeros(model.cond_len)
    opt = optimizer or AdamW(lr=lr, weight_decay=weight_decay)
    losses: List[float] = []
    for step in range(start_step, start_step + steps):
        loss, grads = batch_loss(model, draw_batch(model, dataset, condition, seed, step, batch))
        losses.append(loss)
        if not math.isfinite(loss):
            raise TrainingDivergedError(step, losses)
        opt.step(model.params, grads)
        if (step + 1) % LOG_INTERVAL == 0:
            recent = losses[-LOG_INTERVAL:]
            logger.info(f"{model.stage.name} Schritt {step + 1}: Loss {np.mean(recent):.5f}")
    return TrainingResult(model=model, optimizer=opt, losses=losses)
