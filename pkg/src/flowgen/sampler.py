"""
Euler-Sampler entlang des geraden Rauschpfads

x(t - dt) = x(t) - dt * v(x(t), t), von t_start bis 0 in gleichen Schritten.
Bekannte Tokens wirken nur über das Bedingungs-Bundle; das Überschreiben des
bekannten Bereichs übernimmt das Inpainting nach dem letzten Schritt.
"""
from typing import Callable, Optional

import numpy as np

from ..inpaint.conditioning import assemble_condition
from .model import GeneratorModel
from .tokens import add_noise

Velocity = Callable[[np.ndarray, float], np.ndarray]


class NonFiniteSampleError(RuntimeError):
    """Sampler-Zustand ist NaN oder unendlich geworden"""

    def __init__(self, step: int, t: float):
        self.step = step
        self.t = t
        super().__init__(f"Sampler state non-finite at step {step} (t={t:.4f})")


def euler_integrate(velocity: Velocity, x_start: np.ndarray, steps: int, t_start: float = 1.0) -> np.ndarray:
    if steps < 1:
        raise ValueError(f"steps must be >= 1, got {steps}")
    ts = np.linspace(t_start, 0.0, steps + 1)
    x = np.asarray(x_start, dtype=np.float64).copy()
    for k in range(steps):
        dt = ts[k] - ts[k + 1]
        x = x - dt * velocity(x, float(ts[k]))
        if not np.all(np.isfinite(x)):
            raise NonFiniteSampleError(k, float(ts[k]))
    return x


def model_velocity(
    model: GeneratorModel,
    positions: np.ndarray,
    condition: np.ndarray,
    mask: Optional[np.ndarray] = None,
    known: Optional[np.ndarray] = None,
) -> Velocity:
    """Verpackt das Modell als v(x, t) mit festem Inpainting-Bundle"""
    n = positions.shape[0]
    m = np.ones((n, 1)) if mask is None else np.asarray(mask, dtype=np.float64).reshape(n, 1)
    clean = np.zeros((n, model.c_out)) if known is None else np.asarray(known, dtype=np.float64)

    def velocity(x: np.ndarray, t: float) -> np.ndarray:
        return model(assemble_condition(x, m, clean).concat(), positions, t, condition)

    return velocity


def sample(
    model: GeneratorModel,
    positions: np.ndarray,
    condition: np.ndarray,
    steps: int = 50,
    seed: int = 0,
    mask: Optional[np.ndarray] = None,
    known: Optional[np.ndarray] = None,
    reference: Optional[np.ndarray] = None,
    t_start: float = 1.0,
) -> np.ndarray:
    """
    Zieht Tokens für die gegebenen Positionen

    Mit reference startet die Kette bei add_noise(reference, t_start, eps)
    statt bei reinem Rauschen (Refinement).
    """
    positions = np.asarray(positions, dtype=np.float64)
    if not 0.0 < t_start <= 1.0:
        raise ValueError(f"t_start must lie in (0, 1], got {t_start}")
    eps = np.random.default_rng(seed).standard_normal((positions.shape[0], model.c_out))
    x0 = eps if reference is None else add_noise(reference, t_start, eps)
    return euler_integrate(model_velocity(model, positions, condition, mask, known), x0, steps, t_start)
