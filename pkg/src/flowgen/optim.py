"""AdamW mit entkoppeltem Weight Decay, Zustand in float32 darstellbar"""
from dataclasses import dataclass, field
from typing import Dict

import numpy as np

from .model import as_float32_values


@dataclass
class AdamW:
    lr: float = 1e-4
    beta1: float = 0.9
    beta2: float = 0.999
    eps: float = 1e-8
    weight_decay: float = 0.01
    step_count: int = 0
    m: Dict[str, np.ndarray] = field(default_factory=dict)
    v: Dict[str, np.ndarray] = field(default_factory=dict)

    def step(self, params: Dict[str, np.ndarray], grads: Dict[str, np.ndarray]) -> None:
        """Aktualisiert params in-place; der Zustand wird danach auf float32 gerundet"""
        self.step_count += 1
        k = self.step_count
        for name in sorted(params):
            g = grads[name]
            m = self.m.get(name, np.zeros_like(g))
            v = self.v.get(name, np.zeros_like(g))
            m = self.beta1 * m + (1.0 - self.beta1) * g
            v = self.beta2 * v + (1.0 - self.beta2) * g * g
            m_hat = m / (1.0 - self.beta1 ** k)
            v_hat = v / (1.0 - self.beta2 ** k)
            p = params[name] * (1.0 - self.lr * self.weight_decay)
            p = p - self.lr * m_hat / (np.sqrt(v_hat) + self.eps)
            params[name] = as_float32_values(p)
            self.m[name] = as_float32_values(m)
            self.v[name] = as_float32_values(v)
