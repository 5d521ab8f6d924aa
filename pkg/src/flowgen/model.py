"""
Tokenweises Generator-Netz

Zweischichtiges tanh-Perzeptron auf jedem Token. Eingabe pro Token:

    [bundle token | position enc | time enc | condition | mean bundle token]

Das Bundle ist die Verkettung [noisy | mask | known], also C_in = 2 * C + 1
bei Token-Breite C. Gerechnet wird in float64; die Parameter bleiben in
float32 darstellbar, damit Checkpoints bitgenau zurückladen.
"""
from dataclasses import dataclass, field
from enum import Enum
from typing import Dict, Tuple

import numpy as np

POSITION_FEATURES = 9
TIME_FEATURES = 3
PARAM_NAMES = ("W1", "b1", "W2", "b2")


class ModelStage(Enum):
    """Generator-Rollen"""
    COARSE_STRUCTURE = 0
    FINE_STRUCTURE = 1
    FINE_LATENT = 2

    @property
    def is_structure(self) -> bool:
        return self is not ModelStage.FINE_LATENT


def as_float32_values(a: np.ndarray) -> np.ndarray:
    """Rundet auf den nächsten float32-Wert, gespeichert als float64"""
    return np.asarray(a, dtype=np.float32).astype(np.float64)


def position_encoding(positions: np.ndarray) -> np.ndarray:
    p = np.asarray(positions, dtype=np.float64)
    return np.concatenate([p, np.sin(2.0 * np.pi * p), np.cos(2.0 * np.pi * p)], axis=1)


def time_encoding(t: float, count: int) -> np.ndarray:
    enc = np.array([t, np.sin(np.pi * t), np.cos(np.pi * t)], dtype=np.float64)
    return np.broadcast_to(enc, (count, TIME_FEATURES))


def condition_vector(length: int = 16, seed: int = 0) -> np.ndarray:
    """Konstanter Ersatz für die Szenenbeschreibung"""
    return as_float32_values(np.random.default_rng(seed).standard_normal(length) * 0.5)


@dataclass
class GeneratorModel:
    """
    Attributes:
        stage: Rolle des Generators
        c_out: Token-Breite C
        hidden: Breite der versteckten Schicht
        cond_len: Länge des Bedingungsvektors
        seed: Init-Seed
        params: W1 (D, H), b1 (H,), W2 (H, C), b2 (C,)
    """
    stage: ModelStage
    c_out: int
    hidden: int = 64
    cond_len: int = 16
    seed: int = 0
    params: Dict[str, np.ndarray] = field(default_factory=dict, repr=False)

    def __post_init__(self):
        if self.c_out < 1 or self.hidden < 1:
            raise ValueError(f"Invalid model size c_out={self.c_out}, hidden={self.hidden}")
        if not self.params:
            rng = np.random.default_rng(self.seed)
            d = self.input_dim
            self.params = {
                "W1": as_float32_values(rng.standard_normal((d, self.hidden)) / np.sqrt(d)),
                "b1": np.zeros(self.hidden),
                "W2": as_float32_values(rng.standard_normal((self.hidden, self.c_out)) * 0.1 / np.sqrt(self.hidden)),
                "b2": np.zeros(self.c_out),
            }
        self._check_params()

    def _check_params(self) -> None:
        expected = {
            "W1": (self.input_dim, self.hidden),
            "b1": (self.hidden,),
            "W2": (self.hidden, self.c_out),
            "b2": (self.c_out,),
        }
        for name, shape in expected.items():
            if name not in self.params or self.params[name].shape != shape:
                got = None if name not in self.params else self.params[name].shape
                raise ValueError(f"Parameter {name} has shape {got}, expected {shape}")

    @property
    def c_in(self) -> int:
        return 2 * self.c_out + 1

    @property
    def input_dim(self) -> int:
        return 2 * self.c_in + POSITION_FEATURES + TIME_FEATURES + self.cond_len

    @property
    def parameter_count(self) -> int:
        return int(sum(p.size for p in self.params.values()))

    def features(self, bundle: np.ndarray, positions: np.ndarray, t: float, condition: np.ndarray) -> np.ndarray:
        bundle = np.asarray(bundle, dtype=np.float64)
        if bundle.ndim != 2 or bundle.shape[1] != self.c_in:
            raise ValueError(f"Bundle has shape {bundle.shape}, model expects (L, {self.c_in})")
        condition = np.asarray(condition, dtype=np.float64).reshape(-1)
        if condition.size != self.cond_len:
            raise ValueError(f"Condition length {condition.size}, model expects {self.cond_len}")
        n = bundle.shape[0]
        pooled = np.broadcast_to(bundle.mean(axis=0), bundle.shape)
        return np.concatenate([
            bundle,
            position_encoding(positions),
            time_encoding(t, n),
            np.broadcast_to(condition, (n, self.cond_len)),
            pooled,
        ], axis=1)

    def _forward(self, x: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
        p = self.params
        h = np.tanh(x @ p["W1"] + p["b1"])
        return h, h @ p["W2"] + p["b2"]

    def __call__(self, bundle: np.ndarray, positions: np.ndarray, t: float, condition: np.ndarray) -> np.ndarray:
        """Vorhergesagte Geschwindigkeit, Form (L, C)"""
        if bundle.shape[0] == 0:
            return np.zeros((0, self.c_out))
        _, out = self._forward(self.features(bundle, positions, t, condition))
        return out

    def loss_and_grads(
        self,
        inputs: np.ndarray,
        targets: np.ndarray,
        weight: float = 1.0,
    ) -> Tuple[float, Dict[str, np.ndarray]]:
        """
        Mittlerer quadratischer Fehler über alle Tokens und Kanäle samt Gradienten

        Args:
            inputs: (L, D) Feature-Zeilen aus `features`
            targets: (L, C) Flow-Ziele
            weight: Faktor auf Loss und Gradienten (Batch-Mittelung)
        """
        h, out = self._forward(inputs)
        diff = out - targets
        loss = float(np.mean(diff ** 2))
        d_out = (2.0 * weight / diff.size) * diff
        d_h = (d_out @ self.params["W2"].T) * (1.0 - h ** 2)
        grads = {
            "W1": inputs.T @ d_h,
            "b1": d_h.sum(axis=0),
            "W2": h.T @ d_out,
            "b2": d_out.sum(axis=0),
        }
        return loss * weight, grads

    def copy(self) -> "GeneratorModel":
        return GeneratorModel(self.stage, self.c_out, self.hidden, self.cond_len, self.seed,
                              {k: v.copy() for k, v in self.params.items()})
