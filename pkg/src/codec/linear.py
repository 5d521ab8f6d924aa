"""
Linearer Structured-Latent Codec

encode: z_i = E f_i pro aktivem Voxel
decode: [f_i, conf_i] = D z_i + b, Konfidenz auf [0, 1] begrenzt

Der Feature-Teil des Decoders ist streng linear (b ist dort null); nur der
Konfidenz-Kanal hat einen Bias.
"""
import logging
from dataclasses import dataclass
from pathlib import Path
from typing import Literal, Optional, Sequence, Tuple, Union

import numpy as np

from ..voxcore import BlockFrame, SparseGrid

logger = logging.getLogger(__name__)

CodecMode = Literal["fixed_orthonormal", "trained_linear"]
CONFIDENCE_THRESHOLD = 0.5


@dataclass(frozen=True)
class CodecParams:
    """
    Attributes:
        mode: fixed_orthonormal oder trained_linear
        seed: Seed für Aufbau / Fit der Matrizen
        encoder: E, Form (C_z, C_f)
        decoder: D, Form (C_f + 1, C_z); letzte Zeile ist die Konfidenz
        bias: Form (C_f + 1,); null außer beim Konfidenz-Eintrag
    """
    mode: str
    seed: int
    encoder: np.ndarray
    decoder: np.ndarray
    bias: np.ndarray

    def __post_init__(self):
        if self.mode not in ("fixed_orthonormal", "trained_linear"):
            raise ValueError(f"Unknown codec mode {self.mode!r}")
        cz, cf = self.encoder.shape
        if self.decoder.shape != (cf + 1, cz):
            raise ValueError(f"Decoder shape {self.decoder.shape} does not match encoder {self.encoder.shape}")
        if self.bias.shape != (cf + 1,):
            raise ValueError(f"Bias shape {self.bias.shape}, expected {(cf + 1,)}")

    @property
    def feature_channels(self) -> int:
        return self.encoder.shape[1]

    @property
    def latent_channels(self) -> int:
        return self.encoder.shape[0]

    def save(self, path: Union[str, Path]) -> Path:
        path = Path(path)
        path.parent.mkdir(parents=True, exist_ok=True)
        with open(path, "wb") as fh:
            np.savez(fh, mode=np.array(self.mode), seed=np.array(self.seed),
                     encoder=self.encoder, decoder=self.decoder, bias=self.bias)
        return path

    @classmethod
    def load(cls, path: Union[str, Path]) -> "CodecParams":
        with np.load(Path(path), allow_pickle=False) as data:
            return cls(str(data["mode"]), int(data["seed"]), data["encoder"].copy(),
                       data["decoder"].copy(), data["bias"].copy())


@dataclass(frozen=True)
class LatentBlock:
    frame: Optional[BlockFrame]
    latents: SparseGrid


def fixed_orthonormal(feature_channels: int = 6, latent_channels: int = 8, seed: int = 1) -> CodecParams:
    """
    Geseedeter semi-orthogonaler Encoder

    C_z >= C_f liefert orthonormale Spalten (E^T E = I, exakter Round Trip);
    C_z < C_f liefert orthonormale Zeilen (decode projiziert auf den Zeilenraum).
    """
    rng = np.random.default_rng(seed)
    big, small = max(feature_channels, latent_channels), min(feature_channels, latent_channels)
    q, r = np.linalg.qr(rng.standard_normal((big, small)))
    q = q * np.sign(np.diag(r))[None, :]
    encoder = q if latent_channels >= feature_channels else q.T
    decoder = np.vstack([encoder.T, np.zeros((1, latent_channels))])
    bias = np.zeros(feature_channels + 1)
    bias[-1] = 1.0
    return CodecParams("fixed_orthonormal", seed, encoder, decoder, bias)


def fit_trained_linear(
    inputs: np.ndarray,
    targets: np.ndarray,
    latent_channels: int = 8,
    seed: int = 1,
) -> CodecParams:
    """
    Fittet den Codec auf Szenen-Voxel

    E spannt die Hauptrichtungen der (nicht zentrierten) Eingabe-Features auf,
    D ist die Least-Squares-Abbildung von den Latents zurück auf die
    Ziel-Features. Eingaben sind geliftete Features, Ziele die echten.
    """
    inputs = np.asarray(inputs, dtype=np.float64)
    targets = np.asarray(targets, dtype=np.float64)
    if inputs.ndim != 2 or inputs.shape != targets.shape:
        raise ValueError(f"inputs {inputs.shape} and targets {targets.shape} must be matching (M, C) arrays")
    if inputs.shape[0] == 0:
        raise ValueError("fit_trained_linear needs at least one voxel")
    m, cf = inputs.shape
    second = inputs.T @ inputs / m
    eigval, eigvec = np.linalg.eigh(second)
    order = np.argsort(eigval)[::-1]
    basis = eigvec[:, order].T  # rows: principal directions
    encoder = np.zeros((latent_channels, cf))
    k = min(latent_channels, cf)
    encoder[:k] = basis[:k]

    z = inputs @ encoder.T
    feat_map, *_ = np.linalg.lstsq(z, targets, rcond=None)
    conf_design = np.hstack([z, np.ones((m, 1))])
    conf_fit, *_ = np.linalg.lstsq(conf_design, np.ones(m), rcond=None)

    decoder = np.vstack([feat_map.T, conf_fit[:-1][None, :]])
    bias = np.zeros(cf + 1)
    bias[-1] = conf_fit[-1]
    logger.debug(f"trained_linear codec gefittet auf {m} Voxeln ({cf} -> {latent_channels})")
    return CodecParams("trained_linear", seed, encoder, decoder, bias)


def fit_on_blocks(
    lifted: Sequence[SparseGrid],
    truth: Sequence[SparseGrid],
    latent_channels: int = 8,
    seed: int = 1,
) -> CodecParams:
    """Stapelt ausgerichtete (geliftete, echte) Blöcke und fittet trained_linear"""
    xs, ys = [], []
    for a, b in zip(lifted, truth):
        if not np.array_equal(a.coords, b.coords):
            raise ValueError("Lifted and true blocks must share the active set")
        xs.append(a.features)
        ys.append(b.features)
    if not xs:
        raise ValueError("fit_on_blocks needs at least one block")
    return fit_trained_linear(np.concatenate(xs), np.concatenate(ys), latent_channels, seed)


def encode(features: SparseGrid, params: CodecParams, frame: Optional[BlockFrame] = None) -> LatentBlock:
    if features.channels != params.feature_channels:
        raise ValueError(
            f"Feature grid has {features.channels} channels, codec expects {params.feature_channels}"
        )
    z = features.features.astype(np.float64) @ params.encoder.T
    return LatentBlock(frame, features.with_features(z.astype(np.float32)))


def decode(latent: LatentBlock, params: CodecParams) -> Tuple[SparseGrid, np.ndarray]:
    """Liefert (Features C_f, Konfidenz pro Eintrag in [0, 1])"""
    grid = latent.latents
    if grid.channels != params.latent_channels:
        raise ValueError(f"Latent grid has {grid.channels} channels, codec expects {params.latent_channels}")
    out = grid.features.astype(np.float64) @ params.decoder.T + params.bias
    feats = out[:, :-1].astype(np.float32)
    confidence = np.clip(out[:, -1], 0.0, 1.0)
    return grid.with_features(feats), confidence


def reconstruction_error(decoded: SparseGrid, truth: SparseGrid) -> float:
    """Mittlerer quadratischer Feature-Fehler über ausgerichtete Einträge"""
    if not np.array_equal(decoded.coords, truth.coords):
        raise ValueError("Decoded and true blocks must share the active set")
    if not len(truth):
        return 0.0
    diff = decoded.features.astype(np.float64) - truth.features.astype(np.float64)
    return float(np.mean(diff ** 2))
