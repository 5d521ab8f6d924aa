"""
Verteilungs-Metriken auf Mengen: MMD, COV und 1-NNA

Alle drei arbeiten auf einer Distanzmatrix zwischen erzeugter Menge S_g und
Referenzmenge S_r. Matrizen werden zeilenparallel berechnet; jeder Eintrag
hat seinen eigenen Slot, das Ergebnis hängt nicht vom Scheduling ab.
"""
import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field
from typing import Callable, Dict, Optional, Sequence

import numpy as np

from ..utils.config import worker_count
from .distances import chamfer, emd
from .frechet import FrechetResult, frechet_surrogate
from .points import DEFAULT_POINTS, PointSample, sample_points

logger = logging.getLogger(__name__)

Distance = Callable[[object, object], float]

CONVENTIONS = {
    "cd": "sum of both directed means of squared nearest-neighbour distances",
    "emd": "mean matched distance, exact assignment up to 256 points, auction above (gap <= 1%)",
    "mmd": "mean over reference of min over generated",
    "cov": "fraction of reference samples that are some generated sample's nearest",
    "nna": "leave-one-out 1-NN accuracy, exact ties classify as reference",
    "points": "area-weighted surface samples, normalised to the block bounding cube",
}


def _require(items: Sequence, name: str) -> None:
    if len(items) == 0:
        raise ValueError(f"{name} must not be empty")


def pairwise_distances(rows: Sequence, cols: Sequence, distance: Distance, workers: Optional[int] = None) -> np.ndarray:
    """(len(rows), len(cols)) Matrix von distance(row, col)"""
    out = np.zeros((len(rows), len(cols)), dtype=np.float64)

    def fill(i: int) -> None:
        for j, c in enumerate(cols):
            out[i, j] = distance(rows[i], c)

    with ThreadPoolExecutor(max_workers=workers or worker_count()) as pool:
        list(pool.map(fill, range(len(rows))))
    return out


def mmd_from_matrix(dist_gr: np.ndarray) -> float:
    """dist_gr hat die Form (|S_g|, |S_r|)"""
    return float(dist_gr.min(axis=0).mean())


def cov_from_matrix(dist_gr: np.ndarray) -> float:
    nearest = dist_gr.argmin(axis=1)
    return float(np.unique(nearest).size / dist_gr.shape[1])


def nna_from_matrices(dist_gg: np.ndarray, dist_gr: np.ndarray, dist_rr: np.ndarray) -> float:
    """
    Leave-one-out 1-NN Genauigkeit über S_g ∪ S_r

    Label 1 markiert erzeugte Samples. Ein Sample, dessen kleinste Distanz
    von irgendeinem Referenz-Sample erreicht wird, gilt als Referenz.
    """
    n_g, n_r = dist_gr.shape
    full = np.block([[dist_gg, dist_gr], [dist_gr.T, dist_rr]]).astype(np.float64)
    np.fill_diagonal(full, np.inf)
    labels = np.concatenate([np.ones(n_g, dtype=bool), np.zeros(n_r, dtype=bool)])
    nearest = full.min(axis=1, keepdims=True)
    ties_ref = np.any((full == nearest) & ~labels[None, :], axis=1)
    pred = ~ties_ref
    return float(np.mean(pred == labels))


def mmd(s_g: Sequence, s_r: Sequence, distance: Distance) -> float:
    _require(s_g, "S_g")
    _require(s_r, "S_r")
    return mmd_from_matrix(pairwise_distances(s_g, s_r, distance))


def cov(s_g: Sequence, s_r: Sequence, distance: Distance) -> float:
    _require(s_g, "S_g")
    _require(s_r, "S_r")
    return cov_from_matrix(pairwise_distances(s_g, s_r, distance))


def nna(s_g: Sequence, s_r: Sequence, distance: Distance) -> float:
    _require(s_g, "S_g")
    _require(s_r, "S_r")
    if len(s_g) != len(s_r):
        logger.warning(f"1-NNA mit ungleichen Mengen ({len(s_g)} vs {len(s_r)})")
    return nna_from_matrices(
        pairwise_distances(s_g, s_g, distance),
        pairwise_distances(s_g, s_r, distance),
        pairwise_distances(s_r, s_r, distance),
    )


@dataclass
class EvalReport:
    """Verteilungs-Metriken einer erzeugten Blockmenge gegen eine Referenzmenge"""
    mmd_cd: float
    mmd_emd: float
    cov_cd: float
    cov_emd: float
    nna_cd: float
    nna_emd: float
    frechet: float
    frechet_regularized: bool
    generated_count: int
    reference_count: int
    points: int
    seed: int
    conventions: Dict[str, str] = field(default_factory=lambda: dict(CONVENTIONS))

    def to_dict(self) -> Dict:
        return asdict(self)


def sample_set(blocks: Sequence, n: int, seed: int, set_tag: int) -> list:
    """Ein PointSample pro Block, geseedet pro (seed, set, index)"""
    return [sample_points(b, n, [seed, set_tag, i], block_id=i) for i, b in enumerate(blocks)]


def _metric_triplet(gen: Sequence[PointSample], ref: Sequence[PointSample], distance: Distance):
    gg = pairwise_distances(gen, gen, distance)
    gr = pairwise_distances(gen, ref, distance)
    rr = pairwise_distances(ref, ref, distance)
    return mmd_from_matrix(gr), cov_from_matrix(gr), nna_from_matrices(gg, gr, rr)


def evaluate_blocks(
    generated: Sequence,
    reference: Sequence,
    points: int = DEFAULT_POINTS,
    seed: int = 9,
) -> EvalReport:
    """
    Vollständiger Report für zwei Blockmengen (SparseGrid Belegungsblöcke)

    Raises:
        ValueError: leere Menge oder weniger als 2 Blöcke für das Fréchet-Surrogat
    """
    _require(generated, "generated blocks")
    _require(reference, "reference blocks")
    logger.info(f"Evaluiere {len(generated)} gegen {len(reference)} Blöcke ({points} Punkte)")
    gen = sample_set(generated, points, seed, 0)
    ref = sample_set(reference, points, seed, 1)
    mmd_cd, cov_cd, nna_cd = _metric_triplet(gen, ref, chamfer)
    mmd_emd, cov_emd, nna_emd = _metric_triplet(gen, ref, emd)
    fr: FrechetResult = frechet_surrogate(generated, reference)
    if fr.regularized:
        logger.warning("Fréchet-Surrogat: Kovarianz singulär, mit 1e-6·I regularisiert")
    return EvalReport(
        mmd_cd=mmd_cd, mmd_emd=mmd_emd, cov_cd=cov_cd, cov_emd=cov_emd, nna_cd=nna_cd, nna_emd=nna_emd,
        frechet=fr.score, frechet_regularized=fr.regularized,
        generated_count=len(generated), reference_count=len(reference), points=points, seed=seed,
    )
