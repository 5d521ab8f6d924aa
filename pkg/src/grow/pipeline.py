"""
Welt-Generierung von Anfang bis Ende

seed -> grow_coarse -> refine_fine -> grow_appearance -> decode -> PLY,
mit deterministischem report.json und Laufzeiten in timings.json.
"""
import json
import logging
import time
from contextlib import contextmanager
from dataclasses import dataclass, field
from pathlib import Path
from typing import Dict, Optional, Union

import numpy as np

from ..codec import CodecParams, LatentBlock, decode, export_ply, extract_mesh
from ..flowgen.checkpoint import load_checkpoint
from ..flowgen.model import GeneratorModel, ModelStage, condition_vector
from ..utils.config import RunConfig
from ..voxcore import BlockLevel, SparseGrid, save_block
from .plan import plan_expansion
from .stages import fine_plan, grow_appearance, grow_coarse, grow_fine_direct, refine_fine
from .state import LayerState, WorldState, bytes_sha256

logger = logging.getLogger(__name__)

CHECKPOINT_NAMES = {
    ModelStage.COARSE_STRUCTURE: "coarse_structure.wgck",
    ModelStage.FINE_STRUCTURE: "fine_structure.wgck",
    ModelStage.FINE_LATENT: "fine_latent.wgck",
}
CODEC_NAME = "codec.npz"


class StageError(RuntimeError):
    """Eine Pipeline-Stufe ist fehlgeschlagen"""

    def __init__(self, stage: str, step: Optional[int], cause: Optional[BaseException] = None):
        self.stage = stage
        self.step = step
        self.cause = cause
        where = "n/a" if step is None else str(step)
        super().__init__(f"stage {stage} failed at step {where}: {cause}")


@dataclass
class GrowthModels:
    coarse_structure: Optional[GeneratorModel]
    fine_structure: GeneratorModel
    fine_latent: GeneratorModel
    codec: CodecParams

    @classmethod
    def load(cls, checkpoint_dir: Union[str, Path], need_coarse: bool = True) -> "GrowthModels":
        checkpoint_dir = Path(checkpoint_dir)
        models = {}
        for stage, name in CHECKPOINT_NAMES.items():
            path = checkpoint_dir / name
            if stage is ModelStage.COARSE_STRUCTURE and not need_coarse:
                models[stage] = None
                continue
            if not path.exists():
                raise FileNotFoundError(f"Checkpoint {path} fehlt (erst 'train' ausführen)")
            models[stage], _ = load_checkpoint(path)
        codec = CodecParams.load(checkpoint_dir / CODEC_NAME)
        return cls(models[ModelStage.COARSE_STRUCTURE], models[ModelStage.FINE_STRUCTURE],
                   models[ModelStage.FINE_LATENT], codec)


@dataclass
class GrowthOutcome:
    state: WorldState
    features: SparseGrid
    confidence: np.ndarray
    ply_path: Optional[Path]
    report: Dict
    timings: Dict[str, float] = field(default_factory=dict)


@contextmanager
def _stage(name: str, state: WorldState, timings: Dict[str, float]):
    logger.info("=" * 60)
    logger.info(f"Stage {name}")
    state.current_step = None
    start = time.perf_counter()
    try:
        yield
    except StageError:
        raise
    except Exception as e:
        logger.error(f"Stage {name} fehlgeschlagen bei Schritt {state.current_step}: {e}")
        raise StageError(name, state.current_step, e) from e
    finally:
        timings[name] = time.perf_counter() - start


def build_report(cfg: RunConfig, state: WorldState, features: SparseGrid, mesh_stats: Dict, ply_sha: str) -> Dict:
    fine = state.fine
    fine_cell = fine.cell_size
    area = fine.shape[0] * fine_cell[0] * fine.shape[1] * fine_cell[1]
    report = {
        "world": {
            "blocks": list(state.blocks),
            "resolution": state.resolution,
            "coarse_to_fine": state.coarse is not None,
            "t_prime": cfg.sampler.t_prime,
            "sampler_steps": cfg.sampler.steps,
            "fine_extent_voxels": list(fine.shape),
            "fine_cell_size_m": list(fine_cell),
            "area_m2": area,
        },
        "counts": {
            "fine_active": int(fine.occupancy.sum()),
            "latent_active": len(state.latents) if state.latents is not None else 0,
            **mesh_stats,
        },
        "stages": {},
        "ply_sha256": ply_sha,
    }
    if state.coarse is not None:
        coarse_plan = plan_expansion(state.blocks[0], state.blocks[1], state.resolution)
        report["world"]["coarse_extent_voxels"] = list(state.coarse.shape)
        report["counts"]["coarse_active"] = int(state.coarse.occupancy.sum())
        report["stages"]["coarse"] = {
            "schedule": coarse_plan.table().to_dict(orient="records"),
            "steps": [r.to_dict() for r in state.coarse.records],
        }
    fplan = fine_plan(state)
    report["stages"]["fine"] = {
        "schedule": fplan.table().to_dict(orient="records"),
        "steps": [r.to_dict() for r in fine.records],
    }
    report["stages"]["appearance"] = {"steps": [r.to_dict() for r in state.latent_records]}
    return report


def write_json(path: Path, payload: Dict) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", encoding="utf-8") as f:
        json.dump(payload, f, indent=2, sort_keys=True)
        f.write("\n")
    return path


def finish_world(
    cfg: RunConfig,
    models: GrowthModels,
    state: WorldState,
    timings: Dict[str, float],
    out_dir: Optional[Union[str, Path]] = None,
) -> GrowthOutcome:
    """Appearance-Durchlauf, Decoding und Artefakte für eine Welt mit feiner Struktur"""
    condition = condition_vector(cfg.block.condition_length, cfg.block.condition_seed)
    with _stage("appearance", state, timings):
        grow_appearance(state, models.fine_latent, condition, cfg.growth.seed, cfg.sampler.steps)

    ply_path = None
    with _stage("decode", state, timings):
        features, confidence = decode(LatentBlock(None, state.latents), models.codec)
        mesh = extract_mesh(features, confidence)
        mesh_stats = {"mesh_vertices": int(mesh.vertices.shape[0]), "mesh_triangles": mesh.triangle_count}
        ply_sha = ""
        if out_dir is not None:
            out_dir = Path(out_dir)
            ply_path = export_ply(mesh, out_dir / "world.ply")
            ply_sha = bytes_sha256(ply_path.read_bytes())
            if state.coarse is not None:
                save_block(out_dir / "coarse.wgb1", state.coarse.grid(), BlockLevel.COARSE)
            save_block(out_dir / "fine.wgb1", state.fine.grid(), BlockLevel.FINE)
            save_block(out_dir / "latent.wgb1", state.latents, BlockLevel.FINE)

    report = build_report(cfg, state, features, mesh_stats, ply_sha)
    if out_dir is not None:
        write_json(out_dir / "report.json", report)
        write_json(out_dir / "timings.json", {k: round(v, 3) for k, v in timings.items()})
    logger.info(
        f"Welt fertig: {report['counts']['fine_active']} Voxel, {mesh_stats['mesh_triangles']} Dreiecke, "
        f"{report['world']['area_m2']:.1f} m²"
    )
    return GrowthOutcome(state, features, confidence, ply_path, report, timings)


def generate_world(
    cfg: RunConfig,
    models: GrowthModels,
    out_dir: Optional[Union[str, Path]] = None,
) -> GrowthOutcome:
    """
    Generiert eine Welt der konfigurierten Ausdehnung

    Args:
        cfg: Lauf-Konfiguration
        models: geladene Generatoren und Codec
        out_dir: Zielverzeichnis; None schreibt keine Dateien

    Raises:
        StageError: eine Stufe ist fehlgeschlagen (Name + Schritt)
    """
    n = cfg.block.resolution
    h = cfg.curation.house_height
    patch = cfg.block.patch_size
    steps = cfg.sampler.steps
    seed = cfg.growth.seed
    condition = condition_vector(cfg.block.condition_length, cfg.block.condition_seed)
    state = WorldState(blocks=(cfg.growth.extent_x, cfg.growth.extent_y), resolution=n)
    timings: Dict[str, float] = {}

    if cfg.growth.coarse_to_fine:
        if models.coarse_structure is None:
            raise StageError("coarse", None, ValueError("coarse structure model missing"))
        with _stage("coarse", state, timings):
            plan = plan_expansion(cfg.growth.extent_x, cfg.growth.extent_y, n)
            grow_coarse(state, models.coarse_structure, plan, condition, seed, h, steps, patch)
        with _stage("refine", state, timings):
            refine_fine(state, models.fine_structure, cfg.sampler.t_prime, condition, seed, h, steps, patch)
    else:
        with _stage("fine_direct", state, timings):
            grow_fine_direct(state, models.fine_structure, condition, seed, h, steps, patch)

    return finish_world(cfg, models, state, timings, out_dir)


def refine_world(
    cfg: RunConfig,
    models: GrowthModels,
    coarse: SparseGrid,
    out_dir: Optional[Union[str, Path]] = None,
) -> GrowthOutcome:
    """
    Wiederholt Refinement und Appearance auf einer exportierten coarse-Ebene

    Die Block-Ausdehnung folgt aus dem coarse-Gitter, t' aus cfg.

    Raises:
        ValueError: coarse-Gitter ist keine ganze Zahl von N x N Spalten
        StageError: eine Stufe ist fehlgeschlagen
    """
    n = cfg.block.resolution
    rx, ry, rz = coarse.resolution
    if rx % n or ry % n or rz != n:
        raise ValueError(f"Coarse grid {coarse.resolution} is not a lattice of {n}^3 blocks")
    state = WorldState(blocks=(rx // n, ry // n), resolution=n)
    occupancy = np.zeros(coarse.resolution, dtype=bool)
    if len(coarse):
        occupancy[tuple(coarse.coords.T)] = True
    layer = LayerState("coarse", occupancy, tuple(coarse.cell_size))
    layer.provenance[:] = 0
    state.coarse = layer
    timings: Dict[str, float] = {}
    condition = condition_vector(cfg.block.condition_length, cfg.block.condition_seed)
    with _stage("refine", state, timings):
        refine_fine(
            state, models.fine_structure, cfg.sampler.t_prime, condition, cfg.growth.seed,
            cfg.curation.house_height, cfg.sampler.steps, cfg.block.patch_size,
        )
    return finish_world(cfg, models, state, timings, out_dir)
