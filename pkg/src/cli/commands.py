"""
Subcommands

Jedes Command bekommt die validierte RunConfig und die geparsten Argumente
und liefert einen Exit-Code: 0 Erfolg, 1 Pipeline-Fehler.
"""
import argparse
import logging
from pathlib import Path
from typing import Dict, List, Optional

import pandas as pd

from ..codec import CodecParams, LatentBlock, decode, export_ply, extract_mesh
from ..flowgen import GeneratorModel, ModelStage, condition_vector, load_checkpoint, save_checkpoint, train
from ..flowgen.training import TrainingDivergedError
from ..grow import CHECKPOINT_NAMES, CODEC_NAME, GrowthModels, StageError, generate_world, refine_world
from ..grow.pipeline import write_json
from ..metrics import evaluate_blocks, stability_protocol
from ..procgen import DatasetSeeds, build_datasets, load_dataset
from ..procgen import generate_world as generate_scene
from ..utils.config import RunConfig
from ..voxcore import BlockFormatError, BlockLevel, SparseGrid, load_block
from .examples import LATENT_MANIFEST, block_frame, latent_examples, split_world_blocks, structure_examples

logger = logging.getLogger(__name__)

STAGE_CHOICES = {
    "coarse-structure": ModelStage.COARSE_STRUCTURE,
    "fine-structure": ModelStage.FINE_STRUCTURE,
    "fine-latent": ModelStage.FINE_LATENT,
}
EXIT_OK = 0
EXIT_FAILURE = 1


def _fail(message: str) -> int:
    logger.error(message)
    return EXIT_FAILURE


def _occupancy_only(block: SparseGrid) -> SparseGrid:
    return SparseGrid.occupancy_of(block.resolution, block.cell_size, block.coords)


def cmd_curate(cfg: RunConfig, args: argparse.Namespace) -> int:
    """Prozedurale Welt -> kuratierte fine und coarse Block-Datensätze"""
    n = cfg.block.resolution
    world = generate_scene(cfg.world_seed, cfg.rooms, n, cfg.curation.house_height)
    logger.info(f"Szene: {world.shape} Voxel, {len(world.rooms)} Räume, {len(world.doors)} Türen")
    build = build_datasets(
        world,
        cfg.curation.to_curation_config(n),
        DatasetSeeds(cfg.world_seed, cfg.curation.seed),
        cfg.paths.dataset_dir,
        cfg.curation.fine_count,
        cfg.curation.coarse_count,
    )
    cfg.save(cfg.paths.root_dir / "config.json")
    accepted = min(len(build.fine), len(build.coarse))
    if accepted < cfg.curation.min_accepted:
        return _fail(
            f"Kuratierung unter Minimum: fine {len(build.fine)}, coarse {len(build.coarse)} "
            f"< {cfg.curation.min_accepted} (Fehlmenge {build.shortfall_report()})"
        )
    logger.info(f"Manifest: {build.manifest_path}")
    return EXIT_OK


def cmd_train(cfg: RunConfig, args: argparse.Namespace) -> int:
    """Trainiert einen Generator; schreibt <stage>.wgck und eine Loss-Kurve als CSV"""
    stage = STAGE_CHOICES[args.stage]
    t = cfg.training
    ckpt_dir = cfg.paths.checkpoint_dir
    ckpt_path = ckpt_dir / CHECKPOINT_NAMES[stage]
    level = BlockLevel.COARSE if stage is ModelStage.COARSE_STRUCTURE else BlockLevel.FINE
    try:
        blocks = load_dataset(cfg.paths.dataset_dir, level)[: t.blocks]
    except FileNotFoundError as e:
        return _fail(f"Datensatz fehlt ({e}); erst 'curate' ausführen")
    if not blocks:
        return _fail(f"Keine {level.value}-Blöcke im Datensatz {cfg.paths.dataset_dir}")

    frame = block_frame(cfg, coarse=level is BlockLevel.COARSE)
    if stage.is_structure:
        examples = structure_examples(blocks, frame, cfg.block.patch_size, t.seed)
        c_out = cfg.block.patch_size ** 3
    else:
        data = latent_examples(blocks, cfg, frame, t.seed, ckpt_dir)
        data.codec.save(ckpt_dir / CODEC_NAME)
        data.manifest.to_csv(ckpt_dir / LATENT_MANIFEST, index=False, lineterminator="\n")
        examples = data.examples
        c_out = cfg.block.latent_channels

    optimizer, start = None, 0
    if getattr(args, "resume", False) and ckpt_path.exists():
        model, optimizer = load_checkpoint(ckpt_path, t.lr, t.weight_decay)
        start = optimizer.step_count
        logger.info(f"Setze {stage.name} ab Schritt {start} fort")
    else:
        model = GeneratorModel(stage, c_out, t.hidden, cfg.block.condition_length, t.seed)

    condition = condition_vector(cfg.block.condition_length, cfg.block.condition_seed)
    logger.info(f"Training {stage.name}: {len(examples)} Beispiele, {t.steps} Schritte, {model.parameter_count} Parameter")
    try:
        result = train(model, examples, t.steps, t.lr, t.seed, condition, t.batch, optimizer, start, t.weight_decay)
    except TrainingDivergedError as e:
        return _fail(f"{stage.name}: {e}")

    save_checkpoint(ckpt_path, result.model, result.optimizer)
    curve = pd.DataFrame({"step": range(start, start + len(result.losses)), "loss": result.losses})
    curve.to_csv(ckpt_dir / f"{ckpt_path.stem}_loss.csv", index=False, lineterminator="\n")
    logger.info(f"Checkpoint: {ckpt_path} (letzter Loss {result.losses[-1]:.5f})")
    return EXIT_OK


def _load_models(cfg: RunConfig) -> GrowthModels:
    return GrowthModels.load(cfg.paths.checkpoint_dir, need_coarse=cfg.growth.coarse_to_fine)


def cmd_grow(cfg: RunConfig, args: argparse.Namespace) -> int:
    try:
        models = _load_models(cfg)
    except (FileNotFoundError, BlockFormatError) as e:
        return _fail(str(e))
    try:
        outcome = generate_world(cfg, models, cfg.paths.world_dir)
    except StageError as e:
        return _fail(str(e))
    logger.info(f"PLY: {outcome.ply_path}")
    return EXIT_OK


def cmd_refine(cfg: RunConfig, args: argparse.Namespace) -> int:
    """Verfeinert eine exportierte coarse-Ebene neu mit dem konfigurierten t'"""
    source = Path(args.coarse) if args.coarse else cfg.paths.world_dir / "coarse.wgb1"
    try:
        models = _load_models(cfg.with_overrides({"growth.coarse_to_fine": False}))
        coarse, level = load_block(source)
    except (FileNotFoundError, BlockFormatError) as e:
        return _fail(str(e))
    if level is not BlockLevel.COARSE:
        return _fail(f"{source} enthält keine coarse-Ebene")
    out_dir = Path(args.out) if args.out else cfg.paths.world_dir / f"refine_t{cfg.sampler.t_prime:g}"
    try:
        refine_world(cfg, models, coarse, out_dir)
    except (StageError, ValueError) as e:
        return _fail(str(e))
    return EXIT_OK


def cmd_decode(cfg: RunConfig, args: argparse.Namespace) -> int:
    """Latent-WGB1 + Codec -> PLY"""
    source = Path(args.latent) if args.latent else cfg.paths.world_dir / "latent.wgb1"
    codec_path = Path(args.codec) if args.codec else cfg.paths.checkpoint_dir / CODEC_NAME
    try:
        latents, _ = load_block(source)
        codec = CodecParams.load(codec_path)
        features, confidence = decode(LatentBlock(None, latents), codec)
    except (FileNotFoundError, BlockFormatError, ValueError) as e:
        return _fail(str(e))
    out = Path(args.out) if args.out else source.with_suffix(".ply")
    mesh = extract_mesh(features, confidence)
    export_ply(mesh, out)
    logger.info(f"PLY: {out} ({mesh.triangle_count} Dreiecke)")
    return EXIT_OK


def load_generated_blocks(path: Path, resolution: int) -> List[SparseGrid]:
    """Ein Verzeichnis mit Block-Dateien oder ein Weltgitter, in N x N Spalten geteilt"""
    if path.is_dir():
        blocks = [load_block(p)[0] for p in sorted(path.glob("*.wgb1"))]
    else:
        grid, _ = load_block(path)
        if grid.resolution[0] > resolution or grid.resolution[1] > resolution:
            blocks = [b for _, b in split_world_blocks(grid, resolution)]
        else:
            blocks = [grid]
    return [_occupancy_only(b) for b in blocks if len(b)]


def _reference_blocks(cfg: RunConfig) -> List[SparseGrid]:
    blocks = load_dataset(cfg.paths.dataset_dir, BlockLevel.FINE)[: cfg.metrics.reference_blocks]
    return [_occupancy_only(b) for b in blocks if len(b)]


def cmd_eval(cfg: RunConfig, args: argparse.Namespace) -> int:
    source = Path(args.generated) if args.generated else cfg.paths.world_dir / "fine.wgb1"
    try:
        generated = load_generated_blocks(source, cfg.block.resolution)
        reference = _reference_blocks(cfg)
        report = evaluate_blocks(generated, reference, cfg.metrics.points, cfg.metrics.seed)
    except (FileNotFoundError, BlockFormatError, ValueError) as e:
        return _fail(f"Evaluation fehlgeschlagen: {e}")
    path = write_json(cfg.paths.eval_dir / "eval_report.json", {"source": str(source), **report.to_dict()})
    logger.info(f"MMD-CD {report.mmd_cd:.5f}, COV-CD {report.cov_cd:.3f}, 1-NNA-CD {report.nna_cd:.3f} -> {path}")
    return EXIT_OK


def cmd_stability(cfg: RunConfig, args: argparse.Namespace) -> int:
    """Inneres 3x3 gegen äußeren Ring einer Welt; wächst die Welt bei Bedarf zuerst"""
    world = cfg.paths.world_dir / "fine.wgb1"
    blocks = (cfg.growth.extent_x, cfg.growth.extent_y)
    n = cfg.block.resolution
    expected = (2 * blocks[0] * n, 2 * blocks[1] * n)
    fine: Optional[SparseGrid] = None
    try:
        if world.exists():
            grid, _ = load_block(world)
            if tuple(grid.resolution[:2]) == expected:
                fine = grid
        if fine is None:
            logger.info(f"Keine passende Welt unter {world}, generiere {blocks[0]}x{blocks[1]}")
            fine = generate_world(cfg, _load_models(cfg), cfg.paths.world_dir).state.fine.grid()
        inner, outer = stability_protocol(
            fine, blocks, _reference_blocks(cfg), n, cfg.metrics.seed, cfg.metrics.points,
        )
    except StageError as e:
        return _fail(str(e))
    except (FileNotFoundError, BlockFormatError, ValueError) as e:
        return _fail(f"Stabilitäts-Protokoll fehlgeschlagen: {e}")
    payload: Dict = {"blocks": list(blocks), "inner": inner.to_dict(), "outer": outer.to_dict()}
    path = write_json(cfg.paths.eval_dir / "stability_report.json", payload)
    logger.info(f"MMD-CD innen {inner.mmd_cd:.5f}, außen {outer.mmd_cd:.5f} -> {path}")
    return EXIT_OK


COMMANDS = {
    "curate": cmd_curate,
    "train": cmd_train,
    "grow": cmd_grow,
    "refine": cmd_refine,
    "decode": cmd_decode,
    "eval": cmd_eval,
    "stability": cmd_stability,
}
