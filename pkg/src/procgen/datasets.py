"""
Coarse/fine Block-Datensätze auf der Platte

Layout:
    <out_dir>/fine/block_0000.wgb1
    <out_dir>/coarse/block_0000.wgb1
    <out_dir>/manifest.csv
"""
import logging
from dataclasses import dataclass, field
from pathlib import Path
from typing import Dict, List, Optional, Union

import pandas as pd

from ..voxcore import BlockLevel, SparseGrid, load_block, save_block
from .curation import CurationConfig, CurationResult, curate_blocks
from .slicing import occupancy_topdown, slice_block
from .world import SceneWorld

logger = logging.getLogger(__name__)

MANIFEST_NAME = "manifest.csv"
MANIFEST_COLUMNS = [
    "path", "level", "origin_x", "origin_y", "origin_z", "occupancy", "threshold", "seed", "world_seed",
]


@dataclass(frozen=True)
class DatasetSeeds:
    world: int
    curation: int


@dataclass
class BlockDataset:
    """Akzeptierte Blöcke einer Ebene"""
    level: BlockLevel
    blocks: List[SparseGrid] = field(default_factory=list)
    paths: List[Path] = field(default_factory=list)
    curation: Optional[CurationResult] = None

    def __len__(self) -> int:
        return len(self.blocks)

    @property
    def shortfall(self) -> int:
        return self.curation.shortfall if self.curation else 0


@dataclass
class DatasetBuild:
    fine: BlockDataset
    coarse: BlockDataset
    manifest_path: Path
    manifest: pd.DataFrame

    def shortfall_report(self) -> Dict[str, int]:
        return {"fine": self.fine.shortfall, "coarse": self.coarse.shortfall}


def _build_level(
    world: SceneWorld,
    cfg: CurationConfig,
    level: BlockLevel,
    count: int,
    seeds: DatasetSeeds,
    out_dir: Path,
    rows: List[dict],
) -> BlockDataset:
    curation = curate_blocks(world, level, count, cfg, seeds.curation)
    frame = cfg.frame(level)
    dataset = BlockDataset(level=level, curation=curation)
    for k, origin in enumerate(curation.origins):
        block = slice_block(world, origin, frame.with_origin(origin))
        rel = Path(level.value) / f"block_{k:04d}.wgb1"
        save_block(out_dir / rel, block, level)
        dataset.blocks.append(block)
        dataset.paths.append(out_dir / rel)
        rows.append({
            "path": rel.as_posix(),
            "level": level.value,
            "origin_x": origin[0],
            "origin_y": origin[1],
            "origin_z": origin[2],
            "occupancy": occupancy_topdown(block),
            "threshold": cfg.occupancy_threshold,
            "seed": seeds.curation,
            "world_seed": seeds.world,
        })
    logger.info(f"{level.value}: {len(dataset)} Blöcke gespeichert (Fehlmenge {dataset.shortfall})")
    return dataset


def build_datasets(
    world: SceneWorld,
    cfg: CurationConfig,
    seeds: DatasetSeeds,
    out_dir: Union[str, Path],
    fine_count: int,
    coarse_count: int,
) -> DatasetBuild:
    """
    Kuratiert und speichert beide Block-Datensätze plus Manifest

    Raises:
        OSError: Dateien können nicht geschrieben werden
    """
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    rows: List[dict] = []
    fine = _build_level(world, cfg, BlockLevel.FINE, fine_count, seeds, out_dir, rows)
    coarse = _build_level(world, cfg, BlockLevel.COARSE, coarse_count, seeds, out_dir, rows)

    manifest = pd.DataFrame(rows, columns=MANIFEST_COLUMNS)
    manifest_path = write_manifest(manifest, out_dir / MANIFEST_NAME)
    return DatasetBuild(fine=fine, coarse=coarse, manifest_path=manifest_path, manifest=manifest)


def write_manifest(manifest: pd.DataFrame, path: Union[str, Path]) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    manifest.to_csv(path, index=False, lineterminator="\n")
    return path


def load_manifest(path: Union[str, Path]) -> pd.DataFrame:
    path = Path(path)
    if path.is_dir():
        path = path / MANIFEST_NAME
    return pd.read_csv(path)


def load_dataset(out_dir: Union[str, Path], level: BlockLevel) -> List[SparseGrid]:
    """Lädt alle Blöcke einer Ebene in Manifest-Reihenfolge"""
    out_dir = Path(out_dir)
    manifest = load_manifest(out_dir)
    blocks = []
    for rel in manifest.loc[manifest["level"] == level.value, "path"]:
        grid, stored = load_block(out_dir / rel)
        if stored is not level:
            raise ValueError(f"{rel} stores a {stored.value} block, expected {level.value}")
        blocks.append(grid)
    return blocks
