"""
Configuration Manager für WorldGrow

Zwei Ebenen:
- Config: Umgebungs-Einstellungen (.env / Environment), Singleton `config`
- RunConfig: vollständige, reproduzierbare Lauf-Konfiguration (JSON-Datei)
"""
import os
import json
from pathlib import Path
from typing import Optional, Any, Dict, Literal

from dotenv import load_dotenv
from pydantic import BaseModel, Field, field_validator, model_validator

# Load environment variables
load_dotenv()


class Config:
    """Zentrale Umgebungs-Konfiguration"""

    # Project paths
    BASE_DIR = Path(__file__).resolve().parent.parent.parent
    DATA_DIR = Path(os.getenv("WORLDGROW_DATA_DIR", str(BASE_DIR / "runs")))

    # Worker pools (render views, curation, pairwise metrics)
    THREADS: int = int(os.getenv("WORLDGROW_THREADS", "4"))

    # Logging Configuration
    LOG_LEVEL: str = os.getenv("WORLDGROW_LOG_LEVEL", "INFO")
    LOG_FILE: str = os.getenv("WORLDGROW_LOG_FILE", "logs/worldgrow.log")

    @classmethod
    def validate(cls) -> tuple[bool, list[str]]:
        """Validiert die Konfiguration und gibt Fehler zurück"""
        errors = []

        if cls.THREADS < 1:
            errors.append("WORLDGROW_THREADS muss mindestens 1 sein")

        if cls.LOG_LEVEL.upper() not in ("DEBUG", "INFO", "WARNING", "ERROR", "CRITICAL"):
            errors.append(f"WORLDGROW_LOG_LEVEL unbekannt: {cls.LOG_LEVEL}")

        return (len(errors) == 0, errors)

    @classmethod
    def get_log_path(cls) -> Path:
        """Gibt den vollständigen Log-Pfad zurück"""
        log_path = cls.BASE_DIR / cls.LOG_FILE
        log_path.parent.mkdir(parents=True, exist_ok=True)
        return log_path


def worker_count() -> int:
    """Anzahl Worker-Threads, begrenzt durch WORLDGROW_THREADS"""
    return max(1, min(os.cpu_count() or 1, Config.THREADS))


# Singleton instance
config = Config()


# ---------------------------------------------------------------------------
# Run configuration
# ---------------------------------------------------------------------------

class CurationSettings(BaseModel):
    """Scene-Slicing und 95%-Regel"""
    threshold: float = 0.95
    max_attempts: int = 200
    house_height: float = 3.0
    fine_count: int = 24
    coarse_count: int = 12
    seed: int = 11
    min_accepted: int = 1

    @field_validator("threshold")
    @classmethod
    def _threshold_range(cls, v: float) -> float:
        # 0 is the unfiltered ablation: every placement accepted
        if v < 0 or v > 1:
            raise ValueError(f"threshold muss in [0, 1] liegen (0 = ungefilterte Ablation), ist {v}")
        return v

    @field_validator("max_attempts", "fine_count", "coarse_count")
    @classmethod
    def _positive(cls, v: int) -> int:
        if v < 1:
            raise ValueError("Wert muss mindestens 1 sein")
        return v

    def to_curation_config(self, resolution: int = 32):
        from ..procgen.curation import CurationConfig
        return CurationConfig(
            occupancy_threshold=self.threshold,
            max_attempts=self.max_attempts,
            house_height=self.house_height,
            resolution=resolution,
        )


class BlockSettings(BaseModel):
    """Block-Auflösung und Kanal-Zahlen"""
    resolution: int = 32
    feature_channels: int = 6
    latent_channels: int = 8
    patch_size: int = 4
    condition_length: int = 16
    condition_seed: int = 0

    @field_validator("resolution")
    @classmethod
    def _divisible_by_8(cls, v: int) -> int:
        if v <= 0 or v % 8 != 0:
            raise ValueError(f"Block-Auflösung N muss durch 8 teilbar sein, ist {v}")
        return v

    @model_validator(mode="after")
    def _patch_divides(self) -> "BlockSettings":
        if self.patch_size < 1 or self.resolution % self.patch_size != 0:
            raise ValueError(
                f"patch_size {self.patch_size} teilt N={self.resolution} nicht"
            )
        return self


class TrainingSettings(BaseModel):
    """Flow-Matching Training (AdamW)"""
    steps: int = 400
    lr: float = 1e-4
    batch: int = 4
    hidden: int = 64
    weight_decay: float = 0.01
    seed: int = 3
    blocks: int = 12

    @field_validator("steps", "batch", "hidden", "blocks")
    @classmethod
    def _positive(cls, v: int) -> int:
        if v < 1:
            raise ValueError("Wert muss mindestens 1 sein")
        return v


class SamplerSettings(BaseModel):
    """Euler-Sampler und Refinement-Rauschlevel"""
    steps: int = 50
    t_prime: float = 0.4

    @field_validator("steps")
    @classmethod
    def _steps_positive(cls, v: int) -> int:
        if v < 1:
            raise ValueError("Sampler benötigt mindestens einen Schritt")
        return v

    @field_validator("t_prime")
    @classmethod
    def _t_prime_open_interval(cls, v: float) -> float:
        if not 0.0 < v < 1.0:
            raise ValueError(f"t' muss in (0, 1) liegen, ist {v}")
        return v


class GrowthSettings(BaseModel):
    """Ausdehnung der Welt in Blöcken"""
    extent_x: int = 3
    extent_y: int = 3
    seed: int = 5
    coarse_to_fine: bool = True

    @field_validator("extent_x", "extent_y")
    @classmethod
    def _extent_positive(cls, v: int) -> int:
        if v < 1:
            raise ValueError("Ausdehnung muss mindestens 1 Block sein")
        return v


class RenderSettings(BaseModel):
    """Kamera-Rig für das Feature-Lifting"""
    views: int = 26
    image_size: int = 48
    radius_factor: float = 1.5
    tau_factor: float = 0.75
    dump_ppm: bool = False


class CodecSettings(BaseModel):
    mode: Literal["fixed_orthonormal", "trained_linear"] = "trained_linear"
    seed: int = 1


class MetricSettings(BaseModel):
    points: int = 2048
    seed: int = 9
    reference_blocks: int = 16


class PathSettings(BaseModel):
    root: str = Field(default_factory=lambda: str(Config.DATA_DIR / "default"))

    @property
    def root_dir(self) -> Path:
        return Path(self.root)

    @property
    def dataset_dir(self) -> Path:
        return self.root_dir / "datasets"

    @property
    def checkpoint_dir(self) -> Path:
        return self.root_dir / "checkpoints"

    @property
    def world_dir(self) -> Path:
        return self.root_dir / "world"

    @property
    def eval_dir(self) -> Path:
        return self.root_dir / "eval"


class RunConfig(BaseModel):
    """
    Vollständige Lauf-Konfiguration

    Alle Seeds sind explizit, damit jeder Lauf reproduzierbar ist.
    """
    world_seed: int = 7
    rooms: int = 4
    curation: CurationSettings = Field(default_factory=CurationSettings)
    block: BlockSettings = Field(default_factory=BlockSettings)
    training: TrainingSettings = Field(default_factory=TrainingSettings)
    sampler: SamplerSettings = Field(default_factory=SamplerSettings)
    growth: GrowthSettings = Field(default_factory=GrowthSettings)
    render: RenderSettings = Field(default_factory=RenderSettings)
    codec: CodecSettings = Field(default_factory=CodecSettings)
    metrics: MetricSettings = Field(default_factory=MetricSettings)
    paths: PathSettings = Field(default_factory=PathSettings)

    @field_validator("rooms")
    @classmethod
    def _rooms_positive(cls, v: int) -> int:
        if v < 1:
            raise ValueError("rooms muss mindestens 1 sein")
        return v

    @classmethod
    def load(cls, path: Path) -> "RunConfig":
        """Lädt und re-validiert eine Konfiguration aus JSON"""
        with open(path, "r", encoding="utf-8") as f:
            return cls.model_validate(json.load(f))

    def save(self, path: Path) -> None:
        """Speichert die Konfiguration als JSON (sortierte Keys)"""
        path = Path(path)
        path.parent.mkdir(parents=True, exist_ok=True)
        with open(path, "w", encoding="utf-8") as f:
            json.dump(self.model_dump(mode="json"), f, indent=2, sort_keys=True)
            f.write("\n")

    def with_overrides(self, overrides: Dict[str, Any]) -> "RunConfig":
        """
        Wendet Punkt-Pfad Overrides an ("growth.extent_x": 7) und re-validiert
        """
        data = self.model_dump(mode="json")
        for dotted, value in overrides.items():
            if value is None:
                continue
            node = data
            parts = dotted.split(".")
            for part in parts[:-1]:
                node = node[part]
            node[parts[-1]] = value
        return RunConfig.model_validate(data)


def load_run_config(path: Optional[Path]) -> RunConfig:
    """Lädt eine RunConfig oder liefert die Defaults"""
    if path is None:
        return RunConfig()
    return RunConfig.load(Path(path))
