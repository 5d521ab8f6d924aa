"""
Argument-Parsing und Dispatch

    python main.py curate --threshold 0.95
    python main.py train --stage fine-structure
    python main.py grow --extent 3x3
    python main.py stability --world 7x7
"""
import argparse
import logging
import sys
from pathlib import Path
from typing import Dict, List, Optional, Tuple

from pydantic import ValidationError

from ..utils import config, setup_logger
from ..utils.config import load_run_config
from .commands import COMMANDS, STAGE_CHOICES

logger = logging.getLogger(__name__)

EXIT_USAGE = 2


def parse_extent(text: str) -> Tuple[int, int]:
    """'3x3' -> (3, 3)"""
    try:
        nx, ny = (int(v) for v in text.lower().split("x"))
    except ValueError:
        raise argparse.ArgumentTypeError(f"Ausdehnung '{text}' hat nicht die Form NxM")
    if nx < 1 or ny < 1:
        raise argparse.ArgumentTypeError(f"Ausdehnung '{text}' muss positiv sein")
    return nx, ny


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", type=Path, help="RunConfig JSON")
    common.add_argument("--root", help="Ausgabe-Verzeichnis (paths.root)")
    common.add_argument("--seed", type=int, help="Seed der Stufe (Welt, Training oder Wachstum)")
    common.add_argument("--steps", type=int, help="Sampler- bzw. Trainingsschritte")

    parser = argparse.ArgumentParser(prog="worldgrow", description="Block-wise infinite 3D world generation")
    sub = parser.add_subparsers(dest="command", required=True)

    curate = sub.add_parser("curate", parents=[common], help="Szene erzeugen und Blöcke kuratieren")
    curate.add_argument(
        "--threshold", type=float,
        help="Mindestanteil belegter Spalten in [0, 1]; 0 = ungefilterte Ablation, jede Platzierung wird angenommen",
    )

    train = sub.add_parser("train", parents=[common], help="Einen Generator trainieren")
    train.add_argument("--stage", required=True, choices=sorted(STAGE_CHOICES))
    train.add_argument("--resume", action="store_true", help="vom vorhandenen Checkpoint fortsetzen")

    grow = sub.add_parser("grow", parents=[common], help="Welt wachsen lassen")
    grow.add_argument("--extent", type=parse_extent)
    grow.add_argument("--t-prime", type=float, dest="t_prime")
    grow.add_argument("--fine-only", action="store_true", help="ohne coarse-Pass")

    refine = sub.add_parser("refine", parents=[common], help="Exportierte coarse-Ebene neu verfeinern")
    refine.add_argument("--coarse", help="coarse.wgb1")
    refine.add_argument("--t-prime", type=float, dest="t_prime")
    refine.add_argument("--out")

    decode = sub.add_parser("decode", parents=[common], help="Latent-WGB1 nach PLY")
    decode.add_argument("--latent")
    decode.add_argument("--codec")
    decode.add_argument("--out")

    ev = sub.add_parser("eval", parents=[common], help="Verteilungs-Metriken gegen Referenzblöcke")
    ev.add_argument("--generated", help="WGB1-Welt oder Verzeichnis mit Blöcken")
    ev.add_argument("--points", type=int)

    stab = sub.add_parser("stability", parents=[common], help="Innen-3x3 gegen Außenring")
    stab.add_argument("--world", type=parse_extent, default=(7, 7))
    stab.add_argument("--points", type=int)
    return parser


def overrides_from(args: argparse.Namespace) -> Dict:
    """Kommandozeilen-Flags als RunConfig-Overrides mit Punkt-Pfaden"""
    cmd = args.command
    out: Dict = {"paths.root": args.root}
    seed_key = {"curate": "world_seed", "train": "training.seed"}.get(cmd, "growth.seed")
    out[seed_key] = args.seed
    out["training.steps" if cmd == "train" else "sampler.steps"] = args.steps
    if cmd == "curate":
        out["curation.threshold"] = args.threshold
    if cmd in ("grow", "refine"):
        out["sampler.t_prime"] = args.t_prime
    if cmd == "grow":
        if args.extent:
            out["growth.extent_x"], out["growth.extent_y"] = args.extent
        if args.fine_only:
            out["growth.coarse_to_fine"] = False
    if cmd == "stability":
        out["growth.extent_x"], out["growth.extent_y"] = args.world
    if cmd in ("eval", "stability"):
        out["metrics.points"] = args.points
    return out


def main(argv: Optional[List[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)

    setup_logger(name="WorldGrow", log_level=config.LOG_LEVEL, log_file=config.get_log_path())
    is_valid, errors = config.validate()
    if not is_valid:
        for error in errors:
            logger.error(f"   • {error}")
        return EXIT_USAGE

    try:
        cfg = load_run_config(args.config).with_overrides(overrides_from(args))
    except (ValidationError, ValueError) as e:
        parser.print_usage(sys.stderr)
        logger.error(f"Ungültige Konfiguration: {e}")
        return EXIT_USAGE
    except FileNotFoundError as e:
        logger.error(str(e))
        return EXIT_USAGE

    logger.info("=" * 60)
    logger.info(f"worldgrow {args.command} (root {cfg.paths.root_dir})")
    return COMMANDS[args.command](cfg, args)
