"""
Wachstums-Stufen: coarse Struktur, feines Refinement, Latent-Appearance
"""
import logging
import math
from typing import Optional

import numpy as np

from ..flowgen.model import GeneratorModel
from ..inpaint import inpaint_latent, inpaint_structure
from ..voxcore import BlockFrame, Box, SparseGrid, SparseMask, crop, overwrite_region, trilinear_upsample
from .plan import ExpansionPlan, PlanError, plan_expansion
from .state import LayerState, StepRecord, WorldState, bytes_sha256, region_sha256, step_seed

logger = logging.getLogger(__name__)

LAYER_COARSE = 0
LAYER_FINE = 1
LAYER_LATENT = 2
LOG_INTERVAL = 10


def seed_block(
    model: GeneratorModel,
    condition: np.ndarray,
    seed: int,
    resolution: int,
    steps: int = 50,
    patch: int = 4,
) -> np.ndarray:
    """Unbedingtes Struktur-Sample: volle Maske, leerer bekannter Inhalt"""
    shape = (resolution,) * 3
    return inpaint_structure(
        model, np.zeros(shape, dtype=bool), np.ones(shape, dtype=bool), condition, seed, steps, patch
    )


def _mark_provisional(layer: LayerState, plan: ExpansionPlan, step, inpaint2d: np.ndarray) -> None:
    xs, ys = step.window_slices()
    layer.provisional[xs, ys][inpaint2d] = False
    ax0 = plan.provisional_strip(step, 0)
    if ax0[1] > ax0[0]:
        layer.provisional[ax0[0]:ax0[1], ys] = True
    ax1 = plan.provisional_strip(step, 1)
    if ax1[1] > ax1[0]:
        layer.provisional[xs, ax1[0]:ax1[1]] = True


def grow_structure(
    state: WorldState,
    layer: LayerState,
    model: GeneratorModel,
    plan: ExpansionPlan,
    condition: np.ndarray,
    seed: int,
    layer_tag: int,
    steps: int = 50,
    patch: int = 4,
    reference: Optional[np.ndarray] = None,
    t_start: float = 1.0,
) -> LayerState:
    """
    Führt jeden Planschritt auf einer Struktur-Ebene aus

    Jeder Schritt inpaintet den Inpaint-Bereich seines Fensters aus dem
    festgeschriebenen Kontext; der Kontext wird davor und danach gehasht und
    darf sich nicht ändern.

    Raises:
        PlanError: Kontext nicht festgeschrieben oder vom lesenden Schritt verändert
    """
    depth = layer.shape[2]
    for step in plan.steps:
        state.current_step = step.index
        xs, ys = step.window_slices()
        ctx2d = step.context_mask()
        inp2d = ~ctx2d
        if not np.all(layer.committed[xs, ys][ctx2d]):
            raise PlanError(f"{layer.name} step {step.index}: context not committed")

        window = layer.occupancy[xs, ys]
        ctx_before = region_sha256(window[ctx2d])
        mask3 = np.broadcast_to(inp2d[:, :, None], window.shape)
        ref = None if reference is None else reference[xs, ys]
        out = inpaint_structure(
            model, window, mask3, condition, step_seed(seed, layer_tag, step.index), steps, patch,
            reference=ref, t_start=t_start,
        )
        window[inp2d] = out[inp2d]
        if region_sha256(window[ctx2d]) != ctx_before:
            raise PlanError(f"{layer.name} step {step.index} modified its context")

        layer.provenance[xs, ys][inp2d] = step.index
        _mark_provisional(layer, plan, step, inp2d)
        layer.records.append(StepRecord(
            layer.name, step.index, step.origin, step.dependencies, ctx_before, region_sha256(window[inp2d]),
        ))
        if (step.index + 1) % LOG_INTERVAL == 0:
            logger.info(f"{layer.name}: Schritt {step.index + 1}/{len(plan)}")
    logger.debug(f"{layer.name}: {int(layer.occupancy.sum())} aktive Voxel, Tiefe {depth}")
    return layer


def grow_coarse(
    state: WorldState,
    model: GeneratorModel,
    plan: ExpansionPlan,
    condition: np.ndarray,
    seed: int,
    house_height: float = 3.0,
    steps: int = 50,
    patch: int = 4,
) -> LayerState:
    """Coarse Struktur p_w^c über die ganze Plan-Ausdehnung"""
    n = state.resolution
    frame = BlockFrame.coarse(house_height, n)
    layer = LayerState.blank("coarse", (*plan.extent, n), frame.cell_size)
    state.coarse = layer
    return grow_structure(state, layer, model, plan, condition, seed, LAYER_COARSE, steps, patch)


def upsample_coarse(coarse: np.ndarray) -> np.ndarray:
    """x2 in X und Y, Z unverändert, Schwelle 0.5"""
    return trilinear_upsample(np.asarray(coarse, dtype=np.float64), (2, 2, 1)) >= 0.5


def refine_fine(
    state: WorldState,
    model: GeneratorModel,
    t_prime: float,
    condition: np.ndarray,
    seed: int,
    house_height: float = 3.0,
    sampler_steps: int = 50,
    patch: int = 4,
) -> LayerState:
    """
    Refinement der hochgesampelten coarse Struktur mit kontrolliertem Rauschen

    Jedes feine Fenster startet bei der auf t' verrauschten hochgesampelten
    Belegung und wird in ceil(t' * S) Schritten entrauscht, mit demselben
    Fensterplan wie der coarse Durchlauf, damit Nähte festgeschriebenen
    Kontext sehen.
    """
    if not 0.0 < t_prime < 1.0:
        raise ValueError(f"t' must lie in (0, 1), got {t_prime}")
    if state.coarse is None:
        raise ValueError("refine_fine needs a committed coarse layer")
    n = state.resolution
    up = upsample_coarse(state.coarse.occupancy)
    state.upsampled = up
    frame = BlockFrame.fine(house_height, n)
    layer = LayerState("fine", up.copy(), frame.cell_size)
    state.fine = layer
    plan = fine_plan(state)
    steps = max(1, math.ceil(t_prime * sampler_steps))
    return grow_structure(
        state, layer, model, plan, condition, seed, LAYER_FINE, steps, patch, reference=up, t_start=t_prime,
    )


def grow_fine_direct(
    state: WorldState,
    model: GeneratorModel,
    condition: np.ndarray,
    seed: int,
    house_height: float = 3.0,
    steps: int = 50,
    patch: int = 4,
) -> LayerState:
    """Feine Struktur direkt auf dem feinen Gitter, ohne coarse Durchlauf"""
    n = state.resolution
    plan = fine_plan(state)
    layer = LayerState.blank("fine", (*plan.extent, n), BlockFrame.fine(house_height, n).cell_size)
    state.fine = layer
    return grow_structure(state, layer, model, plan, condition, seed, LAYER_FINE, steps, patch)


def fine_plan(state: WorldState) -> ExpansionPlan:
    """Jeder coarse Block überdeckt 2x2 fine Blöcke"""
    return plan_expansion(2 * state.blocks[0], 2 * state.blocks[1], state.resolution)


def grow_appearance(
    state: WorldState,
    model: GeneratorModel,
    condition: np.ndarray,
    seed: int,
    steps: int = 50,
) -> SparseGrid:
    """
    Latents z_w auf jedem aktiven feinen Voxel, Fenster für Fenster

    Raises:
        PlanError: Kontext-Latents vom lesenden Schritt verändert
        ValueError: aktive Menge der Latents weicht von der feinen Struktur ab
    """
    if state.fine is None:
        raise ValueError("grow_appearance needs a committed fine layer")
    structure = state.fine.grid()
    plan = fine_plan(state)
    depth = state.fine.shape[2]
    canvas = SparseGrid.empty(structure.resolution, structure.cell_size, model.c_out)
    state.latent_records = []

    for step in plan.steps:
        state.current_step = step.index
        sx, sy = step.origin
        box = Box((sx, sy, 0), (sx + plan.window, sy + plan.window, depth))
        block = crop(structure, box)
        known = crop(canvas, box)
        ctx2d = step.context_mask()
        bits = ~ctx2d[block.coords[:, 0], block.coords[:, 1]] if len(block) else np.zeros(0, dtype=bool)

        def context_bytes(grid: SparseGrid) -> bytes:
            if not len(grid):
                return b""
            return grid.select(ctx2d[grid.coords[:, 0], grid.coords[:, 1]]).content_bytes()

        before = bytes_sha256(context_bytes(known))
        latent = inpaint_latent(
            model, block, known, SparseMask(block.coords, bits), condition,
            step_seed(seed, LAYER_LATENT, step.index), steps,
        )
        canvas = overwrite_region(canvas, latent.latents, (sx, sy, 0))
        after_grid = crop(canvas, box)
        if bytes_sha256(context_bytes(after_grid)) != before:
            raise PlanError(f"appearance step {step.index} modified its context latents")
        inpainted = after_grid.select(~ctx2d[after_grid.coords[:, 0], after_grid.coords[:, 1]]) \
            if len(after_grid) else after_grid
        state.latent_records.append(StepRecord(
            "appearance", step.index, step.origin, step.dependencies, before,
            bytes_sha256(inpainted.content_bytes()),
        ))
        if (step.index + 1) % LOG_INTERVAL == 0:
            logger.info(f"appearance: Schritt {step.index + 1}/{len(plan)}")

    if not np.array_equal(canvas.coords, structure.coords):
        raise ValueError("Latent active set differs from the fine structure")
    state.latents = canvas
    return canvas
