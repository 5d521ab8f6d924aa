"""
Blockweiser Expansionsplan

Fenster sind w Voxel breit und rücken pro Achse um w/2 vor. Ein Fenster mit
Vorgänger auf einer Achse liest dort die ersten 3/8 w als Kontext und erzeugt
die restlichen 5/8 w; die letzten w/8 jeder festgeschriebenen Front sind
vorläufig und werden vom nächsten Fenster neu erzeugt. Schritte laufen in
Raster-Reihenfolge (Zeilen außen, Spalten innen).
"""
from dataclasses import dataclass, field
from typing import List, Tuple

import numpy as np
import pandas as pd


class PlanError(RuntimeError):
    """Ein Schritt würde noch nicht festgeschriebenen Kontext lesen"""


@dataclass(frozen=True)
class ExpansionStep:
    """
    Attributes:
        index: Raster-Position
        grid_index: (i, j) Fensterzähler pro Achse
        origin: (s_x, s_y) Fensterursprung in Voxeln
        window: w_vox
        dependencies: Indizes der Schritte, die den Kontext dieses Schritts erzeugt haben
    """
    index: int
    grid_index: Tuple[int, int]
    origin: Tuple[int, int]
    window: int
    dependencies: Tuple[int, ...] = ()

    @property
    def context_width(self) -> int:
        return 3 * self.window // 8

    @property
    def has_context(self) -> Tuple[bool, bool]:
        return (self.grid_index[0] >= 1, self.grid_index[1] >= 1)

    @property
    def is_seed(self) -> bool:
        return not any(self.has_context)

    def context_mask(self) -> np.ndarray:
        """(w, w) bool in Fensterkoordinaten: Vereinigung der x- und y-Kontextbänder"""
        w, c = self.window, self.context_width
        mask = np.zeros((w, w), dtype=bool)
        if self.has_context[0]:
            mask[:c, :] = True
        if self.has_context[1]:
            mask[:, :c] = True
        return mask

    def inpaint_mask(self) -> np.ndarray:
        return ~self.context_mask()

    def axis_regions(self, axis: int) -> Tuple[Tuple[int, int], Tuple[int, int]]:
        """(Kontext, Inpaint) als halboffene Voxel-Bereiche entlang einer Achse"""
        s, w = self.origin[axis], self.window
        if self.has_context[axis]:
            c = s + self.context_width
            return (s, c), (c, s + w)
        return (s, s), (s, s + w)

    def window_slices(self) -> Tuple[slice, slice]:
        sx, sy = self.origin
        return slice(sx, sx + self.window), slice(sy, sy + self.window)


@dataclass
class ExpansionPlan:
    n_x: int
    n_y: int
    window: int
    steps: List[ExpansionStep] = field(default_factory=list)

    @property
    def stride(self) -> int:
        return self.window // 2

    @property
    def extent(self) -> Tuple[int, int]:
        """Ziel-Ausdehnung in Voxeln"""
        return (self.n_x * self.window, self.n_y * self.window)

    @property
    def windows_per_axis(self) -> Tuple[int, int]:
        return (2 * (self.n_x - 1) + 1, 2 * (self.n_y - 1) + 1)

    def __len__(self) -> int:
        return len(self.steps)

    def frontier_sequence(self, axis: int = 0) -> List[int]:
        """Festgeschriebene Ausdehnung entlang einer Achse nach jedem Fenster"""
        count = self.windows_per_axis[axis]
        return [self.window + k * self.stride for k in range(count)]

    def provisional_strip(self, step: ExpansionStep, axis: int) -> Tuple[int, int]:
        """Hintere w/8 des Fensters entlang einer Achse; leer, wenn kein Fenster mehr folgt"""
        s, w = step.origin[axis], self.window
        if step.grid_index[axis] + 1 >= self.windows_per_axis[axis]:
            return (s + w, s + w)
        return (s + 7 * w // 8, s + w)

    def table(self) -> pd.DataFrame:
        rows = []
        for st in self.steps:
            (cx, ix), (cy, iy) = st.axis_regions(0), st.axis_regions(1)
            rows.append({
                "step": st.index,
                "i": st.grid_index[0],
                "j": st.grid_index[1],
                "origin_x": st.origin[0],
                "origin_y": st.origin[1],
                "context_x": f"[{cx[0]}, {cx[1]})",
                "context_y": f"[{cy[0]}, {cy[1]})",
                "inpaint_x": f"[{ix[0]}, {ix[1]})",
                "inpaint_y": f"[{iy[0]}, {iy[1]})",
                "dependencies": " ".join(str(d) for d in st.dependencies),
            })
        return pd.DataFrame(rows)


def plan_expansion(n_x: int, n_y: int, w_vox: int) -> ExpansionPlan:
    """
    Erzeugt den Expansionsplan

    Abhängigkeiten entstehen durch Abspielen des Plans auf einer
    Herkunftskarte; sie nennen jeden Schritt, dessen festgeschriebene Voxel
    ein Kontextbereich liest.

    Raises:
        ValueError: w_vox nicht durch 8 teilbar oder Ausdehnung < 1
        PlanError: ein Kontextbereich ist nicht vollständig festgeschrieben
    """
    if w_vox <= 0 or w_vox % 8:
        raise ValueError(f"w_vox must be a positive multiple of 8, got {w_vox}")
    if n_x < 1 or n_y < 1:
        raise ValueError(f"Extent must be at least 1x1 blocks, got {n_x}x{n_y}")
    plan = ExpansionPlan(n_x, n_y, w_vox)
    kx, ky = plan.windows_per_axis
    provenance = np.full(plan.extent, -1, dtype=np.int64)
    for j in range(ky):
        for i in range(kx):
            index = len(plan.steps)
            candidate = ExpansionStep(index, (i, j), (i * plan.stride, j * plan.stride), w_vox)
            window = provenance[candidate.window_slices()]
            ctx = window[candidate.context_mask()]
            if np.any(ctx < 0):
                raise PlanError(f"Step {index} at {candidate.origin} reads uncommitted context")
            deps = tuple(int(d) for d in np.unique(ctx))
            step = ExpansionStep(index, (i, j), candidate.origin, w_vox, deps)
            window[step.inpaint_mask()] = index
            plan.steps.append(step)
    return plan
