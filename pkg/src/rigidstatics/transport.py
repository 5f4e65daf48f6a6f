"""Maximal sustainable accelerations for assembly transport.

An accelerating assembly is equivalent to a static one loaded by a
fictitious force at each sub-assembly's centre of mass, opposite to the
acceleration. The sustainable acceleration along a direction is the
smallest robustness-to-mass ratio across connected sub-assemblies.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .equilibrium import SolverConfig
from .robustness import RobustnessEngine
from .scene import Scene


@dataclass(frozen=True)
class MsaEntry:
    direction: np.ndarray
    msa: float  # m/s^2, may be inf
    limiting_super: str  # "+"-joined body ids, "" when unbounded
    mechanism: str  # "slip" | "topple" | "none"


@dataclass
class MsaResult:
    entries: list[MsaEntry]

    @property
    def directions(self) -> np.ndarray:
        return np.array([e.direction for e in self.entries])

    @property
    def values(self) -> np.ndarray:
        return np.array([e.msa for e in self.entries])

    def lookup(self, direction) -> MsaEntry:
        d = np.asarray(direction, dtype=float)
        best = min(self.entries, key=lambda e: -float(e.direction @ d))
        return best


def horizontal_directions(count: int = 100) -> np.ndarray:
    """Unit vectors uniformly spaced in the z = 0 plane."""
    ang = 2.0 * np.pi * np.arange(count) / count
    return np.column_stack([np.cos(ang), np.sin(ang), np.zeros(count)])


def fibonacci_directions(count: int) -> np.ndarray:
    """Quasi-uniform unit vectors over the full sphere."""
    i = np.arange(count) + 0.5
    phi = np.arccos(1 - 2 * i / count)
    theta = np.pi * (1 + 5**0.5) * i
    return np.column_stack(
        [np.cos(theta) * np.sin(phi), np.sin(theta) * np.sin(phi), np.cos(phi)]
    )


def compute_msa(
    scene: Scene,
    directions: np.ndarray | None = None,
    config: SolverConfig | None = None,
    super_cap: int | None = None,
    engine: RobustnessEngine | None = None,
) -> MsaResult:
    """Per-direction maximal sustainable acceleration of the assembly.

    The scene must be stable at rest; directions must be unit vectors.
    """
    if directions is None:
        directions = horizontal_directions()
    engine = engine or RobustnessEngine(scene, config=config, super_cap=super_cap)
    entries = []
    for d in np.asarray(directions, dtype=float):
        if abs(np.linalg.norm(d) - 1.0) > 1e-9:
            raise ValueError("acceleration directions must be unit vectors")
        best = math.inf
        limiting, mechanism = "", "none"
        for analysis in engine.topple_analyses:
            sup = analysis.super_object
            res = engine.query(sup.com, -d, body=sup.bodies, validate_surface=False)
            x = res.sr / sup.mass
            if x < best:
                best = x
                limiting = "+".join(sorted(sup.bodies))
                mechanism = res.governing
        entries.append(MsaEntry(d.copy(), best, limiting, mechanism))
    return MsaResult(entries)


def msa_to_csv(result: MsaResult, path: str) -> None:
    """CSV export: dx,dy,dz,msa,limiting_super,mechanism."""
    with open(path, "w") as fh:
        fh.write("dx,dy,dz,msa,limiting_super,mechanism\n")
        for e in result.entries:
            msa = "inf" if math.isinf(e.msa) else f"{e.msa:.9g}"
            d = ",".join(f"{v:.9g}" for v in e.direction)
            fh.write(f"{d},{msa},{e.limiting_super},{e.mechanism}\n")
