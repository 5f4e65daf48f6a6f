"""Replay sustainable-acceleration sweeps in the dynamics engine.

Per direction, the largest frame acceleration the assembly survives is
bracketed by bisection: a trial settles the scene, then ramps the
fictitious force in and holds it for a fixed horizon; the assembly fails
the trial when any free body exceeds the relative-velocity threshold.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .engine import World
from .scenes import load_bodies


@dataclass(frozen=True)
class SimProtocol:
    timestep: float = 1.0 / 900.0
    velocity_threshold: float = 0.05  # m/s, failure trigger
    error_reduction: float = 0.2  # contact positional correction factor
    ramp_resolution: float = 0.1  # m/s^2, bisection resolution
    horizon: float = 3.0  # s of sustained acceleration per trial
    settle_time: float = 0.3  # s of plain gravity before the trial
    ramp_time: float = 0.2  # s to fade the fictitious force in
    accel_max: float = 25.0  # m/s^2 search ceiling
    iterations: int = 10  # impulse solver iterations per step

    def __post_init__(self):
        if self.timestep <= 0 or self.velocity_threshold <= 0:
            raise ValueError("timestep and velocity threshold must be positive")


def _build_world(document, protocol: SimProtocol) -> World:
    bodies, gravity = load_bodies(document)
    return World(bodies, gravity, erp=protocol.error_reduction,
                 iterations=protocol.iterations)


def sustains(document, direction, accel: float, protocol: SimProtocol) -> bool:
    """One trial: does the assembly hold at this acceleration magnitude?"""
    world = _build_world(document, protocol)
    dt = protocol.timestep
    for _ in range(int(protocol.settle_time / dt)):
        world.step(dt)
    world.zero_velocities()
    d = np.asarray(direction, dtype=float)
    steps = int(protocol.horizon / dt)
    ramp_steps = max(1, int(protocol.ramp_time / dt))
    for k in range(steps):
        scale = min(1.0, (k + 1) / ramp_steps)
        world.frame_accel = -scale * accel * d  # fictitious force per unit mass
        world.step(dt)
        if world.max_free_speed() > protocol.velocity_threshold:
            return False
    return True


def simulate_msa(document, direction, protocol: SimProtocol,
                 ceiling: float | None = None) -> float:
    """Largest sustained acceleration along `direction`, to the ramp
    resolution; inf if the ceiling holds, 0.0 if the scene cannot even
    stand still. An explicit `ceiling` narrows the bisection bracket."""
    if not sustains(document, direction, 0.0, protocol):
        return 0.0
    lo, hi = 0.0, ceiling if ceiling is not None else protocol.accel_max
    if sustains(document, direction, hi, protocol):
        return math.inf
    while hi - lo > protocol.ramp_resolution:
        mid = 0.5 * (lo + hi)
        if sustains(document, direction, mid, protocol):
            lo = mid
        else:
            hi = mid
    return lo


def replay_msa(document, directions, protocol: SimProtocol | None = None,
               ceilings=None):
    """Simulated MSA per direction; rows match the analyzer's CSV schema.

    `ceilings` optionally narrows each direction's bisection bracket (e.g.
    twice the analyzer's value when replaying for a comparison); a
    simulated limit at or above the ceiling is reported as inf, which the
    comparison flags rather than hiding.
    """
    protocol = protocol or SimProtocol()
    rows = []
    for k, d in enumerate(np.asarray(directions, dtype=float)):
        n = np.linalg.norm(d)
        if abs(n - 1.0) > 1e-9:
            raise ValueError("directions must be unit vectors")
        ceiling = None
        if ceilings is not None and math.isfinite(ceilings[k]):
            ceiling = ceilings[k]
        rows.append((d.copy(), simulate_msa(document, d, protocol, ceiling)))
    return rows


def rows_to_csv(rows, path: str) -> None:
    with open(path, "w") as fh:
        fh.write("dx,dy,dz,msa,limiting_super,mechanism\n")
        for d, msa in rows:
            val = "inf" if math.isinf(msa) else f"{msa:.9g}"
            fh.write(f"{d[0]:.9g},{d[1]:.9g},{d[2]:.9g},{val},,sim\n")
