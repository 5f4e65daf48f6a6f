"""Dynamics-replay cross-check for static assembly robustness results."""

__version__ = "0.1.0"

from .compare import compare, read_msa_csv
from .engine import SimBody, World, solid_inertia
from .replay import SimProtocol, replay_msa, rows_to_csv, simulate_msa, sustains
from .scenes import load_bodies

__all__ = [
    "SimBody",
    "SimProtocol",
    "World",
    "compare",
    "load_bodies",
    "read_msa_csv",
    "replay_msa",
    "rows_to_csv",
    "simulate_msa",
    "solid_inertia",
    "sustains",
]
