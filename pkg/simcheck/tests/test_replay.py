"""Replay-level checks against analytic thresholds."""

import json
import math

import numpy as np
import pytest

from simcheck import SimProtocol, replay_msa, rows_to_csv, simulate_msa

G = 9.81


def block_doc(mu):
    return json.dumps(
        {
            "bodies": [
                {"id": "floor", "shape": {"type": "box", "half_extents": [4, 4, 0.1]},
                 "pose": {"translation": [0, 0, -0.1]}, "fixed": True, "mu": mu},
                {"id": "block", "shape": {"type": "box", "half_extents": [0.5, 0.5, 1.0]},
                 "pose": {"translation": [0, 0, 1.0]}, "mass": 1.0, "mu": mu},
            ]
        }
    )


def test_topple_limited_block_within_15_percent():
    analytic = G * 0.5 / 1.0  # 4.905
    msa = simulate_msa(block_doc(0.9), [1.0, 0, 0], SimProtocol(), ceiling=2 * analytic)
    assert abs(msa - analytic) / analytic < 0.15


def test_slip_limited_block_within_15_percent():
    analytic = 0.3 * G  # 2.943
    msa = simulate_msa(block_doc(0.3), [1.0, 0, 0], SimProtocol(), ceiling=2 * analytic)
    assert abs(msa - analytic) / analytic < 0.15


def test_zero_friction_block_msa_near_zero():
    msa = simulate_msa(block_doc(0.0), [1.0, 0, 0], SimProtocol(horizon=1.5), ceiling=1.0)
    assert msa <= 0.2  # within two ramp steps of zero


def test_halving_resolution_never_raises_result_much():
    doc = block_doc(0.9)
    coarse = simulate_msa(doc, [1.0, 0, 0], SimProtocol(ramp_resolution=0.2), ceiling=10.0)
    fine = simulate_msa(doc, [1.0, 0, 0], SimProtocol(ramp_resolution=0.1), ceiling=10.0)
    assert fine <= coarse + 0.2  # finer search cannot exceed by over one coarse step


def test_rows_csv_schema(tmp_path):
    rows = [(np.array([1.0, 0, 0]), 4.9), (np.array([0, 1.0, 0]), math.inf)]
    out = tmp_path / "sim.csv"
    rows_to_csv(rows, str(out))
    lines = out.read_text().strip().splitlines()
    assert lines[0] == "dx,dy,dz,msa,limiting_super,mechanism"
    assert lines[2].split(",")[3] == "inf"


def test_replay_requires_unit_directions():
    with pytest.raises(ValueError, match="unit"):
        replay_msa(block_doc(0.5), np.array([[2.0, 0.0, 0.0]]))
