"""Simulator unit checks: inertia, settling, sliding onset."""

import json

import numpy as np
import pytest

from simcheck import SimProtocol, World, load_bodies, sustains
from simcheck.engine import solid_inertia


def block_doc(mu=0.5, half=(0.5, 0.5, 1.0), z=None):
    hz = half[2]
    return json.dumps(
        {
            "bodies": [
                {"id": "floor", "shape": {"type": "box", "half_extents": [4, 4, 0.1]},
                 "pose": {"translation": [0, 0, -0.1]}, "fixed": True, "mu": mu},
                {"id": "block", "shape": {"type": "box", "half_extents": list(half)},
                 "pose": {"translation": [0, 0, z if z is not None else hz]},
                 "mass": 1.0, "mu": mu},
            ]
        }
    )


def test_box_inertia_matches_analytic():
    a, b, c = 0.3, 0.5, 0.9
    verts = np.array(
        [[sx * a, sy * b, sz * c] for sx in (-1, 1) for sy in (-1, 1) for sz in (-1, 1)]
    )
    from scipy.spatial import ConvexHull

    hull = ConvexHull(verts)
    tris = []
    for k, tri in enumerate(hull.simplices):
        p0, p1, p2 = verts[tri[0]], verts[tri[1]], verts[tri[2]]
        if np.dot(np.cross(p1 - p0, p2 - p0), hull.equations[k, :3]) < 0:
            tri = (tri[0], tri[2], tri[1])
        tris.append(tuple(tri))
    I = solid_inertia(verts, np.array(tris), mass=2.0)
    expect = 2.0 / 3.0 * np.diag([b * b + c * c, a * a + c * c, a * a + b * b])
    assert np.allclose(I, expect, atol=1e-9)


def test_resting_block_stays_put():
    bodies, gravity = load_bodies(block_doc())
    world = World(bodies, gravity)
    dt = 1.0 / 900.0
    for _ in range(900):
        world.step(dt)
    block = world.bodies[1]
    assert world.max_free_speed() < 0.01
    assert abs(block.p[2] - 1.0) < 5e-3  # no sinking, no bouncing


def test_dropped_block_lands():
    bodies, gravity = load_bodies(block_doc(z=1.05))  # 5 cm drop
    world = World(bodies, gravity)
    dt = 1.0 / 900.0
    for _ in range(2700):
        world.step(dt)
    block = world.bodies[1]
    assert abs(block.p[2] - 1.0) < 2e-2
    assert world.max_free_speed() < 0.05


def test_slide_onset_brackets_mu_g():
    """A wide block cannot topple; it starts sliding near mu * g."""
    doc = block_doc(mu=0.4, half=(1.0, 1.0, 0.2))
    proto = SimProtocol(horizon=1.5)
    assert sustains(doc, [1, 0, 0], 0.8 * 0.4 * 9.81, proto)
    assert not sustains(doc, [1, 0, 0], 1.2 * 0.4 * 9.81, proto)


def test_zero_friction_cannot_hold():
    doc = block_doc(mu=0.0, half=(1.0, 1.0, 0.2))
    proto = SimProtocol(horizon=1.5)
    assert not sustains(doc, [1, 0, 0], 0.3, proto)


def test_invalid_scene_errors():
    with pytest.raises(ValueError, match="mass"):
        load_bodies(json.dumps({"bodies": [
            {"id": "x", "shape": {"type": "box", "half_extents": [1, 1, 1]}, "mass": 0.0}
        ]}))
    with pytest.raises(ValueError, match="shape"):
        load_bodies(json.dumps({"bodies": [
            {"id": "x", "shape": {"type": "sphere", "radius": 1}, "mass": 1.0}
        ]}))


def test_protocol_validation():
    with pytest.raises(ValueError):
        SimProtocol(timestep=0.0)
