"""Shared scene builders for the test suite."""

from __future__ import annotations

import json
import math

import numpy as np
import pytest

from rigidstatics import Scene, load_scene


def quat_about_x(angle: float) -> list[float]:
    return [math.cos(angle / 2), math.sin(angle / 2), 0.0, 0.0]


def quat_about_y(angle: float) -> list[float]:
    return [math.cos(angle / 2), 0.0, math.sin(angle / 2), 0.0]


def box_body(
    body_id: str,
    half_extents,
    translation=(0, 0, 0),
    quaternion=(1, 0, 0, 0),
    mass: float = 0.0,
    fixed: bool = False,
    mu: float = 0.5,
    com=None,
) -> dict:
    body = {
        "id": body_id,
        "shape": {"type": "box", "half_extents": list(half_extents)},
        "pose": {"translation": list(translation), "quaternion": list(quaternion)},
        "mass": mass,
        "fixed": fixed,
        "mu": mu,
    }
    if com is not None:
        body["com"] = list(com)
    return body


def make_scene(bodies, gravity=(0, 0, -9.81), overrides=()) -> Scene:
    return load_scene(
        json.dumps(
            {
                "bodies": bodies,
                "friction_overrides": list(overrides),
                "gravity": list(gravity),
            }
        )
    )


def cube_on_floor(mu: float = 0.8, edge: float = 1.0, mass: float = 1.0) -> Scene:
    """Unit-style cube sitting on a large fixed slab; cube spans
    [-e/2, e/2]^2 x [0, e]."""
    return make_scene(
        [
            box_body("floor", [3, 3, 0.1], [0, 0, -0.1], fixed=True, mu=mu),
            box_body("cube", [edge / 2] * 3, [0, 0, edge / 2], mass=mass, mu=mu),
        ]
    )


def block_on_floor(w: float = 1.0, h: float = 2.0, mass: float = 1.0, mu: float = 0.9) -> Scene:
    """Tall block (w x w x h) for toppling/transport checks."""
    return make_scene(
        [
            box_body("floor", [4, 4, 0.1], [0, 0, -0.1], fixed=True, mu=mu),
            box_body("block", [w / 2, w / 2, h / 2], [0, 0, h / 2], mass=mass, mu=mu),
        ]
    )


def cube_on_slant(angle: float, mu: float, cube_edge: float = 1.0, cube_mass: float = 1.0) -> Scene:
    """Cube resting flush on a fixed slab inclined by `angle` about +x.

    The slab's top surface passes through the origin; the cube sits
    centred above it along the surface normal.
    """
    n = np.array([0.0, -math.sin(angle), math.cos(angle)])
    q = quat_about_x(angle)
    slab_center = (-0.1 * n).tolist()
    cube_center = (0.5 * cube_edge * n).tolist()
    return make_scene(
        [
            box_body("slab", [3, 3, 0.1], slab_center, q, fixed=True, mu=mu),
            box_body("cube", [cube_edge / 2] * 3, cube_center, q, mass=cube_mass, mu=mu),
        ]
    )


def stacked_cubes(mu: float = 0.8) -> Scene:
    return make_scene(
        [
            box_body("floor", [3, 3, 0.1], [0, 0, -0.1], fixed=True, mu=mu),
            box_body("lower", [0.5, 0.5, 0.5], [0, 0, 0.5], mass=1.0, mu=mu),
            box_body("upper", [0.5, 0.5, 0.5], [0, 0, 1.5], mass=1.0, mu=mu),
        ]
    )


def side_by_side_cubes(mu: float = 0.6) -> Scene:
    return make_scene(
        [
            box_body("floor", [3, 3, 0.1], [0, 0, -0.1], fixed=True, mu=mu),
            box_body("left", [0.5, 0.5, 0.5], [-0.5, 0, 0.5], mass=1.0, mu=mu),
            box_body("right", [0.5, 0.5, 0.5], [0.5, 0, 0.5], mass=1.0, mu=mu),
        ]
    )


def caged_cube() -> Scene:
    """Cube touched on all six faces by fixed walls (form-closed)."""
    e = 0.5
    bodies = [box_body("cube", [e, e, e], [0, 0, 0], mass=1.0, mu=0.5)]
    offsets = [
        ("wall_xp", [0.1, e, e], [e + 0.1, 0, 0]),
        ("wall_xm", [0.1, e, e], [-e - 0.1, 0, 0]),
        ("wall_yp", [e, 0.1, e], [0, e + 0.1, 0]),
        ("wall_ym", [e, 0.1, e], [0, -e - 0.1, 0]),
        ("wall_zp", [e, e, 0.1], [0, 0, e + 0.1]),
        ("wall_zm", [e, e, 0.1], [0, 0, -e - 0.1]),
    ]
    for name, he, tr in offsets:
        bodies.append(box_body(name, he, tr, fixed=True, mu=0.5))
    return make_scene(bodies)


def canyon_scene() -> Scene:
    """Two fixed slants whose top ridges sit 1.6 m apart, bridged by a 2 m
    cube resting across both ridges (face-on-edge contacts)."""
    ang = math.radians(35.0)
    a, b, c = 1.2, 2.0, 0.08  # slab half extents
    ca, sa = math.cos(ang), math.sin(ang)
    ridge_h = a * sa + c * ca
    # left slab tilts down to the left; its +x top edge is the ridge
    t_left = [-0.8 - (a * ca - c * sa), 0.0, 0.0]
    t_right = [0.8 + (a * ca - c * sa), 0.0, 0.0]
    bodies = [
        box_body("slant_left", [a, b, c], t_left, quat_about_y(-ang), fixed=True, mu=0.3),
        box_body("slant_right", [a, b, c], t_right, quat_about_y(ang), fixed=True, mu=0.3),
        box_body("cube", [1, 1, 1], [0, 0, ridge_h + 1], mass=2.0, mu=0.3),
    ]
    return make_scene(bodies)


def wedge_transport_scene(
    theta_deg: float = 30.0,
    mu: float = 1.5,
    rear: bool = False,
    edge: float = 0.6,
    wedge_halfwidth: float = 0.5,
    length: float = 1.2,
) -> Scene:
    """Cube(s) on a free wedge on a fixed tray; incline rises toward +y.

    High friction keeps the transport limits topple-governed: a single
    cube tips downhill under small +y accelerations, a rear (downhill)
    cube blocks that rotation, and the whole structure pivots about the
    tray-level wedge edges under lateral accelerations.
    """
    th = math.radians(theta_deg)
    n = np.array([0.0, -math.sin(th), math.cos(th)])
    downhill = np.array([0.0, -math.cos(th), -math.sin(th)])
    H = 2 * length * math.tan(th)
    W = wedge_halfwidth
    verts = []
    for x in (-W, W):
        verts += [[x, -length, 0.0], [x, length, 0.0], [x, length, H]]
    wedge = {
        "id": "slant",
        "shape": {"type": "hull", "vertices": verts},
        "pose": {"translation": [0, 0, 0]},
        "mass": 4.0,
        "mu": mu,
    }
    surf_pt = np.array([0.0, 0.2, (length + 0.2) * math.tan(th)])
    c1 = box_body(
        "cube1", [edge / 2] * 3, (surf_pt + (edge / 2) * n).tolist(),
        quat_about_x(th), mass=1.0, mu=mu,
    )
    bodies = [box_body("tray", [3, 3, 0.1], [0, 0, -0.1], fixed=True, mu=mu), wedge, c1]
    if rear:
        surf2 = surf_pt + edge * downhill
        c2 = box_body(
            "cube2", [edge / 2] * 3, (surf2 + (edge / 2) * n).tolist(),
            quat_about_x(th), mass=1.0, mu=mu,
        )
        bodies.append(c2)
    return make_scene(bodies)


def plateau_scene(mu: float = 0.8) -> Scene:
    """Fixed floor carrying a free plateau body: an incline rising from the
    floor to a flat top. Placements on the flat top improve the assembly
    more than placements near the ridge or on the incline."""
    h = 0.6
    y_ridge, y_back = 0.0, 1.5
    y_toe = -1.5
    verts = []
    for x in (-1.0, 1.0):
        verts += [[x, y_toe, 0.0], [x, y_back, 0.0], [x, y_back, h], [x, y_ridge, h]]
    plateau = {
        "id": "plateau",
        "shape": {"type": "hull", "vertices": verts},
        "pose": {"translation": [0, 0, 0]},
        "mass": 6.0,
        "mu": mu,
    }
    return make_scene(
        [box_body("floor", [4, 4, 0.1], [0, 0, -0.1], fixed=True, mu=mu), plateau]
    )


@pytest.fixture
def cube_floor_scene() -> Scene:
    return cube_on_floor()


@pytest.fixture
def block_scene() -> Scene:
    return block_on_floor()
