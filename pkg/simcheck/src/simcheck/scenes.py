"""Scene JSON to simulator bodies.

Reads the same scene schema the static analyzer consumes (bodies with
box/hull shapes, poses, masses, friction; see the main package README).
Parsing is intentionally independent of the analyzer package.
"""

from __future__ import annotations

import json

import numpy as np
from scipy.spatial import ConvexHull

from .engine import SimBody, solid_inertia


def _quat_matrix(q):
    w, x, y, z = q
    return np.array(
        [
            [1 - 2 * (y * y + z * z), 2 * (x * y - w * z), 2 * (x * z + w * y)],
            [2 * (x * y + w * z), 1 - 2 * (x * x + z * z), 2 * (y * z - w * x)],
            [2 * (x * z - w * y), 2 * (y * z + w * x), 1 - 2 * (x * x + y * y)],
        ]
    )


def _shape_vertices(shape: dict) -> np.ndarray:
    kind = shape.get("type")
    if kind == "box":
        hx, hy, hz = shape["half_extents"]
        return np.array(
            [[sx * hx, sy * hy, sz * hz] for sx in (-1, 1) for sy in (-1, 1) for sz in (-1, 1)],
            dtype=float,
        )
    if kind == "hull":
        return np.asarray(shape["vertices"], dtype=float)
    raise ValueError(f"unsupported shape type {kind!r}")


def load_bodies(document) -> tuple[list[SimBody], np.ndarray]:
    """Build simulator bodies from scene JSON text/dict.

    Returns (bodies, gravity). Raises ValueError for shapes the simulator
    cannot convert.
    """
    data = json.loads(document) if isinstance(document, (str, bytes)) else document
    gravity = np.asarray(data.get("gravity", [0.0, 0.0, -9.81]), dtype=float)
    bodies = []
    for spec in data["bodies"]:
        verts = _shape_vertices(spec["shape"])
        hull = ConvexHull(verts)
        centroid = verts[hull.vertices].mean(axis=0)
        com = np.asarray(spec.get("com", centroid), dtype=float)
        rel = verts - com
        planes = np.column_stack([hull.equations[:, :3], -hull.equations[:, 3]])
        # plane offsets were for absolute coords; shift to com-relative
        planes[:, 3] -= planes[:, :3] @ com

        pose = spec.get("pose", {})
        R = _quat_matrix(pose.get("quaternion", [1, 0, 0, 0]))
        t = np.asarray(pose.get("translation", [0, 0, 0]), dtype=float)
        fixed = bool(spec.get("fixed", False))
        mass = float(spec.get("mass", 0.0))
        if not fixed and mass <= 0:
            raise ValueError(f"body {spec.get('id')}: non-fixed bodies need positive mass")
        if fixed:
            inertia_inv = np.zeros((3, 3))
        else:
            tris = []
            for k, tri in enumerate(hull.simplices):
                a, b, c = (verts[t] - com for t in tri)
                outward = hull.equations[k, :3]
                if np.dot(np.cross(b - a, c - a), outward) < 0:
                    tri = (tri[0], tri[2], tri[1])  # make the triangle wind outward
                tris.append(tuple(tri))
            inertia = solid_inertia(rel, np.array(tris), mass)
            inertia_inv = np.linalg.inv(inertia)
        bodies.append(
            SimBody(
                name=str(spec["id"]),
                vertices=rel,
                planes=planes,
                mass=mass if mass > 0 else 1.0,
                inertia_inv_body=inertia_inv,
                mu=float(spec.get("mu", 0.5)),
                fixed=fixed,
                R=R,
                p=t + R @ com,
            )
        )
    return bodies, gravity
