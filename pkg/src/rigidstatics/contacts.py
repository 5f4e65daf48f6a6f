"""Contact interface detection between posed convex bodies.

Contact points are the exterior vertices of the planar intersection of
overlapping features (face-face, face-edge, face-vertex). Normals point
into the supported body, which receives the compressive contact force.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ContactError
from .geometry import (
    clip_segment_to_polygon,
    convex_clip,
    convex_hull_2d,
    dedupe_points,
    plane_basis,
    point_in_convex_polygon,
    unit,
)
from .scene import RigidBody, Scene, friction_for

DEFAULT_TOL_GAP = 1e-4
DEFAULT_TOL_ANGLE = 1e-3


@dataclass(frozen=True)
class ContactPoint:
    """A contact location with its local frame (third column = inward
    surface normal of the body receiving the force)."""

    position: np.ndarray
    frame: np.ndarray  # 3x3, columns [u, v, n], det = +1
    interface_id: str
    index: int

    @property
    def key(self) -> tuple[str, int]:
        return (self.interface_id, self.index)

    @property
    def normal(self) -> np.ndarray:
        return self.frame[:, 2]


@dataclass
class ContactInterface:
    """All contact points shared by one body pair (coplanar, convex)."""

    body_a: str  # receiver: normals point into this body
    body_b: str
    points: list[ContactPoint]
    mu: float

    @property
    def iid(self) -> str:
        return f"{self.body_a}~{self.body_b}"

    @property
    def normal(self) -> np.ndarray:
        return self.points[0].normal

    def other(self, body_id: str) -> str:
        return self.body_b if body_id == self.body_a else self.body_a


def _face_world(body: RigidBody, i: int) -> tuple[np.ndarray, np.ndarray, float]:
    poly = body.world_poly
    pts = poly.vertices[poly.faces[i]]
    n = poly.face_normals[i]
    return pts, n, poly.face_offsets[i]


def _pair_candidates(a: RigidBody, b: RigidBody, tol_gap: float, tol_angle: float):
    """Contact point candidates between two bodies, with normals oriented
    from body `a` toward body `b`. Returns (points, normals, max_penetration)."""
    pts_out: list[np.ndarray] = []
    nrm_out: list[np.ndarray] = []
    deepest = 0.0
    cos_tol = np.cos(tol_angle)

    pa, pb = a.world_poly, b.world_poly
    for first, second, sign in ((a, b, 1.0), (b, a, -1.0)):
        poly_f = first.world_poly
        poly_s = second.world_poly
        for i, face in enumerate(poly_f.faces):
            n = poly_f.face_normals[i]
            d = poly_f.face_offsets[i]
            u, v = plane_basis(n)
            face_pts = poly_f.vertices[face]
            face2 = np.column_stack([face_pts @ u, face_pts @ v])

            # face-face: anti-aligned opposing face of the other body
            for j, oface in enumerate(poly_s.faces):
                m = poly_s.face_normals[j]
                if n @ m > -cos_tol:
                    continue
                opts = poly_s.vertices[oface]
                gap = float(np.mean(opts @ n) - d)
                if gap > tol_gap:
                    continue
                if gap < -10 * tol_gap:
                    # facing planes far apart (e.g. opposite sides of a box);
                    # real penetration is caught by the vertex check below
                    continue
                o2 = np.column_stack([opts @ u, opts @ v])[::-1]  # CCW about n
                inter = convex_clip(o2, face2)
                if len(inter) == 0:
                    continue
                d_mid = d + gap / 2.0
                for q in inter:
                    pts_out.append(q[0] * u + q[1] * v + d_mid * n)
                    nrm_out.append(sign * n)

            # face-edge: an edge of the other body resting in this face plane
            com_s = poly_s.vertices.mean(axis=0)
            if com_s @ n - d <= 0:
                continue  # other body not on the outward side of this face
            for (e0, e1) in poly_s.edges:
                q0, q1 = poly_s.vertices[e0], poly_s.vertices[e1]
                h0, h1 = q0 @ n - d, q1 @ n - d
                if abs(h0) > tol_gap or abs(h1) > tol_gap:
                    continue
                s0 = np.array([q0 @ u, q0 @ v])
                s1 = np.array([q1 @ u, q1 @ v])
                seg = clip_segment_to_polygon(s0, s1, face2)
                for q in seg:
                    pts_out.append(q[0] * u + q[1] * v + d * n)
                    nrm_out.append(sign * n)

            # face-vertex
            for w in poly_s.vertices:
                if abs(w @ n - d) > tol_gap:
                    continue
                w2 = np.array([w @ u, w @ v])
                if point_in_convex_polygon(w2, face2, tol=1e-9):
                    pts_out.append(w2[0] * u + w2[1] * v + d * n)
                    nrm_out.append(sign * n)

    # volumetric penetration estimate from vertices inside the other body
    for va in pa.vertices:
        if pb.contains(va, tol=0.0):
            deepest = max(deepest, -pb.signed_distance(va))
    for vb in pb.vertices:
        if pa.contains(vb, tol=0.0):
            deepest = max(deepest, -pa.signed_distance(vb))
    return pts_out, nrm_out, deepest


def _choose_receiver(a: RigidBody, b: RigidBody, gravity: np.ndarray) -> RigidBody:
    """The supported body: non-fixed one if unique, else the higher one."""
    if a.fixed != b.fixed:
        return b if a.fixed else a
    up = -gravity
    if np.linalg.norm(up) > 1e-12:
        up = unit(up)
        ha, hb = a.com_world @ up, b.com_world @ up
        if abs(ha - hb) > 1e-9:
            return a if ha > hb else b
    return a if a.id < b.id else b


def detect_contacts(
    scene: Scene,
    tol_gap: float = DEFAULT_TOL_GAP,
    tol_angle: float = DEFAULT_TOL_ANGLE,
) -> list[ContactInterface]:
    """Detect all contact interfaces in the scene.

    Raises ContactError when two bodies interpenetrate deeper than
    10 * tol_gap (the scene is considered invalid, not merely unstable).
    """
    if tol_gap <= 0 or tol_angle <= 0:
        raise ValueError("tolerances must be positive")
    interfaces: list[ContactInterface] = []
    bodies = sorted(scene.bodies, key=lambda b: b.id)
    for i in range(len(bodies)):
        for j in range(i + 1, len(bodies)):
            a, b = bodies[i], bodies[j]
            lo_a, hi_a = a.world_poly.vertices.min(0), a.world_poly.vertices.max(0)
            lo_b, hi_b = b.world_poly.vertices.min(0), b.world_poly.vertices.max(0)
            margin = 10 * tol_gap
            if np.any(lo_a > hi_b + margin) or np.any(lo_b > hi_a + margin):
                continue
            pts, nrms, deepest = _pair_candidates(a, b, tol_gap, tol_angle)
            if deepest > 10 * tol_gap:
                raise ContactError(
                    f"bodies {a.id!r} and {b.id!r} interpenetrate by "
                    f"{deepest:.2e} m (> 10 * tol_gap)"
                )
            if not pts:
                continue
            interfaces.append(
                _build_interface(scene, a, b, np.array(pts), np.array(nrms))
            )
    return interfaces


def _build_interface(
    scene: Scene, a: RigidBody, b: RigidBody, pts: np.ndarray, nrms: np.ndarray
) -> ContactInterface:
    receiver = _choose_receiver(a, b, scene.gravity)
    other = b if receiver is a else a
    # candidate normals point a -> b; flip so they enter the receiver
    n_int = unit(np.mean(nrms, axis=0))
    if receiver is a:
        n_int = -n_int
    u, v = plane_basis(n_int)
    offset = float(np.mean(pts @ n_int))
    flat = np.column_stack([pts @ u, pts @ v])
    flat = dedupe_points(flat, tol=1e-7)
    hull = convex_hull_2d(flat) if len(flat) > 2 else flat
    frame = np.column_stack([u, v, n_int])
    iid = f"{receiver.id}~{other.id}"
    cps = [
        ContactPoint(q[0] * u + q[1] * v + offset * n_int, frame, iid, k)
        for k, q in enumerate(hull)
    ]
    return ContactInterface(receiver.id, other.id, cps, friction_for(scene, a.id, b.id))


def interfaces_to_dict(interfaces: list[ContactInterface]) -> list[dict]:
    """JSON-ready debug dump of detected interfaces."""
    return [
        {
            "body_a": itf.body_a,
            "body_b": itf.body_b,
            "mu": itf.mu,
            "points": [p.position.tolist() for p in itf.points],
            "normal": itf.normal.tolist(),
        }
        for itf in interfaces
    ]
