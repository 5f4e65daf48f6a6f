"""Placement refinement by iterative perturb-and-align.

Each iteration detects the payload points near the scene, nudges them
toward the horizontally-projected centre of mass, replaces each with the
best-improvement map sample among its nearest neighbours, and rigidly
aligns the payload to those targets. A final distance-gated alignment
re-seats the payload on the scene. Iterations stop when the pose update
falls below the translation/rotation thresholds.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.spatial import cKDTree

from .errors import PlacementError
from .geometry import matrix_to_quat, plane_basis, point_in_convex_polygon, rotation_angle
from .robustness import RobustnessMap
from .scene import Pose, RigidBody, Scene


@dataclass(frozen=True)
class IpaConfig:
    perturb_magnitude: float = 0.1  # M, meters
    neighbours: int = 15  # K
    gate: float | None = None  # D, meters; default 2x map sample spacing
    contact_tol: float | None = None  # step-1 contact band; default gate / 4
    max_iters: int = 50
    translation_tol: float = 1e-4
    rotation_tol: float = 1e-3
    sample_density: float | None = None  # payload surface density; default map's


@dataclass
class PlacementState:
    body: RigidBody
    pose: Pose
    contacts_object: np.ndarray = field(default_factory=lambda: np.zeros((0, 3)))
    contacts_scene: np.ndarray = field(default_factory=lambda: np.zeros((0, 3)))
    iteration: int = 0


def kabsch_align(B: np.ndarray, S: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Proper rigid transform (R, t) minimizing sum ||R B_i + t - S_i||^2.

    Requires matched, non-collinear point sets of size >= 3; the sign of
    the smallest singular direction is corrected so det(R) = +1.
    """
    B = np.asarray(B, dtype=float)
    S = np.asarray(S, dtype=float)
    if B.shape != S.shape or B.shape[0] < 3 or B.shape[1] != 3:
        raise PlacementError("kabsch_align needs matched point sets of size >= 3")
    bc, sc = B.mean(axis=0), S.mean(axis=0)
    H = (B - bc).T @ (S - sc)
    U, sig, Vt = np.linalg.svd(H)
    if sig[1] < 1e-12 * max(sig[0], 1e-30):
        raise PlacementError("degenerate (collinear or coincident) point sets")
    d = np.sign(np.linalg.det(Vt.T @ U.T))
    R = Vt.T @ np.diag([1.0, 1.0, d]) @ U.T
    t = sc - R @ bc
    return R, t


def _compose(R: np.ndarray, t: np.ndarray, pose: Pose) -> Pose:
    new_R = R @ pose.rotation
    new_t = R @ pose.translation + t
    return Pose(new_t, matrix_to_quat(new_R))


def _align_or_translate(B: np.ndarray, S: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Kabsch when the correspondences span a plane; plain translation when
    they collapse (e.g. every contact snapped to one best map sample)."""
    try:
        return kabsch_align(B, S)
    except PlacementError:
        return np.eye(3), S.mean(axis=0) - B.mean(axis=0)


def body_surface_points(body: RigidBody, density: float) -> np.ndarray:
    """Body-frame surface samples: vertices plus uniform face grids."""
    poly = body.shape
    spacing = 1.0 / math.sqrt(density)
    pts = [v for v in poly.vertices]
    for fi, face in enumerate(poly.faces):
        n = poly.face_normals[fi]
        fpts = poly.vertices[face]
        u, v = plane_basis(n)
        flat = np.column_stack([fpts @ u, fpts @ v])
        h = poly.face_offsets[fi]
        lo, hi = flat.min(axis=0), flat.max(axis=0)
        ext = hi - lo
        nu = max(1, int(np.floor(ext[0] / spacing)))
        nv = max(1, int(np.floor(ext[1] / spacing)))
        off = lo + (ext - spacing * np.array([nu, nv])) / 2.0
        for j in range(nv):
            for i in range(nu):
                q = off + spacing * np.array([i + 0.5, j + 0.5])
                if point_in_convex_polygon(q, flat, tol=-1e-9):
                    pts.append(q[0] * u + q[1] * v + h * n)
    return np.array(pts)


class _SceneSurface:
    """Closest-point and penetration queries against all scene bodies."""

    def __init__(self, scene: Scene):
        self.bodies = list(scene.bodies)

    def closest(self, p: np.ndarray) -> tuple[np.ndarray, float, float]:
        """(closest surface point, unsigned distance, penetration depth)."""
        best_q, best_d = None, math.inf
        pen = 0.0
        for b in self.bodies:
            q, d, _ = b.world_poly.closest_surface_point(p)
            if d < best_d:
                best_q, best_d = q, d
            if b.world_poly.contains(p, tol=0.0):
                pen = max(pen, d)
        return best_q, best_d, pen


def mean_contact_sri(map_: RobustnessMap, contact_points: np.ndarray) -> float:
    """Mean improvement value of the map samples nearest the contacts."""
    tree = cKDTree(map_.points)
    _, idx = tree.query(np.atleast_2d(contact_points), k=1)
    sri = map_.sri_values
    return float(np.mean(sri[np.atleast_1d(idx)]))


def ipa_refine(
    scene: Scene,
    sri_map: RobustnessMap,
    payload: RigidBody,
    init_pose: Pose,
    config: IpaConfig | None = None,
) -> tuple[PlacementState, list[dict]]:
    """Refine a candidate payload pose toward higher-improvement support.

    Returns the final state and a per-iteration trace (pose, contact
    count, mean contact improvement). Raises PlacementError when the
    payload loses contact with the scene or the contact set degenerates.
    """
    config = config or IpaConfig()
    spacing = 1.0 / math.sqrt(sri_map.density)
    gate = config.gate if config.gate is not None else 2.0 * spacing
    contact_tol = config.contact_tol if config.contact_tol is not None else gate / 4.0
    density = config.sample_density if config.sample_density is not None else sri_map.density

    map_points = sri_map.points
    map_sri = sri_map.sri_values
    tree = cKDTree(map_points)
    surface = _SceneSurface(scene)
    samples_body = body_surface_points(payload, density)

    pose = init_pose
    trace: list[dict] = []
    state = PlacementState(payload, pose)
    for it in range(config.max_iters):
        world = pose.apply(samples_body)
        near_info = [surface.closest(p) for p in world]
        dists = np.array([d for _, d, _ in near_info])
        mask = dists <= contact_tol  # touching and penetrating points
        if not mask.any():
            mask = dists <= gate  # detached pose: fall back to the near band
        B = world[mask]
        if len(B) == 0:
            raise PlacementError(f"placement lost contact at iteration {it}")

        com_w = pose.apply(payload.com[None, :])[0]
        v = np.array([1.0, 1.0, 0.0]) * (com_w - B.mean(axis=0))
        if np.linalg.norm(v) > 1e-12:
            B = B + config.perturb_magnitude * v / np.linalg.norm(v)

        k = min(config.neighbours, len(map_points))
        _, nbr = tree.query(B, k=k)
        nbr = np.atleast_2d(nbr)
        S = np.empty_like(B)
        for row, idxs in enumerate(nbr):
            idxs = np.atleast_1d(idxs)
            best = idxs[int(np.argmax(map_sri[idxs]))]
            # ties resolve to the lowest sample index
            ties = idxs[np.abs(map_sri[idxs] - map_sri[best]) < 1e-15]
            S[row] = map_points[int(ties.min())]

        if len(B) >= 3:
            R, t = _align_or_translate(B, S)
            pose = _compose(R, t, pose)
        elif len(B) > 0:
            pose = Pose(pose.translation + (S.mean(axis=0) - B.mean(axis=0)), pose.quaternion)

        # re-seat the payload on the scene with distance-gated pairs
        world = pose.apply(samples_body)
        pairs_b, pairs_s = [], []
        for p in world:
            q, d, _ = surface.closest(p)
            if d <= gate:
                pairs_b.append(p)
                pairs_s.append(q)
        if len(pairs_b) >= 3:
            R2, t2 = _align_or_translate(np.array(pairs_b), np.array(pairs_s))
            pose = _compose(R2, t2, pose)

        # resolve any residual penetration by backing out along the scene normal
        world = pose.apply(samples_body)
        worst_pen, worst_vec = 0.0, None
        for p in world:
            q, _, pen = surface.closest(p)
            if pen > worst_pen:
                worst_pen, worst_vec = pen, q - p
        if worst_pen > 1e-4 and worst_vec is not None:
            pose = Pose(pose.translation + worst_vec, pose.quaternion)

        state = PlacementState(payload.with_pose(pose), pose, B, S, it + 1)
        trace.append(
            {
                "iteration": it,
                "translation": pose.translation.tolist(),
                "quaternion": pose.quaternion.tolist(),
                "contacts": int(mask.sum()),
                "mean_sri": mean_contact_sri(sri_map, B),
            }
        )
        if it > 0:
            dt = np.linalg.norm(pose.translation - prev_pose.translation)
            dr = rotation_angle(pose.rotation @ prev_pose.rotation.T)
            if dt < config.translation_tol and dr < config.rotation_tol:
                break
        prev_pose = pose
    return state, trace


def contact_points_of_state(
    scene: Scene, state: PlacementState, gate: float
) -> np.ndarray:
    """Current payload points within `gate` of the scene surface."""
    surface = _SceneSurface(scene)
    samples = state.pose.apply(body_surface_points(state.body, 64.0))
    out = [p for p in samples if surface.closest(p)[1] <= gate]
    return np.array(out) if out else np.zeros((0, 3))
