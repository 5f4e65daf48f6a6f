"""Toppling robustness: super-objects, form closure, and pivot axes.

Toppling is analyzed under ideal (infinite-friction) contact conditions:
a rigid sub-assembly can rotate about an oriented convex-hull edge of its
boundary contact points only if every off-axis contact strictly detaches.
The force required to topple follows from the lever arms of gravity and
of the applied force about each such axis.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass

import numpy as np
from scipy.optimize import linprog
from scipy.spatial import ConvexHull

from .contacts import ContactInterface
from .errors import RigidStaticsError
from .geometry import convex_hull_2d, dedupe_points, plane_basis, skew, unit
from .scene import Scene

log = logging.getLogger(__name__)

ENUMERATION_SOFT_LIMIT = 12  # free bodies; beyond this an explicit cap is required
ON_AXIS_TOL = 1e-9


@dataclass(frozen=True)
class BoundaryContact:
    position: np.ndarray
    normal: np.ndarray  # inward normal of the super-object at this contact
    key: tuple


@dataclass(frozen=True)
class TopplingAxis:
    """Oriented pivot: positive rotation about `direction` through `source`
    detaches every off-axis boundary contact."""

    source: np.ndarray
    direction: np.ndarray
    twist: np.ndarray  # 6-vector [source x direction; direction]
    tau_gravity: float  # gravity torque of the super-object about the axis


@dataclass(frozen=True)
class SuperObject:
    bodies: frozenset
    mass: float
    com: np.ndarray
    boundary_contacts: tuple


@dataclass(frozen=True)
class ToppleAnalysis:
    super_object: SuperObject
    form_closed: bool
    axes: tuple


def connected_free_subsets(adjacency: dict[str, set[str]], cap: int | None = None):
    """All connected subsets of the free-body graph, each exactly once.

    Uses ordered extension with exclusive neighborhoods, so the cost is
    proportional to the number of subsets emitted. Raises when the count
    exceeds `cap`.
    """
    nodes = sorted(adjacency)
    index = {v: i for i, v in enumerate(nodes)}
    out: list[frozenset] = []

    def emit(sub: set[str]):
        out.append(frozenset(sub))
        if cap is not None and len(out) > cap:
            raise RigidStaticsError(
                f"more than {cap} connected sub-assemblies; raise the cap to proceed"
            )

    def extend(sub: set[str], ext: list[str], root: int, closure: set[str]):
        # closure = sub plus every neighbour of sub; extension candidates
        # outside it are reachable only through the newly added node, which
        # guarantees each subset is generated exactly once
        emit(sub)
        ext = list(ext)
        while ext:
            w = ext.pop()
            fresh = [u for u in sorted(adjacency[w]) if index[u] > root and u not in closure]
            extend(sub | {w}, ext + fresh, root, closure | set(fresh) | {w})

    for v in nodes:
        ext0 = sorted(u for u in adjacency[v] if index[u] > index[v])
        extend({v}, ext0, index[v], {v} | set(ext0))
    return out


def enumerate_super_objects(
    scene: Scene, interfaces: list[ContactInterface], cap: int | None = None
) -> list[SuperObject]:
    """Connected sub-assemblies of non-fixed bodies with their boundary
    contacts. With more than 12 free bodies an explicit cap is required
    (the count grows exponentially)."""
    free = set(scene.free_ids)
    if cap is None and len(free) > ENUMERATION_SOFT_LIMIT:
        raise RigidStaticsError(
            f"{len(free)} free bodies: super-object enumeration needs an explicit cap"
        )
    adjacency: dict[str, set[str]] = {b: set() for b in free}
    for itf in interfaces:
        if itf.body_a in free and itf.body_b in free:
            adjacency[itf.body_a].add(itf.body_b)
            adjacency[itf.body_b].add(itf.body_a)
    subsets = connected_free_subsets(adjacency, cap)
    supers = []
    for sub in sorted(subsets, key=lambda s: (len(s), sorted(s))):
        mass = sum(scene.body(b).mass for b in sub)
        com = sum(scene.body(b).mass * scene.body(b).com_world for b in sub) / mass
        contacts = []
        for itf in interfaces:
            a_in, b_in = itf.body_a in sub, itf.body_b in sub
            if a_in == b_in:
                continue  # internal interface or unrelated
            sign = 1.0 if a_in else -1.0
            for p in itf.points:
                contacts.append(BoundaryContact(p.position, sign * p.normal, p.key))
        supers.append(SuperObject(frozenset(sub), mass, com, tuple(contacts)))
    return supers


def grasp_matrix(super_object: SuperObject) -> np.ndarray:
    """Hard-finger wrench basis: five columns per boundary contact
    (+u, +v, +n, -u, -v), torque rows = position x force rows."""
    cols = []
    for c in super_object.boundary_contacts:
        n = c.normal
        u, v = plane_basis(n)
        for f in (u, v, n, -u, -v):
            cols.append(np.concatenate([f, np.cross(c.position, f)]))
    if not cols:
        return np.zeros((6, 0))
    return np.column_stack(cols)


def form_closure(super_object: SuperObject) -> bool:
    """First-order form closure test: full-rank wrench basis plus a strictly
    positive combination summing to zero. LP failures count as not closed."""
    G = grasp_matrix(super_object)
    if G.shape[1] == 0:
        return False
    s = np.linalg.svd(G, compute_uv=False)
    if (s > 1e-9 * s[0]).sum() < 6:
        return False
    try:
        res = linprog(
            c=np.ones(G.shape[1]),
            A_eq=G,
            b_eq=np.zeros(6),
            bounds=[(1.0, None)] * G.shape[1],
            method="highs",
        )
    except ValueError as exc:
        log.warning("form-closure LP failed (%s); treating as not closed", exc)
        return False
    return res.status == 0


def _candidate_axes(points: np.ndarray) -> list[tuple[np.ndarray, np.ndarray]]:
    """Oriented (source, direction) candidates from the contact hull edges."""
    pts = dedupe_points(points, tol=ON_AXIS_TOL)
    if len(pts) < 2:
        if len(pts) == 1:
            log.warning("single contact point: point pivots are not modelled")
        return []
    cands: list[tuple[np.ndarray, np.ndarray]] = []
    centered = pts - pts.mean(axis=0)
    _, sv, vt = np.linalg.svd(centered, full_matrices=False)
    if len(pts) == 2 or sv[1] < 1e-9 * max(sv[0], 1.0):
        d = unit(vt[0])
        t = centered @ d
        lo, hi = pts[np.argmin(t)], pts[np.argmax(t)]
        e = unit(hi - lo)
        return [(lo, e), (lo, -e)]
    if sv[2] < 1e-9 * max(sv[0], 1.0):
        n = unit(vt[2])
        u, v = plane_basis(n)
        flat = np.column_stack([pts @ u, pts @ v])
        hull = convex_hull_2d(flat)
        lift = pts.mean(axis=0)
        h0 = lift @ n
        for k in range(len(hull)):
            a2, b2 = hull[k], hull[(k + 1) % len(hull)]
            a3 = a2[0] * u + a2[1] * v + h0 * n
            b3 = b2[0] * u + b2[1] * v + h0 * n
            e = unit(b3 - a3)
            cands.append((a3, e))
            cands.append((a3, -e))
        return cands
    hull = ConvexHull(pts)
    edges = set()
    for simplex in hull.simplices:
        for i in range(3):
            a, b = simplex[i], simplex[(i + 1) % 3]
            edges.add((min(a, b), max(a, b)))
    for a, b in sorted(edges):
        e = unit(pts[b] - pts[a])
        cands.append((pts[a], e))
        cands.append((pts[a], -e))
    return cands


def valid_toppling_axes(
    super_object: SuperObject,
    gravity: np.ndarray,
    eps: float = 1e-9,
) -> list[TopplingAxis]:
    """Axes about which a positive rotation detaches every boundary contact.

    Contacts on the axis line itself are exempt (their displacement is zero
    by construction); every other contact must move strictly along its
    inward normal.
    """
    if eps <= 0:
        raise ValueError("eps must be positive")
    contacts = super_object.boundary_contacts
    if not contacts:
        return []
    pts = np.array([c.position for c in contacts])
    axes = []
    for source, direction in _candidate_axes(pts):
        ok = True
        for c in contacts:
            r = c.position - source
            radial = r - (r @ direction) * direction
            if np.linalg.norm(radial) < ON_AXIS_TOL:
                continue  # on the axis: zero displacement, exempt
            v = np.cross(direction, r)
            if c.normal @ v <= eps:
                ok = False
                break
        if not ok:
            continue
        fg = super_object.mass * gravity
        tau_g = float(np.cross(super_object.com - source, fg) @ direction)
        twist = np.concatenate([skew(source) @ direction, direction])
        axes.append(TopplingAxis(source, direction, twist, tau_g))
    return axes


def analyze_toppling(
    scene: Scene,
    interfaces: list[ContactInterface],
    cap: int | None = None,
    eps: float = 1e-9,
) -> list[ToppleAnalysis]:
    """Form closure and valid axes for every connected sub-assembly."""
    analyses = []
    for sup in enumerate_super_objects(scene, interfaces, cap):
        closed = form_closure(sup)
        axes = () if closed else tuple(valid_toppling_axes(sup, scene.gravity, eps))
        analyses.append(ToppleAnalysis(sup, closed, axes))
    return analyses


def axis_lever(axis: TopplingAxis, point: np.ndarray, direction: np.ndarray) -> float:
    """Torque per newton of a force along `direction` at `point` about the axis."""
    return float(np.cross(point - axis.source, direction) @ axis.direction)


def sr_top(
    point: np.ndarray,
    direction: np.ndarray,
    analyses: list[ToppleAnalysis],
) -> tuple[float, ToppleAnalysis | None]:
    """Force magnitude at `point` along `direction` that first topples any
    of the given sub-assemblies; inf when no axis is driven.

    Only axes the force actually drives (positive lever about the detaching
    orientation) can topple; gravity's restoring torque sets the threshold.
    """
    best = math.inf
    best_analysis = None
    for analysis in analyses:
        for axis in analysis.axes:
            lever = axis_lever(axis, point, direction)
            if lever <= 1e-12:
                continue  # the force opposes or misses this pivot
            s = max(0.0, -axis.tau_gravity) / lever
            if s < best:
                best = s
                best_analysis = analysis
    return best, best_analysis


def topple_improvement(
    point: np.ndarray,
    direction: np.ndarray,
    s_eval: float,
    analyses: list[ToppleAnalysis],
) -> tuple[float, float]:
    """Rate at which a force at `point` along `direction` improves toppling
    robustness, and the magnitude s* that balances the axis torques best.

    The least-squares objective sums the squared total torque over all
    axes; its derivative is linear in s, so s* has the closed form
    -(sum tau_g * tau_e) / (sum tau_e^2), clamped to s* >= 0.
    """
    sum_ge = 0.0
    sum_ee = 0.0
    for analysis in analyses:
        for axis in analysis.axes:
            lever = axis_lever(axis, point, direction)
            sum_ge += axis.tau_gravity * lever
            sum_ee += lever * lever
    if sum_ee <= 0.0:
        return 0.0, 0.0
    improvement = 2.0 * sum_ge - 2.0 * s_eval * sum_ee
    s_star = max(0.0, -sum_ge / sum_ee)
    return improvement, s_star
