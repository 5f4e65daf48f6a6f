"""Minimal impulse-based rigid-body simulator for static-scene replay.

Convex bodies under gravity plus an optional frame acceleration, with
vertex-vs-hull contacts solved by sequential impulses: accumulated normal
impulses with Baumgarte positional bias (the contact error-reduction
parameter) and circularly clamped Coulomb friction. Deliberately small:
no sleeping, no restitution, no joints. The hot loop is plain-float
Python; numpy only builds per-step contact candidates.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

CONTACT_TOL = 1e-3  # vertex-to-surface distance that still forms a contact
SLOP = 2e-4  # penetration allowance before positional bias engages


def _cross(a, b):
    return (
        a[1] * b[2] - a[2] * b[1],
        a[2] * b[0] - a[0] * b[2],
        a[0] * b[1] - a[1] * b[0],
    )


def _dot(a, b):
    return a[0] * b[0] + a[1] * b[1] + a[2] * b[2]


@dataclass
class SimBody:
    name: str
    vertices: np.ndarray  # (n, 3) relative to the centre of mass
    planes: np.ndarray  # (m, 4): n . x <= d in the same frame
    mass: float
    inertia_inv_body: np.ndarray  # (3, 3), zeros for fixed bodies
    mu: float
    fixed: bool
    R: np.ndarray = field(default_factory=lambda: np.eye(3))
    p: np.ndarray = field(default_factory=lambda: np.zeros(3))  # com, world
    v: np.ndarray = field(default_factory=lambda: np.zeros(3))
    w: np.ndarray = field(default_factory=lambda: np.zeros(3))

    @property
    def inv_mass(self) -> float:
        return 0.0 if self.fixed else 1.0 / self.mass

    def world_vertices(self) -> np.ndarray:
        return self.vertices @ self.R.T + self.p

    def inertia_inv_world(self) -> np.ndarray:
        if self.fixed:
            return np.zeros((3, 3))
        return self.R @ self.inertia_inv_body @ self.R.T


def solid_inertia(vertices_rel: np.ndarray, faces: np.ndarray, mass: float) -> np.ndarray:
    """Inertia tensor of a uniform convex solid about the frame origin.

    `faces` holds hull triangles (indices); the solid is decomposed into
    tetrahedra fanned from the origin, each contributing the exact
    second-moment integral V/20 * (sum p p^T + s s^T).
    """
    C = np.zeros((3, 3))
    volume = 0.0
    for tri in faces:
        a, b, c = vertices_rel[tri[0]], vertices_rel[tri[1]], vertices_rel[tri[2]]
        vol = np.dot(a, np.cross(b, c)) / 6.0
        s = a + b + c
        C += vol / 20.0 * (np.outer(a, a) + np.outer(b, b) + np.outer(c, c) + np.outer(s, s))
        volume += vol
    rho = mass / volume
    C *= rho
    return np.trace(C) * np.eye(3) - C


@dataclass
class Contact:
    a: int  # body indices into the world list
    b: int
    point: tuple
    normal: tuple  # from a into b (pushes b out of a)
    penetration: float
    jn: float = 0.0
    jt1: float = 0.0
    jt2: float = 0.0
    t1: tuple = (0.0, 0.0, 0.0)
    t2: tuple = (0.0, 0.0, 0.0)


class World:
    def __init__(self, bodies: list[SimBody], gravity, erp: float = 0.2,
                 iterations: int = 10):
        self.bodies = bodies
        self.gravity = np.asarray(gravity, dtype=float)
        self.erp = erp
        self.iterations = iterations
        self.frame_accel = np.zeros(3)
        self._pairs = self._candidate_pairs()
        self._steps = 0

    def _candidate_pairs(self):
        pairs = []
        n = len(self.bodies)
        for i in range(n):
            for j in range(n):
                if i == j:
                    continue
                if self.bodies[j].fixed:
                    continue  # vertices of j only collide into movable... keep both ways
                pairs.append((i, j))
        return [(i, j) for i, j in pairs if not (self.bodies[i].fixed and self.bodies[j].fixed)]

    def _detect(self) -> list[Contact]:
        contacts = []
        world_planes = {}
        world_verts = {}
        for k, body in enumerate(self.bodies):
            world_verts[k] = body.world_vertices()
            n_w = body.planes[:, :3] @ body.R.T
            d_w = body.planes[:, 3] + n_w @ body.p
            world_planes[k] = (n_w, d_w)
        for i, j in self._pairs:
            # vertices of body j against the hull of body i
            n_w, d_w = world_planes[i]
            phi = world_verts[j] @ n_w.T - d_w  # (verts, planes)
            depth = phi.max(axis=1)
            for vi in np.nonzero(depth < CONTACT_TOL)[0]:
                face = int(np.argmax(phi[vi]))
                normal = n_w[face]
                contacts.append(
                    Contact(
                        i,
                        j,
                        tuple(world_verts[j][vi]),
                        tuple(normal),
                        float(-depth[vi]),
                    )
                )
        return contacts

    def step(self, dt: float) -> None:
        self._steps += 1
        for body in self.bodies:
            if body.fixed:
                continue
            body.v = body.v + dt * (self.gravity + self.frame_accel)
        contacts = self._detect()
        if contacts:
            self._solve(contacts, dt)
        for body in self.bodies:
            if body.fixed:
                continue
            body.p = body.p + dt * body.v
            wn = np.linalg.norm(body.w)
            if wn > 1e-12:
                axis = body.w / wn
                K = np.array(
                    [[0, -axis[2], axis[1]], [axis[2], 0, -axis[0]], [-axis[1], axis[0], 0]]
                )
                ang = wn * dt
                dR = np.eye(3) + math.sin(ang) * K + (1 - math.cos(ang)) * (K @ K)
                body.R = dR @ body.R
                if self._steps % 64 == 0:  # drift is ~1e-15 per step
                    u, _, vt = np.linalg.svd(body.R)
                    body.R = u @ vt

    def _solve(self, contacts: list[Contact], dt: float) -> None:
        bodies = self.bodies
        # cache plain-float state for the hot loop (numpy ops on 3-vectors
        # would dominate the step cost)
        inv_m = [b.inv_mass for b in bodies]
        inv_I = [tuple(tuple(row) for row in b.inertia_inv_world()) for b in bodies]
        vel = [list(b.v) for b in bodies]
        omg = [list(b.w) for b in bodies]
        pos = [tuple(b.p) for b in bodies]

        def matvec(M, x):
            return (
                M[0][0] * x[0] + M[0][1] * x[1] + M[0][2] * x[2],
                M[1][0] * x[0] + M[1][1] * x[1] + M[1][2] * x[2],
                M[2][0] * x[0] + M[2][1] * x[1] + M[2][2] * x[2],
            )

        pre = []
        for c in contacts:
            n = c.normal
            # deterministic tangent basis
            ref = (1.0, 0.0, 0.0) if abs(n[0]) < 0.9 else (0.0, 1.0, 0.0)
            t1 = _cross(n, ref)
            t1n = math.sqrt(_dot(t1, t1))
            t1 = (t1[0] / t1n, t1[1] / t1n, t1[2] / t1n)
            t2 = _cross(n, t1)
            c.t1, c.t2 = t1, t2
            ra = (c.point[0] - pos[c.a][0], c.point[1] - pos[c.a][1], c.point[2] - pos[c.a][2])
            rb = (c.point[0] - pos[c.b][0], c.point[1] - pos[c.b][1], c.point[2] - pos[c.b][2])
            mu = min(bodies[c.a].mu, bodies[c.b].mu)
            bias = (self.erp / dt) * max(0.0, c.penetration - SLOP)
            masses = []
            for axis in (n, t1, t2):
                ran = _cross(ra, axis)
                rbn = _cross(rb, axis)
                k = inv_m[c.a] + inv_m[c.b]
                k += _dot(ran, matvec(inv_I[c.a], ran))
                k += _dot(rbn, matvec(inv_I[c.b], rbn))
                masses.append(1.0 / k if k > 1e-12 else 0.0)
            pre.append((c, ra, rb, mu, bias, masses))

        def rel_velocity(c, ra, rb, axis):
            va = (
                vel[c.a][0] + omg[c.a][1] * ra[2] - omg[c.a][2] * ra[1],
                vel[c.a][1] + omg[c.a][2] * ra[0] - omg[c.a][0] * ra[2],
                vel[c.a][2] + omg[c.a][0] * ra[1] - omg[c.a][1] * ra[0],
            )
            vb = (
                vel[c.b][0] + omg[c.b][1] * rb[2] - omg[c.b][2] * rb[1],
                vel[c.b][1] + omg[c.b][2] * rb[0] - omg[c.b][0] * rb[2],
                vel[c.b][2] + omg[c.b][0] * rb[1] - omg[c.b][1] * rb[0],
            )
            return (vb[0] - va[0]) * axis[0] + (vb[1] - va[1]) * axis[1] + (vb[2] - va[2]) * axis[2]

        def apply(c, ra, rb, axis, j):
            imp = (axis[0] * j, axis[1] * j, axis[2] * j)
            ma, mb = inv_m[c.a], inv_m[c.b]
            if ma:
                vel[c.a][0] -= imp[0] * ma
                vel[c.a][1] -= imp[1] * ma
                vel[c.a][2] -= imp[2] * ma
                tau = _cross(ra, imp)
                dw = matvec(inv_I[c.a], tau)
                omg[c.a][0] -= dw[0]
                omg[c.a][1] -= dw[1]
                omg[c.a][2] -= dw[2]
            if mb:
                vel[c.b][0] += imp[0] * mb
                vel[c.b][1] += imp[1] * mb
                vel[c.b][2] += imp[2] * mb
                tau = _cross(rb, imp)
                dw = matvec(inv_I[c.b], tau)
                omg[c.b][0] += dw[0]
                omg[c.b][1] += dw[1]
                omg[c.b][2] += dw[2]

        for _ in range(self.iterations):
            for c, ra, rb, mu, bias, (kn, kt1, kt2) in pre:
                u_n = rel_velocity(c, ra, rb, c.normal)
                dj = -(u_n - bias) * kn
                new_jn = max(0.0, c.jn + dj)
                apply(c, ra, rb, c.normal, new_jn - c.jn)
                c.jn = new_jn

                max_t = mu * c.jn
                u1 = rel_velocity(c, ra, rb, c.t1)
                new_j1 = c.jt1 - u1 * kt1
                u2 = rel_velocity(c, ra, rb, c.t2)
                new_j2 = c.jt2 - u2 * kt2
                norm = math.hypot(new_j1, new_j2)
                if norm > max_t and norm > 1e-12:
                    scale = max_t / norm
                    new_j1 *= scale
                    new_j2 *= scale
                apply(c, ra, rb, c.t1, new_j1 - c.jt1)
                apply(c, ra, rb, c.t2, new_j2 - c.jt2)
                c.jt1, c.jt2 = new_j1, new_j2

        for k, body in enumerate(bodies):
            if body.fixed:
                continue
            body.v = np.array(vel[k])
            body.w = np.array(omg[k])

    # -- measurement -----------------------------------------------------------

    def max_free_speed(self) -> float:
        return max(
            (float(np.linalg.norm(b.v)) for b in self.bodies if not b.fixed),
            default=0.0,
        )

    def zero_velocities(self) -> None:
        for body in self.bodies:
            body.v = np.zeros(3)
            body.w = np.zeros(3)
