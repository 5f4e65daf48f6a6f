"""Convex geometry primitives: quaternions, polygon clipping, polyhedra."""

from __future__ import annotations

import numpy as np
from scipy.spatial import ConvexHull

COPLANAR_TOL = 1e-9


def unit(v: np.ndarray) -> np.ndarray:
    """Normalize a vector; raises on near-zero input."""
    n = np.linalg.norm(v)
    if n < 1e-15:
        raise ValueError("cannot normalize a zero vector")
    return np.asarray(v, dtype=float) / n


def skew(v: np.ndarray) -> np.ndarray:
    """Cross-product matrix: skew(u) @ w == cross(u, w)."""
    x, y, z = v
    return np.array([[0.0, -z, y], [z, 0.0, -x], [-y, x, 0.0]])


def quat_to_matrix(q: np.ndarray) -> np.ndarray:
    """Rotation matrix from a unit quaternion in [w, x, y, z] order."""
    w, x, y, z = q
    return np.array(
        [
            [1 - 2 * (y * y + z * z), 2 * (x * y - w * z), 2 * (x * z + w * y)],
            [2 * (x * y + w * z), 1 - 2 * (x * x + z * z), 2 * (y * z - w * x)],
            [2 * (x * z - w * y), 2 * (y * z + w * x), 1 - 2 * (x * x + y * y)],
        ]
    )


def matrix_to_quat(R: np.ndarray) -> np.ndarray:
    """Unit quaternion [w, x, y, z] from a proper rotation matrix."""
    t = np.trace(R)
    if t > 0:
        s = np.sqrt(t + 1.0) * 2
        w = 0.25 * s
        x = (R[2, 1] - R[1, 2]) / s
        y = (R[0, 2] - R[2, 0]) / s
        z = (R[1, 0] - R[0, 1]) / s
    else:
        i = int(np.argmax(np.diag(R)))
        j, k = (i + 1) % 3, (i + 2) % 3
        s = np.sqrt(1.0 + R[i, i] - R[j, j] - R[k, k]) * 2
        q = np.empty(3)
        q[i] = 0.25 * s
        q[j] = (R[j, i] + R[i, j]) / s
        q[k] = (R[k, i] + R[i, k]) / s
        w = (R[k, j] - R[j, k]) / s
        x, y, z = q
    q = np.array([w, x, y, z])
    return q / np.linalg.norm(q)


def rotation_angle(R: np.ndarray) -> float:
    """Rotation angle in radians of a proper rotation matrix."""
    c = (np.trace(R) - 1.0) / 2.0
    return float(np.arccos(np.clip(c, -1.0, 1.0)))


def plane_basis(normal: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Deterministic right-handed tangent pair (u, v) with n = u x v."""
    n = unit(normal)
    ref = np.array([1.0, 0.0, 0.0])
    if abs(n @ ref) > 0.9:
        ref = np.array([0.0, 1.0, 0.0])
    u = unit(ref - (ref @ n) * n)
    v = np.cross(n, u)
    return u, v


def polygon_area(pts: np.ndarray) -> float:
    """Shoelace area of a 2-D polygon given as an (n, 2) array."""
    x, y = pts[:, 0], pts[:, 1]
    return 0.5 * abs(np.sum(x * np.roll(y, -1) - np.roll(x, -1) * y))


def order_ccw(pts: np.ndarray) -> np.ndarray:
    """Order 2-D points counter-clockwise about their centroid."""
    c = pts.mean(axis=0)
    ang = np.arctan2(pts[:, 1] - c[1], pts[:, 0] - c[0])
    return pts[np.argsort(ang)]


def convex_hull_2d(pts: np.ndarray) -> np.ndarray:
    """Andrew monotone chain; returns hull vertices in CCW order.

    Degenerate inputs (collinear points) return the two extreme points;
    a single cluster returns one point.
    """
    pts = np.unique(np.round(pts, 12), axis=0)
    if len(pts) == 1:
        return pts
    order = np.lexsort((pts[:, 1], pts[:, 0]))
    pts = pts[order]

    def cross(o, a, b):
        return (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0])

    lower: list[np.ndarray] = []
    for p in pts:
        while len(lower) >= 2 and cross(lower[-2], lower[-1], p) <= 1e-18:
            lower.pop()
        lower.append(p)
    upper: list[np.ndarray] = []
    for p in pts[::-1]:
        while len(upper) >= 2 and cross(upper[-2], upper[-1], p) <= 1e-18:
            upper.pop()
        upper.append(p)
    hull = lower[:-1] + upper[:-1]
    if len(hull) < 2:  # all points coincident after rounding
        return np.array([pts[0]])
    if len(hull) == 2 or polygon_area(np.array(hull)) < 1e-18:
        # collinear: keep the two extremes
        d = pts - pts[0]
        t = d @ (pts[-1] - pts[0])
        return np.array([pts[np.argmin(t)], pts[np.argmax(t)]])
    return np.array(hull)


def point_in_convex_polygon(p: np.ndarray, poly: np.ndarray, tol: float = 1e-9) -> bool:
    """Containment test for a CCW convex polygon in 2-D."""
    n = len(poly)
    for i in range(n):
        a, b = poly[i], poly[(i + 1) % n]
        e = b - a
        if e[0] * (p[1] - a[1]) - e[1] * (p[0] - a[0]) < -tol:
            return False
    return True


def convex_clip(subject: np.ndarray, clip: np.ndarray) -> np.ndarray:
    """Sutherland-Hodgman clip of CCW convex polygon `subject` by `clip`."""
    output = [np.asarray(p, dtype=float) for p in subject]
    n = len(clip)
    for i in range(n):
        if not output:
            break
        a, b = clip[i], clip[(i + 1) % n]
        e = b - a
        inp = output
        output = []

        def inside(p):
            return e[0] * (p[1] - a[1]) - e[1] * (p[0] - a[0]) >= -1e-12

        def intersect(p, q):
            d = q - p
            denom = e[0] * d[1] - e[1] * d[0]
            t = (e[0] * (a[1] - p[1]) - e[1] * (a[0] - p[0])) / denom
            return p + t * d

        for j, cur in enumerate(inp):
            prev = inp[j - 1]
            if inside(cur):
                if not inside(prev):
                    output.append(intersect(prev, cur))
                output.append(cur)
            elif inside(prev):
                output.append(intersect(prev, cur))
    return np.array(output) if output else np.empty((0, 2))


def clip_segment_to_polygon(p0: np.ndarray, p1: np.ndarray, poly: np.ndarray) -> np.ndarray:
    """Clip a 2-D segment against a CCW convex polygon; returns 0..2 points."""
    t0, t1 = 0.0, 1.0
    d = p1 - p0
    n = len(poly)
    for i in range(n):
        a, b = poly[i], poly[(i + 1) % n]
        e = b - a
        # inside: cross(e, p - a) >= 0
        denom = e[0] * d[1] - e[1] * d[0]
        num = e[0] * (p0[1] - a[1]) - e[1] * (p0[0] - a[0])
        if abs(denom) < 1e-15:
            if num < -1e-12:
                return np.empty((0, 2))
            continue
        t_hit = -num / denom
        if denom > 0:
            t0 = max(t0, t_hit)
        else:
            t1 = min(t1, t_hit)
        if t0 > t1 + 1e-12:
            return np.empty((0, 2))
    if t1 - t0 < 1e-12:
        return np.array([p0 + t0 * d])
    return np.array([p0 + t0 * d, p0 + t1 * d])


def dedupe_points(pts: np.ndarray, tol: float = 1e-7) -> np.ndarray:
    """Merge points closer than tol (greedy, order-stable)."""
    kept: list[np.ndarray] = []
    for p in pts:
        if all(np.linalg.norm(p - q) > tol for q in kept):
            kept.append(p)
    return np.array(kept)


class ConvexPolyhedron:
    """Convex polyhedron described by vertices and outward-oriented faces.

    Faces are vertex-index lists ordered CCW when viewed from outside;
    coplanar hull triangles are merged into single polygonal faces.
    """

    def __init__(self, vertices: np.ndarray, faces: list[list[int]]):
        self.vertices = np.asarray(vertices, dtype=float)
        self.faces = faces
        self.face_normals = np.array([self._face_normal(f) for f in faces])
        self.face_offsets = np.array(
            [self.face_normals[i] @ self.vertices[f[0]] for i, f in enumerate(faces)]
        )

    def _face_normal(self, face: list[int]) -> np.ndarray:
        pts = self.vertices[face]
        n = np.zeros(3)
        for i in range(len(pts)):
            n += np.cross(pts[i], pts[(i + 1) % len(pts)])
        return unit(n)

    @classmethod
    def from_vertices(cls, vertices: np.ndarray) -> "ConvexPolyhedron":
        """Build from a vertex cloud; rejects non-convex input.

        Every vertex must lie on the hull boundary (strictly interior
        vertices indicate a non-convex mesh description).
        """
        vertices = np.asarray(vertices, dtype=float)
        if vertices.shape[0] < 4:
            raise ValueError("a polyhedron needs at least 4 vertices")
        try:
            hull = ConvexHull(vertices)
        except Exception as exc:  # qhull rejects degenerate input
            raise ValueError(f"degenerate vertex set: {exc}") from exc
        scale = max(1.0, float(np.abs(vertices).max()))
        # distance of each vertex to its nearest face plane
        d = hull.equations[:, :3] @ vertices.T + hull.equations[:, 3:4]
        if np.min(np.abs(d), axis=0).max() > 1e-7 * scale:
            raise ValueError("vertex set is not convex: interior vertex found")
        faces = _merge_hull_faces(vertices, hull)
        return cls(vertices, faces)

    @classmethod
    def box(cls, half_extents) -> "ConvexPolyhedron":
        hx, hy, hz = half_extents
        verts = np.array(
            [[sx * hx, sy * hy, sz * hz] for sx in (-1, 1) for sy in (-1, 1) for sz in (-1, 1)]
        )
        return cls.from_vertices(verts)

    @property
    def edges(self) -> list[tuple[int, int]]:
        seen = set()
        for f in self.faces:
            for i in range(len(f)):
                a, b = f[i], f[(i + 1) % len(f)]
                seen.add((min(a, b), max(a, b)))
        return sorted(seen)

    def volume_and_centroid(self) -> tuple[float, np.ndarray]:
        """Exact volume and volume centroid via tetrahedra fanned from the mean."""
        o = self.vertices.mean(axis=0)
        vol = 0.0
        cen = np.zeros(3)
        for f in self.faces:
            pts = self.vertices[f]
            for i in range(1, len(pts) - 1):
                a, b, c = pts[0] - o, pts[i] - o, pts[i + 1] - o
                v = np.dot(a, np.cross(b, c)) / 6.0
                vol += v
                cen += v * (o + (a + b + c) / 4.0)
        if vol <= 0:
            raise ValueError("degenerate polyhedron volume")
        return vol, cen / vol

    def contains(self, p: np.ndarray, tol: float = 1e-9) -> bool:
        return bool(np.all(self.face_normals @ p - self.face_offsets <= tol))

    def signed_distance(self, p: np.ndarray) -> float:
        """Negative inside, positive outside (exact for convex shapes)."""
        closest, dist, _ = self.closest_surface_point(p)
        return -dist if self.contains(p) else dist

    def closest_surface_point(self, p: np.ndarray) -> tuple[np.ndarray, float, np.ndarray]:
        """Closest point on the boundary, its distance, and the face normal there."""
        best = None
        for i, f in enumerate(self.faces):
            n = self.face_normals[i]
            pts = self.vertices[f]
            u, v = plane_basis(n)
            poly2 = np.column_stack([pts @ u, pts @ v])
            q2 = np.array([p @ u, p @ v])
            h = n @ p - self.face_offsets[i]
            if point_in_convex_polygon(q2, poly2):
                cand = p - h * n
                d = abs(h)
            else:
                cand2, d2 = _closest_on_polygon_boundary(q2, poly2)
                cand = cand2[0] * u + cand2[1] * v + self.face_offsets[i] * n
                d = float(np.hypot(d2, h))
            if best is None or d < best[1]:
                best = (cand, d, n)
        return best


def _closest_on_polygon_boundary(q: np.ndarray, poly: np.ndarray) -> tuple[np.ndarray, float]:
    best_p, best_d = None, np.inf
    n = len(poly)
    for i in range(n):
        a, b = poly[i], poly[(i + 1) % n]
        ab = b - a
        t = np.clip((q - a) @ ab / max(ab @ ab, 1e-30), 0.0, 1.0)
        c = a + t * ab
        d = float(np.linalg.norm(q - c))
        if d < best_d:
            best_p, best_d = c, d
    return best_p, best_d


def _merge_hull_faces(vertices: np.ndarray, hull: ConvexHull) -> list[list[int]]:
    """Group coplanar qhull simplices into polygonal faces, CCW from outside."""
    groups: list[dict] = []
    scale = max(1.0, float(np.abs(vertices).max()))
    for simplex, eq in zip(hull.simplices, hull.equations):
        n, off = eq[:3], -eq[3]
        placed = False
        for g in groups:
            if g["n"] @ n > 1 - 1e-9 and abs(g["off"] - off) < 1e-7 * scale:
                g["idx"].update(simplex)
                placed = True
                break
        if not placed:
            groups.append({"n": n.copy(), "off": off, "idx": set(simplex)})
    faces = []
    for g in groups:
        idx = sorted(g["idx"])
        pts = vertices[idx]
        u, v = plane_basis(g["n"])
        c = pts.mean(axis=0)
        ang = np.arctan2((pts - c) @ v, (pts - c) @ u)
        ordered = [idx[k] for k in np.argsort(ang)]
        faces.append(ordered)
    # deterministic face order: by normal then offset
    faces.sort(key=lambda f: tuple(np.round(vertices[f].mean(axis=0), 9)))
    return faces
