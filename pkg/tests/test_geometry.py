"""Geometry primitive tests."""

import numpy as np
import pytest

from rigidstatics.geometry import (
    ConvexPolyhedron,
    convex_clip,
    convex_hull_2d,
    matrix_to_quat,
    plane_basis,
    point_in_convex_polygon,
    polygon_area,
    quat_to_matrix,
    skew,
    unit,
)

rng = np.random.default_rng(7)


def random_quat():
    q = rng.normal(size=4)
    return q / np.linalg.norm(q)


def test_skew_matches_cross():
    for _ in range(20):
        u, v = rng.normal(size=3), rng.normal(size=3)
        assert np.allclose(skew(u) @ v, np.cross(u, v))


def test_quat_matrix_roundtrip():
    for _ in range(50):
        q = random_quat()
        R = quat_to_matrix(q)
        assert np.allclose(R @ R.T, np.eye(3), atol=1e-12)
        assert np.isclose(np.linalg.det(R), 1.0)
        q2 = matrix_to_quat(R)
        # q and -q encode the same rotation
        assert np.allclose(quat_to_matrix(q2), R, atol=1e-9)


def test_rigid_transform_preserves_distances():
    """Pairwise vertex distances survive a rigid transform to 1e-9 relative."""
    verts = rng.normal(size=(12, 3)) * 3.0
    q = random_quat()
    R = quat_to_matrix(q)
    t = rng.normal(size=3)
    moved = verts @ R.T + t
    d0 = np.linalg.norm(verts[:, None] - verts[None, :], axis=-1)
    d1 = np.linalg.norm(moved[:, None] - moved[None, :], axis=-1)
    mask = d0 > 0
    assert np.max(np.abs(d1[mask] - d0[mask]) / d0[mask]) < 1e-9


def test_plane_basis_right_handed():
    for _ in range(30):
        n = unit(rng.normal(size=3))
        u, v = plane_basis(n)
        assert abs(u @ n) < 1e-12 and abs(v @ n) < 1e-12
        assert np.allclose(np.cross(u, v), n, atol=1e-12)


def test_convex_clip_squares():
    sq = np.array([[0, 0], [2, 0], [2, 2], [0, 2]], dtype=float)
    shifted = sq + np.array([1.0, 1.0])
    inter = convex_clip(sq, shifted)
    assert np.isclose(polygon_area(inter), 1.0)
    far = sq + np.array([5.0, 0.0])
    assert len(convex_clip(sq, far)) == 0


def test_convex_hull_2d_square_and_degenerate():
    pts = np.array([[0, 0], [1, 0], [1, 1], [0, 1], [0.5, 0.5], [0.2, 0.8]])
    hull = convex_hull_2d(pts)
    assert len(hull) == 4
    assert np.isclose(polygon_area(hull), 1.0)
    line = np.array([[0, 0], [0.3, 0.3], [1, 1], [0.7, 0.7]])
    seg = convex_hull_2d(line)
    assert len(seg) == 2
    assert np.allclose(sorted(seg.tolist()), [[0, 0], [1, 1]])


def test_point_in_convex_polygon():
    sq = np.array([[0, 0], [1, 0], [1, 1], [0, 1]], dtype=float)
    assert point_in_convex_polygon(np.array([0.5, 0.5]), sq)
    assert point_in_convex_polygon(np.array([0.0, 0.5]), sq)  # boundary
    assert not point_in_convex_polygon(np.array([1.5, 0.5]), sq)


def test_box_polyhedron_faces():
    box = ConvexPolyhedron.box([1, 2, 3])
    assert len(box.faces) == 6
    assert len(box.edges) == 12
    # outward normals: every vertex on the inner side of every face
    for i in range(6):
        assert np.all(box.face_normals[i] @ box.vertices.T - box.face_offsets[i] < 1e-12)
    vol, cen = box.volume_and_centroid()
    assert np.isclose(vol, 48.0)
    assert np.allclose(cen, 0, atol=1e-12)


def test_from_vertices_rejects_interior_vertex():
    verts = np.concatenate([ConvexPolyhedron.box([1, 1, 1]).vertices, [[0.0, 0.0, 0.0]]])
    with pytest.raises(ValueError, match="convex"):
        ConvexPolyhedron.from_vertices(verts)


def test_tetrahedron_faces_and_containment():
    verts = np.array([[0, 0, 0], [1, 0, 0], [0, 1, 0], [0, 0, 1]], dtype=float)
    tet = ConvexPolyhedron.from_vertices(verts)
    assert len(tet.faces) == 4
    assert tet.contains(np.array([0.1, 0.1, 0.1]))
    assert not tet.contains(np.array([1.0, 1.0, 1.0]))
    vol, _ = tet.volume_and_centroid()
    assert np.isclose(vol, 1.0 / 6.0)


def test_closest_surface_point():
    box = ConvexPolyhedron.box([1, 1, 1])
    q, d, n = box.closest_surface_point(np.array([0.0, 0.0, 2.0]))
    assert np.isclose(d, 1.0)
    assert np.allclose(q, [0, 0, 1])
    assert np.allclose(n, [0, 0, 1])
    # interior point projects to the nearest face
    q, d, _ = box.closest_surface_point(np.array([0.9, 0.0, 0.0]))
    assert np.isclose(d, 0.1)
    assert np.allclose(q, [1.0, 0.0, 0.0])
    assert box.signed_distance(np.array([0.9, 0.0, 0.0])) < 0
