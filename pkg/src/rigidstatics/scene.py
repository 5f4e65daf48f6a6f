"""Scene model: posed rigid convex bodies with mass, friction, and gravity.

Scene files are JSON with the following layout (lengths in meters, masses
in kg, quaternions in [w, x, y, z] order):

    {
      "bodies": [
        {"id": "floor",
         "shape": {"type": "box", "half_extents": [2, 2, 0.1]},
         "pose": {"translation": [0, 0, -0.1], "quaternion": [1, 0, 0, 0]},
         "mass": 0.0, "fixed": true, "mu": 0.5},
        {"id": "cube",
         "shape": {"type": "hull", "vertices": [[...], ...]},
         "mass": 1.0, "com": [0, 0, 0]}
      ],
      "friction_overrides": [{"a": "floor", "b": "cube", "mu": 0.3}],
      "gravity": [0, 0, -9.81]
    }

`com` defaults to the shape centroid, `fixed` to false, `mu` to 0.5, and
`pose` to the identity. A scene must contain at least one fixed body.
When two bodies with different per-body `mu` touch, the pair coefficient
is the minimum of the two defaults unless an explicit override exists
(conservative convention; see README).
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass, field

import numpy as np

from .errors import SceneParseError, SceneValidationError
from .geometry import ConvexPolyhedron, quat_to_matrix

DEFAULT_GRAVITY = (0.0, 0.0, -9.81)
DEFAULT_MU = 0.5


@dataclass(frozen=True)
class Pose:
    """Rigid transform body -> world."""

    translation: np.ndarray
    quaternion: np.ndarray  # [w, x, y, z], unit norm

    @property
    def rotation(self) -> np.ndarray:
        return quat_to_matrix(self.quaternion)

    def apply(self, points: np.ndarray) -> np.ndarray:
        return points @ self.rotation.T + self.translation

    @classmethod
    def identity(cls) -> "Pose":
        return cls(np.zeros(3), np.array([1.0, 0.0, 0.0, 0.0]))


@dataclass
class RigidBody:
    """A posed convex rigid body."""

    id: str
    shape: ConvexPolyhedron  # body-frame geometry
    pose: Pose
    mass: float
    com: np.ndarray  # body frame
    fixed: bool = False
    mu: float = DEFAULT_MU
    shape_spec: dict = field(default_factory=dict, repr=False)

    def __post_init__(self):
        self._world_poly: ConvexPolyhedron | None = None

    @property
    def world_poly(self) -> ConvexPolyhedron:
        """World-frame polyhedron (cached; scenes are immutable after load)."""
        if self._world_poly is None:
            self._world_poly = ConvexPolyhedron(
                self.pose.apply(self.shape.vertices), self.shape.faces
            )
        return self._world_poly

    @property
    def com_world(self) -> np.ndarray:
        return self.pose.apply(self.com[None, :])[0]

    def with_pose(self, pose: Pose) -> "RigidBody":
        return RigidBody(self.id, self.shape, pose, self.mass, self.com,
                         self.fixed, self.mu, self.shape_spec)


@dataclass
class Scene:
    """An immutable assembly of rigid bodies."""

    bodies: list[RigidBody]
    friction_overrides: dict[frozenset, float] = field(default_factory=dict)
    gravity: np.ndarray = field(default_factory=lambda: np.array(DEFAULT_GRAVITY))

    def __post_init__(self):
        self._by_id = {b.id: b for b in self.bodies}

    def body(self, body_id: str) -> RigidBody:
        try:
            return self._by_id[body_id]
        except KeyError:
            raise SceneValidationError(f"unknown body id {body_id!r}") from None

    @property
    def fixed_ids(self) -> list[str]:
        return [b.id for b in self.bodies if b.fixed]

    @property
    def free_ids(self) -> list[str]:
        return [b.id for b in self.bodies if not b.fixed]

    def with_body(self, body: RigidBody) -> "Scene":
        """New scene with `body` appended (or replaced if the id exists)."""
        bodies = [b for b in self.bodies if b.id != body.id] + [body]
        return Scene(bodies, dict(self.friction_overrides), self.gravity.copy())

    def fingerprint(self) -> str:
        return hashlib.sha256(
            json.dumps(scene_to_dict(self), sort_keys=True).encode()
        ).hexdigest()[:16]


def friction_for(scene: Scene, a: str, b: str) -> float:
    """Pair friction coefficient: explicit override, else min of defaults."""
    body_a, body_b = scene.body(a), scene.body(b)
    key = frozenset((a, b))
    if key in scene.friction_overrides:
        return scene.friction_overrides[key]
    return min(body_a.mu, body_b.mu)


def _shape_from_spec(spec, path: str) -> tuple[ConvexPolyhedron, dict]:
    if not isinstance(spec, dict) or "type" not in spec:
        raise SceneValidationError(f"{path}: shape must be an object with a 'type'")
    kind = spec["type"]
    if kind == "box":
        he = spec.get("half_extents")
        if he is None or len(he) != 3 or any(v <= 0 for v in he):
            raise SceneValidationError(f"{path}.half_extents: three positive numbers required")
        return ConvexPolyhedron.box(he), {"type": "box", "half_extents": [float(v) for v in he]}
    if kind == "hull":
        verts = spec.get("vertices")
        if verts is None:
            raise SceneValidationError(f"{path}.vertices: required for hull shapes")
        arr = np.asarray(verts, dtype=float)
        if arr.ndim != 2 or arr.shape[1] != 3 or arr.shape[0] < 4:
            raise SceneValidationError(f"{path}.vertices: need >= 4 points of dimension 3")
        try:
            poly = ConvexPolyhedron.from_vertices(arr)
        except ValueError as exc:
            raise SceneValidationError(f"{path}: {exc}") from exc
        return poly, {"type": "hull", "vertices": arr.tolist()}
    raise SceneValidationError(f"{path}.type: unsupported shape type {kind!r}")


def _pose_from_spec(spec, path: str) -> Pose:
    if spec is None:
        return Pose.identity()
    t = np.asarray(spec.get("translation", [0.0, 0.0, 0.0]), dtype=float)
    q = np.asarray(spec.get("quaternion", [1.0, 0.0, 0.0, 0.0]), dtype=float)
    if t.shape != (3,):
        raise SceneValidationError(f"{path}.translation: expected 3 numbers")
    if q.shape != (4,):
        raise SceneValidationError(f"{path}.quaternion: expected 4 numbers [w,x,y,z]")
    if abs(np.linalg.norm(q) - 1.0) > 1e-9:
        raise SceneValidationError(f"{path}.quaternion: must have unit norm (within 1e-9)")
    return Pose(t, q)


def load_scene(document) -> Scene:
    """Parse and validate a scene from JSON text, a dict, or a file path.

    Raises SceneParseError for malformed JSON and SceneValidationError with
    the offending field path for invariant violations.
    """
    if isinstance(document, Scene):
        return document
    if isinstance(document, (bytes, str)):
        text = document
        if isinstance(text, str) and "\n" not in text and text.strip().endswith(".json"):
            try:
                with open(text) as fh:
                    text = fh.read()
            except OSError as exc:
                raise SceneParseError(f"cannot read scene file: {exc}") from exc
        try:
            data = json.loads(text)
        except json.JSONDecodeError as exc:
            raise SceneParseError(f"invalid JSON at line {exc.lineno}, column {exc.colno}: {exc.msg}") from exc
    else:
        data = document
    if not isinstance(data, dict) or "bodies" not in data:
        raise SceneValidationError("top level must be an object with a 'bodies' array")

    bodies: list[RigidBody] = []
    seen_ids: set[str] = set()
    for i, spec in enumerate(data["bodies"]):
        path = f"bodies[{i}]"
        if "id" not in spec:
            raise SceneValidationError(f"{path}.id: required")
        bid = str(spec["id"])
        if bid in seen_ids:
            raise SceneValidationError(f"{path}.id: duplicate body id {bid!r}")
        seen_ids.add(bid)
        shape, shape_spec = _shape_from_spec(spec.get("shape"), f"{path}.shape")
        pose = _pose_from_spec(spec.get("pose"), f"{path}.pose")
        fixed = bool(spec.get("fixed", False))
        mass = float(spec.get("mass", 0.0))
        if not fixed and mass <= 0:
            raise SceneValidationError(f"{path}.mass: mass must be positive for non-fixed bodies")
        if fixed and mass < 0:
            raise SceneValidationError(f"{path}.mass: mass must be non-negative")
        mu = float(spec.get("mu", DEFAULT_MU))
        if mu < 0:
            raise SceneValidationError(f"{path}.mu: friction coefficient must be >= 0")
        if "com" in spec:
            com = np.asarray(spec["com"], dtype=float)
            if com.shape != (3,):
                raise SceneValidationError(f"{path}.com: expected 3 numbers")
            if not shape.contains(com, tol=1e-9):
                raise SceneValidationError(f"{path}.com: centre of mass outside the shape hull")
        else:
            _, com = shape.volume_and_centroid()
        bodies.append(RigidBody(bid, shape, pose, mass, com, fixed, mu, shape_spec))

    if not any(b.fixed for b in bodies):
        raise SceneValidationError("bodies: scene needs at least one fixed body")

    overrides: dict[frozenset, float] = {}
    for j, ov in enumerate(data.get("friction_overrides", [])):
        path = f"friction_overrides[{j}]"
        try:
            a, b, mu = str(ov["a"]), str(ov["b"]), float(ov["mu"])
        except (KeyError, TypeError, ValueError) as exc:
            raise SceneValidationError(f"{path}: entries need 'a', 'b', and numeric 'mu'") from exc
        for bid in (a, b):
            if bid not in seen_ids:
                raise SceneValidationError(f"{path}: unknown body id {bid!r}")
        if mu < 0:
            raise SceneValidationError(f"{path}.mu: friction coefficient must be >= 0")
        overrides[frozenset((a, b))] = mu

    gravity = np.asarray(data.get("gravity", DEFAULT_GRAVITY), dtype=float)
    if gravity.shape != (3,):
        raise SceneValidationError("gravity: expected 3 numbers")
    return Scene(bodies, overrides, gravity)


def scene_to_dict(scene: Scene) -> dict:
    """Canonical JSON-ready dict; load_scene(scene_to_dict(s)) == s."""
    bodies = []
    for b in scene.bodies:
        shape = b.shape_spec or {"type": "hull", "vertices": b.shape.vertices.tolist()}
        bodies.append(
            {
                "id": b.id,
                "shape": shape,
                "pose": {
                    "translation": b.pose.translation.tolist(),
                    "quaternion": b.pose.quaternion.tolist(),
                },
                "mass": b.mass,
                "com": b.com.tolist(),
                "fixed": b.fixed,
                "mu": b.mu,
            }
        )
    return {
        "bodies": bodies,
        "friction_overrides": [
            {"a": sorted(k)[0], "b": sorted(k)[1], "mu": v}
            for k, v in sorted(scene.friction_overrides.items(), key=lambda kv: sorted(kv[0]))
        ],
        "gravity": scene.gravity.tolist(),
    }


def scene_to_json(scene: Scene, indent: int = 2) -> str:
    return json.dumps(scene_to_dict(scene), indent=indent)
