"""Static robustness queries, surface maps, and placement sampling weights.

A query (point, direction) on a stable assembly returns the force the
assembly withstands before slipping (max-flow of per-interface capacities
toward the fixed node) or toppling (lever arms about valid pivot axes),
the minimum of the two, and the improvement rate a force there would
produce. Improvements combine the slip slope summed over interfaces on
simple paths to the fixed node and the toppling torque-balance rate, with
unit weights by default.
"""

from __future__ import annotations

import math
from collections import deque
from dataclasses import dataclass

import numpy as np

from .cig import FIXED_NODE, ContactInterfaceGraph, FlowNetwork, build_cig, path_membership, simplify, slipping_max_flow
from .contacts import ContactInterface, detect_contacts
from .equilibrium import ForceSolution, SolverConfig, solve_forces
from .errors import UnstableAssemblyError
from .scene import Scene
from .slipping import interface_capacity, interface_improvement
from .toppling import ToppleAnalysis, analyze_toppling, sr_top, topple_improvement

MERGED_SOURCE = "__source__"


@dataclass(frozen=True)
class RobustnessQuery:
    point: np.ndarray
    direction: np.ndarray


@dataclass(frozen=True)
class RobustnessResult:
    sr: float
    sr_slip: float
    sr_top: float
    sri: float
    governing: str  # "slip" | "topple" | "none"


@dataclass(frozen=True)
class MapSample:
    point: np.ndarray
    normal: np.ndarray  # outward surface normal; query direction is -normal
    sr: float
    sri: float
    body_id: str
    face_index: int


@dataclass
class RobustnessMap:
    samples: list[MapSample]
    density: float
    fingerprint: str

    @property
    def points(self) -> np.ndarray:
        return np.array([s.point for s in self.samples])

    @property
    def sri_values(self) -> np.ndarray:
        return np.array([s.sri for s in self.samples])

    @property
    def sr_values(self) -> np.ndarray:
        return np.array([s.sr for s in self.samples])


class RobustnessEngine:
    """Precomputes contacts, forces, graph, and toppling analyses for a
    scene, then answers robustness queries against that snapshot."""

    def __init__(
        self,
        scene: Scene,
        interfaces: list[ContactInterface] | None = None,
        solution: ForceSolution | None = None,
        config: SolverConfig | None = None,
        tol_gap: float = 1e-4,
        super_cap: int | None = None,
        s_eval: float | None = None,
        payload_mass: float | None = None,
        sri_weights: tuple[float, float] = (1.0, 1.0),
    ):
        self.scene = scene
        self.config = config or SolverConfig()
        self.tol_gap = tol_gap
        self.interfaces = interfaces if interfaces is not None else detect_contacts(scene, tol_gap)
        self.solution = solution if solution is not None else solve_forces(scene, self.interfaces, self.config)
        if not self.solution.stable:
            raise UnstableAssemblyError("assembly unstable, robustness undefined")
        self.graph = build_cig(scene, self.interfaces)
        self.topple_analyses: list[ToppleAnalysis] = analyze_toppling(
            scene, self.interfaces, cap=super_cap
        )
        self.by_iid = {itf.iid: itf for itf in self.interfaces}
        gnorm = float(np.linalg.norm(scene.gravity))
        if s_eval is not None:
            self.s_eval = s_eval
        elif payload_mass is not None:
            self.s_eval = payload_mass * gnorm / 3.0
        else:
            self.s_eval = 1.0
        self.sri_weights = sri_weights

    # -- helpers -----------------------------------------------------------

    def body_of_point(self, point: np.ndarray) -> str:
        """Body whose surface carries the point (within 10x the contact gap)."""
        best, best_d = None, math.inf
        for b in self.scene.bodies:
            _, d, _ = b.world_poly.closest_surface_point(np.asarray(point, float))
            if d < best_d:
                best, best_d = b.id, d
        if best is None or best_d > 10 * self.tol_gap:
            raise ValueError(f"point {point} is not on any body surface")
        return best

    def _flow_graph(self, target: frozenset) -> tuple[ContactInterfaceGraph, dict[str, bool], str]:
        """Graph with target nodes merged into one source; per-interface
        orientation flags (True = transmitted force presses into body_b)."""
        fixed = set(self.scene.fixed_ids)

        def node_of(bid: str) -> str:
            if bid in target:
                return MERGED_SOURCE
            return FIXED_NODE if bid in fixed else bid

        nodes = sorted({node_of(b.id) for b in self.scene.bodies} | {MERGED_SOURCE})
        edges = []
        from .cig import GraphEdge

        for itf in self.interfaces:
            u, v = node_of(itf.body_a), node_of(itf.body_b)
            if u == v:
                continue
            edges.append(GraphEdge(itf.iid, u, v))
        graph = ContactInterfaceGraph(nodes, edges)

        # hop distances orient the transmitted force away from the source;
        # edge endpoints are positional: e.u <- body_a, e.v <- body_b
        dist_src = self._bfs(graph, MERGED_SOURCE)
        dist_sink = self._bfs(graph, FIXED_NODE)
        flipped: dict[str, bool] = {}
        for e in edges:
            du, dv = dist_src.get(e.u, math.inf), dist_src.get(e.v, math.inf)
            if du != dv:
                recv_is_b = dv > du
            else:
                su, sv = dist_sink.get(e.u, math.inf), dist_sink.get(e.v, math.inf)
                recv_is_b = sv < su if su != sv else e.v > e.u
            flipped[e.iid] = recv_is_b
        return graph, flipped, MERGED_SOURCE

    @staticmethod
    def _bfs(graph: ContactInterfaceGraph, start: str) -> dict[str, int]:
        adj: dict[str, set[str]] = {n: set() for n in graph.nodes}
        for e in graph.edges:
            adj[e.u].add(e.v)
            adj[e.v].add(e.u)
        dist = {start: 0}
        queue = deque([start])
        while queue:
            u = queue.popleft()
            for v in adj[u]:
                if v not in dist:
                    dist[v] = dist[u] + 1
                    queue.append(v)
        return dist

    def _analyses_for(self, target: frozenset) -> list[ToppleAnalysis]:
        return [a for a in self.topple_analyses if target <= a.super_object.bodies]

    # -- queries -----------------------------------------------------------

    def query(
        self,
        point,
        direction,
        body: str | frozenset | None = None,
        validate_surface: bool = True,
    ) -> RobustnessResult:
        """Static robustness and improvement for a force at `point` along
        the unit `direction` (world frame)."""
        point = np.asarray(point, dtype=float)
        direction = np.asarray(direction, dtype=float)
        if abs(np.linalg.norm(direction) - 1.0) > 1e-9:
            raise ValueError("direction must be a unit vector")
        if body is None:
            body = self.body_of_point(point)
        target = frozenset([body]) if isinstance(body, str) else frozenset(body)
        if validate_surface and isinstance(body, str):
            _, d, _ = self.scene.body(body).world_poly.closest_surface_point(point)
            if d > 10 * self.tol_gap:
                raise ValueError(f"point is {d:.2e} m away from body {body!r} surface")

        fixed = set(self.scene.fixed_ids)
        if target <= fixed:
            return RobustnessResult(math.inf, math.inf, math.inf, 0.0, "none")

        graph, flipped, source = self._flow_graph(target)
        caps = {
            e.iid: interface_capacity(
                self.by_iid[e.iid], self.solution, direction, flipped[e.iid]
            )
            for e in graph.edges
        }
        reduced = simplify(graph.with_capacities(caps), source, FIXED_NODE)
        slip = slipping_max_flow(FlowNetwork(reduced, source, FIXED_NODE))

        _, path_pairs = path_membership(graph, source, FIXED_NODE)
        slip_gain = 0.0
        for e in graph.edges:
            if e.pair() in path_pairs:
                slip_gain += interface_improvement(
                    self.by_iid[e.iid], self.solution, direction, self.s_eval, flipped[e.iid]
                )

        analyses = self._analyses_for(target)
        top, _ = sr_top(point, direction, analyses)
        top_gain, _ = topple_improvement(point, direction, self.s_eval, analyses)

        sri = self.sri_weights[0] * slip_gain + self.sri_weights[1] * top_gain
        sr = min(slip, top)
        if math.isinf(slip) and math.isinf(top):
            governing = "none"
        else:
            governing = "slip" if slip <= top else "topple"
        return RobustnessResult(sr, slip, top, sri, governing)

    # -- maps ---------------------------------------------------------------

    def surface_samples(self, density: float) -> list[tuple[np.ndarray, np.ndarray, str, int]]:
        """Uniform grid samples (point, outward normal, body, face) on all
        exposed faces, ordered by (body id, face index, grid index)."""
        if density <= 0:
            raise ValueError("density must be positive")
        from .geometry import plane_basis, point_in_convex_polygon

        spacing = 1.0 / math.sqrt(density)
        others = {b.id: [o for o in self.scene.bodies if o.id != b.id] for b in self.scene.bodies}
        out = []
        for body in sorted(self.scene.bodies, key=lambda b: b.id):
            poly = body.world_poly
            for fi, face in enumerate(poly.faces):
                n = poly.face_normals[fi]
                pts = poly.vertices[face]
                u, v = plane_basis(n)
                flat = np.column_stack([pts @ u, pts @ v])
                h = poly.face_offsets[fi]
                lo, hi = flat.min(axis=0), flat.max(axis=0)
                ext = hi - lo
                nu = max(1, int(np.floor(ext[0] / spacing)))
                nv = max(1, int(np.floor(ext[1] / spacing)))
                off = lo + (ext - spacing * np.array([nu, nv])) / 2.0

                def exposed(q2) -> np.ndarray | None:
                    if not point_in_convex_polygon(q2, flat, tol=-1e-9):
                        return None
                    p = q2[0] * u + q2[1] * v + h * n
                    probe = p + 2.0 * self.tol_gap * n
                    if any(o.world_poly.contains(probe, tol=0.0) for o in others[body.id]):
                        return None  # covered by a touching body
                    return p

                face_samples = []
                for j in range(nv):
                    for i in range(nu):
                        q2 = off + spacing * np.array([i + 0.5, j + 0.5])
                        if q2[0] > hi[0] or q2[1] > hi[1]:
                            continue
                        p = exposed(q2)
                        if p is not None:
                            face_samples.append((p, n.copy(), body.id, fi))
                if not face_samples:  # face smaller than the grid: use centroid
                    p = exposed(flat.mean(axis=0))
                    if p is not None:
                        face_samples.append((p, n.copy(), body.id, fi))
                out.extend(face_samples)
        return out

    def build_map(self, density: float = 100.0) -> RobustnessMap:
        """SR/SRI sampled over every exposed face, direction = inward normal."""
        samples = []
        for p, n, bid, fi in self.surface_samples(density):
            res = self.query(p, -n, body=bid, validate_surface=False)
            samples.append(MapSample(p, n, res.sr, res.sri, bid, fi))
        return RobustnessMap(samples, density, self.scene.fingerprint())


def query(
    scene: Scene,
    solution: ForceSolution,
    graph: ContactInterfaceGraph,
    q: RobustnessQuery,
    interfaces: list[ContactInterface] | None = None,
    **kwargs,
) -> RobustnessResult:
    """Functional form of RobustnessEngine.query for one-off use."""
    engine = RobustnessEngine(scene, interfaces=interfaces, solution=solution, **kwargs)
    if graph is not None:
        engine.graph = graph
    return engine.query(q.point, q.direction)


def sampling_weights(map_: RobustnessMap, k: int, lam: float = 0.995) -> np.ndarray:
    """Placement sampling probabilities from the SRI map.

    Weights are the SRI excess over a threshold that decays from the map
    maximum: w = max(0, SRI - lam^k * SRI_max). When every weight is zero
    (k = 0 leaves only the argmax at exactly zero excess), probability
    mass goes uniformly to the threshold-attaining samples; if none
    attain it, to all samples.
    """
    if not map_.samples:
        raise ValueError("empty robustness map")
    if not (0.0 < lam < 1.0):
        raise ValueError("lambda must lie in (0, 1)")
    if k < 0:
        raise ValueError("iteration must be >= 0")
    sri = map_.sri_values
    threshold = (lam**k) * float(sri.max())
    w = np.maximum(0.0, sri - threshold)
    total = float(w.sum())
    if total > 0.0:
        return w / total
    attain = sri >= threshold - 1e-15
    if attain.any():
        w = attain.astype(float)
    else:
        w = np.ones_like(sri)
    return w / w.sum()


def map_to_csv(map_: RobustnessMap, path: str) -> None:
    """CSV export: x,y,z,nx,ny,nz,sr,sri with 'inf' sentinels."""

    def fmt(x: float) -> str:
        return "inf" if math.isinf(x) else f"{x:.9g}"

    with open(path, "w") as fh:
        fh.write("x,y,z,nx,ny,nz,sr,sri\n")
        for s in map_.samples:
            nums = [*s.point, *s.normal]
            fh.write(",".join(f"{v:.9g}" for v in nums))
            fh.write(f",{fmt(s.sr)},{fmt(s.sri)}\n")


def map_to_ply(map_: RobustnessMap, path: str, channel: str = "sr") -> None:
    """ASCII point-cloud PLY with an 8-bit scalar channel for visualization.

    Finite values are scaled to the 99th percentile; infinities clamp to 255.
    """
    values = map_.sr_values if channel == "sr" else map_.sri_values
    finite = values[np.isfinite(values)]
    if len(finite):
        lo = float(finite.min())
        hi = float(np.percentile(finite, 99))
        span = max(hi - lo, 1e-12)
    else:
        lo, span = 0.0, 1.0
    with open(path, "w") as fh:
        fh.write("ply\nformat ascii 1.0\n")
        fh.write(f"element vertex {len(map_.samples)}\n")
        for prop in ("x", "y", "z", "nx", "ny", "nz"):
            fh.write(f"property float {prop}\n")
        fh.write("property uchar intensity\nend_header\n")
        for s, val in zip(map_.samples, values):
            if math.isinf(val):
                level = 255
            else:
                level = int(np.clip(254.0 * (val - lo) / span, 0, 254))
            coords = " ".join(f"{v:.6g}" for v in [*s.point, *s.normal])
            fh.write(f"{coords} {level}\n")
