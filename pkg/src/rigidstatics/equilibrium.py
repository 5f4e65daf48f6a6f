"""Minimum-energy resolution of contact forces in a static assembly.

The relaxed program (default) minimizes the sum of squared contact forces
subject to per-body wrench equilibrium, linearized friction polygons, and
compressive normals; it is a convex QP whose infeasibility certifies
instability. The full mode additionally enforces virtual-displacement
consistency, friction-opposes-slip directions, and normal complementarity
via successive convexification from the relaxed solution. Full mode
certifies KKT feasibility of the returned point, not global optimality.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field

import numpy as np
from cvxopt import matrix as cvxmat
from cvxopt import solvers as cvxsolvers
from scipy.linalg import lstsq
from scipy.optimize import linprog

from .contacts import ContactInterface, ContactPoint
from .errors import IndeterminateSolveError
from .geometry import skew
from .scene import Scene

log = logging.getLogger(__name__)

cvxsolvers.options["show_progress"] = False

TANGENT_DISP_MAX = 1e-3
NORMAL_DISP_MIN = -1e-3
NORMAL_DISP_MAX = 1e-5


@dataclass(frozen=True)
class SolverConfig:
    polygon_sides: int = 8
    mode: str = "relaxed"  # "relaxed" | "full"
    max_iters: int = 50
    tol_force: float = 1e-7
    epsilon: float = 1e-5  # complementarity slack (full mode)

    def __post_init__(self):
        if self.polygon_sides not in (4, 8, 16):
            raise ValueError("polygon_sides must be 4, 8, or 16")
        if self.mode not in ("relaxed", "full"):
            raise ValueError("mode must be 'relaxed' or 'full'")
        if self.tol_force <= 0 or self.max_iters < 1:
            raise ValueError("tolerances and iteration caps must be positive")


@dataclass(frozen=True)
class ContactForce:
    """Solved force at one contact point, in its local frame."""

    tangential: np.ndarray  # (f_u, f_v), N
    normal: float  # f_n, N
    mu: float

    @property
    def contact_condition(self) -> float:
        """Slack to the slipping boundary: mu*|f_n| - |f_t|."""
        return self.mu * abs(self.normal) - float(np.linalg.norm(self.tangential))

    @property
    def local(self) -> np.ndarray:
        return np.array([self.tangential[0], self.tangential[1], self.normal])


@dataclass(frozen=True)
class VirtualTwist:
    linear: np.ndarray
    angular: np.ndarray

    @property
    def vector(self) -> np.ndarray:
        return np.concatenate([self.linear, self.angular])


@dataclass
class ForceSolution:
    forces: dict = field(default_factory=dict)  # point key -> ContactForce
    twists: dict = field(default_factory=dict)  # body id -> VirtualTwist
    stiffness: dict = field(default_factory=dict)  # point key -> kappa
    objective: float = 0.0
    mode: str = "relaxed"
    status: str = "stable"  # "stable" | "unstable"

    @property
    def stable(self) -> bool:
        return self.status == "stable"


def friction_polygon_rows(mu: float, n_sides: int) -> np.ndarray:
    """Half-plane rows C with C @ [f_u, f_v, f_n] <= 0 enforcing the
    inscribed regular polygon approximation of the Coulomb circle."""
    k = np.arange(n_sides)
    ang = 2.0 * np.pi * k / n_sides
    return np.column_stack(
        [np.cos(ang), np.sin(ang), -mu * np.cos(np.pi / n_sides) * np.ones(n_sides)]
    )


def inscribed_polygon_area_ratio(n_sides: int) -> float:
    """Area of the feasible tangential polygon over the Coulomb circle area.

    Computed from the actual half-plane geometry (unit friction circle):
    adjacent constraint boundaries intersect at the polygon vertices.
    """
    c = np.cos(np.pi / n_sides)
    verts = []
    for k in range(n_sides):
        t1 = 2.0 * np.pi * k / n_sides
        t2 = 2.0 * np.pi * (k + 1) / n_sides
        A = np.array([[np.cos(t1), np.sin(t1)], [np.cos(t2), np.sin(t2)]])
        verts.append(np.linalg.solve(A, np.array([c, c])))
    verts = np.array(verts)
    x, y = verts[:, 0], verts[:, 1]
    area = 0.5 * abs(np.sum(x * np.roll(y, -1) - np.roll(x, -1) * y))
    return float(area / np.pi)


def wrench_matrix(point: ContactPoint) -> np.ndarray:
    """Maps the local contact force to the world wrench on the receiver."""
    R = point.frame
    return np.vstack([R, skew(point.position) @ R])


def gravity_wrench(scene: Scene, body_id: str) -> np.ndarray:
    b = scene.body(body_id)
    f = b.mass * scene.gravity
    c = b.com_world
    return np.concatenate([f, np.cross(c, f)])


class _Assembly:
    """Flattened matrices of the force-resolution program."""

    def __init__(self, scene: Scene, interfaces: list[ContactInterface], config: SolverConfig):
        self.scene = scene
        self.interfaces = interfaces
        self.config = config
        self.points: list[ContactPoint] = []
        self.point_itf: list[ContactInterface] = []
        for itf in interfaces:
            for p in itf.points:
                self.points.append(p)
                self.point_itf.append(itf)
        self.n_pts = len(self.points)
        self.free = scene.free_ids
        self.body_row = {bid: 6 * i for i, bid in enumerate(self.free)}

        self.A = np.zeros((6 * len(self.free), 3 * self.n_pts))
        self.b = np.zeros(6 * len(self.free))
        for g, (p, itf) in enumerate(zip(self.points, self.point_itf)):
            B = wrench_matrix(p)
            for bid, sign in ((itf.body_a, 1.0), (itf.body_b, -1.0)):
                if bid in self.body_row:
                    r = self.body_row[bid]
                    self.A[r : r + 6, 3 * g : 3 * g + 3] += sign * B
        for bid in self.free:
            r = self.body_row[bid]
            self.b[r : r + 6] = -gravity_wrench(scene, bid)

        rows = []
        for g, itf in enumerate(self.point_itf):
            C = friction_polygon_rows(itf.mu, config.polygon_sides)
            block = np.zeros((C.shape[0] + 1, 3 * self.n_pts))
            block[: C.shape[0], 3 * g : 3 * g + 3] = C
            block[-1, 3 * g + 2] = -1.0  # f_n >= 0
            rows.append(block)
        self.G = np.vstack(rows) if rows else np.zeros((0, 3 * self.n_pts))
        self.h = np.zeros(self.G.shape[0])

    def force_scale(self) -> float:
        total = sum(self.scene.body(b).mass for b in self.free)
        return max(1.0, total * float(np.linalg.norm(self.scene.gravity)))


def _reduced_equalities(A: np.ndarray, b: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Full-row-rank equivalent of A x = b (assumes consistency checked)."""
    if A.shape[0] == 0:
        return A, b
    U, s, _ = np.linalg.svd(A, full_matrices=False)
    r = int(np.sum(s > 1e-11 * max(1.0, s[0] if len(s) else 1.0)))
    basis = U[:, :r]
    return basis.T @ A, basis.T @ b


def _feasible_lp(asm: _Assembly) -> bool:
    """Phase-1 feasibility of the relaxed constraint set via HiGHS."""
    n = asm.A.shape[1]
    res = linprog(
        c=np.zeros(n),
        A_ub=asm.G if asm.G.shape[0] else None,
        b_ub=asm.h if asm.G.shape[0] else None,
        A_eq=asm.A,
        b_eq=asm.b,
        bounds=[(None, None)] * n,
        method="highs",
    )
    return res.status == 0


def _solve_qp(asm: _Assembly, extra_eq=None, extra_ineq=None) -> np.ndarray | None:
    """Min ||x||^2 under assembly constraints; None means primal infeasible."""
    n = asm.A.shape[1]
    A, b = asm.A, asm.b
    if extra_eq is not None and extra_eq[0].shape[0]:
        A = np.vstack([A, extra_eq[0]])
        b = np.concatenate([b, extra_eq[1]])
    G, h = asm.G, asm.h
    if extra_ineq is not None and extra_ineq[0].shape[0]:
        G = np.vstack([G, extra_ineq[0]])
        h = np.concatenate([h, extra_ineq[1]])
    A_red, b_red = _reduced_equalities(A, b)
    P = cvxmat(2.0 * np.eye(n))
    q = cvxmat(np.zeros(n))
    opts = {
        "show_progress": False,
        "abstol": 1e-11,
        "reltol": 1e-11,
        "feastol": 1e-11,
        "maxiters": 200,
    }
    try:
        sol = cvxsolvers.qp(
            P, q, cvxmat(G), cvxmat(h), cvxmat(A_red), cvxmat(b_red), options=opts
        )
    except (ValueError, ArithmeticError) as exc:
        raise IndeterminateSolveError(f"QP solver failure: {exc}") from exc
    if sol["status"] == "optimal":
        return np.array(sol["x"]).ravel()
    if "infeasible" in sol["status"]:
        return None
    raise IndeterminateSolveError(f"QP solver did not converge (status {sol['status']})")


def solve_forces(
    scene: Scene, interfaces: list[ContactInterface], config: SolverConfig | None = None
) -> ForceSolution:
    """Resolve contact forces or certify the assembly unstable.

    Returns a ForceSolution with status "unstable" when no force
    assignment satisfies the relaxed constraint set. Raises
    IndeterminateSolveError when the solver cannot decide.
    """
    config = config or SolverConfig()
    asm = _Assembly(scene, interfaces, config)
    scale = asm.force_scale()

    if asm.n_pts == 0:
        if np.linalg.norm(asm.b) <= 1e-9 * scale:
            return ForceSolution(mode=config.mode, status="stable")
        return ForceSolution(mode=config.mode, status="unstable")

    x0, _, _, _ = lstsq(asm.A, asm.b, lapack_driver="gelsd")
    residual = float(np.linalg.norm(asm.A @ x0 - asm.b))
    if residual > 1e-8 * scale:
        return ForceSolution(mode=config.mode, status="unstable")

    if asm.G.shape[0] and np.max(asm.G @ x0) <= 1e-10 * scale:
        x = x0  # min-norm point already satisfies every inequality
    else:
        if not _feasible_lp(asm):
            return ForceSolution(mode=config.mode, status="unstable")
        try:
            x = _solve_qp(asm)
        except IndeterminateSolveError:
            raise
        if x is None:
            raise IndeterminateSolveError(
                "QP reported infeasibility on an LP-feasible constraint set"
            )

    solution = _extract(asm, x, config, mode="relaxed")
    if config.mode == "full":
        solution = _solve_full(asm, solution, config)
    return solution


def _extract(asm: _Assembly, x: np.ndarray, config: SolverConfig, mode: str,
             twists: dict | None = None, kappa: dict | None = None) -> ForceSolution:
    forces = {}
    for g, (p, itf) in enumerate(zip(asm.points, asm.point_itf)):
        f = x[3 * g : 3 * g + 3]
        forces[p.key] = ContactForce(f[:2].copy(), float(f[2]), itf.mu)
    zero_twist = VirtualTwist(np.zeros(3), np.zeros(3))
    return ForceSolution(
        forces=forces,
        twists=twists or {bid: zero_twist for bid in asm.free},
        stiffness=kappa or {p.key: 0.0 for p in asm.points},
        objective=float(x @ x),
        mode=mode,
        status="stable",
    )


def _point_jacobians(asm: _Assembly, g: int) -> list[tuple[str, float]]:
    itf = asm.point_itf[g]
    out = []
    for bid, sign in ((itf.body_a, 1.0), (itf.body_b, -1.0)):
        if bid in asm.body_row:
            out.append((bid, sign))
    return out


def _fit_twists(asm: _Assembly, x: np.ndarray, config: SolverConfig):
    """Least-squares body twists reproducing the displacement targets implied
    by the current forces (friction antiparallel to relative slip, touching
    normals at the complementarity slack)."""
    n_free = len(asm.free)
    rows, rhs = [], []
    delta_mag = 0.5 * TANGENT_DISP_MAX
    for g, p in enumerate(asm.points):
        f = x[3 * g : 3 * g + 3]
        R = p.frame
        J = np.hstack([np.eye(3), -skew(p.position)])  # world point velocity
        ft = f[:2]
        ft_n = np.linalg.norm(ft)
        targets = []
        if ft_n > config.tol_force:
            targets.append((0, -delta_mag * ft[0] / ft_n))
            targets.append((1, -delta_mag * ft[1] / ft_n))
        if f[2] > config.tol_force:
            targets.append((2, config.epsilon))
        if not targets:
            continue
        for axis, value in targets:
            row = np.zeros(6 * n_free)
            for bid, sign in _point_jacobians(asm, g):
                r = asm.body_row[bid]
                row[r : r + 6] += sign * (R[:, axis] @ J)
            rows.append(row)
            rhs.append(value)
    if not rows:
        xi = np.zeros(6 * n_free)
    else:
        xi, _, _, _ = lstsq(np.array(rows), np.array(rhs), lapack_driver="gelsd")
    twists = {
        bid: VirtualTwist(xi[6 * i : 6 * i + 3].copy(), xi[6 * i + 3 : 6 * i + 6].copy())
        for i, bid in enumerate(asm.free)
    }
    return xi, twists


def _point_displacements(asm: _Assembly, xi: np.ndarray) -> np.ndarray:
    """Local relative displacement (receiver minus other) per point, clipped
    to the virtual-displacement box."""
    out = np.zeros((asm.n_pts, 3))
    for g, p in enumerate(asm.points):
        J = np.hstack([np.eye(3), -skew(p.position)])
        d_world = np.zeros(3)
        for bid, sign in _point_jacobians(asm, g):
            r = asm.body_row[bid]
            d_world += sign * (J @ xi[r : r + 6])
        d = p.frame.T @ d_world
        d[0] = np.clip(d[0], -TANGENT_DISP_MAX, TANGENT_DISP_MAX)
        d[1] = np.clip(d[1], -TANGENT_DISP_MAX, TANGENT_DISP_MAX)
        d[2] = np.clip(d[2], NORMAL_DISP_MIN, NORMAL_DISP_MAX)
        out[g] = d
    return out


def _solve_full(asm: _Assembly, relaxed: ForceSolution, config: SolverConfig) -> ForceSolution:
    """Successive convexification: alternate twist fitting and direction-
    constrained QPs until the forces stop changing."""
    x = np.concatenate([relaxed.forces[p.key].local for p in asm.points])
    twists = relaxed.twists
    for it in range(config.max_iters):
        xi, twists = _fit_twists(asm, x, config)
        disps = _point_displacements(asm, xi)
        eq_rows, eq_rhs, iq_rows, iq_rhs = [], [], [], []
        for g in range(asm.n_pts):
            d = disps[g]
            dt = d[:2]
            dt_n = np.linalg.norm(dt)
            if dt_n > 1e-12:
                u = dt / dt_n
                row = np.zeros(3 * asm.n_pts)  # f_t colinear with slip dir
                row[3 * g] = -u[1]
                row[3 * g + 1] = u[0]
                eq_rows.append(row)
                eq_rhs.append(0.0)
                row = np.zeros(3 * asm.n_pts)  # f_t . slip dir <= 0
                row[3 * g] = u[0]
                row[3 * g + 1] = u[1]
                iq_rows.append(row)
                iq_rhs.append(0.0)
            else:
                for axis in (0, 1):
                    row = np.zeros(3 * asm.n_pts)
                    row[3 * g + axis] = 1.0
                    eq_rows.append(row)
                    eq_rhs.append(0.0)
            if d[2] < config.epsilon - 1e-12:  # separated: no normal force
                row = np.zeros(3 * asm.n_pts)
                row[3 * g + 2] = 1.0
                eq_rows.append(row)
                eq_rhs.append(0.0)
        n_vars = 3 * asm.n_pts
        eq = (np.array(eq_rows).reshape(len(eq_rows), n_vars), np.array(eq_rhs))
        iq = (np.array(iq_rows).reshape(len(iq_rows), n_vars), np.array(iq_rhs))
        x_new = _solve_qp(asm, extra_eq=eq, extra_ineq=iq)
        if x_new is None:
            raise IndeterminateSolveError(
                f"full-mode convexification became infeasible at iteration {it}"
            )
        change = float(np.max(np.abs(x_new - x)))
        x = x_new
        if change < 1e-6:
            kappa = {}
            for g, p in enumerate(asm.points):
                dt_n = float(np.linalg.norm(disps[g][:2]))
                ft_n = float(np.linalg.norm(x[3 * g : 3 * g + 2]))
                kappa[p.key] = ft_n / dt_n if dt_n > 1e-12 else 0.0
            return _extract(asm, x, config, mode="full", twists=twists, kappa=kappa)
    raise IndeterminateSolveError(
        f"full mode did not converge within {config.max_iters} iterations"
    )


def equilibrium_residuals(
    scene: Scene, interfaces: list[ContactInterface], solution: ForceSolution
) -> dict[str, float]:
    """Per-body norm of (contact wrenches + gravity wrench) for a solution."""
    asm = _Assembly(scene, interfaces, SolverConfig())
    x = np.concatenate(
        [solution.forces[p.key].local for p in asm.points]
    ) if asm.n_pts else np.zeros(0)
    r = asm.A @ x - asm.b
    return {bid: float(np.linalg.norm(r[asm.body_row[bid] : asm.body_row[bid] + 6]))
            for bid in asm.free}
