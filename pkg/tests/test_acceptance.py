"""Acceptance criteria, one test per criterion, each printing PASS/FAIL.

Run with `pytest tests/test_acceptance.py -v` (the summary lines bypass
pytest's capture so they always appear).
"""

import itertools
import math
import sys
import time

import numpy as np

from rigidstatics import (
    ContactForce,
    RobustnessEngine,
    analyze_contact,
    compute_msa,
    detect_contacts,
    equilibrium_residuals,
    inscribed_polygon_area_ratio,
    ipa_refine,
    mean_contact_sri,
    simplify,
    slipping_max_flow,
    solve_forces,
)
from rigidstatics.cig import ContactInterfaceGraph, FlowNetwork, GraphEdge
from rigidstatics.placement import IpaConfig
from rigidstatics.scene import Pose
from rigidstatics.slipping import contact_condition, slope

from conftest import (
    block_on_floor,
    canyon_scene,
    cube_on_floor,
    cube_on_slant,
    plateau_scene,
    side_by_side_cubes,
    stacked_cubes,
    wedge_transport_scene,
)
from test_placement import make_payload

G = 9.81


def report(name: str, ok: bool, detail: str, elapsed: float) -> None:
    status = "PASS" if ok else "FAIL"
    print(f"[{status}] {name}: {detail} ({elapsed:.3f} s)", file=sys.__stdout__, flush=True)
    assert ok, f"{name}: {detail}"


def test_friction_polygon_coverage():
    inscribed_polygon_area_ratio(4)  # warm up before the timed run
    t0 = time.perf_counter()
    r4 = inscribed_polygon_area_ratio(4)
    r8 = inscribed_polygon_area_ratio(8)
    elapsed = time.perf_counter() - t0
    ok = (
        abs(r4 - 2.0 / math.pi) < 1e-12
        and abs(r8 - 2.0 * math.sqrt(2.0) / math.pi) < 1e-12
        and elapsed < 1e-3
    )
    report(
        "friction-polygon coverage",
        ok,
        f"N=4 ratio {r4:.10f} (~65%), N=8 ratio {r8:.10f} (~90%)",
        elapsed,
    )


def _random_contact_state(rng, case):
    mu = float(rng.uniform(0.2, 1.0))
    fn = float(rng.uniform(0.5, 20.0))
    ft = float(rng.uniform(0.0, 0.95)) * mu * fn
    ang = float(rng.uniform(0, 2 * math.pi))
    fu, fv = ft * math.cos(ang), ft * math.sin(ang)
    if case == 0:  # concave cap, falling at 0
        e = np.array([fu + rng.normal() * 0.5, fv + rng.normal() * 0.5, rng.normal() * 0.2])
    elif case == 1:  # concave, rising then falling
        e = np.array([-fu + 0.3 * rng.normal(), -fv + 0.3 * rng.normal(), abs(rng.normal()) * 0.2])
    elif case == 2:  # inside the cone: monotone rise
        e = np.array([rng.normal() * 0.1, rng.normal() * 0.1, abs(rng.normal()) + 0.5])
    else:  # opposed cone: falling to zero
        e = np.array([rng.normal() * 0.1, rng.normal() * 0.1, -abs(rng.normal()) - 0.5])
    n = np.linalg.norm(e)
    if n < 1e-12:
        e = np.array([1.0, 0.0, 0.0])
        n = 1.0
    return ContactForce(np.array([fu, fv]), fn, mu), mu, e / n


def _grid_oracle(force, mu, e, step=1e-4, top=100.0):
    """Dense-grid root/argmax of the contact condition on exact step
    multiples (coarse pass + full-resolution bracketing windows)."""
    fu, fv = force.tangential
    fn = force.normal
    if e[2] < 0:
        top = min(top, fn / abs(e[2]))  # contact detaches beyond this
    tol = 1e-9 * (1.0 + mu * math.hypot(math.hypot(fu, fv), fn))
    coarse = 1e-2 * np.arange(int(top / 1e-2) + 1)
    cc = np.asarray(contact_condition(force, e, coarse))

    def window(lo, hi):
        i0, i1 = max(int(round(lo / step)), 0), min(int(round(hi / step)), int(round(top / step)))
        return step * np.arange(i0, i1 + 1)

    neg = np.where(cc <= tol)[0]
    if len(neg):
        s = window(coarse[max(neg[0] - 1, 0)], coarse[neg[0]])
        vals = np.asarray(contact_condition(force, e, s))
        hits = np.where(vals <= tol)[0]
        root = float(s[hits[0]]) if len(hits) else math.inf
    else:
        root = math.inf
    k = int(np.argmax(cc))
    s = window(coarse[max(k - 1, 0)], coarse[min(k + 1, len(coarse) - 1)])
    vals = np.asarray(contact_condition(force, e, s))
    return root, float(s[int(np.argmax(vals))]), k == len(coarse) - 1


def test_slipping_closed_form_vs_oracle():
    rng = np.random.default_rng(101)
    t0 = time.perf_counter()
    branch_counts = [0, 0, 0, 0]
    checked = 0
    worst_root = 0.0
    for i in range(1000):
        force, mu, e = _random_contact_state(rng, i % 4)
        a = analyze_contact(force, mu, e)
        fnorm = float(np.linalg.norm([*force.tangential, force.normal]))
        for s in (a.s_m, a.s_p):
            if math.isfinite(s):
                worst_root = max(worst_root, abs(float(contact_condition(force, e, s))) / (1 + mu * fnorm))
        if a.d != 0:
            branch = (0 if a.d < 0 else 2) + (0 if a.dcds0 < 0 else 1)
            branch_counts[branch] += 1
        root, argmax, at_edge = _grid_oracle(force, mu, e)
        if math.isfinite(a.sr_slip) and a.sr_slip <= 100.0:
            assert abs(a.sr_slip - root) <= 1e-4, (force, mu, e, a.sr_slip, root)
        else:
            assert math.isinf(root) or root > 99.0
        if math.isfinite(a.s_star) and a.s_star <= 100.0:
            c_star = float(contact_condition(force, e, a.s_star))
            c_grid = float(contact_condition(force, e, argmax))
            assert abs(a.s_star - argmax) <= 1e-4 or abs(c_star - c_grid) <= 1e-9, (force, mu, e)
        else:
            assert at_edge or math.isinf(a.s_star)
        checked += 1
    elapsed = time.perf_counter() - t0
    ok = checked == 1000 and worst_root <= 1e-9 and all(c > 0 for c in branch_counts) and elapsed < 10.0
    report(
        "slipping closed form vs grid oracle",
        ok,
        f"1000 states, root residual {worst_root:.1e}, branches {branch_counts}",
        elapsed,
    )


def test_slip_slope_vs_finite_differences():
    rng = np.random.default_rng(202)
    h = 1e-6
    t0 = time.perf_counter()
    worst = 0.0
    n = 0
    while n < 1000:
        force, mu, e = _random_contact_state(rng, n % 4)
        s = float(rng.uniform(0.0, 5.0))
        if np.linalg.norm(force.tangential + s * e[:2]) < 1e-3:
            continue  # the slope is not defined at the tangential kink
        if force.normal + s * e[2] < 1e-3:
            continue
        analytic = slope(force, e, s)
        numeric = (
            float(contact_condition(force, e, s + h)) - float(contact_condition(force, e, s - h))
        ) / (2 * h)
        worst = max(worst, abs(analytic - numeric))
        n += 1
    elapsed = time.perf_counter() - t0
    ok = worst <= 1e-4 and elapsed < 5.0
    report("slip slope vs central differences", ok, f"1000 states, max err {worst:.2e}", elapsed)


def _graph_from(edges, extra=()):
    nodes = sorted({u for u, v, _ in edges} | {v for u, v, _ in edges} | set(extra))
    ge = [GraphEdge(f"e{i}", u, v) for i, (u, v, _) in enumerate(edges)]
    caps = {f"e{i}": float(c) for i, (_, _, c) in enumerate(edges)}
    return ContactInterfaceGraph(nodes, ge, caps)


def _exhaustive_min_cut(graph, s, t):
    others = [n for n in graph.nodes if n not in (s, t)]
    best = math.inf
    for r in range(len(others) + 1):
        for side in itertools.combinations(others, r):
            s_side = set(side) | {s}
            cut = sum(
                graph.capacities[e.iid]
                for e in graph.edges
                if (e.u in s_side) != (e.v in s_side)
            )
            best = min(best, cut)
    return best


def test_max_flow_against_exhaustive_min_cut():
    rng = np.random.default_rng(303)
    t0 = time.perf_counter()
    for _ in range(200):
        n = int(rng.integers(2, 7))
        names = [f"n{i}" for i in range(n)]
        edges = []
        for _ in range(int(rng.integers(1, 10))):
            u, v = rng.choice(n, size=2, replace=False)
            edges.append((names[u], names[v], int(rng.integers(0, 11))))
        g = _graph_from(edges, extra=names)
        s, t = "n0", names[-1]
        flow = slipping_max_flow(FlowNetwork(g, s, t))
        cut = _exhaustive_min_cut(g, s, t)
        assert np.isclose(flow, cut, atol=1e-9), (edges, flow, cut)
        reduced = simplify(g, s, t)
        flow2 = slipping_max_flow(FlowNetwork(reduced, s, t))
        assert np.isclose(flow, flow2, atol=1e-9)
    # reference five-node topology with two series chains in parallel
    g = _graph_from(
        [("A", "B", 3), ("B", "C", 1), ("C", "E", 2), ("B", "D", 2), ("D", "E", 4),
         ("E", "I", 5), ("I", "J", 5)]
    )
    reduced = simplify(g, "A", "E")
    single = reduced.capacities[reduced.edges[0].iid]
    symbolic = min(3, min(1, 2) + min(2, 4))
    elapsed = time.perf_counter() - t0
    ok = len(reduced.edges) == 1 and single == symbolic and elapsed < 5.0
    report(
        "max-flow vs exhaustive min-cut",
        ok,
        f"200 graphs exact; contraction formula gives {single} == {symbolic}",
        elapsed,
    )


def test_toppling_analytic_cube():
    t0 = time.perf_counter()
    point, direction = [0.0, -0.5, 1.0], [0.0, -1.0, 0.0]
    res_high = RobustnessEngine(cube_on_floor(mu=0.8)).query(point, direction)
    res_low = RobustnessEngine(cube_on_floor(mu=0.3)).query(point, direction)
    elapsed = time.perf_counter() - t0
    ok = (
        abs(res_high.sr - 4.905) <= 1e-6
        and res_high.governing == "topple"
        and abs(res_high.sr_slip - 7.848) <= 1e-6
        and res_low.governing == "slip"
        and abs(res_low.sr - 2.943) <= 1e-6
        and elapsed < 1.0
    )
    report(
        "toppling analytic (unit cube)",
        ok,
        f"mu=0.8: SR {res_high.sr:.4f} ({res_high.governing}), slip {res_high.sr_slip:.4f}; "
        f"mu=0.3: SR {res_low.sr:.4f} ({res_low.governing})",
        elapsed,
    )


def test_toppling_best_magnitude_oracle():
    """Closed form -(A^T b)/||A||^2 vs a grid argmin of the least-squares
    toppling objective ||A s - b||^2 with b holding the restoring torque
    magnitudes; the objective derivative vanishes at the stationary point."""
    rng = np.random.default_rng(404)
    t0 = time.perf_counter()
    worst_gap = 0.0
    worst_deriv = 0.0
    for _ in range(500):
        n = int(rng.integers(1, 7))
        A = rng.normal(size=n)  # per-axis levers of the applied force
        if np.linalg.norm(A) < 1e-6:
            continue
        b = np.abs(rng.normal(scale=3.0, size=n))  # restoring magnitudes
        closed_unclamped = float(A @ b / (A @ A))
        closed = max(0.0, closed_unclamped)
        # staged grid argmin of ||A s - b||^2 over s >= 0 (parabola); each
        # stage re-grids the bracketing window, down to 1e-7 resolution
        lo, hi = 0.0, max(30.0, 2.0 * abs(closed_unclamped) + 1.0)
        grid_best = 0.0
        while True:
            grid = np.linspace(lo, hi, 3001)
            obj = np.sum((A[None, :] * grid[:, None] - b[None, :]) ** 2, axis=1)
            k = int(np.argmin(obj))
            grid_best = float(grid[k])
            step = grid[1] - grid[0]
            if step <= 1e-7:
                break
            lo, hi = max(0.0, grid_best - step), grid_best + step
        worst_gap = max(worst_gap, abs(closed - grid_best))
        deriv = 2 * (A @ A) * closed_unclamped - 2 * (A @ b)
        worst_deriv = max(worst_deriv, abs(deriv))
    elapsed = time.perf_counter() - t0
    ok = worst_gap <= 1e-6 and worst_deriv <= 1e-9 and elapsed < 5.0
    report(
        "toppling best-magnitude oracle",
        ok,
        f"500 axis sets, max |closed - grid| {worst_gap:.2e}, max |d/ds| {worst_deriv:.2e}",
        elapsed,
    )


def test_msa_analytic_block():
    t0 = time.perf_counter()
    d = np.array([[1.0, 0.0, 0.0]])
    topple = compute_msa(block_on_floor(w=1.0, h=2.0, mass=1.0, mu=0.9), d).entries[0]
    slip = compute_msa(block_on_floor(w=1.0, h=2.0, mass=1.0, mu=0.3), d).entries[0]
    elapsed = time.perf_counter() - t0
    ok = (
        abs(topple.msa - 4.905) <= 1e-6
        and topple.mechanism == "topple"
        and abs(slip.msa - 2.943) <= 1e-6
        and slip.mechanism == "slip"
        and elapsed < 1.0
    )
    report(
        "transport analytic (flat block)",
        ok,
        f"mu=0.9: {topple.msa:.4f} m/s^2 ({topple.mechanism}); "
        f"mu=0.3: {slip.msa:.4f} m/s^2 ({slip.mechanism})",
        elapsed,
    )


def test_msa_wedge_qualitative_pattern():
    t0 = time.perf_counter()
    dirs = np.array([[0, 1, 0], [0, -1, 0], [1, 0, 0], [-1, 0, 0]], dtype=float)
    single = compute_msa(wedge_transport_scene(rear=False), dirs)
    double = compute_msa(wedge_transport_scene(rear=True), dirs)
    s_yp, s_ym, s_xp, s_xm = (e.msa for e in single.entries)
    d_yp, d_ym, d_xp, d_xm = (e.msa for e in double.entries)
    elapsed = time.perf_counter() - t0
    ok = (
        s_ym > s_yp
        and d_yp > s_yp
        and d_xp < s_xp
        and d_xm < s_xm
        and elapsed < 60.0
    )
    report(
        "transport qualitative pattern (cube on slant)",
        ok,
        f"single -Y {s_ym:.2f} > +Y {s_yp:.2f}; rear cube: +Y {s_yp:.2f}->{d_yp:.2f}, "
        f"+X {s_xp:.2f}->{d_xp:.2f}, -X {s_xm:.2f}->{d_xm:.2f}",
        elapsed,
    )


def test_equilibrium_solver_criteria():
    t0 = time.perf_counter()
    scene = cube_on_floor()
    interfaces = detect_contacts(scene)
    sol = solve_forces(scene, interfaces)
    corner_err = max(abs(f.normal - 2.4525) for f in sol.forces.values())

    slant = cube_on_slant(math.radians(45.0), mu=0.5)
    slant_sol = solve_forces(slant, detect_contacts(slant))

    worst_residual = 0.0
    suite = [
        cube_on_floor(), block_on_floor(), stacked_cubes(), side_by_side_cubes(),
        canyon_scene(), cube_on_slant(math.radians(15.0), mu=0.9),
        wedge_transport_scene(rear=False), wedge_transport_scene(rear=True),
        plateau_scene(),
    ]
    for sc in suite:
        itfs = detect_contacts(sc)
        s = solve_forces(sc, itfs)
        assert s.status == "stable"
        for bid, res in equilibrium_residuals(sc, itfs, s).items():
            bound = 1e-6 * (sc.body(bid).mass * G)
            worst_residual = max(worst_residual, res / bound if bound > 0 else 0.0)
    elapsed = time.perf_counter() - t0
    ok = (
        corner_err <= 1e-6
        and slant_sol.status == "unstable"
        and worst_residual <= 1.0
        and elapsed < 5.0
    )
    report(
        "equilibrium solver",
        ok,
        f"corner force err {corner_err:.1e}; 45-degree slant unstable; "
        f"residual/bound max {worst_residual:.3f} over {len(suite)} scenes",
        elapsed,
    )


def test_ipa_convergence_criterion():
    t0 = time.perf_counter()
    scene = plateau_scene()
    engine = RobustnessEngine(scene, payload_mass=5.0)
    sri_map = engine.build_map(density=49.0)
    payload = make_payload()
    init = Pose(np.array([0.0, -0.05, 0.851]), np.array([1.0, 0.0, 0.0, 0.0]))
    state, trace = ipa_refine(scene, sri_map, payload, init, IpaConfig(gate=0.1))

    corners = init.apply(
        np.array([[-0.25, -0.25, -0.25], [0.25, -0.25, -0.25],
                  [-0.25, 0.25, -0.25], [0.25, 0.25, -0.25]])
    )
    initial_sri = mean_contact_sri(sri_map, corners)
    final_sri = trace[-1]["mean_sri"]

    placed = scene.with_body(payload.with_pose(state.pose))
    sol = solve_forces(placed, detect_contacts(placed, tol_gap=2e-3))
    elapsed = time.perf_counter() - t0
    ok = (
        state.iteration <= 50
        and sol.status == "stable"
        and final_sri > initial_sri
        and elapsed < 30.0
    )
    report(
        "placement refinement convergence",
        ok,
        f"{state.iteration} iterations, mean contact improvement "
        f"{initial_sri:.1f} -> {final_sri:.1f}, refined scene {sol.status}",
        elapsed,
    )
