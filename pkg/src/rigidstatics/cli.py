"""Command-line front-end.

Commands: solve-forces, sr-map, sri-map, msa, place, dump-cig. Every run
prints a machine-readable JSON summary on stdout and writes artifacts to
files. Exit codes: 0 success, 2 invalid input, 3 unstable assembly,
4 solver indeterminate.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
import time

import numpy as np

from . import __version__
from .cig import build_cig, to_dot
from .contacts import detect_contacts, interfaces_to_dict
from .equilibrium import SolverConfig, solve_forces
from .errors import (
    ContactError,
    IndeterminateSolveError,
    PlacementError,
    RigidStaticsError,
    SceneParseError,
    SceneValidationError,
    UnstableAssemblyError,
)
from .placement import IpaConfig, ipa_refine, mean_contact_sri
from .robustness import RobustnessEngine, map_to_csv, map_to_ply, sampling_weights
from .scene import Pose, RigidBody, Scene, load_scene
from .transport import compute_msa, fibonacci_directions, horizontal_directions, msa_to_csv

EXIT_OK = 0
EXIT_INVALID = 2
EXIT_UNSTABLE = 3
EXIT_INDETERMINATE = 4


class _Stages:
    """Per-stage wall-clock timings, exportable as JSON lines."""

    def __init__(self):
        self.records: list[dict] = []

    def run(self, name, fn):
        t0 = time.perf_counter()
        out = fn()
        self.records.append({"stage": name, "seconds": round(time.perf_counter() - t0, 6)})
        return out

    def dump(self, path: str | None):
        if path:
            with open(path, "w") as fh:
                for rec in self.records:
                    fh.write(json.dumps(rec) + "\n")


def _add_common(p: argparse.ArgumentParser):
    p.add_argument("scene_pos", nargs="?", help="scene JSON file (or use --scene)")
    p.add_argument("--scene", help="scene JSON file")
    p.add_argument("--out", help="output artifact path")
    p.add_argument("--seed", type=int, default=0, help="run seed (recorded for reproducibility)")
    p.add_argument("--polygon-sides", type=int, default=8, choices=(4, 8, 16))
    p.add_argument("--mode", default="relaxed", choices=("relaxed", "full"))
    p.add_argument("--max-iters", type=int, default=50)
    p.add_argument("--tol-force", type=float, default=1e-7)
    p.add_argument("--super-cap", type=int, default=None,
                   help="cap on enumerated sub-assemblies (required beyond 12 free bodies)")
    p.add_argument("--payload-mass", type=float, default=None,
                   help="payload mass used for the improvement evaluation magnitude")
    p.add_argument("--sri-weights", default="1,1",
                   help="slip,topple weights combined into the improvement scalar")
    p.add_argument("--dump-cig", metavar="DOT", help="write the contact graph as DOT text")
    p.add_argument("--log", help="write per-stage timing JSON lines to this file")


def _scene_from(args) -> Scene:
    path = args.scene or args.scene_pos
    if not path:
        raise SceneValidationError("a scene file is required (positional or --scene)")
    try:
        with open(path) as fh:
            text = fh.read()
    except OSError as exc:
        raise SceneParseError(f"cannot read scene file: {exc}") from exc
    return load_scene(text)


def _solver_config(args) -> SolverConfig:
    return SolverConfig(
        polygon_sides=args.polygon_sides,
        mode=args.mode,
        max_iters=args.max_iters,
        tol_force=args.tol_force,
    )


def _weights(args) -> tuple[float, float]:
    try:
        a, b = (float(x) for x in args.sri_weights.split(","))
        return a, b
    except ValueError as exc:
        raise SceneValidationError("--sri-weights expects two comma-separated numbers") from exc


def _engine(args, scene: Scene, stages: _Stages) -> RobustnessEngine:
    return stages.run(
        "analyze",
        lambda: RobustnessEngine(
            scene,
            config=_solver_config(args),
            super_cap=args.super_cap,
            payload_mass=args.payload_mass,
            sri_weights=_weights(args),
        ),
    )


def _maybe_dump_cig(args, scene: Scene, interfaces) -> None:
    if args.dump_cig:
        with open(args.dump_cig, "w") as fh:
            fh.write(to_dot(build_cig(scene, interfaces)) + "\n")


def _finish(summary: dict, stages: _Stages, args) -> int:
    summary["seed"] = args.seed
    summary["timings"] = stages.records
    stages.dump(args.log)
    print(json.dumps(summary, indent=2))
    return EXIT_OK


def _cmd_solve_forces(args) -> int:
    stages = _Stages()
    scene = stages.run("load", lambda: _scene_from(args))
    interfaces = stages.run("contacts", lambda: detect_contacts(scene))
    solution = stages.run("solve", lambda: solve_forces(scene, interfaces, _solver_config(args)))
    _maybe_dump_cig(args, scene, interfaces)
    forces = {
        f"{key[0]}#{key[1]}": {
            "tangential": cf.tangential.tolist(),
            "normal": cf.normal,
            "contact_condition": cf.contact_condition,
        }
        for key, cf in solution.forces.items()
    }
    payload = {
        "command": "solve-forces",
        "status": solution.status,
        "mode": solution.mode,
        "objective": solution.objective,
        "interfaces": interfaces_to_dict(interfaces),
        "forces": forces,
    }
    if args.out:
        with open(args.out, "w") as fh:
            json.dump(payload, fh, indent=2)
    code = _finish(payload, stages, args)
    return EXIT_UNSTABLE if solution.status == "unstable" else code


def _cmd_map(args, channel: str) -> int:
    stages = _Stages()
    scene = stages.run("load", lambda: _scene_from(args))
    engine = _engine(args, scene, stages)
    _maybe_dump_cig(args, scene, engine.interfaces)
    rmap = stages.run("map", lambda: engine.build_map(args.density))
    out = args.out or f"{channel}_map.csv"
    map_to_csv(rmap, out)
    outputs = {"csv": out}
    if args.ply:
        map_to_ply(rmap, args.ply, channel=channel)
        outputs["ply"] = args.ply
    finite = [s.sr for s in rmap.samples if math.isfinite(s.sr)]
    weights = sampling_weights(rmap, k=args.k, lam=getattr(args, "lambda_"))
    summary = {
        "command": f"{channel}-map",
        "status": "ok",
        "samples": len(rmap.samples),
        "density": rmap.density,
        "fingerprint": rmap.fingerprint,
        "sr_finite_min": min(finite) if finite else None,
        "sr_finite_max": max(finite) if finite else None,
        "sri_max": float(np.max(rmap.sri_values)) if rmap.samples else None,
        "weights_entropy": float(-np.sum(weights * np.log(np.maximum(weights, 1e-300)))),
        "outputs": outputs,
    }
    return _finish(summary, stages, args)


def _cmd_msa(args) -> int:
    stages = _Stages()
    scene = stages.run("load", lambda: _scene_from(args))
    engine = _engine(args, scene, stages)
    _maybe_dump_cig(args, scene, engine.interfaces)
    if args.sphere:
        dirs = fibonacci_directions(args.directions)
    else:
        dirs = horizontal_directions(args.directions)
    result = stages.run("msa", lambda: compute_msa(scene, dirs, engine=engine))
    out = args.out or "msa.csv"
    msa_to_csv(result, out)
    finite = [e.msa for e in result.entries if math.isfinite(e.msa)]
    summary = {
        "command": "msa",
        "status": "ok",
        "directions": len(result.entries),
        "msa_min": min(finite) if finite else None,
        "msa_max": max(finite) if finite else None,
        "outputs": {"csv": out},
    }
    return _finish(summary, stages, args)


def _parse_pose(text: str) -> Pose:
    vals = [float(x) for x in text.split(",")]
    if len(vals) == 3:
        return Pose(np.array(vals), np.array([1.0, 0.0, 0.0, 0.0]))
    if len(vals) == 7:
        q = np.array(vals[3:])
        q = q / np.linalg.norm(q)
        return Pose(np.array(vals[:3]), q)
    raise SceneValidationError("--init-pose expects x,y,z or x,y,z,qw,qx,qy,qz")


def _load_payload(path: str) -> RigidBody:
    with open(path) as fh:
        spec = json.load(fh)
    wrapper = {
        "bodies": [dict(spec), {"id": "__anchor__", "fixed": True,
                                "shape": {"type": "box", "half_extents": [1, 1, 1]},
                                "pose": {"translation": [0, 0, -1e6]}}],
    }
    scene = load_scene(wrapper)
    body = scene.body(str(spec["id"]))
    if body.fixed:
        raise SceneValidationError("payload must not be fixed")
    return body


def _cmd_place(args) -> int:
    stages = _Stages()
    scene = stages.run("load", lambda: _scene_from(args))
    payload = _load_payload(args.payload)
    engine = _engine(args, scene, stages)
    rmap = stages.run("map", lambda: engine.build_map(args.density))
    init_pose = _parse_pose(args.init_pose)
    config = IpaConfig(
        perturb_magnitude=args.M,
        neighbours=args.K,
        gate=args.D,
        max_iters=args.max_iters,
    )
    state, trace = stages.run(
        "refine", lambda: ipa_refine(scene, rmap, payload, init_pose, config)
    )
    pose_out = {
        "translation": state.pose.translation.tolist(),
        "quaternion": state.pose.quaternion.tolist(),
        "iterations": state.iteration,
        "mean_contact_sri": mean_contact_sri(rmap, state.contacts_object)
        if len(state.contacts_object)
        else None,
    }
    if args.out:
        with open(args.out, "w") as fh:
            json.dump(pose_out, fh, indent=2)
    if args.trace:
        with open(args.trace, "w") as fh:
            fh.write("iteration,tx,ty,tz,qw,qx,qy,qz,contacts,mean_sri\n")
            for row in trace:
                t, q = row["translation"], row["quaternion"]
                fh.write(
                    f"{row['iteration']},{t[0]:.9g},{t[1]:.9g},{t[2]:.9g},"
                    f"{q[0]:.9g},{q[1]:.9g},{q[2]:.9g},{q[3]:.9g},"
                    f"{row['contacts']},{row['mean_sri']:.9g}\n"
                )
    summary = {"command": "place", "status": "ok", "pose": pose_out,
               "outputs": {k: v for k, v in (("pose", args.out), ("trace", args.trace)) if v}}
    return _finish(summary, stages, args)


def _cmd_dump_cig(args) -> int:
    stages = _Stages()
    scene = stages.run("load", lambda: _scene_from(args))
    interfaces = stages.run("contacts", lambda: detect_contacts(scene))
    dot = to_dot(build_cig(scene, interfaces))
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(dot + "\n")
    summary = {"command": "dump-cig", "status": "ok",
               "interfaces": len(interfaces), "dot": dot if not args.out else None,
               "outputs": {"dot": args.out} if args.out else {}}
    return _finish(summary, stages, args)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="rigidstatics",
        description="Static robustness analysis of rigid-body assemblies",
    )
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("solve-forces", help="resolve contact forces")
    _add_common(p)

    for name in ("sr-map", "sri-map"):
        p = sub.add_parser(name, help=f"build a {name.split('-')[0].upper()} surface map")
        _add_common(p)
        p.add_argument("--density", type=float, default=100.0, help="samples per m^2")
        p.add_argument("--ply", help="also write a point-cloud PLY")
        p.add_argument("--lambda", dest="lambda_", type=float, default=0.995,
                       help="sampling threshold decay rate")
        p.add_argument("--k", type=int, default=0, help="sampling iteration index")

    p = sub.add_parser("msa", help="maximal sustainable accelerations")
    _add_common(p)
    p.add_argument("--directions", type=int, default=100)
    p.add_argument("--sphere", action="store_true", help="sample the full sphere")

    p = sub.add_parser("place", help="refine a payload placement pose")
    _add_common(p)
    p.add_argument("--payload", required=True, help="payload body JSON file")
    p.add_argument("--init-pose", required=True, help="x,y,z[,qw,qx,qy,qz]")
    p.add_argument("--density", type=float, default=100.0)
    p.add_argument("--M", type=float, default=0.1, help="perturbation magnitude, m")
    p.add_argument("--K", type=int, default=15, help="nearest-neighbour count")
    p.add_argument("--D", type=float, default=None, help="correspondence gate, m")
    p.add_argument("--lambda", dest="lambda_", type=float, default=0.995)
    p.add_argument("--trace", help="write per-iteration CSV trace")

    p = sub.add_parser("dump-cig", help="dump the contact interface graph as DOT")
    _add_common(p)
    return parser


def run(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_INVALID if exc.code not in (0, None) else 0
    np.random.seed(args.seed % (2**32))
    try:
        if args.command == "solve-forces":
            return _cmd_solve_forces(args)
        if args.command == "sr-map":
            return _cmd_map(args, "sr")
        if args.command == "sri-map":
            return _cmd_map(args, "sri")
        if args.command == "msa":
            return _cmd_msa(args)
        if args.command == "place":
            return _cmd_place(args)
        if args.command == "dump-cig":
            return _cmd_dump_cig(args)
        return EXIT_INVALID
    except (SceneParseError, SceneValidationError, ContactError, PlacementError, ValueError) as exc:
        print(json.dumps({"status": "invalid-input", "error": str(exc)}))
        return EXIT_INVALID
    except UnstableAssemblyError as exc:
        print(json.dumps({"status": "unstable", "error": str(exc)}))
        return EXIT_UNSTABLE
    except IndeterminateSolveError as exc:
        print(json.dumps({"status": "indeterminate", "error": str(exc)}))
        return EXIT_INDETERMINATE
    except RigidStaticsError as exc:
        print(json.dumps({"status": "invalid-input", "error": str(exc)}))
        return EXIT_INVALID


def main() -> None:
    sys.exit(run())
