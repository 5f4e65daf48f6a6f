"""simcheck command line: replay scenes and compare MSA CSVs."""

from __future__ import annotations

import argparse
import json
import math
import sys

import numpy as np

from .compare import compare
from .replay import SimProtocol, replay_msa, rows_to_csv


def _directions(args) -> tuple[np.ndarray, list | None]:
    if args.directions_from:
        from .compare import read_msa_csv

        rows = read_msa_csv(args.directions_from)
        dirs = np.array([r["direction"] for r in rows])
        ceilings = [2.0 * r["msa"] if math.isfinite(r["msa"]) else math.inf for r in rows]
        return dirs, ceilings
    count = args.directions
    ang = 2.0 * np.pi * np.arange(count) / count
    return np.column_stack([np.cos(ang), np.sin(ang), np.zeros(count)]), None


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(prog="simcheck",
                                     description="dynamics replay cross-check")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("replay", help="simulate sustainable accelerations")
    p.add_argument("scene", help="scene JSON file")
    p.add_argument("--out", default="sim_msa.csv")
    p.add_argument("--directions", type=int, default=16)
    p.add_argument("--directions-from", help="take directions from an existing MSA CSV")
    p.add_argument("--erp", type=float, default=0.2)
    p.add_argument("--hz", type=float, default=900.0)
    p.add_argument("--threshold", type=float, default=0.05)
    p.add_argument("--horizon", type=float, default=3.0)

    p = sub.add_parser("compare", help="compare analyzer vs simulated CSVs")
    p.add_argument("primary")
    p.add_argument("simulated")
    p.add_argument("--tolerance", type=float, default=0.15)

    args = parser.parse_args(argv)
    if args.command == "replay":
        protocol = SimProtocol(
            timestep=1.0 / args.hz,
            velocity_threshold=args.threshold,
            error_reduction=args.erp,
            horizon=args.horizon,
        )
        try:
            document = open(args.scene).read()
            directions, ceilings = _directions(args)
            rows = replay_msa(document, directions, protocol, ceilings=ceilings)
        except (OSError, ValueError, KeyError) as exc:
            print(json.dumps({"status": "error", "scene": args.scene, "error": str(exc)}))
            return 2
        rows_to_csv(rows, args.out)
        finite = [m for _, m in rows if math.isfinite(m)]
        print(json.dumps({
            "status": "ok", "scene": args.scene, "out": args.out,
            "directions": len(rows),
            "msa_min": min(finite) if finite else None,
            "msa_max": max(finite) if finite else None,
        }))
        return 0
    report = compare(args.primary, args.simulated, args.tolerance)
    print(json.dumps(report, indent=2))
    return 0 if report["passed"] else 1


if __name__ == "__main__":
    sys.exit(main())
