"""Sustainable acceleration envelopes for assembly transport.

Computes the per-direction acceleration limit of a cube on a wedge (and
the same assembly with a rear support cube), writes the polar-plot-ready
CSV, and prints the qualitative effect of the extra cube: the downhill
tip-over is blocked at the cost of lateral margin.

Run: python3 demos/04_transport_envelope.py
"""

import math
import os

import numpy as np

from rigidstatics import compute_msa, horizontal_directions, load_scene, msa_to_csv

HERE = os.path.dirname(__file__)
OUT = os.path.join(HERE, "out")
os.makedirs(OUT, exist_ok=True)

directions = horizontal_directions(72)
results = {}
for name in ("wedge_single", "wedge_rear"):
    scene = load_scene(open(os.path.join(HERE, "scenes", f"{name}.json")).read())
    results[name] = compute_msa(scene, directions)
    path = os.path.join(OUT, f"{name}_msa.csv")
    msa_to_csv(results[name], path)
    print(f"wrote {path}")


def at(result, d):
    d = np.asarray(d, dtype=float)
    return min(result.entries, key=lambda e: -float(e.direction @ d))


for name, result in results.items():
    print(f"\n{name}:")
    for label, d in (("+y (uphill)", [0, 1, 0]), ("-y (downhill)", [0, -1, 0]),
                     ("+x (lateral)", [1, 0, 0])):
        e = at(result, d)
        v = "unbounded" if math.isinf(e.msa) else f"{e.msa:.2f} m/s^2"
        print(f"  {label:14s} {v:>12s}  limited by {e.limiting_super} ({e.mechanism})")

single, double = results["wedge_single"], results["wedge_rear"]
print("\nEffect of the rear cube:")
print(f"  +y: {at(single, [0,1,0]).msa:.2f} -> {at(double, [0,1,0]).msa:.2f} m/s^2 "
      "(downhill tip-over blocked)")
print(f"  +x: {at(single, [1,0,0]).msa:.2f} -> {at(double, [1,0,0]).msa:.2f} m/s^2 "
      "(heavier, taller stack tips sideways earlier)")

try:
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    fig, ax = plt.subplots(subplot_kw={"projection": "polar"}, figsize=(6, 6))
    for name, result, style in (("single cube", single, "o-"), ("with rear cube", double, "s-")):
        ang = np.arctan2(result.directions[:, 1], result.directions[:, 0])
        vals = np.where(np.isfinite(result.values), result.values, np.nan)
        order = np.argsort(ang)
        ax.plot(ang[order], vals[order], style, markersize=3, label=name)
    ax.set_title("sustainable acceleration (m/s^2) in the horizontal plane")
    ax.legend(loc="lower left")
    png = os.path.join(OUT, "msa_polar.png")
    fig.savefig(png, dpi=120, bbox_inches="tight")
    print(f"\nwrote {png}")
except ImportError:
    print("\nmatplotlib not available; skipped the polar plot")
