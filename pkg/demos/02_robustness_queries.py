"""Point robustness queries: how much force before something moves?

A query takes a surface point and a unit direction and returns the force
magnitude the assembly sustains before slipping or toppling, whichever
comes first, plus the improvement rate a force there would produce.

Run: python3 demos/02_robustness_queries.py
"""

import os

from rigidstatics import RobustnessEngine, load_scene

HERE = os.path.dirname(__file__)


def describe(res):
    def fmt(v):
        return "unbounded" if v == float("inf") else f"{v:.3f} N"

    return (
        f"SR {fmt(res.sr)} (slip {fmt(res.sr_slip)}, topple {fmt(res.sr_top)}; "
        f"governing: {res.governing}), improvement rate {res.sri:+.2f}"
    )


scene = load_scene(open(os.path.join(HERE, "scenes", "cube_on_floor.json")).read())
engine = RobustnessEngine(scene)

print("Horizontal push at a top edge midpoint:")
print(" ", describe(engine.query([0.0, -0.5, 1.0], [0.0, -1.0, 0.0])))
print("  -> the cube tips over its far bottom edge before it slides")

print("\nDownward push at the top-face centre:")
print(" ", describe(engine.query([0.0, 0.0, 1.0], [0.0, 0.0, -1.0])))
print("  -> pressing inside the support polygon can never destabilize it")

print("\nUpward pull at the top-face centre:")
print(" ", describe(engine.query([0.0, 0.0, 1.0], [0.0, 0.0, 1.0])))
print("  -> the contact detaches once the pull reaches the cube weight")

print("\nFriction sweep for the same edge push:")
import json

base_doc = json.loads(open(os.path.join(HERE, "scenes", "cube_on_floor.json")).read())
for mu in (0.2, 0.3, 0.5, 0.8):
    doc = json.loads(json.dumps(base_doc))
    for body in doc["bodies"]:
        body["mu"] = mu
    eng = RobustnessEngine(load_scene(json.dumps(doc)))
    res = eng.query([0.0, -0.5, 1.0], [0.0, -1.0, 0.0])
    print(f"  mu={mu}: {describe(res)}")
print("  -> low friction slips first; high friction topples first")

print("\nA stacked pair: the weakest interface on the load path governs.")
stack = load_scene(open(os.path.join(HERE, "scenes", "stacked_cubes.json")).read())
eng = RobustnessEngine(stack)
res = eng.query([0.0, -0.5, 2.0], [0.0, -1.0, 0.0], body="upper")
print(" ", describe(res))
