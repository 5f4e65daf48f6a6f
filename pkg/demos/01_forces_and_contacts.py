"""Resolving contact forces in small assemblies.

Walks through the basic pipeline: load a scene, detect the contact
interfaces, solve the minimum-energy force distribution, and inspect the
result. Also shows how an infeasible scene is reported as unstable.

Run: python3 demos/01_forces_and_contacts.py
"""

import json
import math
import os

import numpy as np

from rigidstatics import (
    SolverConfig,
    detect_contacts,
    equilibrium_residuals,
    load_scene,
    solve_forces,
)

HERE = os.path.dirname(__file__)


def show(title):
    print(f"\n=== {title} ===")


# A unit cube resting on a fixed slab. The scene file is plain JSON; see
# demos/scenes/ for more examples and the README for the schema.
show("cube on a slab")
scene = load_scene(open(os.path.join(HERE, "scenes", "cube_on_floor.json")).read())
interfaces = detect_contacts(scene)
print(f"{len(interfaces)} interface(s):")
for itf in interfaces:
    print(f"  {itf.body_a} <- {itf.body_b}: {len(itf.points)} points, mu={itf.mu}")

solution = solve_forces(scene, interfaces)
print(f"status: {solution.status}, energy objective: {solution.objective:.4f} N^2")
for key, force in solution.forces.items():
    print(
        f"  point {key}: f_n = {force.normal:.4f} N, "
        f"|f_t| = {np.linalg.norm(force.tangential):.2e} N, "
        f"slack to slipping = {force.contact_condition:.4f} N"
    )

# Equilibrium quality: net wrench per body, which should vanish.
residuals = equilibrium_residuals(scene, interfaces, solution)
print("per-body residuals:", {k: f"{v:.2e}" for k, v in residuals.items()})

# The same cube on a 45-degree slope with mu = 0.5 cannot be balanced:
# the required tangential force exceeds what friction can provide, and the
# solver certifies that no feasible force assignment exists.
show("45-degree slope, low friction")
angle = math.radians(45.0)
n = [0.0, -math.sin(angle), math.cos(angle)]
q = [math.cos(angle / 2), math.sin(angle / 2), 0, 0]
steep = load_scene(
    json.dumps(
        {
            "bodies": [
                {
                    "id": "slab",
                    "shape": {"type": "box", "half_extents": [3, 3, 0.1]},
                    "pose": {"translation": [-0.1 * c for c in n], "quaternion": q},
                    "fixed": True,
                    "mu": 0.5,
                },
                {
                    "id": "cube",
                    "shape": {"type": "box", "half_extents": [0.5, 0.5, 0.5]},
                    "pose": {"translation": [0.5 * c for c in n], "quaternion": q},
                    "mass": 1.0,
                    "mu": 0.5,
                },
            ]
        }
    )
)
sol = solve_forces(steep, detect_contacts(steep))
print(f"status: {sol.status} (tan 45 = 1.0 > mu = 0.5: slipping is unavoidable)")

# The full mode additionally couples forces to virtual displacements and
# enforces friction-opposes-slip plus normal complementarity.
show("full mode on the cube")
full = solve_forces(scene, interfaces, SolverConfig(mode="full"))
print(f"status: {full.status}, mode: {full.mode}")
print("stiffness per point:", {k: f"{v:.3g}" for k, v in full.stiffness.items()})
