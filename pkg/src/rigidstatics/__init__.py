"""Static robustness analysis for assemblies of rigid bodies in contact.

The package resolves contact forces in frictional assemblies, computes
how much force surface points sustain before slipping or toppling (and
how applied forces would improve that), refines placement poses, and
bounds transport accelerations.

Typical use:

    from rigidstatics import load_scene, RobustnessEngine

    scene = load_scene(open("scene.json").read())
    engine = RobustnessEngine(scene)
    result = engine.query(point=[0.5, 0.5, 1.0], direction=[0, 0, -1])
"""

__version__ = "0.1.0"

from .cig import (
    FIXED_NODE,
    ContactInterfaceGraph,
    FlowNetwork,
    build_cig,
    simplify,
    slipping_max_flow,
)
from .contacts import ContactInterface, ContactPoint, detect_contacts
from .equilibrium import (
    ContactForce,
    ForceSolution,
    SolverConfig,
    VirtualTwist,
    equilibrium_residuals,
    friction_polygon_rows,
    inscribed_polygon_area_ratio,
    solve_forces,
)
from .errors import (
    ContactError,
    IndeterminateSolveError,
    PlacementError,
    RigidStaticsError,
    SceneParseError,
    SceneValidationError,
    UnstableAssemblyError,
)
from .placement import IpaConfig, PlacementState, ipa_refine, kabsch_align, mean_contact_sri
from .robustness import (
    MapSample,
    RobustnessEngine,
    RobustnessMap,
    RobustnessQuery,
    RobustnessResult,
    map_to_csv,
    map_to_ply,
    query,
    sampling_weights,
)
from .scene import Pose, RigidBody, Scene, friction_for, load_scene, scene_to_dict, scene_to_json
from .slipping import (
    SlipAnalysis,
    analyze_contact,
    contact_condition,
    global_slip_maximizer,
    interface_capacity,
    interface_improvement,
    slope,
)
from .toppling import (
    SuperObject,
    ToppleAnalysis,
    TopplingAxis,
    analyze_toppling,
    enumerate_super_objects,
    form_closure,
    grasp_matrix,
    sr_top,
    topple_improvement,
    valid_toppling_axes,
)
from .transport import (
    MsaEntry,
    MsaResult,
    compute_msa,
    fibonacci_directions,
    horizontal_directions,
    msa_to_csv,
)

__all__ = [
    "FIXED_NODE",
    "ContactError",
    "ContactForce",
    "ContactInterface",
    "ContactInterfaceGraph",
    "ContactPoint",
    "FlowNetwork",
    "ForceSolution",
    "IndeterminateSolveError",
    "IpaConfig",
    "MapSample",
    "MsaEntry",
    "MsaResult",
    "PlacementError",
    "PlacementState",
    "Pose",
    "RigidBody",
    "RigidStaticsError",
    "RobustnessEngine",
    "RobustnessMap",
    "RobustnessQuery",
    "RobustnessResult",
    "Scene",
    "SceneParseError",
    "SceneValidationError",
    "SlipAnalysis",
    "SolverConfig",
    "SuperObject",
    "ToppleAnalysis",
    "TopplingAxis",
    "UnstableAssemblyError",
    "VirtualTwist",
    "analyze_contact",
    "analyze_toppling",
    "build_cig",
    "compute_msa",
    "contact_condition",
    "detect_contacts",
    "enumerate_super_objects",
    "equilibrium_residuals",
    "fibonacci_directions",
    "form_closure",
    "friction_for",
    "friction_polygon_rows",
    "global_slip_maximizer",
    "grasp_matrix",
    "horizontal_directions",
    "inscribed_polygon_area_ratio",
    "interface_capacity",
    "interface_improvement",
    "ipa_refine",
    "kabsch_align",
    "load_scene",
    "map_to_csv",
    "map_to_ply",
    "mean_contact_sri",
    "msa_to_csv",
    "query",
    "sampling_weights",
    "scene_to_dict",
    "scene_to_json",
    "simplify",
    "slipping_max_flow",
    "slope",
    "solve_forces",
    "sr_top",
    "topple_improvement",
    "valid_toppling_axes",
]
