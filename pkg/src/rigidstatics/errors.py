"""Exception types shared across the package."""


class RigidStaticsError(Exception):
    """Base class for all package errors."""


class SceneParseError(RigidStaticsError):
    """Scene document is not syntactically valid."""


class SceneValidationError(RigidStaticsError):
    """Scene document violates a model invariant."""


class ContactError(RigidStaticsError):
    """Contact geometry is invalid (e.g. deep interpenetration)."""


class UnstableAssemblyError(RigidStaticsError):
    """No contact force assignment can keep the assembly at rest."""


class IndeterminateSolveError(RigidStaticsError):
    """The force solver failed to converge; stability is undecided."""


class PlacementError(RigidStaticsError):
    """Placement refinement cannot proceed (lost contact, degenerate sets)."""
