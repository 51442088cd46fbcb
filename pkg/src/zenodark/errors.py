"""Exception hierarchy.

Input-validation errors (bad matrices, bad states, bad grids) derive from
:class:`InputError`.  Physics preconditions that a structurally valid problem
can still violate (orthogonality of the initial state, the dark-compatibility
constraint, commutation requirements) derive from :class:`PhysicsError`.  The
command-line runner maps the former to exit code 2 and the latter to exit
code 3.
"""


class ZenoDarkError(Exception):
    """Base class for all errors raised by this package."""


class InputError(ZenoDarkError, ValueError):
    """A structurally invalid input: wrong shape, wrong norm, wrong symmetry."""


class HermiticityError(InputError):
    """Matrix is not Hermitian within tolerance."""


class NormalizationError(InputError):
    """State does not have the required norm within tolerance."""


class DomainError(InputError):
    """Evaluation time lies outside a sampled path's domain."""


class UnsupportedVariantError(InputError):
    """Operation is not defined for this path variant."""


class ResolutionError(InputError):
    """Time step too coarse to resolve the fastest scale of the problem."""


class UndefinedPhaseError(InputError):
    """Consecutive state overlap too small to carry a well-defined phase."""


class PhysicsError(ZenoDarkError):
    """A physics precondition is violated by otherwise valid inputs."""


class OrthogonalityError(PhysicsError):
    """Initial state is not orthogonal to the monitored state."""


class CommutatorError(PhysicsError):
    """Generator and Hamiltonian do not commute, so no closed form exists."""


class ParallelTransportError(PhysicsError):
    """Prescribed trajectory violates the parallel-transport constraint."""


class CompatibilityError(PhysicsError):
    """Prescribed trajectory violates the dark-compatibility constraint."""


class DegenerateTargetError(PhysicsError):
    """Target trajectory is stationary: there is nothing to monitor."""


class ConfigError(ZenoDarkError, ValueError):
    """Scenario configuration file is malformed or schema-invalid."""


class RegimeWarning(UserWarning):
    """Parameters are outside the regime an approximation assumes."""
