"""Exception hierarchy shared by all modules.

Two broad families matter for the CLI exit codes: argument/domain problems
(exit 2) and numerical failures discovered at run time (exit 3).
"""


class DoubleWellError(Exception):
    """Base class for all package errors."""


class DomainError(DoubleWellError, ValueError):
    """An argument lies outside the mathematical domain of an operation."""


class WindowError(DomainError):
    """Requested admissibility window is empty or violates its cap."""


class NonPeriodicError(DomainError):
    """Orbit construction requested on a separatrix or fixed point."""


class GridError(DomainError):
    """Two grid-indexed objects do not share a grid."""


class PhaseAmbiguityError(DomainError):
    """Rotating-frame phase undefined because the reference amplitude vanishes."""


class SpectrumError(DomainError):
    """Operator does not have the requested number of bound states."""


class AmplitudeError(DomainError):
    """Squared amplitudes exceed the conserved power invariant."""


class DegenerateOrbitError(DomainError):
    """Reference orbit touches A = 0 where the linearization needs A > 0."""


class ConfigError(DomainError):
    """Malformed or non-whitelisted experiment configuration."""


class NumericalError(DoubleWellError, RuntimeError):
    """A computation started but could not reach its accuracy contract."""


class StiffnessError(NumericalError):
    """Adaptive integrator drove the step size below its floor."""


class ConvergenceError(NumericalError):
    """Iterative solver (eigensolver, AGM loop) failed to converge."""


class InternalConsistencyError(NumericalError):
    """Closed-form intermediate landed outside its guaranteed range."""


class UnstableStepError(NumericalError):
    """Split-step update lost the conserved power beyond tolerance."""


class RenormalizationError(NumericalError):
    """Derivative-based fundamental matrix has an ill-conditioned t=0 frame."""


class FloquetAnomalyError(NumericalError):
    """Monodromy eigenvalues deviate from unity beyond the sanity threshold."""


class ShadowLossError(NumericalError):
    """PDE trajectory wandered farther from the reduced orbit than its amplitude."""


class NormalFormObstructionError(NumericalError):
    """Lie-transform step met a monomial outside the removable range."""
