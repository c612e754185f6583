"""Exception types shared across the package."""


class VlcSecrecyError(Exception):
    """Base class for all package-specific errors."""


class GeometryError(VlcSecrecyError, ValueError):
    """Degenerate node geometry (coincident nodes, non-positive height gap, ...)."""


class DimensionError(VlcSecrecyError, ValueError):
    """Array arguments with incompatible or unsupported dimensions."""


class RankDeficiencyError(VlcSecrecyError, ValueError):
    """Columns expected to be linearly independent are not (to tolerance)."""


class NonSymmetricError(VlcSecrecyError, ValueError):
    """A symmetric matrix was required."""


class ConvergenceError(VlcSecrecyError, RuntimeError):
    """An iterative routine hit its iteration cap before reaching tolerance."""


class BracketingError(VlcSecrecyError, RuntimeError):
    """Root bracketing failed: no sign change found within the expansion cap."""


class InsufficientRelaysError(VlcSecrecyError, ValueError):
    """Relay count too small for the requested beamforming design."""


class DegenerateBeamformerError(VlcSecrecyError, RuntimeError):
    """The beamforming feasible set collapses (e.g. eavesdropper gain vector
    lies in the span being nulled), so no useful vector exists."""


class NullingViolationError(VlcSecrecyError, ValueError):
    """A rate formula was called with a beamformer that does not satisfy the
    zero-forcing condition the formula assumes."""


class QuadratureError(VlcSecrecyError, RuntimeError):
    """Numerical integration did not reach the requested tolerance."""


class ScenarioError(VlcSecrecyError, ValueError):
    """Scenario or experiment file could not be parsed or violates an invariant."""
