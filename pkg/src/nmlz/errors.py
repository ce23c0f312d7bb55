"""Exception types raised across the package.

Exit-code mapping used by the CLI: configuration problems -> 2, numeric
failures -> 3, refused parameter regimes -> 4.
"""


class NmlzError(Exception):
    """Base class for all package-specific errors."""


# --- model construction -----------------------------------------------------

class DimensionMismatch(NmlzError):
    """Array shapes inconsistent with the declared dimension."""


class HermiticityViolation(NmlzError):
    """Coupling matrix violates the declared (anti-)Hermiticity flag."""


class NonFiniteEntry(NmlzError):
    """NaN or infinity in model data."""


class DegenerateSlopePair(NmlzError):
    """Coupled level pair with equal slopes where a crossing formula divides
    by the slope difference."""


# --- eigensolver / integration ----------------------------------------------

class NoConvergence(NmlzError):
    """QR iteration exceeded its sweep budget."""


class StepLimitExceeded(NmlzError):
    """Adaptive integrator hit the step cap before reaching the horizon."""


class StepUnderflow(NmlzError):
    """Required step fell below 1e-14 of the span; oscillation unresolved at
    the requested tolerance."""


class Overflow(NmlzError):
    """A probability entry exceeds the double-precision exponent range;
    log-space accessors remain available."""


class ZeroColumn(NmlzError):
    """Column normalization attempted on an all-zero column."""


# --- analytic catalog --------------------------------------------------------

class SlopeNotExtremal(NmlzError):
    """Diagonal closed form requested for a level whose |slope| is not the
    strict maximum."""


class OrderViolation(NmlzError):
    """Solvable-model slope ordering condition violated."""


# --- semiclassics -------------------------------------------------------------

class PoleProximity(NmlzError):
    """Effective Hamiltonian evaluated too close to a pole of the drive."""


class NoRoot(NmlzError):
    """Branch-point equation degenerate; no usable root."""


class QuadratureFailure(NmlzError):
    """Adaptive contour quadrature did not converge."""


class CriticalRegime(NmlzError):
    """r is too close to 1; neither semiclassical formula is valid there."""


# --- integrability / mappings -------------------------------------------------

class NonPositiveTau(NmlzError):
    """Deformation parameter must be positive."""


class NotLinear(NmlzError):
    """Only linear chemical-potential sweeps are supported."""


class TooCloseToCrossing(NmlzError):
    """Large-time expansion evaluated inside the crossing region."""


# --- CLI ----------------------------------------------------------------------

class UnknownRecipe(NmlzError):
    """Figure recipe name not in the registry."""


class ParseError(NmlzError):
    """Invalid configuration or command line."""
