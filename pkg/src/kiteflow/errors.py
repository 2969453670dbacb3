"""Exception hierarchy shared by all kiteflow modules."""


class KiteflowError(Exception):
    """Base class for all errors raised by this package."""


# --- combinatorics ----------------------------------------------------------

class NonBipartite(KiteflowError):
    """A vertex is used both as a white and as a black corner."""


class NotStronglyRegular(KiteflowError):
    """The quad complex is not a strongly regular cell decomposition."""


class DanglingEdge(KiteflowError):
    """An edge of the quad complex is incident to more than two quads."""


class AngleOutOfRange(KiteflowError):
    """An intersection angle lies outside the open interval (0, pi)."""


class ParseError(KiteflowError):
    """A file or structural input could not be interpreted."""


# --- numerics ---------------------------------------------------------------

class DomainError(KiteflowError):
    """An argument lies outside the mathematical domain of the operation."""


class BranchCut(KiteflowError):
    """Evaluation point lies on the branch cut of the complex half-angle map."""


class MissingRadius(KiteflowError):
    """A radius value is absent or non-positive for some vertex."""


class NoConvergence(KiteflowError):
    """Iterative solver exhausted its budget; carries the last report."""

    def __init__(self, message, report=None):
        super().__init__(message)
        self.report = report


class NotASolution(KiteflowError):
    """Input radii do not satisfy the angle-sum equations to tolerance."""


class DomainViolation(KiteflowError):
    """Hyperbolic iterate was driven out of (-inf, 0) and could not recover."""


# --- maps -------------------------------------------------------------------

class CombinatoricsMismatch(KiteflowError):
    """Two patterns do not share the same underlying complex."""


class AngleMismatch(KiteflowError):
    """Two patterns do not share the same intersection angles."""


class NotEmbedded(KiteflowError):
    """A pattern has overlapping kites."""


class OutsideDomain(KiteflowError):
    """A query point lies outside the kite union of a map."""


class DegenerateTriangle(KiteflowError):
    """A triangle of a piecewise-affine map has (numerically) zero area."""


# --- networks ---------------------------------------------------------------

class SingularSystem(KiteflowError):
    """A harmonic solve has an interior component with no boundary vertex."""


class NoPath(KiteflowError):
    """Two vertex sets are not connected by any path."""


class TooLarge(KiteflowError):
    """Brute-force enumeration was requested on a graph above its size gate."""
