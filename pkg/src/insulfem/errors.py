"""Exception types shared across the package."""


class InsulfemError(Exception):
    """Base class for solver and mesh failures."""


class NoConvergence(InsulfemError):
    """An iterative solver exhausted its iteration budget."""


class SingularConstraint(InsulfemError):
    """The Schur complement of a bordered system is not positive."""


class DegenerateElement(InsulfemError):
    """A mesh deformation produced a triangle with nonpositive area."""


class ZeroTrace(InsulfemError):
    """The boundary trace vanishes identically, no film thickness exists."""


class BracketFailure(InsulfemError):
    """A bisection bracket does not contain a sign change."""
