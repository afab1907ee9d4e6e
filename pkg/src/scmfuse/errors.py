"""Exception and warning types shared across the package."""


class ScmFuseError(Exception):
    """Base class; carries an optional context dict for machine-readable output."""

    def __init__(self, message, context=None):
        super().__init__(message)
        self.message = message
        self.context = dict(context) if context else {}


class InvalidPair(ScmFuseError):
    """Variable pair with identical or empty endpoints."""


class InvalidWeights(ScmFuseError):
    """Tier weights outside (0, 1) or not summing to 1."""


class ScopeError(ScmFuseError):
    """Assertion references a variable outside the declared scope."""


class InvalidRow(ScmFuseError):
    """Scoring-matrix row with negative mass or broken mass accounting."""


class EmptyMatrix(ScmFuseError):
    """Agreement requested on a matrix with no pair rows."""


class ParseError(ScmFuseError):
    """Malformed input file; context carries file/line/field where known."""


class ValidationError(ScmFuseError):
    """Structurally valid input with out-of-contract values."""


class SingularityError(ScmFuseError):
    """Singular or collinear design in a numeric routine."""


class InsufficientData(ScmFuseError):
    """Too few rows for the requested statistical operation."""


class InvalidSpec(ScmFuseError):
    """Ground-truth specification that is not a consistent DAG model."""


class InvalidInput(ScmFuseError):
    """Operation called with arguments violating its preconditions."""


class OrderingWarning(UserWarning):
    """Tier weights are valid but not in the default ascending order."""


class NoOpWarning(UserWarning):
    """A perturbation matched nothing in its target tier and changed nothing."""
