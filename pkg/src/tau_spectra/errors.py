"""Exception hierarchy shared by all modules."""


class TauSpectraError(ValueError):
    """Base class for domain errors raised by this package."""


class InvalidDimensionError(TauSpectraError):
    pass


class DomainError(TauSpectraError):
    pass


class UnsupportedBranchError(TauSpectraError):
    pass


class DegenerateVectorError(TauSpectraError):
    pass


class IncompleteSpectrumError(TauSpectraError):
    """Root finding located fewer (or more) eigenpairs than the matrix size.

    The pairs that were found are kept on ``pairs`` for inspection.
    """

    def __init__(self, message, pairs=()):
        super().__init__(message)
        self.pairs = list(pairs)


class NotSymmetrizableError(TauSpectraError):
    pass


class IllPosedDiscretizationError(TauSpectraError):
    """Upwind rates are not strictly positive.

    ``min_n`` is the smallest node count (with unit-interval spacing) for which
    the discretization becomes well posed, when one exists.
    """

    def __init__(self, message, min_n=None):
        super().__init__(message)
        self.min_n = min_n


class ResourceLimitError(TauSpectraError):
    pass


class EmptyReportError(TauSpectraError):
    pass


class SchemaError(TauSpectraError):
    """Invalid spec file; ``path`` names the offending field (e.g. ``axes[0].n``)."""

    def __init__(self, path, message):
        super().__init__(f"{path}: {message}")
        self.path = path


class NormalizationError(TauSpectraError):
    """A probability vector does not sum to one within tolerance."""
