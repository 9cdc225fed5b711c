"""Exception hierarchy shared by the library and the CLI."""


class DGSPError(Exception):
    """Base class for all errors raised by dgsp."""


class GraphFormatError(DGSPError, ValueError):
    """The graph document could not be parsed."""


class GraphValidationError(DGSPError, ValueError):
    """The graph document parsed but violates a structural invariant."""


class NoPathError(DGSPError):
    """No simple path of the requested length exists in the graph."""


class RejectionBudgetExceeded(DGSPError, RuntimeError):
    """Too many consecutive non-simple walks were drawn by the path sampler."""
