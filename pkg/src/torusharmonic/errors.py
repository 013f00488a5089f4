"""Exception hierarchy shared by all modules."""

from __future__ import annotations


class TorusError(Exception):
    """Base class for every error raised by :mod:`torusharmonic`."""


class ParseError(TorusError, ValueError):
    """Input could not be decoded into a complex (malformed JSON or fields)."""


class InvalidComplexError(TorusError, ValueError):
    """The complex violates a structural invariant.

    ``report`` carries the full :class:`~torusharmonic.topology.ValidationReport`.
    """

    def __init__(self, report):
        self.report = report
        super().__init__("invalid toroidal complex:\n" + report.summary())


class NotClosedError(TorusError, ValueError):
    pass


class SideMismatchError(TorusError, ValueError):
    pass


class DegenerateWeightsError(TorusError, ValueError):
    """Weights do not give a positive definite energy on closed 1-forms.

    ``pivot_index`` and ``pivot`` identify the first failing pivot of the
    Gram matrix factorization when known.
    """

    def __init__(self, message, pivot_index=None, pivot=None):
        self.pivot_index = pivot_index
        self.pivot = pivot
        super().__init__(message)


class ResponseMatrixError(TorusError, ValueError):
    pass


class ConsistencyError(TorusError, ArithmeticError):
    """Two independent computation routes disagree beyond tolerance."""


class BoundaryEscapeError(TorusError, ArithmeticError):
    """Oracle iterate left every compact region of the upper half plane."""
