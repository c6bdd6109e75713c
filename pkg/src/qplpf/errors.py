"""Exception types raised across the package."""

from __future__ import annotations


class QPLPFError(Exception):
    """Base class for all errors raised by :mod:`qplpf`."""


class InvalidParameterError(QPLPFError, ValueError):
    """A tuning parameter is outside its admissible range."""


class DomainTooShortError(QPLPFError, ValueError):
    """The delay window does not fit inside the signal or image."""


class TooFewPointsError(QPLPFError, ValueError):
    """Not enough embedded points to build a neighbor graph."""


class ShapeError(QPLPFError, ValueError):
    """Array lengths or shapes do not agree."""


class UndefinedMetricError(QPLPFError, ValueError):
    """A metric was requested over an empty set of samples."""


class DegenerateEnvelopeError(QPLPFError, ValueError):
    """Fewer than two peaks, so no envelope can be interpolated."""
