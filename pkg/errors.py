"""Exceptions raised by the coherent-state library."""

from __future__ import annotations


class ContinuumError(Exception):
    """Base class for library errors."""


class NonConvergenceError(ContinuumError, RuntimeError):
    """Adaptive quadrature ran out of subdivisions above tolerance."""


class NotMonotoneError(ContinuumError, ValueError):
    """The action map J(s) is not certified monotone for these parameters."""


class OutOfRangeError(ContinuumError, ValueError):
    """A requested action value lies outside the range of J(s)."""


class OutOfDomainError(ContinuumError, ValueError):
    """A label lies outside the domain of a normalized state."""


class AdjudicationError(ContinuumError, RuntimeError):
    """A convention oracle did not single out exactly one candidate."""
