"""Exception hierarchy shared by every module."""

from __future__ import annotations


class SqglabError(Exception):
    """Base class for errors raised by the package."""


class DomainError(SqglabError, ValueError):
    """An argument lies outside the domain where a quantity is defined."""


class DivergenceError(SqglabError):
    """A quantity is infinite at the requested point.

    Raised instead of returning ``inf`` so that callers can tell a genuine
    divergence (for instance ``I_{n,alpha}(1)`` with ``alpha >= 1``) from a
    floating point overflow.
    """


class ConvergenceError(SqglabError):
    """An iterative procedure failed to reach its tolerance."""


class ResolutionError(SqglabError):
    """A discretisation is too coarse for the requested accuracy."""
