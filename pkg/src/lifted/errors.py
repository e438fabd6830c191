"""Exception types shared across the library.

Every raised error is one of these, so callers (and the verification
harness) can map failures to a small closed vocabulary.
"""

from __future__ import annotations


class LiftedError(Exception):
    """Base class for all library errors."""


class InvalidArgumentError(LiftedError, ValueError):
    """An argument violates a documented precondition (shape, range, degree)."""


class UnsupportedOperationError(LiftedError, RuntimeError):
    """The operation is outside the supported family (e.g. missing oracle,
    non-compact field where compact support is required)."""


class DomainViolationError(LiftedError, ValueError):
    """A value leaves the domain an operation is defined on (negative density,
    measure outside the declared family, non-contraction)."""


class NumericFailureError(LiftedError, ArithmeticError):
    """A numeric routine lost the guarantees it needs (singular metric,
    quadrature blow-up)."""


class InvalidMeshError(LiftedError, ValueError):
    """A simplicial mesh violates its structural invariants."""


class UsageError(LiftedError):
    """Command-line usage error; maps to exit code 2."""
