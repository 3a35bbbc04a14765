"""Shared exceptions and the tolerance policy."""

from __future__ import annotations

import os

# Relative tolerance used by every verdict that does not receive an explicit
# one.  Effective absolute tolerances are scaled by max(1, spectral norm) of
# the object under test, and every verdict records the value actually used.
DEFAULT_TOL = 1e-9

# Partial sums larger than this multiple of the seed norm end a gramian
# iteration with a divergence verdict.
BLOWUP_FACTOR = 1e6

# Default iteration depth for gramian / stability level sums.
DEFAULT_MAX_LEVEL = 60


class DimensionError(ValueError):
    """Operands have inconsistent shapes."""


class ResourceLimitError(RuntimeError):
    """An enumeration or table would exceed the configured cap."""


class NotHermitianError(ValueError):
    """A matrix required to be Hermitian is not, beyond tolerance."""


class IndefiniteError(ValueError):
    """A matrix required to be positive semidefinite is not."""


class CommutativityError(ValueError):
    """An operator tuple required to commute does not, beyond tolerance."""


class SingularResolventError(ValueError):
    """I - Z(lambda)A is singular at the requested point."""


class HypothesisError(ValueError):
    """A theorem hypothesis required by the operation fails."""


def word_cap() -> int:
    """Enumeration cap, overridable through MDLSYS_MAX_WORDS."""
    raw = os.environ.get("MDLSYS_MAX_WORDS")
    return int(raw) if raw else 4_000_000


def effective_tol(tol: float, scale: float) -> float:
    return tol * max(1.0, scale)
