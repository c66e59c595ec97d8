"""Exception types shared across the package.

Every class derives from a builtin so callers that only care about
``ValueError``/``RuntimeError`` keep working.
"""

from __future__ import annotations


class PsiEpistemicError(Exception):
    """Base class for all package errors."""

    exit_code = 1


class ArgumentError(PsiEpistemicError, ValueError):
    exit_code = 2


class SpaceMismatchError(ArgumentError):
    """Two objects live on different ontic spaces."""


class CompletenessError(ArgumentError):
    """A measurement family does not sum to the identity."""


class KinematicsError(ArgumentError):
    """Kinematics outside the physical region (below threshold, m_l >= m_W, ...)."""


class ConsistencyError(ArgumentError):
    """Input violates a physical consistency condition (e.g. off-shell momentum)."""


class StateError(ArgumentError):
    """Operation applied to an object in the wrong state (e.g. boosting a moving spinor)."""


class UseWrongMethodError(ArgumentError):
    """The requested statistic is undefined for the inputs; the message names the right one."""


class ConfigError(ArgumentError):
    exit_code = 2


class InfeasibleError(PsiEpistemicError, RuntimeError):
    """A numerical construction could not meet its tolerance."""

    exit_code = 3

    def __init__(self, message: str, residual: float):
        super().__init__(f"{message} (residual {residual:.3e})")
        self.residual = residual


class OutcomeIndexError(PsiEpistemicError, IndexError):
    """Outcome index outside the measurement's range."""

    exit_code = 2
