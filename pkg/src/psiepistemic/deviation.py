"""Convex-mixing deviation model for psi-epistemic predictions.

A fraction ``q`` of the prepared state's ontic mass is shared with a
confusable state, and a fraction ``r`` of that shared mass answers
measurements as the confusable state would.  The observable effect is a
single mixing weight ``q * r``::

    p_model = (1 - q r) p_prepared + q r p_confusable
"""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum

import numpy as np

from .errors import ArgumentError
from .povm import neutrino_povm
from .states import QuantumState


class ModelClass(Enum):
    ONTIC_INDIFFERENCE = "OnticIndifference"
    DELTA_CONTINUOUS = "DeltaContinuous"
    SYMMETRIC_MAX_NONTRIVIAL = "SymmetricMaxNontrivial"


def delta_continuity_threshold(d: int) -> float:
    """Smallest admissible continuity radius ``1 - sqrt((d-1)/d)``."""
    if d < 2:
        raise ArgumentError("dimension must be at least 2")
    return 1.0 - np.sqrt((d - 1) / d)


@dataclass(frozen=True, eq=False)
class EpistemicModelParams:
    """``q`` is the shared ontic mass, ``r`` the fraction of it that responds as the confusable state.

    ``model_class`` and ``metadata`` are descriptive only.  A
    ``DeltaContinuous`` tag must record ``d`` and ``delta`` in ``metadata``
    with ``delta`` at or above the continuity threshold.
    """

    q: float
    confusable_state: QuantumState | None = None
    model_class: ModelClass = ModelClass.ONTIC_INDIFFERENCE
    r: float = 1.0
    metadata: dict = field(default_factory=dict)

    def __post_init__(self):
        if not 0.0 <= self.q <= 1.0:
            raise ArgumentError(f"q must lie in [0, 1], got {self.q}")
        if not 0.0 <= self.r <= 1.0:
            raise ArgumentError(f"r must lie in [0, 1], got {self.r}")
        cls = ModelClass(self.model_class)
        object.__setattr__(self, "model_class", cls)
        if cls is ModelClass.DELTA_CONTINUOUS:
            if "d" not in self.metadata or "delta" not in self.metadata:
                raise ArgumentError("DeltaContinuous models must record 'd' and 'delta' in metadata")
            if self.metadata["delta"] < delta_continuity_threshold(int(self.metadata["d"])):
                raise ArgumentError("delta is below the continuity threshold 1 - sqrt((d-1)/d)")

    @property
    def mixing(self) -> float:
        return self.q * self.r


def _check_prob(p: float, name: str) -> float:
    if not 0.0 <= p <= 1.0:
        raise ArgumentError(f"{name} must lie in [0, 1], got {p}")
    return float(p)


def deviated_probability(p_qm_prepared: float, p_qm_confusable: float, params: EpistemicModelParams) -> float:
    a = _check_prob(p_qm_prepared, "p_qm_prepared")
    b = _check_prob(p_qm_confusable, "p_qm_confusable")
    w = params.mixing
    return (1.0 - w) * a + w * b


def suppressed_cross_section(sigma_qm: float, alpha: float, params: EpistemicModelParams) -> float:
    """Polarized cross section under the deviation model for an ``E_-`` (left-chiral) measurement.

    The prepared neutrino is ``|s_nu>`` at rest-frame angle ``alpha``; at
    ``alpha = pi`` it is the negative-helicity state and QM predicts certainty.
    States are written in the ``{|s_nu>, |-s_nu>}`` basis.  The QM cross
    section is rescaled by the ratio of deviated to QM outcome probability.
    """
    if sigma_qm < 0:
        raise ArgumentError("cross section must be non-negative")
    if params.confusable_state is None:
        raise ArgumentError("suppressed_cross_section needs a confusable state")
    e_minus, _ = neutrino_povm(alpha)
    p_prep = e_minus.expectation(QuantumState.basis(0, 2))
    if p_prep == 0:
        raise ArgumentError("the prepared state never triggers E_- at this alpha")
    p_conf = e_minus.expectation(params.confusable_state)
    return sigma_qm * deviated_probability(p_prep, p_conf, params) / p_prep


def distorted_angular_distribution(P, P_confusable, params: EpistemicModelParams, tol: float = 1e-10) -> np.ndarray:
    """Per-bin mixture ``(1 - q r) P + q r P_confusable`` of two normalized bin-probability vectors."""
    P = np.asarray(P, dtype=float)
    Q = np.asarray(P_confusable, dtype=float)
    if P.shape != Q.shape or P.ndim != 1:
        raise ArgumentError("bin vectors must be 1-D and of equal length")
    for name, v in (("P", P), ("P_confusable", Q)):
        if np.any(v < 0) or abs(v.sum() - 1.0) > tol:
            raise ArgumentError(f"{name} must be a normalized probability vector")
    w = params.mixing
    return (1.0 - w) * P + w * Q
