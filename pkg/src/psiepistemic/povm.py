"""POVM elements realized by polarized cross-section and angular-distribution measurements.

Neutrino elements are 2x2 matrices in the basis ``{|s_nu>, |-s_nu>}`` of spin
states along the rest-frame axis at angle ``alpha``.  W-decay elements are 3x3
matrices in the helicity basis ``{|+1>, |-1>, |0>}``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .amplitudes import squared_amplitude_ratio, w_decay_dGamma, w_decay_total_width
from .constants import PhysicsConstants
from .errors import ArgumentError
from .states import PovmElement, QuantumState

__all__ = [
    "AngularPartition",
    "DeviationRecord",
    "PovmElement",
    "WDECAY_BASIS",
    "adaptive_gauss_legendre",
    "angular_bin_widths",
    "helicity_measure_prob",
    "neutrino_povm",
    "povm_outcome_prob",
    "wdecay_angular_povm",
]

WDECAY_BASIS = (+1, -1, 0)


@dataclass(frozen=True)
class DeviationRecord:
    label: str
    qm_probability: float
    model_probability: float

    def __post_init__(self):
        for p in (self.qm_probability, self.model_probability):
            if not 0.0 <= p <= 1.0:
                raise ArgumentError("probabilities must lie in [0, 1]")

    @property
    def deviation(self) -> float:
        return self.model_probability - self.qm_probability


# --- neutrino helicity POVM -------------------------------------------------


def neutrino_povm(alpha: float, xi: float = np.inf, exact: bool = False, current=None) -> tuple[PovmElement, PovmElement]:
    """``(E_-, E_+)`` in ideal mode, ``(E_L, E_R)`` in exact mode.

    Exact mode evaluates the finite-rapidity squared amplitudes of the
    left- and right-chiral currents for the ``+-s`` spin states and keeps
    them on the diagonal; those entries approach the ideal ones as
    ``e^{-xi}``.  ``E_R`` is always flagged non-physical: no Standard Model
    interaction couples to the right-chiral neutrino.
    """
    if not xi >= 0:
        raise ArgumentError("rapidity must be non-negative")
    if not exact:
        lo, hi = (1 - np.cos(alpha)) / 2, (1 + np.cos(alpha)) / 2
        return (
            PovmElement(np.diag([lo, hi]), "E_minus"),
            PovmElement(np.diag([hi, lo]), "E_plus", physical=False),
        )
    if not np.isfinite(xi):
        raise ArgumentError("exact mode needs a finite rapidity")
    e_l = [squared_amplitude_ratio(alpha, xi, s, "L", current) for s in (+1, -1)]
    e_r = [squared_amplitude_ratio(alpha, xi, s, "R", current) for s in (+1, -1)]
    return PovmElement(np.diag(e_l), "E_L"), PovmElement(np.diag(e_r), "E_R", physical=False)


def helicity_measure_prob(E: PovmElement, state: QuantumState) -> float:
    """``<state|E|state>`` clamped to ``[0, 1]``."""
    return E.expectation(state)


# --- W-decay angular POVM ---------------------------------------------------


@dataclass(frozen=True, eq=False)
class AngularPartition:
    """Ordered bins ``[edges[j], edges[j+1]]`` covering ``[0, pi]``."""

    edges: tuple[float, ...]

    def __post_init__(self):
        edges = tuple(float(e) for e in self.edges)
        if len(edges) < 2:
            raise ArgumentError("a partition needs at least one bin")
        if edges[0] != 0.0 or abs(edges[-1] - np.pi) > 1e-15:
            raise ArgumentError("partition must cover [0, pi] exactly")
        if any(b <= a for a, b in zip(edges, edges[1:])):
            raise ArgumentError("bin edges must be strictly increasing (bins nonempty and disjoint)")
        object.__setattr__(self, "edges", edges[:-1] + (np.pi,))

    @classmethod
    def from_bins(cls, bins) -> AngularPartition:
        bins = [tuple(map(float, b)) for b in bins]
        for (_, hi), (lo, _) in zip(bins, bins[1:]):
            if hi != lo:
                raise ArgumentError("bins must be contiguous and ordered")
        return cls(tuple(b[0] for b in bins) + (bins[-1][1],))

    @classmethod
    def uniform(cls, n: int) -> AngularPartition:
        return cls(tuple(np.linspace(0.0, np.pi, n + 1)))

    @classmethod
    def isolation(cls, eps: float = 0.1) -> AngularPartition:
        """``{[0, eps], [eps, pi - eps], [pi - eps, pi]}``."""
        if not 0 < eps < np.pi / 2:
            raise ArgumentError("eps must lie in (0, pi/2)")
        return cls((0.0, eps, np.pi - eps, np.pi))

    @property
    def bins(self) -> list[tuple[float, float]]:
        return list(zip(self.edges, self.edges[1:]))

    def __len__(self) -> int:
        return len(self.edges) - 1


def adaptive_gauss_legendre(f, a: float, b: float, atol: float = 1e-12, rtol: float = 1e-13, order: int = 10, max_depth: int = 30) -> float:
    """Adaptive Gauss-Legendre quadrature of a vectorized ``f`` over ``[a, b]``.

    Each panel compares an ``order``-point rule with its ``2*order``-point
    refinement and bisects until they agree to ``max(atol, rtol |I|)``.
    """
    x1, w1 = np.polynomial.legendre.leggauss(order)
    x2, w2 = np.polynomial.legendre.leggauss(2 * order)

    def rule(lo, hi, x, w):
        half, mid = 0.5 * (hi - lo), 0.5 * (hi + lo)
        return half * (w @ f(mid + half * x))

    def panel(lo, hi, tol, depth):
        coarse, fine = rule(lo, hi, x1, w1), rule(lo, hi, x2, w2)
        if abs(fine - coarse) <= max(tol, rtol * abs(fine)) or depth >= max_depth:
            return fine
        m = 0.5 * (lo + hi)
        return panel(lo, m, tol / 2, depth + 1) + panel(m, hi, tol / 2, depth + 1)

    return float(panel(a, b, atol, 0))


def angular_bin_widths(partition: AngularPartition, ell: str = "e", c: PhysicsConstants | None = None) -> np.ndarray:
    """``Gamma^{Theta_j}(lambda_W)`` as an array of shape ``(n_bins, 3)`` in the order ``(+1, -1, 0)``."""
    c = c or PhysicsConstants()
    out = np.empty((len(partition), 3))
    for j, (lo, hi) in enumerate(partition.bins):
        for i, lam in enumerate(WDECAY_BASIS):
            out[j, i] = adaptive_gauss_legendre(lambda th, lam=lam: w_decay_dGamma(th, lam, ell, c) * np.sin(th), lo, hi)
    return out


def wdecay_angular_povm(partition: AngularPartition, ell: str = "e", c: PhysicsConstants | None = None) -> list[PovmElement]:
    """Diagonal elements ``E_j = sum_lambda Gamma^{Theta_j}(lambda)/Gamma(lambda) |lambda><lambda|``."""
    if not isinstance(partition, AngularPartition):
        raise ArgumentError("partition must be an AngularPartition")
    c = c or PhysicsConstants()
    widths = angular_bin_widths(partition, ell, c)
    totals = np.array([w_decay_total_width(lam, ell, c) for lam in WDECAY_BASIS])
    fractions = widths / totals
    return [PovmElement(np.diag(row), f"[{lo:.6g}, {hi:.6g}]") for row, (lo, hi) in zip(fractions, partition.bins)]


def povm_outcome_prob(E_j: PovmElement, lambda_W: int) -> float:
    if lambda_W not in WDECAY_BASIS:
        raise ArgumentError(f"lambda_W must be one of {WDECAY_BASIS}")
    if E_j.dim != 3:
        raise ArgumentError("angular POVM elements are 3x3")
    i = WDECAY_BASIS.index(lambda_W)
    return float(min(max(E_j.matrix[i, i].real, 0.0), 1.0))
