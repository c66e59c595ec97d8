"""Discretized ontological models.

An ontic space is a finite set of labelled points with positive quadrature
weights ``m(lambda)``.  Distributions are densities ``mu(lambda)`` with
``sum mu m = 1``, response functions are per-point outcome probabilities, and
the probability rule is the weighted sum ``sum xi_k mu m``.

Outcome indices are zero-based throughout.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from enum import Enum

import numpy as np
from scipy.optimize import least_squares

from .errors import (
    ArgumentError,
    InfeasibleError,
    OutcomeIndexError,
    SpaceMismatchError,
    StateError,
)
from .states import PovmElement, QuantumState, check_complete

DIST_NORM_TOL = 1e-10
RESPONSE_TOL = 1e-10
OVERLAP_TOL = 1e-10


@dataclass(frozen=True, eq=False)
class OnticSpace:
    """Finite ontic space.

    ``representatives[i]`` is the unit vector attached to point ``i``; the
    reference model uses it both to place delta preparations and to evaluate
    responses.
    """

    labels: np.ndarray
    weights: np.ndarray
    representatives: np.ndarray
    name: str = ""

    def __post_init__(self):
        labels = np.asarray(self.labels)
        weights = np.asarray(self.weights, dtype=float)
        reps = np.asarray(self.representatives, dtype=complex)
        if labels.ndim != 1 or weights.shape != labels.shape or reps.shape[0] != labels.size:
            raise ArgumentError("labels, weights and representatives must have matching lengths")
        if not np.all(weights > 0):
            raise ArgumentError("ontic weights must be strictly positive")
        if np.unique(labels).size != labels.size:
            raise ArgumentError("ontic point labels must be unique")
        for name, arr in (("labels", labels), ("weights", weights), ("representatives", reps)):
            arr.setflags(write=False)
            object.__setattr__(self, name, arr)

    @property
    def size(self) -> int:
        return self.labels.size

    @property
    def dim(self) -> int:
        return self.representatives.shape[1]

    def nearest(self, state: QuantumState) -> int:
        """Index of the point whose representative has maximal fidelity with ``state``."""
        if state.dim != self.dim:
            raise ArgumentError(f"state dimension {state.dim} does not match ontic space dimension {self.dim}")
        return int(np.argmax(np.abs(self.representatives.conj() @ state.amplitudes)))


def bloch_grid(n_rings: int = 63, n_phi: int = 128) -> OnticSpace:
    """Equal-area grid on the Bloch sphere: two polar caps plus ``n_rings`` x ``n_phi`` cells.

    Ring centres sit at the midpoints in ``cos(theta)`` and cell centres at
    ``phi = 2 pi j / n_phi``.  With an odd ring count and ``n_phi`` divisible
    by 4 the poles and the six Pauli eigenstates are exact grid points.
    """
    if n_rings < 1 or n_phi < 1:
        raise ArgumentError("grid sizes must be positive")
    n_cells = 2 + n_rings * n_phi
    z_cap = 1.0 - 2.0 / n_cells
    edges = np.linspace(z_cap, -z_cap, n_rings + 1)
    z_mid = 0.5 * (edges[:-1] + edges[1:])
    theta = np.concatenate([[0.0], np.repeat(np.arccos(z_mid), n_phi), [np.pi]])
    phi = np.concatenate([[0.0], np.tile(2 * np.pi * np.arange(n_phi) / n_phi, n_rings), [0.0]])
    # snap the equator exactly so |+> and friends are representable without rounding
    theta[np.isclose(theta, np.pi / 2, atol=1e-14)] = np.pi / 2
    reps = np.stack([np.cos(theta / 2), np.exp(1j * phi) * np.sin(theta / 2)], axis=1)
    weights = np.full(n_cells, 1.0 / n_cells)
    return OnticSpace(np.arange(n_cells), weights, reps, name=f"bloch-{n_rings}x{n_phi}")


def sampled_space(dim: int = 3, n_points: int = 100_000, seed: int = 0, anchors=None) -> OnticSpace:
    """Uniform random rays in ``C^dim`` with equal weights.

    ``anchors`` (default: the computational basis) are included verbatim
    ahead of the random samples.
    """
    if dim < 2 or n_points < 1:
        raise ArgumentError("need dim >= 2 and at least one point")
    if anchors is None:
        anchors = [QuantumState.basis(i, dim) for i in range(dim)]
    rng = np.random.default_rng(seed)
    z = rng.normal(size=(n_points, dim)) + 1j * rng.normal(size=(n_points, dim))
    z /= np.linalg.norm(z, axis=1, keepdims=True)
    # fix the global phase: first component real and non-negative
    z *= np.exp(-1j * np.angle(z[:, :1]))
    reps = np.concatenate([np.array([a.amplitudes for a in anchors]).reshape(-1, dim), z])
    n = reps.shape[0]
    return OnticSpace(np.arange(n), np.full(n, 1.0 / n), reps, name=f"sampled-C{dim}-{n_points}")


@dataclass(frozen=True, eq=False)
class OnticDistribution:
    space: OnticSpace
    density: np.ndarray

    def __post_init__(self):
        density = np.asarray(self.density, dtype=float)
        if density.shape != (self.space.size,):
            raise ArgumentError("density length does not match the ontic space")
        if np.any(density < 0):
            raise ArgumentError("density must be non-negative")
        total = float(density @ self.space.weights)
        if abs(total - 1.0) > DIST_NORM_TOL:
            raise ArgumentError(f"distribution is not normalized (integral {total!r})")
        density.setflags(write=False)
        object.__setattr__(self, "density", density)

    @classmethod
    def delta(cls, space: OnticSpace, index: int) -> OnticDistribution:
        density = np.zeros(space.size)
        density[index] = 1.0 / space.weights[index]
        return cls(space, density)

    @classmethod
    def mixture(cls, parts) -> OnticDistribution:
        """Convex combination of ``(weight, distribution)`` pairs on one space."""
        parts = list(parts)
        space = parts[0][1].space
        for _, d in parts:
            _same_space(space, d.space)
        return cls(space, sum(w * d.density for w, d in parts))

    @property
    def mass(self) -> np.ndarray:
        """Per-point probability ``mu(lambda) m(lambda)``."""
        return self.density * self.space.weights


@dataclass(frozen=True, eq=False)
class ResponseFunction:
    space: OnticSpace
    values: np.ndarray  # (n_points, n_outcomes)

    def __post_init__(self):
        values = np.asarray(self.values, dtype=float)
        if values.ndim != 2 or values.shape[0] != self.space.size:
            raise ArgumentError("response values must have shape (n_points, n_outcomes)")
        if values.min() < -RESPONSE_TOL or values.max() > 1 + RESPONSE_TOL:
            raise ArgumentError("response values must lie in [0, 1]")
        err = np.max(np.abs(values.sum(axis=1) - 1.0))
        if err > RESPONSE_TOL:
            raise ArgumentError(f"response functions do not sum to 1 at every point (max deviation {err:.3e})")
        values = np.clip(values, 0.0, 1.0)
        values.setflags(write=False)
        object.__setattr__(self, "values", values)

    @property
    def outcomes(self) -> int:
        return self.values.shape[1]


def _same_space(a: OnticSpace, b: OnticSpace) -> None:
    if a is not b:
        raise SpaceMismatchError(f"ontic spaces differ ({a.name!r} vs {b.name!r})")


def outcome_probability(dist: OnticDistribution, resp: ResponseFunction, k: int) -> float:
    _same_space(dist.space, resp.space)
    if not 0 <= k < resp.outcomes:
        raise OutcomeIndexError(f"outcome index {k} out of range for {resp.outcomes} outcomes")
    return float(resp.values[:, k] @ dist.mass)


def variation_distance(mu0: OnticDistribution, mu1: OnticDistribution) -> float:
    _same_space(mu0.space, mu1.space)
    return float(0.5 * np.abs(mu0.density - mu1.density) @ mu0.space.weights)


def overlap(mu0: OnticDistribution, mu1: OnticDistribution) -> float:
    _same_space(mu0.space, mu1.space)
    return float(np.minimum(mu0.density, mu1.density) @ mu0.space.weights)


class OntologicalModel:
    """Base class: a preparation map and a response map over one ontic space."""

    space: OnticSpace

    def prepare(self, state: QuantumState) -> OnticDistribution:
        raise NotImplementedError

    def respond(self, elements) -> ResponseFunction:
        raise NotImplementedError


class ReferenceModel(OntologicalModel):
    """psi-ontic baseline: delta on the nearest cell, responses ``<lambda|E_k|lambda>``."""

    def __init__(self, space: OnticSpace):
        self.space = space

    def prepare(self, state: QuantumState) -> OnticDistribution:
        return OnticDistribution.delta(self.space, self.space.nearest(state))

    def respond(self, elements) -> ResponseFunction:
        elements = list(elements)
        check_complete(elements)
        if elements[0].dim != self.space.dim:
            raise ArgumentError("measurement dimension does not match the ontic space")
        reps = self.space.representatives
        values = np.stack([np.einsum("ni,ij,nj->n", reps.conj(), e.matrix, reps).real for e in elements], axis=1)
        return ResponseFunction(self.space, values)


class DeviationModel(ReferenceModel):
    """Reference model whose preparation of ``prepared`` leaks mass ``q`` onto the cell of ``confusable``.

    Every other preparation is unchanged, so the ontic overlap of the pair
    (``prepared``, ``confusable``) is exactly ``q`` and the leaked mass
    answers measurements as the confusable state does.
    """

    def __init__(self, space: OnticSpace, prepared: QuantumState, confusable: QuantumState, q: float):
        super().__init__(space)
        if not 0.0 <= q <= 1.0:
            raise ArgumentError("q must lie in [0, 1]")
        if space.nearest(prepared) == space.nearest(confusable):
            raise ArgumentError("prepared and confusable states fall in the same ontic cell")
        self.prepared = prepared
        self.confusable = confusable
        self.q = q

    def prepare(self, state: QuantumState) -> OnticDistribution:
        base = super().prepare(state)
        if not state.same_ray(self.prepared):
            return base
        other = super().prepare(self.confusable)
        return OnticDistribution.mixture([(1.0 - self.q, base), (self.q, other)])


def born_check(model: OntologicalModel, state: QuantumState, projectors) -> float:
    """Largest absolute gap between Born probabilities and the model's predictions."""
    projectors = list(projectors)
    check_complete(projectors)
    dist = model.prepare(state)
    resp = model.respond(projectors)
    return max(abs(e.expectation(state) - outcome_probability(dist, resp, k)) for k, e in enumerate(projectors))


class Ontology(Enum):
    ONTIC = "Ontic"
    EPISTEMIC = "Epistemic"


@dataclass(frozen=True)
class HSClassification:
    verdict: Ontology
    witness: tuple[QuantumState, QuantumState] | None
    witness_overlap: float
    pairs_tested: int
    # a finite test can only certify ontic-ness for the pairs it was given
    relative_to_tested_pairs: bool = field(default=True)


def classify_hs(model: OntologicalModel, pairs, tol: float = OVERLAP_TOL) -> HSClassification:
    pairs = list(pairs)
    if not pairs:
        raise ArgumentError("classify_hs needs at least one state pair")
    for a, b in pairs:
        if a.same_ray(b):
            raise StateError("state pairs must be distinct")
    best = (-1.0, None)
    for a, b in pairs:
        w = overlap(model.prepare(a), model.prepare(b))
        if w > tol:
            return HSClassification(Ontology.EPISTEMIC, (a, b), w, len(pairs))
        best = max(best, (w, (a, b)), key=lambda t: t[0])
    return HSClassification(Ontology.ONTIC, None, best[0], len(pairs))


# --- PBR construction -------------------------------------------------------


def pbr_states(alpha: float) -> tuple[QuantumState, QuantumState]:
    """``cos(a/2)|0> +- sin(a/2)|1>``, with inner product ``cos(a)``."""
    if not 0.0 < alpha < np.pi / 2:
        raise ArgumentError("alpha must lie in the open interval (0, pi/2)")
    return _pbr_pair(alpha)


def _pbr_pair(alpha: float) -> tuple[QuantumState, QuantumState]:
    c, s = np.cos(alpha / 2), np.sin(alpha / 2)
    return QuantumState(np.array([c, s])), QuantumState(np.array([c, -s]))


def product_state(x, alpha: float) -> QuantumState:
    x = [int(b) for b in x]
    if not x:
        raise ArgumentError("bit vector must be non-empty")
    if any(b not in (0, 1) for b in x):
        raise ArgumentError("bits must be 0 or 1")
    pair = _pbr_pair(alpha)
    v = np.array([1.0 + 0j])
    for b in x:
        v = np.kron(v, pair[b].amplitudes)
    return QuantumState(v / np.linalg.norm(v))


@dataclass(frozen=True, eq=False)
class PBRBasis:
    n: int
    alpha: float
    beta: float | None
    vectors: np.ndarray  # columns are the basis states, ordered like itertools.product((0, 1), repeat=n)
    residual: float  # max_x |<varsigma_x|Psi_x>|

    @property
    def labels(self) -> list[tuple[int, ...]]:
        return list(itertools.product((0, 1), repeat=self.n))


def _unitary(params: np.ndarray, d: int) -> np.ndarray:
    a = (params[: d * d] + 1j * params[d * d :]).reshape(d, d)
    q, r = np.linalg.qr(a)
    return q * (np.diag(r) / np.abs(np.diag(r)))


def _pbr_overlaps(params, targets, d):
    return np.einsum("ix,xi->x", _unitary(params, d).conj(), targets)


def _pbr_residuals(params, targets, d):
    r = _pbr_overlaps(params, targets, d)
    return np.concatenate([r.real, r.imag])


def _solve(x0, targets, d):
    sol = least_squares(_pbr_residuals, x0, args=(targets, d), method="trf", xtol=1e-15, ftol=1e-15, gtol=1e-15)
    return sol.x, float(np.abs(_pbr_overlaps(sol.x, targets, d)).max())


def pbr_basis(n: int, alpha: float, beta: float | None = None, *, tol: float = 1e-8, steps: int = 8, restarts: int = 2, seed: int = 0) -> PBRBasis:
    """Orthonormal basis ``varsigma_x`` with ``<varsigma_x|Psi_x> = 0`` for every bit string ``x``.

    The basis is found by minimizing the antidistinguishing residuals over
    unitaries, continuing from ``alpha = pi/2`` where the tensor products of
    the flipped states solve the problem exactly.  ``beta`` is recorded but
    not used: the search does not assume a gate decomposition.
    """
    if n < 2:
        raise ArgumentError("pbr_basis needs n >= 2")
    if not 0.0 < alpha <= np.pi / 2:
        raise ArgumentError("alpha must lie in (0, pi/2]")
    d = 2**n
    xs = list(itertools.product((0, 1), repeat=n))

    def targets(a):
        return np.array([product_state(x, a).amplitudes for x in xs])

    seed_u = np.array([product_state([1 - b for b in x], np.pi / 2).amplitudes for x in xs]).T
    params = np.concatenate([seed_u.real.ravel(), seed_u.imag.ravel()])
    residual = 0.0
    for a in np.linspace(np.pi / 2, alpha, steps + 1)[1:]:
        params, residual = _solve(params, targets(a), d)
    rng = np.random.default_rng(seed)
    for _ in range(restarts):
        if residual <= tol:
            break
        cand, res = _solve(rng.normal(size=2 * d * d), targets(alpha), d)
        if res < residual:
            params, residual = cand, res
    if residual > tol:
        raise InfeasibleError(f"no antidistinguishing basis found for n={n}, alpha={alpha:.6g}", residual)
    return PBRBasis(n, alpha, beta, _unitary(params, d), residual)
