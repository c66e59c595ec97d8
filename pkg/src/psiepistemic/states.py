"""Pure quantum states and POVM elements shared by the ontology and measurement modules."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ArgumentError, CompletenessError, StateError

NORM_TOL = 1e-12
HERMITIAN_TOL = 1e-12
COMPLETENESS_TOL = 1e-10


@dataclass(frozen=True, eq=False)
class QuantumState:
    """Unit vector in a ``dim``-dimensional Hilbert space (``dim >= 2``)."""

    amplitudes: np.ndarray

    def __post_init__(self):
        amps = np.array(self.amplitudes, dtype=complex).reshape(-1)
        if amps.size < 2:
            raise StateError("Hilbert-space dimension must be at least 2")
        norm = np.vdot(amps, amps).real
        if abs(norm - 1.0) > NORM_TOL:
            raise StateError(f"state is not normalized (norm^2 = {norm!r})")
        amps.setflags(write=False)
        object.__setattr__(self, "amplitudes", amps)

    @classmethod
    def normalized(cls, amplitudes) -> QuantumState:
        amps = np.asarray(amplitudes, dtype=complex)
        norm = np.linalg.norm(amps)
        if norm == 0:
            raise StateError("cannot normalize the zero vector")
        return cls(amps / norm)

    @classmethod
    def basis(cls, index: int, dim: int) -> QuantumState:
        if not 0 <= index < dim:
            raise ArgumentError(f"basis index {index} out of range for dim {dim}")
        amps = np.zeros(dim, dtype=complex)
        amps[index] = 1.0
        return cls(amps)

    @classmethod
    def bloch(cls, theta: float, phi: float = 0.0) -> QuantumState:
        """``cos(theta/2)|0> + e^{i phi} sin(theta/2)|1>``."""
        return cls(np.array([np.cos(theta / 2), np.exp(1j * phi) * np.sin(theta / 2)]))

    @property
    def dim(self) -> int:
        return self.amplitudes.size

    def inner(self, other: QuantumState) -> complex:
        """``<self|other>``."""
        return complex(np.vdot(self.amplitudes, other.amplitudes))

    def fidelity(self, other: QuantumState) -> float:
        return abs(self.inner(other)) ** 2

    def same_ray(self, other: QuantumState, tol: float = 1e-12) -> bool:
        return self.dim == other.dim and self.fidelity(other) > 1.0 - tol

    def projector(self) -> np.ndarray:
        return np.outer(self.amplitudes, self.amplitudes.conj())


@dataclass(frozen=True, eq=False)
class PovmElement:
    """Hermitian positive-semidefinite effect operator with an outcome label."""

    matrix: np.ndarray
    label: str = ""
    physical: bool = True

    def __post_init__(self):
        m = np.array(self.matrix, dtype=complex)
        if m.ndim != 2 or m.shape[0] != m.shape[1] or m.shape[0] < 2:
            raise ArgumentError("POVM element must be a square matrix of size >= 2")
        if np.max(np.abs(m - m.conj().T)) > HERMITIAN_TOL:
            raise ArgumentError(f"POVM element {self.label!r} is not Hermitian")
        if np.linalg.eigvalsh(m).min() < -HERMITIAN_TOL:
            raise ArgumentError(f"POVM element {self.label!r} is not positive semidefinite")
        m.setflags(write=False)
        object.__setattr__(self, "matrix", m)

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]

    def expectation(self, state: QuantumState) -> float:
        if state.dim != self.dim:
            raise ArgumentError(f"state dimension {state.dim} does not match POVM dimension {self.dim}")
        value = np.vdot(state.amplitudes, self.matrix @ state.amplitudes).real
        return float(min(max(value, 0.0), 1.0))


def check_complete(elements, tol: float = COMPLETENESS_TOL) -> None:
    """Raise :class:`CompletenessError` unless the elements sum to the identity."""
    elements = list(elements)
    if not elements:
        raise CompletenessError("empty measurement")
    dims = {e.dim for e in elements}
    if len(dims) != 1:
        raise CompletenessError("POVM elements have different dimensions")
    total = sum(e.matrix for e in elements)
    err = np.max(np.abs(total - np.eye(dims.pop())))
    if err > tol:
        raise CompletenessError(f"POVM elements do not sum to the identity (max deviation {err:.3e})")


def projective_measurement(basis, labels=None) -> list[PovmElement]:
    """Rank-one projectors onto the given orthonormal states."""
    basis = list(basis)
    labels = labels or [str(i) for i in range(len(basis))]
    return [PovmElement(s.projector(), lab) for s, lab in zip(basis, labels)]
