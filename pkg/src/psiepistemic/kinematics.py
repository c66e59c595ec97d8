"""Dirac algebra, spinor boosts, spin projectors and massive vector-boson polarizations.

Conventions
-----------
* Metric ``diag(+1, -1, -1, -1)``; four-vectors are length-4 numpy arrays
  ``(t, x, y, z)``.
* The default Weyl (chiral) representation has the right-handed components on
  top: ``gamma^0 = [[0, 1], [1, 0]]``, ``gamma^i = [[0, -sigma_i], [sigma_i, 0]]``
  and ``gamma5 = diag(1, -1)``.  With this choice the rest spinors
  ``(chi; chi)/sqrt(2)`` and the z-boost ``diag(cosh + sinh sigma_3,
  cosh - sinh sigma_3)`` used throughout the package are mutually consistent.
* The Dirac (standard) representation is reached through the fixed similarity
  transform :data:`WEYL_TO_DIRAC` (an involution, so it is its own inverse).
* Rest spinors are normalized to ``u^dagger u = 1``.  The helicity spinors used
  by the amplitude oracles carry the usual ``ubar u = 2m`` normalization.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np

from .errors import ArgumentError, ConsistencyError, StateError

METRIC = np.diag([1.0, -1.0, -1.0, -1.0])

SIGMA_X = np.array([[0, 1], [1, 0]], dtype=complex)
SIGMA_Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
SIGMA_Z = np.array([[1, 0], [0, -1]], dtype=complex)
PAULI = np.array([SIGMA_X, SIGMA_Y, SIGMA_Z])

_I2 = np.eye(2, dtype=complex)
_Z2 = np.zeros((2, 2), dtype=complex)

WEYL_TO_DIRAC = np.block([[_I2, _I2], [_I2, -_I2]]) / np.sqrt(2.0)

REPRESENTATIONS = ("weyl", "dirac")

ON_SHELL_RTOL = 1e-8


def minkowski_dot(a, b) -> complex:
    """Bilinear Minkowski product ``a^mu b_mu`` (no complex conjugation)."""
    a = np.asarray(a)
    b = np.asarray(b)
    return a[0] * b[0] - a[1] * b[1] - a[2] * b[2] - a[3] * b[3]


def four_momentum(mass: float, p3) -> np.ndarray:
    p3 = np.asarray(p3, dtype=float)
    return np.concatenate([[np.sqrt(mass**2 + p3 @ p3)], p3])


def rapidity(p) -> float:
    p = np.asarray(p, dtype=float)
    pabs = np.linalg.norm(p[1:])
    return 0.5 * np.log((p[0] + pabs) / (p[0] - pabs))


def _check_rep(rep: str) -> str:
    if rep not in REPRESENTATIONS:
        raise ArgumentError(f"unknown representation {rep!r}; expected one of {REPRESENTATIONS}")
    return rep


@dataclass(frozen=True, eq=False)
class GammaBasis:
    rep: str
    gamma: np.ndarray  # (4, 4, 4), upper index mu
    gamma5: np.ndarray
    sigma: np.ndarray  # (3, 4, 4), Sigma^i = gamma5 gamma^0 gamma^i

    def slash(self, a) -> np.ndarray:
        """``gamma^mu a_mu`` for a contravariant four-vector ``a``."""
        a = np.asarray(a)
        lowered = METRIC.diagonal() * a
        return np.einsum("m,mij->ij", lowered, self.gamma)

    def bar(self, spinor) -> np.ndarray:
        return np.conj(spinor) @ self.gamma[0]

    @property
    def left(self) -> np.ndarray:
        return 0.5 * (np.eye(4) - self.gamma5)

    @property
    def right(self) -> np.ndarray:
        return 0.5 * (np.eye(4) + self.gamma5)


def _weyl_gammas() -> np.ndarray:
    g0 = np.block([[_Z2, _I2], [_I2, _Z2]])
    gi = [np.block([[_Z2, -s], [s, _Z2]]) for s in PAULI]
    return np.array([g0, *gi])


@lru_cache(maxsize=None)
def gamma_basis(rep: str = "weyl") -> GammaBasis:
    _check_rep(rep)
    gamma = _weyl_gammas()
    if rep == "dirac":
        S = WEYL_TO_DIRAC
        gamma = np.array([S @ g @ S for g in gamma])
    g5 = 1j * gamma[0] @ gamma[1] @ gamma[2] @ gamma[3]
    sigma = np.array([g5 @ gamma[0] @ gamma[i] for i in (1, 2, 3)])
    for arr in (gamma, g5, sigma):
        arr.setflags(write=False)
    return GammaBasis(rep=rep, gamma=gamma, gamma5=g5, sigma=sigma)


def convert_representation(components, source: str, target: str) -> np.ndarray:
    """Map spinor components between the Weyl and Dirac representations."""
    _check_rep(source)
    _check_rep(target)
    components = np.asarray(components, dtype=complex)
    if source == target:
        return components.copy()
    return WEYL_TO_DIRAC @ components


@dataclass(frozen=True, eq=False)
class DiracSpinor:
    components: np.ndarray
    rep: str
    momentum: np.ndarray
    mass: float
    spin_axis: np.ndarray  # rest-frame unit 3-vector
    sign: int = +1  # +1 for u(p, +s), -1 for u(p, -s)

    def __post_init__(self):
        _check_rep(self.rep)

    @property
    def at_rest(self) -> bool:
        return bool(np.allclose(self.momentum[1:], 0.0, atol=1e-14 * max(self.mass, 1.0)))

    def to(self, rep: str) -> DiracSpinor:
        return DiracSpinor(
            convert_representation(self.components, self.rep, rep),
            rep,
            self.momentum,
            self.mass,
            self.spin_axis,
            self.sign,
        )


@dataclass(frozen=True, eq=False)
class PolarizationVector:
    components: np.ndarray
    momentum: np.ndarray
    mass: float
    basis: str = "linear-3"


def _check_on_shell(p, m: float) -> np.ndarray:
    if m <= 0:
        raise ArgumentError(f"mass must be positive, got {m}")
    p = np.asarray(p, dtype=float)
    if p.shape != (4,):
        raise ArgumentError("four-momentum must have 4 components")
    if abs(minkowski_dot(p, p) - m * m) > ON_SHELL_RTOL * max(p[0] ** 2, m * m):
        raise ConsistencyError(f"momentum {p} is off shell for mass {m}")
    return p


def _unit3(v, name: str) -> np.ndarray:
    v = np.asarray(v, dtype=float)
    if v.shape != (3,) or abs(np.linalg.norm(v) - 1.0) > 1e-10:
        raise ArgumentError(f"{name} must be a unit 3-vector")
    return v


def _boost_rest_vector(v3, p, m) -> np.ndarray:
    E = p[0]
    p3 = p[1:]
    proj = p3 @ v3
    return np.concatenate([[proj / m], v3 + proj / (m * (E + m)) * p3])


def boost_spin_fourvector(s_rest, p, m: float) -> np.ndarray:
    """Spin four-vector of a fermion with momentum ``p`` whose rest-frame axis is ``s_rest``."""
    p = _check_on_shell(p, m)
    return _boost_rest_vector(_unit3(s_rest, "s_rest"), p, m)


def spin_axis(alpha: float, phi: float = 0.0) -> np.ndarray:
    return np.array([np.sin(alpha) * np.cos(phi), np.sin(alpha) * np.sin(phi), np.cos(alpha)])


def two_spinor(alpha: float, phi: float = 0.0, sign: int = +1) -> np.ndarray:
    """Eigenvector of ``sigma . n(alpha, phi)`` with eigenvalue ``sign``.

    The negative branch is ``(e^{-i phi} sin(alpha/2), -cos(alpha/2))``; at
    ``phi = 0`` this is the orthogonal state written out for the rest spinors,
    and differs from the ``alpha -> alpha + pi`` substitution by a global sign.
    """
    c, s = np.cos(alpha / 2), np.sin(alpha / 2)
    if sign > 0:
        return np.array([c, np.exp(1j * phi) * s])
    return np.array([np.exp(-1j * phi) * s, -c])


def rest_spinor(alpha: float, phi: float = 0.0, sign: int = +1, rep: str = "weyl", mass: float = 1.0) -> DiracSpinor:
    """Rest-frame spinor ``u_RF(+-s)`` quantized along ``(sin a cos p, sin a sin p, cos a)``."""
    _check_rep(rep)
    if sign not in (+1, -1):
        raise ArgumentError("sign must be +1 or -1")
    chi = two_spinor(alpha, phi, sign)
    comps = np.concatenate([chi, chi]) / np.sqrt(2.0)
    if rep == "dirac":
        comps = WEYL_TO_DIRAC @ comps
    momentum = np.array([mass, 0.0, 0.0, 0.0])
    return DiracSpinor(comps, rep, momentum, mass, spin_axis(alpha, phi), sign)


def z_boost_matrix(xi: float, rep: str = "weyl") -> np.ndarray:
    ch, sh = np.cosh(xi / 2), np.sinh(xi / 2)
    B = np.block([[ch * _I2 + sh * SIGMA_Z, _Z2], [_Z2, ch * _I2 - sh * SIGMA_Z]])
    if rep == "dirac":
        B = WEYL_TO_DIRAC @ B @ WEYL_TO_DIRAC
    return B


def boost_spinor(u: DiracSpinor, xi: float, axis: str = "z") -> DiracSpinor:
    """Boost a rest spinor along +z by rapidity ``xi``."""
    if axis != "z":
        raise ArgumentError("only z boosts are implemented directly; use boost_spinor_to for other directions")
    if not u.at_rest:
        raise StateError("boost_spinor expects a rest-frame spinor")
    if xi < 0:
        raise ArgumentError("rapidity must be non-negative")
    comps = z_boost_matrix(xi, u.rep) @ u.components
    m = u.mass
    momentum = np.array([m * np.cosh(xi), 0.0, 0.0, m * np.sinh(xi)])
    return DiracSpinor(comps, u.rep, momentum, m, u.spin_axis, u.sign)


def rotation_matrix(theta: float, phi: float, rep: str = "weyl") -> np.ndarray:
    """Spinor rotation taking the z axis to ``(theta, phi)``: ``R_z(phi) R_y(theta)``."""
    ry = np.cos(theta / 2) * _I2 - 1j * np.sin(theta / 2) * SIGMA_Y
    rz = np.cos(phi / 2) * _I2 - 1j * np.sin(phi / 2) * SIGMA_Z
    r2 = rz @ ry
    R = np.block([[r2, _Z2], [_Z2, r2]])
    if rep == "dirac":
        R = WEYL_TO_DIRAC @ R @ WEYL_TO_DIRAC
    return R


def boost_spinor_to(u: DiracSpinor, p) -> DiracSpinor:
    """Pure boost of a rest spinor to momentum ``p`` (rotate, z-boost, rotate back)."""
    if not u.at_rest:
        raise StateError("boost_spinor_to expects a rest-frame spinor")
    p = _check_on_shell(p, u.mass)
    pabs = np.linalg.norm(p[1:])
    if pabs == 0.0:
        return u
    theta = np.arccos(np.clip(p[3] / pabs, -1.0, 1.0))
    phi = np.arctan2(p[2], p[1])
    R = rotation_matrix(theta, phi, u.rep)
    B = z_boost_matrix(rapidity(p), u.rep)
    comps = R @ B @ R.conj().T @ u.components
    return DiracSpinor(comps, u.rep, p, u.mass, u.spin_axis, u.sign)


def covariant_projector(s, rep: str = "weyl") -> np.ndarray:
    """``(1 + gamma5 gamma_mu s^mu) / 2`` for a normalized spin four-vector."""
    s = np.asarray(s)
    # relative check: s.s = -1 is a cancellation of O(s0^2) terms at large rapidity
    if abs(minkowski_dot(s, s) + 1.0) > 1e-8 * max(1.0, abs(s[0]) ** 2):
        raise ArgumentError("spin four-vector must satisfy s.s = -1")
    g = gamma_basis(rep)
    return 0.5 * (np.eye(4) + g.gamma5 @ g.slash(s))


def spin_operator(s, rep: str = "weyl") -> np.ndarray:
    """``gamma5 gamma_mu s^mu``; eigenvalue +-1 on ``u(p, +-s)``."""
    g = gamma_basis(rep)
    return g.gamma5 @ g.slash(np.asarray(s))


def linear_polarization_basis(theta_star: float, phi_star: float) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    ct, st = np.cos(theta_star), np.sin(theta_star)
    cp, sp = np.cos(phi_star), np.sin(phi_star)
    e1 = np.array([ct * cp, ct * sp, -st])
    e2 = np.array([-sp, cp, 0.0])
    e3 = np.array([st * cp, st * sp, ct])
    return e1, e2, e3


def boson_polarization(eps_rest, k, m: float, basis: str = "linear-3") -> PolarizationVector:
    k = _check_on_shell(k, m)
    comps = _boost_rest_vector(_unit3(eps_rest, "eps_rest"), k, m).astype(complex)
    return PolarizationVector(comps, k, m, basis)


def circular_polarization(eps1: PolarizationVector, eps2: PolarizationVector) -> tuple[PolarizationVector, PolarizationVector]:
    if eps1.mass != eps2.mass or not np.allclose(eps1.momentum, eps2.momentum, rtol=1e-12, atol=0.0):
        raise ArgumentError("eps1 and eps2 must belong to the same boson momentum")
    plus = (-eps1.components - 1j * eps2.components) / np.sqrt(2.0)
    minus = (eps1.components - 1j * eps2.components) / np.sqrt(2.0)
    return (
        PolarizationVector(plus, eps1.momentum, eps1.mass, "circular-plus"),
        PolarizationVector(minus, eps1.momentum, eps1.mass, "circular-minus"),
    )


def polarization_set(k, m: float, theta_star: float, phi_star: float) -> dict[int, np.ndarray]:
    """Helicity-labelled polarization vectors ``{+1, -1, 0}`` for the axis ``(theta*, phi*)``."""
    e1, e2, e3 = (boson_polarization(e, k, m, f"linear-{i}") for i, e in enumerate(linear_polarization_basis(theta_star, phi_star), 1))
    plus, minus = circular_polarization(e1, e2)
    return {+1: plus.components, -1: minus.components, 0: e3.components}


def helicity_two_spinor(direction, helicity: int) -> np.ndarray:
    n = np.asarray(direction, dtype=float)
    n = n / np.linalg.norm(n)
    theta = np.arctan2(np.hypot(n[0], n[1]), n[2])
    phi = np.arctan2(n[1], n[0])
    return two_spinor(theta, phi, helicity)


def helicity_spinor(p, helicity: int, mass: float = 0.0, kind: str = "u", rep: str = "weyl") -> np.ndarray:
    """Helicity eigenspinor ``u`` or ``v`` with ``ubar u = 2m`` (``u^dagger u = 2E``).

    For ``kind="v"`` the helicity label is the physical helicity of the
    antiparticle, so the two-spinor is quantized opposite to the momentum.
    """
    _check_rep(rep)
    if helicity not in (+1, -1):
        raise ArgumentError("helicity must be +1 or -1")
    p = np.asarray(p, dtype=float)
    E = p[0]
    pabs = np.linalg.norm(p[1:])
    if pabs == 0.0:
        raise ArgumentError("helicity is undefined for a particle at rest")
    # E - |p| = m^2 / (E + |p|) avoids cancellation for light particles
    big = np.sqrt(E + pabs)
    small = mass / big if mass > 0 else 0.0
    plus, minus = (big, small) if helicity > 0 else (small, big)
    if kind == "u":
        chi = helicity_two_spinor(p[1:], helicity)
        comps = np.concatenate([plus * chi, minus * chi])
    elif kind == "v":
        eta = helicity_two_spinor(p[1:], -helicity)
        comps = np.concatenate([minus * eta, -plus * eta])
    else:
        raise ArgumentError("kind must be 'u' or 'v'")
    if rep == "dirac":
        comps = WEYL_TO_DIRAC @ comps
    return comps
