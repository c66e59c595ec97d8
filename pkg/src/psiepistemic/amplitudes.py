"""Closed-form polarized amplitudes and rates.

Three processes are covered:

* ``W- -> l- nubar`` in the W rest frame, helicity amplitudes
  ``M(lambda_l, lambda_nubar, lambda_W)`` with ``theta`` the charged-lepton
  polar angle relative to the W spin-quantization axis;
* ``ubar d -> W- H`` at leading order, amplitudes ``M(lambda_d, lambda_ubar,
  lambda_W)`` with the W polarization quantized along ``(theta*, phi*)`` in the
  W rest frame;
* the charged-current neutrino absorption scaling ``|M(+-s)|^2 / |M|^2_{m=0}``.

Every closed form here has a brute-force twin in :mod:`psiepistemic.oracles`.
Helicity labels are the integers ``+1``, ``-1`` and ``0``.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .constants import PhysicsConstants
from .errors import ArgumentError, KinematicsError
from .kinematics import gamma_basis, helicity_spinor, z_boost_matrix, two_spinor

W_HELICITIES = (+1, -1, 0)


@dataclass(frozen=True)
class HelicityAmplitudeSet:
    """Amplitudes keyed by helicity triples; missing keys are exact zeros."""

    process: str
    amplitudes: dict[tuple[int, int, int], complex]
    kinematics: dict[str, float] = field(default_factory=dict)

    def __getitem__(self, key: tuple[int, int, int]) -> complex:
        return self.amplitudes.get(key, 0j)

    def keys(self):
        return self.amplitudes.keys()

    def squared(self, lambda_W: int, fixed: dict[int, int] | None = None) -> float:
        """Sum of ``|M|^2`` over the unobserved fermion helicities at fixed ``lambda_W``."""
        total = 0.0
        for (a, b, w), amp in self.amplitudes.items():
            if w != lambda_W:
                continue
            if fixed and any((a, b)[i] != v for i, v in fixed.items()):
                continue
            total += abs(amp) ** 2
        return total


def _check_lambda_W(lambda_W: int) -> int:
    if lambda_W not in W_HELICITIES:
        raise ArgumentError(f"lambda_W must be one of {W_HELICITIES}, got {lambda_W!r}")
    return lambda_W


# --- W -> l nubar -----------------------------------------------------------


def _w_decay_scale(ell: str, c: PhysicsConstants) -> tuple[float, float, float]:
    m_l = c.lepton_mass(ell)
    if m_l >= c.m_W:
        raise KinematicsError(f"lepton mass {m_l} must be below m_W = {c.m_W}")
    return c.g_W, m_l, np.sqrt(c.m_W**2 - m_l**2)


def w_decay_amplitude_arrays(ell: str, c: PhysicsConstants, theta=None, cos_theta=None) -> dict[tuple[int, int, int], np.ndarray]:
    """Vectorized nonvanishing amplitudes on a grid of ``theta`` or of ``cos(theta)``.

    Given ``theta``, the factors ``1 -+ cos(theta)`` are evaluated through
    half angles so that the amplitudes keep full relative precision near the
    poles.
    """
    g, m_l, root = _w_decay_scale(ell, c)
    if theta is not None:
        th = np.asarray(theta, dtype=float)
        ct, st = np.cos(th), np.sin(th)
        one_minus, one_plus = 2 * np.sin(th / 2) ** 2, 2 * np.cos(th / 2) ** 2
    else:
        ct = np.asarray(cos_theta, dtype=float)
        st = np.sqrt(np.clip(1.0 - ct * ct, 0.0, None))
        one_minus, one_plus = 1 - ct, 1 + ct
    r = m_l / c.m_W
    return {
        (+1, +1, 0): g / np.sqrt(2) * r * root * ct,
        (+1, +1, +1): -g / 2 * r * root * st,
        (+1, +1, -1): g / 2 * r * root * st,
        (-1, +1, 0): -g / np.sqrt(2) * root * st,
        (-1, +1, +1): g / 2 * root * one_minus,
        (-1, +1, -1): g / 2 * root * one_plus,
    }


def w_decay_amplitudes(theta: float, ell: str = "e", c: PhysicsConstants | None = None) -> HelicityAmplitudeSet:
    c = c or PhysicsConstants()
    if not 0.0 <= theta <= np.pi:
        raise ArgumentError("theta must lie in [0, pi]")
    arrays = w_decay_amplitude_arrays(ell, c, theta=theta)
    amps = {}
    for lam_l in (+1, -1):
        for lam_nu in (+1, -1):
            for lam_w in W_HELICITIES:
                key = (lam_l, lam_nu, lam_w)
                # massless antineutrino: only positive helicity couples
                amps[key] = complex(arrays[key]) if key in arrays else 0j
    return HelicityAmplitudeSet("W->l nubar", amps, {"theta": theta, "m_l": c.lepton_mass(ell)})


def w_decay_dGamma(theta, lambda_W: int, ell: str = "e", c: PhysicsConstants | None = None, *, cos_theta=None):
    """``dGamma/dcos(theta)`` for W polarization ``lambda_W``, summed over lepton helicity.

    ``theta`` may be an array; pass ``cos_theta=`` instead to evaluate directly
    on a ``cos(theta)`` grid.
    """
    c = c or PhysicsConstants()
    _check_lambda_W(lambda_W)
    if cos_theta is None:
        arrays = w_decay_amplitude_arrays(ell, c, theta=theta)
    else:
        arrays = w_decay_amplitude_arrays(ell, c, cos_theta=cos_theta)
    m_l = c.lepton_mass(ell)
    msq = sum(np.abs(arrays[(lam_l, +1, lambda_W)]) ** 2 for lam_l in (+1, -1))
    return (c.m_W**2 - m_l**2) / (32 * np.pi * c.m_W**3) * msq


def w_decay_total_width(lambda_W: int, ell: str = "e", c: PhysicsConstants | None = None) -> float:
    """Closed-form integral of ``dGamma/dcos(theta)`` over ``[-1, 1]``.

    The integrand is a quadratic in ``cos(theta)``, so three-point
    Gauss-Legendre is exact.
    """
    x, w = np.polynomial.legendre.leggauss(3)
    return float(w @ w_decay_dGamma(None, lambda_W, ell, c, cos_theta=x))


# --- ubar d -> W- H ---------------------------------------------------------


@dataclass(frozen=True)
class WHKinematics:
    sqrt_s: float
    s: float
    E_W: float
    k_W: float  # |k_W| in the partonic CM frame
    p_in: float  # |p| of each incoming quark


def wh_kinematics(sqrt_s: float, c: PhysicsConstants) -> WHKinematics:
    if not sqrt_s > c.m_W + c.m_H:
        raise KinematicsError(f"sqrt_s = {sqrt_s} GeV is below the WH threshold {c.m_W + c.m_H:.3f} GeV")
    s = sqrt_s**2
    E_W = (s + c.m_W**2 - c.m_H**2) / (2 * sqrt_s)
    return WHKinematics(sqrt_s, s, E_W, np.sqrt(E_W**2 - c.m_W**2), sqrt_s / 2)


def _wh_compact(theta, theta_star, phi_star, kin: WHKinematics, c: PhysicsConstants):
    """Compact closed forms of the three ``(-,+,lambda_W)`` amplitudes.

    These use half the physical normalization and the opposite labelling of
    the transverse states; :func:`wh_amplitude_arrays` maps them back.
    """
    mW, EW, rs, s = c.m_W, kin.E_W, kin.sqrt_s, kin.s
    g2v = c.g_W**2 * c.V_ud
    st, ct = np.sin(theta), np.cos(theta)
    sts, cts = np.sin(theta_star), np.cos(theta_star)
    sps, cps = np.sin(phi_star), np.cos(phi_star)
    d = EW - mW
    zero = g2v * rs / (2 * np.sqrt(2) * (s - mW**2)) * (
        d * ct * cts * st + (-1j * mW * sps + cps * (mW + d * st**2)) * sts
    )
    plus = g2v * rs / (8 * (s - mW**2)) * (
        1j * (EW + mW - d * np.cos(2 * theta) + 2 * mW * cts) * sps
        + 2 * cps * (-mW * (1 + cts) - d * cts * st**2)
        + d * np.sin(2 * theta) * sts
    )
    minus = g2v * rs / (4 * (s - mW**2)) * (
        1j * sps * (mW * (-1 + cts) - d * st**2)
        + cps * (mW + cts * (-mW - d * st**2))
        + d * ct * st * sts
    )
    return {0: zero, +1: plus, -1: minus}


def wh_amplitude_arrays(theta, theta_star, phi_star, sqrt_s: float, c: PhysicsConstants, convention: str = "physical"):
    """Vectorized ``M(-,+,lambda_W)`` for the WH process.

    ``convention="physical"`` (default) returns amplitudes for the conjugated
    polarization vectors of the leading-order matrix element with
    ``ubar u = 2m`` spinors.  ``convention="compact"`` returns the compact
    closed forms, which differ by a factor 2, exchanged transverse labels and
    a sign on ``lambda_W = -1``.
    """
    kin = wh_kinematics(sqrt_s, c)
    compact = _wh_compact(theta, theta_star, phi_star, kin, c)
    if convention == "compact":
        return compact
    if convention != "physical":
        raise ArgumentError("convention must be 'physical' or 'compact'")
    return {0: 2 * compact[0], +1: 2 * compact[-1], -1: -2 * compact[+1]}


def wh_production_amplitudes(
    theta: float,
    theta_star: float,
    phi_star: float,
    sqrt_s: float,
    c: PhysicsConstants | None = None,
    convention: str = "physical",
) -> HelicityAmplitudeSet:
    c = c or PhysicsConstants()
    arrays = wh_amplitude_arrays(theta, theta_star, phi_star, sqrt_s, c, convention)
    amps = {}
    for lam_d in (+1, -1):
        for lam_u in (+1, -1):
            for lam_w in W_HELICITIES:
                # massless quarks through a V-A vertex: only (d left, ubar right)
                amps[(lam_d, lam_u, lam_w)] = complex(arrays[lam_w]) if (lam_d, lam_u) == (-1, +1) else 0j
    kin = {"theta": theta, "theta_star": theta_star, "phi_star": phi_star, "sqrt_s": sqrt_s}
    return HelicityAmplitudeSet("ubar d->W- H", amps, kin)


def wh_dSigma(theta, theta_star, phi_star, lambda_W: int, sqrt_s: float, c: PhysicsConstants | None = None):
    """Partonic ``dsigma/dOmega`` (GeV^-2) for W polarization ``lambda_W``; quark spins averaged."""
    c = c or PhysicsConstants()
    _check_lambda_W(lambda_W)
    kin = wh_kinematics(sqrt_s, c)
    amp = wh_amplitude_arrays(theta, theta_star, phi_star, sqrt_s, c)[lambda_W]
    return 0.25 * np.abs(amp) ** 2 * kin.k_W / (64 * np.pi**2 * kin.s * kin.p_in)


# --- neutrino charged current -----------------------------------------------


def default_test_current() -> np.ndarray:
    """A generic row vector ``ubar_l gamma^mu J2_mu`` for the absorption amplitude.

    Built from a 3 GeV negative-helicity muon and a fixed external current;
    any choice with nonzero left- and right-handed overlaps works.
    """
    g = gamma_basis("weyl")
    k = np.array([0.0, 3.0 * np.sin(1.1) * np.cos(0.4), 3.0 * np.sin(1.1) * np.sin(0.4), 3.0 * np.cos(1.1)])
    k[0] = np.sqrt(0.10566**2 + k[1:] @ k[1:])
    u_mu = helicity_spinor(k, -1, 0.10566, "u")
    j2 = np.array([1.0, 0.2 + 0.1j, -0.3, 0.5j])
    return g.bar(u_mu) @ g.slash(j2)


@dataclass(frozen=True)
class NeutrinoScaling:
    """Squared-amplitude ratios ``|M(+s)|^2`` and ``|M(-s)|^2`` over the massless value."""

    plus: float
    minus: float
    bound: float  # C e^{-xi}
    constant: float  # C
    exact: bool
    certified: bool = True


def _current_ratio(current, chirality: str) -> complex:
    current = np.asarray(current, dtype=complex)
    # Weyl rep: right-handed components are 0,1 and left-handed are 2,3
    lead, sub = (3, 2) if chirality == "L" else (0, 1)
    if current[lead] == 0:
        raise ArgumentError("test current has no overlap with the massless reference spinor")
    return current[sub] / current[lead]


def squared_amplitude_ratio(alpha: float, xi: float, sign: int, chirality: str = "L", current=None) -> float:
    """``|M(+-s)|^2 / |M|^2_{m=0}`` from explicit boosted spinors.

    The massive spinor is the rest spinor quantized along
    ``cos(alpha) z + sin(alpha) x`` boosted along +z by ``xi`` (its ``-s``
    partner uses ``alpha -> alpha + pi``).  The massless reference is the
    same-energy chiral spinor with equal ``u^dagger u``.
    """
    if xi < 0:
        raise ArgumentError("rapidity must be non-negative")
    if chirality not in ("L", "R"):
        raise ArgumentError("chirality must be 'L' or 'R'")
    w = default_test_current() if current is None else np.asarray(current, dtype=complex)
    g = gamma_basis("weyl")
    proj = g.left if chirality == "L" else g.right
    a = alpha if sign > 0 else alpha + np.pi
    chi = two_spinor(a, 0.0, +1)
    u = z_boost_matrix(xi) @ (np.concatenate([chi, chi]) / np.sqrt(2.0))
    ref = np.zeros(4, dtype=complex)
    ref[3 if chirality == "L" else 0] = np.sqrt(np.cosh(xi))
    return float(abs(w @ proj @ u) ** 2 / abs(w @ proj @ ref) ** 2)


def neutrino_amplitude_scaling(alpha: float, xi: float, exact: bool = False, current=None, chirality: str = "L") -> NeutrinoScaling:
    """Helicity suppression factors ``((1 - cos a)/2, (1 + cos a)/2)`` and their finite-``xi`` error.

    The bound constant is ``C = (1 + |rho|)^2`` where ``rho`` is the ratio of
    the test current's subleading to leading chiral component; the exact
    ratios differ from the ideal ones by at most ``C e^{-xi}``.  For
    ``chirality="R"`` the ideal factors are exchanged.
    """
    if xi < 0:
        raise ArgumentError("rapidity must be non-negative")
    w = default_test_current() if current is None else current
    rho = abs(_current_ratio(w, chirality))
    C = (1 + rho) ** 2
    bound = C * np.exp(-xi)
    ideal_plus = (1 - np.cos(alpha)) / 2 if chirality == "L" else (1 + np.cos(alpha)) / 2
    ideal_minus = 1 - ideal_plus
    if not exact:
        return NeutrinoScaling(ideal_plus, ideal_minus, bound, C, exact=False)
    plus = squared_amplitude_ratio(alpha, xi, +1, chirality, w)
    minus = squared_amplitude_ratio(alpha, xi, -1, chirality, w)
    residual = max(abs(plus - ideal_plus), abs(minus - ideal_minus))
    return NeutrinoScaling(plus, minus, bound, C, exact=True, certified=bool(residual <= bound))
