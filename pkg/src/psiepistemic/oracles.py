"""Brute-force matrix elements from explicit spinors and gamma matrices.

These are independent of the closed forms in :mod:`psiepistemic.amplitudes`
and exist to check them: every amplitude is assembled as a full Dirac
contraction of numerically built helicity spinors and polarization vectors.
"""

from __future__ import annotations

import numpy as np

from .amplitudes import W_HELICITIES, HelicityAmplitudeSet, wh_kinematics
from .constants import PhysicsConstants
from .errors import KinematicsError
from .kinematics import METRIC, gamma_basis, helicity_spinor, polarization_set


def w_decay_amplitudes_oracle(theta: float, ell: str = "e", c: PhysicsConstants | None = None, rep: str = "weyl") -> HelicityAmplitudeSet:
    """``(g/sqrt2) ubar(k1) gamma_mu P_L v(k2) eps^mu`` in the W rest frame, W quantized along +z."""
    c = c or PhysicsConstants()
    m_l = c.lepton_mass(ell)
    if m_l >= c.m_W:
        raise KinematicsError("lepton mass must be below m_W")
    g = gamma_basis(rep)
    E1 = (c.m_W**2 + m_l**2) / (2 * c.m_W)
    k = (c.m_W**2 - m_l**2) / (2 * c.m_W)
    n = np.array([np.sin(theta), 0.0, np.cos(theta)])
    k1 = np.concatenate([[E1], k * n])
    k2 = np.concatenate([[k], -k * n])
    eps = polarization_set(np.array([c.m_W, 0.0, 0.0, 0.0]), c.m_W, 0.0, 0.0)
    amps = {}
    for lam_l in (+1, -1):
        ubar = g.bar(helicity_spinor(k1, lam_l, m_l, "u", rep))
        for lam_nu in (+1, -1):
            v = helicity_spinor(k2, lam_nu, 0.0, "v", rep)
            for lam_w in W_HELICITIES:
                amps[(lam_l, lam_nu, lam_w)] = complex(c.g_W / np.sqrt(2) * ubar @ g.slash(eps[lam_w]) @ g.left @ v)
    return HelicityAmplitudeSet("W->l nubar", amps, {"theta": theta, "m_l": m_l})


def wh_production_amplitudes_oracle(
    theta: float,
    theta_star: float,
    phi_star: float,
    sqrt_s: float,
    c: PhysicsConstants | None = None,
    rep: str = "weyl",
    contact: bool = False,
) -> HelicityAmplitudeSet:
    """Leading-order ``ubar(p2) d(p1) -> W-(k) H`` with the full massive propagator.

    The d quark moves along +z.  With ``contact=True`` the propagator
    ``(g - q q / m_W^2) / (s - m_W^2)`` is replaced by its low-energy limit
    ``-g / m_W^2``.
    """
    c = c or PhysicsConstants()
    kin = wh_kinematics(sqrt_s, c)
    g = gamma_basis(rep)
    E = sqrt_s / 2
    p1 = np.array([E, 0.0, 0.0, E])
    p2 = np.array([E, 0.0, 0.0, -E])
    q = p1 + p2
    k = np.array([kin.E_W, kin.k_W * np.sin(theta), 0.0, kin.k_W * np.cos(theta)])
    eps = polarization_set(k, c.m_W, theta_star, phi_star)
    coupling = c.g_W**2 * c.m_W * c.V_ud / np.sqrt(2)
    amps = {}
    for lam_d in (+1, -1):
        u = helicity_spinor(p1, lam_d, 0.0, "u", rep)
        for lam_u in (+1, -1):
            vbar = g.bar(helicity_spinor(p2, lam_u, 0.0, "v", rep))
            current = np.array([vbar @ g.gamma[mu] @ g.left @ u for mu in range(4)])
            for lam_w in W_HELICITIES:
                e = np.conj(eps[lam_w])
                j_dot_e = current @ METRIC @ e
                if contact:
                    val = -j_dot_e / c.m_W**2
                else:
                    val = (j_dot_e - (current @ METRIC @ q) * (q @ METRIC @ e) / c.m_W**2) / (kin.s - c.m_W**2)
                amps[(lam_d, lam_u, lam_w)] = complex(coupling * val)
    kinematics = {"theta": theta, "theta_star": theta_star, "phi_star": phi_star, "sqrt_s": sqrt_s}
    return HelicityAmplitudeSet("ubar d->W- H", amps, kinematics)
