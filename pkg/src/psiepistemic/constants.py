"""Electroweak inputs.  Defaults are standard reference values; every field can be overridden."""

from __future__ import annotations

from dataclasses import asdict, dataclass, fields

import numpy as np

from .errors import ArgumentError, ConfigError

LEPTONS = ("e", "mu", "tau")


@dataclass(frozen=True)
class PhysicsConstants:
    m_W: float = 80.379
    m_H: float = 125.25
    m_e: float = 0.000511
    m_mu: float = 0.10566
    m_tau: float = 1.77686
    alpha_em: float = 1 / 132.5
    sin2_thetaW: float = 0.2312
    V_ud: float = 0.9737

    def __post_init__(self):
        for name in ("m_W", "m_H", "alpha_em"):
            if not getattr(self, name) > 0:
                raise ArgumentError(f"{name} must be positive")
        # zero lepton mass is the massless limit used by several shape checks
        for name in ("m_e", "m_mu", "m_tau"):
            if not getattr(self, name) >= 0:
                raise ArgumentError(f"{name} must be non-negative")
        if not 0 < self.sin2_thetaW < 1:
            raise ArgumentError("sin2_thetaW must lie in (0, 1)")
        if not 0 < self.V_ud <= 1:
            raise ArgumentError("V_ud must lie in (0, 1]")

    @property
    def g_W(self) -> float:
        return float(np.sqrt(4 * np.pi * self.alpha_em / self.sin2_thetaW))

    def lepton_mass(self, ell: str) -> float:
        if ell not in LEPTONS:
            raise ArgumentError(f"unknown lepton flavor {ell!r}; expected one of {LEPTONS}")
        return getattr(self, f"m_{ell}")

    def with_lepton_mass(self, ell: str, mass: float) -> PhysicsConstants:
        self.lepton_mass(ell)
        return PhysicsConstants(**{**asdict(self), f"m_{ell}": mass})

    def to_dict(self) -> dict[str, float]:
        return asdict(self)

    @classmethod
    def from_dict(cls, data: dict | None) -> PhysicsConstants:
        data = dict(data or {})
        known = {f.name for f in fields(cls)}
        unknown = sorted(set(data) - known)
        if unknown:
            raise ConfigError(f"unknown constants key {unknown[0]!r}")
        return cls(**{k: float(v) for k, v in data.items()})
