"""Strict JSON run configuration.

Every section has a fixed set of keys with documented defaults; any other key
aborts with a :class:`ConfigError` naming it.
"""

from __future__ import annotations

import copy
import hashlib
import json
from pathlib import Path

import numpy as np

from .constants import PhysicsConstants
from .deviation import EpistemicModelParams
from .ensemble import Scenario
from .errors import ArgumentError, ConfigError
from .povm import AngularPartition
from .states import QuantumState

CONFIG_SCHEMA_VERSION = 1

DEFAULTS: dict = {
    "seed": 0,
    "format": "csv",
    "ell": "e",
    "constants": {},
    "fig1": {"n_points": 201},
    "fig2": {"n_theta": 101, "n_theta_star": 101, "sqrt_s": 500.0, "phi_star": 0.0},
    "povm_table": {"eps": 0.1, "edges": None},
    "limits": {"n_values": [10, 100, 1000, 10_000, 100_000, 1_000_000, 10_000_000], "expectation": 1.0},
    "pbr": {"n": 2, "alphas": [np.pi / 2, 5 * np.pi / 12, np.pi / 3, np.pi / 4 + 0.02, 0.3, 0.05]},
    "scenario": {
        "process": "NeutrinoAbsorption",
        "n": 100_000,
        "hypothesis": "QM",
        "q": 0.0,
        "r": 1.0,
        "model_class": "OnticIndifference",
        "confusable": None,
        "alpha": np.pi,
        "xi": None,
        "lambda_W": -1,
        "eps": 0.1,
        "edges": None,
        "theta_window": [0.0, np.pi],
        "theta_star": None,
        "phi_star": 0.0,
        "sqrt_s": 500.0,
        "analysis": "auto",
        "delta_syst": None,
    },
}


def _merge(defaults: dict, given: dict, path: str) -> dict:
    out = copy.deepcopy(defaults)
    for key, value in given.items():
        where = f"{path}.{key}" if path else key
        if key not in defaults:
            raise ConfigError(f"unknown config key {where!r}")
        if isinstance(defaults[key], dict) and key != "constants":
            if not isinstance(value, dict):
                raise ConfigError(f"config key {where!r} must be an object")
            out[key] = _merge(defaults[key], value, where)
        else:
            out[key] = value
    return out


def resolve(raw: dict | None) -> dict:
    """Merge a user document over the defaults, rejecting unknown keys."""
    raw = raw or {}
    if not isinstance(raw, dict):
        raise ConfigError("config document must be a JSON object")
    cfg = _merge(DEFAULTS, raw, "")
    PhysicsConstants.from_dict(cfg["constants"])  # validate early
    if cfg["format"] not in ("csv", "json"):
        raise ConfigError("format must be 'csv' or 'json'")
    cfg["schema_version"] = CONFIG_SCHEMA_VERSION
    return cfg


def load(path: str | Path | None) -> dict:
    if path is None:
        return resolve({})
    text = Path(path).read_text()  # OSError propagates as an I/O failure
    try:
        raw = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{path}: invalid JSON ({exc})") from exc
    return resolve(raw)


def canonical(cfg: dict) -> str:
    return json.dumps(cfg, sort_keys=True, separators=(",", ":"))


def config_hash(cfg: dict) -> str:
    return hashlib.sha256(canonical(cfg).encode()).hexdigest()


def constants_of(cfg: dict) -> PhysicsConstants:
    return PhysicsConstants.from_dict(cfg["constants"])


def _state(value, dim: int) -> QuantumState:
    """A confusable state from a basis index or a list of amplitudes (``[re, im]`` pairs allowed)."""
    if isinstance(value, int):
        return QuantumState.basis(value, dim)
    amps = [complex(a[0], a[1]) if isinstance(a, list) else complex(a) for a in value]
    if len(amps) != dim:
        raise ConfigError(f"confusable state must have {dim} amplitudes")
    return QuantumState.normalized(amps)


def scenario_of(cfg: dict) -> Scenario:
    s = cfg["scenario"]
    c = constants_of(cfg)
    try:
        neutrino = s["process"] == "NeutrinoAbsorption"
        dim = 2 if neutrino else 3
        params = None
        if s["hypothesis"] == "Epistemic" or s["q"]:
            # default confusable: the opposite helicity in the process basis
            conf = s["confusable"] if s["confusable"] is not None else 1 if neutrino else (0 if s["lambda_W"] == -1 else 1)
            params = EpistemicModelParams(float(s["q"]), _state(conf, dim), s["model_class"], float(s["r"]))
        partition = None
        if not neutrino:
            partition = AngularPartition(tuple(s["edges"])) if s["edges"] is not None else AngularPartition.isolation(float(s["eps"]))
        return Scenario(
            process=s["process"],
            n=s["n"],
            seed=int(cfg["seed"]),
            hypothesis=s["hypothesis"],
            params=params,
            alpha=float(s["alpha"]),
            xi=None if s["xi"] is None else float(s["xi"]),
            lambda_W=int(s["lambda_W"]),
            partition=partition,
            theta_window=tuple(s["theta_window"]),
            theta_star=s["theta_star"],
            phi_star=float(s["phi_star"]),
            sqrt_s=float(s["sqrt_s"]),
            ell=cfg["ell"],
            constants=c,
        )
    except ConfigError:
        raise
    except (ArgumentError, TypeError, ValueError) as exc:
        raise ConfigError(f"invalid scenario: {exc}") from exc
