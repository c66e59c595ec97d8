"""Seeded Monte Carlo ensembles of polarized measurements.

Events are drawn in fixed-size chunks.  Each chunk owns an independent
Philox stream keyed by ``(seed, setup hash, chunk index)``, so the counts
do not depend on how chunks are scheduled and reruns are byte-identical.
The setup hash leaves out the hypothesis, so a deviation model with
``q r = 0`` reproduces the QM counts draw for draw.
"""

from __future__ import annotations

import csv
import hashlib
import io
import json
from dataclasses import dataclass, field

import numpy as np

from . import __version__
from .amplitudes import wh_dSigma, wh_kinematics
from .constants import PhysicsConstants
from .deviation import EpistemicModelParams, deviated_probability, distorted_angular_distribution
from .errors import ArgumentError, ConfigError
from .povm import WDECAY_BASIS, AngularPartition, adaptive_gauss_legendre, neutrino_povm, wdecay_angular_povm
from .states import QuantumState
from .stats import ExclusionReport, ReportPolicy, exclusion_report

PROCESSES = ("NeutrinoAbsorption", "WDecayAngular", "WHProductionDecay")
HYPOTHESES = ("QM", "Epistemic")
CHUNK_SIZE = 100_000


@dataclass(frozen=True, eq=False)
class Scenario:
    """One simulated experiment.

    Neutrino scenarios prepare ``|s_nu>`` at rest-frame angle ``alpha``
    (``alpha = pi`` is negative helicity) and record ``E_L`` responses.
    W-decay scenarios prepare helicity ``lambda_W``; WH scenarios prepare the
    polarization mixture selected by ``theta_window``.  Epistemic hypotheses
    need ``params`` whose confusable state lives in the matching basis
    (``{|s_nu>, |-s_nu>}`` or ``{|+1>, |-1>, |0>}``).
    """

    process: str
    n: int
    seed: int = 0
    hypothesis: str = "QM"
    params: EpistemicModelParams | None = None
    alpha: float = np.pi
    xi: float | None = None  # finite rapidity switches to the exact E_L
    lambda_W: int = -1
    partition: AngularPartition | None = None
    theta_window: tuple[float, float] = (0.0, np.pi)
    theta_star: float | None = None  # None: quantize along the W direction (helicity basis)
    phi_star: float = 0.0
    sqrt_s: float = 500.0
    ell: str = "e"
    constants: PhysicsConstants = field(default_factory=PhysicsConstants)

    def __post_init__(self):
        if self.process not in PROCESSES:
            raise ConfigError(f"unknown process {self.process!r}; expected one of {PROCESSES}")
        if self.hypothesis not in HYPOTHESES:
            raise ConfigError(f"unknown hypothesis {self.hypothesis!r}; expected one of {HYPOTHESES}")
        if int(self.n) != self.n or self.n < 1:
            raise ConfigError("n must be a positive integer")
        if not 0 <= int(self.seed) < 2**64:
            raise ConfigError("seed must be a 64-bit unsigned integer")
        if self.hypothesis == "Epistemic":
            if self.params is None or self.params.confusable_state is None:
                raise ConfigError("an Epistemic hypothesis needs params with a confusable state")
            want = 2 if self.process == "NeutrinoAbsorption" else 3
            if self.params.confusable_state.dim != want:
                raise ConfigError(f"{self.process} confusable state must have dimension {want}")
        if self.process == "NeutrinoAbsorption":
            if self.partition is not None:
                raise ConfigError("NeutrinoAbsorption takes no angular partition")
        else:
            if self.lambda_W not in WDECAY_BASIS:
                raise ConfigError(f"lambda_W must be one of {WDECAY_BASIS}")
            if self.partition is None:
                object.__setattr__(self, "partition", AngularPartition.isolation(0.1))
            elif not isinstance(self.partition, AngularPartition):
                raise ConfigError("partition must be an AngularPartition")

    def describe(self) -> dict:
        """Canonical JSON-ready description (also the input of :meth:`digest`)."""
        d = {
            "process": self.process,
            "n": int(self.n),
            "hypothesis": self.hypothesis,
            "ell": self.ell,
            "constants": self.constants.to_dict(),
        }
        if self.params is not None:
            amps = self.params.confusable_state.amplitudes if self.params.confusable_state is not None else []
            d["params"] = {
                "q": self.params.q,
                "r": self.params.r,
                "model_class": self.params.model_class.value,
                "confusable": [[float(a.real), float(a.imag)] for a in amps],
            }
        if self.process == "NeutrinoAbsorption":
            d.update(alpha=self.alpha, xi=self.xi)
        else:
            d["partition"] = list(self.partition.edges)
            if self.process == "WDecayAngular":
                d["lambda_W"] = self.lambda_W
            else:
                d.update(theta_window=list(self.theta_window), theta_star=self.theta_star, phi_star=self.phi_star, sqrt_s=self.sqrt_s)
        return d

    def digest(self) -> str:
        return _sha256(self.describe())

    def setup_digest(self) -> str:
        """Hash of the preparation and measurement only (hypothesis excluded)."""
        d = self.describe()
        d.pop("hypothesis")
        d.pop("params", None)
        return _sha256(d)


def _sha256(obj) -> str:
    return hashlib.sha256(json.dumps(obj, sort_keys=True, separators=(",", ":")).encode()).hexdigest()


@dataclass(frozen=True, eq=False)
class BinnedCounts:
    """Outcome counts; ``n - sum(counts)`` events gave no response."""

    bins: list  # (lo, hi) angle pairs or outcome-label strings
    counts: np.ndarray
    n: int
    metadata: dict = field(default_factory=dict)

    def __post_init__(self):
        counts = np.asarray(self.counts, dtype=np.int64)
        if counts.shape != (len(self.bins),):
            raise ArgumentError("one count per bin")
        if counts.sum() > self.n or np.any(counts < 0):
            raise ArgumentError("counts must be non-negative and sum to at most n")
        counts.setflags(write=False)
        object.__setattr__(self, "counts", counts)

    @property
    def non_response(self) -> int:
        return int(self.n - self.counts.sum())

    @property
    def labels(self) -> list[str]:
        return [b if isinstance(b, str) else f"[{b[0]:.6g}, {b[1]:.6g}]" for b in self.bins]

    def to_csv(self) -> str:
        """``bin_lo,bin_hi,count``; outcome-labelled bins put the label in ``bin_lo`` and leave ``bin_hi`` empty."""
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["bin_lo", "bin_hi", "count"])
        for b, k in zip(self.bins, self.counts):
            lo, hi = (b, "") if isinstance(b, str) else (repr(float(b[0])), repr(float(b[1])))
            w.writerow([lo, hi, int(k)])
        return buf.getvalue()

    def sidecar(self) -> dict:
        return {**self.metadata, "n": int(self.n), "non_response": self.non_response, "version": __version__}


# --- probabilities ----------------------------------------------------------


def preparation_by_selection(theta_window, sqrt_s: float = 500.0, c: PhysicsConstants | None = None, theta_star: float | None = None, phi_star: float = 0.0) -> np.ndarray:
    """Polarization fractions ``(+1, -1, 0)`` of W bosons produced with ``theta`` in the window.

    Weights are proportional to ``int 2 pi sin(theta) dsigma/dOmega dtheta``.
    With ``theta_star=None`` the quantization axis follows the W direction,
    so the weights are helicity fractions.
    """
    c = c or PhysicsConstants()
    lo, hi = map(float, theta_window)
    if not 0.0 <= lo < hi <= np.pi:
        raise ArgumentError("theta window must be a nonempty sub-interval of [0, pi]")
    wh_kinematics(sqrt_s, c)
    out = np.empty(3)
    for i, lam in enumerate(WDECAY_BASIS):

        def f(th, lam=lam):
            ts = th if theta_star is None else np.full_like(th, theta_star)
            return 2 * np.pi * np.sin(th) * wh_dSigma(th, ts, phi_star, lam, sqrt_s, c)

        out[i] = adaptive_gauss_legendre(f, lo, hi, atol=0.0, rtol=1e-13)
    return out / out.sum()


def _bin_probabilities(scenario: Scenario):
    """QM and hypothesis probability vectors, plus the per-component data WH sampling needs."""
    s = scenario
    epistemic = s.hypothesis == "Epistemic"
    if s.process == "NeutrinoAbsorption":
        exact = s.xi is not None
        e_l, _ = neutrino_povm(s.alpha, s.xi if exact else np.inf, exact=exact)
        p_qm = e_l.expectation(QuantumState.basis(0, 2))
        p_model = deviated_probability(p_qm, e_l.expectation(s.params.confusable_state), s.params) if epistemic else p_qm
        return ["E_L response"], np.array([p_qm]), np.array([p_model]), None
    elements = wdecay_angular_povm(s.partition, s.ell, s.constants)
    rows = np.array([[e.matrix[i, i].real for e in elements] for i in range(3)])  # (lambda, bin)
    rows = rows / rows.sum(axis=1, keepdims=True)
    if epistemic:
        conf = s.params.confusable_state.amplitudes
        p_conf = np.array([np.vdot(conf, e.matrix @ conf).real for e in elements])
        p_conf = p_conf / p_conf.sum()
        model_rows = np.array([distorted_angular_distribution(r, p_conf, s.params) for r in rows])
    else:
        model_rows = rows
    if s.process == "WDecayAngular":
        i = WDECAY_BASIS.index(s.lambda_W)
        return s.partition.bins, rows[i], model_rows[i], None
    weights = preparation_by_selection(s.theta_window, s.sqrt_s, s.constants, s.theta_star, s.phi_star)
    return s.partition.bins, weights @ rows, weights @ model_rows, (weights, model_rows)


def _generator(seed: int, digest: str, chunk: int) -> np.random.Generator:
    stream = int(digest[:16], 16)
    return np.random.Generator(np.random.Philox(np.random.SeedSequence([int(seed), stream, chunk])))


def _chunks(n: int):
    full, rest = divmod(n, CHUNK_SIZE)
    return [CHUNK_SIZE] * full + ([rest] if rest else [])


def simulate(scenario: Scenario) -> BinnedCounts:
    bins, _, p_model, components = _bin_probabilities(scenario)
    stream = scenario.setup_digest()
    totals = np.zeros(len(bins), dtype=np.int64)
    for idx, size in enumerate(_chunks(scenario.n)):
        rng = _generator(scenario.seed, stream, idx)
        if components is None:
            probs = np.append(p_model, max(0.0, 1.0 - p_model.sum()))
            totals += rng.multinomial(size, probs / probs.sum())[:-1]
        else:
            # two-stage draw: W polarization per event, then the decay angle bin
            weights, model_rows = components
            per_lambda = rng.multinomial(size, weights)
            for k, row in zip(per_lambda, model_rows):
                totals += rng.multinomial(k, row)
    meta = {"scenario": scenario.describe(), "scenario_sha256": scenario.digest(), "stream_sha256": stream, "seed": int(scenario.seed), "rng": "Philox", "chunk_size": CHUNK_SIZE}
    return BinnedCounts(list(bins), totals, int(scenario.n), meta)


def expected_counts(scenario: Scenario) -> tuple[np.ndarray, np.ndarray]:
    """QM and hypothesis count predictions ``n * p`` per bin."""
    _, p_qm, p_model, _ = _bin_probabilities(scenario)
    return scenario.n * p_qm, scenario.n * p_model


def run_experiment(scenario: Scenario, analysis: str = "auto", delta_syst: float | None = None) -> tuple[BinnedCounts, ExclusionReport]:
    """Simulate the scenario and test the counts against QM.

    A single-bin test of a certainty outcome uses the one-sided threshold;
    everything else is two-sided.
    """
    counts = simulate(scenario)
    n_qm, n_model = expected_counts(scenario)
    sided = "one" if len(n_qm) == 1 and np.isclose(n_qm[0], scenario.n, rtol=1e-12, atol=0) else "two"
    report = exclusion_report(counts.counts, n_qm, n_model, ReportPolicy(analysis, sided, delta_syst), labels=counts.labels)
    return counts, report
