"""Counting-experiment tests of QM predictions at 95% C.L.

``chi_square`` compares a model (or observed) count ``n_psi`` with the QM
count ``n_Q = n <E>``; the closed-form bounds translate the chi-square
thresholds into limits on the probability deviation.  Outcomes QM forbids
(``n_Q = 0``) are handled by the zero-background Poisson rule instead.
"""

from __future__ import annotations

import csv
import io
import json
import warnings
from dataclasses import asdict, dataclass, field

import numpy as np

from .errors import ArgumentError, UseWrongMethodError

CHI2_95_TWO_SIDED = 3.84
CHI2_95_ONE_SIDED = 2.71
POISSON_95_ZERO_OBSERVED = 3.0
MIN_COUNTS = 10.0
WARN_COUNTS = 100.0


class LowCountWarning(UserWarning):
    """The QM-predicted count is below the large-sample regime (n_Q < 100)."""


@dataclass(frozen=True)
class CountingExperiment:
    """``n`` preparations; ``delta_syst=None`` applies the ``delta_syst = delta_stat`` policy."""

    n: int
    expectation_qm: float
    n_psi: float
    delta_syst: float | None = None

    def __post_init__(self):
        if int(self.n) != self.n or self.n < 1:
            raise ArgumentError("n must be a positive integer")
        if not 0.0 <= self.expectation_qm <= 1.0:
            raise ArgumentError("expectation_qm must lie in [0, 1]")
        if self.n_psi < 0:
            raise ArgumentError("n_psi must be non-negative")
        if self.delta_syst is not None and self.delta_syst < 0:
            raise ArgumentError("delta_syst must be non-negative")

    @property
    def n_Q(self) -> float:
        return self.n * self.expectation_qm

    @property
    def delta_stat(self) -> float:
        if self.n_Q <= 0:
            raise UseWrongMethodError("delta_stat is undefined for n_Q = 0; use poisson_limit")
        return 1.0 / np.sqrt(self.n_Q)

    @property
    def delta_exp(self) -> float:
        stat = self.delta_stat
        syst = stat if self.delta_syst is None else self.delta_syst
        return float(np.hypot(stat, syst))


def chi_square(exp: CountingExperiment) -> float:
    """``((n_Q - n_psi) / (n_Q delta_exp))^2``; needs ``n_Q >= 10`` and warns below 100."""
    n_q = exp.n_Q
    if n_q == 0:
        raise UseWrongMethodError("chi-square is undefined when QM predicts zero counts; use poisson_limit")
    if n_q < MIN_COUNTS:
        raise ArgumentError(f"n_Q = {n_q:g} is too small for the chi-square test (need n_Q >= {MIN_COUNTS:g})")
    if n_q < WARN_COUNTS:
        warnings.warn(f"n_Q = {n_q:g} < {WARN_COUNTS:g}: chi-square approximation is marginal", LowCountWarning, stacklevel=2)
    return float(((n_q - exp.n_psi) / (n_q * exp.delta_exp)) ** 2)


def _check_n(n) -> int:
    if int(n) != n or n < 1:
        raise ArgumentError("n must be a positive integer")
    return int(n)


def chi2_bound_two_sided(n: int, expectation: float) -> float:
    """95% C.L. limit ``sqrt(2 * 3.84 * <E> / n)`` on ``|Delta|`` with ``delta_syst = delta_stat``."""
    n = _check_n(n)
    if expectation == 0:
        raise UseWrongMethodError("expectation 0 has no chi-square bound; use poisson_limit")
    if not 0.0 < expectation <= 1.0:
        raise ArgumentError("expectation must lie in (0, 1]")
    return float(np.sqrt(2 * CHI2_95_TWO_SIDED * expectation / n))


def certainty_bound_one_sided(n: int) -> float:
    """One-sided 95% C.L. limit ``sqrt(2 * 2.71 / n)`` on the deficit of a certainty outcome."""
    n = _check_n(n)
    return float(np.sqrt(2 * CHI2_95_ONE_SIDED / n))


def poisson_limit(n: int) -> float:
    """Zero-observed 95% C.L. limit ``3 / n`` on the probability of an outcome QM forbids."""
    n = _check_n(n)
    return POISSON_95_ZERO_OBSERVED / n


def poisson_crossover() -> float:
    """``n`` above which ``poisson_limit`` is tighter than ``certainty_bound_one_sided``."""
    return POISSON_95_ZERO_OBSERVED**2 / (2 * CHI2_95_ONE_SIDED)


# --- multi-bin reports ------------------------------------------------------


@dataclass(frozen=True)
class ReportPolicy:
    """How a report treats its bins.

    ``analysis``: ``"chi2"`` (every bin, zero-QM bins rejected), ``"poisson"``
    (only zero-QM bins) or ``"auto"`` (both, routed by ``n_Q``).
    ``sided``: ``"two"`` or ``"one"`` selects the 3.84 or 2.71 threshold.
    """

    analysis: str = "auto"
    sided: str = "two"
    delta_syst: float | None = None

    def __post_init__(self):
        if self.analysis not in ("chi2", "poisson", "auto"):
            raise ArgumentError("analysis must be 'chi2', 'poisson' or 'auto'")
        if self.sided not in ("one", "two"):
            raise ArgumentError("sided must be 'one' or 'two'")

    @property
    def threshold(self) -> float:
        return CHI2_95_ONE_SIDED if self.sided == "one" else CHI2_95_TWO_SIDED


@dataclass(frozen=True)
class BinResult:
    label: str
    branch: str  # "chi2", "poisson" or "skipped"
    n_qm: float
    n_observed: int
    n_model: float
    statistic: float  # chi-square, or observed count on the Poisson branch
    expected_statistic: float  # same statistic evaluated at the model prediction
    flagged: bool  # observed count beyond the 95% band


@dataclass(frozen=True)
class ExclusionReport:
    bins: list[BinResult]
    chi2_total: float
    expected_chi2_total: float
    threshold: float
    sided: str
    excluded: bool  # the observed counts are incompatible with QM at 95% C.L.
    expected_excluded: bool  # verdict if the counts equalled the model prediction
    warnings: list[str] = field(default_factory=list)

    @property
    def verdict(self) -> str:
        return "excluded" if self.excluded else "not excluded"

    def to_dict(self) -> dict:
        d = asdict(self)
        d["verdict"] = self.verdict
        return d

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True) + "\n"

    def to_csv(self) -> str:
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        cols = ["label", "branch", "n_qm", "n_observed", "n_model", "statistic", "expected_statistic", "flagged"]
        writer.writerow(cols)
        for b in self.bins:
            writer.writerow([_fmt(getattr(b, c)) for c in cols])
        return buf.getvalue()


def _fmt(v) -> str:
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, float):
        return repr(v)
    return str(v)


def exclusion_report(observed_counts, predicted_qm, predicted_model, policy: ReportPolicy | None = None, labels=None) -> ExclusionReport:
    """Bin-by-bin comparison of counts with the QM prediction.

    chi-square bins are summed and compared with the single-parameter 95%
    threshold.  Zero-QM bins use the Poisson rule: more than 3 counts flag the
    bin.  Bins with ``0 < n_Q < 10`` are outside both regimes and skipped with
    a warning.  ``expected_*`` fields evaluate the same test on
    ``predicted_model`` in place of the observations.
    """
    policy = policy or ReportPolicy()
    obs = np.asarray(observed_counts)
    n_q = np.asarray(predicted_qm, dtype=float)
    n_m = np.asarray(predicted_model, dtype=float)
    if not (obs.shape == n_q.shape == n_m.shape) or obs.ndim != 1:
        raise ArgumentError("observed, QM and model vectors must be 1-D and of equal length")
    if np.any(obs < 0) or np.any(obs != np.round(obs)):
        raise ArgumentError("observed counts must be non-negative integers")
    if np.any(n_q < 0) or np.any(n_m < 0):
        raise ArgumentError("predicted counts must be non-negative")
    labels = list(labels) if labels is not None else [str(i) for i in range(obs.size)]

    results, notes = [], []
    chi2_obs = chi2_exp = 0.0
    poisson_obs = poisson_exp = False

    def chi2_term(nq, npsi):
        # same formula as chi_square, without its per-call gating
        stat = 1.0 / np.sqrt(nq)
        syst = stat if policy.delta_syst is None else policy.delta_syst
        return ((nq - npsi) / (nq * np.hypot(stat, syst))) ** 2

    for lab, k, nq, nm in zip(labels, obs.astype(int), n_q, n_m):
        if nq == 0:
            if policy.analysis == "chi2":
                raise UseWrongMethodError(f"bin {lab!r} has n_Q = 0; chi-square cannot test it, use the poisson analysis")
            flagged = bool(k > POISSON_95_ZERO_OBSERVED)
            poisson_obs |= flagged
            poisson_exp |= bool(nm > POISSON_95_ZERO_OBSERVED)
            results.append(BinResult(lab, "poisson", 0.0, int(k), float(nm), float(k), float(nm), flagged))
            continue
        if policy.analysis == "poisson" or nq < MIN_COUNTS:
            if nq < MIN_COUNTS and policy.analysis != "poisson":
                notes.append(f"bin {lab!r} skipped: n_Q = {nq:.3g} below {MIN_COUNTS:g}")
            results.append(BinResult(lab, "skipped", float(nq), int(k), float(nm), float("nan"), float("nan"), False))
            continue
        if nq < WARN_COUNTS:
            notes.append(f"bin {lab!r}: n_Q = {nq:.3g} below {WARN_COUNTS:g}, chi-square marginal")
        s_obs, s_exp = float(chi2_term(nq, k)), float(chi2_term(nq, nm))
        chi2_obs += s_obs
        chi2_exp += s_exp
        results.append(BinResult(lab, "chi2", float(nq), int(k), float(nm), s_obs, s_exp, s_obs > policy.threshold))

    for note in notes:
        warnings.warn(note, LowCountWarning, stacklevel=2)
    return ExclusionReport(
        bins=results,
        chi2_total=chi2_obs,
        expected_chi2_total=chi2_exp,
        threshold=policy.threshold,
        sided=policy.sided,
        excluded=bool(chi2_obs > policy.threshold or poisson_obs),
        expected_excluded=bool(chi2_exp > policy.threshold or poisson_exp),
        warnings=notes,
    )
