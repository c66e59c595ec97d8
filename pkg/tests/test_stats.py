import json
import warnings

import numpy as np
import pytest
from hypothesis import assume, given
from hypothesis import strategies as st

from psiepistemic.errors import ArgumentError, UseWrongMethodError
from psiepistemic.stats import (
    CountingExperiment,
    LowCountWarning,
    ReportPolicy,
    certainty_bound_one_sided,
    chi2_bound_two_sided,
    chi_square,
    exclusion_report,
    poisson_crossover,
    poisson_limit,
)


def test_bound_spot_values():
    assert chi2_bound_two_sided(1000, 1.0) == pytest.approx(np.sqrt(7.68 / 1000), abs=1e-12)
    assert chi2_bound_two_sided(1000, 1.0) == pytest.approx(0.08764, abs=1e-5)
    assert chi2_bound_two_sided(7_680_000, 1.0) == pytest.approx(1e-3, abs=1e-12)
    assert chi2_bound_two_sided(1000, 1.0) / chi2_bound_two_sided(4000, 1.0) == pytest.approx(2.0, abs=1e-12)
    assert certainty_bound_one_sided(100) == pytest.approx(np.sqrt(5.42 / 100), abs=1e-12)
    assert certainty_bound_one_sided(100) == pytest.approx(0.2328, abs=1e-4)
    assert certainty_bound_one_sided(54_200) == pytest.approx(0.01, abs=1e-12)
    assert poisson_limit(10**6) == pytest.approx(3e-6, abs=1e-18)
    assert poisson_limit(3 * 10**6) == pytest.approx(1e-6, abs=1e-18)
    assert poisson_limit(3) == 1.0


def test_bound_errors():
    with pytest.raises(UseWrongMethodError):
        chi2_bound_two_sided(100, 0.0)
    for f in (certainty_bound_one_sided, poisson_limit):
        with pytest.raises(ArgumentError):
            f(0)
    with pytest.raises(ArgumentError):
        chi2_bound_two_sided(100, 1.5)


@given(st.integers(100, 10**9), st.floats(0.01, 1.0))
def test_resubstitution_gives_threshold(n, e):
    assume(n * e >= 100)
    bound = chi2_bound_two_sided(n, e)
    assert chi_square(CountingExperiment(n, e, n * (e - bound))) == pytest.approx(3.84, abs=1e-9)


def test_monotone_and_crossover():
    ns = np.array([2, 10, 100, 1000, 10**5])
    two = [chi2_bound_two_sided(int(n), 1.0) for n in ns]
    one = [certainty_bound_one_sided(int(n)) for n in ns]
    assert all(b < a for a, b in zip(two, two[1:])) and all(b < a for a, b in zip(one, one[1:]))
    assert all(o < t for o, t in zip(one, two))
    assert poisson_crossover() == pytest.approx(9 / 5.42, abs=1e-12)
    assert poisson_limit(1) > certainty_bound_one_sided(1)
    for n in (2, 3, 10, 10**6):
        assert poisson_limit(n) < certainty_bound_one_sided(n)


def test_chi_square_examples():
    assert chi_square(CountingExperiment(1000, 0.5, 500)) == 0.0
    n = 10**4
    assert chi_square(CountingExperiment(n, 1.0, n * (1 - 0.0277))) == pytest.approx(3.84, abs=0.01)
    k = 9_800
    zero_syst = chi_square(CountingExperiment(n, 1.0, k, delta_syst=0.0))
    equal = chi_square(CountingExperiment(n, 1.0, k))
    assert equal == pytest.approx(zero_syst / 2, rel=1e-12)


def test_chi_square_gating():
    with pytest.raises(UseWrongMethodError):
        chi_square(CountingExperiment(100, 0.0, 0))
    with pytest.raises(ArgumentError):
        chi_square(CountingExperiment(100, 0.05, 5))
    with pytest.warns(LowCountWarning):
        chi_square(CountingExperiment(100, 0.5, 50))
    with pytest.raises(ArgumentError):
        CountingExperiment(0, 0.5, 1)
    with pytest.raises(ArgumentError):
        CountingExperiment(10, 0.5, -1)


def test_report_qm_everywhere():
    rep = exclusion_report([500, 500, 0], [500.0, 500.0, 0.0], [500.0, 500.0, 0.0])
    assert rep.verdict == "not excluded" and rep.chi2_total == 0.0
    assert [b.branch for b in rep.bins] == ["chi2", "chi2", "poisson"]


def test_report_poisson_branch():
    rep = exclusion_report([1000, 4], [1004.0, 0.0], [1000.0, 4.0])
    pois = rep.bins[1]
    assert pois.branch == "poisson" and pois.flagged
    assert rep.excluded and rep.expected_excluded
    assert not exclusion_report([1000, 3], [1003.0, 0.0], [1000.0, 3.0]).excluded


def test_report_combined_bins():
    # per-bin chi2 = 2: (n_Q - k)^2 / (2 n_Q) = 2 with n_Q = 10^4
    n_q = 1e4
    k = n_q - 200
    rep = exclusion_report([k, k], [n_q, n_q], [k, k])
    assert [b.statistic for b in rep.bins] == pytest.approx([2.0, 2.0])
    assert not any(b.flagged for b in rep.bins)
    assert rep.chi2_total == pytest.approx(4.0) and rep.excluded


def test_report_one_sided_and_errors():
    rep = exclusion_report([9_760], [1e4], [9_760.0], ReportPolicy(sided="one"))
    assert rep.threshold == 2.71 and rep.excluded
    assert not exclusion_report([9_760], [1e4], [9_760.0]).excluded
    with pytest.raises(ArgumentError):
        exclusion_report([1, 2], [1.0], [1.0])
    with pytest.raises(UseWrongMethodError):
        exclusion_report([0], [0.0], [0.0], ReportPolicy(analysis="chi2"))
    with pytest.raises(ArgumentError):
        ReportPolicy(analysis="bayes")


def test_report_skips_small_bins():
    with pytest.warns(LowCountWarning):
        rep = exclusion_report([5, 995], [5.0, 995.0], [5.0, 995.0])
    assert rep.bins[0].branch == "skipped"


def test_report_serialization():
    rep = exclusion_report([1000, 4], [1004.0, 0.0], [1000.0, 4.0], labels=["a", "b"])
    d = json.loads(rep.to_json())
    assert d["verdict"] == "excluded" and d["bins"][1]["label"] == "b"
    lines = rep.to_csv().splitlines()
    assert lines[0].startswith("label,branch") and len(lines) == 3
    assert rep.to_csv().endswith("\n")
    with warnings.catch_warnings():
        warnings.simplefilter("error")
        assert rep.to_json() == exclusion_report([1000, 4], [1004.0, 0.0], [1000.0, 4.0], labels=["a", "b"]).to_json()
