import numpy as np
import pytest

from psiepistemic.errors import (
    ArgumentError,
    CompletenessError,
    InfeasibleError,
    OutcomeIndexError,
    SpaceMismatchError,
    StateError,
)
from psiepistemic.ontology import (
    DeviationModel,
    OnticDistribution,
    OnticSpace,
    Ontology,
    ReferenceModel,
    ResponseFunction,
    bloch_grid,
    born_check,
    classify_hs,
    outcome_probability,
    overlap,
    pbr_basis,
    pbr_states,
    product_state,
    sampled_space,
    variation_distance,
)
from psiepistemic.states import PovmElement, QuantumState, check_complete, projective_measurement


@pytest.fixture(scope="module")
def grid():
    return bloch_grid()


def two_point():
    return OnticSpace(np.array([0, 1]), np.array([0.5, 0.5]), np.eye(2), name="two")


# --- states and POVM elements ----------------------------------------------


def test_state_validation():
    with pytest.raises(StateError):
        QuantumState(np.array([1.0, 1.0]))
    with pytest.raises(StateError):
        QuantumState(np.array([1.0]))
    s = QuantumState.normalized([1, 1j])
    assert s.fidelity(QuantumState.bloch(np.pi / 2, np.pi / 2)) == pytest.approx(1.0)


def test_povm_element_validation():
    with pytest.raises(ArgumentError):
        PovmElement(np.array([[1.0, 1.0], [0.0, 0.0]]))
    with pytest.raises(ArgumentError):
        PovmElement(np.diag([1.0, -0.1]))
    with pytest.raises(CompletenessError):
        check_complete([PovmElement(np.diag([1.0, 0.0]))])
    with pytest.raises(ArgumentError):
        PovmElement(np.eye(2)).expectation(QuantumState.basis(0, 3))


# --- distributions and response functions ----------------------------------


def test_two_point_example():
    sp = two_point()
    mu0 = OnticDistribution(sp, np.array([2.0, 0.0]))
    mu1 = OnticDistribution(sp, np.array([1.0, 1.0]))
    assert overlap(mu0, mu1) == pytest.approx(0.5)
    assert variation_distance(mu0, mu1) == pytest.approx(0.5)
    resp = ResponseFunction(sp, np.array([[1.0, 0.0], [0.0, 1.0]]))
    assert outcome_probability(mu1, resp, 0) == pytest.approx(0.5)


def test_distance_plus_overlap(rng):
    sp = OnticSpace(np.arange(50), rng.uniform(0.5, 1.5, 50), np.tile([1.0, 0.0], (50, 1)))
    for _ in range(200):
        a, b = (rng.exponential(size=50) * (rng.random(50) < 0.6) + 1e-300 for _ in range(2))
        mu0 = OnticDistribution(sp, a / (a @ sp.weights))
        mu1 = OnticDistribution(sp, b / (b @ sp.weights))
        assert variation_distance(mu0, mu1) + overlap(mu0, mu1) == pytest.approx(1.0, abs=1e-10)


def test_distribution_and_response_validation():
    sp = two_point()
    with pytest.raises(ArgumentError):
        OnticDistribution(sp, np.array([1.0, 0.5]))
    with pytest.raises(ArgumentError):
        OnticDistribution(sp, np.array([2.5, -0.5]))
    with pytest.raises(ArgumentError):
        ResponseFunction(sp, np.array([[0.6, 0.6], [0.5, 0.5]]))


def test_space_mismatch_and_index_errors():
    a, b = two_point(), two_point()
    mu = OnticDistribution.delta(a, 0)
    with pytest.raises(SpaceMismatchError):
        overlap(mu, OnticDistribution.delta(b, 0))
    resp = ResponseFunction(a, np.array([[1.0, 0.0], [0.0, 1.0]]))
    with pytest.raises(OutcomeIndexError):
        outcome_probability(mu, resp, 2)
    with pytest.raises(IndexError):
        outcome_probability(mu, resp, -1)


# --- grid and reference model ----------------------------------------------


def test_bloch_grid_exact_points(grid):
    assert grid.size == 2 + 63 * 128
    assert np.allclose(grid.weights, 1.0 / grid.size)
    for s in (QuantumState.basis(0, 2), QuantumState.basis(1, 2), QuantumState.bloch(np.pi / 2), QuantumState.bloch(np.pi / 2, np.pi)):
        assert abs(abs(grid.representatives[grid.nearest(s)].conj() @ s.amplitudes) - 1) <= 1e-15


def test_reference_model_reproduces_born_rule(grid):
    model = ReferenceModel(grid)
    z = projective_measurement([QuantumState.basis(0, 2), QuantumState.basis(1, 2)])
    x = projective_measurement([QuantumState.bloch(np.pi / 2), QuantumState.bloch(np.pi / 2, np.pi)])
    for s in (QuantumState.basis(0, 2), QuantumState.bloch(np.pi / 2), QuantumState.basis(1, 2)):
        assert born_check(model, s, z) <= 1e-8
        assert born_check(model, s, x) <= 1e-8


def test_response_pointwise_normalization(grid):
    model = ReferenceModel(grid)
    resp = model.respond(projective_measurement([QuantumState.bloch(1.0, 0.3), QuantumState.bloch(np.pi - 1.0, 0.3 + np.pi)]))
    assert np.abs(resp.values.sum(axis=1) - 1).max() <= 1e-10


@pytest.mark.parametrize("q", [0.01, 0.1, 0.5])
def test_deviation_model(grid, q):
    zero, plus = QuantumState.basis(0, 2), QuantumState.bloch(np.pi / 2)
    model = DeviationModel(grid, zero, plus, q)
    z = projective_measurement([zero, QuantumState.basis(1, 2)])
    # the leaked mass answers the z measurement like |+>, so P(1) rises from 0 to q/2
    assert born_check(model, zero, z) == pytest.approx(q / 2, abs=1e-12)
    assert born_check(model, zero, z) >= 0.05 * q
    assert overlap(model.prepare(zero), model.prepare(plus)) == pytest.approx(q, abs=1e-12)
    verdict = classify_hs(model, [(zero, plus), (zero, QuantumState.basis(1, 2))])
    assert verdict.verdict is Ontology.EPISTEMIC
    assert verdict.witness_overlap == pytest.approx(q)


def test_classify_hs(grid):
    model = ReferenceModel(grid)
    zero, plus = QuantumState.basis(0, 2), QuantumState.bloch(np.pi / 2)
    res = classify_hs(model, [(zero, plus)])
    assert res.verdict is Ontology.ONTIC and res.witness is None and res.relative_to_tested_pairs
    with pytest.raises(StateError):
        classify_hs(model, [(zero, QuantumState(-zero.amplitudes))])
    with pytest.raises(ArgumentError):
        classify_hs(model, [])
    with pytest.raises(ArgumentError):
        DeviationModel(grid, zero, zero, 0.1)


def test_sampled_space():
    sp = sampled_space(dim=3, n_points=500, seed=1)
    assert sp.size == 503 and sp.dim == 3
    assert np.allclose(np.linalg.norm(sp.representatives, axis=1), 1.0)
    assert sp.nearest(QuantumState.basis(2, 3)) == 2
    again = sampled_space(dim=3, n_points=500, seed=1)
    assert np.array_equal(sp.representatives, again.representatives)


# --- PBR --------------------------------------------------------------------


def test_pbr_states_and_products():
    a, b = pbr_states(np.pi / 3)
    assert a.inner(b).real == pytest.approx(0.5)
    for alpha in (0.2, 1.0):
        a, b = pbr_states(alpha)
        assert a.inner(b).real == pytest.approx(np.cos(alpha))
    with pytest.raises(ArgumentError):
        pbr_states(np.pi / 2)
    c, s = np.cos(0.5), np.sin(0.5)
    psi = product_state([0, 1], 1.0)
    assert np.allclose(psi.amplitudes, [c * c, -c * s, s * c, -s * s])
    with pytest.raises(ArgumentError):
        product_state([0, 2], 1.0)


def _check_pbr(b, tol):
    V = b.vectors
    d = V.shape[0]
    assert np.abs(V.conj().T @ V - np.eye(d)).max() <= 1e-10
    for col, x in enumerate(b.labels):
        assert abs(np.vdot(V[:, col], product_state(x, b.alpha).amplitudes)) <= tol


def test_pbr_half_pi():
    b = pbr_basis(2, np.pi / 2)
    assert b.residual <= 1e-10
    _check_pbr(b, 1e-10)


@pytest.mark.parametrize("alpha", np.linspace(np.pi / 3, np.pi / 2, 4))
def test_pbr_sweep(alpha):
    _check_pbr(pbr_basis(2, alpha), 1e-8)


def test_pbr_infeasible_small_alpha():
    with pytest.raises(InfeasibleError) as info:
        pbr_basis(2, 0.3)
    assert info.value.residual > 1e-3
    with pytest.raises(ArgumentError):
        pbr_basis(1, 1.0)
