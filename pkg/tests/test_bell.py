import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from unilab import bell, bayesnet, linalg
from unilab.bell import BellScenario, DeterministicLHV, LocalCausalModel
from unilab.errors import PremiseError, ValidationError

angles = st.floats(-np.pi, np.pi)
SINGLET = BellScenario.singlet()


def test_shared_state_is_singlet():
    psi = SINGLET.shared_state()
    np.testing.assert_allclose(psi, [0, 1 / np.sqrt(2), -1 / np.sqrt(2), 0], atol=1e-15)


@settings(max_examples=30)
@given(angles, angles)
def test_correlator_pathways_agree(a, b):
    q = bell.quantum_correlator(SINGLET, a, b).value
    d = bell.density_correlator(SINGLET, a, b).value
    assert q == pytest.approx(bell.singlet_correlator(a, b), abs=1e-12)
    assert d == pytest.approx(q, abs=1e-12)


def test_perfect_anticorrelation():
    assert bell.quantum_correlator(SINGLET, 0.3, 0.3).value == pytest.approx(-1.0, abs=1e-12)
    p = bell.pointer_distribution(SINGLET, 0.3, 0.3)
    assert p[0, 0] == pytest.approx(0.0, abs=1e-12)
    assert p[0, 1] == pytest.approx(0.5)


def test_chsh_tsirelson():
    assert abs(bell.chsh_value(SINGLET) - 2 * np.sqrt(2)) <= 1e-9
    assert bell.chsh_combination(1, -1, 1, 1) == 4


def test_larger_pointers_give_same_statistics():
    big = BellScenario.singlet(dims=(2, 2, 3, 4))
    assert bell.quantum_correlator(big, 0.1, 1.2).value == pytest.approx(-np.cos(1.1), abs=1e-12)


def test_identity_coupling_records_nothing():
    sc = BellScenario.singlet(coupling="identity")
    assert bell.quantum_correlator(sc, 0.0, 0.5).value == pytest.approx(1.0)


def test_scenario_validation():
    with pytest.raises(ValidationError):
        BellScenario.singlet(interaction_time=2.0, readout_time=1.0)
    with pytest.raises(ValidationError):
        BellScenario.singlet(initial_config=(0, 2, 0, 0))
    with pytest.raises(ValidationError):
        BellScenario.singlet(coupling="magic")
    with pytest.raises(ValidationError):
        BellScenario.singlet(settings_a=())


def test_bell_1964():
    a, b, c = 0.0, np.pi / 4, np.pi / 2
    corrs = [bell.quantum_correlator(SINGLET, x, y) for x, y in ((a, b), (a, c), (b, c))]
    res = bell.bell_1964_check(*corrs)
    assert res.lhs == pytest.approx(1 - np.sqrt(0.5), abs=1e-12)
    assert res.rhs == pytest.approx(np.sqrt(0.5), abs=1e-12)
    assert not res.satisfied
    with pytest.raises(ValidationError):
        bell.bell_1964_check(corrs[0], corrs[0], corrs[2])


@settings(max_examples=30)
@given(angles, angles, angles)
def test_bell_1964_holds_for_sign_model(a, b, c):
    model = LocalCausalModel.sign_model((a, b), (b, c), n=720)
    corrs = [bell.lhv_correlator(model, x, y) for x, y in ((a, b), (a, c), (b, c))]
    # Quadrature error is at most one cell, 2/720 per correlator.
    assert bell.bell_1964_check(*corrs, tol=3 * 2 / 720 * 2).satisfied


def test_epr_no_signaling():
    rep = bell.epr_no_signaling(SINGLET)
    assert rep.max_variation <= 1e-12 and rep.no_signaling
    np.testing.assert_allclose(rep.p_a, 0.5, atol=1e-12)
    sc = BellScenario.singlet(settings_a=(0.0, 1.0, 2.0), settings_b=(0.3, 2.5, -1.0), dims=(2, 2, 3, 2))
    assert bell.epr_no_signaling(sc).max_variation <= 1e-12


def test_epr_with_custom_factorized_relative_evolution(rng):
    u = linalg.kron(linalg.random_unitary(4, rng), linalg.random_unitary(4, rng))
    u_rel = linalg.permute_subsystems(u, (2, 2, 2, 2), (0, 2, 1, 3))
    assert bell.epr_no_signaling(SINGLET, u_rel=u_rel).max_variation <= 1e-12


def test_coupled_wings_are_rejected(rng):
    coupled = linalg.kron(np.eye(4)[[0, 1, 3, 2]], np.eye(4))  # CNOT between Q and R
    with pytest.raises(PremiseError):
        bell.epr_no_signaling(SINGLET, u_rel=coupled)
    with pytest.raises(PremiseError):
        bell.check_wing_factorization(linalg.random_unitary(16, rng), SINGLET.dims)


def test_reichenbach_fails_for_singlet_outcomes():
    joint = bell.outcome_common_cause_joint(SINGLET, 0.0, np.pi / 4)
    rep = bayesnet.reichenbach_test(joint, "A", "B", "C")
    assert rep.correlated and not rep.factorizes_given_c
    assert rep.skipped == (0, 2, 3)
    # Mixing over the two configurations with nonzero amplitude at t' changes nothing.
    joint = bell.outcome_common_cause_joint(SINGLET, 0.0, np.pi / 4, c_weights=[0, 0.5, 0.5, 0])
    rep = bayesnet.reichenbach_test(joint, "A", "B", "C")
    assert not rep.factorizes_given_c


def test_random_local_models_obey_chsh():
    rng = np.random.default_rng(7)
    for _ in range(50):
        sa, sb = tuple(rng.uniform(0, np.pi, 2)), tuple(rng.uniform(0, np.pi, 2))
        model = LocalCausalModel.random(rng, sa, sb, n_lambda=int(rng.integers(1, 12)))
        assert bell.lhv_chsh(model) <= 2 + 1e-9
        table = model.full_table()
        assert bell.outcome_independence(table)[0]
        assert bell.parameter_independence(table)[0]
        assert bell.local_causality(table)[0]


def test_deterministic_lhv_reaches_two():
    sa, sb = (0.0, np.pi / 2), (np.pi / 4, 3 * np.pi / 4)
    model = LocalCausalModel.sign_model(sa, sb, n=3600)
    assert bell.lhv_chsh(model) == pytest.approx(2.0, abs=1e-9)


def test_table_predicates_detect_violations():
    # PR-box style table: outcome independence fails.
    table = np.zeros((1, 2, 2, 2, 2))
    table[0, :, :, 0, 0] = table[0, :, :, 1, 1] = 0.5
    assert not bell.outcome_independence(table)[0]
    assert bell.parameter_independence(table)[0]
    assert not bell.local_causality(table)[0]
    # Signalling table: A's marginal follows B's setting.
    sig = np.zeros((1, 2, 2, 2, 2))
    for i in range(2):
        for k in range(2):
            sig[0, i, k, k, 0] = 1.0
    assert bell.outcome_independence(sig)[0]
    assert not bell.parameter_independence(sig)[0]
    assert not bell.local_causality(sig)[0]


def test_sign_model_closed_form():
    assert bell.sign_model_correlator(0, 0) == -1
    assert bell.sign_model_correlator(0, np.pi) == pytest.approx(1)
    assert bell.sign_model_correlator(0, np.pi / 4) == pytest.approx(-0.5)
    assert bell.sign_model_correlator(0.1, 0.1 + 2 * np.pi - 0.3) == pytest.approx(-1 + 0.6 / np.pi)


@pytest.mark.parametrize("sampler", ["circle", "sphere"])
def test_monte_carlo_sign_model(sampler):
    model = DeterministicLHV(sampler)
    c = bell.lhv_deterministic_correlator(model, 0.0, np.pi / 3, 200_000, seed=11)
    assert abs(c.value - bell.sign_model_correlator(0.0, np.pi / 3)) <= 4 * c.stderr


def test_monte_carlo_reproducible_across_workers():
    model = DeterministicLHV()
    one = bell.lhv_deterministic_correlator(model, 0.2, 1.0, 300_000, seed=5, workers=1)
    four = bell.lhv_deterministic_correlator(model, 0.2, 1.0, 300_000, seed=5, workers=4)
    assert one == four
    other = bell.lhv_deterministic_correlator(model, 0.2, 1.0, 300_000, seed=6)
    assert other.value != one.value


def test_chunk_seed_scheme():
    a = np.random.default_rng(bell.chunk_seed(3, 0)).random()
    b = np.random.default_rng(np.random.SeedSequence(3, spawn_key=(0,))).random()
    assert a == b
    assert np.random.default_rng(bell.chunk_seed(3, 1)).random() != a
