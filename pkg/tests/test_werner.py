import numpy as np
import pytest

from povmsim.bloch import PauliOperator, to_dense
from povmsim.povm import projective_povm, random_povm, sic_povm, trine_povm
from povmsim.stats import chi_squared_test
from povmsim.werner import (
    bob_conditional_state,
    chsh_correlator,
    chsh_optimal_settings,
    chsh_value,
    lhs_joint_exact,
    lhs_model,
    lhs_sample,
    werner_dense,
    werner_joint_dense,
    werner_joint_quantum,
)


class TestWernerState:
    @pytest.mark.parametrize("eta", [0.0, 0.3, 0.5, 1.0])
    def test_dense_form_is_a_state(self, eta):
        rho = werner_dense(eta)
        assert abs(np.trace(rho).real - 1.0) <= 1e-14
        np.testing.assert_allclose(rho, rho.conj().T, atol=1e-15)
        assert np.linalg.eigvalsh(rho).min() >= -1e-14

    def test_visibility_range_enforced(self):
        with pytest.raises(ValueError):
            werner_dense(1.5)


class TestQuantumJoint:
    def test_singlet_anticorrelation(self):
        povm = projective_povm([0, 0, 1])
        joint = werner_joint_quantum(povm, povm, 1.0).table
        np.testing.assert_allclose(joint, [[0.0, 0.5], [0.5, 0.0]], atol=1e-14)

    def test_fully_mixed_is_product(self):
        a, b = trine_povm(), sic_povm()
        joint = werner_joint_quantum(a, b, 0.0).table
        np.testing.assert_allclose(joint, np.outer(a.weights / 2, b.weights / 2), atol=1e-14)

    def test_half_visibility_projective_value(self):
        povm = projective_povm([0, 0, 1])
        joint = werner_joint_quantum(povm, povm, 0.5).table
        # Oracle: dense 4x4 trace.
        dense = werner_joint_dense(povm, povm, 0.5)
        np.testing.assert_allclose(joint, dense, atol=1e-12)
        assert joint[0, 0] == pytest.approx(1.0 / 8.0, abs=1e-14)

    def test_closed_form_agrees_with_dense_for_random_pairs(self):
        rng = np.random.default_rng(2)
        for seed in range(25):
            a = random_povm(2 + seed % 7, seed)
            b = random_povm(2 + (seed + 3) % 7, 70 + seed)
            eta = rng.random()
            joint = werner_joint_quantum(a, b, eta).table
            np.testing.assert_allclose(joint, werner_joint_dense(a, b, eta), atol=1e-12)

    def test_no_signaling_marginals(self):
        a, b = sic_povm(), trine_povm()
        joint = werner_joint_quantum(a, b, 0.7)
        np.testing.assert_allclose(joint.marginal_alice, a.weights / 2.0, atol=1e-10)
        np.testing.assert_allclose(joint.marginal_bob, b.weights / 2.0, atol=1e-10)
        assert joint.table.sum() == pytest.approx(1.0, abs=1e-10)


class TestHiddenStateModel:
    def test_projective_pair_matches_quantum(self):
        povm = projective_povm([0, 0, 1])
        lhs = lhs_joint_exact(povm, povm).table
        quantum = werner_joint_quantum(povm, povm, 0.5).table
        np.testing.assert_allclose(lhs, quantum, atol=1e-12)

    def test_sic_against_projective_x(self):
        lhs = lhs_joint_exact(sic_povm(), projective_povm([1, 0, 0])).table
        quantum = werner_joint_quantum(sic_povm(), projective_povm([1, 0, 0]), 0.5).table
        assert np.max(np.abs(lhs - quantum)) <= 1e-10

    def test_random_pairs_match_quantum(self):
        worst = 0.0
        for seed in range(50):
            a = random_povm(2 + seed % 7, 3000 + seed)
            b = random_povm(2 + (seed + 2) % 7, 4000 + seed)
            lhs = lhs_joint_exact(a, b).table
            quantum = werner_joint_quantum(a, b, 0.5).table
            worst = max(worst, float(np.max(np.abs(lhs - quantum))))
        assert worst <= 1e-10

    def test_bob_conditional_state_identity(self):
        model = lhs_model(projective_povm([0, 0, 1]), projective_povm([1, 0, 0]))
        state = bob_conditional_state(model.table, 0)
        assert state.t == pytest.approx(0.25, abs=1e-12)
        np.testing.assert_allclose(state.w, [0, 0, -0.125], atol=1e-12)

    def test_bob_conditional_state_random_povms(self):
        for seed in range(20):
            alice = random_povm(2 + seed % 7, 5000 + seed)
            model = lhs_model(alice, sic_povm())
            total = PauliOperator(0.0, np.zeros(3))
            for i in range(alice.n_outcomes):
                state = bob_conditional_state(model.table, i)
                p, a = alice.weights[i], alice.directions[i]
                assert state.t == pytest.approx(p / 4.0, abs=1e-12)
                np.testing.assert_allclose(state.w, -p * a / 8.0, atol=1e-12)
                total = total + state
            # Unconditioned, Bob holds the maximally mixed state.
            assert total.t == pytest.approx(0.5, abs=1e-12)
            np.testing.assert_allclose(total.w, 0.0, atol=1e-12)

    def test_bob_state_matches_dense_partial_trace(self):
        alice = sic_povm()
        model = lhs_model(alice, projective_povm([0, 1, 0]))
        rho = werner_dense(0.5)
        for i in range(alice.n_outcomes):
            dense_a = to_dense(alice.element(i))
            kron = np.kron(dense_a, np.eye(2, dtype=complex))
            after = kron @ rho
            partial = np.array(
                [
                    [after[0, 0] + after[2, 2], after[0, 1] + after[2, 3]],
                    [after[1, 0] + after[3, 2], after[1, 1] + after[3, 3]],
                ]
            )
            np.testing.assert_allclose(
                to_dense(bob_conditional_state(model.table, i)), partial, atol=1e-12
            )


class TestSampling:
    def test_single_round_reproducible(self):
        a, b = trine_povm(), projective_povm([0, 1, 0])
        round1 = lhs_sample(a, b, np.random.default_rng(11))
        round2 = lhs_sample(a, b, np.random.default_rng(11))
        assert round1 == round2

    def test_counts_deterministic_and_worker_invariant(self):
        model = lhs_model(sic_povm(), trine_povm())
        c1 = model.sample_counts(200_000, rng_seed=5)
        c2 = model.sample_counts(200_000, rng_seed=5, workers=3)
        np.testing.assert_array_equal(c1, c2)

    def test_projective_pair_frequencies(self):
        povm = projective_povm([0, 0, 1])
        model = lhs_model(povm, povm)
        n = 500_000
        counts = model.sample_counts(n, rng_seed=13)
        # Quantum value p(+,-) = 3/8 at half visibility.
        p = counts[0, 1] / n
        sigma = np.sqrt(0.375 * 0.625 / n)
        assert abs(p - 0.375) <= 4.0 * sigma

    def test_empirical_table_passes_chi_squared(self):
        model = lhs_model(sic_povm(), projective_povm([1, 0, 0]))
        counts = model.sample_counts(400_000, rng_seed=17)
        result = chi_squared_test(counts, model.joint_exact().table)
        assert result.pvalue >= 1e-3


class TestChsh:
    def test_maximal_violation_at_full_visibility(self):
        assert chsh_value(*chsh_optimal_settings(), 1.0) == pytest.approx(
            2.0 * np.sqrt(2.0), abs=1e-10
        )

    def test_half_visibility_below_classical_bound(self):
        value = chsh_value(*chsh_optimal_settings(), 0.5)
        assert value == pytest.approx(np.sqrt(2.0), abs=1e-10)
        assert value <= 2.0

    def test_threshold_visibility(self):
        assert chsh_value(*chsh_optimal_settings(), 1.0 / np.sqrt(2.0)) == pytest.approx(
            2.0, abs=1e-10
        )

    def test_linear_in_visibility(self):
        rng = np.random.default_rng(3)
        settings = chsh_optimal_settings()
        base = chsh_value(*settings, 1.0)
        for eta in rng.random(10):
            assert chsh_value(*settings, eta) == pytest.approx(eta * base, abs=1e-12)

    def test_correlator_closed_form(self):
        rng = np.random.default_rng(4)
        u = rng.standard_normal(3)
        u /= np.linalg.norm(u)
        v = rng.standard_normal(3)
        v /= np.linalg.norm(v)
        assert chsh_correlator(u, v, 0.8) == pytest.approx(-0.8 * u @ v, abs=1e-14)
