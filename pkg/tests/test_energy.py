import numpy as np
import pytest

from conftest import random_interior, random_payoff

from growthdyn import (
    BNN,
    BnnIntegral,
    ConstantFitness,
    CURVATURE_FLAT,
    CURVATURE_INDEFINITE,
    CURVATURE_STRICTLY_CONCAVE,
    CURVATURE_STRICTLY_CONVEX,
    DomainError,
    LinearFitness,
    Logit,
    LogitIntegral,
    MutatorLog,
    MUTATION_AGREEMENT_TOL,
    ParameterError,
    QuadraticPayoff,
    Quasispecies,
    QuasispeciesLog,
    Replicator,
    ReplicatorIntegral,
    ReplicatorMutator,
    REPLICATOR_RESIDUAL_BOUND,
    SMOOTHED_RESIDUAL_BOUND,
    SaturatingFitness,
    bnn_excess,
    curvature_class,
    evaluate_H,
    fitness_jacobian,
    gradient_residual_report,
    numerical_gradient,
    standard_game,
    tangent_basis,
    uniform_noise_mutation,
)

RPS_A = standard_game("rps")
PD_A = standard_game("prisoners_dilemma")
HD_A = standard_game("hawk_dove")
COORD_A = standard_game("coordination")


class TestValues:
    def test_quadratic_payoff_matches_direct_formula(self):
        rng = np.random.default_rng(0)
        a = random_payoff(rng, 4)
        h = QuadraticPayoff(a, lam=1.5)
        for _ in range(10):
            x = random_interior(rng, 4)
            expected = -float(x @ a @ x) - 1.5 * x.sum()
            assert evaluate_H(h, x) == pytest.approx(expected, abs=1e-14)

    def test_quasispecies_log_matches_direct_formula(self):
        rng = np.random.default_rng(1)
        f = np.array([1.5, 2.0, 0.5])
        mut = uniform_noise_mutation(3, 0.2)
        h = QuasispeciesLog(f, mut, lam=0.5)
        for _ in range(10):
            x = random_interior(rng, 3)
            inflow = (x * f) @ mut.m
            expected = -float(np.log(x) @ inflow) - 0.5 * x.sum()
            assert evaluate_H(h, x) == pytest.approx(expected, abs=1e-14)

    def test_mutator_log_matches_direct_formula(self):
        rng = np.random.default_rng(2)
        model = LinearFitness(random_payoff(rng, 3, low=0.2, high=3.0))
        mut = uniform_noise_mutation(3, 0.3)
        h = MutatorLog(model, mut)
        x = random_interior(rng, 3)
        inflow = (x * model.fitness(x)) @ mut.m
        assert evaluate_H(h, x) == pytest.approx(-float(np.log(x) @ inflow), abs=1e-14)

    def test_replicator_integral_linear_closed_form_vs_quadrature(self):
        rng = np.random.default_rng(3)
        h = ReplicatorIntegral(LinearFitness(random_payoff(rng, 3)), lam=2.0)
        for _ in range(5):
            x = random_interior(rng, 3)
            closed = evaluate_H(h, x)
            quadrature = evaluate_H(h, x, force_quadrature=True)
            assert closed == pytest.approx(quadrature, abs=1e-8)

    def test_replicator_integral_constant_closed_form_vs_quadrature(self):
        h = ReplicatorIntegral(ConstantFitness(np.array([1.5, 2.0, 0.5])), lam=0.5)
        x = np.array([0.3, 0.45, 0.25])
        assert evaluate_H(h, x) == pytest.approx(evaluate_H(h, x, force_quadrature=True), abs=1e-10)

    def test_replicator_integral_vanishes_at_reference_point_without_shift(self):
        # every summand integrates from c to p_i = c
        h = ReplicatorIntegral(LinearFitness(PD_A), lam=0.0, c=0.5)
        assert evaluate_H(h, [0.5, 0.5]) == pytest.approx(0.0, abs=1e-14)

    def test_interior_only_costs_reject_boundary_points(self):
        h = ReplicatorIntegral(LinearFitness(PD_A))
        with pytest.raises(DomainError):
            evaluate_H(h, [1.0, 0.0])

    def test_reference_point_must_be_inside_unit_interval(self):
        with pytest.raises(ParameterError):
            ReplicatorIntegral(LinearFitness(PD_A), c=0.0)
        with pytest.raises(ParameterError):
            LogitIntegral(LinearFitness(PD_A), c=1.0)


class TestGradients:
    def test_replicator_integral_gradient_is_minus_shifted_fitness(self):
        rng = np.random.default_rng(4)
        model = LinearFitness(random_payoff(rng, 4))
        h = ReplicatorIntegral(model, lam=3.0)
        for _ in range(10):
            x = random_interior(rng, 4)
            g = numerical_gradient(h, x)
            np.testing.assert_allclose(g, -(model.fitness(x) + 3.0), atol=1e-9)

    def test_replicator_integral_gradient_saturating_model_by_quadrature(self):
        rng = np.random.default_rng(5)
        model = SaturatingFitness(random_payoff(rng, 3), c=0.5)
        h = ReplicatorIntegral(model, lam=2.0)
        x = random_interior(rng, 3)
        np.testing.assert_allclose(numerical_gradient(h, x), -(model.fitness(x) + 2.0), atol=1e-8)

    def test_quadratic_payoff_gradient_is_symmetrized_matrix_action(self):
        rng = np.random.default_rng(6)
        a = random_payoff(rng, 3)
        h = QuadraticPayoff(a, lam=1.0)
        x = random_interior(rng, 3)
        np.testing.assert_allclose(numerical_gradient(h, x), -(a + a.T) @ x - 1.0, atol=1e-7)

    def test_logit_integral_gradient_is_minus_engine_fitness(self):
        model = LinearFitness(PD_A)
        h = LogitIntegral(model, eta=1.0)
        x = np.array([0.4, 0.6])
        expected = -np.exp(model.fitness(x) / 1.0) / x
        np.testing.assert_allclose(numerical_gradient(h, x), expected, atol=1e-6)

    def test_bnn_integral_gradient_is_minus_excess_rate(self):
        h = BnnIntegral(RPS_A, epsilon=0.0)
        x = np.array([0.3, 0.45, 0.25])
        expected = -bnn_excess(RPS_A, 0.0, x) / x
        np.testing.assert_allclose(numerical_gradient(h, x), expected, atol=1e-6)

    def test_step_outside_permitted_range_rejected(self):
        h = QuadraticPayoff(PD_A)
        with pytest.raises(ParameterError):
            numerical_gradient(h, [0.5, 0.5], step=1e-2)
        with pytest.raises(ParameterError):
            numerical_gradient(h, [0.5, 0.5], step=1e-12)

    def test_differencing_step_must_not_cross_the_boundary(self):
        h = ReplicatorIntegral(LinearFitness(PD_A))
        with pytest.raises(DomainError):
            numerical_gradient(h, [1e-7, 1.0 - 1e-7], step=1e-6)


class TestResidualReports:
    def test_replicator_residual_sits_at_differencing_noise(self):
        rng = np.random.default_rng(7)
        spec = Replicator(model=LinearFitness(random_payoff(rng, 3)), lam=4.0)
        for _ in range(5):
            rep = gradient_residual_report(spec, random_interior(rng, 3))
            assert rep.family == "replicator"
            assert rep.bound == REPLICATOR_RESIDUAL_BOUND
            assert rep.residual <= 1e-6
            assert rep.passed
            assert rep.predicted_extra is None

    def test_logit_and_bnn_residuals_within_smoothed_bound(self):
        x = np.array([0.3, 0.45, 0.25])
        for spec in (Logit(model=LinearFitness(RPS_A), eta=1.0), BNN(matrix=RPS_A, epsilon=0.0)):
            rep = gradient_residual_report(spec, x)
            assert rep.bound == SMOOTHED_RESIDUAL_BOUND
            assert rep.residual <= SMOOTHED_RESIDUAL_BOUND
            assert rep.passed

    def test_quasispecies_residual_equals_log_weighted_cross_term(self):
        f = np.array([1.5, 2.0, 0.5])
        mut = uniform_noise_mutation(3, 0.2)
        spec = Quasispecies(values=f, mutation=mut, lam=0.5)
        x = np.array([0.3, 0.45, 0.25])
        rep = gradient_residual_report(spec, x)
        # independent oracle: the honest gradient of the log cost picks up
        # sum_k log(p_k) * d/dp_i of the inflow, here f_i * (M log p)_i
        oracle = float(np.max(np.abs(f * (mut.m @ np.log(x)))))
        assert rep.predicted_extra == pytest.approx(oracle, abs=1e-12)
        assert abs(rep.residual - rep.predicted_extra) <= 1e-9
        assert rep.prediction_agrees and rep.passed

    def test_replicator_mutator_residual_matches_analytic_cross_term(self):
        rng = np.random.default_rng(8)
        model = LinearFitness(random_payoff(rng, 3, low=0.2, high=3.0))
        mut = uniform_noise_mutation(3, 0.3)
        spec = ReplicatorMutator(model=model, mutation=mut, lam=0.5)
        x = random_interior(rng, 3)
        rep = gradient_residual_report(spec, x)
        f = model.fitness(x)
        jac = fitness_jacobian(model, x)
        logs = np.log(x)
        ds = f[:, None] * mut.m + (mut.m.T @ (x[:, None] * jac)).T
        oracle = float(np.max(np.abs(ds @ logs)))
        assert rep.predicted_extra == pytest.approx(oracle, abs=1e-12)
        assert abs(rep.residual - rep.predicted_extra) <= MUTATION_AGREEMENT_TOL
        assert rep.prediction_agrees

    def test_identity_mutation_removes_the_cross_term(self):
        from growthdyn import identity_mutation
        f = np.array([1.5, 2.0, 0.5])
        spec = Quasispecies(values=f, mutation=identity_mutation(3), lam=0.5)
        rep = gradient_residual_report(spec, np.array([0.3, 0.45, 0.25]))
        # with M = I the cross term collapses to f_i log p_i, still nonzero;
        # the report must predict exactly that
        oracle = float(np.max(np.abs(f * np.log(np.array([0.3, 0.45, 0.25])))))
        assert rep.predicted_extra == pytest.approx(oracle, abs=1e-12)

    def test_boundary_point_rejected(self):
        spec = Replicator(model=LinearFitness(PD_A), lam=6.0)
        with pytest.raises(DomainError):
            gradient_residual_report(spec, [1.0, 0.0])


class TestCurvature:
    def test_tangent_basis_is_orthonormal_and_sums_to_zero(self):
        for n in (2, 3, 5, 8):
            b = tangent_basis(n)
            assert b.shape == (n, n - 1)
            np.testing.assert_allclose(b.T @ b, np.eye(n - 1), atol=1e-14)
            np.testing.assert_allclose(b.sum(axis=0), np.zeros(n - 1), atol=1e-14)

    def test_hawk_dove_is_strictly_convex_with_eigenvalue_two(self):
        label, eigs = curvature_class(HD_A)
        assert label == CURVATURE_STRICTLY_CONVEX
        np.testing.assert_allclose(eigs, [2.0], atol=1e-12)

    def test_rps_is_flat(self):
        label, eigs = curvature_class(RPS_A)
        assert label == CURVATURE_FLAT
        np.testing.assert_allclose(eigs, np.zeros(2), atol=1e-12)

    def test_coordination_is_strictly_concave(self):
        label, eigs = curvature_class(COORD_A)
        assert label == CURVATURE_STRICTLY_CONCAVE
        np.testing.assert_allclose(eigs, [-3.0], atol=1e-12)

    def test_prisoners_dilemma_is_strictly_convex(self):
        label, eigs = curvature_class(PD_A)
        assert label == CURVATURE_STRICTLY_CONVEX
        np.testing.assert_allclose(eigs, [1.0], atol=1e-12)

    def test_indefinite_case(self):
        a = np.diag([1.0, -1.0, 0.0])
        label, _ = curvature_class(a)
        assert label == CURVATURE_INDEFINITE

    def test_classification_invariant_under_all_ones_shifts(self):
        rng = np.random.default_rng(9)
        for _ in range(100):
            a = random_payoff(rng, int(rng.integers(2, 6)))
            c = float(rng.uniform(-5.0, 5.0))
            label0, eigs0 = curvature_class(a)
            label1, eigs1 = curvature_class(a + c * np.ones_like(a))
            assert label1 == label0
            np.testing.assert_allclose(eigs1, eigs0, atol=1e-10)
