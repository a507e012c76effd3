import numpy as np
import pytest

from growthdyn import (
    ConstantFitness,
    ConstraintError,
    DimensionError,
    IdentitySelector,
    LinearFitness,
    LogisticDerivativeSelector,
    MutationMatrix,
    ParameterError,
    QuadraticFitness,
    SaturatingFitness,
    SechSquaredSelector,
    STANDARD_GAMES,
    UnknownGameError,
    fitness,
    fitness_jacobian,
    identity_mutation,
    make_mutation_matrix,
    make_selector,
    mean_fitness,
    payoff_matrix,
    selector_eval,
    standard_game,
    uniform_noise_mutation,
)


class TestPayoffMatrix:
    def test_accepts_square(self):
        a = payoff_matrix([[0.0, 1.0], [2.0, 3.0]])
        assert a.shape == (2, 2)

    def test_rejects_non_square(self):
        with pytest.raises(DimensionError):
            payoff_matrix([[1.0, 2.0, 3.0], [4.0, 5.0, 6.0]])

    def test_rejects_one_by_one(self):
        with pytest.raises(DimensionError):
            payoff_matrix([[1.0]])

    def test_rejects_nan(self):
        with pytest.raises(ConstraintError):
            payoff_matrix([[np.nan, 0.0], [0.0, 1.0]])


class TestStandardGames:
    def test_catalogue_contents(self):
        assert set(STANDARD_GAMES) == {"rps", "prisoners_dilemma", "hawk_dove", "coordination"}

    def test_rps_is_the_cyclic_zero_sum_game(self):
        a = standard_game("rps")
        np.testing.assert_array_equal(a, [[0, -1, 1], [1, 0, -1], [-1, 1, 0]])
        np.testing.assert_array_equal(a, -a.T)

    def test_prisoners_dilemma_defection_dominates(self):
        a = standard_game("prisoners_dilemma")
        np.testing.assert_array_equal(a, [[3, 0], [5, 1]])
        # row 2 (defect) beats row 1 (cooperate) against both columns
        assert np.all(a[1] > a[0])

    def test_hawk_dove_matrix(self):
        np.testing.assert_array_equal(standard_game("hawk_dove"), [[-1, 2], [0, 1]])

    def test_coordination_matrix(self):
        np.testing.assert_array_equal(standard_game("coordination"), [[2, 0], [0, 1]])

    def test_unknown_name(self):
        with pytest.raises(UnknownGameError):
            standard_game("chicken")


class TestFitnessModels:
    def test_constant_fitness_ignores_state(self):
        m = ConstantFitness(np.array([1.0, 2.0, 3.0]))
        np.testing.assert_array_equal(m.fitness(np.array([0.2, 0.3, 0.5])), [1, 2, 3])
        np.testing.assert_array_equal(m.jacobian(np.array([0.2, 0.3, 0.5])), np.zeros((3, 3)))

    def test_constant_fitness_rejects_negative(self):
        with pytest.raises(ParameterError):
            ConstantFitness(np.array([1.0, -0.5]))

    def test_linear_fitness_is_matrix_action(self):
        a = standard_game("rps")
        m = LinearFitness(a)
        x = np.array([0.5, 0.25, 0.25])
        np.testing.assert_allclose(m.fitness(x), a @ x)
        np.testing.assert_array_equal(m.jacobian(x), a)

    def test_quadratic_fitness_adds_diagonal_term(self):
        a = np.array([[1.0, 2.0], [0.5, 1.5]])
        q = np.array([2.0, -1.0])
        m = QuadraticFitness(a, q)
        x = np.array([0.4, 0.6])
        np.testing.assert_allclose(m.fitness(x), a @ x + q * x * x)

    def test_saturating_fitness_squashes_payoffs(self):
        a = np.array([[5.0, 0.0], [0.0, 5.0]])
        m = SaturatingFitness(a, c=0.25)
        x = np.array([0.5, 0.5])
        np.testing.assert_allclose(m.fitness(x), np.tanh(a @ x) + 0.25)

    @pytest.mark.parametrize("build", [
        lambda a: LinearFitness(a),
        lambda a: QuadraticFitness(a, np.array([0.3, -0.2, 0.7])),
        lambda a: SaturatingFitness(a, c=0.1),
    ])
    def test_jacobian_matches_finite_differences(self, build):
        rng = np.random.default_rng(7)
        a = rng.uniform(-2, 2, (3, 3))
        m = build(a)
        x = np.array([0.3, 0.45, 0.25])
        jac = m.jacobian(x)
        step = 1e-7
        fd = np.empty((3, 3))
        for j in range(3):
            zp, zm = x.copy(), x.copy()
            zp[j] += step
            zm[j] -= step
            fd[:, j] = (m.fitness(zp) - m.fitness(zm)) / (2 * step)
        np.testing.assert_allclose(jac, fd, atol=1e-6)

    def test_module_level_helpers(self):
        m = LinearFitness(standard_game("prisoners_dilemma"))
        x = np.array([0.5, 0.5])
        np.testing.assert_allclose(fitness(m, x), [1.5, 3.0])
        assert mean_fitness(m, x) == pytest.approx(2.25)
        np.testing.assert_array_equal(fitness_jacobian(m, x), m.matrix)


class TestMutationMatrices:
    def test_identity_mutation(self):
        np.testing.assert_array_equal(identity_mutation(3).m, np.eye(3))

    def test_uniform_noise_interpolates_identity_and_flat(self):
        np.testing.assert_array_equal(uniform_noise_mutation(2, 0.0).m, np.eye(2))
        np.testing.assert_allclose(uniform_noise_mutation(2, 1.0).m, np.full((2, 2), 0.5))

    def test_uniform_noise_is_doubly_stochastic(self):
        m = uniform_noise_mutation(4, 0.3).m
        np.testing.assert_allclose(m.sum(axis=0), np.ones(4))
        np.testing.assert_allclose(m.sum(axis=1), np.ones(4))

    def test_rejects_mu_outside_unit_interval(self):
        with pytest.raises(ParameterError):
            uniform_noise_mutation(3, 1.5)
        with pytest.raises(ParameterError):
            uniform_noise_mutation(3, -0.1)

    def test_rejects_asymmetric(self):
        bad = np.array([[0.9, 0.1], [0.2, 0.8]])
        with pytest.raises(ConstraintError):
            MutationMatrix(bad)

    def test_rejects_non_stochastic(self):
        bad = np.array([[0.5, 0.1], [0.1, 0.5]])
        with pytest.raises(ConstraintError):
            MutationMatrix(bad)

    def test_factory(self):
        np.testing.assert_array_equal(make_mutation_matrix("identity", 3).m, np.eye(3))
        m = make_mutation_matrix("uniform_noise", 3, 0.3)
        assert m.n == 3
        with pytest.raises(ParameterError):
            make_mutation_matrix("uniform_noise", 3)
        with pytest.raises(ParameterError):
            make_mutation_matrix("swap", 3)


class TestSelectors:
    def test_sech_squared_peak_and_decay(self):
        h = SechSquaredSelector()
        w = selector_eval(h, np.array([0.0, 0.5, 1.0]))
        assert w[0] == pytest.approx(1.0)
        assert np.all(np.diff(w) < 0)

    def test_logistic_derivative_positive_and_bounded(self):
        h = LogisticDerivativeSelector(4.0)
        w = selector_eval(h, np.array([0.0, 0.25, 0.75, 1.0]))
        assert np.all(w > 0)
        assert np.all(w <= 1.0)
        assert w[0] == pytest.approx(1.0)  # k * sigma(0) * (1 - sigma(0)) = k/4

    def test_logistic_derivative_requires_positive_k(self):
        with pytest.raises(ParameterError):
            LogisticDerivativeSelector(0.0)

    def test_identity_selector_is_all_ones(self):
        h = IdentitySelector()
        np.testing.assert_array_equal(selector_eval(h, np.array([0.1, 0.9])), [1.0, 1.0])

    def test_factory(self):
        assert isinstance(make_selector("sech_squared"), SechSquaredSelector)
        assert isinstance(make_selector("logistic_derivative", 2.0), LogisticDerivativeSelector)
        assert isinstance(make_selector("identity"), IdentitySelector)
        with pytest.raises(ParameterError):
            make_selector("step")

    def test_all_selectors_positive_on_unit_interval(self):
        xs = np.linspace(0.0, 1.0, 101)
        for h in (SechSquaredSelector(), LogisticDerivativeSelector(3.0), IdentitySelector()):
            assert np.all(selector_eval(h, xs) > 0.0)
