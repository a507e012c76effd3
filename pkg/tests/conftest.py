"""Shared helpers: random games, interior points, and family catalogues."""

from __future__ import annotations

import numpy as np

from growthdyn import (
    BNN,
    ConstantFitness,
    LinearFitness,
    Logit,
    QuadraticFitness,
    Quasispecies,
    Replicator,
    ReplicatorMutator,
    SaturatingFitness,
    SechSquaredSelector,
    SelectorWeighted,
    uniform_noise_mutation,
)


ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)


def random_payoff(rng: np.random.Generator, n: int, low: float = -2.0, high: float = 3.0) -> np.ndarray:
    return rng.uniform(low, high, size=(n, n))


def random_interior(rng: np.random.Generator, n: int, margin: float = 0.02) -> np.ndarray:
    """A strictly interior simplex point with every coordinate >= margin / n."""
    x = rng.standard_exponential(n)
    x = x / x.sum()
    return (1.0 - margin) * x + margin / n


def random_linear_model(rng: np.random.Generator, n: int) -> LinearFitness:
    return LinearFitness(random_payoff(rng, n))


def shift_for(model) -> float:
    """A lambda large enough to make f + lambda > 0 anywhere on the simplex."""
    if isinstance(model, LinearFitness):
        return float(np.abs(model.matrix).max() + 1.0)
    if isinstance(model, ConstantFitness):
        return 1.0
    if isinstance(model, QuadraticFitness):
        return float(np.abs(model.matrix).max() + np.abs(model.q).max() + 1.0)
    if isinstance(model, SaturatingFitness):
        return 2.0
    raise TypeError(f"no shift rule for {type(model).__name__}")


def engine_family_specs(rng: np.random.Generator, n: int):
    """One spec per engine-instantiable family, on random payoffs of size n.

    Mutation families get positive payoffs: their engine weights carry
    incoming flow sum_j p_j f_j m_ji, which no global shift can keep
    nonnegative near the boundary when f changes sign.
    """
    lin = random_linear_model(rng, n)
    pos = LinearFitness(random_payoff(rng, n, low=0.2, high=3.0))
    quad = QuadraticFitness(random_payoff(rng, n), rng.uniform(-1.0, 1.0, n))
    sat = SaturatingFitness(random_payoff(rng, n), c=0.5)
    values = rng.uniform(0.2, 3.0, n)
    mutation = uniform_noise_mutation(n, float(rng.uniform(0.0, 1.0)))
    return [
        Replicator(model=lin, lam=shift_for(lin)),
        Replicator(model=quad, lam=shift_for(quad)),
        Replicator(model=sat, lam=shift_for(sat)),
        Quasispecies(values=values, mutation=mutation, lam=0.5),
        ReplicatorMutator(model=pos, mutation=mutation, lam=0.5),
        Logit(model=lin, eta=float(rng.uniform(0.3, 2.0))),
        BNN(matrix=lin.matrix, epsilon=0.0),
        SelectorWeighted(model=lin, selector=SechSquaredSelector(), lam=shift_for(lin)),
    ]
