"""Payoff matrices, fitness models, mutation kernels and strategy selectors.

Fitness models map a population state p to a per-strategy fitness vector
f(p). Four shapes are supported: constant, linear f = Ap, a quadratic
own-share correction f_i = (Ap)_i + q_i p_i^2, and a saturating form
f_i = tanh((Ap)_i) + c. Mutation kernels are restricted to the identity
and the uniform-noise family, both symmetric and doubly stochastic by
construction.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import ConstraintError, DimensionError, ParameterError, UnknownGameError
from .simplex import as_point_array

__all__ = [
    "payoff_matrix",
    "ConstantFitness",
    "LinearFitness",
    "QuadraticFitness",
    "SaturatingFitness",
    "fitness",
    "mean_fitness",
    "fitness_jacobian",
    "standard_game",
    "STANDARD_GAMES",
    "MutationMatrix",
    "identity_mutation",
    "uniform_noise_mutation",
    "make_mutation_matrix",
    "SechSquaredSelector",
    "LogisticDerivativeSelector",
    "IdentitySelector",
    "selector_eval",
    "make_selector",
]


def payoff_matrix(a) -> np.ndarray:
    """Validate and copy an N x N real payoff matrix, N >= 2."""
    arr = np.asarray(a, dtype=float)
    if arr.ndim != 2 or arr.shape[0] != arr.shape[1]:
        raise DimensionError(f"payoff matrix must be square, got shape {arr.shape}")
    if arr.shape[0] < 2:
        raise DimensionError(f"payoff matrix needs at least 2 strategies, got {arr.shape[0]}")
    if not np.all(np.isfinite(arr)):
        raise ConstraintError("payoff entries must be finite")
    return arr.copy()


# ── Fitness models ──────────────────────────────────────────────────────────


@dataclass(frozen=True)
class ConstantFitness:
    """State-independent fitness vector, entries >= 0."""

    values: np.ndarray

    def __post_init__(self):
        arr = np.asarray(self.values, dtype=float)
        if arr.ndim != 1 or arr.shape[0] < 2:
            raise DimensionError(f"fitness vector must be 1-d with length >= 2, got shape {arr.shape}")
        if not np.all(np.isfinite(arr)):
            raise ConstraintError("fitness values must be finite")
        if np.any(arr < 0.0):
            raise ParameterError("constant fitness values must be nonnegative")
        arr = arr.copy()
        arr.setflags(write=False)
        object.__setattr__(self, "values", arr)

    @property
    def n(self) -> int:
        return self.values.shape[0]

    def fitness(self, p: np.ndarray) -> np.ndarray:
        return self.values.copy()

    def jacobian(self, p: np.ndarray) -> np.ndarray:
        return np.zeros((self.n, self.n))


@dataclass(frozen=True)
class LinearFitness:
    """Matrix game fitness f(p) = A p."""

    matrix: np.ndarray

    def __post_init__(self):
        arr = payoff_matrix(self.matrix)
        arr.setflags(write=False)
        object.__setattr__(self, "matrix", arr)

    @property
    def n(self) -> int:
        return self.matrix.shape[0]

    def fitness(self, p: np.ndarray) -> np.ndarray:
        return self.matrix @ p

    def jacobian(self, p: np.ndarray) -> np.ndarray:
        return np.array(self.matrix)


@dataclass(frozen=True)
class QuadraticFitness:
    """f_i(p) = (Ap)_i + q_i p_i^2, an own-share quadratic correction."""

    matrix: np.ndarray
    q: np.ndarray

    def __post_init__(self):
        arr = payoff_matrix(self.matrix)
        qv = np.asarray(self.q, dtype=float)
        if qv.shape != (arr.shape[0],):
            raise DimensionError(f"q must have length {arr.shape[0]}, got shape {qv.shape}")
        if not np.all(np.isfinite(qv)):
            raise ConstraintError("q entries must be finite")
        arr.setflags(write=False)
        qv = qv.copy()
        qv.setflags(write=False)
        object.__setattr__(self, "matrix", arr)
        object.__setattr__(self, "q", qv)

    @property
    def n(self) -> int:
        return self.matrix.shape[0]

    def fitness(self, p: np.ndarray) -> np.ndarray:
        return self.matrix @ p + self.q * p * p

    def jacobian(self, p: np.ndarray) -> np.ndarray:
        return self.matrix + np.diag(2.0 * self.q * p)


@dataclass(frozen=True)
class SaturatingFitness:
    """f_i(p) = tanh((Ap)_i) + c with offset c >= 0."""

    matrix: np.ndarray
    c: float = 0.0

    def __post_init__(self):
        arr = payoff_matrix(self.matrix)
        if not np.isfinite(self.c) or self.c < 0.0:
            raise ParameterError(f"saturation offset c must be >= 0, got {self.c!r}")
        arr.setflags(write=False)
        object.__setattr__(self, "matrix", arr)
        object.__setattr__(self, "c", float(self.c))

    @property
    def n(self) -> int:
        return self.matrix.shape[0]

    def fitness(self, p: np.ndarray) -> np.ndarray:
        return np.tanh(self.matrix @ p) + self.c

    def jacobian(self, p: np.ndarray) -> np.ndarray:
        s = 1.0 - np.tanh(self.matrix @ p) ** 2
        return s[:, None] * self.matrix


FitnessModel = ConstantFitness | LinearFitness | QuadraticFitness | SaturatingFitness


def fitness(model, p) -> np.ndarray:
    """Per-strategy fitness vector f(p)."""
    arr = as_point_array(p, model.n)
    return model.fitness(arr)


def mean_fitness(model, p) -> float:
    """Population mean fitness sum_i p_i f_i(p)."""
    arr = as_point_array(p, model.n)
    return float(arr @ model.fitness(arr))


def fitness_jacobian(model, p) -> np.ndarray:
    """Analytic Jacobian J[j, i] = d f_j / d p_i."""
    arr = as_point_array(p, model.n)
    return model.jacobian(arr)


# ── Standard games ──────────────────────────────────────────────────────────

STANDARD_GAMES = {
    # zero-sum cycle: rock beats scissors beats paper beats rock
    "rps": [[0.0, -1.0, 1.0], [1.0, 0.0, -1.0], [-1.0, 1.0, 0.0]],
    # rows/cols ordered (cooperate, defect); defect strictly dominates
    "prisoners_dilemma": [[3.0, 0.0], [5.0, 1.0]],
    # V=2, C=4: mixed evolutionarily stable state at p = (1/2, 1/2)
    "hawk_dove": [[-1.0, 2.0], [0.0, 1.0]],
    # two pure equilibria, payoffs 2 and 1
    "coordination": [[2.0, 0.0], [0.0, 1.0]],
}


def standard_game(name: str) -> np.ndarray:
    """Payoff matrix of a named textbook game."""
    try:
        spec = STANDARD_GAMES[name]
    except KeyError:
        known = ", ".join(sorted(STANDARD_GAMES))
        raise UnknownGameError(f"unknown game {name!r}; known games: {known}") from None
    return payoff_matrix(spec)


# ── Mutation kernels ────────────────────────────────────────────────────────


@dataclass(frozen=True)
class MutationMatrix:
    """Symmetric doubly stochastic mutation kernel with entries in [0, 1]."""

    m: np.ndarray = field(repr=False)

    def __post_init__(self):
        arr = np.asarray(self.m, dtype=float)
        if arr.ndim != 2 or arr.shape[0] != arr.shape[1] or arr.shape[0] < 2:
            raise DimensionError(f"mutation matrix must be square with n >= 2, got shape {arr.shape}")
        if np.any(arr < 0.0) or np.any(arr > 1.0):
            raise ConstraintError("mutation entries must lie in [0, 1]")
        if np.max(np.abs(arr - arr.T)) > 1e-12:
            raise ConstraintError("mutation matrix must be symmetric within 1e-12")
        rows = np.abs(arr.sum(axis=1) - 1.0)
        cols = np.abs(arr.sum(axis=0) - 1.0)
        if rows.max() > 1e-10 or cols.max() > 1e-10:
            raise ConstraintError("mutation matrix must be doubly stochastic within 1e-10")
        arr = arr.copy()
        arr.setflags(write=False)
        object.__setattr__(self, "m", arr)

    @property
    def n(self) -> int:
        return self.m.shape[0]


def identity_mutation(n: int) -> MutationMatrix:
    """Mutation-free kernel M = I."""
    if n < 2:
        raise DimensionError(f"need n >= 2, got {n}")
    return MutationMatrix(np.eye(n))


def uniform_noise_mutation(n: int, mu: float) -> MutationMatrix:
    """M = (1 - mu) I + (mu / n) J: keep with prob 1-mu, else mutate uniformly."""
    if n < 2:
        raise DimensionError(f"need n >= 2, got {n}")
    if not 0.0 <= mu <= 1.0:
        raise ParameterError(f"mutation rate mu must lie in [0, 1], got {mu!r}")
    return MutationMatrix((1.0 - mu) * np.eye(n) + (mu / n) * np.ones((n, n)))


def make_mutation_matrix(kind: str, n: int, mu: float | None = None) -> MutationMatrix:
    """Construct a kernel by name: 'identity' or 'uniform_noise' (needs mu)."""
    if kind == "identity":
        return identity_mutation(n)
    if kind == "uniform_noise":
        if mu is None:
            raise ParameterError("uniform_noise mutation requires mu")
        return uniform_noise_mutation(n, mu)
    raise ParameterError(f"unknown mutation kind {kind!r}")


# ── Strategy selectors ──────────────────────────────────────────────────────


@dataclass(frozen=True)
class SechSquaredSelector:
    """h(x) = sech^2(x), a bounded bell-shaped weight."""

    def weights(self, x: np.ndarray) -> np.ndarray:
        return 1.0 / np.cosh(x) ** 2


@dataclass(frozen=True)
class LogisticDerivativeSelector:
    """h(x) = k sigma(kx) (1 - sigma(kx)) with steepness k > 0."""

    k: float = 1.0

    def __post_init__(self):
        if not self.k > 0:
            raise ParameterError(f"steepness k must be positive, got {self.k!r}")
        object.__setattr__(self, "k", float(self.k))

    def weights(self, x: np.ndarray) -> np.ndarray:
        s = 1.0 / (1.0 + np.exp(-self.k * x))
        return self.k * s * (1.0 - s)


@dataclass(frozen=True)
class IdentitySelector:
    """h(x) = 1: no reweighting."""

    def weights(self, x: np.ndarray) -> np.ndarray:
        return np.ones_like(x)


Selector = SechSquaredSelector | LogisticDerivativeSelector | IdentitySelector


def selector_eval(h, x) -> np.ndarray:
    """Evaluate a selector elementwise; all selectors are positive on [0, 1]."""
    return h.weights(np.asarray(x, dtype=float))


def make_selector(kind: str, k: float | None = None):
    """Construct a selector by name."""
    if kind == "sech_squared":
        return SechSquaredSelector()
    if kind == "logistic_derivative":
        return LogisticDerivativeSelector(k if k is not None else 1.0)
    if kind == "identity":
        return IdentitySelector()
    raise ParameterError(f"unknown selector kind {kind!r}")
