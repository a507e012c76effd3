"""Request/response models and config-to-core builders.

The JSON experiment config has five blocks: game, dynamics, initial,
integrator, outputs, plus optional compare and gradcheck blocks used by
those subcommands. Models reject unknown keys so typos surface as field
errors. Structural validation lives in pydantic; cross-field semantic
checks (square matrices, matching lengths, family/game compatibility)
are applied by the builders below, which report offending fields by
config path.
"""

from __future__ import annotations

from typing import Literal, Optional, Union

import numpy as np
from pydantic import BaseModel, ConfigDict, Field

from .dynamics import (
    BNN,
    BestResponse,
    ConstantRate,
    DiscreteReplicator,
    DynamicsSpec,
    Logit,
    MeanShiftedFitness,
    Quasispecies,
    Replicator,
    ReplicatorMutator,
    SelectorWeighted,
    SumExcess,
    SumExp,
)
from .errors import ParameterError, UnknownGameError
from .games import (
    ConstantFitness,
    FitnessModel,
    LinearFitness,
    QuadraticFitness,
    SaturatingFitness,
    make_mutation_matrix,
    make_selector,
    standard_game,
)
from .simplex import SimplexPoint, make_simplex_point, sample_uniform, uniform_point
from .solvers import IntegratorConfig

__all__ = [
    "ConfigFieldError",
    "ExperimentConfig",
    "CliqueRequest",
    "build_fitness_model",
    "build_dynamics_spec",
    "build_initial_point",
    "build_integrator_config",
    "field_path",
]


class ConfigFieldError(ValueError):
    """Semantic config error carrying the offending field locations."""

    def __init__(self, msg: str, locs: list[tuple]):
        super().__init__(msg)
        self.msg = msg
        self.locs = [tuple(loc) for loc in locs]

    def detail(self) -> list[dict]:
        return [{"loc": list(loc), "msg": self.msg, "type": "value_error"} for loc in self.locs]


def field_path(loc) -> str:
    """Render a pydantic-style loc tuple as a /-joined config path."""
    return "/" + "/".join(str(part) for part in loc)


class _Strict(BaseModel):
    model_config = ConfigDict(extra="forbid", populate_by_name=True)


# Game block. "standard" pulls a named payoff matrix from the catalogue.


class LinearGame(_Strict):
    type: Literal["linear"]
    matrix: list[list[float]]


class StandardGame(_Strict):
    type: Literal["standard"]
    name: str


class ConstantGame(_Strict):
    type: Literal["constant"]
    values: list[float]


class QuadraticGame(_Strict):
    type: Literal["quadratic"]
    matrix: list[list[float]]
    q: list[float]


class SaturatingGame(_Strict):
    type: Literal["saturating"]
    matrix: list[list[float]]
    c: float = 0.0


GameModel = Union[LinearGame, StandardGame, ConstantGame, QuadraticGame, SaturatingGame]


class MutationModel(_Strict):
    kind: Literal["identity", "uniform_noise"]
    mu: Optional[float] = None


class SelectorModel(_Strict):
    kind: Literal["sech_squared", "logistic_derivative", "identity"]
    k: Optional[float] = None


class GbarModel(_Strict):
    kind: Literal["mean_shifted", "sum_exp", "sum_excess", "constant"]
    eta: Optional[float] = None
    epsilon: float = 0.0
    value: Optional[float] = None


class ReplicatorModel(_Strict):
    family: Literal["replicator"]
    lam: float = Field(default=0.0, alias="lambda", ge=0.0)


class QuasispeciesModel(_Strict):
    family: Literal["quasispecies"]
    mutation: MutationModel
    lam: float = Field(default=0.0, alias="lambda", ge=0.0)


class ReplicatorMutatorModel(_Strict):
    family: Literal["replicator_mutator"]
    mutation: MutationModel
    lam: float = Field(default=0.0, alias="lambda", ge=0.0)


class LogitModel(_Strict):
    family: Literal["logit"]
    eta: float = 1.0


class BestResponseModel(_Strict):
    family: Literal["best_response"]


class BNNModel(_Strict):
    family: Literal["bnn"]
    epsilon: float = Field(default=0.0, ge=0.0)


class SelectorWeightedModel(_Strict):
    family: Literal["selector"]
    h: SelectorModel
    lam: float = Field(default=0.0, alias="lambda", ge=0.0)
    gbar: GbarModel = GbarModel(kind="mean_shifted")


class DiscreteReplicatorModel(_Strict):
    family: Literal["discrete"]
    lam: float = Field(default=0.0, alias="lambda", ge=0.0)
    max_iters: int = Field(default=10000, ge=1)


DynamicsModel = Union[
    ReplicatorModel,
    QuasispeciesModel,
    ReplicatorMutatorModel,
    LogitModel,
    BestResponseModel,
    BNNModel,
    SelectorWeightedModel,
    DiscreteReplicatorModel,
]


class RandomSeed(_Strict):
    seed: Optional[int] = None


class UniformInitial(_Strict):
    uniform: Literal[True]


class RandomInitial(_Strict):
    random: RandomSeed


InitialModel = Union[list[float], UniformInitial, RandomInitial]


class IntegratorModel(_Strict):
    dt: float = Field(default=1e-3, gt=0.0)
    t_max: float = Field(default=100.0, gt=0.0)
    record_every: int = Field(default=1, ge=1)
    conv_tol: float = Field(default=1e-8, gt=0.0)
    conv_window: int = Field(default=10, ge=1)
    positivity_guard: bool = True


class OutputsModel(_Strict):
    trajectory_csv: Optional[str] = None
    report_json: Optional[str] = None
    plot_csv: Optional[str] = None


class CompareOptions(_Strict):
    points: int = Field(default=100, ge=1)
    seed: Optional[int] = None
    tolerance: float = Field(default=1e-10, gt=0.0)


class GradcheckOptions(_Strict):
    points: int = Field(default=100, ge=1)
    seed: Optional[int] = None
    step: float = Field(default=1e-6, gt=0.0)


class ExperimentConfig(_Strict):
    game: GameModel = Field(discriminator="type")
    dynamics: DynamicsModel = Field(discriminator="family")
    initial: Optional[InitialModel] = None
    integrator: IntegratorModel = IntegratorModel()
    outputs: OutputsModel = OutputsModel()
    compare: CompareOptions = CompareOptions()
    gradcheck: GradcheckOptions = GradcheckOptions()


class CliqueRequest(_Strict):
    n: int = Field(ge=1)
    edges: list[list[int]] = Field(default_factory=list)
    restarts: int = Field(default=50, ge=1)
    lam: float = Field(default=0.5, alias="lambda", ge=0.0)
    seed: int = 0
    max_iters: int = Field(default=3000, ge=1)
    conv_tol: float = Field(default=1e-13, gt=0.0)


# Builders: config models -> core objects, with field-located semantics.


def _square_matrix(rows: list[list[float]], loc: tuple) -> np.ndarray:
    n = len(rows)
    if n < 2:
        raise ConfigFieldError("payoff matrix needs at least two strategies", [loc])
    if any(len(row) != n for row in rows):
        raise ConfigFieldError("payoff matrix must be square", [loc])
    a = np.asarray(rows, dtype=float)
    if not np.all(np.isfinite(a)):
        raise ConfigFieldError("payoff matrix entries must be finite", [loc])
    return a


def build_fitness_model(game: GameModel) -> FitnessModel:
    if isinstance(game, StandardGame):
        try:
            return LinearFitness(standard_game(game.name))
        except UnknownGameError as exc:
            raise ConfigFieldError(str(exc), [("game", "name")]) from exc
    if isinstance(game, LinearGame):
        return LinearFitness(_square_matrix(game.matrix, ("game", "matrix")))
    if isinstance(game, ConstantGame):
        values = np.asarray(game.values, dtype=float)
        if values.size < 2:
            raise ConfigFieldError("constant fitness needs at least two strategies", [("game", "values")])
        if not np.all(np.isfinite(values)):
            raise ConfigFieldError("constant fitness values must be finite", [("game", "values")])
        if np.any(values < 0):
            raise ConfigFieldError("constant fitness values must be nonnegative", [("game", "values")])
        return ConstantFitness(values)
    if isinstance(game, QuadraticGame):
        a = _square_matrix(game.matrix, ("game", "matrix"))
        q = np.asarray(game.q, dtype=float)
        if q.shape != (a.shape[0],):
            raise ConfigFieldError(
                f"q has {q.size} entries but the matrix has {a.shape[0]} strategies",
                [("game", "q"), ("game", "matrix")],
            )
        return QuadraticFitness(a, q)
    if isinstance(game, SaturatingGame):
        a = _square_matrix(game.matrix, ("game", "matrix"))
        if game.c < 0:
            raise ConfigFieldError("saturating offset c must be nonnegative", [("game", "c")])
        return SaturatingFitness(a, game.c)
    raise ConfigFieldError("unrecognised game block", [("game",)])


def _build_mutation(model: MutationModel, n: int, loc_prefix: tuple):
    if model.kind == "uniform_noise" and model.mu is None:
        raise ConfigFieldError("uniform_noise mutation requires mu", [loc_prefix + ("mu",)])
    try:
        return make_mutation_matrix(model.kind, n, model.mu)
    except ParameterError as exc:
        raise ConfigFieldError(str(exc), [loc_prefix + ("mu",)]) from exc


def build_dynamics_spec(config: ExperimentConfig) -> DynamicsSpec:
    model = build_fitness_model(config.game)
    dyn = config.dynamics
    n = model.n

    if isinstance(dyn, ReplicatorModel):
        return Replicator(model=model, lam=dyn.lam)

    if isinstance(dyn, QuasispeciesModel):
        if not isinstance(model, ConstantFitness):
            raise ConfigFieldError(
                "quasispecies dynamics require a constant (state-independent) game",
                [("dynamics", "family"), ("game", "type")],
            )
        mutation = _build_mutation(dyn.mutation, n, ("dynamics", "mutation"))
        return Quasispecies(values=model.values, mutation=mutation, lam=dyn.lam)

    if isinstance(dyn, ReplicatorMutatorModel):
        mutation = _build_mutation(dyn.mutation, n, ("dynamics", "mutation"))
        return ReplicatorMutator(model=model, mutation=mutation, lam=dyn.lam)

    if isinstance(dyn, LogitModel):
        try:
            return Logit(model=model, eta=dyn.eta)
        except ParameterError as exc:
            raise ConfigFieldError(str(exc), [("dynamics", "eta")]) from exc

    if isinstance(dyn, BestResponseModel):
        if not isinstance(model, LinearFitness):
            raise ConfigFieldError(
                "best response dynamics require a linear game",
                [("dynamics", "family"), ("game", "type")],
            )
        return BestResponse(model=model)

    if isinstance(dyn, BNNModel):
        if not isinstance(model, LinearFitness):
            raise ConfigFieldError(
                "excess-payoff dynamics require a linear game",
                [("dynamics", "family"), ("game", "type")],
            )
        return BNN(matrix=model.matrix, epsilon=dyn.epsilon)

    if isinstance(dyn, SelectorWeightedModel):
        if dyn.h.kind == "logistic_derivative" and dyn.h.k is None:
            raise ConfigFieldError("logistic_derivative selector requires k", [("dynamics", "h", "k")])
        try:
            selector = make_selector(dyn.h.kind, k=dyn.h.k if dyn.h.k is not None else 1.0)
        except ParameterError as exc:
            raise ConfigFieldError(str(exc), [("dynamics", "h", "k")]) from exc
        gbar = _build_gbar(dyn.gbar, model)
        try:
            return SelectorWeighted(model=model, selector=selector, lam=dyn.lam, gbar=gbar)
        except ParameterError as exc:
            raise ConfigFieldError(str(exc), [("dynamics", "gbar", "kind"), ("game", "type")]) from exc

    if isinstance(dyn, DiscreteReplicatorModel):
        return DiscreteReplicator(model=model, lam=dyn.lam, max_iters=dyn.max_iters)

    raise ConfigFieldError("unrecognised dynamics block", [("dynamics",)])


def _build_gbar(gbar: GbarModel, model: FitnessModel):
    if gbar.kind == "mean_shifted":
        return MeanShiftedFitness()
    if gbar.kind == "sum_exp":
        if gbar.eta is None:
            raise ConfigFieldError("sum_exp rate requires eta", [("dynamics", "gbar", "eta")])
        if gbar.eta <= 0:
            raise ConfigFieldError("sum_exp eta must be positive", [("dynamics", "gbar", "eta")])
        return SumExp(eta=gbar.eta)
    if gbar.kind == "sum_excess":
        if not isinstance(model, LinearFitness):
            raise ConfigFieldError(
                "sum_excess rate requires a linear game",
                [("dynamics", "gbar", "kind"), ("game", "type")],
            )
        if gbar.epsilon < 0:
            raise ConfigFieldError("sum_excess epsilon must be nonnegative", [("dynamics", "gbar", "epsilon")])
        return SumExcess(epsilon=gbar.epsilon)
    if gbar.kind == "constant":
        if gbar.value is None or gbar.value <= 0:
            raise ConfigFieldError("constant rate requires a positive value", [("dynamics", "gbar", "value")])
        return ConstantRate(value=gbar.value)
    raise ConfigFieldError("unrecognised gbar block", [("dynamics", "gbar")])


def build_initial_point(initial: Optional[InitialModel], n: int, fallback_seed: int = 0) -> SimplexPoint:
    if initial is None or isinstance(initial, UniformInitial):
        return uniform_point(n)
    if isinstance(initial, RandomInitial):
        seed = initial.random.seed if initial.random.seed is not None else fallback_seed
        return sample_uniform(n, seed)
    vec = np.asarray(initial, dtype=float)
    if vec.size != n:
        raise ConfigFieldError(
            f"initial has {vec.size} entries but the game has {n} strategies",
            [("initial",), ("game",)],
        )
    try:
        return make_simplex_point(vec)
    except Exception as exc:
        raise ConfigFieldError(f"initial is not a probability vector: {exc}", [("initial",)]) from exc


def build_integrator_config(model: IntegratorModel) -> IntegratorConfig:
    try:
        return IntegratorConfig(
            dt=model.dt,
            t_max=model.t_max,
            record_every=model.record_every,
            conv_tol=model.conv_tol,
            conv_window=model.conv_window,
            positivity_guard=model.positivity_guard,
        )
    except ParameterError as exc:
        raise ConfigFieldError(str(exc), [("integrator",)]) from exc
