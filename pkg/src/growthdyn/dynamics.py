"""Evolutionary dynamics: named vector fields and the growth-transform engine.

The engine evolves a simplex point by the multiplicative update

    dp_i/dt = p_i * [ (f_i(p) / fbar(p)) * gbar(p) - gbar(p) ],

where f is a strictly positive engine fitness, fbar = sum_i p_i f_i is its
population mean and gbar > 0 sets the local time scale. Each named family
(replicator, quasispecies, replicator-mutator, logit, Brown-von
Neumann-Nash, selector-weighted) is either an exact instance of this
engine or, for logit, positively collinear with one; ``instantiate_engine``
produces the engine parameters realising each family.

Multiplying by p_i cancels the 1/p_i factors that appear in the mutation
and exponential families, so engine fields are evaluated in the cancelled
product form w_i = p_i f_i. This keeps boundary faces exact: w_i is
computed directly, never as 0 * inf.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .errors import (
    DegenerateError,
    DimensionError,
    ParameterError,
    PositivityError,
    UnsupportedFamilyError,
)
from .games import (
    ConstantFitness,
    IdentitySelector,
    LinearFitness,
    MutationMatrix,
    payoff_matrix,
    selector_eval,
)
from .simplex import as_point_array

__all__ = [
    "BEST_RESPONSE_TIE_TOL",
    "MIN_LOGIT_ETA",
    "MeanShiftedFitness",
    "SumExp",
    "SumExcess",
    "ConstantRate",
    "Replicator",
    "Quasispecies",
    "ReplicatorMutator",
    "Logit",
    "BestResponse",
    "BNN",
    "SelectorWeighted",
    "DiscreteReplicator",
    "GrowthTransformField",
    "field_from_fitness",
    "growth_transform_velocity",
    "replicator_velocity",
    "quasispecies_velocity",
    "replicator_mutator_velocity",
    "logit_velocity",
    "best_response_velocity",
    "bnn_excess",
    "bnn_velocity",
    "selector_weighted_velocity",
    "instantiate_engine",
    "velocity_function",
    "velocity",
]

# argmax ties closer than this are split uniformly
BEST_RESPONSE_TIE_TOL = 1e-9
# below this temperature the smoothed field is numerically a best response
MIN_LOGIT_ETA = 1e-12


# ── Time-scale specifications ───────────────────────────────────────────────


@dataclass(frozen=True)
class MeanShiftedFitness:
    """gbar(p) = sum_i p_i (f_i(p) + lam), the shifted mean fitness."""


@dataclass(frozen=True)
class SumExp:
    """gbar(p) = sum_i exp(f_i(p) / eta)."""

    eta: float

    def __post_init__(self):
        if not self.eta >= MIN_LOGIT_ETA:
            raise ParameterError(f"eta must be >= {MIN_LOGIT_ETA}, got {self.eta!r}")
        object.__setattr__(self, "eta", float(self.eta))


@dataclass(frozen=True)
class SumExcess:
    """gbar(p) = sum_i k_i(p), the total positive payoff excess."""

    epsilon: float = 0.0

    def __post_init__(self):
        if not self.epsilon >= 0.0:
            raise ParameterError(f"epsilon must be >= 0, got {self.epsilon!r}")
        object.__setattr__(self, "epsilon", float(self.epsilon))


@dataclass(frozen=True)
class ConstantRate:
    """gbar(p) = value, a fixed positive rate."""

    value: float

    def __post_init__(self):
        if not self.value > 0.0:
            raise ParameterError(f"gbar value must be positive, got {self.value!r}")
        object.__setattr__(self, "value", float(self.value))


GbarSpec = MeanShiftedFitness | SumExp | SumExcess | ConstantRate


# ── Family specifications ───────────────────────────────────────────────────


def _check_lambda(lam: float) -> float:
    if not np.isfinite(lam) or lam < 0.0:
        raise ParameterError(f"lambda must be finite and >= 0, got {lam!r}")
    return float(lam)


@dataclass(frozen=True)
class Replicator:
    """Selection proportional to relative fitness; lam shifts the engine fitness."""

    model: object
    lam: float = 0.0
    family = "replicator"

    def __post_init__(self):
        object.__setattr__(self, "lam", _check_lambda(self.lam))

    @property
    def n(self) -> int:
        return self.model.n

    def diagnostic_model(self):
        return self.model


@dataclass(frozen=True)
class Quasispecies:
    """Constant-fitness selection with symmetric doubly stochastic mutation."""

    values: np.ndarray
    mutation: MutationMatrix
    lam: float = 0.0
    family = "quasispecies"

    def __post_init__(self):
        model = ConstantFitness(self.values)
        if model.n != self.mutation.n:
            raise DimensionError(
                f"fitness length {model.n} does not match mutation size {self.mutation.n}"
            )
        object.__setattr__(self, "values", model.values)
        object.__setattr__(self, "lam", _check_lambda(self.lam))

    @property
    def n(self) -> int:
        return self.values.shape[0]

    def diagnostic_model(self):
        return ConstantFitness(self.values)


@dataclass(frozen=True)
class ReplicatorMutator:
    """State-dependent selection combined with mutation."""

    model: object
    mutation: MutationMatrix
    lam: float = 0.0
    family = "replicator_mutator"

    def __post_init__(self):
        if self.model.n != self.mutation.n:
            raise DimensionError(
                f"model size {self.model.n} does not match mutation size {self.mutation.n}"
            )
        object.__setattr__(self, "lam", _check_lambda(self.lam))

    @property
    def n(self) -> int:
        return self.model.n

    def diagnostic_model(self):
        return self.model


@dataclass(frozen=True)
class Logit:
    """Smoothed best response with temperature eta > 0."""

    model: object
    eta: float = 1.0
    family = "logit"

    def __post_init__(self):
        if not np.isfinite(self.eta) or self.eta < MIN_LOGIT_ETA:
            raise ParameterError(
                f"eta must be >= {MIN_LOGIT_ETA} (use BestResponse for the eta -> 0 limit), got {self.eta!r}"
            )
        object.__setattr__(self, "eta", float(self.eta))

    @property
    def n(self) -> int:
        return self.model.n

    def diagnostic_model(self):
        return self.model


@dataclass(frozen=True)
class BestResponse:
    """Discontinuous limit of logit: jump straight towards the argmax face."""

    model: object
    family = "best_response"

    @property
    def n(self) -> int:
        return self.model.n

    def diagnostic_model(self):
        return self.model


@dataclass(frozen=True)
class BNN:
    """Brown-von Neumann-Nash dynamics driven by positive payoff excesses."""

    matrix: np.ndarray
    epsilon: float = 0.0
    family = "bnn"

    def __post_init__(self):
        arr = payoff_matrix(self.matrix)
        if not self.epsilon >= 0.0:
            raise ParameterError(f"epsilon must be >= 0, got {self.epsilon!r}")
        arr.setflags(write=False)
        object.__setattr__(self, "matrix", arr)
        object.__setattr__(self, "epsilon", float(self.epsilon))

    @property
    def n(self) -> int:
        return self.matrix.shape[0]

    def diagnostic_model(self):
        return LinearFitness(self.matrix)


@dataclass(frozen=True)
class SelectorWeighted:
    """Replicator-like flow with share-dependent selector weights h(p_i)."""

    model: object
    selector: object
    lam: float = 0.0
    gbar: GbarSpec = field(default_factory=MeanShiftedFitness)
    family = "selector_weighted"

    def __post_init__(self):
        object.__setattr__(self, "lam", _check_lambda(self.lam))
        if isinstance(self.gbar, SumExcess) and not isinstance(self.model, LinearFitness):
            raise ParameterError("SumExcess time scale needs a linear payoff model")

    @property
    def n(self) -> int:
        return self.model.n

    def diagnostic_model(self):
        return self.model


@dataclass(frozen=True)
class DiscreteReplicator:
    """Discrete-time multiplicative map p_i' = p_i (f_i + lam) / sum_j p_j (f_j + lam)."""

    model: object
    lam: float = 0.0
    max_iters: int = 10000
    family = "discrete"

    def __post_init__(self):
        object.__setattr__(self, "lam", _check_lambda(self.lam))
        if self.max_iters < 1:
            raise ParameterError(f"max_iters must be >= 1, got {self.max_iters!r}")

    @property
    def n(self) -> int:
        return self.model.n

    def diagnostic_model(self):
        return self.model


DynamicsSpec = (
    Replicator
    | Quasispecies
    | ReplicatorMutator
    | Logit
    | BestResponse
    | BNN
    | SelectorWeighted
    | DiscreteReplicator
)


# ── The growth-transform engine ─────────────────────────────────────────────


@dataclass(frozen=True)
class GrowthTransformField:
    """Engine parameters: fitness f (as the product w_i = p_i f_i), time scale gbar.

    ``gbar_value`` of None means gbar coincides with the engine mean fbar =
    sum_i w_i, which holds for every catalogue family and lets the velocity
    reuse the same float. ``allow_zero_fitness`` relaxes strict positivity
    to nonnegativity (needed by BNN, whose excesses vanish at equilibrium).
    """

    n: int
    weighted_fitness: Callable[[np.ndarray], np.ndarray]
    gt_fitness: Callable[[np.ndarray], np.ndarray]
    gbar: GbarSpec
    gbar_value: Callable[[np.ndarray], float] | None = None
    allow_zero_fitness: bool = False
    family: str = "custom"


def field_from_fitness(n: int, gt_fitness, gbar: GbarSpec, gbar_value=None,
                       allow_zero_fitness: bool = False) -> GrowthTransformField:
    """Wrap a plain fitness map p -> f(p) as an engine field."""
    return GrowthTransformField(
        n=n,
        weighted_fitness=lambda p: p * np.asarray(gt_fitness(p), dtype=float),
        gt_fitness=gt_fitness,
        gbar=gbar,
        gbar_value=gbar_value,
        allow_zero_fitness=allow_zero_fitness,
    )


def growth_transform_velocity(field: GrowthTransformField, p) -> np.ndarray:
    """Engine velocity gbar * (w / fbar - p) with w_i = p_i f_i, fbar = sum w.

    Raises PositivityError when the engine fitness is not strictly positive
    on the support (nonnegative for fields that allow zero components) and
    DegenerateError when fbar or gbar is not positive.
    """
    x = as_point_array(p, field.n)
    w = np.asarray(field.weighted_fitness(x), dtype=float)
    if w.shape != x.shape:
        raise DimensionError(f"weighted fitness shape {w.shape} does not match point shape {x.shape}")
    if np.any(w < 0.0):
        raise PositivityError("engine fitness is negative at a supported strategy")
    if not field.allow_zero_fitness and np.any(w[x > 0.0] <= 0.0):
        raise PositivityError("engine fitness must be strictly positive on the support")
    fbar = float(w.sum())
    if fbar <= 0.0:
        if field.allow_zero_fitness and fbar == 0.0:
            # every excess is zero: the flow is stationary here
            return np.zeros_like(x)
        raise DegenerateError(f"mean engine fitness must be positive, got {fbar!r}")
    g = fbar if field.gbar_value is None else float(field.gbar_value(x))
    if g <= 0.0:
        raise DegenerateError(f"gbar must be positive, got {g!r}")
    return (g / fbar) * w - g * x


# ── Named family fields ─────────────────────────────────────────────────────


def replicator_velocity(model, p) -> np.ndarray:
    """dp_i/dt = p_i (f_i(p) - fbar(p))."""
    x = as_point_array(p, model.n)
    f = model.fitness(x)
    return x * (f - x @ f)


def quasispecies_velocity(values, mutation: MutationMatrix, p) -> np.ndarray:
    """dp_i/dt = sum_j p_j f_j m_ji - p_i fbar for constant nonnegative f."""
    fvec = ConstantFitness(values).values
    if fvec.shape[0] != mutation.n:
        raise DimensionError(f"fitness length {fvec.shape[0]} does not match mutation size {mutation.n}")
    x = as_point_array(p, mutation.n)
    w = x * fvec
    return w @ mutation.m - x * w.sum()


def replicator_mutator_velocity(model, mutation: MutationMatrix, p) -> np.ndarray:
    """dp_i/dt = sum_j p_j f_j(p) m_ji - p_i fbar(p)."""
    if model.n != mutation.n:
        raise DimensionError(f"model size {model.n} does not match mutation size {mutation.n}")
    x = as_point_array(p, model.n)
    w = x * model.fitness(x)
    return w @ mutation.m - x * w.sum()


def logit_velocity(model, eta: float, p) -> np.ndarray:
    """dp_i/dt = softmax(f(p)/eta)_i - p_i, evaluated with max subtraction."""
    if not np.isfinite(eta) or eta < MIN_LOGIT_ETA:
        raise ParameterError(
            f"eta must be >= {MIN_LOGIT_ETA} (use best_response_velocity for the limit), got {eta!r}"
        )
    x = as_point_array(p, model.n)
    f = model.fitness(x)
    e = np.exp((f - f.max()) / eta)
    return e / e.sum() - x


def best_response_velocity(model, p) -> np.ndarray:
    """dp_i/dt = b_i - p_i with b uniform over the argmax of f(p)."""
    x = as_point_array(p, model.n)
    f = model.fitness(x)
    winners = f >= f.max() - BEST_RESPONSE_TIE_TOL
    return winners / winners.sum() - x


def bnn_excess(a: np.ndarray, epsilon: float, x: np.ndarray) -> np.ndarray:
    """Clipped payoff excesses k_i = max(0, (Ax)_i - x'Ax + epsilon)."""
    ax = a @ x
    return np.maximum(0.0, ax - x @ ax + epsilon)


def bnn_velocity(a, epsilon: float, p) -> np.ndarray:
    """dp_i/dt = k_i(p) - p_i sum_j k_j(p)."""
    mat = np.asarray(a, dtype=float)
    if not epsilon >= 0.0:
        raise ParameterError(f"epsilon must be >= 0, got {epsilon!r}")
    x = as_point_array(p, mat.shape[0])
    k = bnn_excess(mat, epsilon, x)
    return k - x * k.sum()


def selector_weighted_velocity(model, selector, lam: float, gbar: GbarSpec, p) -> np.ndarray:
    """Engine flow with reweighted fitness f'_i = h(p_i) (f_i(p) + lam)."""
    spec = SelectorWeighted(model, selector, lam, gbar)
    return growth_transform_velocity(instantiate_engine(spec), p)


# ── Engine instantiation ────────────────────────────────────────────────────


def instantiate_engine(spec) -> GrowthTransformField:
    """Engine parameters reproducing a named family's field.

    Replicator, quasispecies, replicator-mutator, BNN and selector-weighted
    instances reproduce their fields exactly; the logit instance is
    positively collinear with the logit field, with scale factor
    sum_i exp(f_i/eta). Best response has no growth-transform form.
    """
    if isinstance(spec, Replicator):
        model, lam = spec.model, spec.lam

        def weighted(x, model=model, lam=lam):
            return x * (model.fitness(x) + lam)

        def gt(x, model=model, lam=lam):
            return model.fitness(x) + lam

        return GrowthTransformField(spec.n, weighted, gt, MeanShiftedFitness(),
                                    family=spec.family)

    if isinstance(spec, (Quasispecies, ReplicatorMutator)):
        if isinstance(spec, Quasispecies):
            model = ConstantFitness(spec.values)
        else:
            model = spec.model
        m, lam = spec.mutation.m, spec.lam

        def weighted(x, model=model, m=m, lam=lam):
            # cancelled form of p_i * ((1/p_i) sum_j p_j f_j m_ji + lam)
            return (x * model.fitness(x)) @ m + lam * x

        def gt(x, model=model, m=m, lam=lam):
            return ((x * model.fitness(x)) @ m) / x + lam

        return GrowthTransformField(spec.n, weighted, gt, MeanShiftedFitness(),
                                    family=spec.family)

    if isinstance(spec, Logit):
        model, eta = spec.model, spec.eta

        def weighted(x, model=model, eta=eta):
            # cancelled form of p_i * (1/p_i) exp(f_i/eta); overflows for
            # eta far below the payoff scale, where the unnormalised engine
            # field itself diverges
            return np.exp(model.fitness(x) / eta)

        def gt(x, model=model, eta=eta):
            return np.exp(model.fitness(x) / eta) / x

        return GrowthTransformField(spec.n, weighted, gt, SumExp(eta), family=spec.family)

    if isinstance(spec, BNN):
        a, eps = spec.matrix, spec.epsilon

        def weighted(x, a=a, eps=eps):
            return bnn_excess(a, eps, x)

        def gt(x, a=a, eps=eps):
            return bnn_excess(a, eps, x) / x

        return GrowthTransformField(spec.n, weighted, gt, SumExcess(eps),
                                    allow_zero_fitness=True, family=spec.family)

    if isinstance(spec, SelectorWeighted):
        model, sel, lam = spec.model, spec.selector, spec.lam

        def weighted(x, model=model, sel=sel, lam=lam):
            return x * (selector_eval(sel, x) * (model.fitness(x) + lam))

        def gt(x, model=model, sel=sel, lam=lam):
            return selector_eval(sel, x) * (model.fitness(x) + lam)

        gbar_value = _selector_gbar_value(spec)
        return GrowthTransformField(spec.n, weighted, gt, spec.gbar,
                                    gbar_value=gbar_value, family=spec.family)

    if isinstance(spec, BestResponse):
        raise UnsupportedFamilyError(
            "best response is the eta -> 0 limit of logit and has no growth-transform form"
        )
    raise UnsupportedFamilyError(f"no engine instantiation for {type(spec).__name__}")


def _selector_gbar_value(spec: SelectorWeighted):
    model, lam, gbar = spec.model, spec.lam, spec.gbar
    if isinstance(gbar, MeanShiftedFitness):
        return lambda x: float(np.sum(x * (model.fitness(x) + lam)))
    if isinstance(gbar, SumExp):
        eta = gbar.eta
        return lambda x: float(np.sum(np.exp(model.fitness(x) / eta)))
    if isinstance(gbar, SumExcess):
        a, eps = model.matrix, gbar.epsilon
        return lambda x: float(np.sum(bnn_excess(a, eps, x)))
    if isinstance(gbar, ConstantRate):
        value = gbar.value
        return lambda x: value
    raise ParameterError(f"unknown gbar specification {gbar!r}")


# ── Dispatch ────────────────────────────────────────────────────────────────


def velocity_function(spec) -> Callable[[np.ndarray], np.ndarray]:
    """Raw velocity callable for a family, suitable for tight integrator loops."""
    if isinstance(spec, Replicator):
        model = spec.model

        def v(x, model=model):
            f = model.fitness(x)
            return x * (f - x @ f)

        return v
    if isinstance(spec, Quasispecies):
        fvec, m = ConstantFitness(spec.values).values, spec.mutation.m

        def v(x, fvec=fvec, m=m):
            w = x * fvec
            return w @ m - x * w.sum()

        return v
    if isinstance(spec, ReplicatorMutator):
        model, m = spec.model, spec.mutation.m

        def v(x, model=model, m=m):
            w = x * model.fitness(x)
            return w @ m - x * w.sum()

        return v
    if isinstance(spec, Logit):
        model, eta = spec.model, spec.eta

        def v(x, model=model, eta=eta):
            f = model.fitness(x)
            e = np.exp((f - f.max()) / eta)
            return e / e.sum() - x

        return v
    if isinstance(spec, BestResponse):
        model = spec.model

        def v(x, model=model):
            f = model.fitness(x)
            winners = f >= f.max() - BEST_RESPONSE_TIE_TOL
            return winners / winners.sum() - x

        return v
    if isinstance(spec, BNN):
        a, eps = spec.matrix, spec.epsilon

        def v(x, a=a, eps=eps):
            k = bnn_excess(a, eps, x)
            return k - x * k.sum()

        return v
    if isinstance(spec, SelectorWeighted):
        fld = instantiate_engine(spec)
        return lambda x, fld=fld: growth_transform_velocity(fld, x)
    if isinstance(spec, DiscreteReplicator):
        raise UnsupportedFamilyError("the discrete family is a map, not a flow; use discrete_iterate")
    raise UnsupportedFamilyError(f"no velocity field for {type(spec).__name__}")


def velocity(spec, p) -> np.ndarray:
    """Family velocity at a point."""
    return velocity_function(spec)(as_point_array(p, spec.n))
