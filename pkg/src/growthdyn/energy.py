"""Energy landscapes: cost functions, numerical gradients, curvature classes.

Each dynamics family minimises (in the engine's multiplicative sense) a
cost H over the simplex, and the engine fitness is recovered from H by
coordinatewise differentiation: f_i = -dH/dp_i, with any linear shift
-lam * sum_i p_i folded into H itself.

Two gradient conventions coexist and both are implemented:

* Costs defined coordinate-by-coordinate as integrals, H = sum_i T_i with
  T_i depending on p_i only through its own integral limit, are
  differentiated summand-wise: dH/dp_i means dT_i/dp_i. This is the
  fundamental-theorem reading under which the integral costs reproduce
  their families' fitnesses; differentiating the frozen coordinates of
  the other summands as well would re-introduce cross terms that no
  single-valued potential can represent (e.g. no function has gradient
  -Ap for an antisymmetric A).
* All other costs (the quadratic payoff form and the logarithmic mutation
  forms) are plain scalar functions and get honest central differences.
  For the mutation forms the difference between -grad H and the engine
  fitness is exactly the log-weighted cross term reported (not zeroed)
  by ``gradient_residual_report``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.integrate import quad

from .dynamics import (
    BNN,
    BestResponse,
    DiscreteReplicator,
    Logit,
    Quasispecies,
    Replicator,
    ReplicatorMutator,
    SelectorWeighted,
    bnn_excess,
    instantiate_engine,
)
from .errors import (
    DimensionError,
    DomainError,
    ParameterError,
    QuadratureError,
    UnsupportedFamilyError,
)
from .games import (
    ConstantFitness,
    LinearFitness,
    MutationMatrix,
    fitness_jacobian,
    payoff_matrix,
    selector_eval,
)
from .simplex import as_point_array

__all__ = [
    "QuadraticPayoff",
    "ReplicatorIntegral",
    "QuasispeciesLog",
    "MutatorLog",
    "LogitIntegral",
    "BnnIntegral",
    "evaluate_H",
    "numerical_gradient",
    "GradientResidualReport",
    "gradient_residual_report",
    "tangent_basis",
    "curvature_class",
    "CURVATURE_FLAT",
    "CURVATURE_STRICTLY_CONVEX",
    "CURVATURE_CONVEX",
    "CURVATURE_STRICTLY_CONCAVE",
    "CURVATURE_CONCAVE",
    "CURVATURE_INDEFINITE",
    "DEFAULT_GRADIENT_STEP",
    "REPLICATOR_RESIDUAL_BOUND",
    "SMOOTHED_RESIDUAL_BOUND",
    "MUTATION_AGREEMENT_TOL",
    "CURVATURE_TOL",
]

DEFAULT_GRADIENT_STEP = 1e-6
_MIN_STEP, _MAX_STEP = 1e-8, 1e-4
_QUAD_ABS_TOL = 1e-10

# gradcheck pass bounds per family group
REPLICATOR_RESIDUAL_BOUND = 1e-5
SMOOTHED_RESIDUAL_BOUND = 1e-4
MUTATION_AGREEMENT_TOL = 1e-5

CURVATURE_TOL = 1e-10
CURVATURE_FLAT = "flat"
CURVATURE_STRICTLY_CONVEX = "strictly_convex"
CURVATURE_CONVEX = "convex"
CURVATURE_STRICTLY_CONCAVE = "strictly_concave"
CURVATURE_CONCAVE = "concave"
CURVATURE_INDEFINITE = "indefinite"


# ── Cost functions ──────────────────────────────────────────────────────────


@dataclass(frozen=True)
class QuadraticPayoff:
    """H(p) = -p'Ap - lam * sum_i p_i."""

    matrix: np.ndarray
    lam: float = 0.0

    def __post_init__(self):
        arr = payoff_matrix(self.matrix)
        arr.setflags(write=False)
        object.__setattr__(self, "matrix", arr)
        object.__setattr__(self, "lam", float(self.lam))

    @property
    def n(self) -> int:
        return self.matrix.shape[0]


@dataclass(frozen=True)
class ReplicatorIntegral:
    """H(p) = -sum_i int_c^{p_i} f_i(z) dz_i - lam * sum_i p_i.

    In the i-th integrand z equals p with coordinate i replaced by the
    integration dummy; the summand T_i depends on p_i only through its
    upper limit.
    """

    model: object
    lam: float = 0.0
    c: float = 0.5

    def __post_init__(self):
        object.__setattr__(self, "lam", float(self.lam))
        object.__setattr__(self, "c", float(self.c))
        if not 0.0 < self.c < 1.0:
            raise ParameterError(f"reference point c must lie in (0, 1), got {self.c!r}")

    @property
    def n(self) -> int:
        return self.model.n


@dataclass(frozen=True)
class QuasispeciesLog:
    """H(p) = -sum_i log(p_i) sum_j p_j f_j m_ji - lam * sum_i p_i, constant f."""

    values: np.ndarray
    mutation: MutationMatrix
    lam: float = 0.0

    def __post_init__(self):
        model = ConstantFitness(self.values)
        if model.n != self.mutation.n:
            raise DimensionError(
                f"fitness length {model.n} does not match mutation size {self.mutation.n}"
            )
        object.__setattr__(self, "values", model.values)
        object.__setattr__(self, "lam", float(self.lam))

    @property
    def n(self) -> int:
        return self.values.shape[0]


@dataclass(frozen=True)
class MutatorLog:
    """The logarithmic mutation cost with state-dependent fitness f(p)."""

    model: object
    mutation: MutationMatrix
    lam: float = 0.0

    def __post_init__(self):
        if self.model.n != self.mutation.n:
            raise DimensionError(
                f"model size {self.model.n} does not match mutation size {self.mutation.n}"
            )
        object.__setattr__(self, "lam", float(self.lam))

    @property
    def n(self) -> int:
        return self.model.n


@dataclass(frozen=True)
class LogitIntegral:
    """H(p) = -sum_i int_c^{p_i} (1/z_i) exp(f_i(z)/eta) dz_i."""

    model: object
    eta: float = 1.0
    c: float = 0.5

    def __post_init__(self):
        if not self.eta > 0:
            raise ParameterError(f"eta must be positive, got {self.eta!r}")
        object.__setattr__(self, "eta", float(self.eta))
        object.__setattr__(self, "c", float(self.c))
        if not 0.0 < self.c < 1.0:
            raise ParameterError(f"reference point c must lie in (0, 1), got {self.c!r}")

    @property
    def n(self) -> int:
        return self.model.n


@dataclass(frozen=True)
class BnnIntegral:
    """H(p) = -sum_i int_c^{p_i} (1/z_i) k_i(z) dz_i with clipped excesses k."""

    matrix: np.ndarray
    epsilon: float = 0.0
    c: float = 0.5

    def __post_init__(self):
        arr = payoff_matrix(self.matrix)
        if not self.epsilon >= 0.0:
            raise ParameterError(f"epsilon must be >= 0, got {self.epsilon!r}")
        arr.setflags(write=False)
        object.__setattr__(self, "matrix", arr)
        object.__setattr__(self, "epsilon", float(self.epsilon))
        object.__setattr__(self, "c", float(self.c))
        if not 0.0 < self.c < 1.0:
            raise ParameterError(f"reference point c must lie in (0, 1), got {self.c!r}")

    @property
    def n(self) -> int:
        return self.matrix.shape[0]


CostFunction = (
    QuadraticPayoff | ReplicatorIntegral | QuasispeciesLog | MutatorLog | LogitIntegral | BnnIntegral
)

_INTERIOR_ONLY = (ReplicatorIntegral, QuasispeciesLog, MutatorLog, LogitIntegral, BnnIntegral)
_SUMMAND_FORM = (ReplicatorIntegral, LogitIntegral, BnnIntegral)


# ── Evaluation ──────────────────────────────────────────────────────────────


def _require_interior(h, x: np.ndarray):
    if isinstance(h, _INTERIOR_ONLY) and np.any(x <= 0.0):
        raise DomainError(f"{type(h).__name__} requires a strictly interior point")


def _quad_checked(fn, lo: float, hi: float, points=None) -> float:
    if lo == hi:
        return 0.0
    val, err = quad(fn, lo, hi, epsabs=1e-12, epsrel=1e-12, limit=200, points=points)
    if err > max(_QUAD_ABS_TOL, 1e-10 * abs(val)):
        raise QuadratureError(f"quadrature error estimate {err:.3g} exceeds tolerance")
    return val


def _integrand(h, i: int, x: np.ndarray):
    """The i-th coordinate integrand t -> g_i(p with p_i := t)."""
    if isinstance(h, ReplicatorIntegral):
        model = h.model

        def g(t, x=x, i=i, model=model):
            z = x.copy()
            z[i] = t
            return model.fitness(z)[i]

        return g
    if isinstance(h, LogitIntegral):
        model, eta = h.model, h.eta

        def g(t, x=x, i=i, model=model, eta=eta):
            z = x.copy()
            z[i] = t
            return np.exp(model.fitness(z)[i] / eta) / t

        return g
    if isinstance(h, BnnIntegral):
        a, eps = h.matrix, h.epsilon

        def g(t, x=x, i=i, a=a, eps=eps):
            z = x.copy()
            z[i] = t
            return bnn_excess(a, eps, z)[i] / t

        return g
    raise UnsupportedFamilyError(f"{type(h).__name__} has no coordinate integrand")


def _excess_poly_coeffs(a: np.ndarray, eps: float, i: int, x: np.ndarray):
    """Coefficients (c0, c1, c2) of the excess e_i as a polynomial in z_i."""
    mask = np.ones(len(x), dtype=bool)
    mask[i] = False
    xo = np.where(mask, x, 0.0)
    s_i = float(a[i] @ xo)
    c2 = -float(a[i, i])
    c1 = float(a[i, i]) - float((a[i] + a[:, i]) @ xo)
    c0 = s_i - float(xo @ (a @ xo)) + eps
    return c0, c1, c2


def _kink_points(h: BnnIntegral, i: int, x: np.ndarray, lo: float, hi: float) -> list[float]:
    """Sign changes of the excess on [lo, hi], located by bisection."""
    c0, c1, c2 = _excess_poly_coeffs(h.matrix, h.epsilon, i, x)

    def e(t):
        return c0 + c1 * t + c2 * t * t

    grid = np.linspace(lo, hi, 65)
    vals = e(grid)
    roots = []
    for a_, b_, fa, fb in zip(grid[:-1], grid[1:], vals[:-1], vals[1:]):
        if fa == 0.0:
            roots.append(float(a_))
            continue
        if fa * fb < 0.0:
            left, right = float(a_), float(b_)
            for _ in range(80):
                mid = 0.5 * (left + right)
                if e(left) * e(mid) <= 0.0:
                    right = mid
                else:
                    left = mid
                if right - left < 1e-15:
                    break
            roots.append(0.5 * (left + right))
    if vals[-1] == 0.0:
        roots.append(float(grid[-1]))
    return sorted(set(r for r in roots if lo < r < hi))


def _summand_integral(h, i: int, lo: float, hi: float, x: np.ndarray) -> float:
    """int_lo^hi of the i-th integrand, split at excess kinks for the BNN cost."""
    sign = 1.0
    if hi < lo:
        lo, hi, sign = hi, lo, -1.0
    g = _integrand(h, i, x)
    if isinstance(h, BnnIntegral):
        cuts = [lo] + _kink_points(h, i, x, lo, hi) + [hi]
        total = sum(_quad_checked(g, a_, b_) for a_, b_ in zip(cuts[:-1], cuts[1:]))
        return sign * total
    return sign * _quad_checked(g, lo, hi)


def _summand_value(h, i: int, t: float, x: np.ndarray, force_quadrature: bool = False) -> float:
    """T_i(t): the i-th summand of a summand-form cost, other coordinates at x."""
    if isinstance(h, ReplicatorIntegral):
        linear_part = -h.lam * t
        if not force_quadrature and isinstance(h.model, LinearFitness):
            a = h.model.matrix
            s_i = float(a[i] @ x) - float(a[i, i] * x[i])
            aii = float(a[i, i])
            return -(s_i * (t - h.c) + 0.5 * aii * (t * t - h.c * h.c)) + linear_part
        if not force_quadrature and isinstance(h.model, ConstantFitness):
            return -float(h.model.values[i]) * (t - h.c) + linear_part
        return -_summand_integral(h, i, h.c, t, x) + linear_part
    if isinstance(h, (LogitIntegral, BnnIntegral)):
        return -_summand_integral(h, i, h.c, t, x)
    raise UnsupportedFamilyError(f"{type(h).__name__} is not in summand form")


def evaluate_H(h, p, force_quadrature: bool = False) -> float:
    """Value of a cost function at a point.

    ``force_quadrature`` bypasses closed forms so the two paths can be
    cross-checked; it only affects costs that have a closed form.
    """
    x = as_point_array(p, h.n)
    _require_interior(h, x)
    if isinstance(h, QuadraticPayoff):
        return float(-(x @ (h.matrix @ x)) - h.lam * x.sum())
    if isinstance(h, QuasispeciesLog):
        inflow = (x * h.values) @ h.mutation.m
        return float(-(np.log(x) @ inflow) - h.lam * x.sum())
    if isinstance(h, MutatorLog):
        inflow = (x * h.model.fitness(x)) @ h.mutation.m
        return float(-(np.log(x) @ inflow) - h.lam * x.sum())
    if isinstance(h, _SUMMAND_FORM):
        return float(sum(_summand_value(h, i, x[i], x, force_quadrature) for i in range(h.n)))
    raise UnsupportedFamilyError(f"cannot evaluate {type(h).__name__}")


# ── Gradients ───────────────────────────────────────────────────────────────


def numerical_gradient(h, p, step: float = DEFAULT_GRADIENT_STEP) -> np.ndarray:
    """Central-difference gradient of a cost, per raw coordinate.

    Summand-form costs are differenced through their own summand only (the
    fundamental-theorem convention described in the module docstring); the
    integral difference T_i(p_i + s) - T_i(p_i - s) is evaluated as a
    single short integral so quadrature error does not swamp the quotient.
    Scalar-form costs get honest full central differences.
    """
    if not _MIN_STEP <= step <= _MAX_STEP:
        raise ParameterError(f"step must lie in [{_MIN_STEP}, {_MAX_STEP}], got {step!r}")
    x = as_point_array(p, h.n)
    _require_interior(h, x)
    if isinstance(h, _INTERIOR_ONLY) and np.any(x - step <= 0.0):
        raise DomainError("point is closer to the boundary than the differencing step")
    grad = np.empty(h.n)
    if isinstance(h, _SUMMAND_FORM):
        for i in range(h.n):
            if isinstance(h, ReplicatorIntegral) and isinstance(h.model, (LinearFitness, ConstantFitness)):
                hi = _summand_value(h, i, x[i] + step, x)
                lo = _summand_value(h, i, x[i] - step, x)
                grad[i] = (hi - lo) / (2.0 * step)
            else:
                window = _summand_integral(h, i, x[i] - step, x[i] + step, x)
                lam = h.lam if isinstance(h, ReplicatorIntegral) else 0.0
                grad[i] = -window / (2.0 * step) - lam
        return grad
    for i in range(h.n):
        zp = x.copy()
        zm = x.copy()
        zp[i] += step
        zm[i] -= step
        grad[i] = (evaluate_H(h, zp) - evaluate_H(h, zm)) / (2.0 * step)
    return grad


# ── Engine-fitness residuals ────────────────────────────────────────────────


@dataclass(frozen=True)
class GradientResidualReport:
    """Comparison of -grad H against the engine fitness for one family."""

    family: str
    residual: float
    bound: float
    passed: bool
    predicted_extra: float | None = None
    prediction_agrees: bool | None = None

    def as_dict(self) -> dict:
        return {
            "family": self.family,
            "residual": self.residual,
            "bound": self.bound,
            "passed": self.passed,
            "predicted_extra": self.predicted_extra,
            "prediction_agrees": self.prediction_agrees,
        }


def _mutation_cross_term(model, mutation: MutationMatrix, x: np.ndarray) -> np.ndarray:
    """Analytic cross term sum_k log(p_k) d/dp_i [sum_j p_j f_j(p) m_jk]."""
    f = model.fitness(x)
    jac = fitness_jacobian(model, x)
    logs = np.log(x)
    m = mutation.m
    # d S_k / d p_i = f_i m_ik + sum_j p_j J[j, i] m_jk
    ds = f[:, None] * m + (m.T @ (x[:, None] * jac)).T
    return ds @ logs


def gradient_residual_report(spec, p, step: float = DEFAULT_GRADIENT_STEP) -> GradientResidualReport:
    """Residual between the cost-derived fitness -grad H and the engine fitness.

    For the selection families the residual is a consistency check and
    should sit at differencing noise. For the mutation families the log
    cost's honest gradient carries an extra log-weighted term; the report
    computes it analytically and records how closely the measured residual
    matches it.
    """
    x = as_point_array(p, spec.n)
    if np.any(x <= 0.0):
        raise DomainError("gradient residuals are defined at interior points only")
    engine = instantiate_engine(spec)
    gt = np.asarray(engine.gt_fitness(x), dtype=float)

    if isinstance(spec, Replicator):
        h = ReplicatorIntegral(spec.model, spec.lam)
        resid = float(np.max(np.abs(-numerical_gradient(h, x, step) - gt)))
        return GradientResidualReport(spec.family, resid, REPLICATOR_RESIDUAL_BOUND,
                                      resid <= REPLICATOR_RESIDUAL_BOUND)
    if isinstance(spec, SelectorWeighted):
        h = ReplicatorIntegral(spec.model, spec.lam)
        weights = selector_eval(spec.selector, x)
        recovered = weights * (-numerical_gradient(h, x, step))
        resid = float(np.max(np.abs(recovered - gt)))
        return GradientResidualReport(spec.family, resid, REPLICATOR_RESIDUAL_BOUND,
                                      resid <= REPLICATOR_RESIDUAL_BOUND)
    if isinstance(spec, (Quasispecies, ReplicatorMutator)):
        if isinstance(spec, Quasispecies):
            model = ConstantFitness(spec.values)
            h = QuasispeciesLog(spec.values, spec.mutation, spec.lam)
        else:
            model = spec.model
            h = MutatorLog(spec.model, spec.mutation, spec.lam)
        diff = -numerical_gradient(h, x, step) - gt
        resid = float(np.max(np.abs(diff)))
        predicted = float(np.max(np.abs(_mutation_cross_term(model, spec.mutation, x))))
        agrees = abs(resid - predicted) <= MUTATION_AGREEMENT_TOL
        return GradientResidualReport(spec.family, resid, MUTATION_AGREEMENT_TOL, agrees,
                                      predicted_extra=predicted, prediction_agrees=agrees)
    if isinstance(spec, Logit):
        h = LogitIntegral(spec.model, spec.eta)
        resid = float(np.max(np.abs(-numerical_gradient(h, x, step) - gt)))
        return GradientResidualReport(spec.family, resid, SMOOTHED_RESIDUAL_BOUND,
                                      resid <= SMOOTHED_RESIDUAL_BOUND)
    if isinstance(spec, BNN):
        h = BnnIntegral(spec.matrix, spec.epsilon)
        resid = float(np.max(np.abs(-numerical_gradient(h, x, step) - gt)))
        return GradientResidualReport(spec.family, resid, SMOOTHED_RESIDUAL_BOUND,
                                      resid <= SMOOTHED_RESIDUAL_BOUND)
    if isinstance(spec, (BestResponse, DiscreteReplicator)):
        raise UnsupportedFamilyError(f"no cost-gradient check for the {spec.family} family")
    raise UnsupportedFamilyError(f"no cost-gradient check for {type(spec).__name__}")


# ── Curvature on the tangent space ──────────────────────────────────────────


def tangent_basis(n: int) -> np.ndarray:
    """Orthonormal basis (columns) of the simplex tangent space {x : sum x = 0}.

    Helmert construction: column k is (1, ..., 1, -k, 0, ..., 0) scaled to
    unit norm, which is exact and deterministic.
    """
    if n < 2:
        raise DimensionError(f"need n >= 2, got {n}")
    b = np.zeros((n, n - 1))
    for k in range(1, n):
        b[:k, k - 1] = 1.0
        b[k, k - 1] = -float(k)
        b[:, k - 1] /= np.sqrt(k * (k + 1.0))
    return b


def curvature_class(a, lam: float = 0.0, tol: float = CURVATURE_TOL):
    """Classify H(p) = -p'Ap - lam sum p on the simplex tangent space.

    Returns (label, eigenvalues) where the eigenvalues are those of the
    Hessian -(A + A') restricted to {x : sum x = 0}; the linear shift does
    not enter. The label is one of the CURVATURE_* constants; adding any
    multiple of the all-ones matrix to A leaves the result unchanged.
    """
    mat = payoff_matrix(a)
    hess = -(mat + mat.T)
    b = tangent_basis(mat.shape[0])
    eigs = np.sort(np.linalg.eigvalsh(b.T @ hess @ b))
    if np.all(np.abs(eigs) <= tol):
        label = CURVATURE_FLAT
    elif np.all(eigs > tol):
        label = CURVATURE_STRICTLY_CONVEX
    elif np.all(eigs < -tol):
        label = CURVATURE_STRICTLY_CONCAVE
    elif np.all(eigs >= -tol):
        label = CURVATURE_CONVEX
    elif np.all(eigs <= tol):
        label = CURVATURE_CONCAVE
    else:
        label = CURVATURE_INDEFINITE
    return label, eigs
