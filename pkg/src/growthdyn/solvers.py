"""Time evolution: fixed-step RK4 for the flows, iteration of the discrete map.

The integrator is a classical fourth-order Runge-Kutta scheme with a
positivity guard: a step whose result dips below -1e-12 in any coordinate
is retried as two half steps, recursively, up to depth 40, so a guarded
step still advances exactly dt. Residual roundoff negatives above -1e-12
are clamped to zero (with a renormalisation only when a clamp actually
fired); on the smooth interior paths no clamping happens and the
coordinate sum is left to float freely, which is what the drift
diagnostics measure.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .dynamics import (
    DiscreteReplicator,
    DynamicsSpec,
    Quasispecies,
    Replicator,
    velocity_function,
)
from .energy import QuadraticPayoff, QuasispeciesLog, evaluate_H
from .errors import DomainError, ParameterError, PositivityError, StepFailureError
from .games import LinearFitness
from .simplex import as_point_array

__all__ = [
    "IntegratorConfig",
    "Trajectory",
    "integrate",
    "integrate_velocity",
    "discrete_growth_step",
    "discrete_iterate",
    "POSITIVITY_SLACK",
    "MAX_HALVINGS",
]

POSITIVITY_SLACK = 1e-12
MAX_HALVINGS = 40


@dataclass(frozen=True)
class IntegratorConfig:
    """Fixed-step RK4 settings and the velocity-norm convergence rule."""

    dt: float = 1e-3
    t_max: float = 100.0
    record_every: int = 1
    conv_tol: float = 1e-8
    conv_window: int = 10
    positivity_guard: bool = True

    def __post_init__(self):
        if not self.dt > 0:
            raise ParameterError(f"dt must be positive, got {self.dt!r}")
        if not self.t_max >= self.dt:
            raise ParameterError(f"t_max must be >= dt, got t_max={self.t_max!r}, dt={self.dt!r}")
        if self.record_every < 1:
            raise ParameterError(f"record_every must be >= 1, got {self.record_every!r}")
        if not self.conv_tol > 0:
            raise ParameterError(f"conv_tol must be positive, got {self.conv_tol!r}")
        if self.conv_window < 1:
            raise ParameterError(f"conv_window must be >= 1, got {self.conv_window!r}")


@dataclass
class Trajectory:
    """Recorded samples of one run, with per-sample diagnostics.

    ``states`` holds the raw evolved coordinates (no renormalisation), so
    ``sum_drift`` genuinely measures how far the scheme wandered from the
    simplex. For the discrete map, times are iteration counts.
    """

    times: np.ndarray
    states: np.ndarray
    mean_fitness: np.ndarray
    energy: np.ndarray
    sum_drift: np.ndarray
    min_coordinate: np.ndarray
    converged: bool
    steps: int
    family: str = "custom"

    @property
    def n(self) -> int:
        return self.states.shape[1]

    def final_state(self) -> np.ndarray:
        return np.array(self.states[-1])


def _rk4_tail(v, x, h, k1):
    """Complete an RK4 step from a precomputed first stage."""
    k2 = v(x + (0.5 * h) * k1)
    k3 = v(x + (0.5 * h) * k2)
    k4 = v(x + h * k3)
    return x + (h / 6.0) * (k1 + 2.0 * (k2 + k3) + k4)


def _advance(v, x, h, guard: bool, depth: int, k1=None):
    """Advance exactly h, bisecting recursively when the guard trips."""
    if k1 is None:
        k1 = v(x)
    xn = _rk4_tail(v, x, h, k1)
    if not guard or xn.min() >= -POSITIVITY_SLACK:
        return xn
    if depth >= MAX_HALVINGS:
        raise StepFailureError(
            f"positivity guard still failing after {MAX_HALVINGS} step halvings"
        )
    xm = _advance(v, x, 0.5 * h, guard, depth + 1, k1)
    xm = _clamp(xm)
    return _advance(v, xm, 0.5 * h, guard, depth + 1)


def _clamp(x):
    """Zero out sub-slack negatives; renormalise only if something changed."""
    if x.min() < 0.0:
        x = np.where(x < 0.0, 0.0, x)
        x = x / x.sum()
    return x


def _diagnostic_functions(spec):
    """Mean-fitness and energy evaluators for trajectory samples."""
    model = spec.diagnostic_model() if hasattr(spec, "diagnostic_model") else None

    if model is None:
        mean_fn = lambda x: float("nan")
    else:
        mean_fn = lambda x, model=model: float(x @ model.fitness(x))

    energy_fn = lambda x: float("nan")
    if isinstance(spec, (Replicator, DiscreteReplicator)) and isinstance(spec.model, LinearFitness):
        h = QuadraticPayoff(spec.model.matrix, spec.lam)
        energy_fn = lambda x, h=h: evaluate_H(h, x)
    elif isinstance(spec, Quasispecies):
        h = QuasispeciesLog(spec.values, spec.mutation, spec.lam)

        def energy_fn(x, h=h):
            try:
                return evaluate_H(h, x)
            except DomainError:
                return float("nan")

    return mean_fn, energy_fn


def integrate_velocity(v, p0, cfg: IntegratorConfig, n: int | None = None,
                       mean_fn=None, energy_fn=None, family: str = "custom") -> Trajectory:
    """Integrate a raw velocity callable; the workhorse behind ``integrate``."""
    x = as_point_array(p0, n)
    mean_fn = mean_fn or (lambda _: float("nan"))
    energy_fn = energy_fn or (lambda _: float("nan"))
    n_steps = int(round(cfg.t_max / cfg.dt))
    n_steps = max(n_steps, 1)

    times = [0.0]
    states = [x.copy()]
    means = [mean_fn(x)]
    energies = [energy_fn(x)]
    drifts = [abs(x.sum() - 1.0)]
    minima = [x.min()]
    last_recorded = 0

    converged = False
    streak = 0
    step = 0
    while step < n_steps:
        k1 = v(x)
        if np.abs(k1).max() < cfg.conv_tol:
            streak += 1
            if streak >= cfg.conv_window:
                converged = True
                break
        else:
            streak = 0
        x = _advance(v, x, cfg.dt, cfg.positivity_guard, 0, k1)
        if cfg.positivity_guard:
            x = _clamp(x)
        step += 1
        if step % cfg.record_every == 0:
            times.append(step * cfg.dt)
            states.append(x.copy())
            means.append(mean_fn(x))
            energies.append(energy_fn(x))
            drifts.append(abs(x.sum() - 1.0))
            minima.append(x.min())
            last_recorded = step

    if last_recorded != step:
        times.append(step * cfg.dt)
        states.append(x.copy())
        means.append(mean_fn(x))
        energies.append(energy_fn(x))
        drifts.append(abs(x.sum() - 1.0))
        minima.append(x.min())

    return Trajectory(
        times=np.asarray(times),
        states=np.asarray(states),
        mean_fitness=np.asarray(means),
        energy=np.asarray(energies),
        sum_drift=np.asarray(drifts),
        min_coordinate=np.asarray(minima),
        converged=converged,
        steps=step,
        family=family,
    )


def integrate(spec: DynamicsSpec, p0, cfg: IntegratorConfig) -> Trajectory:
    """Evolve a dynamics family from p0 until convergence or t_max.

    The discrete family is iterated as a map (one unit of time per
    application) rather than integrated.
    """
    if isinstance(spec, DiscreteReplicator):
        return discrete_iterate(spec.model, spec.lam, p0, max_iters=spec.max_iters,
                                conv_tol=cfg.conv_tol, record_every=cfg.record_every)
    v = velocity_function(spec)
    mean_fn, energy_fn = _diagnostic_functions(spec)
    return integrate_velocity(v, p0, cfg, n=spec.n, mean_fn=mean_fn,
                              energy_fn=energy_fn, family=spec.family)


# ── Discrete multiplicative map ─────────────────────────────────────────────


def discrete_growth_step(model, lam: float, p) -> np.ndarray:
    """One application of p_i' = p_i (f_i(p) + lam) / sum_j p_j (f_j(p) + lam).

    For a symmetric nonnegative payoff matrix this map never decreases
    p'Ap + lam (it is the classical multiplicative update for polynomial
    objectives over the simplex).
    """
    x = as_point_array(p, model.n)
    shifted = model.fitness(x) + lam
    if np.any(shifted[x > 0.0] <= 0.0):
        raise PositivityError("discrete map needs f_i + lam > 0 on the support")
    w = x * shifted
    total = w.sum()
    if not total > 0.0:
        raise PositivityError("discrete map needs a positive mean shifted fitness")
    return w / total


def discrete_iterate(model, lam: float, p0, max_iters: int = 10000,
                     conv_tol: float = 1e-12, record_every: int = 1) -> Trajectory:
    """Iterate the discrete map until the update falls below conv_tol."""
    if max_iters < 1:
        raise ParameterError(f"max_iters must be >= 1, got {max_iters!r}")
    if not conv_tol > 0:
        raise ParameterError(f"conv_tol must be positive, got {conv_tol!r}")
    x = as_point_array(p0, model.n)

    energy_fn = lambda _: float("nan")
    if isinstance(model, LinearFitness):
        h = QuadraticPayoff(model.matrix, lam)
        energy_fn = lambda z, h=h: evaluate_H(h, z)

    def mean_fn(z):
        return float(z @ model.fitness(z))

    times = [0.0]
    states = [x.copy()]
    means = [mean_fn(x)]
    energies = [energy_fn(x)]
    drifts = [abs(x.sum() - 1.0)]
    minima = [x.min()]
    last_recorded = 0

    converged = False
    it = 0
    while it < max_iters:
        xn = discrete_growth_step(model, lam, x)
        delta = np.abs(xn - x).max()
        x = xn
        it += 1
        if it % record_every == 0:
            times.append(float(it))
            states.append(x.copy())
            means.append(mean_fn(x))
            energies.append(energy_fn(x))
            drifts.append(abs(x.sum() - 1.0))
            minima.append(x.min())
            last_recorded = it
        if delta < conv_tol:
            converged = True
            break

    if last_recorded != it:
        times.append(float(it))
        states.append(x.copy())
        means.append(mean_fn(x))
        energies.append(energy_fn(x))
        drifts.append(abs(x.sum() - 1.0))
        minima.append(x.min())

    return Trajectory(
        times=np.asarray(times),
        states=np.asarray(states),
        mean_fitness=np.asarray(means),
        energy=np.asarray(energies),
        sum_drift=np.asarray(drifts),
        min_coordinate=np.asarray(minima),
        converged=converged,
        steps=it,
        family="discrete",
    )
