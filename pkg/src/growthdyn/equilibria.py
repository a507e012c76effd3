"""Equilibrium location, Nash and stability verdicts on the simplex.

Stability is judged from the velocity-field Jacobian restricted to the
tangent space {x : sum x = 0}: the full Jacobian always carries a
direction transverse to the simplex that says nothing about the dynamics
on it. Nash and evolutionary-stability verdicts are computed for linear
payoff models, the Nash test from payoff excesses and the stability test
by sampling local invasions.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .dynamics import BNN, velocity_function
from .energy import curvature_class, tangent_basis
from .errors import DegenerateError
from .games import LinearFitness
from .simplex import as_point_array
from .solvers import IntegratorConfig, Trajectory, integrate

__all__ = [
    "JACOBIAN_STEP",
    "STABILITY_TOL",
    "DEFAULT_NASH_TOL",
    "DEFAULT_ESS_TOL",
    "DEFAULT_SUPPORT_TOL",
    "STABLE",
    "NEUTRALLY_STABLE",
    "UNSTABLE",
    "SADDLE",
    "INCONCLUSIVE",
    "velocity_jacobian",
    "tangent_spectrum",
    "classify_spectrum",
    "nash_verdict",
    "ess_verdict",
    "EquilibriumReport",
    "analyze_point",
    "find_equilibrium",
]

JACOBIAN_STEP = 1e-6
STABILITY_TOL = 1e-6
DEFAULT_NASH_TOL = 1e-6
DEFAULT_ESS_TOL = 1e-8
DEFAULT_SUPPORT_TOL = 1e-6
DEFAULT_ESS_SAMPLES = 200
DEFAULT_ESS_RADIUS = 0.01

STABLE = "asymptotically_stable"
NEUTRALLY_STABLE = "neutrally_stable"
UNSTABLE = "unstable"
SADDLE = "saddle"
INCONCLUSIVE = "inconclusive"


def velocity_jacobian(v, x: np.ndarray, step: float = JACOBIAN_STEP) -> np.ndarray:
    """Central-difference Jacobian J[i, j] = d v_i / d x_j of a raw field."""
    n = x.shape[0]
    jac = np.empty((n, n))
    for j in range(n):
        zp = x.copy()
        zm = x.copy()
        zp[j] += step
        zm[j] -= step
        jac[:, j] = (v(zp) - v(zm)) / (2.0 * step)
    return jac


def tangent_spectrum(v, x: np.ndarray, step: float = JACOBIAN_STEP) -> np.ndarray:
    """Eigenvalues of the Jacobian projected onto the simplex tangent space.

    Returns n-1 complex eigenvalues sorted by (real, imaginary) part.
    """
    jac = velocity_jacobian(v, x, step)
    b = tangent_basis(x.shape[0])
    eigs = np.linalg.eigvals(b.T @ jac @ b)
    order = np.lexsort((eigs.imag, eigs.real))
    return eigs[order]


def classify_spectrum(eigs: np.ndarray, tol: float = STABILITY_TOL) -> str:
    """Map tangent eigenvalues to a stability verdict."""
    re = eigs.real
    im = eigs.imag
    if re.max() < -tol:
        return STABLE
    if re.max() > tol:
        return SADDLE if re.min() < -tol else UNSTABLE
    if np.abs(re).max() <= tol and np.abs(im).max() > tol:
        return NEUTRALLY_STABLE
    return INCONCLUSIVE


def nash_verdict(a: np.ndarray, x: np.ndarray, tol: float = DEFAULT_NASH_TOL,
                 support_tol: float = DEFAULT_SUPPORT_TOL):
    """Payoff-excess Nash test for a linear game.

    x is Nash iff no strategy earns more than the population mean (all
    excesses <= tol) and every supported strategy earns exactly the mean
    (|excess| <= tol on the support). Returns (verdict, excesses, support).
    """
    f = a @ x
    excess = f - float(x @ f)
    support = [int(i) for i in np.flatnonzero(x > support_tol)]
    ok = bool(np.all(excess <= tol) and np.all(np.abs(excess[support]) <= tol))
    return ok, excess, support


def ess_verdict(a: np.ndarray, x: np.ndarray, rng: np.random.Generator,
                samples: int = DEFAULT_ESS_SAMPLES, radius: float = DEFAULT_ESS_RADIUS,
                nash_tol: float = DEFAULT_NASH_TOL, ess_tol: float = DEFAULT_ESS_TOL) -> bool:
    """Sampled local-invasion test.

    For random simplex points q within the given radius of x: whenever q
    ties as a reply to x (|x'Ax - q'Ax| <= nash_tol), x must do at least
    as well against q as q does against itself, up to ess_tol.
    """
    n = x.shape[0]
    ax = a @ x
    x_ax = float(x @ ax)
    for _ in range(samples):
        gaps = rng.standard_exponential(n)
        s = gaps / gaps.sum()
        d = s - x
        norm = float(np.linalg.norm(d))
        if norm == 0.0:
            continue
        u = rng.uniform(0.0, 1.0)
        q = x + (radius * u / norm) * d if norm > radius * u else s
        if abs(x_ax - float(q @ ax)) <= nash_tol:
            aq = a @ q
            if float(x @ aq) < float(q @ aq) - ess_tol:
                return False
    return True


@dataclass
class EquilibriumReport:
    """Outcome of probing one point (usually the end of a trajectory)."""

    family: str
    point: np.ndarray
    residual: float
    support: list
    eigenvalues: np.ndarray
    stability: str
    nash: bool | None = None
    nash_excess: np.ndarray | None = None
    ess: bool | None = None
    curvature: str | None = None
    curvature_eigenvalues: np.ndarray | None = None
    converged: bool | None = None
    steps: int | None = None
    flags: list = field(default_factory=list)
    trajectory: Trajectory | None = None


def analyze_point(spec, point, nash_tol: float = DEFAULT_NASH_TOL,
                  support_tol: float = DEFAULT_SUPPORT_TOL, seed: int = 0,
                  ess_samples: int = DEFAULT_ESS_SAMPLES,
                  ess_radius: float = DEFAULT_ESS_RADIUS) -> EquilibriumReport:
    """Residual, tangent spectrum and (linear games) Nash/ESS verdicts at a point."""
    x = as_point_array(point, spec.n)
    v = velocity_function(spec)
    vel = v(x)
    residual = float(np.abs(vel).max())
    eigs = tangent_spectrum(v, x)
    stability = classify_spectrum(eigs)

    nash = None
    excess = None
    ess = None
    curvature = None
    curvature_eigs = None
    support = [int(i) for i in np.flatnonzero(x > support_tol)]
    flags: list = []

    model = spec.diagnostic_model() if hasattr(spec, "diagnostic_model") else None
    if isinstance(model, LinearFitness):
        a = model.matrix
        nash, excess, support = nash_verdict(a, x, nash_tol, support_tol)
        rng = np.random.default_rng(seed)
        ess = ess_verdict(a, x, rng, samples=ess_samples, radius=ess_radius,
                          nash_tol=nash_tol)
        curvature, curvature_eigs = curvature_class(a)
    if isinstance(spec, BNN) and spec.epsilon > 0.0:
        # with a positive margin the rest point sits away from the Nash set
        flags.append("margin_displaced")

    return EquilibriumReport(
        family=getattr(spec, "family", "custom"),
        point=x,
        residual=residual,
        support=support,
        eigenvalues=eigs,
        stability=stability,
        nash=nash,
        nash_excess=excess,
        ess=ess,
        curvature=curvature,
        curvature_eigenvalues=curvature_eigs,
        flags=flags,
    )


def find_equilibrium(spec, p0, cfg: IntegratorConfig, nash_tol: float = DEFAULT_NASH_TOL,
                     support_tol: float = DEFAULT_SUPPORT_TOL, seed: int = 0,
                     ess_samples: int = DEFAULT_ESS_SAMPLES,
                     ess_radius: float = DEFAULT_ESS_RADIUS) -> EquilibriumReport:
    """Integrate to a candidate rest point, then analyze it.

    A run that exhausts t_max without meeting the convergence rule is still
    analyzed (the report keeps converged=False and gains a not_converged
    flag), since cycling families never settle.
    """
    traj = integrate(spec, p0, cfg)
    final = traj.final_state()
    total = final.sum()
    if total > 0.0:
        final = final / total
    else:
        raise DegenerateError("trajectory ended at a degenerate point")
    report = analyze_point(spec, final, nash_tol=nash_tol, support_tol=support_tol,
                           seed=seed, ess_samples=ess_samples, ess_radius=ess_radius)
    report.converged = traj.converged
    report.steps = traj.steps
    report.trajectory = traj
    if not traj.converged:
        report.flags.append("not_converged")
    return report
