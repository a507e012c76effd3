"""HTTP service exposing the dynamics library.

Endpoints accept the same JSON experiment config the CLI reads and return
JSON payloads carrying results plus pre-rendered CSV text, so any client
(including the bundled CLI, which is a thin wrapper over this app) writes
byte-identical files. Config problems come back as 422 with field
locations; runtime failures (positivity loss, unsupported families,
degenerate states) come back as 400 with the error class name. A run that
merely fails to converge is still a 200, with status "not_converged".
"""

from __future__ import annotations

import numpy as np
from fastapi import FastAPI, Request
from fastapi.responses import JSONResponse

from . import __version__
from .clique import GraphSpec, motzkin_straus_clique
from .dynamics import (
    BNN,
    BestResponse,
    DiscreteReplicator,
    Logit,
    Quasispecies,
    ReplicatorMutator,
    growth_transform_velocity,
    instantiate_engine,
    velocity_function,
)
from .energy import (
    MUTATION_AGREEMENT_TOL,
    gradient_residual_report,
)
from .equilibria import find_equilibrium
from .errors import GrowthDynError, UnsupportedFamilyError
from .reporting import plot_csv, sanitize, trajectory_csv
from .schemas import (
    CliqueRequest,
    ConfigFieldError,
    ExperimentConfig,
    build_dynamics_spec,
    build_initial_point,
    build_integrator_config,
)
from .simplex import sample_uniform
from .solvers import discrete_growth_step, integrate

__all__ = ["app", "create_app"]

# fraction of the uniform point mixed into sampled states so that probe
# points sit far enough inside the simplex for finite differences
INTERIOR_MARGIN = 0.1


def _interior_points(n: int, count: int, seed: int) -> list[np.ndarray]:
    uniform = np.full(n, 1.0 / n)
    return [
        (1.0 - INTERIOR_MARGIN) * sample_uniform(n, seed + i).as_array() + INTERIOR_MARGIN * uniform
        for i in range(count)
    ]


def _simulation_report(spec, traj) -> dict:
    if isinstance(spec, DiscreteReplicator):
        final = traj.final_state()
        residual = float(np.abs(discrete_growth_step(spec.model, spec.lam, final) - final).max())
    else:
        final = traj.final_state()
        residual = float(np.abs(velocity_function(spec)(final)).max())
    return {
        "family": spec.family,
        "n": spec.n,
        "converged": bool(traj.converged),
        "steps": int(traj.steps),
        "t_final": float(traj.times[-1]),
        "final": [float(v) for v in final],
        "residual": residual,
        "final_mean_fitness": float(traj.mean_fitness[-1]),
        "final_energy": float(traj.energy[-1]),
        "max_sum_drift": float(np.abs(traj.sum_drift).max()),
        "final_min_coordinate": float(traj.min_coordinate[-1]),
    }


def create_app() -> FastAPI:
    app = FastAPI(title="growthdyn", version=__version__)

    @app.exception_handler(ConfigFieldError)
    async def config_error_handler(request: Request, exc: ConfigFieldError):
        return JSONResponse(status_code=422, content={"detail": exc.detail()})

    @app.exception_handler(GrowthDynError)
    async def runtime_error_handler(request: Request, exc: GrowthDynError):
        return JSONResponse(
            status_code=400,
            content={"detail": [{"msg": str(exc), "type": type(exc).__name__}]},
        )

    @app.get("/health")
    async def health():
        return {"status": "ok", "version": __version__}

    @app.post("/simulate")
    async def simulate(config: ExperimentConfig):
        spec = build_dynamics_spec(config)
        p0 = build_initial_point(config.initial, spec.n)
        cfg = build_integrator_config(config.integrator)
        traj = integrate(spec, p0, cfg)
        report = _simulation_report(spec, traj)
        return sanitize(
            {
                "status": "ok" if traj.converged else "not_converged",
                "report": report,
                "trajectory_csv": trajectory_csv(traj),
                "plot_csv": plot_csv(traj),
            }
        )

    @app.post("/compare")
    async def compare(config: ExperimentConfig):
        spec = build_dynamics_spec(config)
        if isinstance(spec, DiscreteReplicator):
            raise UnsupportedFamilyError(
                "the discrete family is a map, not a flow; nothing to compare"
            )
        field = instantiate_engine(spec)  # raises UnsupportedFamily for best response
        named = velocity_function(spec)
        opts = config.compare
        seed = opts.seed if opts.seed is not None else 0
        is_logit = isinstance(spec, Logit)

        per_point = []
        max_difference = 0.0
        max_scale_error = 0.0
        for x in _interior_points(spec.n, opts.points, seed):
            e = growth_transform_velocity(field, x)
            m = named(x)
            entry: dict = {"point": [float(v) for v in x]}
            if is_logit:
                norm_e = float(np.linalg.norm(e))
                norm_m = float(np.linalg.norm(m))
                if norm_e > 0.0 and norm_m > 0.0:
                    diff = float(np.abs(e / norm_e - m / norm_m).max())
                    scale = float(np.dot(e, m) / np.dot(m, m))
                else:
                    diff = float(np.abs(e - m).max())
                    scale = float("nan")
                predicted = float(np.exp(spec.model.fitness(x) / spec.eta).sum())
                scale_error = abs(scale - predicted) / predicted
                entry.update(
                    {
                        "difference": diff,
                        "scale": scale,
                        "scale_predicted": predicted,
                        "scale_error": scale_error,
                    }
                )
                max_scale_error = max(max_scale_error, scale_error)
            else:
                diff = float(np.abs(e - m).max() / (1.0 + np.abs(m).max()))
                entry["difference"] = diff
            per_point.append(entry)
            max_difference = max(max_difference, diff)

        within = max_difference <= opts.tolerance and max_scale_error <= opts.tolerance
        return sanitize(
            {
                "status": "ok" if within else "tolerance_failure",
                "family": spec.family,
                "points": opts.points,
                "seed": seed,
                "tolerance": opts.tolerance,
                "max_difference": max_difference,
                "max_scale_error": max_scale_error if is_logit else None,
                "within_tolerance": within,
                "per_point": per_point,
            }
        )

    @app.post("/equilibrium")
    async def equilibrium(config: ExperimentConfig):
        spec = build_dynamics_spec(config)
        if isinstance(spec, DiscreteReplicator):
            raise UnsupportedFamilyError(
                "equilibrium analysis covers the continuous-time families; "
                "use simulate for the discrete map"
            )
        p0 = build_initial_point(config.initial, spec.n)
        cfg = build_integrator_config(config.integrator)
        report = find_equilibrium(spec, p0, cfg)
        eigs = [[float(z.real), float(z.imag)] for z in report.eigenvalues]
        payload = {
            "family": report.family,
            "point": [float(v) for v in report.point],
            "residual": report.residual,
            "support": report.support,
            "eigenvalues": eigs,
            "stability": report.stability,
            "nash": report.nash,
            "nash_excess": None if report.nash_excess is None else [float(v) for v in report.nash_excess],
            "ess": report.ess,
            "curvature": report.curvature,
            "curvature_eigenvalues": None
            if report.curvature_eigenvalues is None
            else [float(v) for v in report.curvature_eigenvalues],
            "converged": report.converged,
            "steps": report.steps,
            "flags": report.flags,
        }
        return sanitize(
            {
                "status": "ok" if report.converged else "not_converged",
                "report": payload,
            }
        )

    @app.post("/gradcheck")
    async def gradcheck(config: ExperimentConfig):
        spec = build_dynamics_spec(config)
        if isinstance(spec, (BestResponse, DiscreteReplicator)):
            raise UnsupportedFamilyError(
                f"no energy function is defined for the {spec.family} family"
            )
        opts = config.gradcheck
        seed = opts.seed if opts.seed is not None else 0
        informational = isinstance(spec, (Quasispecies, ReplicatorMutator))

        per_point = []
        max_residual = 0.0
        max_gap = 0.0
        bound = None
        for x in _interior_points(spec.n, opts.points, seed):
            rep = gradient_residual_report(spec, x, step=opts.step)
            bound = rep.bound
            entry = {"point": [float(v) for v in x], "residual": rep.residual}
            if rep.predicted_extra is not None:
                gap = abs(rep.residual - rep.predicted_extra)
                entry["predicted_extra"] = rep.predicted_extra
                entry["agreement_gap"] = gap
                max_gap = max(max_gap, gap)
            per_point.append(entry)
            max_residual = max(max_residual, rep.residual)

        if informational:
            passed = max_gap <= MUTATION_AGREEMENT_TOL
        else:
            passed = max_residual <= bound
        return sanitize(
            {
                "status": "ok" if passed else "tolerance_failure",
                "family": spec.family,
                "points": opts.points,
                "seed": seed,
                "step": opts.step,
                "bound": bound,
                "max_residual": max_residual,
                "informational": informational,
                "max_agreement_gap": max_gap if informational else None,
                "agreement_tol": MUTATION_AGREEMENT_TOL if informational else None,
                "passed": passed,
                "per_point": per_point,
            }
        )

    @app.post("/clique")
    async def clique(request: CliqueRequest):
        graph = GraphSpec(request.n, [tuple(e) for e in request.edges])
        report = motzkin_straus_clique(
            graph,
            restarts=request.restarts,
            lam=request.lam,
            seed=request.seed,
            max_iters=request.max_iters,
            conv_tol=request.conv_tol,
        )
        return sanitize(
            {
                "status": "ok",
                "n": graph.n,
                "omega": report.omega,
                "value": report.value,
                "clique": report.clique,
                "support": report.support,
                "best_point": [float(v) for v in report.best_point],
                "restarts": report.restarts,
                "lambda": report.lam,
                "iterations": report.iterations,
            }
        )

    return app


app = create_app()
