"""growthdyn: evolutionary game dynamics through one growth-transform engine.

A single multiplicative flow on the probability simplex reproduces the
classical dynamics catalogue (replicator, quasispecies, replicator-mutator,
logit, best response, Brown-von Neumann-Nash, selector-weighted) by choosing
its fitness weighting and time-scale function. The package bundles the
engine and the named fields, energy functions with gradient checking, a
conservation-aware RK4 integrator and a discrete multiplicative map,
equilibrium/stability/Nash/ESS analysis, a maximum-clique solver built on
the simplex quadratic program, and an HTTP service plus CLI around it all.
"""

from .clique import (
    CliqueReport,
    GraphSpec,
    brute_force_clique_number,
    motzkin_straus_clique,
    parse_graph_file,
    parse_graph_text,
)
from .dynamics import (
    BNN,
    BestResponse,
    ConstantRate,
    DiscreteReplicator,
    DynamicsSpec,
    GrowthTransformField,
    Logit,
    MeanShiftedFitness,
    Quasispecies,
    Replicator,
    ReplicatorMutator,
    SelectorWeighted,
    SumExcess,
    SumExp,
    best_response_velocity,
    bnn_excess,
    bnn_velocity,
    field_from_fitness,
    growth_transform_velocity,
    instantiate_engine,
    logit_velocity,
    quasispecies_velocity,
    replicator_mutator_velocity,
    replicator_velocity,
    selector_weighted_velocity,
    velocity,
    velocity_function,
)
from .energy import (
    CURVATURE_CONCAVE,
    CURVATURE_CONVEX,
    CURVATURE_FLAT,
    CURVATURE_INDEFINITE,
    CURVATURE_STRICTLY_CONCAVE,
    CURVATURE_STRICTLY_CONVEX,
    CURVATURE_TOL,
    DEFAULT_GRADIENT_STEP,
    MUTATION_AGREEMENT_TOL,
    REPLICATOR_RESIDUAL_BOUND,
    SMOOTHED_RESIDUAL_BOUND,
    BnnIntegral,
    GradientResidualReport,
    LogitIntegral,
    MutatorLog,
    QuadraticPayoff,
    QuasispeciesLog,
    ReplicatorIntegral,
    curvature_class,
    evaluate_H,
    gradient_residual_report,
    numerical_gradient,
    tangent_basis,
)
from .equilibria import (
    EquilibriumReport,
    analyze_point,
    classify_spectrum,
    ess_verdict,
    find_equilibrium,
    nash_verdict,
    tangent_spectrum,
    velocity_jacobian,
)
from .errors import (
    ConstraintError,
    DegenerateError,
    DimensionError,
    DomainError,
    GraphParseError,
    GrowthDynError,
    ParameterError,
    PositivityError,
    QuadratureError,
    SizeError,
    StepFailureError,
    UnknownGameError,
    UnsupportedFamilyError,
)
from .games import (
    ConstantFitness,
    FitnessModel,
    IdentitySelector,
    LinearFitness,
    LogisticDerivativeSelector,
    MutationMatrix,
    QuadraticFitness,
    SaturatingFitness,
    SechSquaredSelector,
    STANDARD_GAMES,
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
from .reporting import fmt17, json17_dumps, plot_csv, trajectory_csv
from .simplex import (
    SimplexPoint,
    Tolerance,
    make_simplex_point,
    renormalize,
    sample_uniform,
    uniform_point,
)
from .solvers import (
    IntegratorConfig,
    Trajectory,
    discrete_growth_step,
    discrete_iterate,
    integrate,
    integrate_velocity,
)

__version__ = "0.1.0"
