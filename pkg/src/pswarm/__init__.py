"""Configurable particle swarm optimization.

The trajectory of a particle is a second-order linear recurrence
``x(t+1) = x(t) + omega * (x(t) - x(t-1)) + phi * (p - x(t))``.  Its
deterministic analysis lives in :mod:`pswarm.trajectory`.  The remaining
modules make each design choice of a swarm optimizer a separate setting:
coefficient distributions, attractor generation, sociometry,
initialization, memory and constraint handling, and termination.
"""

from .config import config_from_dict, config_to_dict, dumps, load, loads
from .engine import (
    AttributeOverride,
    BoundaryPolicy,
    ConfigError,
    EvaluationError,
    InitSpec,
    OutputOptions,
    ParticleAttributes,
    RunConfig,
    RunResult,
    Swarm,
    apply_boundary_policy,
    run,
)
from .initialization import (
    Independent,
    InitialCondition,
    Perturbation,
    SamplingMethod,
    Simultaneous,
    initialize_swarm,
    sample_positions,
)
from .memory import (
    Evaluation,
    GatheringMode,
    Penalty,
    PreservingFeasibility,
    PriorityRules,
    SynchronyMode,
)
from .problems import Problem, SearchBounds, get_problem, problem_names, register_problem
from .sociometry import Forward, Global, Ring, Wheel, assemble_connectivity
from .stochastic import (
    CoupledClassical,
    Custom,
    DecoupledConvex,
    PointMass,
    RandomStream,
    ScalingMode,
    SumOfTwoUniforms,
    Uniform,
)
from .termination import StopReason, TerminationConfig
from .trajectory import (
    Behaviour,
    ReferenceCoefficients,
    RootCase,
    TrajectoryInitialState,
    characteristic_roots,
    classify_behaviour,
    closed_form_position,
    dominant_root_grid,
    step_recurrence,
)

__version__ = "0.1.0"
