"""The iteration loop.

Every particle carries its own attributes (coefficient distributions,
scaling, attractor combiner, local sociometry, constraint handler and
gathering mode).  One iteration, per particle: gather information from the
informers, select the social attractor, combine it with the particle's own
memory into the overall attractor, draw the coefficients, apply the
trajectory equation, evaluate, and update memory at the time set by the
synchrony mode.
"""

from __future__ import annotations

import csv
import dataclasses
import enum
import io
import logging
from dataclasses import dataclass, field
from typing import NamedTuple

import numpy as np

from . import memory as mem
from .initialization import (
    InitialCondition,
    Independent,
    SampleRelation,
    ParticleStart,
    SamplingMethod,
    initialize_swarm,
)
from .memory import (
    ConstraintHandler,
    Evaluation,
    GatheringMode,
    PreservingFeasibility,
    PriorityRules,
    SynchronyMode,
    rank_key,
)
from .problems import Problem, SearchBounds, get_problem
from .sociometry import (
    ConnectivityMatrix,
    Global,
    InvalidSociometryError,
    LocalSociometrySpec,
    assemble_connectivity,
    informers,
)
from .stochastic import (
    AttractorCombiner,
    CoefficientDistribution,
    CoupledClassical,
    DecoupledConvex,
    PointMass,
    RandomStream,
    ScalingMode,
    SumOfTwoUniforms,
    Uniform,
    combine_attractors,
    distribution_mean,
    sample_scaled_coefficients,
    swarm_streams,
)
from .termination import (
    StopReason,
    SwarmStatistics,
    TerminationConfig,
    should_stop,
    swarm_diversity,
)
from .trajectory import ReferenceCoefficients, inside_convergence_triangle

logger = logging.getLogger(__name__)


class ConfigError(ValueError):
    """Invalid run configuration; ``path`` names the offending field."""

    def __init__(self, path: str, message: str):
        super().__init__(f"{path}: {message}")
        self.path = path
        self.message = message


class EvaluationError(RuntimeError):
    pass


class BoundaryPolicy(enum.Enum):
    NONE = "none"
    CLAMP = "clamp"
    REFLECT = "reflect"


def apply_boundary_policy(x, bounds: SearchBounds, policy: BoundaryPolicy) -> np.ndarray:
    """Bring a position back into the search box.

    ``REFLECT`` mirrors the overshoot about the violated bound once, then
    clamps whatever is still outside.
    """
    policy = BoundaryPolicy(policy)
    x = np.asarray(x, dtype=float)
    if policy is BoundaryPolicy.NONE:
        return x
    lo, hi = bounds.lower, bounds.upper
    if policy is BoundaryPolicy.REFLECT:
        x = np.where(x > hi, 2.0 * hi - x, np.where(x < lo, 2.0 * lo - x, x))
    return np.minimum(np.maximum(x, lo), hi)


# -- configuration ---------------------------------------------------------


@dataclass(frozen=True)
class ParticleAttributes:
    omega: CoefficientDistribution = PointMass(0.7298)
    phi: CoefficientDistribution = Uniform(0.0, 2.992)
    scaling: ScalingMode = ScalingMode.VECTOR
    combiner: AttractorCombiner = field(default_factory=DecoupledConvex)
    sociometry: LocalSociometrySpec = Global(include_self=True)
    cht: ConstraintHandler = PriorityRules()
    gathering: GatheringMode = GatheringMode.MEMORISED


@dataclass(frozen=True)
class AttributeOverride:
    """Attributes replaced for the listed particles; ``None`` keeps the default."""

    particles: tuple[int, ...]
    omega: CoefficientDistribution | None = None
    phi: CoefficientDistribution | None = None
    scaling: ScalingMode | None = None
    combiner: AttractorCombiner | None = None
    sociometry: LocalSociometrySpec | None = None
    cht: ConstraintHandler | None = None
    gathering: GatheringMode | None = None

    def changes(self) -> dict:
        return {
            f.name: getattr(self, f.name)
            for f in dataclasses.fields(ParticleAttributes)
            if getattr(self, f.name) is not None
        }


@dataclass(frozen=True)
class InitSpec:
    condition: InitialCondition = InitialCondition.TWO_POSITIONS
    relation: SampleRelation = Independent()
    method: SamplingMethod = SamplingMethod.UNIFORM


@dataclass(frozen=True)
class OutputOptions:
    trace: str | None = None
    dump: str | None = None


@dataclass(frozen=True)
class RunConfig:
    problem: str
    dimension: int
    swarm_size: int
    seed: int = 0
    init: InitSpec = InitSpec()
    termination: TerminationConfig = TerminationConfig()
    defaults: ParticleAttributes = ParticleAttributes()
    overrides: tuple[AttributeOverride, ...] = ()
    synchrony: SynchronyMode = SynchronyMode.SYNCHRONOUS
    boundary: BoundaryPolicy = BoundaryPolicy.CLAMP
    displacement_cap: float | None = None
    output: OutputOptions = OutputOptions()

    def particle_attributes(self) -> list[ParticleAttributes]:
        """Resolved attributes of every particle; later overrides win."""
        attrs = [self.defaults] * self.swarm_size
        for k, override in enumerate(self.overrides):
            for i in override.particles:
                if not 0 <= i < self.swarm_size:
                    raise ConfigError(
                        f"overrides[{k}].particles", f"particle {i} out of range for swarm size {self.swarm_size}"
                    )
                attrs[i] = dataclasses.replace(attrs[i], **override.changes())
        return attrs

    def validate(self) -> None:
        if not self.problem:
            raise ConfigError("problem.name", "missing problem name")
        if self.dimension < 1:
            raise ConfigError("problem.dimension", "must be >= 1")
        if self.swarm_size < 1:
            raise ConfigError("swarm.size", "must be >= 1")
        if not 0 <= self.seed < 2 ** 64:
            raise ConfigError("swarm.seed", "must be an unsigned 64-bit integer")
        if self.displacement_cap is not None and not self.displacement_cap > 0:
            raise ConfigError("swarm.displacement_cap", "must be > 0")
        attrs = self.particle_attributes()
        for i, a in enumerate(attrs):
            where = _attribute_source(self, i)
            if isinstance(a.combiner, CoupledClassical) and not isinstance(a.phi, SumOfTwoUniforms):
                raise ConfigError(
                    f"{where}.combiner", "the coupled combiner needs phi of kind sum2u"
                )
        try:
            assemble_connectivity([a.sociometry for a in attrs])
        except InvalidSociometryError as exc:
            raise ConfigError("defaults.sociometry", str(exc)) from None


def _attribute_source(config: RunConfig, i: int) -> str:
    for k in reversed(range(len(config.overrides))):
        if i in config.overrides[k].particles:
            return f"overrides[{k}]"
    return "defaults"


# -- state -----------------------------------------------------------------


@dataclass
class ParticleState:
    index: int
    x_curr: np.ndarray
    x_prev: np.ndarray
    eval_curr: Evaluation
    memory_position: np.ndarray
    memory_eval: Evaluation
    attributes: ParticleAttributes
    rng: RandomStream

    @property
    def memory(self) -> tuple[np.ndarray, Evaluation]:
        return self.memory_position, self.memory_eval


class TraceRow(NamedTuple):
    iteration: int
    best_objective: float
    diversity: float


class DumpRow(NamedTuple):
    iteration: int
    particle: int
    dim: int
    x: float
    xm: float


@dataclass
class RunResult:
    best_position: np.ndarray
    best_evaluation: Evaluation
    iterations: int
    reason: StopReason
    trace: list[TraceRow]
    seed: int
    dump: list[DumpRow] | None = None

    def trace_csv(self) -> str:
        return _csv(("iteration", "best_objective", "diversity"), self.trace)

    def dump_csv(self) -> str:
        if self.dump is None:
            raise ValueError("run was made without a trajectory dump")
        return _csv(("iteration", "particle", "dim", "x", "xm"), self.dump)


def _csv(header, rows) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    for row in rows:
        writer.writerow([repr(v) if isinstance(v, float) else v for v in row])
    return buf.getvalue()


def _reporting_key(e: Evaluation) -> tuple:
    return rank_key(e, PriorityRules())


class Swarm:
    """A swarm ready to iterate.

    Built from a :class:`RunConfig` by :meth:`from_config`, which samples and
    evaluates the initial state.
    """

    def __init__(
        self,
        problem: Problem,
        particles: list[ParticleState],
        matrix: ConnectivityMatrix,
        synchrony: SynchronyMode = SynchronyMode.SYNCHRONOUS,
        boundary: BoundaryPolicy = BoundaryPolicy.CLAMP,
        displacement_cap: float | None = None,
    ):
        self.problem = problem
        self.particles = particles
        self.matrix = matrix
        self.synchrony = SynchronyMode(synchrony)
        self.boundary = BoundaryPolicy(boundary)
        self.displacement_cap = displacement_cap
        self.iteration = 0
        self.evaluations = 0
        self._informers = [informers(matrix, i) for i in range(matrix.m)]
        # particles with equal informer lists share a group id
        groups: dict[tuple, int] = {}
        self._group = [groups.setdefault(tuple(row), len(groups)) for row in self._informers]

    @classmethod
    def from_config(cls, config: RunConfig, problem: Problem | None = None) -> "Swarm":
        config.validate()
        problem = resolve_problem(config, problem)
        attrs = config.particle_attributes()
        matrix = assemble_connectivity([a.sociometry for a in attrs])
        for i, a in enumerate(attrs):
            _warn_if_divergent(i, a)

        swarm = cls(problem, [], matrix, config.synchrony, config.boundary, config.displacement_cap)
        starts, particle_rngs = sample_initial_states(config, problem, swarm._evaluate)
        for i, (start, a, rng) in enumerate(zip(starts, attrs, particle_rngs)):
            swarm.particles.append(
                ParticleState(
                    index=i,
                    x_curr=start.x1,
                    x_prev=start.x0,
                    eval_curr=start.eval_x1,
                    memory_position=start.xm,
                    memory_eval=start.eval_xm,
                    attributes=a,
                    rng=rng,
                )
            )
        return swarm

    def _evaluate(self, x: np.ndarray) -> Evaluation:
        self.evaluations += 1
        try:
            return self.problem.evaluate(x)
        except Exception as exc:
            raise EvaluationError(
                f"evaluating {self.problem.name} at {x!r} (iteration {self.iteration}): {exc}"
            ) from exc

    # -- one iteration ---------------------------------------------------

    def _social(self, p: ParticleState, memories, currents, keys: dict) -> np.ndarray | None:
        """Position of the social attractor of ``p``.

        Same result as :func:`memory.select_social_attractor` over
        :func:`memory.gather`, but with rank keys shared through ``keys``
        across the particles moved from one snapshot.
        """
        a = p.attributes
        cht = a.cht
        mode = a.gathering
        # with memorised gathering the choice does not depend on who asks
        who = -1 if mode is GatheringMode.MEMORISED else p.index
        choice = ("choice", self._group[p.index], mode, id(cht), who)
        if choice in keys:
            return keys[choice]
        preserving = isinstance(cht, PreservingFeasibility)
        best = best_key = None
        for j in self._informers[p.index]:
            records = []
            if j == p.index or mode is not GatheringMode.CURRENT:
                records.append((0, memories[j]))
            if j != p.index and mode is not GatheringMode.MEMORISED:
                records.append((1, currents[j]))
            for kind, (pos, ev) in records:
                if preserving and not ev.feasible:
                    continue
                slot = (kind, j, id(cht))
                key = keys.get(slot)
                if key is None:
                    key = keys[slot] = rank_key(ev, cht)
                # candidates arrive by source index, so strict < keeps the lowest
                if best_key is None or key < best_key:
                    best, best_key = pos, key
        keys[choice] = best
        return best

    def _move(self, p: ParticleState, memories, currents, keys: dict | None = None) -> np.ndarray:
        a = p.attributes
        social = self._social(p, memories, currents, {} if keys is None else keys)
        xb_i = memories[p.index][0]
        xb_k = xb_i if social is None else social
        d = xb_i.size
        coeffs = sample_scaled_coefficients(a.phi, a.omega, a.scaling, d, p.rng)
        x, x_prev = p.x_curr, p.x_prev
        if isinstance(a.combiner, CoupledClassical):
            # same quantity as phi * (p - x) with p the iota/sigma weighted
            # mean; expanded so that no division by phi is needed
            new = x + coeffs.omega * (x - x_prev) + coeffs.iota * (xb_i - x) + coeffs.sigma * (xb_k - x)
        else:
            attractor = combine_attractors(a.combiner, xb_i, xb_k, rng=p.rng, mode=a.scaling)
            new = x + coeffs.omega * (x - x_prev) + coeffs.phi * (attractor - x)
        if self.displacement_cap is not None:
            cap = self.displacement_cap * self.problem.bounds.width
            new = x + np.clip(new - x, -cap, cap)
        return apply_boundary_policy(new, self.problem.bounds, self.boundary)

    def _commit(self, p: ParticleState, new: np.ndarray, ev: Evaluation) -> None:
        p.x_prev = p.x_curr
        p.x_curr = new
        p.eval_curr = ev
        p.memory_position, p.memory_eval = mem.update_memory(p.memory, (new, ev), p.attributes.cht)

    def step(self) -> None:
        self.iteration += 1
        if self.synchrony is SynchronyMode.SYNCHRONOUS:
            memories = [p.memory for p in self.particles]
            currents = [(p.x_curr, p.eval_curr) for p in self.particles]
            moves = []
            keys: dict = {}
            for p in self.particles:
                new = self._move(p, memories, currents, keys)
                moves.append((new, self._evaluate(new)))
            for p, (new, ev) in zip(self.particles, moves):
                self._commit(p, new, ev)
        else:
            for p in self.particles:
                memories = [q.memory for q in self.particles]
                currents = [(q.x_curr, q.eval_curr) for q in self.particles]
                new = self._move(p, memories, currents)
                self._commit(p, new, self._evaluate(new))

    # -- reporting -------------------------------------------------------

    def best(self) -> ParticleState:
        """Particle holding the best memory under the priority rules."""
        return min(self.particles, key=lambda p: (_reporting_key(p.memory_eval), p.index))

    def diversity(self) -> float:
        return swarm_diversity(np.array([p.x_curr for p in self.particles]))

    def dump_rows(self) -> list[DumpRow]:
        rows = []
        for p in self.particles:
            for j in range(p.x_curr.size):
                rows.append(DumpRow(self.iteration, p.index, j, float(p.x_curr[j]), float(p.memory_position[j])))
        return rows


def resolve_problem(config: RunConfig, problem: Problem | None = None) -> Problem:
    """The registered problem named by ``config``, or ``problem`` checked against it."""
    if problem is None:
        try:
            problem = get_problem(config.problem, config.dimension)
        except KeyError as exc:
            raise ConfigError("problem.name", exc.args[0]) from None
        except ValueError as exc:
            raise ConfigError("problem.dimension", str(exc)) from None
    if problem.dimension != config.dimension:
        raise ConfigError("problem.dimension", f"{problem.name} has dimension {problem.dimension}")
    return problem


def sample_initial_states(
    config: RunConfig, problem: Problem, evaluator=None
) -> tuple[list[ParticleStart], list[RandomStream]]:
    """Initial states exactly as :func:`run` draws them, plus the particle streams."""
    init_rng, particle_rngs = swarm_streams(config.seed, config.swarm_size)
    starts = initialize_swarm(
        config.init.condition,
        config.init.relation,
        config.init.method,
        config.swarm_size,
        problem.bounds,
        problem.evaluate if evaluator is None else evaluator,
        init_rng,
        [a.cht for a in config.particle_attributes()],
    )
    return starts, particle_rngs


def _warn_if_divergent(i: int, a: ParticleAttributes) -> None:
    ref = ReferenceCoefficients(distribution_mean(a.omega), max(0.0, distribution_mean(a.phi)))
    if not inside_convergence_triangle(ref):
        logger.warning(
            "particle %d: mean coefficients (omega=%g, phi=%g) lie outside the convergence triangle",
            i, ref.omega, ref.phi,
        )


def run(config: RunConfig, problem: Problem | None = None, dump: bool | None = None) -> RunResult:
    """Initialize a swarm and iterate until a termination criterion fires."""
    swarm = Swarm.from_config(config, problem)
    if dump is None:
        dump = config.output.dump is not None
    stats = SwarmStatistics.for_window(config.termination.window)

    def snapshot():
        best = swarm.best()
        diversity = swarm.diversity()
        stats.record(swarm.iteration, best.memory_eval.objective, diversity)
        trace.append(TraceRow(swarm.iteration, best.memory_eval.objective, diversity))
        if dump:
            dump_rows.extend(swarm.dump_rows())

    trace: list[TraceRow] = []
    dump_rows: list[DumpRow] = []
    snapshot()
    while True:
        swarm.step()
        snapshot()
        decision = should_stop(stats, config.termination)
        if decision.stop:
            break

    best = swarm.best()
    return RunResult(
        best_position=best.memory_position.copy(),
        best_evaluation=best.memory_eval,
        iterations=swarm.iteration,
        reason=decision.reason,
        trace=trace,
        seed=config.seed,
        dump=dump_rows if dump else None,
    )
