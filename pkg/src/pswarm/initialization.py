"""Swarm initialization.

Three choices combine: the sampling method that places points in the search
box, the initial condition that says which of ``x(1)``, ``x(0)`` and
``xm(1)`` (current, previous and memorised positions) are sampled
separately, and the relation between the sampled populations when more than
one is needed.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import Callable, Sequence, Union

import numpy as np

from .memory import ConstraintHandler, Evaluation, PriorityRules, rank_key
from .problems import SearchBounds
from .stochastic import RandomStream


class SamplingMethod(enum.Enum):
    UNIFORM = "uniform"
    LATIN_HYPERCUBE = "latin_hypercube"


class InitialCondition(enum.Enum):
    STAGNATION = "stagnation"
    TWO_POSITIONS = "two_positions"
    ONE_POSITION_ONE_MEMORY = "one_position_one_memory"
    TWO_POSITIONS_ONE_MEMORY = "two_positions_one_memory"

    @property
    def samples_per_particle(self) -> int:
        return {
            InitialCondition.STAGNATION: 1,
            InitialCondition.TWO_POSITIONS: 2,
            InitialCondition.ONE_POSITION_ONE_MEMORY: 2,
            InitialCondition.TWO_POSITIONS_ONE_MEMORY: 3,
        }[self]


@dataclass(frozen=True)
class Perturbation:
    """Extra points are uniform perturbations of the primary one.

    Offsets are within ``radius_fraction`` of each dimension's range, and
    perturbed points are clamped to the bounds.
    """

    radius_fraction: float = 0.05

    def __post_init__(self):
        if not 0.0 < self.radius_fraction <= 1.0:
            raise ValueError(f"radius_fraction must lie in (0, 1], got {self.radius_fraction}")


@dataclass(frozen=True)
class Independent:
    """Each population is sampled on its own."""


@dataclass(frozen=True)
class Simultaneous:
    """All populations come from one sampling of ``n * count`` points."""


SampleRelation = Union[Perturbation, Independent, Simultaneous]


def sample_positions(method: SamplingMethod, n: int, bounds: SearchBounds, rng: RandomStream) -> np.ndarray:
    """``n`` points inside ``bounds``, one per row.

    Latin hypercube sampling splits every dimension into ``n`` strata of equal
    width and puts exactly one point in each.
    """
    if n < 1:
        raise ValueError(f"need at least one sample, got {n}")
    method = SamplingMethod(method)
    d = bounds.dimension
    if method is SamplingMethod.UNIFORM:
        unit = rng.random((n, d))
    else:
        jitter = rng.random((n, d))
        strata = np.column_stack([rng.permutation(n) for _ in range(d)])
        unit = (strata + jitter) / n
    return bounds.lower + unit * bounds.width


def relate_samples(
    relation: SampleRelation,
    primary: np.ndarray,
    extra_needed: int,
    method: SamplingMethod,
    bounds: SearchBounds,
    rng: RandomStream,
) -> list[np.ndarray]:
    """Populations ``[primary, extra_1, ..., extra_k]`` of equal size.

    Under :class:`Simultaneous` every population, the primary one included,
    is a round-robin share of a single joint sampling, so ``primary`` only
    fixes the population size.
    """
    primary = np.atleast_2d(np.asarray(primary, dtype=float))
    n = primary.shape[0]
    if n == 0:
        raise ValueError("primary population is empty")
    if isinstance(relation, Perturbation):
        radius = relation.radius_fraction * bounds.width
        extras = []
        for _ in range(extra_needed):
            offset = (2.0 * rng.random(primary.shape) - 1.0) * radius
            extras.append(np.clip(primary + offset, bounds.lower, bounds.upper))
        return [primary, *extras]
    if isinstance(relation, Independent):
        return [primary, *(sample_positions(method, n, bounds, rng) for _ in range(extra_needed))]
    if isinstance(relation, Simultaneous):
        count = 1 + extra_needed
        joint = sample_positions(method, n * count, bounds, rng)
        return [joint[r::count] for r in range(count)]
    raise TypeError(f"unknown sample relation {relation!r}")


def draw_populations(
    relation: SampleRelation,
    method: SamplingMethod,
    n: int,
    count: int,
    bounds: SearchBounds,
    rng: RandomStream,
) -> list[np.ndarray]:
    """Sample ``count`` related populations of ``n`` points each."""
    if isinstance(relation, Simultaneous):
        return relate_samples(relation, np.empty((n, bounds.dimension)), count - 1, method, bounds, rng)
    primary = sample_positions(method, n, bounds, rng)
    return relate_samples(relation, primary, count - 1, method, bounds, rng)


@dataclass
class ParticleStart:
    """Initial state of one particle: ``x(1)``, ``x(0)`` and ``xm(1)``."""

    x1: np.ndarray
    x0: np.ndarray
    xm: np.ndarray
    eval_x1: Evaluation
    eval_x0: Evaluation
    eval_xm: Evaluation


def initialize_swarm(
    condition: InitialCondition,
    relation: SampleRelation,
    method: SamplingMethod,
    m: int,
    bounds: SearchBounds,
    evaluator: Callable[[np.ndarray], Evaluation],
    rng: RandomStream,
    handlers: Sequence[ConstraintHandler] | None = None,
) -> list[ParticleStart]:
    """Sample, evaluate and assign the initial positions of ``m`` particles.

    Each sampled point is evaluated exactly once.  Within a particle the
    samples are ranked with that particle's constraint handler, lower sample
    index winning ties:

    * stagnation: the single sample is ``x(1) = x(0) = xm(1)``;
    * two positions: the better sample is ``x(1) = xm(1)``, the other ``x(0)``;
    * one position and one memory: the better is ``xm(1)``, the other
      ``x(1) = x(0)``;
    * two positions and one memory: best ``xm(1)``, second ``x(1)``, worst
      ``x(0)``.
    """
    condition = InitialCondition(condition)
    if m < 1:
        raise ValueError(f"swarm size must be >= 1, got {m}")
    if handlers is None:
        handlers = [PriorityRules()] * m
    if len(handlers) != m:
        raise ValueError(f"{len(handlers)} constraint handlers for {m} particles")

    count = condition.samples_per_particle
    populations = draw_populations(relation, method, m, count, bounds, rng)
    evaluations = [[evaluator(pop[i]) for i in range(m)] for pop in populations]

    starts = []
    for i in range(m):
        points = [pop[i].copy() for pop in populations]
        evals = [ev[i] for ev in evaluations]
        order = sorted(range(count), key=lambda s: (rank_key(evals[s], handlers[i]), s))
        if condition is InitialCondition.STAGNATION:
            x1 = x0 = xm = 0
        elif condition is InitialCondition.TWO_POSITIONS:
            x1 = xm = order[0]
            x0 = order[1]
        elif condition is InitialCondition.ONE_POSITION_ONE_MEMORY:
            xm = order[0]
            x1 = x0 = order[1]
        else:
            xm, x1, x0 = order
        starts.append(
            ParticleStart(
                x1=points[x1].copy(), x0=points[x0].copy(), xm=points[xm].copy(),
                eval_x1=evals[x1], eval_x0=evals[x0], eval_xm=evals[xm],
            )
        )
    return starts
