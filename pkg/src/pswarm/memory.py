"""Information gathering, social-attractor selection and memory update.

Every comparison goes through the constraint-handling technique (CHT) of the
particle doing the comparing, so two particles with different CHTs may rank
the same pair of locations differently.  Objectives are minimised.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from typing import NamedTuple, Sequence, Union

import numpy as np

from .sociometry import ConnectivityMatrix, informers

FEASIBILITY_TOLERANCE = 1e-9


@dataclass(frozen=True, slots=True)
class Evaluation:
    """Objective value and nonnegative constraint violations of a position."""

    objective: float
    violations: tuple[float, ...] = ()
    tolerance: float = FEASIBILITY_TOLERANCE
    feasible: bool = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        object.__setattr__(self, "feasible", all(v <= self.tolerance for v in self.violations))

    @property
    def total_violation(self) -> float:
        return math.fsum(self.violations)


@dataclass(frozen=True)
class PreservingFeasibility:
    """Infeasible locations never enter memory.

    A particle with no feasible sample at start-up keeps its least violating
    one and ranks like :class:`PriorityRules` until it first becomes
    feasible.
    """


@dataclass(frozen=True)
class PriorityRules:
    """Feasible beats infeasible; feasibles by objective, infeasibles by total violation."""


@dataclass(frozen=True)
class Penalty:
    """Objective augmented by ``sum_c coefficients[c] * violation[c] ** exponent``.

    A single coefficient applies to every constraint.
    """

    coefficients: tuple[float, ...] = (1.0,)
    exponent: float = 1.0

    def __post_init__(self):
        object.__setattr__(self, "coefficients", tuple(float(c) for c in self.coefficients))
        if not self.coefficients or any(c < 0 or not math.isfinite(c) for c in self.coefficients):
            raise ValueError(f"penalty coefficients must be finite and >= 0, got {self.coefficients}")
        if not self.exponent >= 1:
            raise ValueError(f"penalty exponent must be >= 1, got {self.exponent}")

    def coefficients_at(self, iteration: int) -> tuple[float, ...]:
        """Coefficients in force at ``iteration``.

        Static here; subclasses may override to implement adaptive penalties.
        """
        return self.coefficients


ConstraintHandler = Union[PreservingFeasibility, Penalty, PriorityRules]


class Ordering(enum.Enum):
    A_BETTER = "a_better"
    B_BETTER = "b_better"
    TIE = "tie"
    INCOMPARABLE = "incomparable"


class GatheringMode(enum.Enum):
    MEMORISED = "memorised"
    CURRENT = "current"
    BOTH = "both"


class SynchronyMode(enum.Enum):
    SYNCHRONOUS = "synchronous"
    ASYNCHRONOUS = "asynchronous"


def penalised_value(e: Evaluation, penalty: Penalty, iteration: int = 0) -> float:
    coefs = penalty.coefficients_at(iteration)
    if len(coefs) == 1:
        coefs = coefs * len(e.violations)
    elif len(coefs) != len(e.violations):
        raise ValueError(
            f"{len(coefs)} penalty coefficients for {len(e.violations)} constraints"
        )
    extra = 0.0
    for coef, v in zip(coefs, e.violations):
        extra += coef * v ** penalty.exponent
    return e.objective + extra


def rank_key(e: Evaluation, cht: ConstraintHandler) -> tuple:
    """Sort key under ``cht``; smaller is better.

    Preserving feasibility ranks like the priority rules; what differs is
    which candidates it admits (see :func:`compare`).
    """
    if isinstance(cht, Penalty):
        return (penalised_value(e, cht),)
    if e.feasible:
        return (0, e.objective)
    return (1, e.total_violation)


def compare(a: Evaluation, b: Evaluation, cht: ConstraintHandler) -> Ordering:
    """Which of two evaluations is better under ``cht``.

    Under preserving feasibility two infeasible evaluations cannot be ranked
    and the result is ``INCOMPARABLE``; neither may enter memory.
    """
    if isinstance(cht, PreservingFeasibility) and not a.feasible and not b.feasible:
        return Ordering.INCOMPARABLE
    ka, kb = rank_key(a, cht), rank_key(b, cht)
    if ka < kb:
        return Ordering.A_BETTER
    if kb < ka:
        return Ordering.B_BETTER
    return Ordering.TIE


class Candidate(NamedTuple):
    position: np.ndarray
    evaluation: Evaluation
    source: int
    record: str  # "memory" or "current"


def gather(
    i: int,
    matrix: ConnectivityMatrix,
    memories: Sequence[tuple[np.ndarray, Evaluation]],
    currents: Sequence[tuple[np.ndarray, Evaluation]],
    mode: GatheringMode,
) -> list[Candidate]:
    """Information particle ``i`` can read from its informers.

    Each informer contributes its memory, its current position, or both, per
    ``mode``.  Particle ``i`` itself, when it is its own informer,
    contributes its memory only.  Candidates come ordered by source index,
    memory before current.
    """
    mode = GatheringMode(mode)
    out = []
    for j in informers(matrix, i):
        if j == i or mode is not GatheringMode.CURRENT:
            pos, ev = memories[j]
            out.append(Candidate(pos, ev, j, "memory"))
        if j != i and mode is not GatheringMode.MEMORISED:
            pos, ev = currents[j]
            out.append(Candidate(pos, ev, j, "current"))
    return out


def select_social_attractor(candidates: Sequence[Candidate], cht: ConstraintHandler) -> Candidate | None:
    """Best candidate under ``cht``; ties go to the lowest source index.

    Returns None under preserving feasibility when every candidate is
    infeasible; the caller then falls back on the particle's own memory.
    """
    if not candidates:
        raise ValueError("no candidates to select from")
    pool = candidates
    if isinstance(cht, PreservingFeasibility):
        pool = [c for c in candidates if c.evaluation.feasible]
        if not pool:
            return None
    best = pool[0]
    best_key = rank_key(best.evaluation, cht)
    for cand in pool[1:]:
        key = rank_key(cand.evaluation, cht)
        if key < best_key or (key == best_key and cand.source < best.source):
            best, best_key = cand, key
    return best


def update_memory(
    current_memory: tuple[np.ndarray, Evaluation],
    candidate: tuple[np.ndarray, Evaluation],
    cht: ConstraintHandler,
) -> tuple[np.ndarray, Evaluation]:
    """Keep whichever record is better; the incumbent wins ties."""
    if rank_key(candidate[1], cht) < rank_key(current_memory[1], cht):
        return candidate
    return current_memory
