"""Stopping rules: search length, clustering (diversity loss) and convergence."""

from __future__ import annotations

import enum
from collections import deque
from dataclasses import dataclass, field
from typing import NamedTuple

import numpy as np


class StopReason(enum.Enum):
    SEARCH_LENGTH = "SearchLength"
    CLUSTERING = "Clustering"
    CONVERGENCE = "Convergence"


@dataclass(frozen=True)
class TerminationConfig:
    """Enabled criteria; ``None`` disables a criterion.

    ``improvement_epsilon`` and ``window`` go together: the run has converged
    once the best value improved by less than ``improvement_epsilon`` across
    the last ``window`` recorded values.
    """

    t_max: int | None = 1000
    diversity_threshold: float | None = None
    improvement_epsilon: float | None = None
    window: int = 50

    def __post_init__(self):
        if self.t_max is None and self.diversity_threshold is None and self.improvement_epsilon is None:
            raise ValueError("at least one termination criterion must be enabled")
        if self.t_max is not None and self.t_max < 1:
            raise ValueError(f"t_max must be >= 1, got {self.t_max}")
        if self.diversity_threshold is not None and self.diversity_threshold < 0:
            raise ValueError("diversity_threshold must be >= 0")
        if self.improvement_epsilon is not None and self.improvement_epsilon < 0:
            raise ValueError("improvement_epsilon must be >= 0")
        if self.window < 1:
            raise ValueError(f"window must be >= 1, got {self.window}")


@dataclass
class SwarmStatistics:
    iteration: int = 0
    best_memory_objective: float = float("inf")
    swarm_diversity: float = float("inf")
    best_history: deque = field(default_factory=deque)

    @classmethod
    def for_window(cls, window: int) -> "SwarmStatistics":
        return cls(best_history=deque(maxlen=window))

    def record(self, iteration: int, best: float, diversity: float) -> None:
        self.iteration = iteration
        self.best_memory_objective = best
        self.swarm_diversity = diversity
        self.best_history.append(best)


class StopDecision(NamedTuple):
    stop: bool
    reason: StopReason | None


def swarm_diversity(positions) -> float:
    """Mean Euclidean distance of the particles to their centroid."""
    x = np.atleast_2d(np.asarray(positions, dtype=float))
    if x.shape[0] == 0:
        raise ValueError("no positions")
    centre = x.mean(axis=0)
    return float(np.mean(np.linalg.norm(x - centre, axis=1)))


def should_stop(stats: SwarmStatistics, config: TerminationConfig) -> StopDecision:
    """Check the enabled criteria in the order length, clustering, convergence."""
    if config.t_max is not None and stats.iteration >= config.t_max:
        return StopDecision(True, StopReason.SEARCH_LENGTH)
    if config.diversity_threshold is not None and stats.swarm_diversity < config.diversity_threshold:
        return StopDecision(True, StopReason.CLUSTERING)
    if config.improvement_epsilon is not None:
        history = stats.best_history
        if len(history) >= config.window:
            recent = list(history)[-config.window:]
            if recent[0] - recent[-1] < config.improvement_epsilon:
                return StopDecision(True, StopReason.CONVERGENCE)
    return StopDecision(False, None)
