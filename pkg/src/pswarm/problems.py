"""Benchmark objectives with bounds, constraints and known optima."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from .memory import FEASIBILITY_TOLERANCE, Evaluation


@dataclass(frozen=True)
class SearchBounds:
    lower: np.ndarray
    upper: np.ndarray

    def __init__(self, lower, upper):
        lower = np.array(lower, dtype=float, ndmin=1)
        upper = np.array(upper, dtype=float, ndmin=1)
        if lower.shape != upper.shape or lower.ndim != 1:
            raise ValueError(f"bounds shapes differ: {lower.shape} vs {upper.shape}")
        if not (np.all(np.isfinite(lower)) and np.all(np.isfinite(upper))):
            raise ValueError("bounds must be finite")
        if np.any(lower >= upper):
            raise ValueError("lower bound must be below upper bound in every dimension")
        lower.setflags(write=False)
        upper.setflags(write=False)
        object.__setattr__(self, "lower", lower)
        object.__setattr__(self, "upper", upper)

    @classmethod
    def box(cls, lo: float, hi: float, dimension: int) -> "SearchBounds":
        return cls(np.full(dimension, lo), np.full(dimension, hi))

    @property
    def dimension(self) -> int:
        return self.lower.size

    @property
    def width(self) -> np.ndarray:
        return self.upper - self.lower

    def __eq__(self, other):
        return (
            isinstance(other, SearchBounds)
            and np.array_equal(self.lower, other.lower)
            and np.array_equal(self.upper, other.upper)
        )

    def __hash__(self):
        return hash((self.lower.tobytes(), self.upper.tobytes()))


@dataclass(frozen=True, eq=False)
class Problem:
    name: str
    dimension: int
    bounds: SearchBounds
    objective: Callable[[np.ndarray], float]
    constraints: tuple[Callable[[np.ndarray], float], ...] = ()
    known_optimum: tuple[np.ndarray, float] | None = None
    tolerance: float = field(default=FEASIBILITY_TOLERANCE)

    def evaluate(self, x) -> Evaluation:
        return evaluate(self, x)


def evaluate(p: Problem, x) -> Evaluation:
    x = np.asarray(x, dtype=float)
    if x.shape != (p.dimension,):
        raise ValueError(f"{p.name} expects a position of shape ({p.dimension},), got {x.shape}")
    violations = tuple(float(g(x)) for g in p.constraints)
    if any(v < 0 for v in violations):
        raise ValueError(f"{p.name}: negative constraint violation {violations}")
    return Evaluation(float(p.objective(x)), violations, p.tolerance)


def sphere(x: np.ndarray) -> float:
    return float(np.dot(x, x))


def rosenbrock(x: np.ndarray) -> float:
    return float(np.sum(100.0 * (x[1:] - x[:-1] ** 2) ** 2 + (1.0 - x[:-1]) ** 2))


def rastrigin(x: np.ndarray) -> float:
    return float(10.0 * x.size + np.sum(x * x - 10.0 * np.cos(2.0 * math.pi * x)))


def half_plane_violation(x: np.ndarray) -> float:
    """Violation of ``x[0] + x[1] >= 1``."""
    return max(0.0, 1.0 - x[0] - x[1])


def make_sphere(dimension: int = 10) -> Problem:
    return Problem(
        "sphere", dimension, SearchBounds.box(-100.0, 100.0, dimension), sphere,
        known_optimum=(np.zeros(dimension), 0.0),
    )


def make_rosenbrock(dimension: int = 10) -> Problem:
    if dimension < 2:
        raise ValueError("rosenbrock needs dimension >= 2")
    return Problem(
        "rosenbrock", dimension, SearchBounds.box(-30.0, 30.0, dimension), rosenbrock,
        known_optimum=(np.ones(dimension), 0.0),
    )


def make_rastrigin(dimension: int = 10) -> Problem:
    return Problem(
        "rastrigin", dimension, SearchBounds.box(-5.12, 5.12, dimension), rastrigin,
        known_optimum=(np.zeros(dimension), 0.0),
    )


def make_constrained_sphere(dimension: int = 2) -> Problem:
    """Sphere subject to ``x[0] + x[1] >= 1``; optimum 0.5 at (0.5, 0.5, 0, ...)."""
    if dimension < 2:
        raise ValueError("constrained_sphere needs dimension >= 2")
    opt = np.zeros(dimension)
    opt[:2] = 0.5
    return Problem(
        "constrained_sphere", dimension, SearchBounds.box(-100.0, 100.0, dimension), sphere,
        constraints=(half_plane_violation,),
        known_optimum=(opt, 0.5),
    )


_REGISTRY: dict[str, Callable[[int], Problem]] = {
    "sphere": make_sphere,
    "rosenbrock": make_rosenbrock,
    "rastrigin": make_rastrigin,
    "constrained_sphere": make_constrained_sphere,
}


def register_problem(name: str, factory: Callable[[int], Problem], replace: bool = False) -> None:
    """Make ``factory(dimension)`` available to run configurations as ``name``."""
    if name in _REGISTRY and not replace:
        raise ValueError(f"problem {name!r} already registered")
    _REGISTRY[name] = factory


def unregister_problem(name: str) -> None:
    _REGISTRY.pop(name, None)


def problem_names() -> list[str]:
    return sorted(_REGISTRY)


def get_problem(name: str, dimension: int) -> Problem:
    try:
        factory = _REGISTRY[name]
    except KeyError:
        raise KeyError(f"unknown problem {name!r}; known: {', '.join(problem_names())}") from None
    return factory(dimension)


def builtin_suite(dimension: int = 10) -> list[Problem]:
    return [
        make_sphere(dimension),
        make_rosenbrock(max(dimension, 2)),
        make_rastrigin(dimension),
        make_constrained_sphere(max(dimension, 2)),
    ]


def count_evaluations(evaluator: Callable[[np.ndarray], Evaluation]) -> Callable[[np.ndarray], Evaluation]:
    """Wrap an evaluator so that it counts its calls in ``.calls``."""

    def counted(x):
        counted.calls += 1
        return evaluator(x)

    counted.calls = 0
    return counted


def positions_within(bounds: SearchBounds, xs: Sequence[np.ndarray]) -> bool:
    xs = np.atleast_2d(np.asarray(xs, dtype=float))
    return bool(np.all(xs >= bounds.lower) and np.all(xs <= bounds.upper))
