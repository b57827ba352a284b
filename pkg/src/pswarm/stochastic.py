"""Stochastic coefficients and attractor generation.

Randomness is kept apart from the deterministic trajectory: the inertia and
acceleration are drawn from user-chosen distributions, and the overall
attractor is a (possibly random) convex combination of a particle's own
memory and the best memory it was informed of.

All randomness goes through :class:`RandomStream`, a thin wrapper around
numpy's Philox4x64-10 counter-based generator.  Streams are derived from a
root seed with :class:`numpy.random.SeedSequence`, so a run is reproducible
bit for bit from its seed alone.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from typing import Sequence, Union

import numpy as np

ALGORITHM = "philox4x64-10"


class RandomStream:
    """Seeded source of uniform variates.

    Identical seed (and spawn key) plus an identical sequence of calls gives
    an identical sequence of samples, on every platform numpy supports.
    """

    algorithm = ALGORITHM

    def __init__(self, seed: int | np.random.SeedSequence):
        if isinstance(seed, np.random.SeedSequence):
            self._seq = seed
        else:
            if not 0 <= int(seed) < 2 ** 64:
                raise ValueError(f"seed must be an unsigned 64-bit integer, got {seed}")
            self._seq = np.random.SeedSequence(int(seed))
        self.generator = np.random.Generator(np.random.Philox(self._seq))

    @property
    def seed(self) -> int:
        return self._seq.entropy

    @property
    def spawn_key(self) -> tuple[int, ...]:
        return tuple(self._seq.spawn_key)

    def random(self, size=None):
        """Uniform variates on [0, 1)."""
        return self.generator.random(size)

    def permutation(self, n: int) -> np.ndarray:
        return self.generator.permutation(n)

    def spawn(self, n: int) -> list["RandomStream"]:
        """Independent child streams; repeated calls yield fresh children."""
        return [RandomStream(child) for child in self._seq.spawn(n)]


def swarm_streams(seed: int, m: int) -> tuple[RandomStream, list[RandomStream]]:
    """Initialization stream and one sub-stream per particle.

    Children of ``SeedSequence(seed)``: child 0 drives initialization and
    child ``i + 1`` drives particle ``i``.
    """
    children = np.random.SeedSequence(int(seed)).spawn(m + 1)
    return RandomStream(children[0]), [RandomStream(s) for s in children[1:]]


# -- distributions ---------------------------------------------------------


@dataclass(frozen=True)
class PointMass:
    value: float

    def __post_init__(self):
        if not math.isfinite(self.value):
            raise ValueError(f"point mass must be finite, got {self.value}")

    def sample(self, rng: RandomStream, n: int) -> np.ndarray:
        return np.full(n, self.value)

    @property
    def support(self) -> tuple[float, float]:
        return (self.value, self.value)


@dataclass(frozen=True)
class Uniform:
    lo: float
    hi: float

    def __post_init__(self):
        if not (math.isfinite(self.lo) and math.isfinite(self.hi)):
            raise ValueError(f"uniform bounds must be finite, got {self}")
        if self.lo > self.hi:
            raise ValueError(f"uniform needs lo <= hi, got {self}")

    def sample(self, rng: RandomStream, n: int) -> np.ndarray:
        return self.lo + (self.hi - self.lo) * rng.random(n)

    @property
    def support(self) -> tuple[float, float]:
        return (self.lo, self.hi)


@dataclass(frozen=True)
class SumOfTwoUniforms:
    """``iota + sigma`` with ``iota ~ U(0, iw)`` and ``sigma ~ U(0, sw)``.

    The classical acceleration: triangular when ``iw == sw``, trapezoidal
    otherwise.
    """

    iw: float
    sw: float

    def __post_init__(self):
        if not (math.isfinite(self.iw) and math.isfinite(self.sw)):
            raise ValueError(f"weights must be finite, got {self}")
        if self.iw < 0 or self.sw < 0:
            raise ValueError(f"weights must be nonnegative, got {self}")

    def sample_parts(self, rng: RandomStream, n: int) -> tuple[np.ndarray, np.ndarray]:
        iota = self.iw * rng.random(n)
        sigma = self.sw * rng.random(n)
        return iota, sigma

    def sample(self, rng: RandomStream, n: int) -> np.ndarray:
        iota, sigma = self.sample_parts(rng, n)
        return iota + sigma

    @property
    def support(self) -> tuple[float, float]:
        return (0.0, self.iw + self.sw)

    def cdf(self, x):
        """Analytic CDF, by integrating the trapezoid."""
        x = np.asarray(x, dtype=float)
        a, b = sorted((self.iw, self.sw))
        if b == 0:
            return (x >= 0).astype(float)
        if a == 0:
            return np.clip(x / b, 0.0, 1.0)
        total = a + b
        out = np.empty_like(x)
        rising = x <= a
        flat = (x > a) & (x <= b)
        falling = (x > b) & (x < total)
        out[x <= 0] = 0.0
        out[rising & (x > 0)] = x[rising & (x > 0)] ** 2 / (2 * a * b)
        out[flat] = (2 * x[flat] - a) / (2 * b)
        out[falling] = 1.0 - (total - x[falling]) ** 2 / (2 * a * b)
        out[x >= total] = 1.0
        return out


@dataclass(frozen=True)
class Custom:
    """Distribution given by a named quantile table.

    ``probabilities`` runs from 0 to 1, strictly increasing; ``values`` are
    the matching quantiles, non-decreasing.  Draws use inverse-transform
    sampling with linear interpolation between table rows.
    """

    name: str
    probabilities: tuple[float, ...]
    values: tuple[float, ...]

    def __post_init__(self):
        object.__setattr__(self, "probabilities", tuple(float(v) for v in self.probabilities))
        object.__setattr__(self, "values", tuple(float(v) for v in self.values))
        p, v = self.probabilities, self.values
        if len(p) != len(v) or len(p) < 2:
            raise ValueError(f"quantile table {self.name!r} needs >= 2 matching rows")
        if p[0] != 0.0 or p[-1] != 1.0 or any(b <= a for a, b in zip(p, p[1:])):
            raise ValueError(f"probabilities of {self.name!r} must increase from 0 to 1")
        if not all(math.isfinite(x) for x in v) or any(b < a for a, b in zip(v, v[1:])):
            raise ValueError(f"quantiles of {self.name!r} must be finite and non-decreasing")

    def sample(self, rng: RandomStream, n: int) -> np.ndarray:
        return np.interp(rng.random(n), self.probabilities, self.values)

    @property
    def support(self) -> tuple[float, float]:
        return (self.values[0], self.values[-1])


CoefficientDistribution = Union[PointMass, Uniform, SumOfTwoUniforms, Custom]


def distribution_mean(dist: CoefficientDistribution) -> float:
    if isinstance(dist, PointMass):
        return dist.value
    if isinstance(dist, Uniform):
        return 0.5 * (dist.lo + dist.hi)
    if isinstance(dist, SumOfTwoUniforms):
        return 0.5 * (dist.iw + dist.sw)
    p, v = np.asarray(dist.probabilities), np.asarray(dist.values)
    # mean of a piecewise-linear quantile function
    return float(np.sum(np.diff(p) * (v[1:] + v[:-1]) / 2.0))


def sample_coefficient(dist: CoefficientDistribution, rng: RandomStream) -> float:
    return float(dist.sample(rng, 1)[0])


# -- scaling ---------------------------------------------------------------


class ScalingMode(enum.Enum):
    VECTOR = "vector"
    COMPONENT = "component"


class NegativeAccelerationError(ValueError):
    pass


@dataclass
class CoefficientSample:
    """Per-dimension coefficients for one position update.

    ``iota`` and ``sigma`` are the two uniform terms making up ``phi`` when
    it comes from :class:`SumOfTwoUniforms`, else None.
    """

    omega: np.ndarray
    phi: np.ndarray
    iota: np.ndarray | None = None
    sigma: np.ndarray | None = None


def _draw(dist: CoefficientDistribution, n: int, dims: int, rng: RandomStream):
    if type(dist) is SumOfTwoUniforms:
        iota, sigma = dist.sample_parts(rng, n)
        if n != dims:
            iota, sigma = np.full(dims, iota[0]), np.full(dims, sigma[0])
        return iota + sigma, iota, sigma
    values = dist.sample(rng, n)
    if n != dims:
        values = np.full(dims, values[0])
    return values, None, None


def sample_scaled_coefficients(
    phi_dist: CoefficientDistribution,
    omega_dist: CoefficientDistribution,
    mode: ScalingMode,
    dims: int,
    rng: RandomStream,
) -> CoefficientSample:
    """Draw ``(omega, phi)`` for every dimension of one position update.

    Vector scaling draws each coefficient once and repeats it across the
    dimensions; component scaling draws anew per dimension.  ``omega`` is
    drawn before ``phi``.
    """
    if dims < 1:
        raise ValueError(f"dims must be >= 1, got {dims}")
    n = dims if ScalingMode(mode) is ScalingMode.COMPONENT else 1
    omega, _, _ = _draw(omega_dist, n, dims, rng)
    phi, iota, sigma = _draw(phi_dist, n, dims, rng)
    if phi_dist.support[0] < 0 and phi.min() < 0:
        raise NegativeAccelerationError(
            f"{type(phi_dist).__name__} produced a negative acceleration {phi.min()}"
        )
    return CoefficientSample(omega=omega, phi=phi, iota=iota, sigma=sigma)


# -- attractor generation --------------------------------------------------


@dataclass(frozen=True)
class CoupledClassical:
    """Attractor weighted by the same random terms that make up ``phi``."""


@dataclass(frozen=True)
class DecoupledConvex:
    """Attractor ``lam * xb_i + (1 - lam) * xb_k`` with its own random ``lam``."""

    lambda_dist: CoefficientDistribution = field(default_factory=lambda: Uniform(0.0, 1.0))

    def __post_init__(self):
        lo, hi = self.lambda_dist.support
        if lo < 0.0 or hi > 1.0:
            raise ValueError(f"convex weight must lie in [0, 1], support is {(lo, hi)}")


AttractorCombiner = Union[CoupledClassical, DecoupledConvex]


class DegenerateWeightsError(ArithmeticError):
    pass


def combine_attractors(
    combiner: AttractorCombiner,
    xb_i,
    xb_k,
    phi_parts: tuple[Sequence[float], Sequence[float]] | None = None,
    rng: RandomStream | None = None,
    mode: ScalingMode = ScalingMode.VECTOR,
) -> np.ndarray:
    """Overall attractor from the individual and social attractors.

    The result always lies, coordinate by coordinate, between the two
    source attractors.
    """
    xb_i = np.asarray(xb_i, dtype=float)
    xb_k = np.asarray(xb_k, dtype=float)
    if xb_i.shape != xb_k.shape:
        raise ValueError(f"attractor shapes differ: {xb_i.shape} vs {xb_k.shape}")
    if isinstance(combiner, CoupledClassical):
        if phi_parts is None:
            raise ValueError("coupled combination needs the (iota, sigma) terms")
        iota = np.broadcast_to(np.asarray(phi_parts[0], dtype=float), xb_i.shape)
        sigma = np.broadcast_to(np.asarray(phi_parts[1], dtype=float), xb_i.shape)
        phi = iota + sigma
        if np.any(phi <= 0):
            raise DegenerateWeightsError("iota + sigma == 0; attractor undefined")
        p = (iota * xb_i + sigma * xb_k) / phi
    else:
        if rng is None:
            raise ValueError("decoupled combination needs a random stream")
        n = xb_i.size if ScalingMode(mode) is ScalingMode.COMPONENT else 1
        lam = combiner.lambda_dist.sample(rng, n)
        p = xb_k + lam * (xb_i - xb_k)
    # guard against one-ulp excursions from rounding
    return np.minimum(np.maximum(p, np.minimum(xb_i, xb_k)), np.maximum(xb_i, xb_k))
