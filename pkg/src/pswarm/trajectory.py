"""Deterministic trajectory of a single particle pulled by a stationary attractor.

The position update is the second order recurrence

    x(t+1) = x(t) + w * (x(t) - x(t-1)) + phi * (p - x(t))

with reference inertia ``w`` and reference acceleration ``phi``.  This module
solves it in closed form, analyses the roots of its characteristic polynomial
``r**2 - (1 + w - phi) * r + w`` and picks coefficients for a wanted type of
behaviour and convergence speed.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import Iterator, NamedTuple

__all__ = [
    "Behaviour",
    "BehaviourClass",
    "GridCell",
    "ReferenceCoefficients",
    "RootAnalysis",
    "RootCase",
    "TrajectoryInitialState",
    "characteristic_roots",
    "classify_behaviour",
    "closed_form_position",
    "coefficients_for",
    "convergence_triangle",
    "dominant_root_grid",
    "gamma_squared",
    "inside_convergence_triangle",
    "is_repeated",
    "iterate_recurrence",
    "oscillation_angle",
    "step_recurrence",
    "write_grid_csv",
]


class RootCase(enum.Enum):
    REAL_DISTINCT = "RealDistinct"
    REAL_REPEATED = "RealRepeated"
    COMPLEX_CONJUGATE = "ComplexConjugate"


class Behaviour(enum.Enum):
    OSCILLATORY = "Oscillatory"
    MONOTONIC = "Monotonic"
    ZIGZAGGING = "Zigzagging"


@dataclass(frozen=True)
class ReferenceCoefficients:
    """Deterministic inertia ``omega`` and acceleration ``phi``."""

    omega: float
    phi: float

    def __post_init__(self):
        if not (math.isfinite(self.omega) and math.isfinite(self.phi)):
            raise ValueError(f"coefficients must be finite, got {self}")
        if self.phi < 0:
            raise ValueError(f"acceleration coefficient must be >= 0, got {self.phi}")


@dataclass(frozen=True)
class RootAnalysis:
    case: RootCase
    r1: complex
    r2: complex
    gamma_sq: float
    dominant_magnitude: float
    dominant_sign: int | None  # +1, -1, or None for complex roots
    convergent: bool

    @property
    def rate(self) -> float:
        return self.dominant_magnitude


@dataclass(frozen=True)
class BehaviourClass:
    kind: Behaviour
    convergent: bool
    rate: float


@dataclass(frozen=True)
class TrajectoryInitialState:
    x0: float
    x1: float
    p: float

    def __post_init__(self):
        if not all(math.isfinite(v) for v in (self.x0, self.x1, self.p)):
            raise ValueError(f"initial state must be finite, got {self}")


def gamma_squared(c: ReferenceCoefficients) -> float:
    """Discriminant of the characteristic polynomial."""
    s = 1.0 + c.omega - c.phi
    return s * s - 4.0 * c.omega


def is_repeated(c: ReferenceCoefficients, gamma_sq: float | None = None) -> bool:
    """Whether the roots are treated as coincident.

    Exact equality is meaningless in floating point, so a relative band of
    1e-12 around zero counts as the repeated-root case.
    """
    if gamma_sq is None:
        gamma_sq = gamma_squared(c)
    return abs(gamma_sq) <= 1e-12 * max(1.0, c.phi ** 2, c.omega ** 2)


def characteristic_roots(c: ReferenceCoefficients) -> RootAnalysis:
    """Roots of ``r**2 - (1 + omega - phi) r + omega`` and their properties."""
    s = 1.0 + c.omega - c.phi
    g2 = s * s - 4.0 * c.omega
    if is_repeated(c, g2):
        r = s / 2.0
        r1 = r2 = complex(r, 0.0)
        case = RootCase.REAL_REPEATED
        magnitude = abs(r)
        sign = _sign(r)
    elif g2 > 0:
        gamma = math.sqrt(g2)
        # the larger-magnitude root is computed directly and the other one
        # from the product, which avoids cancellation
        big = (s + math.copysign(gamma, s)) / 2.0 if s != 0 else gamma / 2.0
        small = c.omega / big
        if s >= 0:
            a, b = big, small
        else:
            a, b = small, big
        r1, r2 = complex(a, 0.0), complex(b, 0.0)
        case = RootCase.REAL_DISTINCT
        dominant = big
        magnitude = abs(dominant)
        sign = _sign(dominant)
    else:
        gamma_p = math.sqrt(-g2)
        r1 = complex(s / 2.0, gamma_p / 2.0)
        r2 = r1.conjugate()
        case = RootCase.COMPLEX_CONJUGATE
        # |r1|**2 = r1 * r2 = omega
        magnitude = math.sqrt(c.omega)
        sign = None
    return RootAnalysis(
        case=case,
        r1=r1,
        r2=r2,
        gamma_sq=g2,
        dominant_magnitude=magnitude,
        dominant_sign=sign,
        convergent=magnitude < 1.0,
    )


def _sign(v: float) -> int | None:
    if v > 0:
        return 1
    if v < 0:
        return -1
    return None


def inside_convergence_triangle(c: ReferenceCoefficients) -> bool:
    """The three strict inequalities bounding the convergent region."""
    return c.omega < 1.0 and c.phi > 0.0 and c.omega > c.phi / 2.0 - 1.0


def classify_behaviour(c: ReferenceCoefficients) -> BehaviourClass:
    """Type of behaviour from the sign of the dominant root.

    Complex roots give oscillation; a real dominant root gives monotonic
    approach when positive and zigzagging when negative.  A repeated root at
    zero has no sign and is reported as monotonic (the particle lands on the
    attractor after two steps and stays).
    """
    roots = characteristic_roots(c)
    if roots.case is RootCase.COMPLEX_CONJUGATE:
        kind = Behaviour.OSCILLATORY
    elif roots.dominant_sign == -1:
        kind = Behaviour.ZIGZAGGING
    else:
        kind = Behaviour.MONOTONIC
    return BehaviourClass(
        kind=kind,
        convergent=inside_convergence_triangle(c),
        rate=roots.dominant_magnitude,
    )


def step_recurrence(x_curr: float, x_prev: float, c: ReferenceCoefficients, p: float) -> float:
    return x_curr + c.omega * (x_curr - x_prev) + c.phi * (p - x_curr)


def iterate_recurrence(c: ReferenceCoefficients, init: TrajectoryInitialState, t: int) -> Iterator[float]:
    """Yield ``x(0), x(1), ..., x(t)`` by stepping the recurrence."""
    prev, curr = init.x0, init.x1
    yield prev
    if t >= 1:
        yield curr
    for _ in range(t - 1):
        prev, curr = curr, step_recurrence(curr, prev, c, init.p)
        yield curr


def closed_form_position(c: ReferenceCoefficients, init: TrajectoryInitialState, t: int) -> float:
    """Position at time ``t`` from the closed-form solution of the recurrence.

    Dispatches on the sign of the discriminant ``gamma**2``: two distinct
    real roots, one repeated root, or a complex-conjugate pair (polar form).
    The attractor ``p`` is stationary.

    Close to the repeated-root boundary the distinct-root and polar forms
    subtract two terms of order ``1 / gamma``.  While ``t * |gamma|`` is
    small against ``|1 + omega - phi|`` the same solution is summed instead
    as a series in ``gamma**2`` whose leading term is the repeated-root
    form.
    """
    if t < 0 or int(t) != t:
        raise ValueError(f"t must be a nonnegative integer, got {t}")
    t = int(t)
    if t == 0:
        return init.x0
    if t == 1:
        return init.x1
    p = init.p
    a = p - init.x0
    b = p - init.x1
    s = 1.0 + c.omega - c.phi
    g2 = s * s - 4.0 * c.omega

    repeated = is_repeated(c, g2)
    if repeated and s == 0.0:
        # omega = 0, phi = 1: one step maps any position onto p
        return p
    if g2 != 0.0 and t * t * abs(g2) <= 0.25 * s * s:
        # also taken inside the repeated-root band, where dropping gamma**2
        # altogether would cost accuracy on diverging trajectories
        return p + a * c.omega * _power_sum(s, g2, t - 1) - b * _power_sum(s, g2, t)
    if repeated:
        r = s / 2.0
        return p + (-a + (a - 2.0 * b / s) * t) * r ** t

    if g2 > 0:
        gamma = math.sqrt(g2)
        # the smaller root from r1 * r2 = omega avoids cancellation in s -+ gamma
        big = (s + math.copysign(gamma, s)) / 2.0
        small = c.omega / big
        r1, r2 = (big, small) if s >= 0 else (small, big)
        return p + (r2 * a - b) / gamma * r1 ** t + (-r1 * a + b) / gamma * r2 ** t

    if c.omega <= 0:
        raise ArithmeticError(
            f"complex roots with omega={c.omega} <= 0 contradict r1 * r2 = omega"
        )
    gamma_p = math.sqrt(-g2)
    rho = math.sqrt(c.omega)
    theta = math.acos(max(-1.0, min(1.0, s / (2.0 * rho))))
    rho_t = rho ** t
    return (
        p
        - rho_t * a * math.cos(theta * t)
        + rho_t * ((s * a - 2.0 * b) / gamma_p) * math.sin(theta * t)
    )


def _power_sum(s: float, g2: float, n: int) -> float:
    """``(r1**n - r2**n) / (r1 - r2)`` as a polynomial in ``gamma**2``.

    With ``m = s / 2`` and ``h = gamma**2 / 4`` the quotient equals
    ``sum_j C(n, 2j + 1) m**(n - 2j - 1) h**j``; callers keep
    ``n**2 * h / m**2 <= 1/4`` so the terms shrink quickly.
    """
    m = s / 2.0
    ratio = g2 / (4.0 * m * m)
    term = n * m ** (n - 1)
    total = term
    j = 0
    while 2 * j + 3 <= n:
        term *= (n - 2 * j - 1) * (n - 2 * j - 2) / ((2 * j + 2) * (2 * j + 3)) * ratio
        total += term
        if abs(term) <= 1e-17 * abs(total):
            break
        j += 1
    return total


def oscillation_angle(c: ReferenceCoefficients) -> float:
    """Polar angle of the complex roots; only defined when they are complex."""
    g2 = gamma_squared(c)
    if g2 >= 0 or is_repeated(c, g2):
        raise ValueError(f"roots of {c} are real")
    rho = math.sqrt(c.omega)
    return math.atan2(math.sqrt(-g2) / (2.0 * rho), (1.0 + c.omega - c.phi) / (2.0 * rho))


def coefficients_for(kind: Behaviour | str, speed: float, phi_fraction: float = 0.5) -> ReferenceCoefficients:
    """Pick reference coefficients with a given behaviour and convergence rate.

    Parameters
    ----------
    kind
        Wanted type of behaviour.
    speed
        Magnitude of the dominant root, in [0, 1]; 0 is the fastest.
    phi_fraction
        Position inside the admissible interval, in (0, 1).  For oscillatory
        settings it interpolates ``phi`` between ``(sqrt(w) - 1)**2`` and
        ``(sqrt(w) + 1)**2``.  For real-root settings it is the ratio of the
        secondary root to the dominant one.
    """
    kind = Behaviour(kind) if not isinstance(kind, Behaviour) else kind
    if not 0.0 <= speed <= 1.0:
        raise ValueError(f"speed must lie in [0, 1], got {speed}")
    if not 0.0 < phi_fraction < 1.0:
        raise ValueError(f"phi_fraction must lie in (0, 1), got {phi_fraction}")

    if kind is Behaviour.OSCILLATORY:
        omega = speed * speed
        root = math.sqrt(omega)
        lo, hi = (root - 1.0) ** 2, (root + 1.0) ** 2
        return ReferenceCoefficients(omega=omega, phi=lo + phi_fraction * (hi - lo))

    if speed == 0.0:
        return ReferenceCoefficients(omega=0.0, phi=1.0)

    # dominant root r = +-speed, secondary root r2 = phi_fraction * r, so
    # omega = r * r2 and phi = 1 + omega - (r + r2)
    r = speed if kind is Behaviour.MONOTONIC else -speed
    fraction = phi_fraction
    for _ in range(60):
        r2 = fraction * r
        omega = r * r2
        c = ReferenceCoefficients(omega=omega, phi=1.0 + omega - (r + r2))
        roots = characteristic_roots(c)
        if (
            classify_behaviour(c).kind is kind
            and roots.case is RootCase.REAL_DISTINCT
            and roots.dominant_magnitude <= speed + 1e-9
        ):
            return c
        # too close to the repeated-root boundary: halve the secondary root
        fraction /= 2.0
    raise ArithmeticError(f"no {kind.value} coefficients found for speed={speed}")


def convergence_triangle() -> tuple[tuple[float, float], ...]:
    """Vertices ``(omega, phi)`` of the convergent region.

    Bounded by the lines omega = 1, phi = 0 and omega = phi / 2 - 1.
    """
    return ((-1.0, 0.0), (1.0, 0.0), (1.0, 4.0))


class GridCell(NamedTuple):
    omega: float
    phi: float
    rate: float
    kind: Behaviour
    convergent: bool


def _axis(lo: float, hi: float, n: int) -> list[float]:
    # cells anchored at their lower corner; the upper edge is excluded
    return [lo + (hi - lo) * k / n for k in range(n)]


def dominant_root_grid(
    omega_range: tuple[float, float] = (-1.0, 2.0),
    phi_range: tuple[float, float] = (0.0, 5.0),
    resolution: int | tuple[int, int] = 300,
) -> list[GridCell]:
    """Dominant-root magnitude and behaviour over a rectangular grid.

    Rows are ordered with ``omega`` as the outer index.  Each axis is split
    into ``resolution`` cells of equal width and sampled at the lower corner
    of every cell.
    """
    if isinstance(resolution, int):
        n_omega = n_phi = resolution
    else:
        n_omega, n_phi = resolution
    if n_omega < 2 or n_phi < 2:
        raise ValueError("resolution must be >= 2 along each axis")
    for lo, hi in (omega_range, phi_range):
        if not (math.isfinite(lo) and math.isfinite(hi)) or lo >= hi:
            raise ValueError(f"invalid range [{lo}, {hi}]")
    if phi_range[0] < 0:
        raise ValueError("phi range must be nonnegative")

    cells = []
    for omega in _axis(*omega_range, n_omega):
        for phi in _axis(*phi_range, n_phi):
            cls = classify_behaviour(ReferenceCoefficients(omega, phi))
            cells.append(GridCell(omega, phi, cls.rate, cls.kind, cls.convergent))
    return cells


def write_grid_csv(cells, stream) -> None:
    """Write grid cells as ``omega,phi,rate,kind,convergent`` rows."""
    stream.write("omega,phi,rate,kind,convergent\n")
    for cell in cells:
        stream.write(
            f"{cell.omega!r},{cell.phi!r},{cell.rate!r},{cell.kind.value},"
            f"{'true' if cell.convergent else 'false'}\n"
        )
