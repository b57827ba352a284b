"""Per-particle neighbourhoods and the connectivity matrix they assemble into.

Each particle carries its own local sociometry: a topology rule that lists
the particles informing it.  Assembling every particle's list gives the
global informer graph, which need not be regular or symmetric when
particles use different rules.  Indices are 0-based.
"""

from __future__ import annotations

import io
from dataclasses import dataclass
from typing import Sequence, Union

import numpy as np


class InvalidSociometryError(ValueError):
    pass


@dataclass(frozen=True)
class Global:
    include_self: bool = True


@dataclass(frozen=True)
class Ring:
    """``k`` neighbours on each side, with wrap-around."""

    k: int = 1
    include_self: bool = True


@dataclass(frozen=True)
class Forward:
    """The next ``k`` particles by index, with wrap-around."""

    k: int = 1
    include_self: bool = True


@dataclass(frozen=True)
class Wheel:
    """Star around ``hub``: the hub hears everyone, the others only the hub."""

    hub: int = 0
    include_self: bool = True


LocalSociometrySpec = Union[Global, Ring, Forward, Wheel]


def _validate(spec: LocalSociometrySpec, m: int) -> None:
    if isinstance(spec, (Ring, Forward)):
        if spec.k < 1 or spec.k >= m:
            raise InvalidSociometryError(
                f"{type(spec).__name__} extent must be in [1, {m - 1}] for m={m}, got {spec.k}"
            )
    elif isinstance(spec, Wheel):
        if not 0 <= spec.hub < m:
            raise InvalidSociometryError(f"wheel hub {spec.hub} out of range for m={m}")
    elif not isinstance(spec, Global):
        raise InvalidSociometryError(f"unknown topology {spec!r}")


def build_local_neighbourhood(spec: LocalSociometrySpec, i: int, m: int) -> frozenset[int]:
    """Informers of particle ``i`` in a swarm of ``m``, excluding ``i`` itself."""
    if not 0 <= i < m:
        raise IndexError(f"particle {i} out of range for m={m}")
    _validate(spec, m)
    if isinstance(spec, Global):
        found = set(range(m))
    elif isinstance(spec, Ring):
        found = {(i + d) % m for d in range(1, spec.k + 1)}
        found |= {(i - d) % m for d in range(1, spec.k + 1)}
    elif isinstance(spec, Forward):
        found = {(i + d) % m for d in range(1, spec.k + 1)}
    elif spec.hub == i:
        found = set(range(m))
    else:
        found = {spec.hub}
    found.discard(i)
    return frozenset(found)


@dataclass(frozen=True)
class ConnectivityMatrix:
    """Boolean informer matrix.

    ``informers[i, j]`` is True iff the memory of particle ``j`` informs
    particle ``i``.  The diagonal is kept apart in ``self_flags``.
    """

    informers: np.ndarray
    self_flags: np.ndarray

    def __post_init__(self):
        self.informers.setflags(write=False)
        self.self_flags.setflags(write=False)

    @property
    def m(self) -> int:
        return self.informers.shape[0]

    def dense(self) -> np.ndarray:
        """Matrix with the self flags written onto the diagonal."""
        out = self.informers.copy()
        np.fill_diagonal(out, self.self_flags)
        return out

    def to_csv(self) -> str:
        """0/1 rows, with ``X`` on the diagonal of self-including particles."""
        buf = io.StringIO()
        for i in range(self.m):
            cells = []
            for j in range(self.m):
                if i == j:
                    cells.append("X" if self.self_flags[i] else "0")
                else:
                    cells.append("1" if self.informers[i, j] else "0")
            buf.write(",".join(cells) + "\n")
        return buf.getvalue()


def assemble_connectivity(specs: Sequence[LocalSociometrySpec]) -> ConnectivityMatrix:
    m = len(specs)
    if m == 0:
        raise InvalidSociometryError("empty swarm")
    informers = np.zeros((m, m), dtype=bool)
    self_flags = np.zeros(m, dtype=bool)
    for i, spec in enumerate(specs):
        for j in build_local_neighbourhood(spec, i, m):
            informers[i, j] = True
        self_flags[i] = spec.include_self
        if not self_flags[i] and not informers[i].any():
            raise InvalidSociometryError(f"particle {i} has no informer")
    return ConnectivityMatrix(informers, self_flags)


def informers(matrix: ConnectivityMatrix, i: int) -> list[int]:
    """Sorted informer indices of particle ``i``, with ``i`` iff it informs itself."""
    if not 0 <= i < matrix.m:
        raise IndexError(f"particle {i} out of range for m={matrix.m}")
    row = matrix.informers[i].copy()
    row[i] = matrix.self_flags[i]
    return [int(j) for j in np.flatnonzero(row)]
