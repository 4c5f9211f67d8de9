"""Palm recentring, shock initial conditions and regeneration strings."""
from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from ..core import Configuration, as_generator
from ..errors import EmptyClass, InvalidConfiguration, InvalidParameters, NoOriginParticle
from ..queueing import CoupledConfig, MulticlassConfig

READINGS = ("A", "B")


def palm_recenter(xi: MulticlassConfig, k: int, rng) -> MulticlassConfig:
    """Rotate the cycle so that a uniformly chosen class-k particle sits at 0.

    Classes are numbered from 1.  Under a rotation-invariant law this gives
    the law conditioned on a class-k particle at the origin.
    """
    g = xi.geometry
    if not g.is_cycle:
        raise InvalidConfiguration("palm_recenter needs a cycle")
    if not 1 <= k <= xi.n:
        raise InvalidParameters(f"class {k} outside 1..{xi.n}")
    own = xi.lines[k - 1].positions
    if own.size == 0:
        raise EmptyClass(f"class {k} is empty")
    gen = as_generator(rng)
    p = own[int(gen.integers(own.size))]
    n = g.length
    top = np.nextafter(n, 0.0)
    out = []
    for line in xi.lines:
        y = line.positions - p
        y = np.where(y < 0.0, y + n, y)
        y = np.minimum(y, top)  # x slightly below p can round up to n
        out.append(Configuration(g, np.sort(y)))
    return MulticlassConfig(out)


def shock_construct(
    xi: MulticlassConfig, origin: float = 0.0, reading: str = "A"
) -> tuple[Configuration, Configuration]:
    """Single-class configuration with a shock at `origin`, and the same
    configuration with the origin particle added back.

    ``xi`` has two classes and a class-2 particle at `origin`.
    Reading "A": every particle left of the origin and the class-1
    particles right of it.  Reading "B": class-1 particles left of the
    origin together with all class-2 particles except the one at the origin.
    """
    if reading not in READINGS:
        raise InvalidParameters(f"reading must be one of {READINGS}, got {reading!r}")
    if xi.n != 2:
        raise InvalidParameters("shock_construct expects two classes")
    c1, c2 = xi.lines[0].positions, xi.lines[1].positions
    if origin not in xi.lines[1]:
        raise NoOriginParticle(f"no class-2 particle at {origin!r}")
    if reading == "A":
        parts = [c1[c1 < origin], c2[c2 < origin], c1[c1 > origin]]
    else:
        parts = [c1[c1 < origin], c2[c2 != origin]]
    eta = Configuration(xi.geometry, np.sort(np.concatenate(parts)))
    j = int(np.searchsorted(eta.positions, origin))
    eta_prime = Configuration(xi.geometry, np.insert(eta.positions, j, origin))
    return eta, eta_prime


@dataclass(frozen=True)
class ShockState:
    """Configuration, discrepancy position and the densities either side."""

    eta: Configuration
    position: float
    left_density: float
    right_density: float

    @classmethod
    def from_pair(cls, eta: Configuration, eta_prime: Configuration, width: float) -> "ShockState":
        extra = eta_prime.positions[~np.isin(eta_prime.positions, eta.positions)]
        if extra.size != 1 or len(eta_prime) != len(eta) + 1:
            raise InvalidConfiguration("configurations must differ in exactly one particle")
        x = float(extra[0])
        p = eta.positions
        left = np.count_nonzero((p >= x - width) & (p < x))
        right = np.count_nonzero((p > x) & (p <= x + width))
        return cls(eta, x, left / width, right / width)

    @classmethod
    def from_coupled(cls, pair: CoupledConfig, width: float) -> "ShockState":
        return cls.from_pair(pair.lines[0], pair.lines[1], width)


def is_regeneration_string(c: Sequence[int], n: int) -> bool:
    """Class pattern that starts at class n, ends at class 2, and for every
    middle class m has an occurrence of m followed only by classes <= m."""
    c = list(c)
    if len(c) < 2 or c[0] != n or c[-1] != 2:
        return False
    if any(not 1 <= v <= n for v in c):
        return False
    for m in range(3, n):
        ok = False
        for j in range(len(c) - 1):
            if c[j] == m and all(v <= m for v in c[j + 1 :]):
                ok = True
                break
        if not ok:
            return False
    return True


def find_string(classes: np.ndarray, c: Sequence[int], start: int = 0) -> int:
    """First index i >= start with classes[i:i+len(c)] == c, or -1."""
    c = np.asarray(c)
    m = c.size
    cand = np.flatnonzero(classes[start : classes.size - m + 1] == c[0]) + start
    for i in cand:
        if np.array_equal(classes[i : i + m], c):
            return int(i)
    return -1
