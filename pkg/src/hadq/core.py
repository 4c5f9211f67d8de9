"""Geometries, particle configurations, space-time point fields and sampling.

Positions are float64 and are never recomputed once sampled: every operation
downstream copies them verbatim between sets, which is what makes exact set
equality between independent pipelines meaningful.
"""
from __future__ import annotations

import csv
import io
import json
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .errors import (
    EmptyConfiguration,
    InvalidConfiguration,
    InvalidParameters,
    NoLeftParticle,
    NoRightParticle,
    PositionCollision,
)

CYCLE = "cycle"
INTERVAL = "interval"


@dataclass(frozen=True)
class Geometry:
    kind: str
    length: float

    def __post_init__(self) -> None:
        if self.kind not in (CYCLE, INTERVAL):
            raise InvalidConfiguration(f"unknown geometry kind {self.kind!r}")
        if not self.length > 0:
            raise InvalidConfiguration(f"geometry length must be positive, got {self.length}")
        object.__setattr__(self, "length", float(self.length))

    @classmethod
    def cycle(cls, n: float) -> "Geometry":
        return cls(CYCLE, n)

    @classmethod
    def interval(cls, length: float) -> "Geometry":
        return cls(INTERVAL, length)

    @property
    def is_cycle(self) -> bool:
        return self.kind == CYCLE

    def contains(self, x: float) -> bool:
        return 0.0 <= x < self.length


def _frozen(values: Iterable[float] | np.ndarray) -> np.ndarray:
    arr = np.array(values, dtype=np.float64).reshape(-1)
    arr.flags.writeable = False
    return arr


@dataclass(frozen=True, eq=False)
class Configuration:
    """A finite, strictly increasing set of particle positions."""

    geometry: Geometry
    positions: np.ndarray

    def __post_init__(self) -> None:
        p = _frozen(self.positions)
        if p.size:
            if not np.all(np.isfinite(p)):
                raise InvalidConfiguration("positions must be finite")
            if p[0] < 0.0 or p[-1] >= self.geometry.length:
                raise InvalidConfiguration(
                    f"positions must lie in [0, {self.geometry.length})"
                )
            d = np.diff(p)
            if np.any(d == 0.0):
                raise PositionCollision("configuration has coincident positions")
            if np.any(d < 0.0):
                raise InvalidConfiguration("positions must be strictly increasing")
        object.__setattr__(self, "positions", p)

    @classmethod
    def from_unsorted(cls, geometry: Geometry, values: Iterable[float]) -> "Configuration":
        return cls(geometry, np.sort(np.asarray(list(values), dtype=np.float64)))

    @classmethod
    def _trusted(cls, geometry: Geometry, positions: np.ndarray) -> "Configuration":
        # Skips validation; callers guarantee a sorted, in-domain float64 array.
        obj = object.__new__(cls)
        p = np.asarray(positions, dtype=np.float64)
        if p.flags.writeable:
            p = p.copy()
            p.flags.writeable = False
        object.__setattr__(obj, "geometry", geometry)
        object.__setattr__(obj, "positions", p)
        return obj

    def __len__(self) -> int:
        return int(self.positions.size)

    def __iter__(self):
        return iter(self.positions.tolist())

    def __contains__(self, x: float) -> bool:
        i = np.searchsorted(self.positions, x)
        return bool(i < self.positions.size and self.positions[i] == x)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Configuration):
            return NotImplemented
        return self.geometry == other.geometry and np.array_equal(
            self.positions, other.positions
        )

    def __hash__(self) -> int:
        return hash((self.geometry, self.positions.tobytes()))

    def __repr__(self) -> str:
        return f"Configuration({self.geometry.kind}, {self.geometry.length:g}, {self.positions.tolist()})"

    def count_in(self, lo: float, hi: float) -> int:
        """Number of particles in the half-open window [lo, hi)."""
        p = self.positions
        return int(np.searchsorted(p, hi, "left") - np.searchsorted(p, lo, "left"))

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["position"])
        for x in self.positions.tolist():
            w.writerow([repr(x)])
        return buf.getvalue()

    def to_json(self) -> str:
        return json.dumps(
            {
                "geometry": self.geometry.kind,
                "length": self.geometry.length,
                "positions": self.positions.tolist(),
            }
        )

    @classmethod
    def from_csv(cls, geometry: Geometry, text: str) -> "Configuration":
        rows = list(csv.reader(io.StringIO(text)))
        if rows and rows[0] and rows[0][0].strip() == "position":
            rows = rows[1:]
        return cls(geometry, [float(r[0]) for r in rows if r])

    @classmethod
    def from_json(cls, text: str) -> "Configuration":
        doc = json.loads(text)
        return cls(Geometry(doc["geometry"], doc["length"]), doc["positions"])


@dataclass(frozen=True, eq=False)
class PointField:
    """Space-time Poisson points (x, t), ordered by time."""

    geometry: Geometry
    xs: np.ndarray
    ts: np.ndarray

    def __post_init__(self) -> None:
        xs, ts = _frozen(self.xs), _frozen(self.ts)
        if xs.shape != ts.shape:
            raise InvalidConfiguration("xs and ts must have equal length")
        if xs.size:
            if np.any(np.diff(ts) <= 0.0):
                raise InvalidConfiguration("point times must be strictly increasing")
            if ts[0] < 0.0:
                raise InvalidConfiguration("point times must be nonnegative")
            if xs.min() < 0.0 or xs.max() >= self.geometry.length:
                raise InvalidConfiguration("point positions outside the domain")
        object.__setattr__(self, "xs", xs)
        object.__setattr__(self, "ts", ts)

    @classmethod
    def from_pairs(cls, geometry: Geometry, pairs: Sequence[tuple[float, float]]) -> "PointField":
        pairs = sorted(pairs, key=lambda p: p[1])
        return cls(geometry, [p[0] for p in pairs], [p[1] for p in pairs])

    def __len__(self) -> int:
        return int(self.xs.size)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, PointField):
            return NotImplemented
        return (
            self.geometry == other.geometry
            and np.array_equal(self.xs, other.xs)
            and np.array_equal(self.ts, other.ts)
        )

    __hash__ = None  # type: ignore[assignment]

    def pairs(self) -> list[tuple[float, float]]:
        return list(zip(self.xs.tolist(), self.ts.tolist()))

    def restrict(self, t0: float, t1: float) -> "PointField":
        """Points with t0 < t <= t1."""
        lo = np.searchsorted(self.ts, t0, "right")
        hi = np.searchsorted(self.ts, t1, "right")
        return PointField(self.geometry, self.xs[lo:hi], self.ts[lo:hi])

    def shift_time(self, s: float) -> "PointField":
        """Time translation: (x, t) -> (x, t - s)."""
        return PointField(self.geometry, self.xs, self.ts - s)

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["x", "t"])
        for x, t in zip(self.xs.tolist(), self.ts.tolist()):
            w.writerow([repr(x), repr(t)])
        return buf.getvalue()

    def to_json(self) -> str:
        return json.dumps(
            {
                "geometry": self.geometry.kind,
                "length": self.geometry.length,
                "points": [[x, t] for x, t in zip(self.xs.tolist(), self.ts.tolist())],
            }
        )

    @classmethod
    def from_csv(cls, geometry: Geometry, text: str) -> "PointField":
        rows = list(csv.reader(io.StringIO(text)))
        if rows and rows[0] and rows[0][0].strip() == "x":
            rows = rows[1:]
        rows = [r for r in rows if r]
        return cls(geometry, [float(r[0]) for r in rows], [float(r[1]) for r in rows])

    @classmethod
    def from_json(cls, text: str) -> "PointField":
        doc = json.loads(text)
        pts = doc["points"]
        return cls(
            Geometry(doc["geometry"], doc["length"]),
            [p[0] for p in pts],
            [p[1] for p in pts],
        )


@dataclass(frozen=True)
class RngStream:
    """Named random stream: identical (seed, index) reproduce identical draws."""

    seed: int
    index: int = 0

    def generator(self) -> np.random.Generator:
        ss = np.random.SeedSequence(entropy=int(self.seed) & (2**64 - 1), spawn_key=(int(self.index),))
        return np.random.Generator(np.random.PCG64(ss))

    def child(self, index: int) -> "RngStream":
        return RngStream(self.seed, index)


def as_generator(rng: np.random.Generator | RngStream | int) -> np.random.Generator:
    if isinstance(rng, np.random.Generator):
        return rng
    if isinstance(rng, RngStream):
        return rng.generator()
    return RngStream(int(rng)).generator()


def sample_configuration(
    geometry: Geometry,
    rng: np.random.Generator | RngStream | int,
    *,
    rate: float | None = None,
    count: int | None = None,
) -> Configuration:
    """Poisson(rate) points, or exactly `count` uniform order statistics."""
    if (rate is None) == (count is None):
        raise InvalidParameters("give exactly one of rate= or count=")
    g = as_generator(rng)
    if rate is not None:
        if not rate > 0:
            raise InvalidParameters(f"rate must be positive, got {rate}")
        count = int(g.poisson(rate * geometry.length))
    elif count < 0:
        raise InvalidParameters(f"count must be nonnegative, got {count}")
    pos = np.sort(g.uniform(0.0, geometry.length, size=int(count)))
    if pos.size > 1 and np.any(np.diff(pos) == 0.0):
        raise PositionCollision("sampled coincident positions")
    return Configuration._trusted(geometry, pos)


def sample_point_field(
    geometry: Geometry, horizon: float, rng: np.random.Generator | RngStream | int
) -> PointField:
    """Rate-1 Poisson points on domain x (0, horizon]."""
    if horizon < 0:
        raise InvalidParameters(f"horizon must be nonnegative, got {horizon}")
    g = as_generator(rng)
    k = int(g.poisson(geometry.length * horizon)) if horizon > 0 else 0
    ts = np.sort(g.uniform(0.0, horizon, size=k))
    xs = g.uniform(0.0, geometry.length, size=k)
    return PointField(geometry, xs, ts)


def nearest_left(config: Configuration, x: float) -> float:
    """Closest particle strictly left of x; wraps to the maximum on a cycle."""
    p = config.positions
    if p.size == 0:
        raise EmptyConfiguration("nearest_left on an empty configuration")
    i = int(np.searchsorted(p, x, "left"))
    if i < p.size and p[i] == x:
        raise PositionCollision(f"query point {x!r} coincides with a particle")
    if i == 0:
        if config.geometry.is_cycle:
            return float(p[-1])
        raise NoLeftParticle(f"no particle left of {x!r}")
    return float(p[i - 1])


def nearest_right(config: Configuration, x: float) -> float:
    """Closest particle strictly right of x; wraps to the minimum on a cycle."""
    p = config.positions
    if p.size == 0:
        raise EmptyConfiguration("nearest_right on an empty configuration")
    j = int(np.searchsorted(p, x, "right"))
    if j > 0 and p[j - 1] == x:
        raise PositionCollision(f"query point {x!r} coincides with a particle")
    if j == p.size:
        if config.geometry.is_cycle:
            return float(p[0])
        raise NoRightParticle(f"no particle right of {x!r}")
    return float(p[j])


def replace_position(config: Configuration, old: float, new: float) -> Configuration:
    """config \\ {old} u {new}."""
    p = config.positions
    i = int(np.searchsorted(p, old))
    if i >= p.size or p[i] != old:
        raise InvalidConfiguration(f"{old!r} is not a particle")
    j = int(np.searchsorted(p, new))
    if j < p.size and p[j] == new:
        raise PositionCollision(f"{new!r} is already occupied")
    if not (np.isfinite(new) and config.geometry.contains(new)):
        raise InvalidConfiguration(f"{new!r} lies outside [0, {config.geometry.length})")
    out = p.copy()
    if j > i:
        out[i : j - 1] = p[i + 1 : j]
        out[j - 1] = new
    else:
        out[j + 1 : i + 1] = p[j:i]
        out[j] = new
    return Configuration._trusted(config.geometry, out)