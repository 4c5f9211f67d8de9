"""Queueing construction of multiclass configurations.

Arrivals A and services S are configurations read as time axes.  The walk Z
steps up at arrivals and down at services; services at which Z makes a new
strict record low are *unused*, the rest are *departures*.  Tandem
composition of that split builds nested (coupled) lines, and the priority
version of the same sweep builds the classes directly.
"""
from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from typing import Iterator, Sequence

import numpy as np

from . import _kernels as K
from .core import Configuration, Geometry
from .errors import (
    InvalidConfiguration,
    NotDisjoint,
    NotNested,
    PositionCollision,
    UnstableQueue,
)


def _raise_status(status: int, what: str) -> None:
    if status == K.OK:
        return
    if status == K.UNSTABLE:
        raise UnstableQueue(f"{what}: a queue on the cycle needs more services than arrivals")
    if status == K.COLLISION:
        raise PositionCollision(f"{what}: an arrival and a service share a position")
    raise RuntimeError(f"{what}: internal queue inconsistency (status {status})")


def _same_geometry(configs: Sequence[Configuration]) -> Geometry:
    if not configs:
        raise InvalidConfiguration("at least one configuration is required")
    g = configs[0].geometry
    for c in configs[1:]:
        if c.geometry != g:
            raise InvalidConfiguration("all configurations must share one geometry")
    return g


class _Stack:
    """Ordered tuple of configurations on a common geometry."""

    __slots__ = ("lines",)

    def __init__(self, lines: Sequence[Configuration]):
        lines = tuple(lines)
        _same_geometry(lines)
        self.lines = lines
        self._validate()

    def _validate(self) -> None:
        pass

    @classmethod
    def _trusted(cls, lines):
        obj = object.__new__(cls)
        obj.lines = tuple(lines)
        return obj

    @classmethod
    def from_arrays(cls, geometry: Geometry, arrays: Sequence[Sequence[float]]):
        return cls([Configuration(geometry, a) for a in arrays])

    @property
    def geometry(self) -> Geometry:
        return self.lines[0].geometry

    @property
    def n(self) -> int:
        return len(self.lines)

    def __len__(self) -> int:
        return len(self.lines)

    def __getitem__(self, k: int) -> Configuration:
        return self.lines[k]

    def __iter__(self) -> Iterator[Configuration]:
        return iter(self.lines)

    def __eq__(self, other: object) -> bool:
        if type(other) is not type(self):
            return NotImplemented
        return self.lines == other.lines

    def __hash__(self) -> int:
        return hash((type(self).__name__, self.lines))

    def counts(self) -> tuple[int, ...]:
        return tuple(len(c) for c in self.lines)

    def arrays(self) -> list[np.ndarray]:
        return [c.positions for c in self.lines]

    def __repr__(self) -> str:
        body = ", ".join(str(c.positions.tolist()) for c in self.lines)
        return f"{type(self).__name__}({body})"


class MultiLineConfig(_Stack):
    """Lines alpha^1..alpha^n with no structural constraint."""


class CoupledConfig(_Stack):
    """Nested lines eta^1 <= eta^2 <= ... <= eta^n."""

    def _validate(self) -> None:
        for k in range(len(self.lines) - 1):
            if not is_subset(self.lines[k].positions, self.lines[k + 1].positions):
                raise NotNested(f"line {k + 1} is not contained in line {k + 2}")


class MulticlassConfig(_Stack):
    """Pairwise disjoint classes xi^1..xi^n."""

    def _validate(self) -> None:
        merged = np.concatenate([c.positions for c in self.lines])
        if np.unique(merged).size != merged.size:
            raise NotDisjoint("classes share positions")

    def merged(self) -> tuple[np.ndarray, np.ndarray]:
        """All positions in order with their 0-based class index."""
        pos = np.concatenate([c.positions for c in self.lines])
        cls = np.concatenate(
            [np.full(len(c), k, np.int64) for k, c in enumerate(self.lines)]
        )
        order = np.argsort(pos, kind="stable")
        return pos[order], cls[order]


def is_subset(a: np.ndarray, b: np.ndarray) -> bool:
    """Exact containment of sorted float arrays."""
    if a.size == 0:
        return True
    idx = np.searchsorted(b, a)
    if idx[-1] >= b.size:
        return False
    return bool(np.array_equal(b[idx], a))


@dataclass(frozen=True, eq=False)
class QueueTrajectory:
    """Piecewise-constant queue path indexed by event positions.

    ``z[i]`` and ``q[i]`` are the walk and the per-class queue lengths right
    after event i.  ``q0`` is the queue just before the first event (zero on
    an interval, the periodic value on a cycle).
    """

    times: np.ndarray
    is_service: np.ndarray
    classes: np.ndarray
    z: np.ndarray
    q: np.ndarray
    q0: np.ndarray

    @property
    def n_classes(self) -> int:
        return int(self.q.shape[1])

    def total(self) -> np.ndarray:
        return self.q.sum(axis=1)

    def departures(self, cls: int | None = None) -> np.ndarray:
        served = self.is_service & (self.classes >= 0)
        if cls is not None:
            served &= self.classes == cls
        return self.times[served]

    def unused(self) -> np.ndarray:
        return self.times[self.is_service & (self.classes < 0)]

    def value_before(self, x: float) -> np.ndarray:
        """Per-class queue length at x- (left limit)."""
        i = int(np.searchsorted(self.times, x, "left"))
        return self.q0.copy() if i == 0 else self.q[i - 1].copy()


@dataclass(frozen=True, eq=False)
class FifoMatching:
    arrivals: np.ndarray
    departures: np.ndarray
    classes: np.ndarray

    def __len__(self) -> int:
        return int(self.arrivals.size)

    def pairs(self) -> list[tuple[float, float, int]]:
        return list(
            zip(self.arrivals.tolist(), self.departures.tolist(), (self.classes + 1).tolist())
        )

    def to_csv(self) -> str:
        lines = ["arrival,departure,class"]
        for a, d, c in self.pairs():
            lines.append(f"{a!r},{d!r},{c}")
        return "\n".join(lines) + "\n"


# --- array-level primitives -------------------------------------------------


def departures_array(a: np.ndarray, s: np.ndarray, cyclic: bool) -> tuple[np.ndarray, np.ndarray]:
    mask, status = K.departures_mask(a, s, cyclic)
    _raise_status(status, "split_departures_unused")
    return s[mask], s[~mask]


def priority_labels(lines: Sequence[np.ndarray], cyclic: bool) -> np.ndarray:
    """0-based class of every position of the last line.

    Stage k feeds all of line k-1, labelled by its stage-(k-1) classes, as
    arrivals to a priority queue served at line k; unused services become
    the new lowest class.
    """
    labels = np.zeros(lines[0].size, np.int64)
    for k in range(1, len(lines)):
        _, ev_srv, ev_cls, _, status = K.run_queue(lines[k - 1], labels, k, lines[k], cyclic)
        _raise_status(status, f"priority queue at line {k + 1}")
        served = ev_cls[ev_srv]
        labels = np.where(served < 0, k, served)
    return labels


def multiclass_arrays(lines: Sequence[np.ndarray], cyclic: bool) -> list[np.ndarray]:
    labels = priority_labels(lines, cyclic)
    last = lines[-1]
    return [last[labels == k] for k in range(len(lines))]


# --- public operators ---------------------------------------------------------


def split_departures_unused(A: Configuration, S: Configuration) -> tuple[Configuration, Configuration]:
    """Split services S into departures D and unused services U.

    On an interval the queue starts empty at the left edge; on a cycle it is
    the minimal periodic queue, which requires |S| > |A|.
    """
    g = _same_geometry([A, S])
    d, u = departures_array(A.positions, S.positions, g.is_cycle)
    return Configuration._trusted(g, d), Configuration._trusted(g, u)


def _as_class_list(arrivals: Configuration | Sequence[Configuration]) -> list[Configuration]:
    if isinstance(arrivals, Configuration):
        return [arrivals]
    if isinstance(arrivals, _Stack):
        return list(arrivals.lines)
    return list(arrivals)


def _merge_classes(arrivals: list[Configuration]) -> tuple[np.ndarray, np.ndarray]:
    if len(arrivals) == 1:
        a = arrivals[0].positions
        return a, np.zeros(a.size, np.int64)
    pos = np.concatenate([c.positions for c in arrivals])
    cls = np.concatenate([np.full(len(c), k, np.int64) for k, c in enumerate(arrivals)])
    order = np.argsort(pos, kind="stable")
    pos, cls = pos[order], cls[order]
    if pos.size > 1 and np.any(np.diff(pos) == 0.0):
        raise NotDisjoint("arrival classes share positions")
    return pos, cls


def queue_trajectory(
    arrivals: Configuration | Sequence[Configuration], services: Configuration
) -> QueueTrajectory:
    """Queue path for classed arrivals served under strict priority
    (class 1 first); one class gives the plain FIFO M/M/1-type queue."""
    arrivals = _as_class_list(arrivals)
    g = _same_geometry(arrivals + [services])
    pos, cls = _merge_classes(arrivals)
    n_cls = len(arrivals)
    ev_pos, ev_srv, ev_cls, q_after, status = K.run_queue(
        pos, cls, n_cls, services.positions, g.is_cycle
    )
    _raise_status(status, "queue_trajectory")
    z = np.cumsum(np.where(ev_srv, -1, 1)).astype(np.int64)
    q0 = q_after[-1].copy() if (g.is_cycle and ev_pos.size) else np.zeros(n_cls, np.int64)
    for arr in (ev_pos, ev_srv, ev_cls, z, q_after, q0):
        arr.flags.writeable = False
    return QueueTrajectory(ev_pos, ev_srv, ev_cls, z, q_after, q0)


def tandem_departures(*lines: Configuration) -> Configuration:
    """Departures from the last of n-1 queues in tandem: line 1 arrives at
    queue 1, line k+1 serves queue k, each queue feeds the next."""
    if len(lines) == 1 and isinstance(lines[0], (list, tuple, _Stack)):
        lines = tuple(lines[0])
    g = _same_geometry(lines)
    cur = lines[0].positions
    for k in range(1, len(lines)):
        cur, _ = departures_array(cur, lines[k].positions, g.is_cycle)
    return Configuration._trusted(g, cur)


def build_coupled(alpha: MultiLineConfig | Sequence[Configuration]) -> CoupledConfig:
    """eta^k = tandem departures of (alpha^k, ..., alpha^n)."""
    lines = _as_class_list(alpha)
    g = _same_geometry(lines)
    arrays = [c.positions for c in lines]
    n = len(arrays)
    eta = []
    for k in range(n):
        cur = arrays[k]
        for m in range(k + 1, n):
            cur, _ = departures_array(cur, arrays[m], g.is_cycle)
        eta.append(Configuration._trusted(g, cur))
    return CoupledConfig(eta)


def collapse_classes(eta: CoupledConfig | Sequence[Configuration]) -> MulticlassConfig:
    """xi^k = eta^k minus eta^(k-1)."""
    if not isinstance(eta, CoupledConfig):
        eta = CoupledConfig(eta)
    g = eta.geometry
    out = [eta.lines[0]]
    for k in range(1, eta.n):
        lo, hi = eta.lines[k - 1].positions, eta.lines[k].positions
        keep = ~np.isin(hi, lo)
        out.append(Configuration._trusted(g, hi[keep]))
    return MulticlassConfig._trusted(out)


def expand_classes(xi: MulticlassConfig | Sequence[Configuration]) -> CoupledConfig:
    """eta^k = xi^1 u ... u xi^k."""
    if not isinstance(xi, MulticlassConfig):
        xi = MulticlassConfig(xi)
    g = xi.geometry
    out = []
    acc = np.empty(0, np.float64)
    for c in xi.lines:
        acc = np.sort(np.concatenate([acc, c.positions]))
        out.append(Configuration._trusted(g, acc))
    return CoupledConfig._trusted(out)


def class_departures(
    arrivals: Configuration | Sequence[Configuration], services: Configuration
) -> tuple[list[Configuration], Configuration]:
    """One stage of the priority recursion.

    Returns the per-class departures at `services` and the unused services.
    The unused set is cross-checked against the single-class split of the
    merged arrivals; the two must coincide because priorities do not change
    the total queue length.
    """
    arrivals = _as_class_list(arrivals)
    g = _same_geometry(arrivals + [services])
    pos, cls = _merge_classes(arrivals)
    s = services.positions
    _, ev_srv, ev_cls, _, status = K.run_queue(pos, cls, len(arrivals), s, g.is_cycle)
    _raise_status(status, "class_departures")
    served = ev_cls[ev_srv]
    deps = [Configuration._trusted(g, s[served == i]) for i in range(len(arrivals))]
    unused = s[served < 0]
    _, u_single = departures_array(pos, s, g.is_cycle)
    if not np.array_equal(unused, u_single):
        raise RuntimeError("priority unused services differ from U(merged arrivals, services)")
    return deps, Configuration._trusted(g, unused)


def class_departures_by_splits(
    arrivals: Sequence[Configuration], services: Configuration
) -> tuple[list[Configuration], Configuration]:
    """Same stage computed class by class: class i is a FIFO queue served at
    the services left over by classes 1..i-1."""
    arrivals = _as_class_list(arrivals)
    g = _same_geometry(arrivals + [services])
    remaining = services.positions
    deps = []
    for a in arrivals:
        d, remaining = departures_array(a.positions, remaining, g.is_cycle)
        deps.append(Configuration._trusted(g, d))
    return deps, Configuration._trusted(g, remaining)


def map_multiclass(
    alpha: MultiLineConfig | Sequence[Configuration], method: str = "priority"
) -> MulticlassConfig:
    """The map M from multi-line to multiclass configurations.

    method="priority" runs the staged priority queues, "splits" runs the
    class-by-class recursion, "rc" collapses the coupled configuration.
    """
    lines = _as_class_list(alpha)
    g = _same_geometry(lines)
    if method == "rc":
        return collapse_classes(build_coupled(lines))
    if method not in ("priority", "splits"):
        raise ValueError(f"unknown method {method!r}")
    classes: list[Configuration] = [lines[0]]
    for k in range(1, len(lines)):
        if method == "priority":
            deps, unused = class_departures(classes, lines[k])
        else:
            deps, unused = class_departures_by_splits(classes, lines[k])
            _, u_direct = departures_array(lines[k - 1].positions, lines[k].positions, g.is_cycle)
            if not np.array_equal(unused.positions, u_direct):
                raise RuntimeError("leftover services differ from U(alpha^(k-1), alpha^k)")
        classes = deps + [unused]
    return MulticlassConfig(classes)


def fifo_links(
    arrivals: Configuration | Sequence[Configuration], services: Configuration
) -> FifoMatching:
    """Link every arrival to its departure, FIFO within each class.

    On an interval, customers still waiting at the right edge are left out.
    """
    arrivals = _as_class_list(arrivals)
    g = _same_geometry(arrivals + [services])
    pos, cls = _merge_classes(arrivals)
    n_cls = len(arrivals)
    ev_pos, ev_srv, ev_cls, _, status = K.run_queue(
        pos, cls, n_cls, services.positions, g.is_cycle
    )
    _raise_status(status, "fifo_links")
    m = ev_pos.size
    start = 0
    if g.is_cycle and m:
        z = np.cumsum(np.where(ev_srv, -1, 1))
        start = int(np.argmin(z)) + 1
    waiting = [deque() for _ in range(n_cls)]
    out_a, out_d, out_c = [], [], []
    for step in range(m):
        k = (start + step) % m
        c = int(ev_cls[k])
        if not ev_srv[k]:
            waiting[c].append(float(ev_pos[k]))
        elif c >= 0:
            out_a.append(waiting[c].popleft())
            out_d.append(float(ev_pos[k]))
            out_c.append(c)
    order = np.argsort(np.asarray(out_a), kind="stable")
    return FifoMatching(
        np.asarray(out_a, np.float64)[order],
        np.asarray(out_d, np.float64)[order],
        np.asarray(out_c, np.int64)[order],
    )
