"""Harris-construction dynamics for single, coupled, multiclass and
multi-line Hammersley processes.

The ``*_step`` functions are the direct one-point rules, written against the
public configuration types.  ``evolve`` applies whole point fields through
the compiled kernels; the two paths are checked against each other in the
test-suite.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence, Union

import numpy as np

from . import _kernels as K
from .core import Configuration, PointField, nearest_left, nearest_right, replace_position
from .errors import EmptyConfiguration, InvalidConfiguration, PositionCollision
from .queueing import (
    CoupledConfig,
    MulticlassConfig,
    MultiLineConfig,
    collapse_classes,
    expand_classes,
)

State = Union[Configuration, CoupledConfig, MulticlassConfig, MultiLineConfig]


def _check_free(lines: Sequence[Configuration], x: float) -> None:
    for c in lines:
        if x in c:
            raise PositionCollision(f"{x!r} is already occupied")


def had_step(eta: Configuration, x: float) -> Configuration:
    """The nearest particle left of x (cyclically, the rightmost one when
    nothing lies left of x) jumps to x."""
    if len(eta) == 0:
        raise EmptyConfiguration("had_step on an empty configuration")
    u = nearest_left(eta, x)
    return replace_position(eta, u, x)


def had_reverse_step(eta: Configuration, y: float) -> Configuration:
    """Left-drift mirror of had_step: the nearest particle right of y jumps to y."""
    if len(eta) == 0:
        raise EmptyConfiguration("had_reverse_step on an empty configuration")
    v = nearest_right(eta, y)
    return replace_position(eta, v, y)


def coupled_step(eta: CoupledConfig, x: float) -> CoupledConfig:
    _check_free(eta.lines, x)
    return CoupledConfig([had_step(line, x) for line in eta.lines])


def multiclass_step(xi: MulticlassConfig, x: float) -> MulticlassConfig:
    return collapse_classes(coupled_step(expand_classes(xi), x))


def multiline_step(alpha: MultiLineConfig, x: float) -> tuple[MultiLineConfig, tuple[float, ...]]:
    """Cascade jump: x^n is the nearest alpha^n particle left of x, then x^k
    the nearest alpha^k particle left of x^(k+1); line k loses x^k and gains
    x^(k+1).  Returns the new stack and (x^1, ..., x^n)."""
    n = alpha.n
    new = list(alpha.lines)
    jumps = [0.0] * n
    target = x
    for k in range(n - 1, -1, -1):
        line = alpha.lines[k]
        if len(line) == 0:
            raise EmptyConfiguration(f"line {k + 1} is empty")
        xk = nearest_left(line, target)
        new[k] = replace_position(line, xk, target)
        jumps[k] = xk
        target = xk
    return MultiLineConfig(new), tuple(jumps)


def multiline_reverse_step(
    alpha: MultiLineConfig, y: float
) -> tuple[MultiLineConfig, tuple[float, ...]]:
    """Reverse cascade: y^1 is the nearest alpha^1 particle right of y, then
    y^k the nearest alpha^k particle right of y^(k-1); line k loses y^k and
    gains y^(k-1).  Returns the new stack and (y^1, ..., y^n)."""
    new = list(alpha.lines)
    jumps = [0.0] * alpha.n
    target = y
    for k in range(alpha.n):
        line = alpha.lines[k]
        if len(line) == 0:
            raise EmptyConfiguration(f"line {k + 1} is empty")
        yk = nearest_right(line, target)
        new[k] = replace_position(line, yk, target)
        jumps[k] = yk
        target = yk
    return MultiLineConfig(new), tuple(jumps)


# --- trajectories -------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class Trajectory:
    """Result of ``evolve``.

    ``duals[k-1]`` holds the pre-jump positions on line k, time-stamped by
    the point that triggered them.  For the multi-line process these are the
    dual points omega^k, and line k is driven by omega^(k+1) (with
    omega^(n+1) the original points).  Points that moved nothing (only
    possible at the left edge of an interval) leave no dual point.
    """

    initial: State
    points: PointField
    times: tuple[float, ...]
    snapshots: tuple[State, ...]
    duals: tuple[PointField, ...]
    final: State

    def at(self, t: float) -> State:
        return self.snapshots[self.times.index(t)]

    def dual(self, k: int) -> PointField:
        """omega^k for k = 1..n+1."""
        if k == len(self.duals) + 1:
            return self.points
        return self.duals[k - 1]


def _kind(state: State) -> str:
    if isinstance(state, Configuration):
        return "had"
    if isinstance(state, CoupledConfig):
        return "coupled"
    if isinstance(state, MulticlassConfig):
        return "multiclass"
    if isinstance(state, MultiLineConfig):
        return "multiline"
    raise TypeError(f"cannot evolve {type(state).__name__}")


def _lines(state: State) -> list[Configuration]:
    if isinstance(state, Configuration):
        return [state]
    if isinstance(state, MulticlassConfig):
        return list(expand_classes(state).lines)
    return list(state.lines)


def _rebuild(kind: str, geometry, flat: np.ndarray, offsets: np.ndarray) -> State:
    lines = [
        Configuration._trusted(geometry, flat[offsets[k] : offsets[k + 1]].copy())
        for k in range(offsets.size - 1)
    ]
    if kind == "had":
        return lines[0]
    if kind == "coupled":
        return CoupledConfig._trusted(lines)
    if kind == "multiclass":
        return collapse_classes(CoupledConfig._trusted(lines))
    return MultiLineConfig._trusted(lines)


def evolve(
    initial: State,
    omega: PointField,
    snapshot_times: Sequence[float] | None = None,
    *,
    reverse: bool = False,
) -> Trajectory:
    """Apply the points of omega in time order.

    Snapshots are taken after every point with t <= s for each requested s
    (default: 0 and the last point time).  On an interval a point with no
    particle to its left moves nothing on that line.  ``reverse=True`` runs
    the reverse multi-line cascade instead (multi-line states only).
    """
    kind = _kind(initial)
    lines = _lines(initial)
    g = lines[0].geometry
    if omega.geometry != g:
        raise InvalidConfiguration("point field and state live on different geometries")
    if reverse and kind != "multiline":
        raise InvalidConfiguration("reverse evolution is defined for multi-line states")
    mode = K.MODE_COUPLED
    if kind == "multiline":
        mode = K.MODE_REVERSE if reverse else K.MODE_MULTILINE
    if kind in ("had", "multiline") and any(len(c) == 0 for c in lines) and len(omega):
        raise EmptyConfiguration("every line must be nonempty to evolve")

    if snapshot_times is None:
        end = float(omega.ts[-1]) if len(omega) else 0.0
        snapshot_times = (0.0, end) if end > 0 else (0.0,)
    times = tuple(float(t) for t in snapshot_times)
    if any(b < a for a, b in zip(times, times[1:])):
        raise InvalidConfiguration("snapshot times must be nondecreasing")

    offsets = np.zeros(len(lines) + 1, np.int64)
    offsets[1:] = np.cumsum([len(c) for c in lines])
    flat = np.concatenate([c.positions for c in lines]).astype(np.float64).copy()
    duals = np.empty((len(lines), len(omega)), np.float64)

    snaps = []
    done = 0
    cuts = np.searchsorted(omega.ts, times, "right")
    for cut in cuts:
        cut = max(int(cut), done)
        if cut > done:
            _run(flat, offsets, omega.xs[done:cut], g.is_cycle, mode, duals[:, done:cut])
            done = cut
        snaps.append(_rebuild(kind, g, flat, offsets))
    if done < len(omega):
        _run(flat, offsets, omega.xs[done:], g.is_cycle, mode, duals[:, done:])
    final = _rebuild(kind, g, flat, offsets)

    dual_fields = []
    for k in range(len(lines)):
        keep = ~np.isnan(duals[k])
        dual_fields.append(PointField(g, duals[k][keep], omega.ts[keep]))
    return Trajectory(initial, omega, times, tuple(snaps), tuple(dual_fields), final)


def _run(flat, offsets, xs, cyclic, mode, duals_view) -> None:
    buf = np.empty((offsets.size - 1, xs.size), np.float64)
    j, status = K.apply_points(flat, offsets, np.ascontiguousarray(xs), cyclic, mode, buf)
    if status == K.COLLISION:
        raise PositionCollision(f"point {float(xs[j])!r} hits an occupied position")
    duals_view[:, :] = buf


def evolve_final(initial: State, omega: PointField) -> State:
    return evolve(initial, omega, ()).final
