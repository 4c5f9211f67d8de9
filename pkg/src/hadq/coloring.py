"""Labelled, coloured coupling of two Hammersley configurations.

Particles present in both configurations are yellow, eta-only particles are
blue and eta~-only particles are red.  Every particle carries the label it
had at time 0.  Positions follow the ordinary coupled dynamics; the labels
are moved so that yellow stays yellow for ever and blue/red particles never
pass another particle of their own configuration.
"""
from __future__ import annotations

from bisect import bisect_left
from dataclasses import dataclass, field

import numpy as np

from .core import Configuration, Geometry, as_generator
from .errors import EmptyConfiguration, InvalidParameters, NoLeftParticle, PositionCollision

YELLOW, BLUE, RED = 0, 1, 2
COLOR_NAMES = {YELLOW: "yellow", BLUE: "blue", RED: "red"}


class _Side:
    """One configuration: parallel position / label / colour lists."""

    __slots__ = ("pos", "lab", "col")

    def __init__(self, pos, lab, col):
        self.pos = list(pos)
        self.lab = list(lab)
        self.col = list(col)

    def copy(self) -> "_Side":
        return _Side(self.pos, self.lab, self.col)

    def left_index(self, x: float, cyclic: bool) -> int:
        i = bisect_left(self.pos, x)
        if i < len(self.pos) and self.pos[i] == x:
            raise PositionCollision(f"{x!r} is already occupied")
        if i == 0:
            if not cyclic:
                return -1
            return len(self.pos) - 1
        return i - 1

    def move(self, i: int, x: float) -> None:
        """Physical jump of the particle at index i to x, which must be the
        nearest-left relation (i.e. no particle strictly between)."""
        self.pos[i] = x
        if i == len(self.pos) - 1 and len(self.pos) > 1 and x < self.pos[0]:
            for seq in (self.pos, self.lab, self.col):
                seq.insert(0, seq.pop())


@dataclass
class ColoredPair:
    geometry: Geometry
    eta: _Side
    tilde: _Side

    @classmethod
    def from_configs(cls, eta: Configuration, tilde: Configuration) -> "ColoredPair":
        g = eta.geometry
        a, b = eta.positions.tolist(), tilde.positions.tolist()
        sa, sb = set(a), set(b)
        return cls(
            g,
            _Side(a, range(len(a)), [YELLOW if x in sb else BLUE for x in a]),
            _Side(b, range(len(b)), [YELLOW if x in sa else RED for x in b]),
        )

    def copy(self) -> "ColoredPair":
        return ColoredPair(self.geometry, self.eta.copy(), self.tilde.copy())

    def configs(self) -> tuple[Configuration, Configuration]:
        return (
            Configuration(self.geometry, self.eta.pos),
            Configuration(self.geometry, self.tilde.pos),
        )

    def counts(self) -> dict[str, int]:
        return {
            "yellow": self.eta.col.count(YELLOW),
            "blue": self.eta.col.count(BLUE),
            "red": self.tilde.col.count(RED),
        }

    def yellow_labels(self) -> tuple[frozenset, frozenset]:
        return (
            frozenset(l for l, c in zip(self.eta.lab, self.eta.col) if c == YELLOW),
            frozenset(l for l, c in zip(self.tilde.lab, self.tilde.col) if c == YELLOW),
        )

    def label_positions(self) -> tuple[dict[int, float], dict[int, float]]:
        return dict(zip(self.eta.lab, self.eta.pos)), dict(zip(self.tilde.lab, self.tilde.pos))

    def check(self) -> None:
        """Colours must match membership of positions in the two sides."""
        sa, sb = set(self.eta.pos), set(self.tilde.pos)
        for x, c in zip(self.eta.pos, self.eta.col):
            assert c == (YELLOW if x in sb else BLUE), (x, c)
        for x, c in zip(self.tilde.pos, self.tilde.col):
            assert c == (YELLOW if x in sa else RED), (x, c)
        assert self.eta.pos == sorted(self.eta.pos)
        assert self.tilde.pos == sorted(self.tilde.pos)


def _left_dist(x: float, p: float, n: float, cyclic: bool) -> float:
    d = x - p
    if cyclic and d < 0:
        d += n
    return d


def _relay(side: _Side, i1: int, stop_pos: float, moving_color: int, x: float) -> None:
    """A yellow pair below a chain of single-colour particles jumps to x.

    The chain runs leftward from index i1 down to the yellow particle at
    stop_pos.  The yellow label goes to x; every chain label shifts one
    slot to the left and the last one lands on the vacated yellow spot.
    """
    n = len(side.pos)
    chain = [i1]
    j = i1
    while side.pos[j] != stop_pos:
        j = (j - 1) % n
        chain.append(j)
    labels = [side.lab[c] for c in chain]
    side.lab[chain[0]] = labels[-1]
    for a, b in zip(chain[1:], labels[:-1]):
        side.lab[a] = b
    side.col[chain[0]] = YELLOW
    side.col[chain[-1]] = moving_color
    side.move(chain[0], x)


def _step_inplace(state: ColoredPair, x: float) -> None:
    g = state.geometry
    cyclic = g.is_cycle
    e, t = state.eta, state.tilde
    if not e.pos or not t.pos:
        raise EmptyConfiguration("both configurations must be nonempty")
    ie = e.left_index(x, cyclic)
    it = t.left_index(x, cyclic)
    if ie < 0 or it < 0:
        raise NoLeftParticle(f"no particle left of {x!r}; coloured runs need a cycle")
    ce, ct = e.col[ie], t.col[it]
    pe, pt = e.pos[ie], t.pos[it]
    if ce == YELLOW and ct == YELLOW:
        # rule 1: the shared particle jumps in both configurations
        e.move(ie, x)
        t.move(it, x)
    elif ce == BLUE and ct == RED:
        # rules 2 / 2': blue and red coalesce at x
        e.col[ie] = YELLOW
        t.col[it] = YELLOW
        e.move(ie, x)
        t.move(it, x)
    elif ce == BLUE and ct == YELLOW:
        # rule 3: the yellow pair at pt jumps over the blue chain
        assert _left_dist(x, pt, g.length, cyclic) > _left_dist(x, pe, g.length, cyclic)
        _relay(e, ie, pt, BLUE, x)
        t.move(it, x)
    elif ce == YELLOW and ct == RED:
        # rule 3': mirror image with the red chain of eta~
        assert _left_dist(x, pe, g.length, cyclic) > _left_dist(x, pt, g.length, cyclic)
        _relay(t, it, pe, RED, x)
        e.move(ie, x)
    else:  # pragma: no cover - colours are derived from membership
        raise AssertionError(f"impossible colour pair {ce}, {ct}")


def colored_step(state: ColoredPair, x: float) -> ColoredPair:
    """Apply one point at x; returns a new state."""
    new = state.copy()
    _step_inplace(new, x)
    return new


@dataclass
class CoalescenceRun:
    times: np.ndarray
    red: np.ndarray
    blue: np.ndarray
    yellow: np.ndarray
    absorption_time: float | None
    count: int
    first_yellow_eta: dict[int, float] = field(default_factory=dict)
    first_yellow_tilde: dict[int, float] = field(default_factory=dict)

    def to_csv(self) -> str:
        rows = ["time,red_count,blue_count,yellow_count"]
        for t, r, b, y in zip(self.times.tolist(), self.red, self.blue, self.yellow):
            rows.append(f"{t!r},{r},{b},{y}")
        return "\n".join(rows) + "\n"

    def everblue(self) -> list[int]:
        """eta labels never turned yellow during the run."""
        return sorted(set(range(self.count)) - set(self.first_yellow_eta))

    def everred(self) -> list[int]:
        return sorted(set(range(self.count)) - set(self.first_yellow_tilde))


def coalescence_run(
    count: int,
    cycle: float,
    horizon: float,
    rng,
    *,
    initial: tuple[Configuration, Configuration] | None = None,
    chunk: float = 1.0,
) -> CoalescenceRun:
    """Two independent uniform `count`-particle configurations on a cycle,
    driven by common points until no red particle is left or `horizon`.

    The series records the initial counts and every change."""
    if count < 1:
        raise InvalidParameters("count must be at least 1")
    g = Geometry.cycle(cycle)
    gen = as_generator(rng)
    if initial is None:
        a = np.sort(gen.uniform(0.0, cycle, count))
        b = np.sort(gen.uniform(0.0, cycle, count))
        initial = (Configuration(g, a), Configuration(g, b))
    if len(initial[0]) != len(initial[1]):
        raise InvalidParameters("equal particle counts are required for absorption")
    state = ColoredPair.from_configs(*initial)
    c = state.counts()
    times, red, blue, yellow = [0.0], [c["red"]], [c["blue"]], [c["yellow"]]
    fy_e = {l: 0.0 for l, col in zip(state.eta.lab, state.eta.col) if col == YELLOW}
    fy_t = {l: 0.0 for l, col in zip(state.tilde.lab, state.tilde.col) if col == YELLOW}
    t0 = 0.0
    absorbed = 0.0 if red[-1] == 0 else None
    while absorbed is None and t0 < horizon:
        t1 = min(t0 + chunk, horizon)
        k = int(gen.poisson(cycle * (t1 - t0)))
        ts = np.sort(gen.uniform(t0, t1, k))
        xs = gen.uniform(0.0, cycle, k)
        for x, t in zip(xs.tolist(), ts.tolist()):
            before = red[-1]
            _step_inplace(state, x)
            nr = state.tilde.col.count(RED) if before else 0
            if nr != before:
                for l, col in zip(state.eta.lab, state.eta.col):
                    if col == YELLOW and l not in fy_e:
                        fy_e[l] = t
                for l, col in zip(state.tilde.lab, state.tilde.col):
                    if col == YELLOW and l not in fy_t:
                        fy_t[l] = t
                times.append(t)
                red.append(nr)
                blue.append(state.eta.col.count(BLUE))
                yellow.append(state.eta.col.count(YELLOW))
                if nr == 0:
                    absorbed = t
                    break
        t0 = t1
    return CoalescenceRun(
        np.asarray(times),
        np.asarray(red),
        np.asarray(blue),
        np.asarray(yellow),
        absorbed,
        count,
        fy_e,
        fy_t,
    )
