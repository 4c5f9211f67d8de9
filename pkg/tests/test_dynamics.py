import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

import oracles
from hadq.core import Configuration, Geometry, PointField, sample_point_field
from hadq.dynamics import (
    coupled_step,
    evolve,
    evolve_final,
    had_reverse_step,
    had_step,
    multiclass_step,
    multiline_reverse_step,
    multiline_step,
)
from hadq.errors import EmptyConfiguration, InvalidConfiguration, PositionCollision
from hadq.queueing import (
    CoupledConfig,
    MulticlassConfig,
    MultiLineConfig,
    build_coupled,
    collapse_classes,
    expand_classes,
    map_multiclass,
)

from strategies import configs, disjoint_lines, random_stack

C10 = Geometry.cycle(10)
C4 = Geometry.cycle(4)


def cfg(g, xs):
    return Configuration(g, xs)


def lists(stack):
    return [c.positions.tolist() for c in stack]


def test_had_step_examples():
    c = cfg(C10, [1.0, 3.0, 5.0])
    assert had_step(c, 4.0).positions.tolist() == [1.0, 4.0, 5.0]
    assert had_step(c, 0.5).positions.tolist() == [0.5, 1.0, 3.0]
    with pytest.raises(EmptyConfiguration):
        had_step(cfg(C10, []), 1.0)
    with pytest.raises(PositionCollision):
        had_step(c, 3.0)


def test_had_reverse_step_mirrors():
    c = cfg(C10, [1.0, 3.0, 5.0])
    assert had_reverse_step(c, 4.0).positions.tolist() == [1.0, 3.0, 4.0]
    assert had_reverse_step(c, 6.0).positions.tolist() == [3.0, 5.0, 6.0]


def test_coupled_step_examples():
    eta = CoupledConfig(configs(C10, [[3.0], [1.0, 3.0]]))
    assert lists(coupled_step(eta, 4.0)) == [[4.0], [1.0, 4.0]]
    same = CoupledConfig(configs(C10, [[1.0, 5.0], [1.0, 5.0]]))
    out = coupled_step(same, 7.0)
    assert out.lines[0] == out.lines[1]


def test_multiclass_step_single_class_is_had_step():
    xi = MulticlassConfig([cfg(C10, [1.0, 3.0, 5.0])])
    assert multiclass_step(xi, 4.0).lines[0] == had_step(xi.lines[0], 4.0)


@given(st.data())
def test_multiclass_step_is_conjugated_coupled_step(data):
    sizes = data.draw(st.lists(st.integers(1, 4), min_size=1, max_size=3))
    lines = data.draw(disjoint_lines(10.0, sizes + [1]))
    xi = MulticlassConfig(configs(C10, lines[:-1]))
    x = lines[-1][0]
    out = multiclass_step(xi, x)
    assert out == collapse_classes(coupled_step(expand_classes(xi), x))
    assert out.counts() == xi.counts()


def test_multiline_step_example():
    alpha = MultiLineConfig(configs(C4, [[0.5, 2.5], [1.0, 3.0]]))
    new, jumps = multiline_step(alpha, 3.5)
    assert lists(new) == [[0.5, 3.0], [1.0, 3.5]]
    assert jumps == (2.5, 3.0)


def test_multiline_single_line_is_had_step():
    c = cfg(C10, [1.0, 3.0, 5.0])
    new, jumps = multiline_step(MultiLineConfig([c]), 4.0)
    assert new.lines[0] == had_step(c, 4.0) and jumps == (3.0,)
    back, _ = multiline_reverse_step(MultiLineConfig([c]), 4.0)
    assert back.lines[0] == had_reverse_step(c, 4.0)


@given(st.data())
def test_multiline_steps_match_cascade_oracle(data):
    sizes = data.draw(st.lists(st.integers(1, 5), min_size=1, max_size=4))
    lines = data.draw(disjoint_lines(10.0, sizes + [1]))
    alpha = MultiLineConfig(configs(C10, lines[:-1]))
    x = lines[-1][0]
    new, jumps = multiline_step(alpha, x)
    o_new, o_jumps = oracles.cascade(lines[:-1], x)
    assert lists(new) == o_new and list(jumps) == o_jumps
    back, ys = multiline_reverse_step(alpha, x)
    o_back, o_ys = oracles.reverse_cascade(lines[:-1], x)
    assert lists(back) == o_back and list(ys) == o_ys


@given(st.data())
def test_jump_and_reverse_jump_are_inverse(data):
    sizes = data.draw(st.lists(st.integers(1, 5), min_size=1, max_size=4))
    lines = data.draw(disjoint_lines(10.0, sizes + [1]))
    alpha = MultiLineConfig(configs(C10, lines[:-1]))
    x = lines[-1][0]
    new, jumps = multiline_step(alpha, x)
    assert multiline_reverse_step(new, jumps[0])[0] == alpha
    back, ys = multiline_reverse_step(alpha, x)
    assert multiline_step(back, ys[-1])[0] == alpha


# --- evolve --------------------------------------------------------------------


def test_evolve_zero_horizon():
    c = cfg(C10, [1.0, 3.0])
    tr = evolve(c, PointField(C10, [], []))
    assert tr.final == c and tr.at(0.0) == c and len(tr.duals[0]) == 0


def test_evolve_single_point():
    c = cfg(C10, [1.0, 3.0, 5.0])
    tr = evolve(c, PointField(C10, [4.0], [0.7]), (0.0, 0.7))
    assert tr.at(0.7).positions.tolist() == [1.0, 4.0, 5.0]
    assert tr.at(0.0) == c
    assert tr.dual(1).pairs() == [(3.0, 0.7)]


def test_evolve_rejects_bad_input():
    with pytest.raises(InvalidConfiguration):
        evolve(cfg(C10, [1.0]), PointField(Geometry.cycle(5), [1.0], [1.0]))
    with pytest.raises(EmptyConfiguration):
        evolve(cfg(C10, []), PointField(C10, [1.0], [1.0]))
    with pytest.raises(PositionCollision):
        evolve(cfg(C10, [1.0]), PointField(C10, [2.0, 2.0], [1.0, 2.0]))
    with pytest.raises(InvalidConfiguration):
        evolve(cfg(C10, [1.0]), PointField(C10, [2.0], [1.0]), (2.0, 1.0))


def _fold(state, omega, step):
    duals = []
    for x in omega.xs.tolist():
        out = step(state, x)
        if isinstance(out, tuple):
            state, j = out
            duals.append(j)
        else:
            state = out
    return state, duals


@pytest.mark.parametrize("seed", range(5))
def test_evolve_equals_folded_steps(seed):
    gen = np.random.default_rng(seed)
    g = Geometry.cycle(20)
    omega = sample_point_field(g, 3.0, gen)
    alpha = MultiLineConfig(configs(g, random_stack(gen, 3, 20.0, max_count=12)))
    eta, xi = build_coupled(alpha), map_multiclass(alpha)
    for state, step in [
        (alpha.lines[0], had_step),
        (eta, coupled_step),
        (xi, multiclass_step),
        (alpha, multiline_step),
    ]:
        tr = evolve(state, omega)
        final, jumps = _fold(state, omega, step)
        assert tr.final == final
        if jumps:
            for k in range(alpha.n):
                assert tr.dual(k + 1).xs.tolist() == [j[k] for j in jumps]
    tr = evolve(alpha, omega, reverse=True)
    final, ys = _fold(alpha, omega, multiline_reverse_step)
    assert tr.final == final
    assert tr.dual(1).xs.tolist() == [y[0] for y in ys]


def test_evolve_on_interval_skips_points_without_left_particle():
    g = Geometry.interval(10)
    tr = evolve(cfg(g, [2.0, 5.0]), PointField(g, [1.0, 3.0], [0.5, 1.0]))
    assert tr.final.positions.tolist() == [3.0, 5.0]
    assert tr.dual(1).pairs() == [(2.0, 1.0)]


@pytest.mark.parametrize("seed", range(5))
def test_semigroup(seed):
    gen = np.random.default_rng(100 + seed)
    g = Geometry.cycle(20)
    omega = sample_point_field(g, 4.0, gen)
    alpha = MultiLineConfig(configs(g, random_stack(gen, 3, 20.0, max_count=12)))
    s = 1.7
    mid = evolve_final(alpha, omega.restrict(-1.0, s))
    rest = omega.restrict(s, 4.0).shift_time(s)
    assert evolve_final(mid, rest) == evolve_final(alpha, omega)
    tr = evolve(alpha, omega, (0.0, s, 4.0))
    assert tr.at(s) == mid and tr.at(0.0) == alpha


@pytest.mark.parametrize("seed", range(5))
def test_counts_and_nesting_preserved(seed):
    gen = np.random.default_rng(200 + seed)
    g = Geometry.cycle(30)
    omega = sample_point_field(g, 5.0, gen)
    alpha = MultiLineConfig(configs(g, random_stack(gen, 4, 30.0, max_count=20)))
    eta = build_coupled(alpha)
    tr = evolve(eta, omega, (0.0, 2.5, 5.0))
    for snap in tr.snapshots:
        assert snap.counts() == eta.counts()
        assert isinstance(CoupledConfig(snap.lines), CoupledConfig)  # nesting validated
    assert evolve_final(alpha, omega).counts() == alpha.counts()
    xi = map_multiclass(alpha)
    assert evolve_final(xi, omega).counts() == xi.counts()


@pytest.mark.parametrize("seed", range(5))
def test_dual_points_of_next_line_drive_the_line(seed):
    gen = np.random.default_rng(300 + seed)
    g = Geometry.cycle(25)
    omega = sample_point_field(g, 4.0, gen)
    alpha = MultiLineConfig(configs(g, random_stack(gen, 3, 25.0, max_count=15)))
    tr = evolve(alpha, omega, (0.0, 2.0, 4.0))
    for k in range(alpha.n):
        own = evolve(alpha.lines[k], tr.dual(k + 2), (0.0, 2.0, 4.0))
        assert own.final == tr.final.lines[k]
        assert own.at(2.0) == tr.at(2.0).lines[k]
        assert len(tr.dual(k + 1)) == len(omega)


@pytest.mark.parametrize("seed", range(20))
def test_one_step_commutation(seed):
    gen = np.random.default_rng(400 + seed)
    g = Geometry.cycle(30)
    alpha = MultiLineConfig(configs(g, random_stack(gen, int(gen.integers(1, 5)), 30.0, max_count=20)))
    x = float(gen.uniform(0, 30))
    assert coupled_step(build_coupled(alpha), x) == build_coupled(multiline_step(alpha, x)[0])
