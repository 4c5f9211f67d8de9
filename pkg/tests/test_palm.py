import numpy as np
import pytest

from hadq.analysis.palm import (
    ShockState,
    find_string,
    is_regeneration_string,
    palm_recenter,
    shock_construct,
)
from hadq.core import Configuration, Geometry
from hadq.errors import EmptyClass, InvalidConfiguration, NoOriginParticle
from hadq.queueing import MulticlassConfig


def mc(g, *classes):
    return MulticlassConfig([Configuration(g, c) for c in classes])


def test_palm_single_particle_moves_to_origin():
    xi = mc(Geometry.cycle(10), [3.0], [5.0, 7.0])
    out = palm_recenter(xi, 1, 0)
    assert out.lines[0].positions.tolist() == [0.0]
    assert out.lines[1].positions.tolist() == [2.0, 4.0]


def test_palm_wraps_and_puts_class_at_origin():
    g = Geometry.cycle(10)
    xi = mc(g, [1.0, 9.0], [2.0, 6.0])
    for seed in range(10):
        out = palm_recenter(xi, 2, seed)
        assert 0.0 in out.lines[1]
        assert out.counts() == xi.counts()


def test_palm_errors():
    with pytest.raises(EmptyClass):
        palm_recenter(mc(Geometry.cycle(10), [1.0], []), 2, 0)
    with pytest.raises(InvalidConfiguration):
        palm_recenter(mc(Geometry.interval(10), [1.0], [2.0]), 2, 0)


def test_palm_rotation_is_uniform_over_class():
    g = Geometry.cycle(10)
    xi = mc(g, [0.5], [2.0, 6.0, 9.0])
    picks = [palm_recenter(xi, 2, s).lines[0].positions[0] for s in range(600)]
    # class-1 offset identifies which class-2 particle went to 0
    values, counts = np.unique(picks, return_counts=True)
    assert values.size == 3 and counts.min() > 150


# the worked example lives on [-5, 5) shifted to [0, 10): origin 5
G = Geometry.interval(10)
XI = mc(G, [3.0, 6.0], [4.0, 5.0, 8.0])


def test_shock_literal_reading():
    eta, eta_prime = shock_construct(XI, origin=5.0, reading="B")
    assert eta.positions.tolist() == [3.0, 4.0, 8.0]
    assert eta_prime.positions.tolist() == [3.0, 4.0, 5.0, 8.0]


def test_shock_density_reading():
    eta, eta_prime = shock_construct(XI, origin=5.0, reading="A")
    assert eta.positions.tolist() == [3.0, 4.0, 6.0]
    assert set(eta_prime.positions.tolist()) - set(eta.positions.tolist()) == {5.0}


def test_shock_needs_origin_particle():
    with pytest.raises(NoOriginParticle):
        shock_construct(XI, origin=6.0)


def test_shock_state():
    eta = Configuration(G, [1.0, 2.0, 3.0, 6.0])
    eta_prime = Configuration(G, [1.0, 2.0, 3.0, 4.0, 6.0])
    s = ShockState.from_pair(eta, eta_prime, 2.0)
    assert s.position == 4.0
    assert s.left_density == 1.0 and s.right_density == 0.5
    with pytest.raises(InvalidConfiguration):
        ShockState.from_pair(eta, eta, 2.0)


def test_regeneration_strings():
    assert is_regeneration_string((4, 1, 2, 3, 1, 2), 4)
    assert is_regeneration_string((2, 2), 2)
    assert not is_regeneration_string((4, 1, 3, 4, 2), 4)  # a 4 follows the last 3
    assert not is_regeneration_string((4, 1, 2), 4)  # no class 3
    assert not is_regeneration_string((3, 1, 1), 3)  # does not end in class 2


def test_find_string():
    classes = np.array([1, 4, 1, 2, 3, 1, 2, 4, 1, 2, 3, 1, 2])
    assert find_string(classes, (4, 1, 2, 3, 1, 2)) == 1
    assert find_string(classes, (4, 1, 2, 3, 1, 2), 2) == 7
    assert find_string(classes, (3, 3)) == -1
