import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from hadq.core import (
    Configuration,
    Geometry,
    PointField,
    RngStream,
    as_generator,
    nearest_left,
    nearest_right,
    replace_position,
    sample_configuration,
    sample_point_field,
)
from hadq.errors import (
    EmptyConfiguration,
    InvalidConfiguration,
    InvalidParameters,
    NoLeftParticle,
    NoRightParticle,
    PositionCollision,
)

from strategies import positions

C10 = Geometry.cycle(10)


def test_geometry_validation():
    with pytest.raises(InvalidConfiguration):
        Geometry("torus", 3)
    with pytest.raises(InvalidConfiguration):
        Geometry.cycle(0)
    assert Geometry.interval(5).contains(0.0)
    assert not Geometry.interval(5).contains(5.0)


def test_configuration_rejects_bad_positions():
    with pytest.raises(InvalidConfiguration):
        Configuration(C10, [3.0, 1.0])
    with pytest.raises(InvalidConfiguration):
        Configuration(C10, [10.0])
    with pytest.raises(InvalidConfiguration):
        Configuration(C10, [-0.5])
    with pytest.raises(InvalidConfiguration):
        Configuration(C10, [np.nan])
    with pytest.raises(PositionCollision):
        Configuration(C10, [1.0, 1.0])


def test_configuration_is_immutable():
    c = Configuration(C10, [1.0, 2.0])
    with pytest.raises(ValueError):
        c.positions[0] = 5.0


def test_count_in_half_open():
    c = Configuration(C10, [1.0, 2.0, 3.0])
    assert c.count_in(1.0, 3.0) == 2
    assert c.count_in(0.0, 10.0) == 3


@given(positions(10.0))
def test_csv_and_json_round_trip(xs):
    c = Configuration(C10, xs)
    assert Configuration.from_csv(C10, c.to_csv()) == c
    assert Configuration.from_json(c.to_json()) == c


def test_point_field_round_trip_and_restrict():
    f = PointField.from_pairs(C10, [(1.0, 0.5), (2.0, 0.25), (3.0, 2.0)])
    assert f.ts.tolist() == [0.25, 0.5, 2.0]
    assert PointField.from_csv(C10, f.to_csv()) == f
    assert PointField.from_json(f.to_json()) == f
    assert f.restrict(0.25, 2.0).pairs() == [(1.0, 0.5), (3.0, 2.0)]
    assert f.shift_time(0.25).ts.tolist() == [0.0, 0.25, 1.75]


def test_point_field_validation():
    with pytest.raises(InvalidConfiguration):
        PointField(C10, [1.0, 2.0], [1.0, 1.0])
    with pytest.raises(InvalidConfiguration):
        PointField(C10, [1.0], [-1.0])
    with pytest.raises(InvalidConfiguration):
        PointField(C10, [11.0], [1.0])


def test_rng_stream_reproducible_and_distinct():
    a = RngStream(5, 2).generator().random(4)
    b = RngStream(5, 2).generator().random(4)
    c = RngStream(5, 3).generator().random(4)
    assert np.array_equal(a, b)
    assert not np.array_equal(a, c)
    assert np.array_equal(as_generator(RngStream(5)).random(2), as_generator(5).random(2))


def test_sample_configuration_count_examples():
    assert len(sample_configuration(C10, 1, count=0)) == 0
    c = sample_configuration(C10, 1, count=5)
    assert len(c) == 5
    assert np.all(np.diff(c.positions) > 0)
    assert c.positions[0] >= 0 and c.positions[-1] < 10


def test_sample_configuration_errors():
    with pytest.raises(InvalidParameters):
        sample_configuration(C10, 1, rate=0.0)
    with pytest.raises(InvalidParameters):
        sample_configuration(C10, 1, count=-1)
    with pytest.raises(InvalidParameters):
        sample_configuration(C10, 1)
    with pytest.raises(InvalidParameters):
        sample_configuration(C10, 1, rate=1.0, count=3)


def test_sample_configuration_poisson_mean():
    # rate 2 on a cycle of length 10: Poisson(20) counts; tolerance as stated
    gen = np.random.default_rng(11)
    counts = [len(sample_configuration(C10, gen, rate=2.0)) for _ in range(10_000)]
    assert abs(np.mean(counts) - 20) <= 3 * np.sqrt(20 / 10_000) * 3


def test_sample_point_field():
    assert len(sample_point_field(C10, 0.0, 1)) == 0
    f = sample_point_field(C10, 5.0, 3)
    assert np.all(np.diff(f.ts) > 0)
    with pytest.raises(InvalidParameters):
        sample_point_field(C10, -1.0, 1)
    gen = np.random.default_rng(12)
    counts = [len(sample_point_field(C10, 5.0, gen)) for _ in range(10_000)]
    # Poisson(50): sample mean has standard deviation sqrt(50 / 10^4)
    assert abs(np.mean(counts) - 50) <= 3 * np.sqrt(50 / 10_000)


def test_nearest_left_examples():
    c = Configuration(C10, [1.0, 3.0, 5.0])
    assert nearest_left(c, 4.0) == 3.0
    assert nearest_left(c, 0.5) == 5.0
    with pytest.raises(EmptyConfiguration):
        nearest_left(Configuration(C10, []), 4.0)
    with pytest.raises(PositionCollision):
        nearest_left(c, 3.0)
    i = Configuration(Geometry.interval(10), [1.0, 3.0])
    with pytest.raises(NoLeftParticle):
        nearest_left(i, 0.5)


def test_nearest_right_examples():
    c = Configuration(C10, [1.0, 3.0, 5.0])
    assert nearest_right(c, 4.0) == 5.0
    assert nearest_right(c, 6.0) == 1.0
    with pytest.raises(NoRightParticle):
        nearest_right(Configuration(Geometry.interval(10), [1.0]), 2.0)


@given(positions(10.0, min_size=1), st.floats(0, 10, exclude_max=True))
def test_nearest_left_is_total_on_cycle(xs, x):
    c = Configuration(C10, xs)
    if x in xs:
        return
    u = nearest_left(c, x)
    assert u in c
    left = [p for p in xs if p < x]
    assert u == (max(left) if left else max(xs))


def test_replace_position():
    c = Configuration(C10, [1.0, 3.0])
    assert replace_position(c, 1.0, 4.0).positions.tolist() == [3.0, 4.0]
    with pytest.raises(InvalidConfiguration):
        replace_position(c, 2.0, 4.0)
    with pytest.raises(PositionCollision):
        replace_position(c, 1.0, 3.0)
