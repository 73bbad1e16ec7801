from hypothesis import given
from hypothesis import strategies as st

from parastruct.fields import Chart
from parastruct.sampling import SplitMix64, random_point, random_scalar_field, sample_points, substream


def test_splitmix64_reference_value():
    # first output for seed 0, as published with the reference implementation
    assert SplitMix64(0).next_u64() == 0xE220A8397B1DCDAF


def test_streams_are_deterministic():
    a, b = SplitMix64(42), SplitMix64(42)
    assert [a.next_u64() for _ in range(5)] == [b.next_u64() for _ in range(5)]


def test_substreams_differ_by_label_and_index():
    first = {substream(7, label, i).next_u64() for label in ("cartan1", "cartan2", "cyclic") for i in range(4)}
    assert len(first) == 12
    assert substream(7, "cyclic", 2).next_u64() == substream(7, "cyclic", 2).next_u64()


@given(st.integers(0, 2**64 - 1))
def test_uniform_in_unit_interval(seed):
    x = SplitMix64(seed).random()
    assert 0.0 <= x < 1.0


def test_points_stay_inside_margin():
    chart = Chart.box(["x", "y"], [(0.0, 1.0), (-5.0, 5.0)])
    for p in sample_points(chart, SplitMix64(1), 200):
        assert 0.02 <= p[0] <= 0.98
        assert -4.8 <= p[1] <= 4.8
    assert random_point(chart, SplitMix64(3)) == random_point(chart, SplitMix64(3))


def test_random_fields_are_reproducible():
    f, g = random_scalar_field(2, SplitMix64(5)), random_scalar_field(2, SplitMix64(5))
    assert f.at((0.3, 0.4)) == g.at((0.3, 0.4))
