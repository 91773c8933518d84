import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from splinegabor.grid import Grid, SampledSignal
from splinegabor.signals import (
    BLOCKS_HEIGHTS,
    JUMP_LOCATIONS,
    SIGNALS,
    NoiseConfig,
    add_noise,
    make_signal,
    map_to_interval,
    noise_rng,
    rms,
    signal_values,
    zero_pad,
)


def test_pointwise_values():
    assert signal_values("Heavisine", np.array([0.5]))[0] == pytest.approx(-2.0, abs=1e-12)
    assert signal_values("Doppler", np.array([0.0]))[0] == 0.0
    assert signal_values("Quadchirp", np.array([0.5]), 2048)[0] == pytest.approx(np.sin(np.pi / 3 * 2048 * 0.25))


def test_blocks_shape_and_jumps():
    f = make_signal("Blocks", 2048)
    assert len(f) == 2048 and f.grid.origin == 0 and f.grid.end == pytest.approx(1.0)
    jumps = np.flatnonzero(np.diff(f.values))
    assert len(jumps) == len(JUMP_LOCATIONS)
    assert np.allclose(np.diff(f.values)[jumps], BLOCKS_HEIGHTS)


def test_bumps_nonnegative():
    assert np.all(make_signal("Bumps").values >= 0)


@pytest.mark.parametrize("kind", SIGNALS)
def test_signals_deterministic_and_bounded(kind):
    peaks = [np.max(np.abs(make_signal(kind, n).values)) for n in (512, 1024, 2048)]
    assert np.all(np.isfinite(peaks))
    assert max(peaks) < 2 * min(peaks)
    assert np.array_equal(make_signal(kind).values, make_signal(kind).values)


def test_bad_inputs():
    with pytest.raises(ValueError):
        make_signal("Sawtooth")
    with pytest.raises(ValueError):
        make_signal("Blocks", 1)
    with pytest.raises(ValueError):
        map_to_interval(make_signal("Blocks", 8), 1, 1)
    with pytest.raises(ValueError):
        SampledSignal(Grid(0, 1, 3), [1.0, np.nan, 2.0])


def test_case_insensitive_kind():
    assert make_signal("heavisine", 16).label == "Heavisine"


def test_mapping():
    f = make_signal("Doppler", 2048)
    g = map_to_interval(f, -3, 3)
    assert g.grid.origin == -3 and g.grid.step == pytest.approx(6 / 2047)
    assert np.array_equal(g.values, f.values)
    back = map_to_interval(g, 0, 1)
    assert abs(back.grid.step - f.grid.step) < 1e-15 and back.grid.origin == 0
    assert map_to_interval(f, 0, 1).grid.same_as(f.grid)


def test_zero_pad():
    f = map_to_interval(make_signal("Bumps", 64), -1, 1)
    padded, sl = zero_pad(f, -2.5, 2.0)
    assert padded.grid.origin <= -2.5 and padded.grid.end >= 2.0
    assert np.array_equal(padded.values[sl], f.values)
    assert not np.any(padded.values[: sl.start]) and not np.any(padded.values[sl.stop:])
    same, sl2 = zero_pad(f, -1, 1)
    assert len(same) == len(f) and sl2 == slice(0, 64)


def test_noise_config_validation():
    for kwargs in ({"sigma": -1}, {"replications": 0}, {"seed": -3}):
        with pytest.raises(ValueError):
            NoiseConfig(**kwargs)


def test_noise_determinism_and_zero_sigma():
    f = make_signal("Blocks", 256)
    assert add_noise(f, NoiseConfig(0.0), 0) is f
    cfg = NoiseConfig(0.5, 3, 7)
    assert np.array_equal(add_noise(f, cfg, 2).values, add_noise(f, cfg, 2).values)
    assert not np.array_equal(add_noise(f, cfg, 1).values, add_noise(f, cfg, 2).values)
    with pytest.raises(ValueError):
        add_noise(f, cfg, 3)


def test_noise_statistics():
    draws = noise_rng(42, 0).standard_normal(1_000_000) * 0.3
    assert np.var(draws) == pytest.approx(0.09, rel=0.01)
    a = noise_rng(42, 0).standard_normal(100_000)
    b = noise_rng(42, 1).standard_normal(100_000)
    assert abs(np.corrcoef(a, b)[0, 1]) < 0.01


def test_rms():
    f = SampledSignal(Grid(0, 1, 4), [1.0, -1.0, 1.0, -1.0])
    assert rms(f) == 1.0


@settings(max_examples=40, deadline=None)
@given(st.floats(-10, 10), st.floats(0.1, 10))
def test_mapping_round_trip(lo, width):
    f = make_signal("Heavisine", 33)
    back = map_to_interval(map_to_interval(f, lo, lo + width), 0, 1)
    assert np.max(np.abs(back.t - f.t)) < 1e-13
