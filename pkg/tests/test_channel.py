import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from v2xpos.channel import (
    ArrayConfig,
    ChannelTap,
    LinkBudget,
    LogDistance,
    pathloss_db,
    pathloss_model,
    propagate,
    relative_response,
    rss_scan,
)
from v2xpos.errors import ConfigError
from v2xpos.ranging import toa_estimate
from v2xpos.waveform import OfdmConfig, Waveform, gen_ofdm_reference

CFG = OfdmConfig(n_subcarriers=256)


@pytest.fixture
def ref():
    return gen_ofdm_reference(CFG, 1)


def test_identity_tap(ref):
    out = propagate(ref, [ChannelTap(0.0, 1.0)])
    np.testing.assert_allclose(out.samples, ref.samples, atol=1e-12)


def test_integer_delay_is_cyclic_shift(ref):
    out = propagate(ref, [ChannelTap(10 / ref.fs_hz)])
    np.testing.assert_allclose(out.samples, np.roll(ref.samples, 10), atol=1e-12)


def test_half_sample_delay_phase_ramp(ref):
    tau = 0.5 / ref.fs_hz
    out = propagate(ref, [ChannelTap(tau)])
    f = np.fft.fftfreq(len(ref), 1 / ref.fs_hz)
    ratio = np.fft.fft(out.samples) / np.fft.fft(ref.samples)
    np.testing.assert_allclose(ratio, np.exp(-2j * np.pi * f * tau), atol=1e-9)


def test_gain_and_multipath_superpose(ref):
    taps = [ChannelTap(3 / ref.fs_hz, 0.5j), ChannelTap(7 / ref.fs_hz, -0.25)]
    out = propagate(ref, taps)
    expect = 0.5j * np.roll(ref.samples, 3) - 0.25 * np.roll(ref.samples, 7)
    np.testing.assert_allclose(out.samples, expect, atol=1e-12)


@settings(max_examples=25, deadline=None)
@given(st.floats(0, 200))
def test_delay_conserves_energy(delay_samples):
    ref = gen_ofdm_reference(CFG, 1)
    out = propagate(ref, [ChannelTap(delay_samples / ref.fs_hz)])
    assert out.power == pytest.approx(ref.power, abs=1e-9)


@settings(max_examples=20, deadline=None)
@given(st.floats(0, 50), st.integers(1, 60))
def test_integer_offset_shifts_peak_by_k(frac, k):
    ref = gen_ofdm_reference(CFG, 1)
    a = toa_estimate(propagate(ref, [ChannelTap(frac / ref.fs_hz)]), ref)
    b = toa_estimate(propagate(ref, [ChannelTap((frac + k) / ref.fs_hz)]), ref)
    assert b.diagnostics["peak_index"] - a.diagnostics["peak_index"] == k


def test_noise_level_and_seed(ref):
    rx = propagate(ref, [ChannelTap(0.0)], snr_db=10.0, seed=3)
    noise = rx.samples - ref.samples
    # 256 complex samples: 20% on the measured noise power is ~3 sigma
    assert np.mean(np.abs(noise) ** 2) == pytest.approx(0.1, rel=0.2)
    again = propagate(ref, [ChannelTap(0.0)], snr_db=10.0, seed=3)
    np.testing.assert_array_equal(rx.samples, again.samples)


def test_propagate_needs_taps(ref):
    with pytest.raises(ConfigError):
        propagate(ref, [])
    with pytest.raises(ConfigError):
        ChannelTap(-1e-9)


def test_relative_response_single_tap_is_flat():
    taps = [ChannelTap(1e-6, 0.3 + 0.1j)]
    np.testing.assert_allclose(relative_response(taps, [15e3, 180e3]), 1.0)


def test_free_space_values():
    assert pathloss_db("free_space", 5.9e9, 100.0) == pytest.approx(87.859, abs=5e-4)
    assert pathloss_db("free_space", 60e9, 100.0) == pytest.approx(108.005, abs=5e-4)
    gap = pathloss_db("free_space", 60e9, 100.0) - pathloss_db("free_space", 5.9e9, 100.0)
    assert gap == pytest.approx(20 * math.log10(60 / 5.9), abs=1e-9)
    assert gap == pytest.approx(20.146, abs=5e-4)


def test_log_distance_reproduces_free_space():
    model = pathloss_model({"model": "log_distance", "A": 87.859, "B": 20, "C": 0})
    assert model == LogDistance(87.859, 20.0, 0.0)
    # at 100 m the B*log10(d) term contributes exactly 40 dB
    assert pathloss_db(model, 5.9e9, 100.0) == pytest.approx(87.859 + 40.0)
    shifted = LogDistance(87.859 - 40.0, 20.0, 0.0)
    assert pathloss_db(shifted, 5.9e9, 100.0) == pytest.approx(
        pathloss_db("free_space", 5.9e9, 100.0), abs=5e-4)


def test_pathloss_errors():
    with pytest.raises(ConfigError):
        pathloss_db("free_space", 5.9e9, 0.0)
    with pytest.raises(ConfigError):
        pathloss_db("free_space", 0.0, 10.0)
    with pytest.raises(ConfigError):
        pathloss_model({"model": "hata"})


def test_noise_floor():
    assert LinkBudget().noise_floor_dbm == -94.0


def test_array_gain_single_path():
    budget = LinkBudget()
    scan = rss_scan([ChannelTap(0.0, 1.0, 0.0)], ArrayConfig(), budget, [0.0])
    single = rss_scan([ChannelTap(0.0, 1.0, 0.0)], ArrayConfig(n_elements=1), budget, [0.0])
    assert scan.rss_db[0] - single.rss_db[0] == pytest.approx(10 * math.log10(64), abs=1e-9)
    assert scan.rss_db[0] - budget.tx_power_dbm == pytest.approx(18.062, abs=5e-4)
    assert scan.noise_floor_dbm == -94.0


def _beam_oracle(aoas, gains, psi, n=64, d=0.5):
    """Element-by-element beam output, no vectorization shared with the library."""
    total = 0j
    for k in range(n):
        ak = sum(g * complex(math.cos(2 * math.pi * d * k * math.sin(a)),
                             math.sin(2 * math.pi * d * k * math.sin(a))) for a, g in zip(aoas, gains))
        wk = complex(math.cos(2 * math.pi * d * k * math.sin(psi)),
                     -math.sin(2 * math.pi * d * k * math.sin(psi))) / math.sqrt(n)
        total += wk * ak
    return 20 * math.log10(abs(total))


def test_two_paths_give_two_maxima():
    aoas = [math.radians(-60), math.radians(60)]
    taps = [ChannelTap(0.0, 1.0, a) for a in aoas]
    grid = np.radians(np.arange(-900, 901) / 10)
    scan = rss_scan(taps, ArrayConfig(), LinkBudget(tx_power_dbm=0.0), grid)
    r = scan.rss_db
    local = [i for i in range(1, len(r) - 1) if r[i] > r[i - 1] and r[i] > r[i + 1]]
    top2 = sorted(sorted(local, key=lambda i: r[i])[-2:])
    np.testing.assert_allclose(np.degrees(grid[top2]), [-60.0, 60.0], atol=0.1)
    for i in top2 + [900, 123]:
        assert r[i] == pytest.approx(_beam_oracle(aoas, [1.0, 1.0], grid[i]), abs=1e-9)


@settings(max_examples=40, deadline=None)
@given(st.lists(st.tuples(st.floats(-1.5, 1.5), st.floats(0.01, 2.0), st.floats(-3, 3)),
                min_size=1, max_size=4),
       st.integers(1, 64))
def test_array_gain_bound(paths, n):
    taps = [ChannelTap(0.0, g * np.exp(1j * ph), a) for a, g, ph in paths]
    scan = rss_scan(taps, ArrayConfig(n_elements=n), LinkBudget(tx_power_dbm=0.0),
                    np.linspace(-1.5, 1.5, 61))
    ceiling = 10 * math.log10(n) + 20 * math.log10(sum(g for _, g, _ in paths))
    assert np.max(scan.rss_db) <= ceiling + 1e-9
