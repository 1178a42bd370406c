import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from v2xpos.channel import ChannelTap, propagate, relative_response
from v2xpos.errors import AmbiguityError, ConfigError, NoPeakError, ToneErasedError
from v2xpos.ranging import (
    TonePair,
    equalize_tones,
    pdoa_estimate,
    pdoa_hierarchical,
    toa_estimate,
)
from v2xpos.waveform import OfdmConfig, Waveform, gen_ofdm_reference, gen_tones, gen_two_tone

C = 3e8
BASE = OfdmConfig()
PAIR = TonePair(1, 12)


@pytest.fixture(scope="module")
def ref():
    return gen_ofdm_reference(BASE, 0)


def brute_correlation(rx, ref):
    """|sum_n rx[n] conj(ref[n - lag])| for every lag, one roll at a time."""
    return np.array([abs(np.vdot(np.roll(ref, lag), rx)) for lag in range(len(rx))])


def test_toa_zero_delay(ref):
    r = toa_estimate(propagate(ref, [ChannelTap(0.0)]), ref)
    assert r.delay_s == 0.0 and r.range_m == 0.0 and r.method == "toa"


def test_toa_one_microsecond(ref):
    rx = propagate(ref, [ChannelTap(1e-6)])
    corr = brute_correlation(rx.samples, ref.samples)
    assert int(np.argmax(corr)) == 31  # 30.72 samples
    assert corr[30] > corr[32]  # arrival lies before sample 31
    r = toa_estimate(rx, ref)
    assert r.diagnostics["latched_index"] == 31
    assert r.range_m == pytest.approx(302.734375, abs=1e-9)
    err = r.range_m - 300.0
    assert err == pytest.approx(2.734, abs=1e-3)
    assert 0 <= err <= C / ref.fs_hz


def test_toa_range_equals_delay_times_c(ref):
    r = toa_estimate(propagate(ref, [ChannelTap(0.77e-6)]), ref)
    assert r.range_m == pytest.approx(r.delay_s * C, rel=1e-15)


@pytest.mark.parametrize("L, bound", [(1, 9.765625), (2, 4.8828125), (4, 2.44140625)])
def test_toa_noiseless_error_within_one_sample(L, bound):
    cfg = OfdmConfig(oversample=L)
    ref = gen_ofdm_reference(cfg, 2)
    assert C / cfg.fs_hz == pytest.approx(bound)
    rng = np.random.default_rng(L)
    worst = 0.0
    for d in rng.uniform(50, 500, 40):
        err = toa_estimate(propagate(ref, [ChannelTap(d / C)]), ref).range_m - d
        assert 0 <= err < bound
        worst = max(worst, err)
    assert worst > 0.8 * bound  # the bound is approached, not loose


@settings(max_examples=40, deadline=None)
@given(st.floats(0.0, 200.0))
def test_toa_error_bound_property(delay_samples):
    cfg = OfdmConfig(n_subcarriers=256)
    ref = gen_ofdm_reference(cfg, 9)
    tau = delay_samples / cfg.fs_hz
    r = toa_estimate(propagate(ref, [ChannelTap(tau)]), ref)
    err = (r.delay_s - tau) * cfg.fs_hz
    assert -1e-6 <= err < 1 + 1e-6


def test_toa_mean_error_at_30db(ref):
    rng = np.random.default_rng(4)
    errs = []
    for i, d in enumerate(rng.uniform(50, 500, 400)):
        rx = propagate(ref, [ChannelTap(d / C)], 30.0, seed=i)
        errs.append(abs(toa_estimate(rx, ref).range_m - d))
    half = 0.5 * C / ref.fs_hz
    assert half == pytest.approx(4.883, abs=1e-3)
    assert np.mean(errs) == pytest.approx(half, rel=0.15)


def test_toa_errors(ref):
    with pytest.raises(NoPeakError):
        toa_estimate(Waveform(np.zeros(len(ref)), ref.fs_hz), ref)
    with pytest.raises(ConfigError):
        toa_estimate(Waveform(ref.samples, 2 * ref.fs_hz), ref)


def test_tone_pair():
    assert PAIR.gap_hz == 165e3
    assert PAIR.ambiguity_range_m() == pytest.approx(1818.1818, abs=1e-4)
    with pytest.raises(ConfigError):
        TonePair(3, 3)


def two_tone_rx(range_m, snr_db=math.inf, seed=None, cfg=BASE):
    return propagate(gen_two_tone(cfg, 1, 12), [ChannelTap(range_m / C)], snr_db, seed)


def test_pdoa_100m():
    r = pdoa_estimate(two_tone_rx(100.0), PAIR)
    assert r.diagnostics["phase_diff_rad"] == pytest.approx(2 * math.pi * 165e3 * 100 / C, abs=1e-12)
    assert r.diagnostics["phase_diff_rad"] == pytest.approx(0.34558, abs=1e-5)
    assert r.range_m == pytest.approx(100.0, abs=1e-9)


def test_pdoa_wraps_beyond_ambiguity():
    r = pdoa_estimate(two_tone_rx(1918.18), PAIR)
    assert r.range_m == pytest.approx(1918.18 - 1818.1818, abs=1e-3)
    assert r.range_m == pytest.approx(100.00, abs=5e-3)


@settings(max_examples=50, deadline=None)
@given(st.floats(0.0, 1818.0))
def test_pdoa_exact_within_ambiguity(d):
    assert pdoa_estimate(two_tone_rx(d), PAIR).range_m == pytest.approx(d, abs=1e-9)


@settings(max_examples=30, deadline=None)
@given(st.floats(0.0, 1800.0), st.floats(-math.pi, math.pi))
def test_pdoa_common_phase_invariance(d, alpha):
    rx = two_tone_rx(d)
    rotated = Waveform(rx.samples * np.exp(1j * alpha), rx.fs_hz)
    assert pdoa_estimate(rotated, PAIR).range_m == pytest.approx(pdoa_estimate(rx, PAIR).range_m, abs=1e-9)


def test_pdoa_rmse_falls_with_snr():
    rng = np.random.default_rng(0)
    ds = rng.uniform(50, 500, 200)
    rmse = {}
    for snr in (0.0, 20.0, 40.0):
        e = [pdoa_estimate(two_tone_rx(d, snr, i), PAIR).range_m - d for i, d in enumerate(ds)]
        rmse[snr] = math.sqrt(np.mean(np.square(e)))
    assert rmse[40.0] < rmse[20.0] < rmse[0.0]


def test_pdoa_erased_tone():
    rx = Waveform(np.exp(2j * np.pi * np.arange(2048) / 2048), BASE.fs_hz)  # only tone 1
    with pytest.raises(ToneErasedError):
        pdoa_estimate(rx, PAIR)


HIER = [TonePair(1, 12), TonePair(1, 111)]


def hier_rx(d, snr_db=math.inf, seed=None):
    return propagate(gen_tones(BASE, (1, 12, 111)), [ChannelTap(d / C)], snr_db, seed)


def test_hierarchy_1500m():
    # lattice oracle: 1500 = 8 * (c / 1.65 MHz) + remainder
    fine_amb = C / 1.65e6
    wraps, rem = divmod(1500.0, fine_amb)
    assert (wraps, round(rem, 3)) == (8, 45.455)
    r = pdoa_hierarchical(hier_rx(1500.0), HIER)
    assert r.diagnostics["wrapped_m"][1] == pytest.approx(rem, abs=1e-6)
    assert r.range_m == pytest.approx(1500.0, abs=1e-6)
    assert r.method == "pdoa_hier"


def test_hierarchy_single_pair_is_plain_pdoa():
    rx = two_tone_rx(321.0)
    assert pdoa_hierarchical(rx, [PAIR]) == pdoa_estimate(rx, PAIR)


def test_hierarchy_exact_when_inside_finest_ambiguity():
    r = pdoa_hierarchical(hier_rx(123.4), HIER)
    for stage in r.diagnostics["stages_m"]:
        assert stage == pytest.approx(123.4, abs=1e-6)


@settings(max_examples=40, deadline=None)
@given(st.floats(0.0, 1800.0))
def test_hierarchy_congruent_to_truth(d):
    r = pdoa_hierarchical(hier_rx(d), HIER)
    fine_amb = C / 1.65e6
    assert math.remainder(r.range_m - d, fine_amb) == pytest.approx(0.0, abs=1e-6)
    assert r.range_m == pytest.approx(d, abs=1e-6)


def test_hierarchy_flags_inconsistent_stage():
    # coarse stage pushed 60 m off by a phase error on tone 12; the fine stage
    # then needs a correction beyond the stated 20 m stage error
    cfg = BASE
    n = np.arange(cfg.n_samples)
    d = 500.0
    tones = {k: np.exp(2j * np.pi * k * (n / cfg.n_samples - cfg.spacing_hz * d / C)) for k in (1, 12, 111)}
    tones[12] = tones[12] * np.exp(-2j * np.pi * 165e3 * 60 / C)
    rx = Waveform(sum(tones.values()), cfg.fs_hz)
    with pytest.raises(AmbiguityError) as info:
        pdoa_hierarchical(rx, HIER, stage_error_m=20.0)
    assert info.value.estimate_m == pytest.approx(560.0, abs=1e-6)


def test_hierarchy_validation():
    with pytest.raises(ConfigError):
        pdoa_hierarchical(hier_rx(10.0), HIER[::-1])
    with pytest.raises(ConfigError):
        pdoa_hierarchical(hier_rx(10.0), HIER, stage_error_m=100.0)
    with pytest.raises(ConfigError):
        pdoa_hierarchical(hier_rx(10.0), [])


FREQS = [15e3, 180e3]


def test_equalize_flat_channel_is_identity():
    rx = two_tone_rx(250.0)
    out = equalize_tones(rx, FREQS, [1.0, 1.0])
    np.testing.assert_array_equal(out.samples, rx.samples)


def test_equalize_two_tap_channel():
    los = ChannelTap(250.0 / C, 0.8)
    echo = ChannelTap(310.0 / C, 0.6 * np.exp(1j * 2.0))
    tx = gen_two_tone(BASE, 1, 12)
    rx = propagate(tx, [los, echo])
    clean = pdoa_estimate(propagate(tx, [los]), PAIR).range_m
    distorted = pdoa_estimate(rx, PAIR).range_m
    assert abs(distorted - clean) > 1.0  # the echo visibly biases raw PDoA
    h = relative_response([los, echo], FREQS)
    fixed = pdoa_estimate(equalize_tones(rx, FREQS, h), PAIR).range_m
    assert fixed == pytest.approx(clean, abs=1e-9)
    assert fixed == pytest.approx(250.0, abs=1e-9)


def test_equalize_rejects_null():
    with pytest.raises(ToneErasedError):
        equalize_tones(two_tone_rx(10.0), FREQS, [1.0, 0.0])
