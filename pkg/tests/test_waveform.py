import numpy as np
import pytest

from v2xpos.errors import ConfigError
from v2xpos.waveform import (
    OfdmConfig,
    Waveform,
    gen_ofdm_reference,
    gen_tones,
    gen_two_tone,
    reference_symbols,
)


@pytest.mark.parametrize("L, n, fs", [(1, 2048, 30.72e6), (2, 4096, 61.44e6), (4, 8192, 122.88e6)])
def test_sampling_rates(L, n, fs):
    w = gen_ofdm_reference(OfdmConfig(oversample=L), seed=0)
    assert len(w) == n
    assert w.fs_hz == pytest.approx(fs, rel=1e-15)


def test_unit_power_and_determinism():
    cfg = OfdmConfig()
    a, b = gen_ofdm_reference(cfg, 5), gen_ofdm_reference(cfg, 5)
    assert a.power == pytest.approx(1.0, abs=1e-12)
    assert np.array_equal(a.samples, b.samples)
    assert not np.array_equal(a.samples, gen_ofdm_reference(cfg, 6).samples)


@pytest.mark.parametrize("L", [1, 2, 4])
def test_spectrum_recovers_symbols(L):
    cfg = OfdmConfig(oversample=L)
    w = gen_ofdm_reference(cfg, 11)
    m, n = cfg.n_samples, cfg.n_subcarriers
    spec = np.fft.fft(w.samples) * np.sqrt(n) / m
    sym = reference_symbols(cfg, 11)
    recovered = np.concatenate([spec[: n // 2], spec[m - n // 2:]])
    np.testing.assert_allclose(recovered, sym, atol=1e-9)
    np.testing.assert_allclose(np.abs(sym), 1.0)


@pytest.mark.parametrize("L", [2, 4])
def test_decimated_oversampled_matches_base(L):
    base = gen_ofdm_reference(OfdmConfig(oversample=1), 3).samples
    over = gen_ofdm_reference(OfdmConfig(oversample=L), 3).samples
    np.testing.assert_allclose(over[::L], base, atol=1e-9)


def test_cyclic_prefix():
    w = gen_ofdm_reference(OfdmConfig(n_subcarriers=64, cp_len=8), 0)
    assert len(w) == 72
    np.testing.assert_array_equal(w.samples[:8], w.samples[-8:])


def test_config_validation():
    with pytest.raises(ConfigError):
        OfdmConfig(n_subcarriers=1000)
    with pytest.raises(ConfigError):
        OfdmConfig(oversample=3)


def test_two_tone_gap_and_bins():
    cfg = OfdmConfig()
    w = gen_two_tone(cfg, 1, 12)
    assert (12 - 1) * cfg.spacing_hz == 165e3
    mag = np.abs(np.fft.fft(w.samples))
    assert set(np.flatnonzero(mag > 1e-6)) == {1, 12}
    # both tones start at phase zero
    assert w.samples[0] == pytest.approx(2.0)


def test_two_tone_oversampled_bins_keep_frequency():
    cfg = OfdmConfig(oversample=2)
    w = gen_two_tone(cfg, 1, 12)
    f = np.fft.fftfreq(len(w), 1 / w.fs_hz)
    peaks = np.flatnonzero(np.abs(np.fft.fft(w.samples)) > 1e-6)
    np.testing.assert_allclose(f[peaks], [15e3, 180e3])


def test_two_tone_rejects_equal_and_out_of_range():
    cfg = OfdmConfig()
    with pytest.raises(ConfigError):
        gen_two_tone(cfg, 3, 3)
    with pytest.raises(ConfigError):
        gen_two_tone(cfg, 0, 3)
    with pytest.raises(ConfigError):
        gen_two_tone(cfg, 1, 1025)
    with pytest.raises(ConfigError):
        gen_tones(cfg, (1, 1))


def test_waveform_is_read_only():
    w = Waveform([1, 2, 3], 1.0)
    with pytest.raises(ValueError):
        w.samples[0] = 5
    with pytest.raises(ConfigError):
        Waveform([], 1.0)
    with pytest.raises(ConfigError):
        Waveform([1], 0.0)
