"""Propagation: fractional delay, multipath, AWGN, path loss and array RSS scans."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple, Sequence

import numpy as np

from .errors import ConfigError
from .scenario import C
from .waveform import Waveform


@dataclass(frozen=True)
class ChannelTap:
    delay_s: float
    gain: complex = 1.0
    aoa_rad: float = 0.0

    def __post_init__(self):
        if not self.delay_s >= 0:
            raise ConfigError("tap delay must be non-negative")
        if not np.isfinite(abs(self.gain)):
            raise ConfigError("tap gain must be finite")


@dataclass(frozen=True)
class ArrayConfig:
    n_elements: int = 64
    spacing_wavelengths: float = 0.5

    def __post_init__(self):
        if self.n_elements < 1:
            raise ConfigError("array needs at least one element")


@dataclass(frozen=True)
class LinkBudget:
    tx_power_dbm: float = 23.0
    noise_psd_dbm_hz: float = -174.0
    bandwidth_hz: float = 100e6

    def __post_init__(self):
        if not self.bandwidth_hz > 0:
            raise ConfigError("bandwidth must be positive")

    @property
    def noise_floor_dbm(self) -> float:
        return self.noise_psd_dbm_hz + 10 * math.log10(self.bandwidth_hz)


def frequency_response(taps: Sequence[ChannelTap], freqs_hz) -> np.ndarray:
    f = np.asarray(freqs_hz, dtype=float)
    h = np.zeros(f.shape, dtype=complex)
    for t in taps:
        h += t.gain * np.exp(-2j * np.pi * f * t.delay_s)
    return h


def relative_response(taps: Sequence[ChannelTap], freqs_hz, reference: int = 0) -> np.ndarray:
    """Channel response divided by the reference tap's own response.

    This is the selective-fading factor: what the other taps add on top of
    the reference (line-of-sight) tap at each frequency.
    """
    ref = taps[reference]
    f = np.asarray(freqs_hz, dtype=float)
    return frequency_response(taps, f) / (ref.gain * np.exp(-2j * np.pi * f * ref.delay_s))


def _as_rng(seed) -> np.random.Generator:
    if isinstance(seed, np.random.Generator):
        return seed
    return np.random.default_rng(seed)


def propagate(wave: Waveform, taps: Sequence[ChannelTap], snr_db: float = math.inf,
              seed=None) -> Waveform:
    """Circularly delay and sum the taps, then add complex white Gaussian noise.

    Delays are applied as a phase ramp on the DFT of the waveform, so they are
    exact for any real-valued delay. ``snr_db`` is the per-sample ratio of the
    noiseless received power to the noise variance; ``inf`` adds no noise.
    """
    if not taps:
        raise ConfigError("at least one channel tap is required")
    x = wave.samples
    f = np.fft.fftfreq(x.size, d=1.0 / wave.fs_hz)
    y = np.fft.ifft(np.fft.fft(x) * frequency_response(taps, f))
    if math.isfinite(snr_db):
        p_sig = float(np.mean(np.abs(y) ** 2))
        sigma2 = p_sig / 10 ** (snr_db / 10)
        rng = _as_rng(seed)
        y = y + np.sqrt(sigma2 / 2) * (rng.standard_normal(y.size) + 1j * rng.standard_normal(y.size))
    return Waveform(y, wave.fs_hz, wave.carrier_hz)


@dataclass(frozen=True)
class LogDistance:
    """PL = A + B*log10(d) + C*log10(f_GHz); coefficients come from config."""

    A: float
    B: float
    C: float = 0.0


def pathloss_model(cfg) -> str | LogDistance:
    """Build a model from its JSON form, e.g. ``{"model": "log_distance", "A": .., "B": .., "C": ..}``."""
    if isinstance(cfg, (str, LogDistance)):
        return cfg
    kind = cfg.get("model")
    if kind == "free_space":
        return "free_space"
    if kind == "log_distance":
        return LogDistance(float(cfg["A"]), float(cfg["B"]), float(cfg.get("C", 0.0)))
    raise ConfigError(f"unknown path-loss model {kind!r}")


def pathloss_db(model, freq_hz: float, dist_m: float, c: float = C) -> float:
    if not dist_m > 0:
        raise ConfigError("distance must be positive")
    if not freq_hz > 0:
        raise ConfigError("frequency must be positive")
    model = pathloss_model(model)
    if model == "free_space":
        return 20 * math.log10(4 * math.pi * dist_m * freq_hz / c)
    if isinstance(model, LogDistance):
        return model.A + model.B * math.log10(dist_m) + model.C * math.log10(freq_hz / 1e9)
    raise ConfigError(f"unknown path-loss model {model!r}")


def steering(array: ArrayConfig, angle_rad) -> np.ndarray:
    """ULA response; angle measured from broadside. Shape (..., n_elements)."""
    n = np.arange(array.n_elements)
    a = np.asarray(angle_rad, dtype=float)[..., None]
    return np.exp(2j * np.pi * array.spacing_wavelengths * n * np.sin(a))


class RssScan(NamedTuple):
    angles_rad: np.ndarray
    rss_db: np.ndarray
    noise_floor_dbm: float

    def rows(self) -> list[tuple[float, float]]:
        return list(zip(self.angles_rad.tolist(), self.rss_db.tolist()))


def rss_scan(paths: Sequence[ChannelTap], array: ArrayConfig, budget: LinkBudget,
             scan_angles) -> RssScan:
    """Received power after steering a unit-norm beam to each scan angle.

    Tap gains are linear amplitudes (path loss and phase included).
    """
    if not paths:
        raise ConfigError("at least one path is required")
    a = sum(p.gain * steering(array, p.aoa_rad) for p in paths)
    scan = np.asarray(scan_angles, dtype=float)
    w = steering(array, scan) / math.sqrt(array.n_elements)
    amp = np.abs(np.conj(w) @ a)
    with np.errstate(divide="ignore"):
        rss = budget.tx_power_dbm + 20 * np.log10(amp)
    return RssScan(scan, rss, budget.noise_floor_dbm)
