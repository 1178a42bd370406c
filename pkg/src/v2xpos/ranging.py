"""Waveform range estimators: grid-limited ToA, two-tone PDoA and its
multi-frequency hierarchy, plus tone equalization for selective fading."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .errors import AmbiguityError, ConfigError, NoPeakError, ToneErasedError
from .scenario import C
from .waveform import Waveform


@dataclass(frozen=True)
class RangingResult:
    range_m: float
    delay_s: float
    method: str
    diagnostics: dict = field(default_factory=dict, compare=False)


@dataclass(frozen=True)
class TonePair:
    k1: int
    k2: int
    spacing_hz: float = 15e3

    def __post_init__(self):
        if self.k1 == self.k2:
            raise ConfigError("tone pair needs two different subcarriers")
        if not self.spacing_hz > 0:
            raise ConfigError("subcarrier spacing must be positive")

    @property
    def gap_hz(self) -> float:
        return abs(self.k2 - self.k1) * self.spacing_hz

    def ambiguity_range_m(self, c: float = C) -> float:
        return c / self.gap_hz


def toa_estimate(rx: Waveform, ref: Waveform, c: float = C) -> RangingResult:
    """Delay from the circular cross-correlation peak, on the sample grid only.

    The arrival is latched to the first sample instant at or after the true
    arrival: the correlation peak gives the nearest sample, and comparing the
    early and late neighbours tells whether the arrival lies before or after
    it. The result never leaves the grid, so the error is confined to one
    sample period [0, 1/fs).
    """
    if rx.fs_hz != ref.fs_hz:
        raise ConfigError("rx and ref must share a sampling rate")
    if len(rx) != len(ref):
        raise ConfigError("rx and ref must have equal length")
    x = rx.samples
    if not np.any(x):
        raise NoPeakError("received waveform is all zeros")
    m = x.size
    mag = np.abs(np.fft.ifft(np.fft.fft(x) * np.conj(np.fft.fft(ref.samples))))
    peak = int(np.argmax(mag))
    early, late = mag[peak - 1], mag[(peak + 1) % m]
    # compare the neighbours with each other, not against the peak: at base
    # rate both shrink like the offset from an integer delay. The relative
    # margin and the floor keep rounding residue at exact integer delays
    # from latching forward
    latched = peak + 1 if late > early * (1 + 1e-12) and late > 1e-10 * mag[peak] else peak
    latched %= m
    delay = latched / rx.fs_hz
    return RangingResult(delay * c, delay, "toa", {
        "peak_index": peak, "latched_index": latched,
        "early": float(early), "late": float(late),
    })


def tone_projection(rx: Waveform, freq_hz: float) -> complex:
    """Single-bin DFT of ``rx`` at an arbitrary frequency (mean over samples)."""
    n = np.arange(len(rx))
    return complex(np.mean(rx.samples * np.exp(-2j * np.pi * freq_hz * n / rx.fs_hz)))


def _phase_lag(rx: Waveform, freq_hz: float, min_power: float) -> float:
    z = tone_projection(rx, freq_hz)
    if abs(z) ** 2 < min_power:
        raise ToneErasedError(f"tone at {freq_hz:g} Hz below power threshold")
    return -math.atan2(z.imag, z.real)


def pdoa_estimate(rx: Waveform, pair: TonePair, c: float = C,
                  min_tone_power: float = 1e-6) -> RangingResult:
    """Range from the phase difference of two tones, modulo c / gap.

    Each tone's phase lag is read by projecting ``rx`` on that tone; the
    lag difference wrapped to [0, 2*pi) maps linearly onto [0, c/gap).
    """
    lo, hi = sorted((pair.k1, pair.k2))
    f_lo, f_hi = lo * pair.spacing_hz, hi * pair.spacing_hz
    dphi = (_phase_lag(rx, f_hi, min_tone_power) - _phase_lag(rx, f_lo, min_tone_power)) % (2 * math.pi)
    rng_m = c * dphi / (2 * math.pi * pair.gap_hz)
    if rng_m >= pair.ambiguity_range_m(c):  # dphi rounded up to 2*pi
        rng_m = 0.0
    return RangingResult(rng_m, rng_m / c, "pdoa", {"phase_diff_rad": dphi})


def pdoa_hierarchical(rx: Waveform, pairs: Sequence[TonePair], c: float = C,
                      stage_error_m: float | None = None,
                      min_tone_power: float = 1e-6) -> RangingResult:
    """Coarse-to-fine PDoA: each finer pair picks the wrap count that puts its
    wrapped estimate nearest the previous stage's range.

    ``stage_error_m`` bounds the error expected from any stage. Each finer
    ambiguity range must exceed twice it, and a stage whose correction is
    larger than it is reported as an ambiguity failure. When omitted, a
    quarter of each finer ambiguity range is used.
    """
    if not pairs:
        raise ConfigError("at least one tone pair is required")
    gaps = [p.gap_hz for p in pairs]
    if any(b <= a for a, b in zip(gaps, gaps[1:])):
        raise ConfigError("tone pairs must be sorted by strictly increasing gap")
    if stage_error_m is not None:
        for p in pairs[1:]:
            if not p.ambiguity_range_m(c) > 2 * stage_error_m:
                raise ConfigError("finer ambiguity range must exceed twice the stage error bound")

    first = pdoa_estimate(rx, pairs[0], c, min_tone_power)
    if len(pairs) == 1:
        return first
    est = first.range_m
    stages, wrapped_all = [est], [est]
    for p in pairs[1:]:
        amb = p.ambiguity_range_m(c)
        wrapped = pdoa_estimate(rx, p, c, min_tone_power).range_m
        wrapped_all.append(wrapped)
        wraps = round((est - wrapped) / amb)
        refined = wrapped + wraps * amb
        bound = amb / 4 if stage_error_m is None else stage_error_m
        if abs(refined - est) > bound:
            exc = AmbiguityError(
                f"stage correction {abs(refined - est):.3f} m exceeds {bound:.3f} m"
            )
            exc.estimate_m = est
            raise exc
        est = refined
        stages.append(est)
    return RangingResult(est, est / c, "pdoa_hier", {"stages_m": stages, "wrapped_m": wrapped_all})


def equalize_tones(rx: Waveform, tone_freqs_hz: Sequence[float], channel_response,
                   min_response: float = 1e-6) -> Waveform:
    """Divide each tone's content in ``rx`` by the known channel response there.

    With the response taken relative to the line-of-sight tap (see
    :func:`v2xpos.channel.relative_response`) the tones afterwards carry only
    that tap's delay. Everything outside the tone projections is left as is.
    """
    h = np.broadcast_to(np.asarray(channel_response, dtype=complex), (len(tone_freqs_hz),))
    if np.any(np.abs(h) < min_response):
        raise ToneErasedError("channel response vanishes at a tone")
    n = np.arange(len(rx))
    y = rx.samples.copy()
    for f, hk in zip(tone_freqs_hz, h):
        z = tone_projection(rx, f)
        y += (z / hk - z) * np.exp(2j * np.pi * f * n / rx.fs_hz)
    return Waveform(y, rx.fs_hz, rx.carrier_hz)
