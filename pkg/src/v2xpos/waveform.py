"""OFDM reference and multi-tone probing waveforms."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ConfigError


@dataclass(frozen=True)
class OfdmConfig:
    n_subcarriers: int = 2048
    spacing_hz: float = 15e3
    oversample: int = 1
    cp_len: int = 0

    def __post_init__(self):
        n = self.n_subcarriers
        if n < 2 or n & (n - 1):
            raise ConfigError("n_subcarriers must be a power of two")
        if self.oversample not in (1, 2, 4):
            raise ConfigError("oversample must be 1, 2 or 4")
        if not self.spacing_hz > 0:
            raise ConfigError("subcarrier spacing must be positive")
        if self.cp_len < 0:
            raise ConfigError("negative cyclic prefix")

    @property
    def fs_hz(self) -> float:
        return self.n_subcarriers * self.spacing_hz * self.oversample

    @property
    def n_samples(self) -> int:
        return self.n_subcarriers * self.oversample


@dataclass(frozen=True, eq=False)
class Waveform:
    samples: np.ndarray
    fs_hz: float
    carrier_hz: float = 0.0

    def __post_init__(self):
        x = np.array(self.samples, dtype=complex)
        if x.ndim != 1 or x.size == 0:
            raise ConfigError("waveform must be a non-empty 1-D sequence")
        if not self.fs_hz > 0:
            raise ConfigError("sampling rate must be positive")
        x.flags.writeable = False
        object.__setattr__(self, "samples", x)

    def __len__(self):
        return self.samples.size

    @property
    def power(self) -> float:
        return float(np.mean(np.abs(self.samples) ** 2))


def reference_symbols(cfg: OfdmConfig, seed: int) -> np.ndarray:
    """Seeded unit-modulus QPSK symbols, one per subcarrier (FFT bin order)."""
    rng = np.random.default_rng(seed)
    q = rng.integers(0, 4, cfg.n_subcarriers)
    return np.exp(1j * (np.pi / 4 + np.pi / 2 * q))


def zero_pad_spectrum(symbols: np.ndarray, oversample: int) -> np.ndarray:
    """Spread an N-bin spectrum over N*L bins, keeping negative frequencies at the top."""
    n = symbols.size
    if oversample == 1:
        return symbols.copy()
    out = np.zeros(n * oversample, dtype=complex)
    half = n // 2
    out[:half] = symbols[:half]
    out[-(n - half):] = symbols[half:]
    return out


def gen_ofdm_reference(cfg: OfdmConfig, seed: int) -> Waveform:
    """One OFDM symbol with every subcarrier active, unit average power.

    Oversampling pads the spectrum with zeros, which is exact band-limited
    interpolation: decimating the L-times waveform by L gives the L=1 one.
    """
    spec = zero_pad_spectrum(reference_symbols(cfg, seed), cfg.oversample)
    m = spec.size
    x = np.fft.ifft(spec) * (m / np.sqrt(cfg.n_subcarriers))
    if cfg.cp_len:
        x = np.concatenate([x[-cfg.cp_len:], x])
    return Waveform(x, cfg.fs_hz)


def gen_tones(cfg: OfdmConfig, subcarriers) -> Waveform:
    """Sum of unit-amplitude complex exponentials at ``k * spacing`` with zero initial phase."""
    ks = [int(k) for k in subcarriers]
    if len(set(ks)) != len(ks):
        raise ConfigError("tone subcarriers must be distinct")
    if any(not 0 < k <= cfg.n_subcarriers // 2 for k in ks):
        raise ConfigError("tone subcarrier out of range (0, n_subcarriers/2]")
    n = np.arange(cfg.n_samples)
    x = np.zeros(cfg.n_samples, dtype=complex)
    for k in ks:
        x += np.exp(2j * np.pi * k * n / cfg.n_samples)
    return Waveform(x, cfg.fs_hz)


def gen_two_tone(cfg: OfdmConfig, k1: int, k2: int) -> Waveform:
    if k1 == k2:
        raise ConfigError("identical tones carry no phase-difference information")
    if not k1 < k2:
        raise ConfigError("expected k1 < k2")
    return gen_tones(cfg, (k1, k2))
