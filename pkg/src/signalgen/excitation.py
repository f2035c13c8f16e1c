"""Hann-windowed toneburst excitation."""
from dataclasses import dataclass

import numpy as np

from src.core.types import DamageClass, Provenance, SeriesMeta, TimeSeries
from src.utils.exceptions import ConfigurationError
from src.utils.log_config import get_logger

logger = get_logger(__name__)

@dataclass
class ExcitationConfig:
    """Drive signal parameters."""

    f: float = 1e5                 # carrier frequency, Hz
    n_cycles: int = 5
    amplitude: float = 10.0        # peak drive amplitude (20 Vpp)
    fs: float = 1e7                # synthetic default; 1e8 for parity with 100 MHz captures
    record_seconds: float = 2e-4

    def validate(self) -> None:
        """Validate configuration."""
        if not (np.isfinite(self.f) and self.f > 0):
            raise ConfigurationError(f"excitation.f must be > 0, got {self.f}")
        if int(self.n_cycles) != self.n_cycles or self.n_cycles < 1:
            raise ConfigurationError(f"excitation.n_cycles must be a positive integer, got {self.n_cycles}")
        if not self.amplitude > 0:
            raise ConfigurationError(f"excitation.amplitude must be > 0, got {self.amplitude}")
        if not self.fs >= 20 * self.f:
            raise ConfigurationError(
                f"excitation.fs must be >= 20*f = {20 * self.f:g} Hz, got {self.fs:g}"
            )
        if not self.record_seconds >= self.burst_seconds:
            raise ConfigurationError(
                f"excitation.record_seconds must be >= n_cycles/f = {self.burst_seconds:g} s, "
                f"got {self.record_seconds:g}"
            )

    @property
    def dt(self) -> float:
        return 1.0 / self.fs

    @property
    def burst_seconds(self) -> float:
        return self.n_cycles / self.f

    @property
    def n_samples(self) -> int:
        return int(round(self.record_seconds * self.fs))

def toneburst_value(t: np.ndarray, cfg: ExcitationConfig) -> np.ndarray:
    """Closed-form burst V(t); zero outside [0, n_cycles/f)."""
    t = np.asarray(t, dtype=float)
    phase = 2 * np.pi * cfg.f * t
    value = 0.5 * cfg.amplitude * (1 - np.cos(phase / cfg.n_cycles)) * np.sin(phase)
    return np.where((t >= 0) & (t < cfg.burst_seconds), value, 0.0)

def hann_toneburst(cfg: ExcitationConfig) -> TimeSeries:
    """Generate the excitation record: burst followed by a zero-padded tail."""
    cfg.validate()
    t = np.arange(cfg.n_samples) * cfg.dt
    samples = toneburst_value(t, cfg)
    logger.debug(f"Toneburst: f={cfg.f:g} Hz, fs={cfg.fs:g} Hz, {cfg.n_samples} samples")
    return TimeSeries(
        samples=samples,
        dt=cfg.dt,
        meta=SeriesMeta(label=DamageClass.BASELINE, path_id="excitation", provenance=Provenance.SYNTHETIC),
    )

def dense_peak(cfg: ExcitationConfig, oversample: int = 10) -> float:
    """max|V| of the closed form on a grid ``oversample`` times finer than fs."""
    n = int(np.ceil(cfg.burst_seconds * cfg.fs * oversample)) + 1
    t = np.linspace(0.0, cfg.burst_seconds, n)
    return float(np.max(np.abs(toneburst_value(t, cfg))))
