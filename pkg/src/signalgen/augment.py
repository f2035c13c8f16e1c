"""White-noise augmentation scaled to the signal's peak amplitude."""
from dataclasses import dataclass

import numpy as np

from src.core.types import Provenance, TimeSeries
from src.utils.exceptions import ConfigurationError
from src.utils.log_config import get_logger

logger = get_logger(__name__)

ZERO_SCALE_STATUS = "zero-scale-noise"

@dataclass
class NoiseConfig:
    """Noise augmentation settings; ``seed`` is the dataset master seed."""

    beta_n: float = 0.01
    copies: int = 10
    seed: int = 2024

    def validate(self) -> None:
        """Validate configuration."""
        if not (np.isfinite(self.beta_n) and self.beta_n >= 0):
            raise ConfigurationError(f"noise.beta_n must be >= 0, got {self.beta_n}")
        if int(self.copies) != self.copies or self.copies < 1:
            raise ConfigurationError(f"noise.copies must be an integer >= 1, got {self.copies}")
        if int(self.seed) != self.seed or not 0 <= self.seed < 2**64:
            raise ConfigurationError(f"noise.seed must be a 64-bit unsigned integer, got {self.seed}")

def add_noise(s: TimeSeries, beta_n: float, rng_seed: int, copy: int = 0) -> TimeSeries:
    """s(t) + beta_n * max|s| * w(t) with w standard normal."""
    if not beta_n >= 0:
        raise ConfigurationError(f"beta_n must be >= 0, got {beta_n}")

    if beta_n == 0:
        return s.with_samples(s.samples.copy(), provenance=Provenance.AUGMENTED, copy=copy)

    peak = float(np.max(np.abs(s.samples)))
    status = s.meta.status
    if peak == 0.0:
        logger.warning(f"⚠️ {s.meta.key}: all-zero signal, noise scale is zero")
        status = ZERO_SCALE_STATUS

    rng = np.random.default_rng(rng_seed)
    noise = beta_n * peak * rng.standard_normal(len(s))
    return s.with_samples(s.samples + noise, provenance=Provenance.AUGMENTED, copy=copy, status=status)

def _rms(x: np.ndarray) -> float:
    return float(np.sqrt(np.mean(np.square(x))))

def snr_db(clean: TimeSeries, noisy: TimeSeries, reference: str = "rms") -> float:
    """SNR of ``noisy`` against its clean parent.

    ``reference="rms"`` uses rms(clean)/rms(noise); ``"peak"`` uses
    max|clean|/rms(noise), the ratio the augmentation is scaled by.
    """
    noise = noisy.samples - clean.samples
    noise_rms = _rms(noise)
    if noise_rms == 0:
        return float("inf")
    if reference == "rms":
        signal_level = _rms(clean.samples)
    elif reference == "peak":
        signal_level = float(np.max(np.abs(clean.samples)))
    else:
        raise ConfigurationError(f"unknown SNR reference '{reference}'")
    return 20.0 * np.log10(signal_level / noise_rms)
