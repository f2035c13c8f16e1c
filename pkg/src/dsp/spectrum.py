"""Offset removal and one-sided DFT magnitude spectra."""
from dataclasses import dataclass

import numpy as np
from scipy import fft

from src.core.types import TimeSeries

@dataclass(frozen=True)
class Spectrum:
    """One-sided |DFT|; bin k sits at k*df Hz."""
    magnitudes: np.ndarray
    df: float
    n_samples: int

    @property
    def n_bins(self) -> int:
        return int(self.magnitudes.size)

    @property
    def frequencies(self) -> np.ndarray:
        return np.arange(self.n_bins) * self.df

    def energy(self, dt: float) -> float:
        """Two-sided Parseval energy sum|x|^2*dt reconstructed from the one-sided bins.

        Bin 0 (and the Nyquist bin for even N) appear once in the two-sided
        spectrum, every other bin twice.
        """
        weights = np.full(self.n_bins, 2.0)
        weights[0] = 1.0
        if self.n_samples % 2 == 0:
            weights[-1] = 1.0
        return float(np.sum(weights * self.magnitudes**2) * dt / self.n_samples)

def remove_offset(s: TimeSeries) -> TimeSeries:
    """Subtract the sample mean."""
    return s.with_samples(s.samples - np.mean(s.samples))

def dft_magnitude(s: TimeSeries) -> Spectrum:
    """Unwindowed one-sided DFT magnitude, floor(N/2)+1 bins."""
    n = len(s)
    magnitudes = np.abs(fft.rfft(s.samples))
    return Spectrum(magnitudes=magnitudes, df=1.0 / (n * s.dt), n_samples=n)
