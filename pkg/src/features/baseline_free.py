"""Baseline-free statistics SF1-SF13 of a monitoring signal alone."""
from typing import Tuple

import numpy as np

from src.core.types import FeatureVector, TimeSeries
from src.dsp.spectrum import dft_magnitude
from src.utils.exceptions import DataError

BASELINE_FREE_FEATURES: Tuple[str, ...] = tuple(f"SF{i}" for i in range(1, 14))

def extract_baseline_free(m: TimeSeries, printed_sf4: bool = False) -> FeatureVector:
    """SF1-SF13 of ``m``.

    SF4 is the kurtosis mean(x^4)/mean(x^2)^2; ``printed_sf4`` switches to
    mean(x^4)/mean(x^4)^2 as the source table prints it. SF11-SF13 are
    moments of the one-sided DFT magnitude.
    """
    x = m.samples
    abs_x = np.abs(x)
    peak = float(np.max(abs_x))
    if peak == 0:
        raise DataError(f"{m.meta.key}: all-zero signal, SF7-SF10 are undefined")

    m2 = float(np.mean(x**2))
    m4 = float(np.mean(x**4))
    rms = float(np.sqrt(m2))
    sqrt_mean = float(np.mean(np.sqrt(abs_x)))
    spectrum = dft_magnitude(m).magnitudes

    features: FeatureVector = {
        "SF1": float(np.mean(x**3)),
        "SF2": m4,
        "SF3": float(np.max(x) - np.min(x)),
        "SF4": (m4 / m4**2) if printed_sf4 else (m4 / m2**2),
        "SF5": rms,
        "SF6": float(np.std(x)),
        "SF7": peak / rms,
        "SF8": rms / sqrt_mean,
        "SF9": peak / sqrt_mean,
        "SF10": peak / sqrt_mean**2,
        "SF11": float(np.mean(spectrum**2)),
        "SF12": float(np.mean((spectrum - np.mean(spectrum)) ** 2)),
        "SF13": float(np.mean(spectrum)),
    }
    return features
