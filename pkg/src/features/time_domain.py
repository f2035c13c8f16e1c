"""Baseline-referenced and statistical features of a monitoring signal.

Integrals are Riemann sums over samples (sum * dt); in every ratio the dt
factors cancel. MAD, SIGMA and VAR use the discrete 1/T averages with T
the sample count.
"""
from typing import Tuple

import numpy as np

from src.core.types import FeatureVector, TimeSeries
from src.dsp.spectrum import dft_magnitude
from src.utils.exceptions import DataError

TIME_FEATURES: Tuple[str, ...] = ("CCD", "MAD", "NSED", "PPAD", "RMS", "RMSD", "SDD", "SER", "SIGMA", "VAR")

def _integral(values: np.ndarray, step: float) -> float:
    return float(np.sum(values) * step)

def peak_to_peak(x: np.ndarray) -> float:
    return float(np.max(x) - np.min(x))

def spectral_difference_deviation(m: TimeSeries, b: TimeSeries) -> float:
    """SDD: {int |F_b - F| df}^2 over int F_b^2 df * int F^2 df, square-rooted."""
    spec_m, spec_b = dft_magnitude(m), dft_magnitude(b)
    df = spec_m.df
    numerator = _integral(np.abs(spec_b.magnitudes - spec_m.magnitudes), df) ** 2
    denominator = _integral(spec_b.magnitudes**2, df) * _integral(spec_m.magnitudes**2, df)
    if denominator == 0:
        raise DataError("SDD undefined: zero spectral energy")
    return float(np.sqrt(numerator / denominator))

def extract_time_features(m: TimeSeries, b: TimeSeries) -> FeatureVector:
    """The ten time-domain features of ``m`` against baseline ``b``."""
    if len(m) != len(b) or not np.isclose(m.dt, b.dt, rtol=1e-9, atol=0):
        raise DataError(
            f"monitoring ({len(m)} samples, dt={m.dt:g}) and baseline ({len(b)} samples, dt={b.dt:g}) differ"
        )
    f, fb, dt = m.samples, b.samples, m.dt

    e_b = _integral(fb**2, dt)
    e_m = _integral(f**2, dt)
    if e_b == 0:
        raise DataError(f"baseline {b.meta.key} has zero energy; NSED/SER/RMSD/CCD are undefined")
    if e_m == 0:
        raise DataError(f"monitoring signal {m.meta.key} has zero energy; CCD is undefined")

    cross = _integral(fb * f, dt)
    correlation = min(cross**2 / (e_b * e_m), 1.0)
    centred = f - np.mean(f)
    var = float(np.mean(centred**2))

    features: FeatureVector = {
        "CCD": 1.0 - float(np.sqrt(correlation)),
        "MAD": float(np.mean(np.abs(centred))),
        "NSED": (e_m - e_b) / e_b,
        "PPAD": peak_to_peak(f) - peak_to_peak(fb),
        "RMS": float(np.sqrt(e_m / (len(f) * dt))),
        "RMSD": float(np.sqrt(_integral((f - fb) ** 2, dt) / e_b)),
        "SDD": spectral_difference_deviation(m, b),
        "SER": e_m / e_b,
        "SIGMA": float(np.sqrt(var)),
        "VAR": var,
    }
    return features
