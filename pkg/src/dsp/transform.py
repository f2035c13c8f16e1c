"""Multi-level discrete wavelet decomposition, band reconstruction and denoising."""
import math
import warnings
from dataclasses import dataclass
from typing import Iterable, List, Tuple

import numpy as np
import pywt

from src.core.types import DamageClass, SeriesMeta, TimeSeries
from src.dsp.spectrum import remove_offset
from src.dsp.wavelets import MAX_ORDER, daubechies_wavelet
from src.utils.exceptions import ConfigurationError, WaveletError
from src.utils.log_config import get_logger

logger = get_logger(__name__)

BOUNDARY_MODES = ("symmetric", "periodization")

@dataclass
class WaveletSpec:
    """Daubechies decomposition settings."""

    order: int = 40
    levels: int = 7
    selected_level: int = 6
    mode: str = "symmetric"

    def validate(self) -> None:
        """Validate configuration."""
        if int(self.order) != self.order or not 1 <= self.order <= MAX_ORDER:
            raise ConfigurationError(f"wavelet.order must be in 1..{MAX_ORDER}, got {self.order}")
        if int(self.levels) != self.levels or self.levels < 1:
            raise ConfigurationError(f"wavelet.levels must be >= 1, got {self.levels}")
        if not 1 <= self.selected_level <= self.levels:
            raise ConfigurationError(
                f"wavelet.selected_level must be in 1..{self.levels}, got {self.selected_level}"
            )
        if self.mode not in BOUNDARY_MODES:
            raise ConfigurationError(f"wavelet.mode must be one of {BOUNDARY_MODES}, got '{self.mode}'")

    @property
    def filter_length(self) -> int:
        return 2 * int(self.order)

@dataclass(frozen=True)
class DwtCoefficients:
    """Detail bands (index 0 = level 1, finest) plus the coarsest approximation."""
    details: Tuple[np.ndarray, ...]
    approximation: np.ndarray
    original_length: int
    spec: WaveletSpec
    dt: float = 1.0

    @property
    def band_ids(self) -> List[str]:
        return [f"d{j}" for j in range(1, len(self.details) + 1)] + [f"a{len(self.details)}"]

    def band(self, band_id: str) -> np.ndarray:
        if band_id == f"a{len(self.details)}" or band_id == "a":
            return self.approximation
        if band_id.startswith("d") and band_id[1:].isdigit():
            level = int(band_id[1:])
            if 1 <= level <= len(self.details):
                return self.details[level - 1]
        raise WaveletError(f"unknown band id '{band_id}'; known bands: {self.band_ids}")

    def energies(self) -> dict[str, float]:
        return {band_id: float(np.sum(self.band(band_id) ** 2)) for band_id in self.band_ids}

def max_feasible_depth(length: int) -> int:
    return int(math.floor(math.log2(length))) if length >= 1 else 0

def band_edges(fs: float, level: int) -> Tuple[float, float]:
    """Nominal frequency band (Hz) covered by the detail coefficients of ``level``."""
    return fs / 2 ** (level + 1), fs / 2**level

def dwt_decompose(s: TimeSeries, spec: WaveletSpec) -> DwtCoefficients:
    """Cascade of filter-and-decimate steps."""
    spec.validate()
    n = len(s)
    if n < spec.filter_length:
        raise WaveletError(
            f"signal of {n} samples is shorter than the db{spec.order} filter ({spec.filter_length} taps)"
        )
    if 2**spec.levels > n:
        raise WaveletError(
            f"{spec.levels}-level decomposition infeasible for {n} samples; "
            f"maximum feasible depth is {max_feasible_depth(n)}"
        )

    wavelet = daubechies_wavelet(int(spec.order))
    with warnings.catch_warnings():
        # PyWavelets warns once levels exceed its boundary-free depth; the cascade stays exact.
        warnings.simplefilter("ignore", UserWarning)
        coeffs = pywt.wavedec(np.array(s.samples), wavelet, mode=spec.mode, level=int(spec.levels))

    approximation, details_coarse_first = coeffs[0], coeffs[1:]
    details = tuple(np.asarray(d) for d in reversed(details_coarse_first))
    return DwtCoefficients(
        details=details,
        approximation=np.asarray(approximation),
        original_length=n,
        spec=spec,
        dt=s.dt,
    )

def dwt_reconstruct(c: DwtCoefficients, keep: Iterable[str], template: TimeSeries | None = None) -> TimeSeries:
    """Inverse cascade with every band outside ``keep`` zeroed."""
    keep = set(keep)
    if not keep:
        raise WaveletError("keep must name at least one band")
    known = set(c.band_ids) | {"a"}
    unknown = sorted(keep - known)
    if unknown:
        raise WaveletError(f"unknown band ids {unknown}; known bands: {c.band_ids}")

    approx_id = f"a{len(c.details)}"
    approximation = c.approximation if (approx_id in keep or "a" in keep) else np.zeros_like(c.approximation)
    details = [
        d if f"d{j}" in keep else np.zeros_like(d) for j, d in enumerate(c.details, start=1)
    ]
    coeffs = [approximation] + list(reversed(details))
    wavelet = daubechies_wavelet(int(c.spec.order))
    samples = pywt.waverec(coeffs, wavelet, mode=c.spec.mode)[: c.original_length]

    if template is not None:
        return template.with_samples(samples)
    return TimeSeries(samples=samples, dt=c.dt, meta=SeriesMeta(label=DamageClass.BASELINE, path_id="reconstruction"))

def wavelet_denoise(s: TimeSeries, spec: WaveletSpec) -> TimeSeries:
    """Offset removal, then keep only the selected detail band."""
    centred = remove_offset(s)
    coeffs = dwt_decompose(centred, spec)
    return dwt_reconstruct(coeffs, {f"d{spec.selected_level}"}, template=s)
