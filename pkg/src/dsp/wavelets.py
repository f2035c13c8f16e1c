"""Daubechies filter design by spectral factorization.

The squared magnitude response of the order-N scaling filter is
cos^(2N)(w/2) * P(sin^2(w/2)) with P(y) = sum_k C(N-1+k, k) y^k.
The roots of P are mapped to z-plane zero pairs and the ones inside the
unit circle are kept (minimum phase, the usual "dbN" convention). Roots
are found in 200-digit arithmetic; double precision loses the high orders.
"""
from functools import lru_cache
from typing import Tuple

import mpmath
import numpy as np
import pywt

from src.utils.exceptions import WaveletError
from src.utils.log_config import get_logger

logger = get_logger(__name__)

MAX_ORDER = 45
_DIGITS = 200

@lru_cache(maxsize=None)
def _scaling_filter(order: int) -> Tuple[float, ...]:
    with mpmath.workdps(_DIGITS):
        # P(y) coefficients, highest degree first for polyroots.
        coeffs = [mpmath.binomial(order - 1 + k, k) for k in range(order)][::-1]
        y_roots = mpmath.polyroots(coeffs, maxsteps=2000, extraprec=2 * _DIGITS) if order > 1 else []

        poly = [mpmath.mpc(1)]  # ascending powers of z^-1
        for _ in range(order):
            poly = _multiply(poly, [mpmath.mpc(1), mpmath.mpc(1)])
        for y in y_roots:
            b = 2 - 4 * y
            disc = mpmath.sqrt(b * b - 4)
            z1, z2 = (b + disc) / 2, (b - disc) / 2
            r = z1 if abs(z1) < abs(z2) else z2
            poly = _multiply(poly, [mpmath.mpc(1), -r])

        real = [mpmath.re(c) for c in poly]
        scale = mpmath.sqrt(2) / mpmath.fsum(real)
        return tuple(float(c * scale) for c in real)

def _multiply(a: list, b: list) -> list:
    out = [mpmath.mpc(0)] * (len(a) + len(b) - 1)
    for i, ai in enumerate(a):
        for j, bj in enumerate(b):
            out[i + j] += ai * bj
    return out

def daubechies_filters(order: int) -> Tuple[np.ndarray, np.ndarray]:
    """Orthonormal (lowpass, highpass) reconstruction pair with 2*order taps.

    The highpass is the alternating-sign reversal g[n] = (-1)^n h[L-1-n].
    """
    if int(order) != order or not 1 <= order <= MAX_ORDER:
        raise WaveletError(f"unsupported Daubechies order {order}; expected 1..{MAX_ORDER}")
    lowpass = np.array(_scaling_filter(int(order)))
    signs = np.where(np.arange(lowpass.size) % 2 == 0, 1.0, -1.0)
    highpass = signs * lowpass[::-1]
    lowpass.setflags(write=False)
    highpass.setflags(write=False)
    return lowpass, highpass

@lru_cache(maxsize=None)
def daubechies_wavelet(order: int) -> pywt.Wavelet:
    """PyWavelets wavelet object built from our own filter bank."""
    lowpass, highpass = daubechies_filters(order)
    bank = (lowpass[::-1].tolist(), highpass[::-1].tolist(), lowpass.tolist(), highpass.tolist())
    logger.debug(f"Built db{order} filter bank with {lowpass.size} taps")
    return pywt.Wavelet(f"gw-db{order}", filter_bank=bank)
