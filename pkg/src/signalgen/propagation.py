"""Parametric surrogate for received guided-wave signals.

A damage class has a gain, an arrival delay, a pulse-width stretch, one
scattered echo and a carrier phase lag. A class may also carry a second
propagation state (its own gain and lag) that odd-numbered trials use.

CC and LFA raise the received amplitude, HDC and TRF lower it. The two
classes of a pair share their state gains and lag the carrier by mirrored
angles psi and pi - psi. A mirrored lag time-reverses the received burst about
its centre, so statistics of the received record alone cannot separate the
pair; its difference from the baseline of the same acquisition can.
"""
from dataclasses import dataclass, asdict
from typing import Dict, Optional, Tuple

import numpy as np
from scipy.interpolate import CubicSpline
from scipy.signal import hilbert

from src.core.types import DamageClass, Provenance, SeriesMeta, TimeSeries
from src.utils.exceptions import ConfigurationError, TruncationError
from src.utils.log_config import get_logger

logger = get_logger(__name__)

BASELINE_PATH = "P3-3*"
DAMAGE_PATH = "P2-2*"

@dataclass
class PropagationScenario:
    """Surrogate propagation parameters for one damage class."""

    damage_class: DamageClass
    gain: float = 1.0
    delay: float = 4e-5
    broadening: float = 1.0
    echo_gain: float = 0.0
    echo_delay: float = 5e-5
    phase: float = 0.0             # carrier lag, radians
    alt_gain: float = 0.0          # second state for odd trials; 0 disables it
    alt_phase: float = 0.0
    gain_jitter: float = 0.03      # per-trial relative std
    delay_jitter: float = 0.01
    phase_jitter: float = 0.0      # per-trial absolute std, radians

    def validate(self) -> None:
        """Validate configuration."""
        name = self.damage_class.value
        if not self.gain > 0:
            raise ConfigurationError(f"scenario {name}: gain must be > 0, got {self.gain}")
        if not self.delay >= 0:
            raise ConfigurationError(f"scenario {name}: delay must be >= 0, got {self.delay}")
        if not self.broadening >= 1:
            raise ConfigurationError(f"scenario {name}: broadening must be >= 1, got {self.broadening}")
        if not 0 <= self.echo_gain < 1:
            raise ConfigurationError(f"scenario {name}: echo_gain must be in [0, 1), got {self.echo_gain}")
        if not self.echo_delay >= 0:
            raise ConfigurationError(f"scenario {name}: echo_delay must be >= 0, got {self.echo_delay}")
        if not (np.isfinite(self.phase) and np.isfinite(self.alt_phase)):
            raise ConfigurationError(f"scenario {name}: phase and alt_phase must be finite")
        if not self.alt_gain >= 0:
            raise ConfigurationError(f"scenario {name}: alt_gain must be >= 0, got {self.alt_gain}")
        if self.gain_jitter < 0 or self.delay_jitter < 0 or self.phase_jitter < 0:
            raise ConfigurationError(f"scenario {name}: jitter must be >= 0")

    @property
    def path_id(self) -> str:
        return BASELINE_PATH if self.damage_class is DamageClass.BASELINE else DAMAGE_PATH

    def state(self, trial: int) -> Tuple[float, float]:
        """(gain, phase) of the propagation state used by ``trial``."""
        if self.alt_gain > 0 and trial % 2 == 1:
            return self.alt_gain, self.alt_phase
        return self.gain, self.phase

    def to_dict(self) -> Dict[str, object]:
        data = asdict(self)
        data["damage_class"] = self.damage_class.value
        return data

    def scaled(self, severity: float) -> "PropagationScenario":
        """Scenario with gain deviation, phase lag, broadening excess and echo scaled by ``severity``."""
        return PropagationScenario(
            damage_class=self.damage_class,
            gain=1.0 + (self.gain - 1.0) * severity,
            delay=self.delay,
            broadening=1.0 + (self.broadening - 1.0) * severity,
            echo_gain=self.echo_gain * severity,
            echo_delay=self.echo_delay,
            phase=self.phase * severity,
            alt_gain=1.0 + (self.alt_gain - 1.0) * severity if self.alt_gain > 0 else 0.0,
            alt_phase=self.alt_phase * severity,
            gain_jitter=self.gain_jitter,
            delay_jitter=self.delay_jitter,
            phase_jitter=self.phase_jitter,
        )

@dataclass(frozen=True)
class TrialCoupling:
    """Transducer coupling shared by every path recorded in one trial."""
    gain: float = 1.0
    delay_offset: float = 0.0

_JITTER = dict(gain_jitter=0.02, delay_jitter=0.0005, phase_jitter=0.03)

def _mirrored_pair(gains: Tuple[float, float], overlap: float) -> Tuple[Dict[str, float], ...]:
    """Two classes sharing state gains, with carrier lags psi and pi - psi swapped between states.

    ``overlap`` is cos(psi), the correlation of a lagged burst with the unlagged one.
    """
    lead, trail = float(np.arccos(overlap)), float(np.arccos(-overlap))
    common = dict(broadening=1.0, echo_gain=0.0, echo_delay=5e-5, **_JITTER)
    first = dict(common, gain=gains[0], phase=lead, alt_gain=gains[1], alt_phase=trail)
    second = dict(common, gain=gains[0], phase=trail, alt_gain=gains[1], alt_phase=lead)
    return first, second

_CC, _LFA = _mirrored_pair((1.3, 1.6), overlap=0.6)
_HDC, _TRF = _mirrored_pair((0.4, 0.8), overlap=0.3)

DEFAULT_CALIBRATION: Dict[DamageClass, Dict[str, float]] = {
    DamageClass.BASELINE: dict(gain=1.0, gain_jitter=0.02, delay_jitter=0.0005),
    DamageClass.CC: _CC,
    DamageClass.LFA: _LFA,
    DamageClass.HDC: _HDC,
    DamageClass.TRF: _TRF,
}

def default_scenarios() -> Dict[DamageClass, PropagationScenario]:
    """Calibrated scenarios, one per class, in canonical order."""
    return {cls: PropagationScenario(damage_class=cls, **params) for cls, params in DEFAULT_CALIBRATION.items()}

def delayed_pulse(excitation: TimeSeries, delay: float, stretch: float = 1.0) -> np.ndarray:
    """Excitation shifted by ``delay`` seconds and time-stretched by ``stretch``.

    Values between samples come from a cubic spline of the excitation; the
    pulse is zero before its arrival and after the end of the source record.
    """
    src_t = excitation.times
    spline = CubicSpline(src_t, excitation.samples, extrapolate=False)
    tau = (excitation.times - delay) / stretch
    out = spline(tau)
    return np.nan_to_num(out, nan=0.0)

def phase_lagged(pulse: np.ndarray, phase: float) -> np.ndarray:
    """``pulse`` with its carrier retarded by ``phase`` radians; the envelope is kept.

    Rotates the analytic signal: cos(phase) * x + sin(phase) * H[x].
    """
    if phase == 0.0:
        return pulse
    return np.real(hilbert(pulse) * np.exp(-1j * phase))

def _support_end(excitation: TimeSeries) -> float:
    """Time of the last non-zero excitation sample."""
    nz = np.flatnonzero(excitation.samples)
    return float((nz[-1] + 1) * excitation.dt) if nz.size else 0.0

def synth_response(
    excitation: TimeSeries,
    scenario: PropagationScenario,
    rng_seed: int,
    trial: int = 0,
    coupling: Optional[TrialCoupling] = None,
) -> TimeSeries:
    """Surrogate received signal for one (class, trial)."""
    scenario.validate()
    rng = np.random.default_rng(rng_seed)
    draws = rng.standard_normal(3)
    gain, phase = scenario.state(trial)
    gain *= 1.0 + scenario.gain_jitter * draws[0]
    delay = scenario.delay * (1.0 + scenario.delay_jitter * draws[1])
    phase += scenario.phase_jitter * draws[2]
    if coupling is not None:
        gain *= coupling.gain
        delay += coupling.delay_offset
    gain = max(gain, np.finfo(float).tiny)
    delay = max(delay, 0.0)

    record = len(excitation) * excitation.dt
    burst = _support_end(excitation)
    direct_end = delay + scenario.broadening * burst
    echo_end = delay + scenario.echo_delay + burst if scenario.echo_gain > 0 else 0.0
    if max(direct_end, echo_end) > record + 1e-15:
        raise TruncationError(
            f"scenario {scenario.damage_class.value} trial {trial}: arrival ends at "
            f"{max(direct_end, echo_end):.3e} s, beyond the {record:.3e} s record"
        )

    samples = gain * phase_lagged(delayed_pulse(excitation, delay, scenario.broadening), phase)
    if scenario.echo_gain > 0:
        samples = samples + scenario.echo_gain * gain * delayed_pulse(excitation, delay + scenario.echo_delay)

    return TimeSeries(
        samples=samples,
        dt=excitation.dt,
        meta=SeriesMeta(
            label=scenario.damage_class,
            path_id=scenario.path_id,
            trial=trial,
            copy=0,
            provenance=Provenance.SYNTHETIC,
        ),
    )
