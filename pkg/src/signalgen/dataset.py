"""Dataset assembly: trials per class, shared trial coupling, drifting noisy copies."""
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, replace
from typing import Iterable, List, Optional, Sequence, Tuple

import numpy as np

from src.core import rng as streams
from src.core.types import CLASS_ORDER, DamageClass, TimeSeries
from src.signalgen.augment import NoiseConfig, add_noise
from src.signalgen.excitation import ExcitationConfig, hann_toneburst
from src.signalgen.propagation import PropagationScenario, TrialCoupling, synth_response
from src.utils.exceptions import ConfigurationError, DataError
from src.utils.log_config import get_logger

logger = get_logger(__name__)

@dataclass
class CouplingConfig:
    """Transducer coupling shared across paths: per trial, plus a gain drift per acquisition."""

    gain_std: float = 0.15
    delay_std: float = 2e-7
    drift_std: float = 0.1

    def validate(self) -> None:
        """Validate configuration."""
        if self.gain_std < 0 or self.delay_std < 0 or self.drift_std < 0:
            raise ConfigurationError("coupling standard deviations must be >= 0")
        if self.gain_std >= 0.5:
            raise ConfigurationError(f"coupling.gain_std must be < 0.5, got {self.gain_std}")
        if self.drift_std >= 0.5:
            raise ConfigurationError(f"coupling.drift_std must be < 0.5, got {self.drift_std}")

def trial_coupling(master_seed: int, trial: int, cfg: Optional[CouplingConfig]) -> Optional[TrialCoupling]:
    """Coupling draw for ``trial``; identical for every class of that trial."""
    if cfg is None or (cfg.gain_std == 0 and cfg.delay_std == 0):
        return None
    draws = streams.child_rng(master_seed, streams.COUPLING, trial).standard_normal(2)
    gain = float(np.clip(1.0 + cfg.gain_std * draws[0], 0.05, None))
    return TrialCoupling(gain=gain, delay_offset=float(cfg.delay_std * draws[1]))

def acquisition_drift(master_seed: int, trial: int, copy: int, cfg: Optional[CouplingConfig]) -> float:
    """Gain factor of acquisition ``(trial, copy)``; identical for every class recorded in it."""
    if cfg is None or cfg.drift_std == 0:
        return 1.0
    draw = streams.child_rng(master_seed, streams.DRIFT, trial, copy).standard_normal()
    return float(np.clip(1.0 + cfg.drift_std * draw, 0.05, None))

def _check_scenarios(scenarios: Sequence[PropagationScenario], require_all_classes: bool = True) -> None:
    if not scenarios:
        raise DataError("at least one propagation scenario is required")
    seen: set[DamageClass] = set()
    for scenario in scenarios:
        scenario.validate()
        if scenario.damage_class in seen:
            raise DataError(f"duplicate (class, trial) keys: class {scenario.damage_class.value} given twice")
        seen.add(scenario.damage_class)
    missing = [c.value for c in CLASS_ORDER if c not in seen]
    if require_all_classes and missing:
        raise DataError(f"no scenario for classes {missing}")

def _trial_series(
    excitation: TimeSeries,
    scenario: PropagationScenario,
    trial: int,
    noise: NoiseConfig,
    coupling: Optional[CouplingConfig],
) -> List[TimeSeries]:
    master = int(noise.seed)
    cls = scenario.damage_class.index
    parent = synth_response(
        excitation,
        scenario,
        rng_seed=streams.child_seed(master, streams.TRIAL, cls, trial),
        trial=trial,
        coupling=trial_coupling(master, trial, coupling),
    )
    copies = []
    for k in range(int(noise.copies)):
        drifted = parent.with_samples(parent.samples * acquisition_drift(master, trial, k, coupling))
        seed = streams.child_seed(master, streams.NOISE, cls, trial, k)
        copies.append(add_noise(drifted, noise.beta_n, seed, copy=k))
    return copies

def build_dataset(
    scenarios: Sequence[PropagationScenario],
    trials_per_class: int,
    noise: NoiseConfig,
    excitation: Optional[ExcitationConfig] = None,
    coupling: Optional[CouplingConfig] = None,
    workers: int = 1,
) -> List[TimeSeries]:
    """Synthesize ``trials_per_class * noise.copies`` series per class.

    Output order is canonical class order, then trial, then copy, whatever
    the number of workers.
    """
    if trials_per_class < 1:
        raise ConfigurationError(f"trials_per_class must be >= 1, got {trials_per_class}")
    noise.validate()
    if coupling is not None:
        coupling.validate()
    _check_scenarios(scenarios)
    burst = hann_toneburst(excitation or ExcitationConfig())

    ordered = sorted(scenarios, key=lambda s: s.damage_class.index)
    jobs: List[Tuple[PropagationScenario, int]] = [(s, t) for s in ordered for t in range(trials_per_class)]

    def run(job: Tuple[PropagationScenario, int]) -> List[TimeSeries]:
        scenario, trial = job
        return _trial_series(burst, scenario, trial, noise, coupling)

    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            chunks = list(pool.map(run, jobs))
    else:
        chunks = [run(job) for job in jobs]

    dataset = [series for chunk in chunks for series in chunk]
    logger.info(
        f"✅ Synthesized {len(dataset)} series "
        f"({len(ordered)} classes x {trials_per_class} trials x {noise.copies} copies)"
    )
    return dataset

def severity_levels(levels: int, min_size: float = 20.0, max_size: float = 90.0) -> np.ndarray:
    """Relative severities for ``levels`` damage sizes spread over [min_size, max_size]."""
    if levels < 1:
        raise ConfigurationError(f"sweep levels must be >= 1, got {levels}")
    sizes = np.linspace(min_size, max_size, levels)
    return sizes / max_size

def build_severity_sweep(
    scenarios: Sequence[PropagationScenario],
    levels: int,
    noise: NoiseConfig,
    excitation: Optional[ExcitationConfig] = None,
    min_size: float = 20.0,
    max_size: float = 90.0,
) -> List[TimeSeries]:
    """One series per (class, severity level) plus noisy copies.

    The level index is used as the trial index, so each baseline level
    pairs with the damaged records of the same level.
    """
    noise.validate()
    _check_scenarios(scenarios)
    burst = hann_toneburst(excitation or ExcitationConfig())
    severities = severity_levels(levels, min_size, max_size)
    master = streams.child_seed(int(noise.seed), streams.SWEEP)
    sweep_noise = NoiseConfig(beta_n=noise.beta_n, copies=noise.copies, seed=master)

    dataset: List[TimeSeries] = []
    for scenario in sorted(scenarios, key=lambda s: s.damage_class.index):
        for level, severity in enumerate(severities):
            # primary propagation state at every level
            scaled = replace(scenario.scaled(float(severity)), alt_gain=0.0)
            dataset.extend(_trial_series(burst, scaled, level, sweep_noise, None))
    logger.info(f"✅ Severity sweep: {len(dataset)} series over {levels} levels")
    return dataset

def count_by_class(dataset: Iterable[TimeSeries]) -> dict[str, int]:
    counts = {c.value: 0 for c in CLASS_ORDER}
    for series in dataset:
        counts[series.meta.label.value] += 1
    return counts
