"""Pipeline configuration: section dataclasses, JSON files and environment overrides."""
import hashlib
import json
import os
from dataclasses import asdict, dataclass, field, fields, replace
from pathlib import Path
from typing import Any, Dict, List, Mapping, Optional, Type, TypeVar

from dotenv import load_dotenv

from src.core.types import CLASS_ORDER, DamageClass, FeatureBank
from src.dsp.transform import WaveletSpec
from src.models.base import ALL_VARIANTS, Hyperparams, ModelVariant
from src.selection.correlation import SelectionConfig
from src.signalgen.augment import NoiseConfig
from src.signalgen.dataset import CouplingConfig
from src.signalgen.excitation import ExcitationConfig
from src.signalgen.propagation import BASELINE_PATH, PropagationScenario, default_scenarios
from src.utils.exceptions import ConfigurationError, DataError
from src.utils.log_config import get_logger

# Load .env for non-sensitive configuration
load_dotenv()

logger = get_logger(__name__)

T = TypeVar("T")

SCENARIO_FIELDS = tuple(f.name for f in fields(PropagationScenario) if f.name != "damage_class")

@dataclass
class ScenarioOverrides:
    """Per-class changes to the default calibration, e.g. ``{"CC": {"gain": 1.4}}``."""

    overrides: Dict[str, Dict[str, float]] = field(default_factory=dict)

    def validate(self) -> None:
        """Validate configuration."""
        for label, params in self.overrides.items():
            if label.lower() not in {c.value.lower() for c in CLASS_ORDER}:
                raise ConfigurationError(f"scenarios: unknown damage class '{label}'")
            if not isinstance(params, Mapping):
                raise ConfigurationError(f"scenarios.{label} must be an object")
            unknown = sorted(set(params) - set(SCENARIO_FIELDS))
            if unknown:
                raise ConfigurationError(f"scenarios.{label}: unknown keys {unknown}")
        for scenario in self.resolve():
            scenario.validate()

    def resolve(self) -> List[PropagationScenario]:
        """Default scenarios with overrides applied, in canonical class order."""
        scenarios = default_scenarios()
        for label, params in self.overrides.items():
            cls = DamageClass.from_label(label)
            scenarios[cls] = replace(scenarios[cls], **{k: float(v) for k, v in params.items()})
        return [scenarios[cls] for cls in CLASS_ORDER]

    def to_dict(self) -> Dict[str, Any]:
        return {DamageClass.from_label(k).value: dict(sorted(v.items())) for k, v in sorted(self.overrides.items())}

@dataclass
class DatasetConfig:
    trials_per_class: int = 20
    baseline_path: str = BASELINE_PATH
    workers: int = 1

    def validate(self) -> None:
        """Validate configuration."""
        if self.trials_per_class < 1:
            raise ConfigurationError(f"dataset.trials_per_class must be >= 1, got {self.trials_per_class}")
        if self.workers < 1:
            raise ConfigurationError(f"dataset.workers must be >= 1, got {self.workers}")
        if not self.baseline_path:
            raise ConfigurationError("dataset.baseline_path must be non-empty")

@dataclass
class FeaturesConfig:
    bank: str = FeatureBank.BASELINE_REFERENCED.value
    printed_sf4: bool = False

    def validate(self) -> None:
        """Validate configuration."""
        try:
            FeatureBank.parse(self.bank)
        except DataError as e:
            raise ConfigurationError(f"features.bank must be 'baseline' or 'baseline-free', got '{self.bank}'") from e

@dataclass
class ModelsConfig:
    variants: List[str] = field(default_factory=lambda: [v.value for v in ALL_VARIANTS])
    hyperparams: Hyperparams = field(default_factory=Hyperparams)

    def validate(self) -> None:
        """Validate configuration."""
        if not self.variants:
            raise ConfigurationError("models.variants must list at least one classifier")
        parsed = [ModelVariant.parse(v) for v in self.variants]
        if len(set(parsed)) != len(parsed):
            raise ConfigurationError(f"models.variants contains duplicates: {self.variants}")
        self.hyperparams.validate()

    def parsed_variants(self) -> List[ModelVariant]:
        return [ModelVariant.parse(v) for v in self.variants]

@dataclass
class EvaluationConfig:
    train_fraction: float = 0.75
    stratified: bool = True
    n_trials: int = 10
    importance_repeats: int = 20
    all_importance: bool = False

    def validate(self) -> None:
        """Validate configuration."""
        if not 0 < self.train_fraction < 1:
            raise ConfigurationError(f"evaluation.train_fraction must be in (0, 1), got {self.train_fraction}")
        if self.n_trials < 1:
            raise ConfigurationError(f"evaluation.n_trials must be >= 1, got {self.n_trials}")
        if self.importance_repeats < 1:
            raise ConfigurationError(f"evaluation.importance_repeats must be >= 1, got {self.importance_repeats}")

@dataclass
class SweepConfig:
    levels: int = 9
    min_size: float = 20.0
    max_size: float = 90.0
    variant: str = ModelVariant.RANDOM_FOREST.value

    def validate(self) -> None:
        """Validate configuration."""
        if self.levels < 1:
            raise ConfigurationError(f"sweep.levels must be >= 1, got {self.levels}")
        if not 0 < self.min_size <= self.max_size:
            raise ConfigurationError(
                f"sweep sizes must satisfy 0 < min_size <= max_size, got {self.min_size}, {self.max_size}"
            )
        ModelVariant.parse(self.variant)

@dataclass
class IOConfig:
    out_dir: str = "runs/default"
    plot: bool = False

    def validate(self) -> None:
        """Validate configuration."""
        if not self.out_dir:
            raise ConfigurationError("io.out_dir must be non-empty")

_SECTIONS: Dict[str, Type[Any]] = {
    "excitation": ExcitationConfig,
    "noise": NoiseConfig,
    "coupling": CouplingConfig,
    "dataset": DatasetConfig,
    "wavelet": WaveletSpec,
    "features": FeaturesConfig,
    "selection": SelectionConfig,
    "evaluation": EvaluationConfig,
    "sweep": SweepConfig,
    "io": IOConfig,
}
# noise.seed is always master_seed
_EXCLUDED = {"noise": {"seed"}}

def _section_from_dict(name: str, cls: Type[T], data: Mapping[str, Any]) -> T:
    if not isinstance(data, Mapping):
        raise ConfigurationError(f"section '{name}' must be an object")
    allowed = {f.name for f in fields(cls)} - _EXCLUDED.get(name, set())
    unknown = sorted(set(data) - allowed)
    if unknown:
        raise ConfigurationError(f"unknown key(s) {unknown} in section '{name}'")
    try:
        return cls(**data)
    except (TypeError, ValueError) as e:
        raise ConfigurationError(f"section '{name}': {e}") from e

def _section_to_dict(name: str, section: Any) -> Dict[str, Any]:
    data = asdict(section)
    for key in _EXCLUDED.get(name, set()):
        data.pop(key, None)
    return data

@dataclass
class PipelineConfig:
    """Complete run configuration; every section validates itself."""

    excitation: ExcitationConfig = field(default_factory=ExcitationConfig)
    scenarios: ScenarioOverrides = field(default_factory=ScenarioOverrides)
    noise: NoiseConfig = field(default_factory=NoiseConfig)
    coupling: CouplingConfig = field(default_factory=CouplingConfig)
    dataset: DatasetConfig = field(default_factory=DatasetConfig)
    wavelet: WaveletSpec = field(default_factory=WaveletSpec)
    features: FeaturesConfig = field(default_factory=FeaturesConfig)
    selection: SelectionConfig = field(default_factory=SelectionConfig)
    models: ModelsConfig = field(default_factory=ModelsConfig)
    evaluation: EvaluationConfig = field(default_factory=EvaluationConfig)
    sweep: SweepConfig = field(default_factory=SweepConfig)
    io: IOConfig = field(default_factory=IOConfig)
    master_seed: int = 2024

    @classmethod
    def create(
        cls,
        config_path: Optional[Path] = None,
        seed: Optional[int] = None,
        out_dir: Optional[str] = None,
        bank: Optional[str] = None,
    ) -> "PipelineConfig":
        """Defaults, then the JSON file, then environment, then explicit arguments."""
        if config_path is not None:
            config = cls.load(config_path)
        else:
            config = cls()

        if os.getenv("GW_MASTER_SEED"):
            try:
                config.master_seed = int(os.environ["GW_MASTER_SEED"])
            except ValueError as e:
                raise ConfigurationError(
                    f"GW_MASTER_SEED must be an integer, got '{os.environ['GW_MASTER_SEED']}'"
                ) from e
        config.io.out_dir = os.getenv("GW_OUT_DIR", config.io.out_dir)

        if seed is not None:
            config.master_seed = seed
        if out_dir is not None:
            config.io.out_dir = out_dir
        if bank is not None:
            config.features.bank = bank

        config.validate()
        return config

    @classmethod
    def load(cls, path: Path) -> "PipelineConfig":
        try:
            data = json.loads(Path(path).read_text(encoding="utf-8"))
        except FileNotFoundError as e:
            raise ConfigurationError(f"config file not found: {path}") from e
        except json.JSONDecodeError as e:
            raise ConfigurationError(f"config file {path} is not valid JSON: {e}") from e
        return cls.from_dict(data)

    @classmethod
    def from_dict(cls, data: Mapping[str, Any]) -> "PipelineConfig":
        if not isinstance(data, Mapping):
            raise ConfigurationError("configuration must be a JSON object")
        known = set(_SECTIONS) | {"scenarios", "models", "master_seed"}
        unknown = sorted(set(data) - known)
        if unknown:
            raise ConfigurationError(f"unknown configuration key(s): {unknown}")

        kwargs: Dict[str, Any] = {
            name: _section_from_dict(name, section_cls, data[name])
            for name, section_cls in _SECTIONS.items()
            if name in data
        }
        if "scenarios" in data:
            if not isinstance(data["scenarios"], Mapping):
                raise ConfigurationError("section 'scenarios' must be an object")
            for label, params in data["scenarios"].items():
                if not isinstance(params, Mapping):
                    raise ConfigurationError(f"scenarios.{label} must be an object, got {params!r}")
            kwargs["scenarios"] = ScenarioOverrides(overrides={k: dict(v) for k, v in data["scenarios"].items()})
        if "models" in data:
            if not isinstance(data["models"], Mapping):
                raise ConfigurationError("section 'models' must be an object")
            models = dict(data["models"])
            unknown = sorted(set(models) - {"variants", "hyperparams"})
            if unknown:
                raise ConfigurationError(f"unknown key(s) {unknown} in section 'models'")
            hyper = _section_from_dict("models.hyperparams", Hyperparams, models.get("hyperparams", {}))
            variants = list(models.get("variants", ModelsConfig().variants))
            kwargs["models"] = ModelsConfig(variants=variants, hyperparams=hyper)
        if "master_seed" in data:
            try:
                kwargs["master_seed"] = int(data["master_seed"])
            except (TypeError, ValueError) as e:
                raise ConfigurationError(f"master_seed must be an integer, got {data['master_seed']!r}") from e
        config = cls(**kwargs)
        config.noise.seed = config.master_seed
        return config

    def to_dict(self) -> Dict[str, Any]:
        data: Dict[str, Any] = {name: _section_to_dict(name, getattr(self, name)) for name in _SECTIONS}
        data["scenarios"] = self.scenarios.to_dict()
        data["models"] = {"variants": list(self.models.variants), "hyperparams": self.models.hyperparams.to_dict()}
        data["master_seed"] = self.master_seed
        return data

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True) + "\n"

    def config_hash(self) -> str:
        canonical = json.dumps(self.to_dict(), sort_keys=True, separators=(",", ":"))
        return hashlib.sha256(canonical.encode("utf-8")).hexdigest()

    def validate(self) -> None:
        """Validate configuration."""
        if int(self.master_seed) != self.master_seed or not 0 <= self.master_seed < 2**63:
            raise ConfigurationError(f"master_seed must be a non-negative 63-bit integer, got {self.master_seed}")
        self.noise.seed = self.master_seed
        for name in (*_SECTIONS, "scenarios", "models"):
            try:
                getattr(self, name).validate()
            except (TypeError, ValueError) as e:
                raise ConfigurationError(f"section '{name}' holds a value of the wrong type: {e}") from e
        logger.debug(f"Configuration valid (hash {self.config_hash()[:12]})")

    @property
    def bank(self) -> FeatureBank:
        return FeatureBank.parse(self.features.bank)

    @property
    def out_dir(self) -> Path:
        return Path(self.io.out_dir)
