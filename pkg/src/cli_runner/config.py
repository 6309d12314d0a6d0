"""
Run configuration: one validated record per command invocation.

Values are resolved with the precedence flags > config file > environment
settings > command defaults > field defaults. Config files are flat
`key = value` TOML; ladder overrides use `ladder_<name>` keys.
"""

try:
    import tomllib
except ModuleNotFoundError:  # Python < 3.11
    import tomli as tomllib
from pathlib import Path
from typing import Any, Dict, List, Mapping, Optional, Tuple

from pydantic import BaseModel, ConfigDict, Field, ValidationError, field_validator, model_validator

from src.core_tools.errors import ParameterRangeError, UsageError
from src.core_tools.settings import LabSettings, get_settings
from src.gibbs_invariance.chain import ChainSettings
from src.lattice_spectral.lattice import require_dyadic
from src.wave_dynamics.config import ParameterLadder

COMMANDS = (
    "simulate",
    "regularity",
    "verify-counting",
    "verify-chaos",
    "verify-tensors",
    "norms",
    "gibbs-sample",
    "invariance",
    "dump-renorm",
)

COMMAND_DEFAULTS: Dict[str, Dict[str, Any]] = {
    "simulate": {"N": 8, "h": 1e-3, "T": 1.0},
    "regularity": {"N": 32, "beta": 0.4, "samples": 32, "h": 0.02},
    "verify-counting": {"trials": 3},
    "verify-chaos": {"samples": 100_000},
    "verify-tensors": {"beta": 0.4, "trials": 2, "samples": 200},
    "norms": {"grid_radius": 8, "T": 1.0, "h": 1.0 / 64},
    "gibbs-sample": {"N": 2, "count": 1000},
    "invariance": {"N": 2, "T": 1.0, "ensemble": 2000},
    "dump-renorm": {"N": 8},
}

LADDER_PREFIX = "ladder_"


class RunConfig(BaseModel):
    """Validated parameters of one command; only the fields a command reads matter to it."""

    model_config = ConfigDict(frozen=True, extra="forbid")

    command: str
    beta: float = Field(default=0.5, ge=0.0, lt=3.0)
    N: int = 8
    grid_radius: Optional[int] = Field(default=None, ge=1)
    h: float = 1e-2
    T: float = Field(default=1.0, ge=0.0)
    seed: int = Field(default=0, ge=0)
    samples: int = Field(default=64, ge=1)
    ensemble: int = Field(default=2000, ge=1)
    count: int = Field(default=1000, ge=1)
    burnin: int = Field(default=1000, ge=0)
    thin: int = Field(default=10, ge=1)
    step_size: float = Field(default=0.5, gt=0.0, lt=1.0)
    adapt: bool = True
    coupling: float = Field(default=1.0, ge=0.0)
    chains: int = Field(default=4, ge=1)
    trials: int = Field(default=3, ge=1)
    budget: Optional[int] = Field(default=None, gt=0)
    workers: int = Field(default=1, ge=1)
    record_every: int = Field(default=1, ge=1)
    gff_radius: int = Field(default=64, ge=1)
    padding: int = Field(default=32, ge=1)
    lemmas: Optional[List[str]] = None
    scales: Optional[List[Tuple[int, ...]]] = None
    sine_scales: Optional[List[int]] = None
    which: List[str] = Field(default_factory=lambda: ["first", "second"])
    ps: List[int] = Field(default_factory=lambda: [2, 4, 8])
    observables: Optional[List[str]] = None
    s_values: List[float] = Field(default_factory=lambda: [0.0, 0.5])
    b_values: List[float] = Field(default_factory=lambda: [0.49, 0.55])
    ladder: Dict[str, float] = Field(default_factory=dict)
    out: Optional[Path] = None

    @field_validator("command")
    @classmethod
    def _known_command(cls, value: str) -> str:
        if value not in COMMANDS:
            raise ValueError(f"unknown command {value!r}; choose one of {', '.join(COMMANDS)}")
        return value

    @field_validator("N")
    @classmethod
    def _dyadic(cls, value: int) -> int:
        return require_dyadic(value)

    @field_validator("which")
    @classmethod
    def _known_tensors(cls, value: List[str]) -> List[str]:
        unknown = [w for w in value if w not in ("first", "second")]
        if unknown:
            raise ValueError(f"unknown tensor estimates {unknown}; use 'first' and/or 'second'")
        return value

    @model_validator(mode="after")
    def _ladder(self) -> "RunConfig":
        self.parameter_ladder()
        return self

    @property
    def run_id(self) -> str:
        return f"{self.command}-s{self.seed}"

    def parameter_ladder(self) -> ParameterLadder:
        try:
            return ParameterLadder(**self.ladder)
        except (ValidationError, ParameterRangeError) as e:
            raise ValueError(f"invalid ladder override {self.ladder}: {e}") from None

    def chain_settings(self) -> ChainSettings:
        return ChainSettings(step_size=self.step_size, burnin=self.burnin, thin=self.thin, adapt=self.adapt)

    def out_dir(self, settings: Optional[LabSettings] = None) -> Path:
        settings = settings or get_settings()
        return self.out or settings.output_dir / self.run_id


def load_config_file(path: Path) -> Dict[str, Any]:
    """Flat key = value TOML; ladder_<name> keys are gathered into the ladder overrides."""
    path = Path(path)
    try:
        with path.open("rb") as f:
            raw = tomllib.load(f)
    except FileNotFoundError:
        raise UsageError(f"config file {path} does not exist") from None
    except tomllib.TOMLDecodeError as e:
        raise UsageError(f"config file {path} is not valid TOML: {e}") from None
    nested = [k for k, v in raw.items() if isinstance(v, dict)]
    if nested:
        raise UsageError(f"config file {path} must be flat key = value pairs; found tables {nested}")
    return split_ladder(raw)


def split_ladder(values: Mapping[str, Any]) -> Dict[str, Any]:
    out = {k: v for k, v in values.items() if not k.startswith(LADDER_PREFIX)}
    ladder = {k[len(LADDER_PREFIX):]: v for k, v in values.items() if k.startswith(LADDER_PREFIX)}
    if ladder:
        out["ladder"] = {**out.get("ladder", {}), **ladder}
    return out


def _from_settings(settings: LabSettings) -> Dict[str, Any]:
    return {"seed": settings.seed, "workers": settings.workers, "budget": settings.enumeration_budget}


def resolve_config(
    command: str,
    flags: Mapping[str, Any],
    config_file: Optional[Path] = None,
    settings: Optional[LabSettings] = None,
) -> RunConfig:
    """
    Merge the configuration sources of one invocation.

    Args:
        command: Subcommand name.
        flags: Explicitly given command-line values.
        config_file: Optional flat TOML file.
        settings: Environment settings; the cached process settings when omitted.

    Raises:
        UsageError: for unknown keys, bad files or values outside their ranges
    """
    settings = settings or get_settings()
    merged: Dict[str, Any] = dict(COMMAND_DEFAULTS.get(command, {}))
    merged.update(_from_settings(settings))
    if config_file is not None:
        file_values = load_config_file(config_file)
        if file_values.pop("command", command) != command:
            raise UsageError(f"config file {config_file} was written for another command")
        merged.update(file_values)
    ladder = {**merged.get("ladder", {}), **flags.get("ladder", {})}
    merged.update({k: v for k, v in flags.items() if k != "ladder"})
    if ladder:
        merged["ladder"] = ladder
    try:
        return RunConfig(command=command, **merged)
    except ValidationError as e:
        problems = "; ".join(f"{'.'.join(str(p) for p in err['loc']) or 'config'}: {err['msg']}" for err in e.errors())
        raise UsageError(f"invalid configuration for {command}: {problems}") from None
