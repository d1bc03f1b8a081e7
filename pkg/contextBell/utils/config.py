"""
Configuration records and the JSON config loader.

This module provides:
- `Tolerances`, the single record of numerical tolerances used by every
  module, with a context-local override (`use_tolerances`)
- parameter records for the optimizers, the sampler, output and the
  reproduce report
- `load_config`, which reads a JSON document and validates it

The environment variable named by CONFIG_ENV_VAR points at a default
config file when no path is passed explicitly.
"""

import contextvars
import json
import os
from contextlib import contextmanager
from dataclasses import dataclass, field, fields, replace
from pathlib import Path
from typing import Optional

from contextBell.utils.errors import ConfigError
from contextBell.utils.logger_config import logger

CONFIG_ENV_VAR = "CONTEXTBELL_CONFIG"

OUTPUT_FORMATS = ("csv", "json")


@dataclass(frozen=True)
class Tolerances:
    """Numerical tolerances shared by all modules."""

    norm: float = 1e-12
    input_norm: float = 1e-9
    zero_norm: float = 1e-300
    hermitian: float = 1e-12
    imag_residue: float = 1e-10
    projector: float = 1e-10
    reconstruction: float = 1e-9
    degeneracy: float = 1e-9
    concurrence_clamp: float = 1e-12
    unit: float = 1e-12
    orthogonality: float = 1e-12
    commuting: float = 1e-9
    spectrum: float = 1e-9
    tsirelson: float = 1e-9
    boundary: float = 1e-12
    symmetric: float = 1e-9
    amplitude: float = 1e-12
    collapse: float = 1e-9


DEFAULT_TOLERANCES = Tolerances()

_active_tolerances = contextvars.ContextVar(
    "active_tolerances", default=DEFAULT_TOLERANCES
)


def get_tolerances() -> Tolerances:
    """Return the tolerances active in the current context."""
    return _active_tolerances.get()


@contextmanager
def use_tolerances(tolerances: Tolerances):
    """
    Make `tolerances` the active record inside a `with` block.

    Parameters
    ----------
    tolerances : Tolerances
        Record to activate.
    """
    token = _active_tolerances.set(tolerances)
    try:
        yield tolerances
    finally:
        _active_tolerances.reset(token)


@dataclass(frozen=True)
class OptimizerParams:
    """
    Settings for the multi-start derivative-free searches.

    Attributes
    ----------
    restarts : int
        Number of local searches, each from a seeded random start.
    tolerance : float
        Absolute tolerance on parameters and objective for one search.
    max_evals : int
        Maximum objective evaluations per search.
    seed : int
        Master seed; restart `k` uses the stream (seed, k).
    workers : int
        Processes used for the restarts (1 = serial).
    penalty : float
        Weight of the squared constraint violation of a raw trial point.
    stability_tolerance : float
        Largest improvement of the running best allowed in the final
        restart before the search is declared unconverged.
    certify_tolerance : float
        Largest shortfall of the direct CHSH search below the correlation
        matrix value.
    """

    restarts: int = 32
    tolerance: float = 1e-10
    max_evals: int = 20000
    seed: int = 0
    workers: int = 1
    penalty: float = 1.0
    stability_tolerance: float = 1e-6
    certify_tolerance: float = 1e-6

    def __post_init__(self):
        if self.restarts < 1:
            raise ConfigError("optimizer.restarts", "must be >= 1")
        if self.tolerance <= 0:
            raise ConfigError("optimizer.tolerance", "must be > 0")
        if self.max_evals < 1:
            raise ConfigError("optimizer.max_evals", "must be >= 1")
        if self.workers < 1:
            raise ConfigError("optimizer.workers", "must be >= 1")
        if self.seed < 0:
            raise ConfigError("optimizer.seed", "must be >= 0")


@dataclass(frozen=True)
class SamplerParams:
    """Shot count per term and master seed for the Monte Carlo sampler."""

    shots: int = 100000
    seed: int = 42

    def __post_init__(self):
        if self.shots < 1:
            raise ConfigError("sampler.shots", "must be >= 1")
        if self.seed < 0:
            raise ConfigError("sampler.seed", "must be >= 0")


@dataclass(frozen=True)
class OutputParams:
    """Output format, destination (None = stdout) and significant
    digits."""

    format: str = "csv"
    path: Optional[str] = None
    precision: int = 6

    def __post_init__(self):
        if self.path is not None and not isinstance(self.path, str):
            raise ConfigError(
                "output.path", f"expected str or null, got {self.path!r}"
            )
        if self.format not in OUTPUT_FORMATS:
            raise ConfigError(
                "output.format", f"must be one of {OUTPUT_FORMATS}"
            )
        if not 6 <= self.precision <= 17:
            raise ConfigError("output.precision", "must be in [6, 17]")


@dataclass(frozen=True)
class ReproduceParams:
    """Sizes used by the reproduce report."""

    grid_steps: int = 11
    random_states: int = 200
    direct_states: int = 20
    sampler_shots: int = 100000
    seed: int = 2024

    def __post_init__(self):
        if self.grid_steps < 2:
            raise ConfigError("reproduce.grid_steps", "must be >= 2")
        for name in ("random_states", "sampler_shots"):
            if getattr(self, name) < 1:
                raise ConfigError(f"reproduce.{name}", "must be >= 1")
        if self.direct_states < 0:
            raise ConfigError("reproduce.direct_states", "must be >= 0")


@dataclass(frozen=True)
class RunConfig:
    """All configuration sections."""

    optimizer: OptimizerParams = field(default_factory=OptimizerParams)
    sampler: SamplerParams = field(default_factory=SamplerParams)
    output: OutputParams = field(default_factory=OutputParams)
    reproduce: ReproduceParams = field(default_factory=ReproduceParams)
    tolerances: Tolerances = field(default_factory=Tolerances)


SECTIONS = {
    "optimizer": OptimizerParams,
    "sampler": SamplerParams,
    "output": OutputParams,
    "reproduce": ReproduceParams,
    "tolerances": Tolerances,
}


def _build_section(name, cls, values):
    """
    Build one config section from a dict, rejecting unknown keys and
    values of the wrong type.
    """
    if not isinstance(values, dict):
        raise ConfigError(name, "section must be an object")

    known = {f.name: f for f in fields(cls)}
    defaults = cls()
    kwargs = {}
    for key, value in values.items():
        if key not in known:
            raise ConfigError(f"{name}.{key}", "unknown key")

        default = getattr(defaults, key)
        # bool is an int subclass but never a valid numeric setting here
        if isinstance(value, bool):
            raise ConfigError(f"{name}.{key}", f"got boolean {value}")
        if isinstance(default, float) and isinstance(value, int):
            value = float(value)
        if default is not None and not isinstance(value, type(default)):
            raise ConfigError(
                f"{name}.{key}",
                f"expected {type(default).__name__}, got {value!r}",
            )
        kwargs[key] = value

    return cls(**kwargs)


def config_from_dict(document: dict) -> RunConfig:
    """
    Build a RunConfig from a parsed JSON document.

    Parameters
    ----------
    document : dict
        Mapping of section name to a mapping of overrides.

    Returns
    -------
    RunConfig
        Config with defaults for every value not given.

    Raises
    ------
    ConfigError
        If a section or key is unknown or a value is invalid.
    """
    if not isinstance(document, dict):
        raise ConfigError("<root>", "config must be a JSON object")

    sections = {}
    for name, values in document.items():
        if name not in SECTIONS:
            raise ConfigError(name, "unknown section")
        sections[name] = _build_section(name, SECTIONS[name], values)

    return RunConfig(**sections)


def load_config(path=None) -> RunConfig:
    """
    Load the run configuration.

    The lookup order is: explicit `path`, then the file named by the
    CONTEXTBELL_CONFIG environment variable, then built-in defaults.

    Parameters
    ----------
    path : str or pathlib.Path, optional
        Path to a JSON config document.

    Returns
    -------
    RunConfig
        The validated configuration.

    Raises
    ------
    ConfigError
        If the file cannot be read or parsed, or holds invalid values.
    """
    if path is None:
        path = os.environ.get(CONFIG_ENV_VAR)
        if not path:
            logger.info("No config file given, using defaults")
            return RunConfig()

    path = Path(path)
    try:
        document = json.loads(path.read_text(encoding="utf-8"))
    except (OSError, json.JSONDecodeError) as e:
        raise ConfigError(str(path), e)

    logger.info(f"Loaded config from {path}")
    return config_from_dict(document)


def with_overrides(config: RunConfig, section: str, **overrides):
    """
    Return a copy of `config` with values of one section replaced,
    ignoring overrides that are None (flags the user did not pass).
    """
    values = {k: v for k, v in overrides.items() if v is not None}
    if not values:
        return config
    updated = replace(getattr(config, section), **values)
    return replace(config, **{section: updated})
