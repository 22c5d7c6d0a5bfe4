"""
Configuration Module - Manages numerical settings and environment overrides.

This module is responsible for loading and providing access to the settings
that govern every computation: comparison tolerances, rank thresholds, sampler
ranges for the verification sweeps, Newton solver limits and logging. Settings
live in a YAML file whose values may reference environment variables with the
`${VAR:default}` syntax. It uses dataclasses for type-safe configuration access.

Key components:
- Various dataclasses (`NumericsConfig`, `SamplingConfig`, etc.) to define the
  structure of the configuration.
- `load_config`: Function to load the configuration from a YAML file.
- `get_config`: Provides a singleton instance of the loaded configuration.
- `init_config`: Loads the singleton at CLI startup, with the `--tol` override.

Integration:
- Used by almost all other core modules to read default tolerances.
- `TORSION_FORGE_TOL` overrides the default tolerance; CLI flags win over it.
"""
import os
import re
import yaml
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Dict, Optional, Tuple
from dotenv import load_dotenv

from .errors import InputError

load_dotenv()

DEFAULT_CONFIG_PATH = Path(__file__).resolve().parents[2] / "config" / "config.yaml"

@dataclass
class NumericsConfig:
    tolerance: float = 1e-10
    rank_rtol: float = 1e-10
    unimodular_tol: float = 1e-8
    degenerate_floor: float = 1e-12
    arccosh_slack: float = 1e-12

@dataclass
class SamplingConfig:
    seed: int = 20240229
    samples: int = 200
    workers: int = 4
    angle_range: Tuple[float, float] = (0.2, 1.6)
    pants_angle_range: Tuple[float, float] = (0.15, 1.3)
    length_range: Tuple[float, float] = (0.3, 2.5)
    margin: float = 0.15

@dataclass
class SolverConfig:
    max_iter: int = 100
    tol: float = 1e-10
    fd_step: float = 1e-6
    min_damping: float = 1e-8

@dataclass
class LoggingConfig:
    level: str = "WARNING"
    format: str = "simple"

@dataclass
class Config:
    numerics: NumericsConfig = field(default_factory=NumericsConfig)
    sampling: SamplingConfig = field(default_factory=SamplingConfig)
    solver: SolverConfig = field(default_factory=SolverConfig)
    logging: LoggingConfig = field(default_factory=LoggingConfig)

def _section(data: Dict[str, Any], name: str) -> Dict[str, Any]:
    section = data.get(name) or {}
    if not isinstance(section, dict):
        raise InputError(f"Config section '{name}' must be a mapping")
    return section

def _pair(value: Any) -> Tuple[float, float]:
    low, high = value
    return (float(low), float(high))

def load_config(config_path: Optional[str] = None) -> Config:
    path = Path(config_path or os.getenv("TORSION_FORGE_CONFIG") or DEFAULT_CONFIG_PATH)
    if not path.exists():
        if config_path:
            raise InputError(f"Config file not found: {path}")
        config = Config()
        env_tol = os.getenv("TORSION_FORGE_TOL")
        if env_tol:
            config.numerics.tolerance = float(env_tol)
        return config

    with open(path, 'r') as file:
        yaml_content = file.read()

    def replace_env_var(match):
        var_name = match.group(1)
        default_value = match.group(2) if match.group(2) else ""
        return os.getenv(var_name, default_value)

    yaml_content = re.sub(r'\$\{([^:}]+):([^}]*)\}', replace_env_var, yaml_content)
    try:
        config_data = yaml.safe_load(yaml_content) or {}
    except yaml.YAMLError as e:
        raise InputError(f"Malformed config file {path}: {e}") from e
    if not isinstance(config_data, dict):
        raise InputError(f"Config file {path} must hold a mapping")

    try:
        return _build_config(config_data)
    except (TypeError, ValueError) as e:
        raise InputError(f"Invalid value in config file {path}: {e}") from e

def _build_config(config_data: Dict[str, Any]) -> Config:
    # PyYAML reads 1e-10 without a dot as a string
    numerics = _section(config_data, 'numerics')
    sampling = dict(_section(config_data, 'sampling'))
    for key in ('seed', 'samples', 'workers'):
        if key in sampling:
            sampling[key] = int(sampling[key])
    if 'margin' in sampling:
        sampling['margin'] = float(sampling['margin'])
    for key in ('angle_range', 'pants_angle_range', 'length_range'):
        if key in sampling:
            sampling[key] = _pair(sampling[key])
    return Config(
        numerics=NumericsConfig(**{k: float(v) for k, v in numerics.items()}),
        sampling=SamplingConfig(**sampling),
        solver=SolverConfig(**{k: int(v) if k == 'max_iter' else float(v)
                               for k, v in _section(config_data, 'solver').items()}),
        logging=LoggingConfig(**_section(config_data, 'logging'))
    )

_config: Optional[Config] = None

def get_config() -> Config:
    global _config
    if _config is None:
        _config = load_config()
    return _config

def reset_config() -> None:
    global _config
    _config = None

def default_tolerance() -> float:
    return get_config().numerics.tolerance

def init_config(config_path: Optional[str] = None, tolerance: Optional[float] = None) -> Config:
    """Loads the singleton from an explicit file; `tolerance` overrides both env and YAML."""
    global _config
    _config = load_config(config_path)
    if tolerance is not None:
        _config.numerics.tolerance = float(tolerance)
    return _config
