"""
Experiment configuration for the qproc batch CLI
Parses and validates a single JSON document before any computation
"""

import json
import logging
from dataclasses import dataclass, field, fields
from pathlib import Path
from typing import Any, Dict, List, Optional

import numpy as np

from ..core.config import QProcConfig
from ..core.utils import parse_complex_vector
from ..exceptions import ConfigurationError
from ..process import QProcess
from ..unitary.base import InitialState
from ..unitary.factory import create_system

logger = logging.getLogger(__name__)

TOP_LEVEL_KEYS = {
    "system", "initial_state", "fixed_initial_site", "settings",
    "walk", "spectrum", "measure", "integrate", "check",
}


@dataclass
class WalkSettings:
    """Walk table block"""
    t_max: int = 16
    direct_cap: Optional[int] = None


@dataclass
class SpectrumSettings:
    """Spectrum block: ranks to decompose"""
    ranks: List[int] = field(default_factory=lambda: [0, 1, 2, 3])
    dense_check: bool = False


@dataclass
class MeasureSettings:
    """Measure block: event specs and sweep parameters"""
    events: List[Dict[str, Any]] = field(default_factory=list)
    t_max: Optional[int] = None
    window: Optional[int] = None
    tol: Optional[float] = None


@dataclass
class IntegrateSettings:
    """
    Integrate block. Either a finite space (``space``, ``values``, ``state``)
    or a path ``variable`` integrated against the process.
    """
    space: Optional[Dict[str, Any]] = None
    values: Optional[List[float]] = None
    state: Optional[Any] = None
    variable: Optional[Dict[str, Any]] = None
    scale: float = 1.0
    t_max: Optional[int] = None
    window: Optional[int] = None
    tol: Optional[float] = None


@dataclass
class CheckSettings:
    """Check block: consistency ranks, sampling and family martingale checks"""
    t_max: int = 4
    samples: int = 1000
    seed: int = 0
    exhaustive_limit: int = 1024
    families: List[Dict[str, Any]] = field(default_factory=list)


def _section(cls, data: Any, name: str):
    """Build a settings dataclass from a config block, rejecting unknown keys"""
    if data is None:
        return cls()
    if not isinstance(data, dict):
        raise ConfigurationError(f"'{name}' block must be an object")
    known = {f.name for f in fields(cls)}
    unknown = sorted(set(data) - known)
    if unknown:
        raise ConfigurationError(f"Unknown keys in '{name}': {unknown}")
    try:
        return cls(**data)
    except TypeError as e:
        raise ConfigurationError(f"Invalid '{name}' block: {e}") from e


def _check_int(value: Any, name: str, minimum: int = 0) -> int:
    if isinstance(value, bool) or not isinstance(value, int) or value < minimum:
        raise ConfigurationError(f"'{name}' must be an integer >= {minimum}, got {value!r}")
    return value


def _check_float(value: Any, name: str, positive: bool = False) -> float:
    if isinstance(value, bool) or not isinstance(value, (int, float)) or not np.isfinite(value) \
            or (positive and value <= 0):
        bound = "a positive number" if positive else "a finite number"
        raise ConfigurationError(f"'{name}' must be {bound}, got {value!r}")
    return float(value)


@dataclass
class ExperimentConfig:
    """One experiment: system, initial state and per-command blocks"""

    system: Optional[Dict[str, Any]] = None
    initial_state: Optional[List[Any]] = None
    fixed_initial_site: Optional[int] = None
    settings: QProcConfig = field(default_factory=QProcConfig)
    walk: WalkSettings = field(default_factory=WalkSettings)
    spectrum: SpectrumSettings = field(default_factory=SpectrumSettings)
    measure: MeasureSettings = field(default_factory=MeasureSettings)
    integrate: IntegrateSettings = field(default_factory=IntegrateSettings)
    check: CheckSettings = field(default_factory=CheckSettings)
    base_dir: Path = field(default_factory=Path.cwd)

    @classmethod
    def from_dict(cls, data: Dict[str, Any], base_dir: Optional[Path] = None) -> 'ExperimentConfig':
        """
        Validate and build an experiment config

        Raises:
            ConfigurationError: On unknown keys or malformed blocks
        """
        if not isinstance(data, dict):
            raise ConfigurationError("Experiment config must be a JSON object")
        unknown = sorted(set(data) - TOP_LEVEL_KEYS)
        if unknown:
            raise ConfigurationError(f"Unknown top-level keys: {unknown}")

        settings = data.get("settings") or {}
        if not isinstance(settings, dict):
            raise ConfigurationError("'settings' block must be an object")
        try:
            qconfig = QProcConfig.from_dict(settings)
        except (TypeError, ValueError) as e:
            raise ConfigurationError(f"Invalid settings: {e}") from e

        fixed = data.get("fixed_initial_site")
        if fixed is not None:
            _check_int(fixed, "fixed_initial_site")

        config = cls(
            system=data.get("system"),
            initial_state=data.get("initial_state"),
            fixed_initial_site=fixed,
            settings=qconfig,
            walk=_section(WalkSettings, data.get("walk"), "walk"),
            spectrum=_section(SpectrumSettings, data.get("spectrum"), "spectrum"),
            measure=_section(MeasureSettings, data.get("measure"), "measure"),
            integrate=_section(IntegrateSettings, data.get("integrate"), "integrate"),
            check=_section(CheckSettings, data.get("check"), "check"),
            base_dir=base_dir or Path.cwd(),
        )
        config.validate()
        return config

    def validate(self):
        """Check block values that the dataclasses cannot type-check"""
        _check_int(self.walk.t_max, "walk.t_max")
        if self.walk.direct_cap is not None:
            _check_int(self.walk.direct_cap, "walk.direct_cap")
        if not isinstance(self.spectrum.ranks, list) or not self.spectrum.ranks:
            raise ConfigurationError("'spectrum.ranks' must be a non-empty list")
        for n in self.spectrum.ranks:
            _check_int(n, "spectrum.ranks")
        if not isinstance(self.measure.events, list):
            raise ConfigurationError("'measure.events' must be a list of event specs")
        for block, name in ((self.measure, "measure"), (self.integrate, "integrate")):
            if block.t_max is not None:
                _check_int(block.t_max, f"{name}.t_max")
            if block.window is not None:
                _check_int(block.window, f"{name}.window", minimum=2)
            if block.tol is not None:
                _check_float(block.tol, f"{name}.tol", positive=True)
        _check_float(self.integrate.scale, "integrate.scale")
        if self.integrate.variable is not None and not isinstance(self.integrate.variable, dict):
            raise ConfigurationError("'integrate.variable' must be an object")
        _check_int(self.check.t_max, "check.t_max")
        _check_int(self.check.samples, "check.samples", minimum=1)
        _check_int(self.check.seed, "check.seed")
        _check_int(self.check.exhaustive_limit, "check.exhaustive_limit", minimum=1)
        if self.system is not None and not isinstance(self.system, dict):
            raise ConfigurationError("'system' block must be an object")

    def build_process(self) -> QProcess:
        """
        System, initial state and process described by the config

        The initial state defaults to the basis vector of the fixed initial
        site (site 0 when none is fixed).

        Raises:
            ConfigurationError: If the config has no system block
        """
        if self.system is None:
            raise ConfigurationError("This command needs a 'system' block")
        system = create_system(self.system, self.settings)
        if self.fixed_initial_site is not None and self.fixed_initial_site >= system.m:
            raise ConfigurationError(f"fixed_initial_site {self.fixed_initial_site} outside 0..{system.m - 1}")

        if self.initial_state is None:
            site = self.fixed_initial_site or 0
            logger.info(f"No initial state given, using basis vector e_{site}")
            psi = InitialState.basis(system.m, site)
        else:
            vector = parse_complex_vector(self.initial_state)
            if vector.size != system.m:
                raise ConfigurationError(f"Initial state has {vector.size} entries, system has m={system.m}")
            psi = InitialState(vector, self.settings.normalization_tol)

        logger.info(f"Built system with m={system.m}, stationary={system.stationary}")
        return QProcess(system, psi, self.fixed_initial_site, self.settings)


def load_experiment_config(path: str) -> ExperimentConfig:
    """
    Load an experiment config from a JSON file

    Relative file references (coverage tables) resolve against the
    config file's directory.

    Raises:
        ConfigurationError: If the file is missing, not JSON, or invalid
    """
    config_path = Path(path)
    try:
        with open(config_path, 'r') as f:
            data = json.load(f)
    except OSError as e:
        raise ConfigurationError(f"Cannot read config {config_path}: {e}") from e
    except json.JSONDecodeError as e:
        raise ConfigurationError(f"Config {config_path} is not valid JSON: {e}") from e
    logger.debug(f"Loaded config from {config_path}")
    return ExperimentConfig.from_dict(data, base_dir=config_path.resolve().parent)


def as_float_vector(value: Any, name: str) -> np.ndarray:
    """Parse a list of real numbers"""
    if not isinstance(value, list) or not value:
        raise ConfigurationError(f"'{name}' must be a non-empty list of numbers")
    if any(isinstance(x, bool) or not isinstance(x, (int, float)) for x in value):
        raise ConfigurationError(f"'{name}' must contain only numbers")
    return np.asarray(value, dtype=float)
