"""Scenario configuration for the single-satellite downlink.

Config files are plain ``key = value`` lines. Keys mirror the
:class:`ScenarioConfig` field names; ``sat_gain`` and ``user_gain`` are
written in dBi and converted to linear gain on load.
"""

from __future__ import annotations

import dataclasses
import hashlib
import json
from dataclasses import dataclass, field
from pathlib import Path

from .errors import ConfigError

DBI_FIELDS = ("sat_gain", "user_gain")
PHASE_MODES = ("distance", "uniform")


def db_to_linear(value_db: float) -> float:
    return 10.0 ** (value_db / 10.0)


def linear_to_db(value: float) -> float:
    import math
    return 10.0 * math.log10(value)


@dataclass(frozen=True)
class ScenarioConfig:
    """Physical and geometric constants of one simulation scenario.

    Distances in meters, powers in watts, gains linear. ``error_bound`` is
    the half-width of the uniform space-angle error. ``antenna_spacing``
    defaults to 1.5 wavelengths.
    """

    num_antennas: int = 16
    num_users: int = 3
    altitude: float = 600e3
    wavelength: float = 0.15
    antenna_spacing: float | None = None
    transmit_power: float = 100.0
    noise_power: float = 6e-13
    sat_gain: float = 100.0
    user_gain: float = 1.0
    mean_user_distance: float = 100e3
    fading_std: float = 1.0
    error_bound: float = 0.0
    rng_seed: int = 0
    phase_mode: str = "distance"
    # freezes users at their mean positions; test hook for analytic checks
    jitter: bool = True

    def __post_init__(self):
        if self.antenna_spacing is None:
            object.__setattr__(self, "antenna_spacing", 1.5 * self.wavelength)
        checks = [
            (self.num_antennas >= 1, "num_antennas must be >= 1"),
            (self.num_users >= 1, "num_users must be >= 1"),
            (self.altitude > 0, "altitude must be > 0"),
            (self.wavelength > 0, "wavelength must be > 0"),
            (self.antenna_spacing > 0, "antenna_spacing must be > 0"),
            (self.transmit_power > 0, "transmit_power must be > 0"),
            (self.noise_power > 0, "noise_power must be > 0"),
            (self.sat_gain > 0, "sat_gain must be > 0"),
            (self.user_gain > 0, "user_gain must be > 0"),
            (self.mean_user_distance >= 0, "mean_user_distance must be >= 0"),
            (self.fading_std >= 0, "fading_std must be >= 0"),
            (self.error_bound >= 0, "error_bound must be >= 0"),
            (self.phase_mode in PHASE_MODES, f"phase_mode must be one of {PHASE_MODES}"),
        ]
        for ok, msg in checks:
            if not ok:
                raise ConfigError(msg)

    def replace(self, **changes) -> "ScenarioConfig":
        return dataclasses.replace(self, **changes)

    def to_dict(self) -> dict:
        return dataclasses.asdict(self)

    @classmethod
    def from_dict(cls, data: dict) -> "ScenarioConfig":
        known = {f.name for f in dataclasses.fields(cls)}
        unknown = set(data) - known
        if unknown:
            raise ConfigError(f"unknown config keys: {sorted(unknown)}")
        return cls(**data)

    def config_hash(self) -> str:
        blob = json.dumps(self.to_dict(), sort_keys=True).encode()
        return hashlib.sha256(blob).hexdigest()[:16]


_FIELD_TYPES = {f.name: f.type for f in dataclasses.fields(ScenarioConfig)}


def _parse_value(key: str, raw: str):
    kind = _FIELD_TYPES[key]
    raw = raw.strip()
    if kind == "int":
        return int(float(raw)) if "e" in raw.lower() else int(raw)
    if kind == "bool":
        if raw.lower() in ("1", "true", "yes", "on"):
            return True
        if raw.lower() in ("0", "false", "no", "off"):
            return False
        raise ConfigError(f"{key}: not a boolean: {raw!r}")
    if kind == "str":
        return raw
    return float(raw)


def parse_config_text(text: str, base: ScenarioConfig | None = None) -> ScenarioConfig:
    values = {}
    for lineno, line in enumerate(text.splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"line {lineno}: expected 'key = value'")
        key, raw = (part.strip() for part in line.split("=", 1))
        if key not in _FIELD_TYPES:
            raise ConfigError(f"line {lineno}: unknown key {key!r}")
        try:
            value = _parse_value(key, raw)
        except ValueError as exc:
            raise ConfigError(f"line {lineno}: {exc}") from None
        if key in DBI_FIELDS:
            value = db_to_linear(value)
        values[key] = value
    base = base or ScenarioConfig()
    return base.replace(**values)


def load_config(path: str | Path, base: ScenarioConfig | None = None) -> ScenarioConfig:
    return parse_config_text(Path(path).read_text(), base)


def format_config(cfg: ScenarioConfig) -> str:
    lines = []
    for key, value in cfg.to_dict().items():
        if key in DBI_FIELDS:
            value = linear_to_db(value)
        lines.append(f"{key} = {value!r}" if isinstance(value, float) else f"{key} = {value}")
    return "\n".join(lines) + "\n"


def save_config(cfg: ScenarioConfig, path: str | Path) -> None:
    Path(path).write_text(format_config(cfg))


# Evaluation scenarios: a) N=10, 100 km; b) N=16, 100 km; c) N=16, 10 km.
# "tiny" is the reduced case used for desk-scale training checks.
SCENARIOS = {
    "a": ScenarioConfig(num_antennas=10, mean_user_distance=100e3),
    "b": ScenarioConfig(num_antennas=16, mean_user_distance=100e3),
    "c": ScenarioConfig(num_antennas=16, mean_user_distance=10e3),
    "tiny": ScenarioConfig(num_antennas=4, num_users=2, mean_user_distance=100e3),
}


def get_scenario(name: str, **overrides) -> ScenarioConfig:
    try:
        cfg = SCENARIOS[name]
    except KeyError:
        raise ConfigError(f"unknown scenario {name!r}; choose from {sorted(SCENARIOS)}") from None
    return cfg.replace(**overrides) if overrides else cfg
