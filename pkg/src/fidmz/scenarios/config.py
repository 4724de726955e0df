"""Declarative scenario configuration, loaded from and written to YAML."""
from __future__ import annotations

import dataclasses
import math
import typing
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Optional

import yaml

from ..detection import DetectorSpec, GateSpec
from ..errors import ConfigError
from ..interferometer import InterferometerSpec
from ..medium import MediumSpec

SCENARIO_KINDS = ("fringe", "single_arm", "cw_calibration")
BUILTIN_DIR = Path(__file__).with_name("builtin")


@dataclass(frozen=True)
class PulseConfig:
    shape: str = "square"
    duration: float = 2e-6
    peak_power: float = 2e-3
    carrier_wavelength: float = 1532e-9


@dataclass(frozen=True)
class ScanConfig:
    """Piezo phase scan: ``points`` settings from ``start`` over ``span`` radians."""

    points: int = 16
    start: float = 0.0
    span: float = 6.5
    shots_per_point: int = 200


@dataclass(frozen=True)
class CalibrationConfig:
    """Detector-path calibration.

    ``target_click_probability`` (if set) fixes the flux scale between the
    modelled detected field and the photons reaching the detector so that
    the mean click probability at the constructive phase equals the target.
    ``reference`` names a scenario whose flux scale is reused instead.
    The noise fractions set the classical noise floor and its rms relative
    to the constructive peak power.
    """

    target_click_probability: Optional[float] = None
    flux_scale: float = 1.0
    reference: Optional[str] = None
    noise_floor_fraction: Optional[float] = None
    noise_rms_fraction: Optional[float] = None


@dataclass(frozen=True)
class NumericsConfig:
    n_slices: int = 64
    n_classes: int = 0  # 0: odd count from the span and the trace length
    profile: str = "flat"
    span_factor: float = 12.0  # grid span / pulse bandwidth
    step_fraction: float = 0.5  # dt / stability guard
    pre_pad: float = 50e-9
    post_pad: float = 1.3e-6


@dataclass(frozen=True)
class ControlConfig:
    """Single-arm control: divide ``t2`` of ``arm`` (or both) by ``t2_reduction``."""

    t2_reduction: float = 1000.0
    arm: int = 1
    both_arms: bool = False


@dataclass(frozen=True)
class CwConfig:
    polarization_check: tuple[float, float] = (0.8, 1.0)


def _default_media() -> list:
    return [MediumSpec(label="waveguide I"), MediumSpec(label="waveguide II")]


@dataclass(frozen=True)
class ScenarioConfig:
    name: str = "scenario"
    kind: str = "fringe"
    seed: int = 0
    output_dir: str = "results"
    line_wavelength: float = 1532e-9
    balance_arms: bool = False
    pulse: PulseConfig = field(default_factory=PulseConfig)
    media: list = field(default_factory=_default_media)
    interferometer: InterferometerSpec = field(default_factory=InterferometerSpec)
    gate: GateSpec = field(default_factory=GateSpec)
    detector: DetectorSpec = field(default_factory=DetectorSpec)
    calibration: CalibrationConfig = field(default_factory=CalibrationConfig)
    scan: ScanConfig = field(default_factory=ScanConfig)
    numerics: NumericsConfig = field(default_factory=NumericsConfig)
    control: ControlConfig = field(default_factory=ControlConfig)
    cw: CwConfig = field(default_factory=CwConfig)

    def __post_init__(self):
        if self.kind not in SCENARIO_KINDS:
            raise ConfigError(f"kind: must be one of {SCENARIO_KINDS}, got {self.kind!r}")
        if len(self.media) != 2:
            raise ConfigError("media: exactly two waveguides are required")
        sc = self.scan
        if sc.points < 6 or sc.shots_per_point < 1:
            raise ConfigError("scan: need >= 6 points and >= 1 shot per point")
        if sc.span < 2 * math.pi:
            raise ConfigError("scan.span: must cover at least 2*pi")
        nm = self.numerics
        if nm.n_slices < 1 or nm.span_factor < 10 or not 0 < nm.step_fraction <= 1:
            raise ConfigError(
                "numerics: n_slices >= 1, span_factor >= 10 and step_fraction in (0, 1] required"
            )
        if nm.n_classes and (nm.n_classes < 3 or nm.n_classes % 2 == 0):
            raise ConfigError("numerics.n_classes: must be 0 (auto) or an odd count >= 3")
        if self.control.t2_reduction < 1 or self.control.arm not in (0, 1):
            raise ConfigError("control: t2_reduction >= 1 and arm in {0, 1} required")
        p = self.calibration.target_click_probability
        if p is not None and not self.detector.dark_prob < p < 1:
            raise ConfigError("calibration.target_click_probability: must lie in (dark_prob, 1)")
        if not self.calibration.flux_scale > 0:
            raise ConfigError("calibration.flux_scale: must be positive")

    @property
    def carrier_detuning(self) -> float:
        """Laser offset (Hz) from the atomic line centre."""
        c = 299_792_458.0
        return c / self.pulse.carrier_wavelength - c / self.line_wavelength


# -- generic dataclass <-> plain tree conversion --------------------------------

_SECTION_TYPES = {"media": MediumSpec}


def _convert(value: Any, tp: Any, where: str) -> Any:
    origin = typing.get_origin(tp)
    if origin is typing.Union:
        args = [a for a in typing.get_args(tp) if a is not type(None)]
        if value is None:
            return None
        return _convert(value, args[0], where)
    if dataclasses.is_dataclass(tp):
        return _build(tp, value, where)
    if origin is tuple:
        args = typing.get_args(tp)
        if not isinstance(value, (list, tuple)) or len(value) != len(args):
            raise ConfigError(f"{where}: expected a list of {len(args)} values")
        return tuple(_convert(v, a, f"{where}[{i}]") for i, (v, a) in enumerate(zip(value, args)))
    if tp is bool:
        if not isinstance(value, bool):
            raise ConfigError(f"{where}: expected true/false, got {value!r}")
        return value
    if tp is int:
        if isinstance(value, bool) or not isinstance(value, int):
            raise ConfigError(f"{where}: expected an integer, got {value!r}")
        return value
    if tp is float:
        if isinstance(value, str):
            # YAML 1.1 reads exponents without a sign (1e-6, 250.0e9) as strings
            try:
                return float(value)
            except ValueError:
                pass
        if isinstance(value, bool) or not isinstance(value, (int, float)):
            raise ConfigError(f"{where}: expected a number, got {value!r}")
        return float(value)
    if tp is str:
        if not isinstance(value, str):
            raise ConfigError(f"{where}: expected a string, got {value!r}")
        return value
    raise ConfigError(f"{where}: unsupported field type {tp!r}")


def _build(cls, data: Any, where: str):
    if not isinstance(data, dict):
        raise ConfigError(f"{where or 'config'}: expected a mapping, got {type(data).__name__}")
    hints = typing.get_type_hints(cls)
    names = {f.name for f in dataclasses.fields(cls)}
    unknown = sorted(set(data) - names)
    if unknown:
        raise ConfigError(f"{where or 'config'}: unknown field(s) {', '.join(unknown)}")
    kwargs = {}
    for key, value in data.items():
        sub = f"{where}.{key}" if where else key
        if key in _SECTION_TYPES:
            if not isinstance(value, list):
                raise ConfigError(f"{sub}: expected a list")
            kwargs[key] = [_build(_SECTION_TYPES[key], v, f"{sub}[{i}]") for i, v in enumerate(value)]
        else:
            kwargs[key] = _convert(value, hints[key], sub)
    try:
        return cls(**kwargs)
    except ConfigError:
        raise
    except (ValueError, TypeError) as exc:
        raise ConfigError(f"{where or 'config'}: {exc}") from exc


def _to_tree(obj: Any) -> Any:
    if dataclasses.is_dataclass(obj):
        return {f.name: _to_tree(getattr(obj, f.name)) for f in dataclasses.fields(obj)}
    if isinstance(obj, (list, tuple)):
        return [_to_tree(v) for v in obj]
    return obj


def config_from_dict(data: dict) -> ScenarioConfig:
    return _build(ScenarioConfig, data, "")


def config_to_dict(config: ScenarioConfig) -> dict:
    return _to_tree(config)


def dump_config(config: ScenarioConfig) -> str:
    return yaml.safe_dump(config_to_dict(config), sort_keys=False)


def load_config(path) -> ScenarioConfig:
    """Read a YAML scenario file, or a builtin scenario by name."""
    path = Path(path)
    if not path.exists() and (BUILTIN_DIR / f"{path.name}.yaml").exists():
        path = BUILTIN_DIR / f"{path.name}.yaml"
    try:
        text = path.read_text()
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc.strerror}") from exc
    return parse_config(text)


def parse_config(text: str) -> ScenarioConfig:
    try:
        data = yaml.safe_load(text)
    except yaml.YAMLError as exc:
        raise ConfigError(f"invalid YAML: {exc}") from exc
    return config_from_dict(data or {})


def builtin_scenarios() -> list[str]:
    return sorted(p.stem for p in BUILTIN_DIR.glob("*.yaml"))


def apply_overrides(config: ScenarioConfig, assignments) -> ScenarioConfig:
    """Apply ``key.path=value`` overrides; values are parsed as YAML scalars.

    List entries are addressed by index, e.g. ``media.0.optical_depth=0.7``.
    """
    tree = config_to_dict(config)
    for item in assignments:
        key, sep, raw = item.partition("=")
        if not sep or not key:
            raise ConfigError(f"override {item!r}: expected key=value")
        try:
            value = yaml.safe_load(raw)
        except yaml.YAMLError as exc:
            raise ConfigError(f"override {item!r}: {exc}") from exc
        node = tree
        parts = key.split(".")
        for part in parts[:-1]:
            node = _child(node, part, key)
        last = parts[-1]
        if isinstance(node, list):
            idx = _index(node, last, key)
            node[idx] = value
        elif isinstance(node, dict) and last in node:
            node[last] = value
        else:
            raise ConfigError(f"override {key!r}: unknown field")
    return config_from_dict(tree)


def _index(node: list, part: str, key: str) -> int:
    if not part.isdigit() or int(part) >= len(node):
        raise ConfigError(f"override {key!r}: bad list index {part!r}")
    return int(part)


def _child(node, part: str, key: str):
    if isinstance(node, list):
        return node[_index(node, part, key)]
    if isinstance(node, dict) and part in node and isinstance(node[part], (dict, list)):
        return node[part]
    raise ConfigError(f"override {key!r}: unknown section {part!r}")
