"""Scenario configs and the runner that wires the full pipeline."""
from .config import (
    ScenarioConfig,
    apply_overrides,
    builtin_scenarios,
    config_from_dict,
    config_to_dict,
    dump_config,
    load_config,
    parse_config,
)
from .runner import (
    Anchor,
    ScenarioResult,
    run_control_single_arm,
    run_cw_calibration,
    run_scenario,
    simulate_optics,
    write_result,
)

__all__ = [
    "Anchor",
    "ScenarioConfig",
    "ScenarioResult",
    "apply_overrides",
    "builtin_scenarios",
    "config_from_dict",
    "config_to_dict",
    "dump_config",
    "load_config",
    "parse_config",
    "run_control_single_arm",
    "run_cw_calibration",
    "run_scenario",
    "simulate_optics",
    "write_result",
]
