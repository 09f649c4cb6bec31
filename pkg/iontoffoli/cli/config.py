"""
Run configuration: built-in defaults < config.json defaults < preset < flags.
"""
import logging
from typing import Any, Optional

from .. import CONF
from ..sim.fockspace import CompositeBasis
from ..sim.pulsegen import TWO_PI, NoiseConfig, PhysicalParams
from .types import RunConfig

logger = logging.getLogger(__name__)

DEFAULT_PARAMS: RunConfig = {
    "omega_sb_hz": 3300.0,
    "omega_carrier_hz": 50_000.0,
    "epsilon": 0.0,
    "next_neighbor_ratio": 0.0,
    "detuning_hz": 0.0,
    "qubit_prep_error": 0.0,
    "motional_prep_error": 0.0,
    "nmax": 4,
    "shots": 100,
    "samples": 10_000,
    "seed": 2008,
    "format": "json",
    "sequence": "builtin:toffoli",
    "workers": 1,
    "complex": False,
    "out": None,
    "verbose": False,
}
# Keys that do not change results, left out of the echoed configuration
UNECHOED = {"out", "verbose", "workers"}
FORMATS = {"json", "csv"}


def merge_params(
    params: dict[str, Any], defaults: Optional[dict[str, Any]] = None
) -> RunConfig:
    """
    Merge a (potentially incomplete) params dict with a default params dict,
    and convert values into the right type
    """
    if defaults is None:
        defaults = dict(DEFAULT_PARAMS)
    unknown = params.keys() - DEFAULT_PARAMS.keys()
    if unknown:
        raise KeyError(f"Unknown parameter(s): {', '.join(sorted(unknown))}")
    merged = {**defaults, **params}
    converts = [
        (int, {"nmax", "shots", "samples", "seed", "workers"}),
        (
            float,
            {
                "omega_sb_hz",
                "omega_carrier_hz",
                "epsilon",
                "next_neighbor_ratio",
                "detuning_hz",
                "qubit_prep_error",
                "motional_prep_error",
            },
        ),
        (bool, {"complex", "verbose"}),
        (str, {"format", "sequence"}),
    ]
    for convert, keys in converts:
        for key in keys & merged.keys():
            merged[key] = convert(merged[key])
    return validate(merged)  # type: ignore


def validate(config: RunConfig) -> RunConfig:
    for key in ("shots", "samples", "workers"):
        if config[key] < 0:
            raise ValueError(f"'{key}' must be non-negative (got {config[key]})")
    if config["format"] not in FORMATS:
        raise ValueError(
            f"Unknown output format '{config['format']}' "
            f"(expected one of {', '.join(sorted(FORMATS))})"
        )
    # Build the domain objects once to surface their own range checks
    physical_params(config)
    noise_config(config)
    composite_basis(config)
    return config


def get_presets(conf: Optional[dict[str, Any]] = None) -> dict[str, dict[str, Any]]:
    conf = CONF if conf is None else conf
    return dict(conf.get("presets", {}))


def resolve_config(
    flags: dict[str, Any],
    preset: Optional[str] = None,
    conf: Optional[dict[str, Any]] = None,
) -> RunConfig:
    """Apply config.json defaults, then the preset, then the flags that were
    actually given (None values are ignored)."""
    conf = CONF if conf is None else conf
    layers = [conf.get("defaults", {})]
    if preset is not None:
        presets = get_presets(conf)
        if preset not in presets:
            raise KeyError(
                f"Unknown preset '{preset}' (available: {', '.join(presets) or '-'})"
            )
        layers.append(presets[preset])
    layers.append({k: v for k, v in flags.items() if v is not None})

    config = merge_params({})
    for layer in layers:
        config = merge_params(layer, config)  # type: ignore
    if conf.get("verbose"):
        config["verbose"] = True
    logger.debug(f"Resolved configuration: {config}")
    return config


def physical_params(config: RunConfig) -> PhysicalParams:
    return PhysicalParams.from_hz(config["omega_sb_hz"], config["omega_carrier_hz"])


def noise_config(config: RunConfig) -> NoiseConfig:
    return NoiseConfig(
        addressing_ratio=config["epsilon"],
        detuning=TWO_PI * config["detuning_hz"],
        qubit_prep_error=config["qubit_prep_error"],
        motional_prep_error=config["motional_prep_error"],
        next_neighbor_ratio=config["next_neighbor_ratio"],
    )


def composite_basis(config: RunConfig) -> CompositeBasis:
    return CompositeBasis(num_qubits=3, n_max=config["nmax"])


def config_echo(config: RunConfig) -> dict[str, Any]:
    return {k: v for k, v in config.items() if k not in UNECHOED}
