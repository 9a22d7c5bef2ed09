"""Typed TOML run configuration with strict schema validation.

Flat key-value sections (model, grid, stepper, scenario, run, fit, output,
plus command-specific blocks); unknown sections or keys are errors, never
silently absorbed, and range violations report both the value and the
allowed range.
"""

from __future__ import annotations

import sys
from dataclasses import dataclass, field

if sys.version_info >= (3, 11):
    import tomllib
else:
    import tomli as tomllib

from .params import PhysParams
from .scenarios import ScenarioSpec
from .stepper import StepperConfig

__all__ = ["ConfigError", "RunConfig", "parse_config", "load_config"]

COMMANDS = ("simulate", "linear-decay", "green-audit", "lower-bound",
            "rates", "sweep", "box-sensitivity")


class ConfigError(ValueError):
    """Schema or range violation; message carries the offending key path."""


def _typename(t):
    return {float: "float", int: "int", bool: "bool", str: "string", list: "list"}[t]


@dataclass
class _Key:
    types: tuple
    default: object = None
    required: bool = False
    check: object = None   # (predicate, "allowed range text")


def _numeric(lo=None, hi=None, lo_open=False, hi_open=False):
    def pred(v):
        if lo is not None and (v <= lo if lo_open else v < lo):
            return False
        if hi is not None and (v >= hi if hi_open else v > hi):
            return False
        return True

    left = "(" if lo_open else "["
    right = ")" if hi_open else "]"
    text = f"{left}{'-inf' if lo is None else lo}, {'inf' if hi is None else hi}{right}"
    return pred, text


_SCHEMA = {
    "model": {
        "alpha": _Key((float, int), 0.5, check=_numeric(0.0, 1.0, lo_open=True)),
        "mu": _Key((float, int), 1.0, check=_numeric(0.0, lo_open=True)),
        "gamma": _Key((float, int), 1.0, check=_numeric(1.0)),
        "dimension": _Key((int,), 2, check=(lambda v: v in (1, 2), "{1, 2}")),
    },
    "grid": {
        "points": _Key((int,), 64, check=(lambda v: v >= 8 and v % 2 == 0,
                                          "even integers >= 8")),
        "box_length": _Key((float, int), 50.0, check=_numeric(0.0, lo_open=True)),
    },
    "stepper": {
        "dt": _Key((float, int), 0.0, check=_numeric(0.0)),
        "scheme": _Key((str,), "etdrk2", check=(lambda v: v in ("etd1", "etdrk2"),
                                                "{etd1, etdrk2}")),
        "dealias": _Key((bool,), True),
        "rho_min": _Key((float,), 1e-8, check=_numeric(0.0, 1.0, True, True)),
        "max_steps": _Key((int,), 10_000_000, check=_numeric(1)),
        "output_stride": _Key((int,), 1, check=_numeric(1)),
        "cfl_advect": _Key((float, int), 0.4, check=_numeric(0.0, lo_open=True)),
        "cfl_pressure": _Key((float, int), 0.4, check=_numeric(0.0, lo_open=True)),
        "dt_max": _Key((float, int), 0.5, check=_numeric(0.0, lo_open=True)),
        "formulation": _Key((str,), "perturbation",
                            check=(lambda v: v in ("perturbation", "sigma"),
                                   "{perturbation, sigma}")),
        "conserve_momentum": _Key((bool,), True),
        "tail_energy_tol": _Key((float,), 1e-8, check=_numeric(0.0, lo_open=True)),
    },
    "scenario": {
        "name": _Key((str,), "gaussian",
                     check=(lambda v: v in ("gaussian", "lower-bound", "zero-mean"),
                            "{gaussian, lower-bound, zero-mean}")),
        "amplitude": _Key((float, int), 0.01, check=_numeric(0.0, lo_open=True)),
        "velocity_amplitude": _Key((float, int), None),
        "width": _Key((float, int), None, check=_numeric(0.0, lo_open=True)),
        "mean_a": _Key((float, int), None),
        "momentum": _Key((list,), None),
        "random_phases": _Key((bool,), False),
        "seed": _Key((int,), 0, check=_numeric(0)),
    },
    "run": {
        "t_end": _Key((float, int), 10.0, check=_numeric(0.0)),
    },
    "fit": {
        "t_min": _Key((float, int), None, check=_numeric(0.0)),
        "t_max": _Key((float, int), None, check=_numeric(0.0, lo_open=True)),
        "quantities": _Key((list,), ["L2_a", "L2_u"]),
        "sobolev_s": _Key((float, int), None, check=_numeric(0.0)),
        "tolerance": _Key((float, int), 0.03, check=_numeric(0.0, lo_open=True)),
    },
    "output": {
        "dir": _Key((str,), "out"),
    },
    "linear": {
        "s": _Key((float, int), 0.0, check=_numeric(0.0)),
        "data_width": _Key((float, int), 1.0, check=_numeric(0.0, lo_open=True)),
        "t_min": _Key((float, int), 1e2, check=_numeric(0.0, lo_open=True)),
        "t_max": _Key((float, int), 1e5, check=_numeric(0.0, lo_open=True)),
        "t_points": _Key((int,), 19, check=_numeric(2)),
        "dimension": _Key((int,), None, check=_numeric(1)),
    },
    "audit": {
        "t_min": _Key((float, int), 1e-2, check=_numeric(0.0, lo_open=True)),
        "t_max": _Key((float, int), 1e3, check=_numeric(0.0, lo_open=True)),
        "t_points": _Key((int,), 100, check=_numeric(2)),
        "xi_min": _Key((float, int), 1e-3, check=_numeric(0.0, lo_open=True)),
        "xi_max": _Key((float, int), 50.0, check=_numeric(0.0, lo_open=True)),
        "xi_points": _Key((int,), 100, check=_numeric(2)),
    },
    "rates": {
        "dims": _Key((list,), [2, 3]),
        "alpha_min": _Key((float, int), 0.02, check=_numeric(0.0)),
        "alpha_max": _Key((float, int), 1.98, check=_numeric(0.0, hi=2.0)),
        "alpha_points": _Key((int,), 50, check=_numeric(2)),
    },
    "sweep": {
        "key": _Key((str,), None),
        "values": _Key((list,), None),
        "command": _Key((str,), "simulate",
                        check=(lambda v: v in ("simulate", "linear-decay", "lower-bound"),
                               "{simulate, linear-decay, lower-bound}")),
        "workers": _Key((int,), 1, check=_numeric(1)),
    },
    "boxes": {
        "lengths": _Key((list,), None),
    },
}


@dataclass
class RunConfig:
    command: str
    params: PhysParams
    grid_points: int
    box_length: float
    stepper: StepperConfig
    scenario: ScenarioSpec
    seed: int
    t_end: float
    fit: dict
    output_dir: str
    sections: dict = field(default_factory=dict)
    raw: dict = field(default_factory=dict)


def _validate_section(name: str, data: dict) -> dict:
    schema = _SCHEMA[name]
    out = {}
    for key, value in data.items():
        if key not in schema:
            raise ConfigError(f"unknown key '{name}.{key}'")
        spec = schema[key]
        if isinstance(value, bool) and bool not in spec.types:
            raise ConfigError(f"'{name}.{key}' has type bool, expected "
                              f"{'/'.join(_typename(t) for t in spec.types)}")
        if not isinstance(value, spec.types):
            raise ConfigError(f"'{name}.{key}' has type {type(value).__name__}, expected "
                              f"{'/'.join(_typename(t) for t in spec.types)}")
        if spec.check is not None and not isinstance(value, list):
            pred, text = spec.check
            if not pred(value):
                raise ConfigError(f"'{name}.{key}' = {value!r} outside allowed range {text}")
        out[key] = value
    for key, spec in schema.items():
        if key not in out:
            if spec.required:
                raise ConfigError(f"missing required key '{name}.{key}'")
            if spec.default is not None:
                out[key] = spec.default
    return out


def parse_config(text: str) -> RunConfig:
    """Parse and validate a TOML run configuration document."""
    try:
        data = tomllib.loads(text)
    except tomllib.TOMLDecodeError as exc:
        raise ConfigError(f"malformed TOML: {exc}") from exc

    command = data.pop("command", None)
    if command is None:
        raise ConfigError("missing top-level 'command' key")
    if command not in COMMANDS:
        raise ConfigError(f"unknown command {command!r}; allowed: {', '.join(COMMANDS)}")

    sections = {}
    for name, body in data.items():
        if name not in _SCHEMA:
            raise ConfigError(f"unknown section '[{name}]'")
        if not isinstance(body, dict):
            raise ConfigError(f"top-level key '{name}' must be a section")
        sections[name] = _validate_section(name, body)
    for name in _SCHEMA:
        sections.setdefault(name, _validate_section(name, {}))

    model = sections["model"]
    params = PhysParams(alpha=float(model["alpha"]), mu=float(model["mu"]),
                        gamma=float(model["gamma"]), dim=model["dimension"])
    sc = sections["scenario"]
    momentum = sc.get("momentum")
    if momentum is not None:
        momentum = tuple(float(v) for v in momentum)
    scenario = ScenarioSpec(
        name=sc["name"], amplitude=float(sc["amplitude"]),
        velocity_amplitude=sc.get("velocity_amplitude"),
        width=sc.get("width"), mean_a=sc.get("mean_a"),
        momentum=momentum, random_phases=sc["random_phases"])
    # named presets fill prescribed means/momenta unless given explicitly
    if scenario.name == "lower-bound":
        if scenario.mean_a is None:
            scenario = ScenarioSpec(**{**scenario.__dict__, "mean_a": 0.01})
        if scenario.momentum is None:
            scenario = ScenarioSpec(**{**scenario.__dict__, "momentum": "auto"})
    elif scenario.name == "zero-mean":
        if scenario.mean_a is None:
            scenario = ScenarioSpec(**{**scenario.__dict__, "mean_a": 0.0})
        if scenario.momentum is None:
            scenario = ScenarioSpec(**{**scenario.__dict__, "momentum": "zero"})

    st = sections["stepper"]
    stepper = StepperConfig(
        dt=float(st["dt"]), scheme=st["scheme"], dealias=st["dealias"],
        rho_min=st["rho_min"], max_steps=st["max_steps"],
        output_stride=st["output_stride"], cfl_advect=float(st["cfl_advect"]),
        cfl_pressure=float(st["cfl_pressure"]), dt_max=float(st["dt_max"]),
        formulation=st["formulation"], conserve_momentum=st["conserve_momentum"],
        tail_energy_tol=st["tail_energy_tol"])

    if command == "box-sensitivity" and not sections["boxes"].get("lengths"):
        raise ConfigError("command 'box-sensitivity' needs 'boxes.lengths'")
    if command == "sweep":
        if not sections["sweep"].get("key") or sections["sweep"].get("values") is None:
            raise ConfigError("command 'sweep' needs 'sweep.key' and 'sweep.values'")

    return RunConfig(
        command=command,
        params=params,
        grid_points=sections["grid"]["points"],
        box_length=float(sections["grid"]["box_length"]),
        stepper=stepper,
        scenario=scenario,
        seed=sc["seed"],
        t_end=float(sections["run"]["t_end"]),
        fit=sections["fit"],
        output_dir=sections["output"]["dir"],
        sections=sections,
        raw=dict(data, command=command),
    )


def load_config(path: str) -> RunConfig:
    with open(path, "r", encoding="utf-8") as fh:
        return parse_config(fh.read())
