"""Scenario configuration: YAML parsing, schema validation, typed config objects.

A user file is merged over the packaged defaults, so it only needs the keys it
changes plus ``scenario`` and ``seed``. All schema violations are collected
and reported together.
"""

from __future__ import annotations

import copy
import hashlib
import json
from dataclasses import dataclass
from importlib import resources
from typing import Any, Optional

import jsonschema
import numpy as np
import yaml

from .capacity import ChannelModel
from .chaos import DuffingParams, LyapunovSettings, NONLINEARITIES, OscState, RegimeThresholds
from .fock import AVERAGING_MODES, SimConfig

SCHEMA_VERSION = 1
SCENARIOS = ("chaos", "sync", "spectrum", "fidelity-sweep", "p0-sweep", "capacity")


class ConfigError(ValueError):
    """Invalid configuration; ``errors`` lists every violation found."""

    def __init__(self, errors: list[str]):
        self.errors = list(errors)
        super().__init__("invalid configuration:\n  " + "\n  ".join(self.errors))


def _num(minimum=None, exclusive=None, **kw):
    s = {"type": "number"}
    if minimum is not None:
        s["minimum"] = minimum
    if exclusive is not None:
        s["exclusiveMinimum"] = exclusive
    s.update(kw)
    return s


def _int(minimum=None):
    s = {"type": "integer"}
    if minimum is not None:
        s["minimum"] = minimum
    return s


def _obj(props, required=()):
    return {"type": "object", "properties": props, "required": list(required),
            "additionalProperties": False}


_PAIR = {"type": "array", "items": {"type": "number"}, "minItems": 2, "maxItems": 2}
_SWEEP = _obj({"parameter": {"type": "string"}, "start": _num(), "stop": _num(),
               "steps": _int(1)}, ("parameter", "start", "stop", "steps"))
_GRID = _obj({"start": _num(), "stop": _num(), "steps": _int(1)}, ("start", "stop", "steps"))

SCHEMA = _obj({
    "schema_version": {"const": SCHEMA_VERSION},
    "scenario": {"enum": list(SCENARIOS)},
    "seed": {"type": "integer", "minimum": 0},
    "output": {"type": "string"},
    "duffing": _obj({
        "omega0": _num(exclusive=0), "mu": _num(0), "gamma": _num(0), "f_d": _num(0),
        "omega_d": _num(exclusive=0), "k_I": _num(0), "g_fo": _num(0),
        "nonlinearity": {"enum": sorted(NONLINEARITIES)},
    }),
    "integration": _obj({"dt": _num(exclusive=0), "transient_periods": _num(0),
                         "bound": _num(exclusive=0), "output_stride": _int(1)}),
    "initial_states": _obj({k: _PAIR for k in "abcd"}),
    "lyapunov": _obj({"transient": _num(0), "renorm_interval": _num(exclusive=0),
                      "horizon": _num(exclusive=0), "tail_fraction": _num(exclusive=0, maximum=1),
                      "rel_tol": _num(exclusive=0)}),
    "regimes": _obj({"lambda0": _num(), "M_h": _num(exclusive=0, maximum=1)}),
    "chaos": _obj({"horizon_periods": _num(exclusive=0)}),
    "sync": _obj({"horizon_periods": _num(exclusive=0), "one_way": {"type": "boolean"}}),
    "spectrum": _obj({"horizon_periods": _num(exclusive=0), "segments": _int(1),
                      "window": {"type": "string"}}),
    "sim": _obj({
        "dim": _int(3), "n_samples": _int(1), "decorrelation_gap": _num(exclusive=0),
        "out_dim": _int(3), "mid_dim": _int(3), "max_leakage": _num(exclusive=0, maximum=1),
        "averaging": {"enum": list(AVERAGING_MODES)}, "gain": _num(1),
        "p0": _num(0, maximum=1), "receiver_sync": {"enum": ["perfect", "coupled"]},
    }),
    "channel": _obj({
        "eta": _num(0, maximum=1), "n_mean": _num(0), "N": _int(1),
        "M": _num(exclusive=0, maximum=1), "bw_ratio": _num(exclusive=0), "gain": _num(1),
        "amp_floor": _num(0), "split_energy": {"type": "boolean"},
        "profile": {"enum": ["lorentzian", "gaussian"]},
    }),
    "sweeps": _obj({"fidelity-sweep": _SWEEP, "p0-sweep": _SWEEP}),
    "capacity": _obj({"N_values": {"type": "array", "items": _int(1), "minItems": 1},
                      "eta": _GRID}),
}, required=("scenario", "seed"))


def default_text() -> str:
    return resources.files("qcdma").joinpath("data/defaults.yaml").read_text()


def default_dict() -> dict:
    return yaml.safe_load(default_text())


def parse_yaml(text: str) -> Any:
    """YAML load that reports the line and column of syntax errors."""
    try:
        return yaml.safe_load(text)
    except yaml.YAMLError as exc:
        mark = getattr(exc, "problem_mark", None)
        where = f"line {mark.line + 1}, column {mark.column + 1}: " if mark is not None else ""
        problem = getattr(exc, "problem", None) or str(exc)
        raise ConfigError([f"parse error at {where}{problem}"]) from None


def _merge(base: dict, over: dict) -> dict:
    out = copy.deepcopy(base)
    for k, v in over.items():
        if isinstance(v, dict) and isinstance(out.get(k), dict):
            out[k] = _merge(out[k], v)
        else:
            out[k] = copy.deepcopy(v)
    return out


def _path(err) -> str:
    return ".".join(str(p) for p in err.absolute_path) or "<root>"


def schema_errors(doc: Any) -> list[str]:
    v = jsonschema.Draft202012Validator(SCHEMA)
    errs = sorted(v.iter_errors(doc), key=lambda e: (list(map(str, e.absolute_path)), e.message))
    return [f"{_path(e)}: {e.message}" for e in errs]


@dataclass(frozen=True)
class ScenarioConfig:
    scenario: str
    seed: int
    raw: dict
    duffing: DuffingParams
    sim: SimConfig
    channel: ChannelModel
    lyapunov: LyapunovSettings
    thresholds: RegimeThresholds
    output: Optional[str] = None

    def block(self, name: str) -> dict:
        return self.raw[name]

    def init(self, key: str) -> OscState:
        x, p = self.raw["initial_states"][key]
        return OscState(float(x), float(p))

    @property
    def dt(self) -> float:
        return float(self.raw["integration"]["dt"])

    @property
    def bound(self) -> float:
        return float(self.raw["integration"]["bound"])

    def sweep(self, name: str) -> np.ndarray:
        s = self.raw["sweeps"][name]
        return np.linspace(s["start"], s["stop"], s["steps"])

    def digest(self) -> str:
        """sha256 of the canonical JSON form of the merged configuration."""
        blob = json.dumps(self.raw, sort_keys=True, separators=(",", ":")).encode()
        return hashlib.sha256(blob).hexdigest()


def _build(doc: dict) -> ScenarioConfig:
    d, s, c, ly, integ = doc["duffing"], doc["sim"], doc["channel"], doc["lyapunov"], doc["integration"]
    sim_keys = ("dim", "n_samples", "decorrelation_gap", "out_dim", "mid_dim", "max_leakage",
                "averaging", "gain")
    return ScenarioConfig(
        scenario=doc["scenario"],
        seed=int(doc["seed"]),
        raw=doc,
        duffing=DuffingParams(**d),
        sim=SimConfig(seed=int(doc["seed"]), **{k: s[k] for k in sim_keys if k in s}),
        channel=ChannelModel(**c),
        lyapunov=LyapunovSettings(dt=float(integ["dt"]), bound=float(integ["bound"]), **ly),
        thresholds=RegimeThresholds(**doc["regimes"]),
        output=doc.get("output"),
    )


def validate_config(raw: Any, overrides: Optional[dict] = None) -> ScenarioConfig:
    """Validate YAML text (or an already parsed mapping) merged over the defaults.

    ``overrides`` (e.g. scenario and seed from the command line) win over the file.
    Raises ConfigError listing every violation.
    """
    doc = parse_yaml(raw) if isinstance(raw, str) else raw
    if doc is None:
        doc = {}
    if not isinstance(doc, dict):
        raise ConfigError([f"<root>: expected a mapping, got {type(doc).__name__}"])
    doc = _merge(doc, overrides or {})
    errors = schema_errors(doc)
    if errors:
        raise ConfigError(errors)
    merged = _merge(default_dict(), doc)
    errors = schema_errors(merged)
    try:
        cfg = _build(merged) if not errors else None
    except ValueError as exc:
        errors.append(str(exc))
    if errors:
        raise ConfigError(errors)
    return cfg
