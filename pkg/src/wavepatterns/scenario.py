"""Scenario documents: YAML parsing, validation, overrides and canonical emission.

A scenario fixes the gas, the Riemann data and every numerical setting of a
run. The right state is given in exactly one of three forms:

``z_plus``         explicit ``{v, u, theta}``;
``pure_contact``   ``{v_minus, u, theta_minus, theta_plus}``, which also fixes z-
                   and sets v+ so the pressure is continuous;
``forward``        ``{v_minus_m, theta_plus_m, theta_plus}``, a rarefaction /
                   contact / rarefaction pattern built forward from z-.

The canonical form always carries explicit ``z_minus`` and ``z_plus``, so
emitting and re-parsing a scenario reproduces it exactly.
"""
from dataclasses import asdict, dataclass, field, fields

import numpy as np
import yaml

from .errors import ConfigurationError, DomainError
from .gas import GasParams, ThermoState
from .riemann import build_forward
from .solver import Grid, PerturbationSpec, SolverConfig


@dataclass(frozen=True)
class DiagnosticsConfig:
    """Thresholds of the stability checks and sampling of the profile outputs."""
    delta: float | None = None           # a-priori ratio offset; None -> |theta+ - theta-|
    ratio_bound: float = 50.0
    decay_factor: float = 0.5
    tail: float = 0.25
    slack: float = 0.05
    weighted_check: bool = False
    profile_times: tuple = (1.0, 10.0, 100.0)
    x_min: float = -100.0
    x_max: float = 100.0
    dx: float = 0.1

    def __post_init__(self):
        if self.delta is not None and self.delta < 0:
            raise ConfigurationError("diagnostics.delta must be non-negative")
        if not 0 < self.tail <= 1:
            raise ConfigurationError("diagnostics.tail must lie in (0, 1]")
        if not (self.dx > 0 and self.x_max > self.x_min):
            raise ConfigurationError("diagnostics sampling needs dx > 0 and x_max > x_min")
        if any(t < 0 for t in self.profile_times):
            raise ConfigurationError("diagnostics.profile_times must be non-negative")


@dataclass(frozen=True)
class Scenario:
    name: str
    gas: GasParams
    z_minus: ThermoState
    z_plus: ThermoState
    perturbation: PerturbationSpec = field(default_factory=PerturbationSpec)
    grid: Grid = field(default_factory=Grid)
    solver: SolverConfig = field(default_factory=SolverConfig)
    diagnostics: DiagnosticsConfig = field(default_factory=DiagnosticsConfig)
    output: str = "out"


_SECTIONS = {"gas": GasParams, "perturbation": PerturbationSpec, "grid": Grid,
             "solver": SolverConfig, "diagnostics": DiagnosticsConfig}
_TUPLE_KEYS = {"amplitudes", "profile_times"}
_TOP_KEYS = {"name", "output", "z_minus", "z_plus", "pure_contact", "forward", *_SECTIONS}
_STATE_KEYS = ("v", "u", "theta")


def _known(section, keys, allowed):
    unknown = sorted(set(keys) - set(allowed))
    if unknown:
        where = f"{section}." if section else ""
        raise ConfigurationError(f"unknown key {where}{unknown[0]}")


def _mapping(doc, key):
    val = doc.get(key, {})
    if val is None:
        return {}
    if not isinstance(val, dict):
        raise ConfigurationError(f"{key} must be a mapping")
    return val


def _number(section, key, val):
    if isinstance(val, str):
        try:                             # YAML 1.1 reads "1e-6" (no dot) as a string
            val = float(val)
        except ValueError:
            pass
    if isinstance(val, bool) or not isinstance(val, (int, float)):
        raise ConfigurationError(f"{section}.{key} must be a number, got {val!r}")
    return float(val)


def _state(doc, section):
    d = _mapping(doc, section)
    _known(section, d, _STATE_KEYS)
    missing = [k for k in _STATE_KEYS if k not in d]
    if missing:
        raise ConfigurationError(f"{section}.{missing[0]} is required")
    vals = {k: _number(section, k, d[k]) for k in _STATE_KEYS}
    for k in ("v", "theta"):
        if not vals[k] > 0:
            raise ConfigurationError(f"{section}.{k} must be positive, got {vals[k]!r}")
    return ThermoState(**vals)


def _section(doc, key, cls):
    d = _mapping(doc, key)
    defaults = {f.name: f.default for f in fields(cls)}
    _known(key, d, defaults)
    kw = {}
    for k, v in d.items():
        ref = defaults[k]
        if k in _TUPLE_KEYS and isinstance(v, list):
            v = tuple(v)
        elif isinstance(ref, bool):
            if not isinstance(v, bool):
                raise ConfigurationError(f"{key}.{k} must be true or false, got {v!r}")
        elif isinstance(ref, int):
            if isinstance(v, float) and v.is_integer():
                v = int(v)
            if isinstance(v, bool) or not isinstance(v, int):
                raise ConfigurationError(f"{key}.{k} must be an integer, got {v!r}")
        elif isinstance(ref, float) or (ref is None and v is not None):
            v = _number(key, k, v)
        kw[k] = v
    try:
        return cls(**kw)
    except (ConfigurationError, DomainError, TypeError) as exc:
        raise ConfigurationError(f"{key}: {exc}") from exc


def _right_state(doc, gas, z_minus):
    forms = [k for k in ("z_plus", "pure_contact", "forward") if k in doc]
    if len(forms) != 1:
        raise ConfigurationError("give exactly one of z_plus, pure_contact, forward "
                                 f"(found {forms or 'none'})")
    form = forms[0]
    if form == "z_plus":
        return z_minus, _state(doc, "z_plus")
    if form == "pure_contact":
        d = _mapping(doc, form)
        keys = ("v_minus", "u", "theta_minus", "theta_plus")
        _known(form, d, keys)
        if "z_minus" in doc:
            raise ConfigurationError("pure_contact already fixes z_minus; drop the z_minus section")
        vals = {k: _number(form, k, d.get(k, 0.0 if k == "u" else None)) for k in keys}
        for k in ("v_minus", "theta_minus", "theta_plus"):
            if not vals[k] > 0:
                raise ConfigurationError(f"pure_contact.{k} must be positive, got {vals[k]!r}")
        zl = ThermoState(vals["v_minus"], vals["u"], vals["theta_minus"])
        zr = ThermoState(vals["v_minus"] * vals["theta_plus"] / vals["theta_minus"], vals["u"],
                         vals["theta_plus"])
        return zl, zr
    d = _mapping(doc, form)
    keys = ("v_minus_m", "theta_plus_m", "theta_plus")
    _known(form, d, keys)
    vals = {k: _number(form, k, d.get(k)) for k in keys}
    pat = build_forward(gas, z_minus, vals["v_minus_m"], vals["theta_plus_m"], vals["theta_plus"])
    return z_minus, pat.z_plus


def scenario_from_dict(doc):
    if not isinstance(doc, dict):
        raise ConfigurationError("scenario document must be a mapping")
    _known("", doc, _TOP_KEYS)
    secs = {k: _section(doc, k, cls) for k, cls in _SECTIONS.items()}
    if "pure_contact" in doc:
        z_minus = None
    else:
        z_minus = _state(doc, "z_minus")
    try:
        z_minus, z_plus = _right_state(doc, secs["gas"], z_minus)
    except DomainError as exc:
        raise ConfigurationError(str(exc)) from exc
    name = str(doc.get("name", "scenario"))
    output = str(doc.get("output", f"out/{name}"))
    return Scenario(name=name, z_minus=z_minus, z_plus=z_plus, output=output, **secs)


def _safe_load(text):
    try:
        return yaml.safe_load(text)
    except yaml.YAMLError as exc:
        mark = getattr(exc, "problem_mark", None)
        where = f" at line {mark.line + 1}, column {mark.column + 1}" if mark else ""
        raise ConfigurationError(f"scenario parse error{where}: "
                                 f"{getattr(exc, 'problem', None) or exc}") from exc


def parse_scenario(text):
    """Validated Scenario from YAML text; errors carry the line or the key."""
    return scenario_from_dict(_safe_load(text))


def load_scenario(path, overrides=()):
    with open(path, encoding="utf-8") as fh:
        doc = _safe_load(fh.read())
    return scenario_from_dict(apply_overrides(doc, overrides))


def apply_overrides(doc, overrides):
    """Apply ``section.key=value`` strings; values are parsed as YAML scalars."""
    doc = dict(doc or {})
    for item in overrides:
        if "=" not in item:
            raise ConfigurationError(f"override {item!r} is not of the form key=value")
        path, raw = item.split("=", 1)
        keys = path.strip().split(".")
        try:
            value = yaml.safe_load(raw)
        except yaml.YAMLError as exc:
            raise ConfigurationError(f"override {item!r}: cannot parse value") from exc
        node = doc
        for k in keys[:-1]:
            sub = node.get(k)
            node[k] = dict(sub) if isinstance(sub, dict) else {}
            node = node[k]
        node[keys[-1]] = value
    return doc


def to_dict(scenario):
    """Canonical plain-data form (explicit end states, lists for tuples)."""
    out = {"name": scenario.name, "output": scenario.output,
           "z_minus": asdict(scenario.z_minus), "z_plus": asdict(scenario.z_plus)}
    for key in _SECTIONS:
        sec = asdict(getattr(scenario, key))
        out[key] = {k: list(v) if isinstance(v, tuple) else v for k, v in sec.items()}
    return out


def emit_scenario(scenario):
    return yaml.safe_dump(to_dict(scenario), sort_keys=True, default_flow_style=False)


def with_overrides(scenario, overrides):
    return scenario_from_dict(apply_overrides(to_dict(scenario), overrides))


def resolved_delta(scenario):
    d = scenario.diagnostics.delta
    return abs(scenario.z_plus.theta - scenario.z_minus.theta) if d is None else d


def sample_grid(scenario):
    d = scenario.diagnostics
    n = int(round((d.x_max - d.x_min) / d.dx))
    return d.x_min + d.dx * np.arange(n + 1)

