"""Plain-text key/value scenario configuration.

One ``key = value`` pair per line; full-line ``#`` comments document units.
Unknown keys are rejected so typos fail loudly. Vector values are three
whitespace-separated numbers. Relative mesh paths resolve against the config
file's directory; the log path is kept as written (resolved by the caller).
"""

from __future__ import annotations

import os
from dataclasses import dataclass

import numpy as np

from .control import Gains
from .geometry import InspectionRegion
from .sim import Scenario

__all__ = ["ConfigError", "parse_config", "parse_config_text",
           "emit_config", "apply_overrides"]


class ConfigError(ValueError):
    """Bad configuration: unknown key, missing key, or malformed value."""


@dataclass(frozen=True)
class _Key:
    name: str
    kind: str          # "scalar" | "int" | "vec3" | "path" | "str"
    unit: str
    required: bool = True
    default: str | None = None


_KEYS = [
    _Key("region_min", "vec3", "m, lower corner of the flight region"),
    _Key("region_max", "vec3", "m, upper corner of the flight region"),
    _Key("mesh", "path", "object mesh file (v/f text format)"),
    _Key("d_proj", "scalar", "m, outward standoff of projected target points",
         required=False, default="15"),
    _Key("agents", "int", "number of agents (start_1..start_N required)"),
    _Key("k_p", "scalar", "proportional gain on the centroid drive"),
    _Key("k_d", "scalar", "derivative (damping) gain"),
    _Key("mu_o", "scalar", "repulsive gain"),
    _Key("d_o", "scalar", "m, safety distance around raw target points"),
    _Key("r", "scalar", "m, sensing range around projected target points"),
    _Key("eps", "scalar", "barrier-energy gain (monitor only)",
         required=False, default=None),
    _Key("alpha", "scalar", "density peak weight per target"),
    _Key("beta", "scalar", "1/m^2, density falloff rate"),
    _Key("dt", "scalar", "s, integration step", required=False, default="0.05"),
    _Key("t_max", "scalar", "s, simulated-time budget", required=False, default="300"),
    _Key("grid_h", "scalar", "m, quadrature lattice spacing", required=False, default="2"),
    _Key("u_max", "scalar", "m/s^2, per-axis acceleration bound",
         required=False, default="20"),
    _Key("v_max", "scalar", "m/s, speed cap ('none' disables)",
         required=False, default="none"),
    _Key("log", "path", "round log output (JSON lines)",
         required=False, default="run.jsonl"),
]
_KEY_MAP = {k.name: k for k in _KEYS}


def _parse_lines(text: str, name: str) -> dict[str, str]:
    values: dict[str, str] = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if "=" not in line:
            raise ConfigError(f"{name}:{lineno}: expected 'key = value'")
        key, _, value = line.partition("=")
        key = key.strip()
        value = value.strip()
        if not _known_key(key):
            raise ConfigError(f"{name}:{lineno}: unknown key {key!r}")
        if key in values:
            raise ConfigError(f"{name}:{lineno}: duplicate key {key!r}")
        if not value:
            raise ConfigError(f"{name}:{lineno}: empty value for {key!r}")
        values[key] = value
    return values


def _known_key(key: str) -> bool:
    if key in _KEY_MAP:
        return True
    if key.startswith("start_"):
        tail = key[len("start_"):]
        return tail.isdigit() and int(tail) >= 1
    return False


def apply_overrides(values: dict[str, str], overrides: list[str]) -> dict[str, str]:
    """Apply ``key=value`` strings on top of file values (highest precedence)."""
    out = dict(values)
    for item in overrides:
        if "=" not in item:
            raise ConfigError(f"override {item!r} is not of the form key=value")
        key, _, value = item.partition("=")
        key = key.strip()
        if not _known_key(key):
            raise ConfigError(f"override: unknown key {key!r}")
        out[key] = value.strip()
    return out


def _scalar(values: dict[str, str], key: str) -> float:
    try:
        return float(values[key])
    except ValueError as exc:
        raise ConfigError(f"key {key!r}: not a number: {values[key]!r}") from exc


def _vec3(values: dict[str, str], key: str) -> np.ndarray:
    parts = values[key].split()
    if len(parts) != 3:
        raise ConfigError(f"key {key!r}: expected 3 numbers")
    try:
        return np.array([float(p) for p in parts])
    except ValueError as exc:
        raise ConfigError(f"key {key!r}: not a number in {values[key]!r}") from exc


def build_scenario(values: dict[str, str], base_dir: str) -> Scenario:
    """Type-check a raw key/value mapping and assemble the scenario."""
    values = dict(values)
    for key in _KEYS:
        if key.name not in values:
            if key.required:
                raise ConfigError(f"missing required key {key.name!r}")
            if key.default is not None:
                values[key.name] = key.default

    try:
        n = int(values["agents"])
    except ValueError as exc:
        raise ConfigError(f"key 'agents': not an integer: {values['agents']!r}") from exc
    if n < 1:
        raise ConfigError("key 'agents': need at least one agent")
    starts = []
    for i in range(1, n + 1):
        key = f"start_{i}"
        if key not in values:
            raise ConfigError(f"missing required key {key!r} (agents = {n})")
        starts.append(_vec3(values, key))
    extra = [k for k in values if k.startswith("start_") and int(k[6:]) > n]
    if extra:
        raise ConfigError(f"start positions beyond agent count: {sorted(extra)}")

    region = InspectionRegion(_vec3(values, "region_min"), _vec3(values, "region_max"))
    mesh_path = values["mesh"]
    if not os.path.isabs(mesh_path):
        mesh_path = os.path.normpath(os.path.join(base_dir, mesh_path))

    eps = _scalar(values, "eps") if "eps" in values else None
    try:
        gains = Gains(k_p=_scalar(values, "k_p"), k_d=_scalar(values, "k_d"),
                      mu_o=_scalar(values, "mu_o"), d_o=_scalar(values, "d_o"),
                      r=_scalar(values, "r"), eps=eps)
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc

    return Scenario(
        region=region,
        mesh_path=mesh_path,
        d_proj=_scalar(values, "d_proj"),
        n_agents=n,
        starts=np.array(starts),
        gains=gains,
        alpha=_scalar(values, "alpha"),
        beta=_scalar(values, "beta"),
        dt=_scalar(values, "dt"),
        t_max=_scalar(values, "t_max"),
        grid_h=_scalar(values, "grid_h"),
        u_max=_scalar(values, "u_max"),
        v_max=None if values["v_max"].lower() == "none" else _scalar(values, "v_max"),
        log_path=values["log"],
    )


def parse_config_text(text: str, base_dir: str = ".",
                      overrides: list[str] | None = None,
                      name: str = "<config>") -> Scenario:
    values = _parse_lines(text, name)
    if overrides:
        values = apply_overrides(values, overrides)
    return build_scenario(values, base_dir)


def parse_config(path, overrides: list[str] | None = None) -> Scenario:
    with open(path, "r", encoding="utf-8") as fh:
        text = fh.read()
    return parse_config_text(text, base_dir=os.path.dirname(os.path.abspath(path)),
                             overrides=overrides, name=str(path))


def _fmt(x: float) -> str:
    return repr(float(x))


def emit_config(scenario: Scenario) -> str:
    """Render a scenario back to config text (units in comments).

    parse(emit(s)) == s when paths are absolute (relative paths re-resolve
    against the new config location).
    """
    g = scenario.gains
    lines = []

    def put(key: str, value: str):
        lines.append(f"# {_KEY_MAP[key].unit}" if key in _KEY_MAP else "#")
        lines.append(f"{key} = {value}")

    put("region_min", " ".join(_fmt(v) for v in scenario.region.lo))
    put("region_max", " ".join(_fmt(v) for v in scenario.region.hi))
    put("mesh", scenario.mesh_path)
    put("d_proj", _fmt(scenario.d_proj))
    put("agents", str(scenario.n_agents))
    for i in range(scenario.n_agents):
        lines.append(f"# m, initial position of agent {i + 1}")
        lines.append(f"start_{i + 1} = " + " ".join(_fmt(v) for v in scenario.starts[i]))
    put("k_p", _fmt(g.k_p))
    put("k_d", _fmt(g.k_d))
    put("mu_o", _fmt(g.mu_o))
    put("d_o", _fmt(g.d_o))
    put("r", _fmt(g.r))
    put("eps", _fmt(g.eps))
    put("alpha", _fmt(scenario.alpha))
    put("beta", _fmt(scenario.beta))
    put("dt", _fmt(scenario.dt))
    put("t_max", _fmt(scenario.t_max))
    put("grid_h", _fmt(scenario.grid_h))
    put("u_max", _fmt(scenario.u_max))
    put("v_max", "none" if scenario.v_max is None else _fmt(scenario.v_max))
    put("log", scenario.log_path)
    return "\n".join(lines) + "\n"
