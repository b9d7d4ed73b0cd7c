"""Scenario configuration: one flat TOML file drives every command.

Sections mirror the physics modules ([slab], [top], [probe], [interaction],
[exact]) plus run plumbing ([run], [montecarlo]).  The built-in default
scenario is the quartz micro-top worked example: a 4 x 2 x 4 um oblate
ellipsoid of density 2650 kg/m^3 spinning at 1 Hz, probed through a 2 um
path at 600 nm with 7.9e10 photons.

Loading validates everything against the module constructors and reports
failures with dotted field paths; load -> dumps -> load is an exact
round-trip (floats are emitted with shortest round-trip precision).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Any

import tomli

from .errors import ConfigError
from .jones_optics import BirefringentSlab, ProbeLight
from .rigid_top import SymmetricTop

_SCHEMA: dict[str, dict[str, type]] = {
    "slab": {"n_e": float, "n_o": float, "length": float},
    "top": {"density": float, "semi_axis_x": float, "semi_axis_y": float,
            "semi_axis_z": float, "spin_rate_hz": float},
    "probe": {"wavelength": float, "photons": float},
    "interaction": {"tau": float, "misalignment": float},
    "exact": {"n_max": int, "j": float, "dim_cap": int},
    "run": {"seed": int, "out_dir": str},
    "montecarlo": {"shots": int, "signal_scale": float},
}

_DEFAULTS: dict[str, dict[str, Any]] = {
    "slab": {"n_e": 1.553, "n_o": 1.544, "length": 2e-6},
    "top": {"density": 2650.0, "semi_axis_x": 2e-6, "semi_axis_y": 1e-6,
            "semi_axis_z": 2e-6, "spin_rate_hz": 1.0},
    "probe": {"wavelength": 600e-9, "photons": 7.9e10},
    "interaction": {"tau": 1e-3, "misalignment": 0.0},
    "exact": {"n_max": 3, "j": 4.0, "dim_cap": 4096},
    "run": {"seed": 42, "out_dir": "out"},
    "montecarlo": {"shots": 100_000, "signal_scale": 1.0},
}


@dataclass(frozen=True)
class Scenario:
    """Validated, immutable bundle of everything one run needs."""

    slab: BirefringentSlab
    top: SymmetricTop
    wavelength: float
    photons: float
    tau: float
    misalignment: float
    n_max: int
    j: float
    dim_cap: int
    seed: int
    out_dir: str
    shots: int
    signal_scale: float

    @property
    def spin_rate_hz(self) -> float:
        return self.top.spin_rate / (2.0 * math.pi)

    def probe(self) -> ProbeLight:
        return ProbeLight.x_polarized(self.photons, self.wavelength)

    def to_dict(self) -> dict[str, dict[str, Any]]:
        """Nested dict mirroring the TOML sections (exact round-trip)."""
        return {
            "slab": {"n_e": self.slab.n_e, "n_o": self.slab.n_o,
                     "length": self.slab.length},
            "top": {"density": self.top.density,
                    "semi_axis_x": self.top.semi_axis_x,
                    "semi_axis_y": self.top.semi_axis_y,
                    "semi_axis_z": self.top.semi_axis_z,
                    "spin_rate_hz": self.top.spin_rate / (2.0 * math.pi)},
            "probe": {"wavelength": self.wavelength, "photons": self.photons},
            "interaction": {"tau": self.tau, "misalignment": self.misalignment},
            "exact": {"n_max": self.n_max, "j": self.j, "dim_cap": self.dim_cap},
            "run": {"seed": self.seed, "out_dir": self.out_dir},
            "montecarlo": {"shots": self.shots, "signal_scale": self.signal_scale},
        }


def _coerce(section: str, key: str, value: Any, want: type) -> Any:
    if want is float:
        if isinstance(value, bool) or not isinstance(value, (int, float)):
            raise ConfigError(f"{section}.{key}: expected a number, got {value!r}")
        return float(value)
    if want is int:
        if isinstance(value, bool) or not isinstance(value, int):
            raise ConfigError(f"{section}.{key}: expected an integer, got {value!r}")
        return int(value)
    if want is str:
        if not isinstance(value, str):
            raise ConfigError(f"{section}.{key}: expected a string, got {value!r}")
        return value
    raise AssertionError(want)


def _merged(data: dict[str, Any]) -> dict[str, dict[str, Any]]:
    merged = {sec: dict(vals) for sec, vals in _DEFAULTS.items()}
    for section, values in data.items():
        if section not in _SCHEMA:
            raise ConfigError(f"{section}: unknown section "
                              f"(expected one of {', '.join(_SCHEMA)})")
        if not isinstance(values, dict):
            raise ConfigError(f"{section}: expected a table of key = value pairs")
        for key, value in values.items():
            if key not in _SCHEMA[section]:
                raise ConfigError(f"{section}.{key}: unknown key "
                                  f"(expected one of {', '.join(_SCHEMA[section])})")
            merged[section][key] = _coerce(section, key, value, _SCHEMA[section][key])
    return merged


def scenario_from_dict(data: dict[str, Any]) -> Scenario:
    """Build and validate a scenario from a nested (TOML-shaped) dict."""
    merged = _merged(data)
    try:
        slab = BirefringentSlab(n_e=merged["slab"]["n_e"],
                                n_o=merged["slab"]["n_o"],
                                length=merged["slab"]["length"])
    except Exception as exc:
        raise ConfigError(f"slab: {exc}") from exc
    try:
        top = SymmetricTop(density=merged["top"]["density"],
                           semi_axis_x=merged["top"]["semi_axis_x"],
                           semi_axis_y=merged["top"]["semi_axis_y"],
                           semi_axis_z=merged["top"]["semi_axis_z"],
                           spin_rate=2.0 * math.pi * merged["top"]["spin_rate_hz"])
    except Exception as exc:
        raise ConfigError(f"top: {exc}") from exc
    probe, inter, exact = merged["probe"], merged["interaction"], merged["exact"]
    run, mc = merged["run"], merged["montecarlo"]
    if probe["wavelength"] <= 0:
        raise ConfigError(f"probe.wavelength: must be positive, got {probe['wavelength']}")
    if probe["photons"] <= 0:
        raise ConfigError(f"probe.photons: must be positive, got {probe['photons']}")
    if inter["tau"] <= 0:
        raise ConfigError(f"interaction.tau: must be positive, got {inter['tau']}")
    if exact["n_max"] < 1:
        raise ConfigError(f"exact.n_max: must be >= 1, got {exact['n_max']}")
    if exact["j"] <= 0 or abs(exact["j"] * 2 - round(exact["j"] * 2)) > 1e-12:
        raise ConfigError(f"exact.j: must be a positive half-integer, got {exact['j']}")
    if exact["dim_cap"] < 1:
        raise ConfigError(f"exact.dim_cap: must be >= 1, got {exact['dim_cap']}")
    if run["seed"] < 0:
        raise ConfigError(f"run.seed: must be >= 0, got {run['seed']}")
    if mc["shots"] < 1:
        raise ConfigError(f"montecarlo.shots: must be >= 1, got {mc['shots']}")
    if mc["signal_scale"] < 0:
        raise ConfigError(f"montecarlo.signal_scale: must be >= 0, got {mc['signal_scale']}")
    return Scenario(
        slab=slab, top=top,
        wavelength=probe["wavelength"], photons=probe["photons"],
        tau=inter["tau"], misalignment=inter["misalignment"],
        n_max=exact["n_max"], j=exact["j"], dim_cap=exact["dim_cap"],
        seed=run["seed"], out_dir=run["out_dir"],
        shots=mc["shots"], signal_scale=mc["signal_scale"],
    )


def paper_quartz() -> Scenario:
    """The bundled default scenario (quartz micro-top worked example)."""
    return scenario_from_dict({})


def loads(text: str) -> Scenario:
    try:
        data = tomli.loads(text)
    except tomli.TOMLDecodeError as exc:
        raise ConfigError(f"config parse error: {exc}") from exc
    return scenario_from_dict(data)


def load(path) -> Scenario:
    try:
        with open(path, "rb") as fh:
            data = tomli.load(fh)
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    except tomli.TOMLDecodeError as exc:
        raise ConfigError(f"{path}: config parse error: {exc}") from exc
    return scenario_from_dict(data)


def _toml_scalar(value: Any) -> str:
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, int):
        return str(value)
    if isinstance(value, float):
        if value != value or value in (float("inf"), float("-inf")):
            raise ConfigError(f"cannot serialize non-finite float {value!r}")
        text = repr(value)
        return text if ("." in text or "e" in text or "E" in text) else text + ".0"
    if isinstance(value, str):
        escaped = value.replace("\\", "\\\\").replace('"', '\\"')
        return f'"{escaped}"'
    raise ConfigError(f"cannot serialize {type(value).__name__} to TOML")


def dumps(scenario: Scenario) -> str:
    """Serialize a scenario to TOML; loads(dumps(s)) == s exactly."""
    parts = []
    for section, values in scenario.to_dict().items():
        parts.append(f"[{section}]")
        for key, value in values.items():
            parts.append(f"{key} = {_toml_scalar(value)}")
        parts.append("")
    return "\n".join(parts)


def parse_override(text: str) -> tuple[str, str, Any]:
    """Parse one ``section.key=value`` override (TOML scalar syntax)."""
    head, sep, raw = text.partition("=")
    if not sep:
        raise ConfigError(f"override {text!r}: expected section.key=value")
    dotted = head.strip()
    section, dot, key = dotted.partition(".")
    if not dot or not section or not key:
        raise ConfigError(f"override {dotted!r}: expected a section.key path")
    try:
        value = tomli.loads(f"v = {raw.strip()}")["v"]
    except tomli.TOMLDecodeError:
        # bare words read as strings so paths need no extra quoting
        value = raw.strip()
    return section, key, value


def apply_overrides(scenario: Scenario, overrides) -> Scenario:
    """Return a new validated scenario with dotted overrides applied."""
    data = scenario.to_dict()
    for text in overrides:
        section, key, value = parse_override(text)
        if section not in _SCHEMA:
            raise ConfigError(f"override {section}.{key}: unknown section")
        if key not in _SCHEMA[section]:
            raise ConfigError(f"override {section}.{key}: unknown key")
        data[section][key] = value
    return scenario_from_dict(data)
