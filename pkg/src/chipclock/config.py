"""Run-configuration files (TOML).

Every physical quantity carries its unit in the key name (``temperature_uK``,
``omega_x_hz``, ``ramsey_time_s``). Unknown keys are errors, reported with
their dotted location, e.g. ``clockloop.readout.recool_time``.
"""

from __future__ import annotations

import sys
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path

if sys.version_info >= (3, 11):
    import tomllib
else:
    import tomli as tomllib

from .clock import ClockLoopConfig, ReadoutModel
from .noise import LoNoiseSpec
from .shifts import Ensemble, TrapConfig
from .species import RB87, ClockSpecies, species_from_mapping


class ConfigError(ValueError):
    pass


def read_toml(path: str | Path) -> dict:
    try:
        with open(path, "rb") as fh:
            return tomllib.load(fh)
    except FileNotFoundError:
        raise ConfigError(f"{path}: no such file") from None
    except tomllib.TOMLDecodeError as exc:
        raise ConfigError(f"{path}: {exc}") from None


def default_config_text() -> str:
    return resources.files("chipclock").joinpath("data/default.toml").read_text()


@dataclass
class RunConfig:
    species: ClockSpecies = RB87
    trap: TrapConfig | None = None
    atom_count: int | None = None
    temperature: float | None = None  # K
    relative_atom_number_uncertainty: float = 0.05
    clock: ClockLoopConfig | None = None
    taus: list[float] = field(default_factory=list)
    output: str | None = None
    seed: int = 0
    source: str = "<default>"

    @property
    def ensemble(self) -> Ensemble | None:
        if self.atom_count is None or self.temperature is None:
            return None
        return Ensemble(self.atom_count, self.temperature)


def _number(where, v):
    if isinstance(v, bool) or not isinstance(v, (int, float)):
        raise ConfigError(f"{where}: expected a number, got {v!r}")
    return float(v)


def _integer(where, v):
    if isinstance(v, bool) or not isinstance(v, (int, float)) or v != int(v):
        raise ConfigError(f"{where}: expected an integer, got {v!r}")
    return int(v)


def _boolean(where, v):
    if not isinstance(v, bool):
        raise ConfigError(f"{where}: expected true/false, got {v!r}")
    return v


def _string(where, v):
    if not isinstance(v, str):
        raise ConfigError(f"{where}: expected a string, got {v!r}")
    return v


def _number_list(where, v):
    if not isinstance(v, list):
        raise ConfigError(f"{where}: expected a list of numbers")
    return [_number(f"{where}[{i}]", x) for i, x in enumerate(v)]


def _take(table: dict, where: str, schema: dict, subtables=()) -> dict:
    """Validate ``table`` against ``schema`` (key -> parser); returns parsed values."""
    if not isinstance(table, dict):
        raise ConfigError(f"{where}: expected a table")
    out = {}
    for key, val in table.items():
        loc = f"{where}.{key}" if where else key
        if key in subtables:
            continue
        if key not in schema:
            raise ConfigError(f"{loc}: unknown key")
        out[key] = schema[key](loc, val)
    return out


_TOP = {"seed": _integer}
_TOP_TABLES = ("species", "trap", "ensemble", "clockloop", "output")
_TRAP = {"omega_x_hz": _number, "omega_y_hz": _number, "omega_z_hz": _number, "B_min_G": _number}
_ENSEMBLE = {
    "atom_count": _integer,
    "temperature_uK": _number,
    "relative_atom_number_uncertainty": _number,
}
_CLOCK = {
    "atom_count": _number,
    "ramsey_time_s": _number,
    "cycle_time_s": _number,
    "contrast": _number,
    "squeezing_xi": _number,
    "servo_gain": _number,
    "zeeman_shift_rms_hz": _number,
    "n_cycles": _integer,
    "lo_dt_s": _number,
    "lo_initial_offset": _number,
    "probe_phase_rad": _number,
    "alternate_sides": _boolean,
    "divergence_cycles": _integer,
    "taus_s": _number_list,
}
_LO = {
    "white_fm_h0_per_hz": _number,
    "flicker_fm_hm1": _number,
    "rw_fm_hm2_hz": _number,
    "linear_drift_per_s": _number,
}
_READOUT = {
    "mode": _string,
    "detection_noise_atoms": _number,
    "retention_fraction": _number,
    "recool_time_s": _number,
    "reload_time_s": _number,
    "reload_threshold_fraction": _number,
}
_OUTPUT = {"path": _string}


def _build(where, factory, **kwargs):
    try:
        return factory(**kwargs)
    except (ValueError, TypeError) as exc:
        raise ConfigError(f"{where}: {exc}") from None


def parse_config(data: dict, source: str = "<config>") -> RunConfig:
    top = _take(data, "", _TOP, subtables=_TOP_TABLES)
    cfg = RunConfig(source=source, seed=top.get("seed", 0))

    if "species" in data:
        try:
            cfg.species = species_from_mapping(data["species"], "species")
        except (KeyError, TypeError, ValueError) as exc:
            msg = exc.args[0] if exc.args else str(exc)
            raise ConfigError(msg) from None

    if "trap" in data:
        t = _take(data["trap"], "trap", _TRAP)
        for key in ("omega_x_hz", "omega_y_hz", "omega_z_hz"):
            if key not in t:
                raise ConfigError(f"trap.{key}: required key missing")
        cfg.trap = _build("trap", TrapConfig.from_hz, fx=t["omega_x_hz"], fy=t["omega_y_hz"],
                          fz=t["omega_z_hz"], B_min=t.get("B_min_G"))

    if "ensemble" in data:
        e = _take(data["ensemble"], "ensemble", _ENSEMBLE)
        if "atom_count" not in e:
            raise ConfigError("ensemble.atom_count: required key missing")
        # temperature is optional: the operating-point report supplies T0 itself
        T = e["temperature_uK"] * 1e-6 if "temperature_uK" in e else 1.0
        _build("ensemble", Ensemble, atom_count=e["atom_count"], temperature=T)
        cfg.atom_count = e["atom_count"]
        cfg.temperature = T if "temperature_uK" in e else None
        if "relative_atom_number_uncertainty" in e:
            r = e["relative_atom_number_uncertainty"]
            if r < 0:
                raise ConfigError("ensemble.relative_atom_number_uncertainty: must be >= 0")
            cfg.relative_atom_number_uncertainty = r

    if "clockloop" in data:
        cfg.clock, cfg.taus = _parse_clock(data["clockloop"], cfg.species, cfg.seed)

    if "output" in data:
        cfg.output = _take(data["output"], "output", _OUTPUT).get("path")
    return cfg


def _parse_clock(table, species, seed):
    c = _take(table, "clockloop", _CLOCK, subtables=("lo_noise", "readout"))
    for key in ("atom_count", "ramsey_time_s", "cycle_time_s"):
        if key not in c:
            raise ConfigError(f"clockloop.{key}: required key missing")
    lo = _take(table.get("lo_noise", {}), "clockloop.lo_noise", _LO)
    ro = _take(table.get("readout", {}), "clockloop.readout", _READOUT)
    lo_spec = _build("clockloop.lo_noise", LoNoiseSpec,
                     white_fm_h0=lo.get("white_fm_h0_per_hz", 0.0),
                     flicker_fm_hm1=lo.get("flicker_fm_hm1", 0.0),
                     rw_fm_hm2=lo.get("rw_fm_hm2_hz", 0.0),
                     linear_drift=lo.get("linear_drift_per_s", 0.0))
    readout = _build("clockloop.readout", ReadoutModel,
                     mode=ro.get("mode", "destructive"),
                     detection_noise_atoms=ro.get("detection_noise_atoms", 0.0),
                     retention_fraction=ro.get("retention_fraction", 0.0),
                     recool_time=ro.get("recool_time_s", 0.0),
                     reload_time=ro.get("reload_time_s", 0.0),
                     reload_threshold_fraction=ro.get("reload_threshold_fraction", 0.0))
    kwargs = dict(
        atom_count=c["atom_count"],
        ramsey_time=c["ramsey_time_s"],
        cycle_time=c["cycle_time_s"],
        lo_noise=lo_spec,
        readout=readout,
        species=species,
        seed=seed,
    )
    renames = {
        "contrast": "contrast",
        "squeezing_xi": "squeezing_xi",
        "servo_gain": "servo_gain",
        "zeeman_shift_rms_hz": "zeeman_shift_rms_Hz",
        "n_cycles": "n_cycles",
        "lo_dt_s": "lo_dt",
        "lo_initial_offset": "lo_initial_offset",
        "probe_phase_rad": "probe_phase",
        "alternate_sides": "alternate_sides",
        "divergence_cycles": "divergence_cycles",
    }
    for key, name in renames.items():
        if key in c:
            kwargs[name] = c[key]
    clock = _build("clockloop", ClockLoopConfig, **kwargs)
    return clock, c.get("taus_s", [])


def load_config(path: str | Path | None = None) -> RunConfig:
    """Parse ``path``; ``None`` loads the packaged default (the 10^6-atom reference trap)."""
    if path is None:
        try:
            data = tomllib.loads(default_config_text())
        except tomllib.TOMLDecodeError as exc:  # pragma: no cover - packaging error
            raise ConfigError(f"<default>: {exc}") from None
        return parse_config(data, "<default>")
    return parse_config(read_toml(path), str(path))
