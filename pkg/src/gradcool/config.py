"""key=value run configuration files for the CLI.

All physical values are in trap-frequency units.  Unknown keys are a hard
error; every run is fully determined by the config (no random seeds enter
anywhere).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .dynamics import IntegratorConfig
from .errors import ConfigError
from .model import SystemParams
from .rates import resonance_detuning

__all__ = ["RunConfig", "parse_run_config", "load_run_config"]

_FLOAT_KEYS = {
    "nu",
    "omega",
    "gamma",
    "gamma_plus",
    "gamma_minus",
    "eta",
    "eta_eff",
    "phi",
    "n_initial",
    "t_end",
    "rel_tol",
    "abs_tol",
    "tail_tol",
    "sample_every",
    "rk4_step",
}
_INT_KEYS = {"n_max"}
_CHOICE_KEYS = {
    "picture": ("original", "schrieffer_wolff", "dressed"),
    "order": ("1", "2", "exact"),
    "method": ("rk45", "rk4"),
    "initial_kind": ("thermal", "fock"),
    "internal_state": ("mixed", "dark", "bright", "plus", "minus", "excited"),
}
KNOWN_KEYS = _FLOAT_KEYS | _INT_KEYS | set(_CHOICE_KEYS) | {"delta"}

_DEFAULTS = {
    "picture": "original",
    "order": "2",
    "nu": 1.0,
    "omega": 0.0,
    "delta": "resonance",
    "gamma": 0.0,
    "eta": 0.0,
    "phi": math.pi / 2,
    "n_max": 20,
    "n_initial": 2.0,
    "initial_kind": "thermal",
    "internal_state": "mixed",
    "t_end": 100.0,
    "rel_tol": 1e-8,
    "abs_tol": 1e-10,
    "tail_tol": 1e-6,
    "method": "rk45",
}


@dataclass(frozen=True)
class RunConfig:
    """Parsed config: physical parameters plus integrator/initial-state keys."""

    values: dict

    def system_params(self) -> SystemParams:
        v = self.values
        omega = v["omega"]
        nu = v["nu"]
        delta = v["delta"]
        if delta == "resonance":
            delta = resonance_detuning(omega, nu)
        gp = v.get("gamma_plus", v["gamma"])
        gm = v.get("gamma_minus", v["gamma"])
        return SystemParams(
            omega=omega,
            delta=delta,
            gamma_plus=gp,
            gamma_minus=gm,
            eta=v["eta"],
            eta_eff=v.get("eta_eff"),
            phi=v["phi"],
            order=v["order"],
            n_max=v["n_max"],
            nu=nu,
        )

    def integrator_config(self) -> IntegratorConfig:
        v = self.values
        return IntegratorConfig(
            t_end=v["t_end"],
            method=v["method"],
            rel_tol=v["rel_tol"],
            abs_tol=v["abs_tol"],
            sample_every=v.get("sample_every"),
            tail_tol=v["tail_tol"],
            rk4_step=v.get("rk4_step"),
        )

    @property
    def picture(self) -> str:
        return self.values["picture"]

    def initial_state_spec(self) -> tuple[float, str, str]:
        v = self.values
        return v["n_initial"], v["initial_kind"], v["internal_state"]

    def resolved_delta(self) -> float:
        return self.system_params().delta

    def as_flat_dict(self) -> dict:
        out = dict(self.values)
        out["delta_resolved"] = self.resolved_delta()
        return out


def parse_run_config(text: str) -> RunConfig:
    """Parse a key=value document ('#' comments, blank lines allowed)."""
    values: dict = dict(_DEFAULTS)
    seen = set()
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"line {lineno}: expected key=value, got {raw!r}")
        key, _, val = line.partition("=")
        key = key.strip()
        val = val.strip()
        if key not in KNOWN_KEYS:
            raise ConfigError(f"line {lineno}: unknown key {key!r}")
        if key in seen:
            raise ConfigError(f"line {lineno}: duplicate key {key!r}")
        seen.add(key)
        if key == "delta":
            if val == "resonance":
                values[key] = "resonance"
            else:
                values[key] = _parse_float(key, val, lineno)
        elif key in _FLOAT_KEYS:
            values[key] = _parse_float(key, val, lineno)
        elif key in _INT_KEYS:
            try:
                values[key] = int(val)
            except ValueError:
                raise ConfigError(f"line {lineno}: key {key!r} must be an integer") from None
        else:
            if val not in _CHOICE_KEYS[key]:
                raise ConfigError(
                    f"line {lineno}: key {key!r} must be one of {_CHOICE_KEYS[key]}, got {val!r}"
                )
            values[key] = val
    return RunConfig(values)


def _parse_float(key: str, val: str, lineno: int) -> float:
    try:
        x = float(val)
    except ValueError:
        raise ConfigError(f"line {lineno}: key {key!r} must be a real number") from None
    if not np.isfinite(x):
        raise ConfigError(f"line {lineno}: key {key!r} must be finite")
    return x


def load_run_config(path: str) -> RunConfig:
    try:
        with open(path, "r", encoding="utf-8") as f:
            return parse_run_config(f.read())
    except OSError as exc:
        raise ConfigError(f"cannot read config {path!r}: {exc}") from exc
