"""Scenario files: eV-based physical inputs converted to the internal m = 1 system.

A scenario is a TOML (or JSON) document with the sections ``wave1``,
``wave2``, ``electron``, ``photon`` and an optional ``options``::

    [wave1]
    omega_ev = 200.0
    eta = 1e-3              # or field_v_per_m = 1.2e13
    pol = [1.0, 0.0]

    [wave2]
    omega_ev = 120.0
    eta = 5e-4
    pol = [1.0, 0.0]

    [electron]
    kinetic_ev = 5e4
    direction = [0.0, 1.0, 1.0]
    final_direction = [0.0, -1.0, 2.0]   # or final_momentum_ev = [px, py, pz]
    Z = 1

    [photon]
    omega_ev = 1e3
    direction = [0.0, 1.0, 0.0]

    [options]
    tol = 1e-13
    tail_tol = 1e-10
    mode = "auto"

Directions need not be normalized.  With ``final_direction`` the final
energy is fixed by ``E_f = E_i - omega'``.
"""

from __future__ import annotations

import copy
import json
import math
import sys
from dataclasses import dataclass
from pathlib import Path

import numpy as np
from scipy.constants import c, hbar, m_e, physical_constants

from .relkin import FourVector, KinematicsError, ScatteringKinematics, WaveConfig

if sys.version_info >= (3, 11):
    import tomllib
else:
    import tomli as tomllib

__all__ = ["Scenario", "ScenarioParseError", "ScenarioValidationError", "load_scenario",
           "ELECTRON_MASS_EV", "field_to_eta"]

ELECTRON_MASS_EV = physical_constants["electron mass energy equivalent in MeV"][0] * 1e6
MODES = ("auto", "noninterference", "factorized", "interference")

_SCHEMA = {
    "wave1": {"omega_ev", "eta", "field_v_per_m", "pol"},
    "wave2": {"omega_ev", "eta", "field_v_per_m", "pol"},
    "electron": {"kinetic_ev", "direction", "final_direction", "final_momentum_ev", "Z"},
    "photon": {"omega_ev", "direction"},
    "options": {"tol", "tail_tol", "mode"},
}
_REQUIRED = {
    "wave1": ("omega_ev",),
    "wave2": ("omega_ev",),
    "electron": ("kinetic_ev", "direction"),
    "photon": ("omega_ev", "direction"),
}


class ScenarioParseError(ValueError):
    """File unreadable or not matching the schema."""


class ScenarioValidationError(ValueError):
    """Scenario parses but violates a physical invariant.  ``field`` names the culprit."""

    def __init__(self, field, message):
        super().__init__(f"{field}: {message}")
        self.field = field


def field_to_eta(field_v_per_m, omega_ev):
    """Intensity parameter ``e F / (m c omega)`` for a field in V/m and photon energy in eV."""
    return field_v_per_m * hbar / (m_e * c * omega_ev)


def _vector(raw, name, size):
    try:
        v = np.asarray(raw, dtype=float)
    except (TypeError, ValueError) as exc:
        raise ScenarioParseError(f"{name}: expected {size} numbers") from exc
    if v.shape != (size,):
        raise ScenarioParseError(f"{name}: expected {size} numbers, got {raw!r}")
    if not np.all(np.isfinite(v)):
        raise ScenarioValidationError(name, "entries must be finite")
    return v


def _number(raw, name):
    if isinstance(raw, bool) or not isinstance(raw, (int, float)):
        raise ScenarioParseError(f"{name}: expected a number, got {raw!r}")
    if not math.isfinite(raw):
        raise ScenarioValidationError(name, "must be finite")
    return float(raw)


def _unit(v, name):
    n = float(np.linalg.norm(v))
    if n == 0.0:
        raise ScenarioValidationError(name, "direction must be nonzero")
    return v / n


@dataclass
class Scenario:
    """Validated scenario.

    ``data`` keeps the document as read, so that :meth:`to_dict` round-trips;
    the remaining attributes are derived in the internal unit system.
    """

    data: dict
    waves: tuple
    kin: ScatteringKinematics
    Z: int
    tol: float
    tail_tol: float
    mode: str

    @classmethod
    def from_dict(cls, data):
        data = copy.deepcopy(data)
        if not isinstance(data, dict):
            raise ScenarioParseError("top level must be a table")
        for section, keys in data.items():
            if section not in _SCHEMA:
                raise ScenarioParseError(f"unknown section [{section}]")
            if not isinstance(keys, dict):
                raise ScenarioParseError(f"[{section}] must be a table")
            for key in keys:
                if key not in _SCHEMA[section]:
                    raise ScenarioParseError(f"unknown key {section}.{key}")
        for section, keys in _REQUIRED.items():
            if section not in data:
                raise ScenarioParseError(f"missing section [{section}]")
            for key in keys:
                if key not in data[section]:
                    raise ScenarioParseError(f"missing key {section}.{key}")

        waves = tuple(cls._wave(data[name], name) for name in ("wave1", "wave2"))
        if waves[1].omega > waves[0].omega:
            raise ScenarioValidationError(
                "wave2.omega_ev",
                "waves are labelled so that omega1 > omega2; swap wave1 and wave2")

        el, ph = data["electron"], data["photon"]
        m = 1.0
        T = _number(el["kinetic_ev"], "electron.kinetic_ev") / ELECTRON_MASS_EV
        if T <= 0:
            raise ScenarioValidationError("electron.kinetic_ev", "must be positive")
        E_i = m + T
        n_i = _unit(_vector(el["direction"], "electron.direction", 3), "electron.direction")
        p_i = FourVector.on_shell(math.sqrt(E_i * E_i - m * m) * n_i, m)

        w = _number(ph["omega_ev"], "photon.omega_ev") / ELECTRON_MASS_EV
        if w <= 0:
            raise ScenarioValidationError("photon.omega_ev", "must be positive")
        n_k = _unit(_vector(ph["direction"], "photon.direction", 3), "photon.direction")
        k_prime = FourVector.lightlike(w, n_k)

        has_dir = "final_direction" in el
        has_mom = "final_momentum_ev" in el
        if has_dir == has_mom:
            raise ScenarioParseError(
                "electron: give exactly one of final_direction and final_momentum_ev")
        if has_mom:
            pf = _vector(el["final_momentum_ev"], "electron.final_momentum_ev", 3)
            p_f = FourVector.on_shell(pf / ELECTRON_MASS_EV, m)
        else:
            E_f = E_i - w
            if E_f <= m:
                raise ScenarioValidationError(
                    "photon.omega_ev", "photon energy must be below the electron kinetic energy")
            n_f = _unit(_vector(el["final_direction"], "electron.final_direction", 3),
                        "electron.final_direction")
            p_f = FourVector.on_shell(math.sqrt(E_f * E_f - m * m) * n_f, m)
        try:
            kin = ScatteringKinematics(p_i, p_f, k_prime, m)
        except KinematicsError as exc:
            raise ScenarioValidationError("electron", str(exc)) from exc

        Z = el.get("Z", 1)
        if isinstance(Z, bool) or not isinstance(Z, int) or Z < 1:
            raise ScenarioValidationError("electron.Z", f"must be a positive integer, got {Z!r}")

        opts = data.get("options", {})
        tol = _number(opts.get("tol", 1e-13), "options.tol")
        tail_tol = _number(opts.get("tail_tol", 1e-10), "options.tail_tol")
        if not tol > 0:
            raise ScenarioValidationError("options.tol", "must be positive")
        if not 0 < tail_tol < 0.1:
            raise ScenarioValidationError("options.tail_tol", "must lie in (0, 0.1)")
        mode = opts.get("mode", "auto")
        if mode not in MODES:
            raise ScenarioValidationError("options.mode", f"must be one of {MODES}")
        return cls(data, waves, kin, Z, tol, tail_tol, mode)

    @staticmethod
    def _wave(sec, name):
        omega_ev = _number(sec["omega_ev"], f"{name}.omega_ev")
        if omega_ev <= 0:
            raise ScenarioValidationError(f"{name}.omega_ev", "must be positive")
        if "eta" in sec and "field_v_per_m" in sec:
            raise ScenarioParseError(f"{name}: give eta or field_v_per_m, not both")
        if "field_v_per_m" in sec:
            F = _number(sec["field_v_per_m"], f"{name}.field_v_per_m")
            if F < 0:
                raise ScenarioValidationError(f"{name}.field_v_per_m", "must be nonnegative")
            eta = field_to_eta(F, omega_ev)
        else:
            eta = _number(sec.get("eta", 0.0), f"{name}.eta")
            if eta < 0:
                raise ScenarioValidationError(f"{name}.eta", "must be nonnegative")
        pol = _vector(sec.get("pol", [1.0, 0.0]), f"{name}.pol", 2)
        norm = math.hypot(*pol)
        if abs(norm - 1.0) > 1e-12:
            raise ScenarioValidationError(f"{name}.pol", f"must be a unit vector, |pol| = {norm!r}")
        return WaveConfig(omega_ev / ELECTRON_MASS_EV, eta, tuple(pol))

    def to_dict(self):
        return copy.deepcopy(self.data)

    def to_json(self):
        return json.dumps(self.data, indent=2, sort_keys=True)

    @property
    def equal_frequency(self):
        return self.waves[0].omega == self.waves[1].omega


def load_scenario(path):
    """Read and validate a scenario file (``.toml`` or ``.json``).

    Raises
    ------
    ScenarioParseError
        Unreadable file, syntax error (with line context) or schema mismatch.
    ScenarioValidationError
        Physically invalid values; the message names the field.
    """
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise ScenarioParseError(f"cannot read {path}: {exc}") from exc
    try:
        if path.suffix == ".json":
            data = json.loads(text)
        else:
            data = tomllib.loads(text)
    except (tomllib.TOMLDecodeError, json.JSONDecodeError) as exc:
        raise ScenarioParseError(f"{path}: {exc}") from exc
    return Scenario.from_dict(data)
