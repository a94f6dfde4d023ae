"""INI run configuration: parsing, validation, defaults, canonical dump.

Sections are [data], [solver], [sweep], [oracle].  Unknown sections or keys
are rejected; malformed lines surface configparser's line numbers.  The
[data] section describes the initial profiles: kind/k/amplitude/M/table for
the displacement datum u0 and the u1_* twins for the velocity datum u1
(default zero).
"""

from __future__ import annotations

import configparser
import csv
import io
from dataclasses import dataclass

import numpy as np

from .data import RadialProfile, make_profile
from .errors import InputError

__all__ = ["RunConfig", "parse_config", "parse_config_text", "dump_config", "DEFAULTS"]


def _parse_float(s: str) -> float:
    s = s.strip()
    if "/" in s:
        num, den = s.split("/", 1)
        return float(num) / float(den)
    return float(s)


def _parse_float_list(s: str):
    return tuple(_parse_float(x) for x in s.split(",") if x.strip())


def _parse_optional_float(s: str):
    s = s.strip()
    if s in ("", "none", "auto"):
        return None
    return _parse_float(s)


# section -> key -> (default string, help)
DEFAULTS = {
    "data": {
        "kind": ("poly_bump", "u0 family: poly_bump | sample_table | zero"),
        "k": ("4", "poly_bump exponent for u0 (k >= 3)"),
        "amplitude": ("1.0", "u0 amplitude (fractions like 14/15 accepted)"),
        "m": ("1.0", "support radius M shared by u0 and u1"),
        "table": ("", "two-column CSV s,value for kind=sample_table"),
        "u1_kind": ("zero", "u1 family: poly_bump | sample_table | zero"),
        "u1_k": ("3", "poly_bump exponent for u1"),
        "u1_amplitude": ("1.0", "u1 amplitude"),
        "u1_table": ("", "two-column CSV for u1_kind=sample_table"),
    },
    "solver": {
        "dr": ("0.002", "radial grid step"),
        "cfl": ("0.8", "CFL fraction of dr/max(c)"),
        "c2_floor": ("0.25", "terminate when c^2 drops to this floor"),
        "diag_stride": ("0.02", "time between diagnostic sweeps"),
        "thresholds": ("50,200,800", "ascending |w1| blowup thresholds"),
        "window_q": ("auto", "comoving-window depth in q (auto | none | number)"),
        "tmax": ("auto", "failsafe horizon (auto = exp(2*tau0/eps))"),
    },
    "sweep": {
        "epsilons": ("1/3,1/4,1/5,1/6", "amplitude parameters, descending"),
        "out": ("sweep.csv", "output CSV path"),
        "jobs": ("0", "parallel runs (0 = auto)"),
        "budget": ("2e11", "node-step budget guard"),
    },
    "oracle": {
        "mu": ("0.5", "certificate start fraction of tau0 (0 < mu < 1)"),
        "rho0": ("auto", "characteristic label (auto = lifespan minimizer)"),
    },
}

_FLOAT_KEYS = {
    ("data", "amplitude"), ("data", "m"), ("data", "u1_amplitude"),
    ("solver", "dr"), ("solver", "cfl"), ("solver", "c2_floor"), ("solver", "diag_stride"),
    ("sweep", "budget"), ("oracle", "mu"),
}
_INT_KEYS = {("data", "k"), ("data", "u1_k"), ("sweep", "jobs")}


@dataclass
class RunConfig:
    """Validated configuration with typed accessors and profile builders."""

    raw: dict    # section -> key -> string (defaults merged)

    def get(self, section: str, key: str) -> str:
        return self.raw[section][key]

    def get_float(self, section: str, key: str) -> float:
        return _parse_float(self.raw[section][key])

    def get_int(self, section: str, key: str) -> int:
        return int(self.raw[section][key])

    @property
    def thresholds(self):
        return _parse_float_list(self.raw["solver"]["thresholds"])

    @property
    def epsilons(self):
        return _parse_float_list(self.raw["sweep"]["epsilons"])

    def window_q(self, epsilon: float):
        spec = self.raw["solver"]["window_q"].strip().lower()
        if spec == "none":
            return None
        if spec == "auto":
            M = self.get_float("data", "m")
            return max(16.0, 3.0 * M + 2.0 / (3.0 * max(epsilon, 1e-9)) + 4.0)
        return _parse_float(spec)

    def tmax(self, epsilon: float, tau0_ref: float) -> float:
        spec = self.raw["solver"]["tmax"].strip().lower()
        if spec == "auto":
            return float(np.exp(2.0 * tau0_ref / epsilon))
        return _parse_float(spec)

    def _build_profile(self, prefix: str) -> RadialProfile:
        d = self.raw["data"]
        M = _parse_float(d["m"])
        kind = d[f"{prefix}kind"] if prefix else d["kind"]
        kind = kind.strip()
        if kind == "zero":
            return make_profile("zero", M)
        if kind == "poly_bump":
            k = int(d[f"{prefix}k"] if prefix else d["k"])
            amp = _parse_float(d[f"{prefix}amplitude"] if prefix else d["amplitude"])
            return make_profile("poly_bump", M, k=k, amplitude=amp)
        if kind == "sample_table":
            path = d[f"{prefix}table"] if prefix else d["table"]
            if not path:
                raise InputError(f"data.{prefix}kind=sample_table requires data.{prefix}table")
            nodes, values = _load_table(path)
            return make_profile("sample_table", M, nodes=nodes, values=values)
        raise InputError(f"unknown data kind {kind!r}")

    def profiles(self):
        return self._build_profile(""), self._build_profile("u1_")


def _load_table(path: str):
    nodes, values = [], []
    with open(path, newline="") as fh:
        for row in csv.reader(fh):
            if not row or row[0].lstrip().startswith("#"):
                continue
            nodes.append(float(row[0]))
            values.append(float(row[1]))
    return np.asarray(nodes), np.asarray(values)


def _validate(parser: configparser.ConfigParser) -> dict:
    merged = {sec: dict((k, v[0]) for k, v in keys.items()) for sec, keys in DEFAULTS.items()}
    for section in parser.sections():
        if section not in DEFAULTS:
            raise InputError(f"unknown config section [{section}] "
                             f"(expected one of {sorted(DEFAULTS)})")
        for key, value in parser.items(section):
            if key not in DEFAULTS[section]:
                raise InputError(f"unknown key {section}.{key} "
                                 f"(known: {sorted(DEFAULTS[section])})")
            merged[section][key] = value.strip()
    # typed sanity checks
    for sec, key in _FLOAT_KEYS:
        _parse_float(merged[sec][key])
    for sec, key in _INT_KEYS:
        int(merged[sec][key])
    if merged["data"]["kind"] == "poly_bump" and int(merged["data"]["k"]) < 3:
        raise InputError("data.k must be >= 3 (C^2 regularity at the support edge)")
    if merged["data"]["u1_kind"] == "poly_bump" and int(merged["data"]["u1_k"]) < 3:
        raise InputError("data.u1_k must be >= 3 (C^2 regularity at the support edge)")
    if not 0 < _parse_float(merged["oracle"]["mu"]) < 1:
        raise InputError("oracle.mu must lie strictly between 0 and 1")
    if _parse_float(merged["data"]["m"]) <= 0:
        raise InputError("data.m must be positive")
    thr = _parse_float_list(merged["solver"]["thresholds"])
    if list(thr) != sorted(thr) or any(x <= 0 for x in thr):
        raise InputError("solver.thresholds must be ascending and positive")
    return merged


def parse_config_text(text: str, origin: str = "<config>") -> RunConfig:
    parser = configparser.ConfigParser(interpolation=None)
    try:
        parser.read_string(text, source=origin)
    except configparser.Error as exc:
        raise InputError(f"malformed config: {exc}") from exc
    return RunConfig(raw=_validate(parser))


def parse_config(path: str) -> RunConfig:
    try:
        with open(path) as fh:
            text = fh.read()
    except OSError as exc:
        raise InputError(f"cannot read config {path}: {exc}") from exc
    return parse_config_text(text, origin=path)


def dump_config(cfg: RunConfig) -> str:
    """Canonical INI rendering of the effective configuration."""
    out = io.StringIO()
    for section in DEFAULTS:
        out.write(f"[{section}]\n")
        for key in DEFAULTS[section]:
            out.write(f"{key} = {cfg.raw[section][key]}\n")
        out.write("\n")
    return out.getvalue()
