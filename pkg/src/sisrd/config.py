"""Experiment configuration: JSON schema, validation, initial profiles.

A configuration is a single JSON document::

    {
      "mode": "ode" | "pde",
      "params": {"Lambda": 8, "mu": 1, "lam": 0.3333, "sigma": 2,
                 "d1": 3, "d2": 1.25},
      "incidence": {"family": "linear", "alpha": 3},
      "initial": {"u": 6, "v": 1.5},
      "grid": {"L": 10, "n": 201},
      "time": {"t_end": 200, "dt": "auto", "snapshot_every": 1.0,
               "stride": 100},
      "monitors": {"invariant_region": true, "boundedness": true,
                   "lyapunov": true, "theta": "auto"},
      "output": {"dir": "out/my-run"},
      "label": "my-run"
    }

``grid`` is required only in pde mode; in pde mode the initial values
may be expression strings in x (sums/products of numbers, ``x``,
``cos(...)`` and ``sin(...)``), e.g. ``"4 + cos(x)/10"``.  Missing
optional sections get defaults.  Validation reports the first violated
invariant by name.
"""

from __future__ import annotations

import json
import math
import os
from dataclasses import dataclass, field, replace
from typing import Callable, Optional, Union

import numpy as np

from .incidence import (
    CustomIncidence,
    HalfSaturationIncidence,
    Incidence,
    LinearIncidence,
    SaturatedIncidence,
)
from .model import ModelParams

FAMILIES = ("linear", "saturated", "half_saturation")


class ConfigError(ValueError):
    """A configuration failed to parse or validate."""


# ---------------------------------------------------------------------------
# Initial-data expressions: a tiny arithmetic grammar, evaluated with numpy.
# No eval(); only numbers, x, cos, sin, + - * / and parentheses.

def _tokenize(text: str) -> list[str]:
    tokens = []
    i = 0
    while i < len(text):
        ch = text[i]
        if ch.isspace():
            i += 1
        elif ch in "+-*/()":
            tokens.append(ch)
            i += 1
        elif ch.isdigit() or ch == ".":
            j = i
            while j < len(text) and (text[j].isdigit() or text[j] in ".eE" or
                                     (text[j] in "+-" and text[j - 1] in "eE")):
                j += 1
            tokens.append(text[i:j])
            i = j
        elif ch.isalpha():
            j = i
            while j < len(text) and text[j].isalpha():
                j += 1
            tokens.append(text[i:j])
            i = j
        else:
            raise ConfigError(f"unexpected character {ch!r} in expression {text!r}")
    return tokens


def parse_profile(text: str) -> Callable[[np.ndarray], np.ndarray]:
    """Compile an initial-profile expression into a numpy-evaluable callable."""
    tokens = _tokenize(text)
    pos = 0

    def peek() -> Optional[str]:
        return tokens[pos] if pos < len(tokens) else None

    def take(expected: Optional[str] = None) -> str:
        nonlocal pos
        if pos >= len(tokens):
            raise ConfigError(f"expression {text!r} ended unexpectedly")
        tok = tokens[pos]
        if expected is not None and tok != expected:
            raise ConfigError(f"expected {expected!r} but found {tok!r} in {text!r}")
        pos += 1
        return tok

    def parse_expr():
        node = parse_term()
        while peek() in ("+", "-"):
            op = take()
            right = parse_term()
            left = node
            node = (lambda l, r: (lambda x: l(x) + r(x)))(left, right) if op == "+" else \
                   (lambda l, r: (lambda x: l(x) - r(x)))(left, right)
        return node

    def parse_term():
        node = parse_factor()
        while peek() in ("*", "/"):
            op = take()
            right = parse_factor()
            left = node
            node = (lambda l, r: (lambda x: l(x) * r(x)))(left, right) if op == "*" else \
                   (lambda l, r: (lambda x: l(x) / r(x)))(left, right)
        return node

    def parse_factor():
        tok = peek()
        if tok == "-":
            take()
            inner = parse_factor()
            return lambda x: -inner(x)
        if tok == "+":
            take()
            return parse_factor()
        if tok == "(":
            take()
            inner = parse_expr()
            take(")")
            return inner
        if tok in ("cos", "sin"):
            take()
            take("(")
            inner = parse_expr()
            take(")")
            fn = np.cos if tok == "cos" else np.sin
            return (lambda f, g: (lambda x: f(g(x))))(fn, inner)
        if tok == "x":
            take()
            return lambda x: x
        if tok is None:
            raise ConfigError(f"expression {text!r} ended unexpectedly")
        try:
            value = float(tok)
        except ValueError:
            raise ConfigError(f"unknown token {tok!r} in expression {text!r}") from None
        take()
        return lambda x: value + 0.0 * x

    result = parse_expr()
    if pos != len(tokens):
        raise ConfigError(f"trailing input {tokens[pos:]!r} in expression {text!r}")
    return result


# ---------------------------------------------------------------------------
# Configuration objects.

def _writable_location(path: str) -> bool:
    """True if the directory exists and is writable, or could be created."""
    probe = os.path.abspath(path)
    while probe and not os.path.exists(probe):
        parent = os.path.dirname(probe)
        if parent == probe:
            break
        probe = parent
    return os.path.isdir(probe) and os.access(probe, os.W_OK)


@dataclass(frozen=True)
class MonitorFlags:
    invariant_region: bool = True
    boundedness: bool = True
    lyapunov: bool = True
    theta: Union[str, float] = "auto"  # "auto" = window lower end (1 for ode)


@dataclass(frozen=True)
class ExperimentConfig:
    params: ModelParams
    incidence: Incidence
    mode: str
    u0: Union[float, str]
    v0: Union[float, str]
    L: float = 10.0
    n: int = 201
    t_end: float = 200.0
    dt: Optional[float] = None  # None = automatic step in pde mode
    snapshot_every: float = 1.0
    stride: int = 100
    monitors: MonitorFlags = field(default_factory=MonitorFlags)
    label: str = "run"
    out_dir: Optional[str] = None  # default output directory for artifacts

    def with_params(self, params: ModelParams) -> "ExperimentConfig":
        return replace(self, params=params)


def incidence_from_dict(data: dict) -> Incidence:
    if not isinstance(data, dict) or "family" not in data:
        raise ConfigError("incidence must be an object with a 'family' key")
    family = data["family"]
    try:
        if family == "linear":
            return LinearIncidence(alpha=float(data["alpha"]))
        if family == "saturated":
            return SaturatedIncidence(alpha=float(data["alpha"]), k=float(data["k"]))
        if family == "half_saturation":
            return HalfSaturationIncidence(k=float(data["k"]), alpha=float(data["alpha"]))
    except KeyError as exc:
        raise ConfigError(f"incidence family {family!r} is missing coefficient {exc}") from None
    except ValueError as exc:
        raise ConfigError(str(exc)) from None
    raise ConfigError(f"unknown incidence family {family!r}; expected one of {FAMILIES}")


def incidence_to_dict(spec: Incidence) -> dict:
    if isinstance(spec, LinearIncidence):
        return {"family": "linear", "alpha": spec.alpha}
    if isinstance(spec, SaturatedIncidence):
        return {"family": "saturated", "alpha": spec.alpha, "k": spec.k}
    if isinstance(spec, HalfSaturationIncidence):
        return {"family": "half_saturation", "k": spec.k, "alpha": spec.alpha}
    if isinstance(spec, CustomIncidence):
        return {"family": "custom", "slope0": spec.slope0}
    raise TypeError(f"cannot serialize incidence {type(spec).__name__}")


def config_from_dict(data: dict) -> ExperimentConfig:
    """Validate a parsed JSON document and fill in defaults."""
    if not isinstance(data, dict):
        raise ConfigError("configuration must be a JSON object")

    mode = data.get("mode")
    if mode not in ("ode", "pde"):
        raise ConfigError(f"mode must be 'ode' or 'pde', got {mode!r}")

    if "params" not in data or not isinstance(data["params"], dict):
        raise ConfigError("missing 'params' object")
    try:
        params = ModelParams(**{k: float(v) for k, v in data["params"].items()})
    except TypeError as exc:
        raise ConfigError(f"bad params: {exc}") from None
    except ValueError as exc:
        raise ConfigError(str(exc)) from None

    if "incidence" not in data:
        raise ConfigError("missing 'incidence' object")
    spec = incidence_from_dict(data["incidence"])

    initial = data.get("initial")
    if not isinstance(initial, dict) or "u" not in initial or "v" not in initial:
        raise ConfigError("missing 'initial' object with 'u' and 'v'")
    u0, v0 = initial["u"], initial["v"]
    if mode == "ode":
        try:
            u0, v0 = float(u0), float(v0)
        except (TypeError, ValueError):
            raise ConfigError("ode initial data must be numbers") from None
        if u0 < 0 or v0 < 0:
            raise ConfigError("initial data must be nonnegative")
    else:
        for name, value in (("u", u0), ("v", v0)):
            if isinstance(value, str):
                parse_profile(value)  # raises ConfigError on bad syntax
            elif not isinstance(value, (int, float)):
                raise ConfigError(f"pde initial {name} must be a number or expression string")

    if mode == "pde":
        grid = data.get("grid")
        if not isinstance(grid, dict) or "L" not in grid or "n" not in grid:
            raise ConfigError("pde mode requires a 'grid' object with 'L' and 'n'")
        L, n = float(grid["L"]), int(grid["n"])
        if not (L > 0):
            raise ConfigError(f"grid.L must be positive, got {L}")
        if n < 3:
            raise ConfigError(f"grid.n must be at least 3, got {n}")
    else:
        L, n = 10.0, 201

    time_cfg = data.get("time", {})
    if not isinstance(time_cfg, dict):
        raise ConfigError("'time' must be an object")
    t_end = float(time_cfg.get("t_end", 200.0 if mode == "ode" else 100.0))
    if not (t_end > 0 and math.isfinite(t_end)):
        raise ConfigError(f"time.t_end must be positive, got {t_end}")
    dt_raw = time_cfg.get("dt", 1e-3 if mode == "ode" else "auto")
    if dt_raw == "auto":
        dt = None if mode == "pde" else 1e-3
    else:
        dt = float(dt_raw)
        if not (dt > 0):
            raise ConfigError(f"time.dt must be positive, got {dt}")
    snapshot_every = float(time_cfg.get("snapshot_every", 1.0))
    if not (snapshot_every > 0):
        raise ConfigError(f"time.snapshot_every must be positive, got {snapshot_every}")
    stride = int(time_cfg.get("stride", 100))
    if stride < 1:
        raise ConfigError(f"time.stride must be at least 1, got {stride}")

    monitors_cfg = data.get("monitors", {})
    if not isinstance(monitors_cfg, dict):
        raise ConfigError("'monitors' must be an object")
    theta = monitors_cfg.get("theta", "auto")
    if theta != "auto":
        theta = float(theta)
        if not (theta > 0):
            raise ConfigError(f"monitors.theta must be positive, got {theta}")
    monitors = MonitorFlags(
        invariant_region=bool(monitors_cfg.get("invariant_region", True)),
        boundedness=bool(monitors_cfg.get("boundedness", True)),
        lyapunov=bool(monitors_cfg.get("lyapunov", True)),
        theta=theta,
    )

    out_dir = None
    output_cfg = data.get("output", {})
    if output_cfg:
        if not isinstance(output_cfg, dict) or not isinstance(output_cfg.get("dir"), str):
            raise ConfigError("'output' must be an object with a string 'dir'")
        out_dir = output_cfg["dir"]
        if not _writable_location(out_dir):
            raise ConfigError(f"output.dir {out_dir!r} is not writable")

    return ExperimentConfig(
        params=params,
        incidence=spec,
        mode=mode,
        u0=u0,
        v0=v0,
        L=L,
        n=n,
        t_end=t_end,
        dt=dt,
        snapshot_every=snapshot_every,
        stride=stride,
        monitors=monitors,
        label=str(data.get("label", "run")),
        out_dir=out_dir,
    )


def load_config(path: str) -> ExperimentConfig:
    """Read and validate a JSON configuration file."""
    try:
        with open(path, "r", encoding="utf-8") as fh:
            data = json.load(fh)
    except OSError as exc:
        raise ConfigError(f"cannot read {path}: {exc}") from None
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{path}: invalid JSON at line {exc.lineno}, column {exc.colno}: {exc.msg}") from None
    return config_from_dict(data)


def config_to_dict(config: ExperimentConfig) -> dict:
    """Serialize a config back to its JSON document form."""
    return {
        "mode": config.mode,
        "params": {
            "Lambda": config.params.Lambda,
            "mu": config.params.mu,
            "lam": config.params.lam,
            "sigma": config.params.sigma,
            "d1": config.params.d1,
            "d2": config.params.d2,
        },
        "incidence": incidence_to_dict(config.incidence),
        "initial": {"u": config.u0, "v": config.v0},
        "grid": {"L": config.L, "n": config.n},
        "time": {
            "t_end": config.t_end,
            "dt": "auto" if config.dt is None else config.dt,
            "snapshot_every": config.snapshot_every,
            "stride": config.stride,
        },
        "monitors": {
            "invariant_region": config.monitors.invariant_region,
            "boundedness": config.monitors.boundedness,
            "lyapunov": config.monitors.lyapunov,
            "theta": config.monitors.theta,
        },
        "label": config.label,
        **({"output": {"dir": config.out_dir}} if config.out_dir else {}),
    }
