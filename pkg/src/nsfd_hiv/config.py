"""Flat ``key = value`` run configuration.

Lines hold one ``key = value`` pair; ``#`` starts a comment; list values are
comma separated. Example::

    # Case II
    lambda = 1
    d = 0.1
    beta = 0.0005
    ...
    tau = 2
    h = 0.1
    initial = set-I
    t_end = 1000
"""
import math
from dataclasses import dataclass, fields
from pathlib import Path
from typing import Optional, Tuple, Union

from .errors import ParameterError, ParseError, ValidationError
from .model import InitialData, Parameters, make_parameters

PRESETS = {
    "set-I": (5.0, 1.0, 1.0, 2.0),
    "set-II": (15.0, 2.0, 1.0, 4.0),
}
PARAMETER_KEYS = ("lambda", "d", "beta", "a", "p", "mu", "N", "c", "s", "tau", "h")
LYAPUNOV_TARGETS = ("e0", "estar", "ebar")

_BOOL = {"true": True, "yes": True, "on": True, "1": True,
         "false": False, "no": False, "off": False, "0": False}


@dataclass(frozen=True)
class RunConfig:
    params: Parameters
    initial: Union[str, Tuple[float, ...], None] = None
    history_file: Optional[str] = None
    steps: Optional[int] = None
    t_end: Optional[float] = None
    omega: bool = False
    lyapunov: Optional[str] = None
    output: Optional[str] = None
    beta_values: Optional[Tuple[float, ...]] = None
    c_values: Optional[Tuple[float, ...]] = None
    tau_values: Optional[Tuple[float, ...]] = None
    sim_budget: int = 1_000_000
    tol: float = 1e-6
    window: int = 100

    @property
    def n_steps(self):
        if self.steps is not None:
            return self.steps
        if self.t_end is not None:
            return round(self.t_end / self.params.h)
        return None

    def initial_state(self):
        if isinstance(self.initial, str):
            return PRESETS[self.initial]
        return self.initial

    def initial_data(self, base_dir=None) -> InitialData:
        """Expand the configured initial condition to ``m + 1`` history rows."""
        m = self.params.m
        if self.history_file is not None:
            from .csvio import read_history
            path = Path(self.history_file)
            if base_dir is not None and not path.is_absolute():
                path = Path(base_dir) / path
            hist = read_history(path)
            if hist.shape[0] != m + 1:
                raise ValidationError(
                    "history_file", f"needs m+1={m + 1} rows, file has {hist.shape[0]}")
            return InitialData(hist)
        state = self.initial_state()
        if state is None:
            raise ValidationError("initial", "no initial condition given")
        return InitialData.constant(state, m)


_FLOAT_KEYS = {"t_end", "tol"}
_INT_KEYS = {"steps", "sim_budget", "window"}
_LIST_KEYS = {"beta_values", "c_values", "tau_values"}
_OTHER_KEYS = {"initial", "history_file", "omega", "lyapunov", "output"}
KNOWN_KEYS = set(PARAMETER_KEYS) | _FLOAT_KEYS | _INT_KEYS | _LIST_KEYS | _OTHER_KEYS


def _to_float(text, line, col):
    try:
        return float(text)
    except ValueError:
        raise ParseError(f"expected a number, got {text!r}", line, col) from None


def _to_int(text, line, col):
    value = _to_float(text, line, col)
    if not math.isfinite(value) or value != int(value):
        raise ParseError(f"expected an integer, got {text!r}", line, col)
    return int(value)


def _tokens(text):
    """Yield ``(key, value, line, key_col, value_col)`` for each assignment."""
    for lineno, raw in enumerate(text.splitlines(), start=1):
        body = raw.split("#", 1)[0]
        if not body.strip():
            continue
        if "=" not in body:
            col = len(body) - len(body.lstrip()) + 1
            raise ParseError("expected 'key = value'", lineno, col)
        left, right = body.split("=", 1)
        key = left.strip()
        key_col = len(left) - len(left.lstrip()) + 1
        value = right.strip()
        value_col = len(left) + 2 + (len(right) - len(right.lstrip()))
        if not key:
            raise ParseError("empty key", lineno, key_col)
        if not value:
            raise ParseError(f"empty value for {key!r}", lineno, value_col)
        yield key, value, lineno, key_col, value_col


def parse_config(text: str) -> RunConfig:
    """Parse a configuration document into a validated :class:`RunConfig`."""
    seen = {}
    raw_params = {}
    opts = {}
    for key, value, line, kcol, vcol in _tokens(text):
        if key not in KNOWN_KEYS:
            raise ParseError(f"unknown key {key!r}", line, kcol)
        if key in seen:
            raise ParseError(f"duplicate key {key!r} (first on line {seen[key]})", line, kcol)
        seen[key] = line
        if key in PARAMETER_KEYS:
            raw_params[key] = _to_float(value, line, vcol)
        elif key in _FLOAT_KEYS:
            opts[key] = _to_float(value, line, vcol)
        elif key in _INT_KEYS:
            opts[key] = _to_int(value, line, vcol)
        elif key in _LIST_KEYS:
            opts[key] = tuple(_to_float(item.strip(), line, vcol) for item in value.split(","))
        elif key == "omega":
            if value.lower() not in _BOOL:
                raise ParseError(f"expected a boolean, got {value!r}", line, vcol)
            opts[key] = _BOOL[value.lower()]
        elif key == "initial":
            opts[key] = _parse_initial(value, line, vcol)
        else:
            opts[key] = value

    for key in PARAMETER_KEYS:
        if key not in raw_params:
            raise ValidationError(key, "missing")
    try:
        params = make_parameters(raw_params)
    except ParameterError as exc:
        raise ValidationError(exc.field, str(exc)) from None
    return _validated(params, opts)


def _parse_initial(value, line, col):
    for name in PRESETS:
        if value.lower() == name.lower():
            return name
    parts = [item.strip() for item in value.split(",")]
    if len(parts) != 4:
        raise ParseError(
            f"initial must be set-I, set-II or four comma-separated numbers, got {value!r}",
            line, col)
    return tuple(_to_float(item, line, col) for item in parts)


def _validated(params, opts):
    if "steps" in opts and "t_end" in opts:
        raise ValidationError("steps", "steps and t_end are mutually exclusive")
    if "initial" in opts and "history_file" in opts:
        raise ValidationError("initial", "initial and history_file are mutually exclusive")
    if opts.get("steps", 1) < 1:
        raise ValidationError("steps", "must be >= 1")
    if "t_end" in opts:
        ratio = opts["t_end"] / params.h
        if not opts["t_end"] > 0 or abs(ratio - round(ratio)) > 1e-9:
            raise ValidationError("t_end", f"t_end/h = {ratio!r} must be a positive integer")
    initial = opts.get("initial")
    if isinstance(initial, tuple):
        if not all(u > 0 for u in initial):
            raise ValidationError("initial", "initial vector must be strictly positive")
    lyap = opts.get("lyapunov")
    if lyap is not None:
        lyap = lyap.lower()
        if lyap == "none":
            lyap = None
        elif lyap not in LYAPUNOV_TARGETS:
            raise ValidationError("lyapunov", f"must be one of {', '.join(LYAPUNOV_TARGETS)}")
        opts["lyapunov"] = lyap
    for key in ("sim_budget", "window"):
        if key in opts and opts[key] < 1:
            raise ValidationError(key, "must be >= 1")
    if "tol" in opts and not opts["tol"] > 0:
        raise ValidationError("tol", "must be > 0")
    for key in ("beta_values", "c_values", "tau_values"):
        if key in opts:
            _check_grid_values(params, key, opts[key])
    return RunConfig(params=params, **opts)


def _check_grid_values(params, key, values):
    name = {"beta_values": "beta", "c_values": "c", "tau_values": "tau"}[key]
    for value in values:
        try:
            params.with_(**{name: value})
        except ParameterError as exc:
            raise ValidationError(key, str(exc)) from None


def _fmt(value):
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return repr(value)
    if isinstance(value, tuple):
        return ", ".join(_fmt(float(v)) for v in value)
    return str(value)


def format_config(cfg: RunConfig) -> str:
    """Serialise ``cfg``; ``parse_config(format_config(cfg)) == cfg``."""
    lines = []
    pdict = cfg.params.to_dict()
    for key in PARAMETER_KEYS:
        lines.append(f"{key} = {_fmt(float(pdict[key]))}")
    defaults = RunConfig(params=cfg.params)
    for f in fields(RunConfig):
        if f.name == "params":
            continue
        value = getattr(cfg, f.name)
        if value is None or value == getattr(defaults, f.name):
            continue
        lines.append(f"{f.name} = {_fmt(value)}")
    return "\n".join(lines) + "\n"


def load_config(path) -> RunConfig:
    return parse_config(Path(path).read_text(encoding="utf-8"))

