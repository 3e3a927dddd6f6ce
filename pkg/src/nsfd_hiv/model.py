"""Parameters, states, delay history and the single-step NSFD map."""
from dataclasses import dataclass, field, fields, replace
from typing import Mapping, NamedTuple

import numpy as np

from . import kernels
from .errors import (
    DomainError,
    MissingParameter,
    NonIntegerDelayRatio,
    NonPositiveParameter,
    ParameterError,
)

RATE_FIELDS = ("lam", "d", "beta", "a", "p", "mu", "N", "c", "s")
FIELD_ORDER = RATE_FIELDS + ("tau", "h")

# external names (config files, CLI) -> dataclass attribute
ALIASES = {"lambda": "lam", "bigN": "N"}
EXTERNAL_NAMES = {"lam": "lambda"}

DELAY_RATIO_TOL = 1e-9


class State(NamedTuple):
    x: float
    y: float
    v: float
    z: float

    def as_array(self):
        return np.array(self, dtype=np.float64)


@dataclass(frozen=True)
class Parameters:
    """Model rates, intracellular delay ``tau`` and step size ``h``.

    The denominator function is ``phi(h) = h``. ``tau / h`` must be an integer
    ``m`` (number of delay steps). ``beta = 0`` is accepted as the degenerate
    infection-free model; every other rate must be strictly positive.
    """

    lam: float
    d: float
    beta: float
    a: float
    p: float
    mu: float
    N: float
    c: float
    s: float
    tau: float
    h: float
    m: int = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        for name in FIELD_ORDER:
            value = getattr(self, name)
            if not np.isfinite(value):
                raise NonPositiveParameter(_external(name), f"must be finite, got {value!r}")
        for name in RATE_FIELDS:
            value = getattr(self, name)
            if name == "beta" and value == 0.0:
                continue
            if not value > 0:
                raise NonPositiveParameter(_external(name), f"must be > 0, got {value!r}")
        if self.tau < 0:
            raise NonPositiveParameter("tau", f"must be >= 0, got {self.tau!r}")
        if not self.h > 0:
            raise NonPositiveParameter("h", f"must be > 0, got {self.h!r}")
        ratio = self.tau / self.h
        m = round(ratio)
        if abs(ratio - m) > DELAY_RATIO_TOL:
            raise NonIntegerDelayRatio("tau", f"tau/h = {ratio!r} is not an integer")
        object.__setattr__(self, "m", int(m))

    @property
    def phi(self):
        return self.h

    def as_array(self):
        """Packed coefficient vector consumed by :mod:`nsfd_hiv.kernels`."""
        return np.array(
            [self.lam, self.d, self.beta, self.a, self.p, self.mu,
             self.N, self.c, self.s, self.phi],
            dtype=np.float64,
        )

    def with_(self, **changes):
        return replace(self, **changes)

    def to_dict(self):
        """External-name mapping, suitable for :func:`make_parameters`."""
        return {_external(f.name): getattr(self, f.name) for f in fields(self) if f.init}


def _external(name):
    return EXTERNAL_NAMES.get(name, name)


def make_parameters(raw: Mapping[str, float]) -> Parameters:
    """Validate a mapping of the eleven model fields and build :class:`Parameters`.

    Accepts either attribute names (``lam``, ``N``) or external names
    (``lambda``, ``bigN``).
    """
    values = {}
    for key, value in raw.items():
        name = ALIASES.get(key, key)
        if name not in FIELD_ORDER:
            raise ParameterError(key, "unknown parameter")
        values[name] = float(value)
    for name in FIELD_ORDER:
        if name not in values:
            raise MissingParameter(_external(name), "missing")
    return Parameters(**values)


@dataclass(frozen=True)
class InitialData:
    """``m + 1`` history states for ``k = -m .. 0``, oldest first."""

    history: np.ndarray

    def __post_init__(self):
        hist = np.array(self.history, dtype=np.float64)
        if hist.ndim != 2 or hist.shape[1] != 4 or hist.shape[0] < 1:
            raise ValueError(f"history must have shape (m+1, 4), got {hist.shape}")
        if not np.all(np.isfinite(hist)) or np.any(hist < 0):
            raise DomainError("history entries must be finite and >= 0")
        if not np.all(hist[-1] > 0):
            raise DomainError("the k = 0 history entry must be > 0 in every coordinate")
        hist.setflags(write=False)
        object.__setattr__(self, "history", hist)

    @classmethod
    def constant(cls, state, m):
        return cls(np.tile(np.asarray(state, dtype=np.float64), (m + 1, 1)))

    @property
    def m(self):
        return self.history.shape[0] - 1

    def is_constant(self):
        return bool(np.all(self.history == self.history[-1]))

    def to_delay_line(self):
        return DelayLine(self.history)

    def __eq__(self, other):
        if not isinstance(other, InitialData):
            return NotImplemented
        return np.array_equal(self.history, other.history)

    __hash__ = None


class DelayLine:
    """Sliding window of the last ``m + 1`` states (indices ``n - m .. n``)."""

    def __init__(self, window):
        window = np.array(window, dtype=np.float64)
        if window.ndim != 2 or window.shape[1] != 4 or window.shape[0] < 1:
            raise ValueError(f"window must have shape (m+1, 4), got {window.shape}")
        self._window = window

    @classmethod
    def constant(cls, state, m):
        return cls(np.tile(np.asarray(state, dtype=np.float64), (m + 1, 1)))

    @property
    def m(self):
        return self._window.shape[0] - 1

    @property
    def window(self):
        view = self._window.view()
        view.setflags(write=False)
        return view

    def lag(self, k):
        """State at index ``n - k``."""
        if not 0 <= k <= self.m:
            raise IndexError(f"lag {k} outside 0..{self.m}")
        return State(*(float(u) for u in self._window[self.m - k]))

    @property
    def newest(self):
        return self.lag(0)

    def push(self, state):
        self._window[:-1] = self._window[1:]
        self._window[-1] = state

    def copy(self):
        return DelayLine(self._window.copy())

    def __len__(self):
        return self._window.shape[0]


def _check_window(p, hist):
    if hist.m != p.m:
        raise ValueError(f"history holds m={hist.m} lags but parameters need m={p.m}")


def nsfd_step(p: Parameters, hist: DelayLine) -> State:
    """One explicit NSFD step, evaluated X -> Y -> V -> Z."""
    _check_window(p, hist)
    buf = kernels.new_buffer(hist.window, 1)
    kernels.step_into(buf, p.m, p.m, p.as_array())
    return State(*(float(u) for u in buf[-1]))


def _residual_terms(p, hist, nxt):
    """Left- and right-hand sides of the implicit scheme, per equation."""
    phi = p.phi
    x, y, v, z = hist.newest
    x1, y1, v1, z1 = nxt
    if p.m == 0:
        x_lag = x1
    else:
        x_lag = hist.lag(p.m - 1).x
    v_lag = hist.lag(p.m).v

    lhs = np.array([(x1 - x) / phi, (y1 - y) / phi, (v1 - v) / phi, (z1 - z) / phi])
    rhs = np.array([
        p.lam - p.d * x1 - p.beta * x1 * v,
        p.beta * x_lag * v_lag - p.a * y1 - p.p * y1 * z,
        p.a * p.N * y1 - p.mu * v1,
        p.c * x * y1 * z - p.s * z1,
    ])
    scale = np.array([
        (abs(x1) + abs(x)) / phi + p.lam + p.d * abs(x1) + p.beta * abs(x1 * v),
        (abs(y1) + abs(y)) / phi + p.beta * abs(x_lag * v_lag) + p.a * abs(y1)
        + p.p * abs(y1 * z),
        (abs(v1) + abs(v)) / phi + p.a * p.N * abs(y1) + p.mu * abs(v1),
        (abs(z1) + abs(z)) / phi + p.c * abs(x * y1 * z) + p.s * abs(z1),
    ])
    return lhs, rhs, scale


def implicit_residual(p: Parameters, hist: DelayLine, nxt) -> np.ndarray:
    """Left-minus-right residuals of the implicit scheme at a proposed next state.

    Independent of :func:`nsfd_step`: the equations are evaluated in their
    difference-quotient form rather than solved.
    """
    _check_window(p, hist)
    lhs, rhs, _ = _residual_terms(p, hist, nxt)
    return lhs - rhs


def relative_residual(p: Parameters, hist: DelayLine, nxt) -> np.ndarray:
    """Residuals divided by the sum of magnitudes of the terms in each equation."""
    _check_window(p, hist)
    lhs, rhs, scale = _residual_terms(p, hist, nxt)
    return (lhs - rhs) / np.where(scale > 0, scale, 1.0)
