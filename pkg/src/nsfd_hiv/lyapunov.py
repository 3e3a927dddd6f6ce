"""Discrete Lyapunov functionals for the three equilibria.

Each functional is built from ``G(x) = x - ln x - 1`` plus a delay sum over
``X_{j+1} V_j`` for ``j = n - m .. n - 1``. Point evaluators take a
:class:`~nsfd_hiv.model.DelayLine` (one value at index ``n``); the series
functions evaluate a whole trajectory at once.
"""
import enum
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .equilibria import YOrderWitness, check_y_order, equilibrium_set, reproduction_numbers
from .errors import DomainError, NotApplicable
from .model import DelayLine, Parameters, State

MONOTONE_RTOL = 1e-9


class Target(str, enum.Enum):
    E0 = "e0"
    ESTAR = "estar"
    EBAR = "ebar"

    def __str__(self):
        return self.value


def g(x):
    """``x - ln(x) - 1`` for ``x > 0``; scalar in, scalar out."""
    arr = np.asarray(x, dtype=np.float64)
    if np.any(~(arr > 0)):
        raise DomainError(f"G is defined for x > 0 only, got {x!r}")
    dx = arr - 1.0
    # log1p keeps accuracy near the minimum at x = 1
    out = dx - np.log1p(dx)
    if out.ndim == 0:
        return float(out)
    return out


def n1_bound(p: Parameters) -> float:
    """Ultimate bound ``a N lambda / Q`` with ``Q = min(d, a/2, mu)``."""
    return p.a * p.N * p.lam / q_rate(p)


def q_rate(p: Parameters) -> float:
    return min(p.d, p.a / 2, p.mu)


def _window(p, hist):
    if hist.m != p.m:
        raise ValueError(f"history holds m={hist.m} lags but parameters need m={p.m}")
    return hist.window


def lyapunov_e0(p: Parameters, hist: DelayLine, n1: Optional[float] = None) -> float:
    w = _window(p, hist)
    if n1 is None:
        n1 = n1_bound(p)
    phi = p.phi
    x0 = p.lam / p.d
    x, y, v, z = w[-1]
    delay = 0.0
    for i in range(p.m):
        delay += p.beta * w[i + 1, 0] * w[i, 2]
    bracket = (x0 * g(x / x0) + y + (1 + p.mu * phi) / p.N * v
               + p.p / (p.c * n1) * (1 + p.s * phi) * z)
    return bracket / phi + delay


def lyapunov_estar(p: Parameters, hist: DelayLine, e_star: State,
                   n1: Optional[float] = None) -> float:
    w = _window(p, hist)
    if n1 is None:
        n1 = n1_bound(p)
    xs, ys, vs, _ = e_star
    phi = p.phi
    x, y, v, z = w[-1]
    delay = 0.0
    for i in range(p.m):
        delay += g(w[i + 1, 0] * w[i, 2] / (xs * vs))
    bracket = (xs * g(x / xs) + ys * g(y / ys)
               + (1 + p.mu * phi) * vs / p.N * g(v / vs)
               + p.p * (1 + p.s * phi) / (p.c * n1) * z)
    return bracket / phi + p.beta * xs * vs * delay


def lyapunov_ebar(p: Parameters, hist: DelayLine, e_bar: State) -> float:
    """Immune-equilibrium functional, with both ``G(Z/Zbar)`` terms kept."""
    if not reproduction_numbers(p).r1 > 1:
        raise NotApplicable("immune-equilibrium functional needs R1 > 1")
    w = _window(p, hist)
    xb, yb, vb, zb = e_bar
    phi = p.phi
    x, y, v, z = w[-1]
    delay = 0.0
    for i in range(p.m):
        delay += g(w[i + 1, 0] * w[i, 2] / (xb * vb))
    gz = g(z / zb)
    bracket = (xb * g(x / xb) + yb * g(y / yb)
               + p.beta * xb * vb * (1 + p.mu * phi) / p.mu * g(v / vb)
               + p.p * zb / (p.c * xb) * gz)
    return p.beta * xb * vb * delay + p.p * yb * zb * gz + bracket / phi


@dataclass(frozen=True)
class LyapunovSeries:
    """Functional values for ``n = 0 .. steps`` of one trajectory."""

    target: Target
    values: np.ndarray
    m: int
    y_order: Optional[YOrderWitness] = None

    @property
    def deltas(self):
        return np.diff(self.values)


@dataclass(frozen=True)
class MonotonicityVerdict:
    ok: bool
    start: int
    worst_excess: float
    worst_n: int
    violations: int

    def describe(self):
        status = "PASS" if self.ok else "FAIL"
        return (f"monotonicity {status}: n >= {self.start}, "
                f"max relative increase {self.worst_excess:.3e} at n={self.worst_n}, "
                f"violations={self.violations}")


def _delay_sums(buf, m, weights):
    """``sum_{j=n-m}^{n-1} weights[j]`` for every n, with ``weights[j']`` at
    buffer row ``j'`` (``j = j' - m``)."""
    cs = np.concatenate(([0.0], np.cumsum(weights)))
    n_vals = buf.shape[0] - m
    idx = np.arange(n_vals)
    return cs[idx + m] - cs[idx]


def series_e0(p: Parameters, buf: np.ndarray, n1: Optional[float] = None) -> np.ndarray:
    if n1 is None:
        n1 = n1_bound(p)
    m, phi = p.m, p.phi
    x0 = p.lam / p.d
    x, y, v, z = buf[m:].T
    delay = _delay_sums(buf, m, p.beta * buf[1:, 0] * buf[:-1, 2])
    bracket = (x0 * g(x / x0) + y + (1 + p.mu * phi) / p.N * v
               + p.p / (p.c * n1) * (1 + p.s * phi) * z)
    return bracket / phi + delay


def series_estar(p: Parameters, buf: np.ndarray, e_star: State,
                 n1: Optional[float] = None) -> np.ndarray:
    if n1 is None:
        n1 = n1_bound(p)
    m, phi = p.m, p.phi
    xs, ys, vs, _ = e_star
    x, y, v, z = buf[m:].T
    delay = _delay_sums(buf, m, g(buf[1:, 0] * buf[:-1, 2] / (xs * vs)))
    bracket = (xs * g(x / xs) + ys * g(y / ys)
               + (1 + p.mu * phi) * vs / p.N * g(v / vs)
               + p.p * (1 + p.s * phi) / (p.c * n1) * z)
    return bracket / phi + p.beta * xs * vs * delay


def series_ebar(p: Parameters, buf: np.ndarray, e_bar: State) -> np.ndarray:
    m, phi = p.m, p.phi
    xb, yb, vb, zb = e_bar
    x, y, v, z = buf[m:].T
    delay = _delay_sums(buf, m, g(buf[1:, 0] * buf[:-1, 2] / (xb * vb)))
    gz = g(z / zb)
    bracket = (xb * g(x / xb) + yb * g(y / yb)
               + p.beta * xb * vb * (1 + p.mu * phi) / p.mu * g(v / vb)
               + p.p * zb / (p.c * xb) * gz)
    return p.beta * xb * vb * delay + p.p * yb * zb * gz + bracket / phi


def lyapunov_series(p: Parameters, buf: np.ndarray, target) -> LyapunovSeries:
    """Evaluate the functional for ``target`` along a trajectory buffer.

    ``buf`` has the history rows first (see :mod:`nsfd_hiv.kernels`). Raises
    :class:`NotApplicable` when the target equilibrium does not exist.
    """
    target = Target(target)
    eqs = equilibrium_set(p)
    r0, r1 = eqs.numbers
    if target is Target.E0:
        return LyapunovSeries(target, series_e0(p, buf), p.m)
    if target is Target.ESTAR:
        if not (r1 <= 1 < r0):
            raise NotApplicable(f"E* functional needs R1 <= 1 < R0, got R0={r0!r}, R1={r1!r}")
        try:
            witness = check_y_order(p)
        except NotApplicable:
            witness = None
        return LyapunovSeries(target, series_estar(p, buf, eqs.e_star), p.m, witness)
    if eqs.e_bar is None:
        raise NotApplicable(f"immune-equilibrium functional needs R1 > 1, got R1={r1!r}")
    return LyapunovSeries(target, series_ebar(p, buf, eqs.e_bar), p.m)


def check_monotone(series: LyapunovSeries, rtol: float = MONOTONE_RTOL,
                   start: Optional[int] = None) -> MonotonicityVerdict:
    """Check ``L[n+1] - L[n] <= rtol * (1 + |L[n]|)`` for all ``n >= start``.

    ``start`` defaults to ``m``: the first index whose delay sum is built only
    from simulated states.
    """
    if start is None:
        start = series.m
    vals = series.values[start:]
    if vals.size < 2:
        return MonotonicityVerdict(True, start, -np.inf, start, 0)
    excess = np.diff(vals) / (1.0 + np.abs(vals[:-1]))
    worst = int(np.argmax(excess))
    violations = int(np.count_nonzero(excess > rtol))
    return MonotonicityVerdict(violations == 0, start, float(excess[worst]),
                               start + worst, violations)
