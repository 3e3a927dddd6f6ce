"""Trajectory runner, convergence detection and boundedness monitors."""
from dataclasses import dataclass, replace
from typing import Optional

import numpy as np

from . import kernels
from .errors import MonitorsAbsent, WindowTooLarge
from .lyapunov import LyapunovSeries, lyapunov_series, n1_bound, q_rate
from .model import InitialData, Parameters, State

DEFAULT_TOL = 1e-6
DEFAULT_WINDOW = 100
DEFAULT_MAX_STEPS = 1_000_000
ABS_FLOOR = 1e-6
BOUND_RTOL = 1e-9


@dataclass(frozen=True)
class Monitors:
    """Per-step boundedness quantities.

    ``omega[n] = aN X_n + aN Y_{n+m} + (a/2) V_{n+m}`` for ``n = 0 .. steps - m``.
    ``n2[n] = c X_n beta X_{n-m+1} V_{n-m} / (p s)`` for ``n = 0 .. steps``.
    """

    omega: np.ndarray
    n2: np.ndarray
    in_gamma: np.ndarray


@dataclass(frozen=True)
class TrajectoryRecord:
    """A simulated run. ``buffer`` row ``k`` holds time index ``n = k - m``."""

    params: Parameters
    buffer: np.ndarray
    monitors: Optional[Monitors] = None
    lyapunov: Optional[LyapunovSeries] = None

    @property
    def m(self):
        return self.params.m

    @property
    def steps(self):
        return self.buffer.shape[0] - self.m - 1

    @property
    def states(self):
        """States for ``n = 0 .. steps``, shape ``(steps + 1, 4)``."""
        return self.buffer[self.m:]

    @property
    def times(self):
        return np.arange(self.steps + 1) * self.params.h

    @property
    def final(self):
        return State(*(float(u) for u in self.buffer[-1]))

    def history_tail(self):
        """Initial data that continues this run from its last state."""
        return InitialData(self.buffer[-(self.m + 1):])


@dataclass(frozen=True)
class ConvergenceVerdict:
    converged: bool
    limit: Optional[State]
    steps_used: int
    sup_error: float


@dataclass(frozen=True)
class BoundsReport:
    q: float
    n1: float
    omega_limsup_ok: bool
    z_bound_ok: bool
    recursion_ok: bool
    envelope_ok: bool
    worst_recursion_excess: float
    z_bound_violations: int


def _check_init(p, init):
    if init.m != p.m:
        raise ValueError(f"initial data holds m={init.m} lags but parameters need m={p.m}")


def run(p: Parameters, init: InitialData, steps: int,
        record_monitors: bool = False) -> TrajectoryRecord:
    """Iterate the NSFD map ``steps`` times from ``init``."""
    if steps < 1:
        raise ValueError("steps must be >= 1")
    _check_init(p, init)
    buf = kernels.new_buffer(init.history, steps)
    kernels.advance(buf, p.m, p.m, buf.shape[0] - 1, p.as_array())
    traj = TrajectoryRecord(p, buf)
    if record_monitors:
        traj = replace(traj, monitors=compute_monitors(traj))
    return traj


def extend(traj: TrajectoryRecord, steps: int) -> TrajectoryRecord:
    """Continue a run by ``steps`` more steps; monitors are dropped."""
    old = traj.buffer
    buf = np.empty((old.shape[0] + steps, 4))
    buf[: old.shape[0]] = old
    kernels.advance(buf, traj.m, old.shape[0] - 1, buf.shape[0] - 1, traj.params.as_array())
    return TrajectoryRecord(traj.params, buf)


def with_lyapunov(traj: TrajectoryRecord, target) -> TrajectoryRecord:
    return replace(traj, lyapunov=lyapunov_series(traj.params, traj.buffer, target))


def _relative_spread(block, limit, floor=ABS_FLOOR):
    scale = np.maximum(np.abs(limit), floor)
    return float(np.max(np.abs(block - limit) / scale))


def detect_convergence(traj: TrajectoryRecord, tol: float = DEFAULT_TOL,
                       window: int = DEFAULT_WINDOW) -> ConvergenceVerdict:
    """Converged iff the trailing ``window`` states vary by at most ``tol``.

    Variation is the sup-norm distance to the window mean, relative per
    coordinate with an absolute floor of ``1e-6`` so zero components are
    measured absolutely.
    """
    states = traj.states
    if window < 1 or window > states.shape[0]:
        raise WindowTooLarge(f"window {window} exceeds {states.shape[0]} recorded states")
    block = states[-window:]
    limit = block.mean(axis=0)
    err = _relative_spread(block, limit)
    converged = err <= tol
    return ConvergenceVerdict(converged, State(*(float(u) for u in limit)),
                              traj.steps, err)


def run_to_convergence(p: Parameters, init: InitialData, tol: float = DEFAULT_TOL,
                       window: int = DEFAULT_WINDOW, max_steps: int = DEFAULT_MAX_STEPS,
                       first_chunk: int = 4096):
    """Run in doubling chunks until :func:`detect_convergence` succeeds.

    Returns ``(trajectory, verdict)``; on budget exhaustion the verdict has
    ``converged=False``.
    """
    steps = max(min(first_chunk, max_steps), window)
    traj = run(p, init, steps)
    verdict = detect_convergence(traj, tol, window)
    while not verdict.converged and traj.steps < max_steps:
        more = min(traj.steps, max_steps - traj.steps)
        traj = extend(traj, more)
        verdict = detect_convergence(traj, tol, window)
    return traj, verdict


def compute_monitors(traj: TrajectoryRecord) -> Monitors:
    """Second pass over a finished run: Omega, per-step N2 and region membership."""
    p, m, buf = traj.params, traj.m, traj.buffer
    steps = traj.steps
    an = p.a * p.N
    x = buf[m:, 0]
    count = max(steps - m + 1, 0)
    omega = an * x[:count] + an * buf[2 * m:, 1] + p.a / 2 * buf[2 * m:, 2]
    # X_{n-m+1} sits one row after V_{n-m}; with m = 0 the last one is not computed yet
    rows = np.arange(steps + 1)
    x_lag = np.full(steps + 1, np.nan)
    avail = buf[1:steps + 2, 0]
    x_lag[: avail.size] = avail
    n2 = p.c * x * p.beta * x_lag * buf[rows, 2] / (p.p * p.s)
    n1 = n1_bound(p)
    st = traj.states
    in_gamma = (np.all(st[:, :3] > 0, axis=1) & np.all(st[:, :3] <= n1, axis=1)
                & (st[:, 3] < n2))
    return Monitors(omega, n2, in_gamma)


def bounds_report(traj: TrajectoryRecord, rtol: float = BOUND_RTOL) -> BoundsReport:
    """Check the Omega recursion, its explicit envelope and the Z bound.

    The Z check compares ``Z_{n+1}`` with the bound built from step ``n`` over
    the trailing half of the run, where the transient factor has decayed.
    """
    if traj.monitors is None:
        raise MonitorsAbsent("trajectory was run without record_monitors")
    p = traj.params
    mon = traj.monitors
    q = q_rate(p)
    n1 = n1_bound(p)
    phi = p.phi
    omega = mon.omega

    source = p.a * p.N * p.lam * phi
    lhs = omega[1:] * (1 + q * phi)
    rhs = source + omega[:-1]
    if lhs.size:
        excess = (lhs - rhs) / np.abs(rhs)
        worst = float(excess.max())
    else:
        worst = -np.inf
    recursion_ok = worst <= rtol

    r = 1.0 / (1.0 + q * phi)
    decay = r ** np.arange(omega.size)
    if omega.size:
        envelope = decay * omega[0] + n1 * (1 - decay)
        envelope_ok = bool(np.all(omega <= envelope * (1 + rtol)))
    else:
        envelope_ok = True

    states = traj.states
    half = states.shape[0] // 2
    tail_ok = bool(np.all(states[half:, :3] <= n1 * (1 + 1e-6)))

    z_next = states[1:, 3]
    n2 = mon.n2[:-1]
    finite = np.isfinite(n2)
    start = half
    z_viol = int(np.count_nonzero((z_next[start:] > n2[start:] * (1 + rtol)) & finite[start:]))

    return BoundsReport(q, n1, recursion_ok and envelope_ok and tail_ok, z_viol == 0,
                        recursion_ok, envelope_ok, worst, z_viol)
