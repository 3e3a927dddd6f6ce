"""Parameter-grid scan over (beta, c[, tau]) with regime cross-checking."""
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import List, Optional, Sequence

import numpy as np

from .equilibria import Regime, equilibrium_set, classify_regime
from .errors import EmptySweep, NsfdError
from .model import InitialData, Parameters, State
from .simulate import DEFAULT_TOL, DEFAULT_WINDOW, run_to_convergence

UNRESOLVED = "Unresolved"
MATCH_RTOL = 1e-2
MATCH_FLOOR = 1e-6
THRESHOLD_MARGIN = 0.05

_NAME_TO_REGIME = {
    "e0": Regime.DISEASE_FREE_STABLE,
    "e_star": Regime.NO_IMMUNE_ENDEMIC,
    "e_bar": Regime.IMMUNE_ENDEMIC,
}


@dataclass(frozen=True)
class SweepGrid:
    base: Parameters
    beta_values: Sequence[float]
    c_values: Sequence[float]
    tau_values: Optional[Sequence[float]] = None
    h: Optional[float] = None
    sim_budget: int = 1_000_000
    tol: float = DEFAULT_TOL
    window: int = DEFAULT_WINDOW

    def cells(self):
        """Grid coordinates in row-major order ``(tau, beta, c)``."""
        taus = self.tau_values if self.tau_values is not None else [self.base.tau]
        return [(tau, beta, c) for tau in taus for beta in self.beta_values
                for c in self.c_values]


@dataclass(frozen=True)
class SweepCell:
    beta: float
    c: float
    tau: float
    r0: float = float("nan")
    r1: float = float("nan")
    predicted: Optional[str] = None
    observed: str = UNRESOLVED
    agree: bool = False
    sup_error: float = float("nan")
    converged: bool = False
    steps: int = 0
    near_threshold: bool = False
    error: Optional[str] = None


@dataclass(frozen=True)
class SweepSummary:
    total: int
    counted: int
    agreement_rate: float
    disagreeing: List[SweepCell] = field(default_factory=list)
    unresolved: List[SweepCell] = field(default_factory=list)
    near_threshold: int = 0
    errors: int = 0


def match_distance(state, target, floor=MATCH_FLOOR):
    """Relative sup-norm distance with an absolute floor per coordinate."""
    s = np.asarray(state, dtype=np.float64)
    t = np.asarray(target, dtype=np.float64)
    return float(np.max(np.abs(s - t) / np.maximum(np.abs(t), floor)))


def classify_observed(limit: State, eqs, rtol=MATCH_RTOL):
    """Name of the nearest present equilibrium within ``rtol``, else Unresolved."""
    best_name, best = None, np.inf
    for name, eq in eqs.present():
        dist = match_distance(limit, eq)
        if dist < best:
            best_name, best = name, dist
    if best <= rtol:
        return _NAME_TO_REGIME[best_name].value
    return UNRESOLVED


def _init_for(init, m):
    if isinstance(init, InitialData):
        if init.m == m:
            return init
        if init.is_constant():
            return InitialData.constant(init.history[-1], m)
        raise ValueError(f"non-constant history of m={init.m} cannot serve m={m}")
    return InitialData.constant(init, m)


def run_cell(grid: SweepGrid, tau, beta, c, init) -> SweepCell:
    try:
        changes = {"tau": tau, "beta": beta, "c": c}
        if grid.h is not None:
            changes["h"] = grid.h
        p = grid.base.with_(**changes)
        eqs = equilibrium_set(p)
        r0, r1 = eqs.numbers
        predicted = classify_regime(eqs.numbers, eqs).kind.value
        near = abs(r0 - 1) <= THRESHOLD_MARGIN or abs(r1 - 1) <= THRESHOLD_MARGIN
        traj, verdict = run_to_convergence(p, _init_for(init, p.m), grid.tol, grid.window,
                                           grid.sim_budget)
        observed = classify_observed(verdict.limit, eqs)
    except (NsfdError, ValueError) as exc:
        return SweepCell(beta, c, tau, error=str(exc))
    return SweepCell(beta, c, tau, r0, r1, predicted, observed,
                     observed == predicted, verdict.sup_error, verdict.converged,
                     traj.steps, near)


def run_sweep(grid: SweepGrid, init, workers: Optional[int] = None) -> List[SweepCell]:
    """Simulate every grid cell; results are in grid order whatever ``workers`` is.

    ``init`` is a state (constant history) or :class:`InitialData`. Invalid
    cells are reported with ``error`` set instead of aborting the sweep.
    """
    coords = grid.cells()
    if workers is None or workers <= 1:
        return [run_cell(grid, tau, beta, c, init) for tau, beta, c in coords]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        futures = [pool.submit(run_cell, grid, tau, beta, c, init) for tau, beta, c in coords]
        return [f.result() for f in futures]


def sweep_summary(cells: Sequence[SweepCell], include_near_threshold: bool = False) -> SweepSummary:
    if not cells:
        raise EmptySweep("no cells to summarise")
    counted = [cell for cell in cells
               if cell.error is None and (include_near_threshold or not cell.near_threshold)]
    disagree = [cell for cell in counted if not cell.agree]
    unresolved = [cell for cell in cells if cell.error is None and cell.observed == UNRESOLVED]
    rate = (len(counted) - len(disagree)) / len(counted) if counted else float("nan")
    return SweepSummary(
        total=len(cells),
        counted=len(counted),
        agreement_rate=rate,
        disagreeing=disagree,
        unresolved=unresolved,
        near_threshold=sum(cell.near_threshold for cell in cells),
        errors=sum(cell.error is not None for cell in cells),
    )
