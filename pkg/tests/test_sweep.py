import numpy as np
import pytest

from nsfd_hiv import EmptySweep, InitialData, SweepGrid, equilibrium_set, run_sweep, sweep_summary
from nsfd_hiv.sweep import UNRESOLVED, SweepCell, classify_observed, match_distance, run_cell

from conftest import SET_I, SET_II, case_params


def test_match_distance_floor():
    assert match_distance((10, 1e-9, 0, 0), (10, 0, 0, 0)) == pytest.approx(1e-3)
    assert match_distance((11, 0, 0, 0), (10, 0, 0, 0)) == pytest.approx(0.1)


def test_classify_observed_reference_limits():
    eqs = equilibrium_set(case_params("III"))
    assert classify_observed((9.3, 0.21505, 10.7527, 1254.9), eqs) == "ImmuneEndemic"
    assert classify_observed((9.0, 0.3, 10.0, 1.0), eqs) == UNRESOLVED


@pytest.mark.parametrize("case, init, regime", [
    ("I", SET_I, "DiseaseFreeStable"),
    ("II", SET_I, "NoImmuneEndemic"),
    ("III", SET_II, "ImmuneEndemic"),
])
def test_reference_cells(case, init, regime):
    p = case_params(case)
    grid = SweepGrid(p, [p.beta], [p.c])
    cell = run_cell(grid, p.tau, p.beta, p.c, init)
    assert cell.predicted == regime and cell.observed == regime and cell.agree
    assert cell.converged and not cell.near_threshold


def test_zero_beta_cell_is_disease_free():
    p = case_params("I")
    cell = run_cell(SweepGrid(p, [0.0], [0.01]), p.tau, 0.0, 0.01, SET_I)
    assert cell.r0 == 0.0
    assert cell.observed == cell.predicted == "DiseaseFreeStable"


def test_invalid_cell_reports_error():
    p = case_params("I")
    cell = run_cell(SweepGrid(p, [-1.0], [0.01]), p.tau, -1.0, 0.01, SET_I)
    assert cell.error and not cell.agree


def test_tau_axis_reexpands_constant_history():
    p = case_params("II")
    grid = SweepGrid(p, [p.beta], [p.c], tau_values=[0.0, 1.0, 3.0])
    cells = run_sweep(grid, InitialData.constant(SET_I, p.m))
    assert [c.tau for c in cells] == [0.0, 1.0, 3.0]
    assert all(c.agree for c in cells)


def test_empty_summary_raises():
    with pytest.raises(EmptySweep):
        sweep_summary([])


def test_summary_bookkeeping():
    cells = [
        SweepCell(1e-4, 0.01, 2.0, observed="DiseaseFreeStable", predicted="DiseaseFreeStable",
                  agree=True),
        SweepCell(2e-4, 0.01, 2.0, observed=UNRESOLVED, predicted="NoImmuneEndemic"),
        SweepCell(3e-4, 0.01, 2.0, observed=UNRESOLVED, predicted="NoImmuneEndemic",
                  near_threshold=True),
        SweepCell(4e-4, 0.01, 2.0, error="bad"),
    ]
    s = sweep_summary(cells)
    assert (s.total, s.counted, s.near_threshold, s.errors) == (4, 2, 1, 1)
    assert s.agreement_rate == 0.5
    assert len(s.unresolved) == 2 and len(s.disagreeing) == 1
    assert sweep_summary(cells, include_near_threshold=True).counted == 3


def test_small_grid_deterministic_across_workers():
    p = case_params("I")
    grid = SweepGrid(p, np.linspace(1e-4, 1e-3, 3), [0.001, 0.1, 0.2])
    serial = run_sweep(grid, SET_I)
    threaded = run_sweep(grid, SET_I, workers=4)
    assert serial == threaded
    for cell in serial:
        # predicted regime is coherent with the reported thresholds
        if cell.r0 <= 1:
            assert cell.predicted == "DiseaseFreeStable"
        elif cell.r1 <= 1:
            assert cell.predicted == "NoImmuneEndemic"
        else:
            assert cell.predicted == "ImmuneEndemic"
