"""Acceptance gate: one PASS/FAIL line per criterion in the terminal summary.

Run with ``pytest tests/test_acceptance.py -v``. Runtime budgets are checked
after a one-step warm-up so JIT compilation is not billed to a criterion.
"""
import subprocess
import sys
import time
from pathlib import Path

import numpy as np
import pytest

from nsfd_hiv import (
    DelayLine,
    InitialData,
    SweepGrid,
    bounds_report,
    check_monotone,
    equilibrium_set,
    lyapunov_e0,
    lyapunov_ebar,
    lyapunov_estar,
    lyapunov_series,
    make_parameters,
    nsfd_step,
    reproduction_numbers,
    run,
    run_sweep,
    run_to_convergence,
    sweep_summary,
)
from nsfd_hiv.model import relative_residual

from conftest import CASE_INIT, TABLE1, case_init, case_params, table1_draw

pytestmark = pytest.mark.acceptance

ROOT = Path(__file__).resolve().parent.parent
CASE3_EBAR = (9.3, 0.215, 10.75, 1255.0)


@pytest.fixture(scope="module", autouse=True)
def warm_up():
    p = case_params("I")
    run(p, case_init("I", p), 1)


def _rel(a, b, floor=None):
    a, b = np.asarray(a, float), np.asarray(b, float)
    scale = np.abs(b) if floor is None else np.maximum(np.abs(b), floor)
    return float(np.max(np.abs(a - b) / scale))


def test_c01_reproduction_numbers(criterion):
    expected = {"I": (0.625, 0.3125), "II": (1.25, 0.625), "III": (1.75, 1.6275)}
    worst = max(_rel(reproduction_numbers(case_params(c)), v) for c, v in expected.items())
    ok = worst <= 1e-12
    criterion("1 reproduction numbers", ok, f"worst relative error {worst:.2e} (tol 1e-12)")
    assert ok


def test_c02_equilibria(criterion):
    e2 = equilibrium_set(case_params("II")).e_star
    e3 = equilibrium_set(case_params("III")).e_bar
    e0 = equilibrium_set(case_params("I")).e0
    err2, err3 = _rel(e2[:3], (8, 1, 50)), _rel(e3, CASE3_EBAR)
    ok = err2 <= 1e-9 and e2[3] == 0 and err3 <= 5e-3 and tuple(e0) == (10, 0, 0, 0)
    criterion("2 equilibria", ok,
              f"E* err {err2:.2e} (tol 1e-9), Ebar err {err3:.2e} (tol 5e-3), E0 {tuple(e0)}")
    assert ok


def test_c03_fixed_point_oracle(criterion, rng):
    t0 = time.perf_counter()
    worst, checks = 0.0, 0
    for case in ("I", "II", "III"):
        for m in rng.integers(2, 201, size=100):
            p = case_params(case, h=2.0 / m)
            for _, state in equilibrium_set(p).present():
                out = nsfd_step(p, DelayLine.constant(state, p.m))
                worst = max(worst, float(np.max(np.abs(np.subtract(out, state)))))
                checks += 1
    elapsed = time.perf_counter() - t0
    ok = worst <= 1e-10 and elapsed < 1.0
    criterion("3 fixed-point oracle", ok,
              f"{checks} steps, worst abs error {worst:.2e} (tol 1e-10), {elapsed:.2f}s")
    assert ok


def _random_case(rng):
    raw = {k: float(np.exp(rng.uniform(np.log(lo), np.log(hi)))) for k, (lo, hi) in TABLE1.items()}
    h = float(rng.choice([0.01, 0.05, 0.1, 0.25, 0.5, 1.0]))
    m = int(rng.integers(0, 21))
    p = make_parameters(dict(raw, tau=m * h, h=h))
    hist = DelayLine(np.exp(rng.uniform(np.log(1e-3), np.log(1e3), size=(m + 1, 4))))
    return p, hist


def test_c04_implicit_explicit_equivalence(criterion, rng):
    cases = [_random_case(rng) for _ in range(10_000)]
    t0 = time.perf_counter()
    worst = max(float(np.max(np.abs(relative_residual(p, h, nsfd_step(p, h)))))
                for p, h in cases)
    elapsed = time.perf_counter() - t0
    ok = worst <= 1e-12 and elapsed < 1.0
    criterion("4 implicit-explicit equivalence", ok,
              f"10000 draws, worst relative residual {worst:.2e} (tol 1e-12), {elapsed:.2f}s")
    assert ok


def test_c05_regime_convergence(criterion):
    targets = {"I": ((10, 0, 0, 0), 1e-3), "II": ((8, 1, 50, 0), 1e-3), "III": (CASE3_EBAR, 1e-2)}
    details, ok = [], True
    for case, (target, tol) in targets.items():
        p = case_params(case)
        t0 = time.perf_counter()
        traj, verdict = run_to_convergence(p, case_init(case, p), max_steps=10**6)
        elapsed = time.perf_counter() - t0
        if case == "I":
            err = float(np.max(np.abs(np.subtract(verdict.limit, target))))
        else:
            err = _rel(verdict.limit, target, floor=1.0)
        good = verdict.converged and err <= tol and traj.steps <= 10**6 and elapsed <= 5
        ok &= good
        details.append(f"{case}: err {err:.1e} in {traj.steps} steps {elapsed:.2f}s")
    criterion("5 regime convergence", ok, "; ".join(details))
    assert ok


def test_c06_positivity_and_boundedness(criterion, rng):
    t0 = time.perf_counter()
    negatives, worst = 0, -np.inf
    for _ in range(1000):
        p = table1_draw(rng)
        init = InitialData.constant(np.exp(rng.uniform(np.log(0.1), np.log(100), size=4)), p.m)
        traj = run(p, init, 2000, record_monitors=True)
        negatives += int(not np.all(traj.states > 0))
        worst = max(worst, bounds_report(traj).worst_recursion_excess)
    elapsed = time.perf_counter() - t0
    ok = negatives == 0 and worst <= 1e-9 and elapsed < 30
    criterion("6 positivity and boundedness", ok,
              f"1000 draws x 2000 steps, non-positive runs {negatives}, "
              f"worst recursion excess {worst:.1e} (tol 1e-9), {elapsed:.1f}s")
    assert ok


def test_c07_lyapunov_certificates(criterion):
    specs = {"I": ("e0", lyapunov_e0), "II": ("estar", lyapunov_estar),
             "III": ("ebar", lyapunov_ebar)}
    details, ok = [], True
    for case, (target, point) in specs.items():
        p = case_params(case)
        eqs = equilibrium_set(p)
        t0 = time.perf_counter()
        traj = run(p, case_init(case, p), 100_000)
        series = lyapunov_series(p, traj.buffer, target)
        verdict = check_monotone(series)
        elapsed = time.perf_counter() - t0
        tends_to_zero = abs(series.values[-1]) <= 1e-6 * max(1.0, abs(series.values[p.m]))
        eq = {"e0": eqs.e0, "estar": eqs.e_star, "ebar": eqs.e_bar}[target]
        args = () if target == "e0" else (eq,)
        at_eq = point(p, DelayLine.constant(eq, p.m), *args)
        good = verdict.ok and tends_to_zero and abs(at_eq) <= 1e-12 and elapsed < 5
        ok &= good
        details.append(f"{case}/{target}: {'ok' if good else 'FAIL'} "
                       f"({verdict.violations} increases, worst {verdict.worst_excess:.2e} "
                       f"at n={verdict.worst_n}; final {series.values[-1]:.1e}; "
                       f"at equilibrium {at_eq:.0e}; {elapsed:.2f}s)")
    criterion("7 Lyapunov certificates", ok, "; ".join(details))
    assert ok


def test_c08_step_size_consistency(criterion):
    t0 = time.perf_counter()
    limits = []
    for h in (0.05, 0.1, 0.5, 1.0):
        p = case_params("II", h=h)
        _, verdict = run_to_convergence(p, case_init("II", p))
        limits.append(verdict.limit)
    elapsed = time.perf_counter() - t0
    spread = max(_rel(lim, limits[1], floor=1.0) for lim in limits)
    err = max(_rel(lim, (8, 1, 50, 0), floor=1.0) for lim in limits)
    ok = spread <= 1e-3 and err <= 1e-3 and elapsed < 10
    criterion("8 step-size consistency", ok,
              f"spread across h {spread:.1e}, distance to E* {err:.1e} (tol 1e-3), {elapsed:.2f}s")
    assert ok


def test_c09_sweep_agreement(criterion):
    grid = SweepGrid(case_params("I"), np.linspace(1e-4, 1e-3, 11), np.linspace(1e-3, 0.2, 11))
    t0 = time.perf_counter()
    cells = run_sweep(grid, CASE_INIT["I"], workers=4)
    elapsed = time.perf_counter() - t0
    summary = sweep_summary(cells)
    ok = summary.counted > 0 and summary.agreement_rate == 1.0 and summary.errors == 0 \
        and elapsed < 120
    criterion("9 sweep agreement", ok,
              f"{summary.counted}/{summary.total} cells counted, agreement "
              f"{summary.agreement_rate:.3f}, {elapsed:.1f}s")
    assert ok


def test_c10_determinism(criterion, tmp_path):
    outputs = []
    for i in range(2):
        out = tmp_path / f"run{i}.csv"
        subprocess.run([sys.executable, "-m", "nsfd_hiv", "simulate",
                        str(ROOT / "configs" / "case3.cfg"), "-o", str(out)],
                       check=True, capture_output=True)
        outputs.append(out.read_bytes())
    ok = outputs[0] == outputs[1] and len(outputs[0]) > 0
    criterion("10 determinism", ok, f"two simulate runs, {len(outputs[0])} bytes each, "
              f"{'identical' if ok else 'different'}")
    assert ok
