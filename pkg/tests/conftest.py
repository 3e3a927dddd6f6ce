import numpy as np
import pytest

from nsfd_hiv import InitialData, make_parameters

BASE_PARAMS = dict(lam=1.0, d=0.1, p=0.0001, s=0.2, a=0.2, mu=3.0, N=750.0, tau=2.0, h=0.1)
CASES = {
    "I": dict(beta=0.00025, c=0.005),
    "II": dict(beta=0.0005, c=0.01),
    "III": dict(beta=0.0007, c=0.1),
}
SET_I = (5.0, 1.0, 1.0, 2.0)
SET_II = (15.0, 2.0, 1.0, 4.0)
CASE_INIT = {"I": SET_I, "II": SET_I, "III": SET_II}

# parameter ranges from the literature table (s is the CTL death rate)
TABLE1 = {
    "lam": (1.0, 10.0),
    "d": (0.007, 0.1),
    "beta": (0.00025, 0.5),
    "a": (0.2, 0.3),
    "mu": (2.06, 3.81),
    "N": (6.25, 23599.9),
    "p": (1e-4, 4.048e-4),
    "c": (0.0051, 3.912),
    "s": (0.004, 8.087),
}


def case_params(case, **overrides):
    raw = dict(BASE_PARAMS, **CASES[case])
    raw.update(overrides)
    return make_parameters(raw)


def case_init(case, p):
    return InitialData.constant(CASE_INIT[case], p.m)


def table1_draw(rng, h=0.1, tau_range=(7, 21)):
    """Log-uniform draw over the table ranges, integer-day delay."""
    raw = {k: float(np.exp(rng.uniform(np.log(lo), np.log(hi)))) for k, (lo, hi) in TABLE1.items()}
    raw["tau"] = float(rng.integers(tau_range[0], tau_range[1] + 1))
    raw["h"] = h
    return make_parameters(raw)


@pytest.fixture
def rng():
    return np.random.default_rng(20240601)


_ACCEPTANCE_LINES = []


@pytest.fixture
def criterion(request):
    """Record one PASS/FAIL line per acceptance criterion for the summary."""
    record = {}

    def report(label, passed, detail=""):
        record.update(label=label, passed=bool(passed), detail=detail)
        return passed

    yield report
    if record:
        status = "PASS" if record["passed"] else "FAIL"
        _ACCEPTANCE_LINES.append(f"[{status}] {record['label']}: {record['detail']}")


def pytest_terminal_summary(terminalreporter):
    if _ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in _ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
