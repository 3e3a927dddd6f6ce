"""Nonstandard finite-difference simulation of a delayed HIV model with CTL response."""
from .equilibria import (
    EquilibriumSet,
    Regime,
    RegimeClassification,
    ReproductionNumbers,
    check_y_order,
    classify_regime,
    equilibrium_set,
    reproduction_numbers,
)
from .errors import (
    DomainError,
    EmptySweep,
    MonitorsAbsent,
    NonIntegerDelayRatio,
    NonPositiveParameter,
    NotApplicable,
    ParseError,
    SinkError,
    ValidationError,
    WindowTooLarge,
)
from .kernels import USE_NUMBA
from .lyapunov import (
    LyapunovSeries,
    Target,
    check_monotone,
    g,
    lyapunov_e0,
    lyapunov_ebar,
    lyapunov_estar,
    lyapunov_series,
)
from .model import (
    DelayLine,
    InitialData,
    Parameters,
    State,
    implicit_residual,
    make_parameters,
    nsfd_step,
)
from .simulate import (
    BoundsReport,
    ConvergenceVerdict,
    TrajectoryRecord,
    bounds_report,
    detect_convergence,
    run,
    run_to_convergence,
)
from .sweep import SweepCell, SweepGrid, run_sweep, sweep_summary

__version__ = "0.1.0"
