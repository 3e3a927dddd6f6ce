"""Equilibria, reproduction numbers and regime classification."""
import enum
from dataclasses import dataclass
from typing import NamedTuple, Optional

from .errors import NotApplicable
from .model import Parameters, State


class ReproductionNumbers(NamedTuple):
    r0: float
    r1: float


class Regime(enum.Enum):
    DISEASE_FREE_STABLE = "DiseaseFreeStable"
    NO_IMMUNE_ENDEMIC = "NoImmuneEndemic"
    IMMUNE_ENDEMIC = "ImmuneEndemic"

    def __str__(self):
        return self.value


@dataclass(frozen=True)
class EquilibriumSet:
    e0: State
    e_star: Optional[State]
    e_bar: Optional[State]
    numbers: ReproductionNumbers

    def present(self):
        """``(name, state)`` pairs of the equilibria that exist."""
        out = [("e0", self.e0)]
        if self.e_star is not None:
            out.append(("e_star", self.e_star))
        if self.e_bar is not None:
            out.append(("e_bar", self.e_bar))
        return out


@dataclass(frozen=True)
class RegimeClassification:
    kind: Regime
    predicted_attractor: State


class YOrderWitness(NamedTuple):
    y_star: float
    y_bar: float
    holds: bool


def immune_margin(p: Parameters) -> float:
    """``lambda*c*mu - beta*s*a*N``; the immune equilibrium needs this > 0."""
    return p.lam * p.c * p.mu - p.beta * p.s * p.a * p.N


def reproduction_numbers(p: Parameters) -> ReproductionNumbers:
    r0 = p.beta * p.N * p.lam / (p.d * p.mu)
    r1 = p.beta * p.N * immune_margin(p) / (p.d * p.c * p.mu ** 2)
    return ReproductionNumbers(r0, r1)


def equilibrium_set(p: Parameters) -> EquilibriumSet:
    """Equilibria written in terms of R0 and R1.

    ``e_star`` exists iff R0 > 1 and ``e_bar`` iff R1 > 1 (which forces
    ``lambda*c*mu - beta*s*a*N > 0``). Thresholds are compared exactly.
    """
    nums = reproduction_numbers(p)
    r0, r1 = nums
    x0 = p.lam / p.d
    e0 = State(x0, 0.0, 0.0, 0.0)

    e_star = None
    if r0 > 1:
        e_star = State(
            x0 / r0,
            p.lam * (r0 - 1) / (p.a * r0),
            p.N * p.lam * (r0 - 1) / (p.mu * r0),
            0.0,
        )

    e_bar = None
    if r1 > 1:
        e_bar = State(
            r1 * p.mu / (p.beta * p.N),
            p.s * p.beta * p.N / (p.mu * p.c * r1),
            p.beta * p.N ** 2 * p.a * p.s / (p.mu ** 2 * p.c * r1),
            p.a * (r1 - 1) / p.p,
        )
    return EquilibriumSet(e0, e_star, e_bar, nums)


def raw_equilibria(p: Parameters):
    """Same equilibria written directly in the model rates.

    Returns ``(e0, e_star, e_bar)`` with ``None`` where the raw existence
    condition fails. Kept separate from :func:`equilibrium_set` as a
    cross-check.
    """
    lam, d, beta, a, pp, mu, big_n, c, s = (
        p.lam, p.d, p.beta, p.a, p.p, p.mu, p.N, p.c, p.s)
    e0 = State(lam / d, 0.0, 0.0, 0.0)

    e_star = None
    if beta * big_n * lam - d * mu > 0:
        e_star = State(
            mu / (beta * big_n),
            (beta * big_n * lam - d * mu) / (beta * big_n * a),
            (beta * big_n * lam - d * mu) / (beta * mu),
            0.0,
        )

    e_bar = None
    k = lam * c * mu - beta * s * a * big_n
    if beta * a * big_n * k - a * d * c * mu ** 2 > 0:
        e_bar = State(
            k / (d * c * mu),
            d * mu * s / k,
            s * a * big_n * d / k,
            (beta * a * big_n * k - a * d * c * mu ** 2) / (pp * d * c * mu ** 2),
        )
    return e0, e_star, e_bar


def classify_regime(nums: ReproductionNumbers, eqs: EquilibriumSet) -> RegimeClassification:
    r0, r1 = nums
    if r0 <= 1:
        return RegimeClassification(Regime.DISEASE_FREE_STABLE, eqs.e0)
    if r1 <= 1:
        return RegimeClassification(Regime.NO_IMMUNE_ENDEMIC, eqs.e_star)
    return RegimeClassification(Regime.IMMUNE_ENDEMIC, eqs.e_bar)


def regime_of(p: Parameters) -> RegimeClassification:
    eqs = equilibrium_set(p)
    return classify_regime(eqs.numbers, eqs)


def check_y_order(p: Parameters) -> YOrderWitness:
    """Compare Y* with the Y-coordinate of the immune equilibrium formula.

    Requires ``R1 < 1 < R0``. With ``R1 <= 0`` the immune formula has no
    meaning (negative or infinite), so that case is also rejected.
    """
    r0, r1 = reproduction_numbers(p)
    if not (r1 < 1 < r0):
        raise NotApplicable(f"needs R1 < 1 < R0, got R0={r0!r}, R1={r1!r}")
    if not r1 > 0:
        raise NotApplicable(f"R1={r1!r} <= 0: immune equilibrium formula undefined")
    y_star = p.lam * (r0 - 1) / (p.a * r0)
    y_bar = p.s * p.beta * p.N / (p.mu * p.c * r1)
    return YOrderWitness(y_star, y_bar, y_star < y_bar)
