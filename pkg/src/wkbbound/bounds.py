"""Lower-bound energy from the breakdown of linear-turning-point WKB.

The smallest turning point x0 at which the WKB-valid interval is not empty
fixes an energy E_cl = V(x0). For V = beta x**n with 1 <= n <= 5/2 that energy
is a lower bound on the ground state; above n = 5/2 it is only the threshold
below which WKB cannot be used and is never certified.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import Callable

from .core import DomainError, NumericalError, PotentialContract, PowerLawPotential, Units
from .wkb import CaseLabel, alpha_length, analyze_turning_point

ROOT_BRACKET = (1e-12, 1e12)
ROOT_RTOL = 1e-12
ROOT_MAX_ITER = 200
#: largest exponent for which the first-case geometry (and certification) applies
N_MAX_CERTIFIED = 2.5


class NotApplicableError(DomainError):
    """The requested construction does not exist for this potential."""


class BoundMethod(str, enum.Enum):
    ROUGH = "rough"
    EXACT = "exact"
    CLOSED_FORM = "closed_form"


def log_bisect(
    h: Callable[[float], float],
    lo: float = ROOT_BRACKET[0],
    hi: float = ROOT_BRACKET[1],
    rtol: float = ROOT_RTOL,
    max_iter: int = ROOT_MAX_ITER,
) -> float:
    """Root of ``h`` on [lo, hi] by bisection in log x.

    ``h(lo)`` and ``h(hi)`` must differ in sign.
    """
    flo, fhi = h(lo), h(hi)
    if flo == 0:
        return lo
    if fhi == 0:
        return hi
    if (flo > 0) == (fhi > 0):
        raise NumericalError(f"root not bracketed in [{lo:g}, {hi:g}]")
    for _ in range(max_iter):
        mid = math.sqrt(lo * hi)
        fmid = h(mid)
        if fmid == 0:
            return mid
        if (fmid > 0) == (flo > 0):
            lo, flo = mid, fmid
        else:
            hi = mid
        if hi / lo - 1.0 <= rtol:
            break
    return math.sqrt(lo * hi)


def x0_closed_form(p: PowerLawPotential, units: Units = Units()) -> float:
    """(hbar^2 / (8 beta m n))^(1/(n+2))."""
    return (units.hbar**2 / (8.0 * p.beta * units.mass * p.n)) ** (1.0 / (p.n + 2.0))


def x0_rough_root(p: PotentialContract, units: Units = Units()) -> float:
    """Root of x^3 V'(x) = hbar^2 / 8m by log bisection (any monotone potential)."""
    target = units.hbar**2 / (8.0 * units.mass)
    return log_bisect(lambda x: x**3 * p.d1(x) / target - 1.0)


def solve_x0_rough(p: PotentialContract, units: Units = Units()) -> float:
    """Smallest usable turning point in the roughest approximation.

    For the power law the closed form is returned after a cross-check against
    the generic root finder.
    """
    root = x0_rough_root(p, units)
    if not isinstance(p, PowerLawPotential):
        return root
    closed = x0_closed_form(p, units)
    if abs(closed - root) > 1e-10 * closed:
        raise NumericalError(f"closed form x0={closed!r} disagrees with root finder {root!r}")
    return closed


def solve_x0_exact(p: PotentialContract, units: Units = Units()) -> float:
    """Turning point at which the WKB-valid interval shrinks to a point.

    Solves hbar^2/8m = (alpha x^3 / 2) V''(x) [1 - 4x/(3 alpha)]^-3 by log
    bisection. Needs V'' > 0 and a positive bracket factor, so for the power
    law only 1 < n < 5/2 qualifies.
    """
    if isinstance(p, PowerLawPotential):
        if p.n == 1:
            raise DomainError("V'' = 0 for n = 1: alpha is infinite")
        if 1.0 - 2.0 * (p.n - 1.0) / 3.0 <= 0:
            raise NotApplicableError(f"bracket factor 1 - 2(n-1)/3 <= 0 for n = {p.n!r}")
    target = units.hbar**2 / (8.0 * units.mass)

    def h(x: float) -> float:
        if p.d2(x) == 0:
            raise DomainError(f"V''({x!r}) = 0: alpha is infinite")
        alpha = alpha_length(p, x)
        factor = 1.0 - 4.0 * x / (3.0 * alpha)
        if factor <= 0:
            raise NotApplicableError(f"bracket factor {factor!r} <= 0 at x = {x!r}")
        return 0.5 * alpha * x**3 * p.d2(x) / factor**3 / target - 1.0

    return log_bisect(h)


def case2_threshold_x0(p: PotentialContract, units: Units = Units()) -> float:
    """Turning point of the second-case threshold energy.

    Root of 8 m x^3 V'(x) = (3 x / alpha(x))^3 hbar^2; for the power law
    3x/alpha = 3(n-1)/2 and this is closed form.
    """
    h2 = units.hbar**2 / (8.0 * units.mass)
    if isinstance(p, PowerLawPotential):
        c = (1.5 * (p.n - 1.0)) ** 3
        return (c * h2 / (p.beta * p.n)) ** (1.0 / (p.n + 2.0))
    return log_bisect(lambda x: x**3 * p.d1(x) / (h2 * (3.0 * x / alpha_length(p, x)) ** 3) - 1.0)


def second_case_condition(n: float) -> bool:
    """(3/2)^3 <= n / (n-1)^3, which the power law would need above n = 5/2."""
    if n <= 1:
        return True
    return 1.5**3 <= n / (n - 1.0) ** 3


def condition_37_check(E_cl: float, x0: float, units: Units = Units()) -> bool:
    """True when E_cl <= hbar^2 / (8 m x0^2).

    A relative slack of 1e-12 absorbs rounding at the n = 1 equality case.
    """
    if not (E_cl > 0 and x0 > 0):
        raise ValueError("E_cl and x0 must be positive")
    return E_cl <= units.hbar**2 / (8.0 * units.mass * x0**2) * (1.0 + 1e-12)


@dataclass(frozen=True)
class LowerBound:
    x0_min: float
    E_cl: float
    case_label: CaseLabel
    certified: bool
    condition_37_holds: bool
    method: BoundMethod
    units: Units
    heuristic: bool = False
    reason: str = ""
    x0_exact: float | None = None

    def to_dict(self) -> dict:
        return {
            "x0_min": self.x0_min,
            "E_cl": self.E_cl,
            "case_label": self.case_label.value,
            "certified": self.certified,
            "condition_37_holds": self.condition_37_holds,
            "method": self.method.value,
            "units": self.units.to_dict(),
            "heuristic": self.heuristic,
            "reason": self.reason,
            "x0_exact": self.x0_exact,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "LowerBound":
        return cls(
            x0_min=d["x0_min"],
            E_cl=d["E_cl"],
            case_label=CaseLabel(d["case_label"]),
            certified=d["certified"],
            condition_37_holds=d["condition_37_holds"],
            method=BoundMethod(d["method"]),
            units=Units.from_dict(d["units"]),
            heuristic=d.get("heuristic", False),
            reason=d.get("reason", ""),
            x0_exact=d.get("x0_exact"),
        )


def lower_bound_energy(p: PotentialContract, units: Units = Units()) -> LowerBound:
    """E_cl = V(x0_min) with its certification status.

    Refusal to certify is reported through ``certified`` and ``reason``; it is
    not an error.
    """
    if isinstance(p, PowerLawPotential):
        return _power_law_bound(p, units)
    return _generic_bound(p, units)


def _power_law_bound(p: PowerLawPotential, units: Units) -> LowerBound:
    n = p.n
    if n == 1:
        label = CaseLabel.LINEAR_DEGENERATE
    elif n <= N_MAX_CERTIFIED:
        label = CaseLabel.CASE1
    else:
        label = CaseLabel.CASE2

    x0_exact = None
    if label is CaseLabel.CASE2:
        x0 = case2_threshold_x0(p, units)
    else:
        x0 = solve_x0_rough(p, units)
        if 1 < n < N_MAX_CERTIFIED:
            x0_exact = solve_x0_exact(p, units)
    E = p.value(x0)
    cond = condition_37_check(E, x0, units)
    certified = label is not CaseLabel.CASE2 and cond and 1 <= n <= N_MAX_CERTIFIED

    if certified:
        reason = "lower bound certified for beta*x**n with 1 <= n <= 5/2"
    elif label is CaseLabel.CASE2:
        reason = (
            f"n = {n:g} > 5/2: certification needs (3/2)^3 <= n/(n-1)^3, which is "
            "unsatisfiable; E_cl is the WKB threshold only, not a bound"
        )
    else:
        reason = "E_cl exceeds hbar^2/(8 m x0^2)"
    return LowerBound(
        x0_min=x0,
        E_cl=E,
        case_label=label,
        certified=certified,
        condition_37_holds=cond,
        method=BoundMethod.CLOSED_FORM,
        units=units,
        reason=reason,
        x0_exact=x0_exact,
    )


def _generic_bound(p: PotentialContract, units: Units) -> LowerBound:
    x0 = x0_rough_root(p, units)
    a = analyze_turning_point(p, x0, units)
    label = a.case_label
    if label in (CaseLabel.CASE2, CaseLabel.SLOPE_DEGENERATE):
        x0 = case2_threshold_x0(p, units)
        label = CaseLabel.CASE2
    x0_exact = None
    if label is CaseLabel.CASE1:
        try:
            x0_exact = solve_x0_exact(p, units)
        except (DomainError, NumericalError):
            pass
    E = p.value(x0)
    return LowerBound(
        x0_min=x0,
        E_cl=E,
        case_label=label,
        certified=False,
        condition_37_holds=condition_37_check(E, x0, units),
        method=BoundMethod.ROUGH,
        units=units,
        heuristic=True,
        reason="heuristic value: certification is only established for beta*x**n",
        x0_exact=x0_exact,
    )
