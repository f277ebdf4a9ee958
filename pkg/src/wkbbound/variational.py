"""Rayleigh-Ritz upper bound from one-parameter trial functions.

Both trial families vanish at the wall, ``x exp(-a x)`` and ``x exp(-a x^2)``.
The energy functional is integrated with composite Simpson on a truncated
domain and minimised over ``a`` by golden-section search in log a.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np

from .core import NumericalError, PotentialContract, PowerLawPotential, Units

TAIL_FRACTION = 1e-16
QUAD_RTOL = 1e-12
A_RTOL = 1e-10
_INV_PHI = (math.sqrt(5.0) - 1.0) / 2.0


class TrialFamily(str, enum.Enum):
    EXP_LINEAR = "ExpLinear"
    EXP_GAUSS = "ExpGauss"

    def psi(self, x: np.ndarray, a: float) -> np.ndarray:
        if self is TrialFamily.EXP_LINEAR:
            return x * np.exp(-a * x)
        return x * np.exp(-a * x * x)

    def dpsi(self, x: np.ndarray, a: float) -> np.ndarray:
        if self is TrialFamily.EXP_LINEAR:
            return (1.0 - a * x) * np.exp(-a * x)
        return (1.0 - 2.0 * a * x * x) * np.exp(-a * x * x)

    def length_scale(self, a: float) -> float:
        return 1.0 / a if self is TrialFamily.EXP_LINEAR else 1.0 / math.sqrt(a)


def simpson(f, lo: float, hi: float, rtol: float = QUAD_RTOL, n0: int = 64, max_doublings: int = 20):
    """Composite Simpson on [lo, hi], doubling the panel count until converged.

    ``f`` maps an array of abscissae to an array of shape ``(k, len(x))``, so
    several integrands share one set of evaluations. Returns ``(values,
    error_estimates)``; convergence is declared once every component changes
    by less than ``rtol`` relative between successive doublings.
    """
    n = n0
    x = np.linspace(lo, hi, n + 1)
    y = np.atleast_2d(f(x))
    h = (hi - lo) / n
    trap = h * (0.5 * (y[:, 0] + y[:, -1]) + y[:, 1:-1].sum(axis=1))
    prev = None
    for _ in range(max_doublings):
        mid = lo + h * (np.arange(n) + 0.5)
        trap_new = 0.5 * trap + 0.5 * h * np.atleast_2d(f(mid)).sum(axis=1)
        simp = (4.0 * trap_new - trap) / 3.0
        if prev is not None:
            diff = np.abs(simp - prev)
            if np.all(diff <= rtol * np.abs(simp)):
                return simp, diff / 15.0
        prev, trap, n, h = simp, trap_new, 2 * n, h / 2
    raise NumericalError(
        f"Simpson did not reach rtol={rtol:g} on [{lo:g}, {hi:g}] after {n} panels"
    )


def _potential_on(p: PotentialContract, x: np.ndarray) -> np.ndarray:
    if isinstance(p, PowerLawPotential):
        return p.vectorized(x)
    out = np.zeros_like(x)
    pos = x > 0
    out[pos] = [p.value(float(v)) for v in x[pos]]
    return out


def _integrands(p: PotentialContract, trial: TrialFamily, a: float):
    def f(x):
        psi = trial.psi(x, a)
        dpsi = trial.dpsi(x, a)
        return np.vstack([psi * psi, dpsi * dpsi, _potential_on(p, x) * psi * psi])

    return f


def _truncation_point(f, scale: float) -> float:
    hi = 8.0 * scale
    for _ in range(200):
        x = np.linspace(0.0, hi, 2001)
        y = f(x)
        peak = y.max(axis=1)
        if np.all(y[:, -1] < TAIL_FRACTION * peak):
            return hi
        hi *= 1.5
    raise NumericalError("integrand tail does not decay; cannot truncate the domain")


def energy_terms(p: PotentialContract, trial: TrialFamily, a: float):
    """Integrals of psi^2, psi'^2 and V psi^2 with their error estimates."""
    if not a > 0:
        raise ValueError(f"trial parameter must be positive, got {a!r}")
    f = _integrands(p, trial, a)
    hi = _truncation_point(f, trial.length_scale(a))
    return simpson(f, 0.0, hi)


def rayleigh_quotient(
    p: PotentialContract, trial: TrialFamily, a: float, units: Units = Units()
) -> float:
    """<psi|H|psi> / <psi|psi> for the trial member with parameter ``a``."""
    return _quotient_with_error(p, trial, a, units)[0]


def _quotient_with_error(p, trial, a, units):
    (norm, kin, pot), (en, ek, ep) = energy_terms(p, trial, a)
    num = units.kinetic * kin + pot
    q = num / norm
    err = (units.kinetic * ek + ep) / norm + abs(q) * en / norm
    return float(q), float(err)


@dataclass(frozen=True)
class UpperBound:
    E_rr: float
    a_star: float
    trial: TrialFamily
    quadrature_error_estimate: float

    def to_dict(self) -> dict:
        return {
            "E_rr": self.E_rr,
            "a_star": self.a_star,
            "trial": self.trial.value,
            "quadrature_error_estimate": self.quadrature_error_estimate,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "UpperBound":
        return cls(d["E_rr"], d["a_star"], TrialFamily(d["trial"]), d["quadrature_error_estimate"])


def _bracket_minimum(f, start: float = 0.0, step: float = math.log(2.0), max_expand: int = 200):
    """Three points u0 < u1 < u2 (in log a) with f(u1) below both ends."""
    u0, u1 = start, start + step
    f0, f1 = f(u0), f(u1)
    if f1 > f0:
        u0, u1, f0, f1 = u1, u0, f1, f0
        step = -step
    for _ in range(max_expand):
        step *= 1.618
        u2 = u1 + step
        f2 = f(u2)
        if f2 > f1:
            return (u0, u1, u2) if u0 < u2 else (u2, u1, u0)
        u0, u1, f0, f1 = u1, u2, f1, f2
    raise NumericalError("no interior minimum of the Rayleigh quotient found while bracketing")


def _golden(f, lo: float, hi: float, tol: float) -> float:
    c = hi - _INV_PHI * (hi - lo)
    d = lo + _INV_PHI * (hi - lo)
    fc, fd = f(c), f(d)
    while hi - lo > tol:
        if fc < fd:
            hi, d, fd = d, c, fc
            c = hi - _INV_PHI * (hi - lo)
            fc = f(c)
        else:
            lo, c, fc = c, d, fd
            d = lo + _INV_PHI * (hi - lo)
            fd = f(d)
    return 0.5 * (lo + hi)


def minimize_upper_bound(
    p: PotentialContract, trial: TrialFamily, units: Units = Units()
) -> UpperBound:
    """Minimise the Rayleigh quotient over the trial parameter."""
    cache: dict[float, float] = {}

    def f(u: float) -> float:
        if u not in cache:
            cache[u] = rayleigh_quotient(p, trial, math.exp(u), units)
        return cache[u]

    lo, _, hi = _bracket_minimum(f)
    u_star = _golden(f, lo, hi, A_RTOL)
    a_star = math.exp(u_star)
    E, err = _quotient_with_error(p, trial, a_star, units)
    return UpperBound(E_rr=E, a_star=a_star, trial=trial, quadrature_error_estimate=err)


def best_upper_bound(p: PotentialContract, units: Units = Units()) -> UpperBound:
    """Lowest of the per-family minima."""
    return min(
        (minimize_upper_bound(p, t, units) for t in TrialFamily), key=lambda ub: ub.E_rr
    )


def default_trial(n: float) -> TrialFamily:
    """ExpLinear below n = 3/2, ExpGauss from there on."""
    return TrialFamily.EXP_LINEAR if n < 1.5 else TrialFamily.EXP_GAUSS


def upper_bound(p: PotentialContract, units: Units = Units(), trial: str = "auto") -> UpperBound:
    """Upper bound with ``trial`` one of 'auto', 'best' or a family name."""
    if trial == "best":
        return best_upper_bound(p, units)
    if trial == "auto":
        n = getattr(p, "n", None)
        if n is None:
            return best_upper_bound(p, units)
        return minimize_upper_bound(p, default_trial(n), units)
    return minimize_upper_bound(p, TrialFamily(trial), units)
