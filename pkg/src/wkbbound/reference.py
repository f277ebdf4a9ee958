"""Reference ground-state energies.

A Numerov shooting solver handles any member of the family; closed forms
cover the truncated oscillator and the quantum bouncer (Airy zeros), and the
first-order WKB bouncer spectrum is available for comparison.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np

from .bounds import log_bisect
from .core import DomainError, NumericalError, PotentialContract, PowerLawPotential, Units

try:
    from numba import njit
except ImportError:  # pragma: no cover
    def njit(*args, **kwargs):
        if args and callable(args[0]):
            return args[0]
        return lambda f: f


class ReferenceMethod(str, enum.Enum):
    NUMEROV = "Numerov"
    CLOSED_FORM_OSCILLATOR = "ClosedFormOscillator"
    AIRY_ZERO = "AiryZero"
    PAPER_WKB_FORMULA = "PaperWkbFormula"


@dataclass(frozen=True)
class ReferenceEnergy:
    E0: float
    method: ReferenceMethod
    error_estimate: float
    ratio_to_E_cl: float | None = None

    def to_dict(self) -> dict:
        return {
            "E0": self.E0,
            "method": self.method.value,
            "error_estimate": self.error_estimate,
            "ratio_to_E_cl": self.ratio_to_E_cl,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "ReferenceEnergy":
        return cls(d["E0"], ReferenceMethod(d["method"]), d["error_estimate"], d.get("ratio_to_E_cl"))


# --------------------------------------------------------------------------
# Numerov shooting


@dataclass(frozen=True)
class NumerovConfig:
    """Grid and bisection settings.

    ``step`` and ``x_max`` default to values derived from the turning point
    ``x_t`` of a first coarse estimate: ``x_t / points_per_turn`` and
    ``safety * x_t``. ``energy_tolerance`` defaults to 1e-13 relative.
    """

    step: float | None = None
    x_max: float | None = None
    energy_tolerance: float | None = None
    max_bisections: int = 200
    safety: float = 4.0
    points_per_turn: int = 1000

    def __post_init__(self):
        if self.step is not None and not self.step > 0:
            raise ValueError("step must be positive")
        if self.safety < 2:
            raise ValueError("safety factor must be >= 2")
        if self.points_per_turn < 10:
            raise ValueError("points_per_turn must be >= 10")


@njit(cache=True)
def _shoot(v, e, c, h):
    """Outward Numerov from psi(0) = 0, psi(h) = h; returns (nodes, sign at end)."""
    h12 = h * h / 12.0
    psi_prev = 0.0
    psi = h
    w_prev = 0.0
    w = (1.0 - h12 * c * (v[1] - e)) * psi
    nodes = 0
    for i in range(1, v.shape[0] - 1):
        w_next = 2.0 * w - w_prev + h * h * c * (v[i] - e) * psi
        psi_next = w_next / (1.0 - h12 * c * (v[i + 1] - e))
        if (psi_next < 0.0) != (psi < 0.0):
            nodes += 1
        if abs(psi_next) > 1e200:
            w_next *= 1e-200
            w *= 1e-200
            psi_next *= 1e-200
        w_prev, w, psi_prev, psi = w, w_next, psi, psi_next
    return nodes, 1.0 if psi > 0.0 else -1.0


def _potential_grid(p: PotentialContract, x: np.ndarray) -> np.ndarray:
    if isinstance(p, PowerLawPotential):
        return p.vectorized(x)
    v = np.empty_like(x)
    v[0] = 0.0
    v[1:] = [p.value(float(t)) for t in x[1:]]
    return v


def _turning(p: PotentialContract, energy: float) -> float:
    if isinstance(p, PowerLawPotential):
        return p.turning_point(energy)
    return log_bisect(lambda x: p.value(x) / energy - 1.0)


def _bisect_ground(p, units, x_max, step, tol_rel, tol_abs, max_bisections):
    n = max(int(math.ceil(x_max / step)), 10)
    h = x_max / n
    x = np.linspace(0.0, x_max, n + 1)
    v = _potential_grid(p, x)
    c = 2.0 * units.mass / units.hbar**2
    lo, hi = 0.0, float(v[-1])
    nodes_hi, _ = _shoot(v, hi, c, h)
    if nodes_hi == 0:
        raise NumericalError(
            f"ground state not bracketed in [0, V(x_max)={hi:g}]; enlarge x_max"
        )
    for _ in range(max_bisections):
        mid = 0.5 * (lo + hi)
        nodes, sign = _shoot(v, mid, c, h)
        if nodes == 0 and sign > 0:
            lo = mid
        else:
            hi = mid
        tol = tol_abs if tol_abs is not None else tol_rel * hi
        if hi - lo <= tol:
            break
    nodes_hi, _ = _shoot(v, hi, c, h)
    if nodes_hi != 1:
        raise NumericalError(
            f"node count {nodes_hi} just above the ground state (expected 1): grid too coarse"
        )
    return 0.5 * (lo + hi)


def _energy_scale(p: PotentialContract, units: Units) -> float:
    """V(L) at the length L where V(L) equals hbar^2 / (2 m L^2)."""
    L = log_bisect(lambda x: p.value(x) * x * x / units.kinetic - 1.0)
    return p.value(L)


def numerov_ground_state(
    p: PotentialContract, cfg: NumerovConfig = NumerovConfig(), units: Units = Units()
) -> ReferenceEnergy:
    """Lowest eigenvalue with a hard wall at the origin.

    Bisection on E uses the node count and the sign of psi at ``x_max``. The
    result comes from the halved step, and ``error_estimate`` is its
    difference from the full-step value.
    """
    tol_rel = 1e-13
    tol_abs = cfg.energy_tolerance

    # coarse pass to locate the turning point of the ground state
    scale = _energy_scale(p, units)
    guess = 12.0 * scale
    for _ in range(20):
        xt = _turning(p, guess)
        try:
            e_est = _bisect_ground(p, units, 2.0 * xt, xt / 300.0, 1e-8, None, cfg.max_bisections)
            break
        except NumericalError:
            guess *= 2.0
    else:
        raise NumericalError("could not locate the ground state in the coarse pass")

    xt = _turning(p, e_est)
    x_max = cfg.x_max if cfg.x_max is not None else cfg.safety * xt
    if x_max < 2.0 * xt:
        raise ValueError(f"x_max={x_max:g} is closer than twice the turning point {xt:g}")
    step = cfg.step if cfg.step is not None else xt / cfg.points_per_turn
    e_h = _bisect_ground(p, units, x_max, step, tol_rel, tol_abs, cfg.max_bisections)
    e_h2 = _bisect_ground(p, units, x_max, step / 2.0, tol_rel, tol_abs, cfg.max_bisections)
    return ReferenceEnergy(e_h2, ReferenceMethod.NUMEROV, abs(e_h - e_h2))


# --------------------------------------------------------------------------
# closed forms


def truncated_oscillator_exact(omega: float, units: Units = Units()) -> ReferenceEnergy:
    """Ground state 3/2 hbar omega of the oscillator with a wall at x = 0."""
    if not omega > 0:
        raise ValueError("omega must be positive")
    return ReferenceEnergy(1.5 * units.hbar * omega, ReferenceMethod.CLOSED_FORM_OSCILLATOR, 0.0)


def oscillator_ladder(k: int, omega: float, units: Units = Units()) -> float:
    """k-th level hbar omega (2k + 3/2); only odd full-line states survive the wall."""
    if k < 0:
        raise ValueError("k must be >= 0")
    return units.hbar * omega * (2 * k + 1.5)


def oscillator_omega(p: PowerLawPotential, units: Units = Units()) -> float:
    """omega with beta = m omega^2 / 2."""
    if p.n != 2:
        raise ValueError("only defined for n = 2")
    return math.sqrt(2.0 * p.beta / units.mass)


# --------------------------------------------------------------------------
# Airy function

AIRY_RANGE = 20.0
_SERIES_NEG = -7.0
_SERIES_POS = 5.0
_AI0 = 3.0 ** (-2.0 / 3.0) / math.gamma(2.0 / 3.0)
_AIP0 = 3.0 ** (-1.0 / 3.0) / math.gamma(1.0 / 3.0)


def _airy_series(x: float) -> float:
    x3 = x * x * x
    f = term_f = 1.0
    g = term_g = x
    k = 1
    while True:
        term_f *= x3 / ((3 * k - 1) * (3 * k))
        term_g *= x3 / ((3 * k) * (3 * k + 1))
        f += term_f
        g += term_g
        if abs(term_f) < 1e-17 * abs(f) and abs(term_g) < 1e-17 * max(abs(g), 1e-300):
            break
        k += 1
        if k > 500:
            raise NumericalError(f"Airy series failed to converge at x={x!r}")
    return _AI0 * f - _AIP0 * g


def _asymptotic_u(zeta: float) -> list[float]:
    """Terms u_k / zeta^k up to the smallest one (optimal truncation)."""
    terms = [1.0]
    u = 1.0
    k = 1
    while k < 60:
        u *= (6 * k - 5) * (6 * k - 3) * (6 * k - 1) / ((2 * k - 1) * 216.0 * k)
        t = u / zeta**k
        if t >= terms[-1]:
            break
        terms.append(t)
        k += 1
    return terms


def _airy_asymptotic(x: float) -> float:
    t = abs(x)
    zeta = 2.0 / 3.0 * t**1.5
    terms = _asymptotic_u(zeta)
    if x > 0:
        s = sum((-1) ** k * v for k, v in enumerate(terms))
        return math.exp(-zeta) / (2.0 * math.sqrt(math.pi) * t**0.25) * s
    even = sum((-1) ** (k // 2) * v for k, v in enumerate(terms) if k % 2 == 0)
    odd = sum((-1) ** (k // 2) * v for k, v in enumerate(terms) if k % 2 == 1)
    phase = zeta + math.pi / 4.0
    return (math.sin(phase) * even - math.cos(phase) * odd) / (math.sqrt(math.pi) * t**0.25)


def airy_ai(x: float) -> float:
    """Ai(x) for |x| <= 20.

    Maclaurin series on [-7, 5], optimally truncated asymptotic expansions
    outside.
    """
    if not abs(x) <= AIRY_RANGE:
        raise DomainError(f"airy_ai implemented for |x| <= {AIRY_RANGE:g}, got {x!r}")
    if _SERIES_NEG <= x <= _SERIES_POS:
        return _airy_series(x)
    return _airy_asymptotic(x)


def airy_zero(k: int) -> float:
    """k-th zero a_k < 0 of Ai, by bisection around the asymptotic estimate."""
    if k < 1:
        raise ValueError("k must be >= 1")
    t = 3.0 * math.pi / 8.0 * (4 * k - 1)
    est = -(t ** (2.0 / 3.0)) * (1.0 + 5.0 / 48.0 / t**2)
    lo, hi = est - 0.25, est + 0.25
    if lo < -AIRY_RANGE:
        raise DomainError(f"zero a_{k} lies beyond the implemented range |x| <= {AIRY_RANGE:g}")
    flo, fhi = airy_ai(lo), airy_ai(hi)
    if (flo > 0) == (fhi > 0):
        raise NumericalError(f"no sign change around the estimate of a_{k}")
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        fm = airy_ai(mid)
        if fm == 0:
            return mid
        if (fm > 0) == (flo > 0):
            lo, flo = mid, fm
        else:
            hi = mid
        if hi - lo < 1e-15 * abs(mid):
            break
    return 0.5 * (lo + hi)


def bouncer_spectrum(k: int, g: float, units: Units = Units()) -> ReferenceEnergy:
    """E_k = |a_k| (m g^2 hbar^2 / 2)^(1/3) for V = m g x above a hard floor."""
    if not g > 0:
        raise ValueError("g must be positive")
    scale = (units.mass * g * g * units.hbar**2 / 2.0) ** (1.0 / 3.0)
    a = airy_zero(k)
    return ReferenceEnergy(-a * scale, ReferenceMethod.AIRY_ZERO, 1e-14 * abs(a) * scale)


def freefall_paper_wkb(kidx: int, g: float, units: Units = Units()) -> ReferenceEnergy:
    """First-order WKB bouncer level (hbar^2/2ml^2) {(3 pi/4)(2k - 1/2)}^(2/3).

    Here 1/l^3 = 2 m^2 g / hbar^2. ``ratio_to_E_cl`` is the level divided by
    the free-fall lower bound, {(3 pi/2)(2k - 1/2)}^(2/3). The index starts
    at 1; k = 0 would put a negative number under the 2/3 power.
    """
    braced = 0.75 * math.pi * (2 * kidx - 0.5)
    if not braced > 0:
        raise DomainError(
            f"kidx={kidx}: (3 pi/4)(2k - 1/2) = {braced:g} is not positive; "
            "levels are indexed from k = 1"
        )
    inv_l3 = 2.0 * units.mass**2 * g / units.hbar**2
    l2 = inv_l3 ** (-2.0 / 3.0)
    energy = units.hbar**2 / (2.0 * units.mass * l2) * braced ** (2.0 / 3.0)
    ratio = (2.0 * braced) ** (2.0 / 3.0)
    return ReferenceEnergy(energy, ReferenceMethod.PAPER_WKB_FORMULA, 0.0, ratio)
