"""Validity of linear-turning-point WKB inside the classical region.

Two conditions are combined at every point of the classical region (0, x0]:
the linear Taylor expansion of V about the turning point must still hold, and
the local de Broglie wavelength must be short compared to the scale on which
E - V changes. In the scaled distance ``z = (x0 - x) / alpha`` the method
breaks down wherever ``z <= gamma * |1 - 4 z / 3|``.
"""

from __future__ import annotations

import csv
import enum
import io
import json
import math
from dataclasses import dataclass, field

from .core import DomainError, PotentialContract, PowerLawPotential, Units

#: |4 gamma / 3 - 1| below this counts as equal slopes.
SLOPE_DEGENERATE_TOL = 1e-9
#: x0 / alpha may exceed 3/4 by this relative amount and still count as the first case.
_RATIO_TOL = 1e-12


class CaseLabel(str, enum.Enum):
    CASE1 = "Case1"
    CASE2 = "Case2"
    LINEAR_DEGENERATE = "LinearDegenerate"
    SLOPE_DEGENERATE = "SlopeDegenerate"


class RegionLabel(str, enum.Enum):
    TOO_CLOSE = "TooCloseToTurningPoint"
    WKB_VALID = "WkbValid"
    LINEAR_BROKEN = "LinearApproxBroken"


def alpha_length(p: PotentialContract, x0: float) -> float:
    """Validity radius 2|V'/V''| of the linear expansion at ``x0``.

    Returns ``math.inf`` when V''(x0) = 0.
    """
    if not x0 > 0:
        raise DomainError(f"x0 must be positive, got {x0!r}")
    v1 = p.d1(x0)
    if v1 == 0:
        raise DomainError(f"V'({x0!r}) = 0: potential is not monotonically increasing")
    v2 = p.d2(x0)
    if v2 == 0:
        return math.inf
    return 2.0 * abs(v1 / v2)


def gamma_param(p: PotentialContract, x0: float, units: Units = Units()) -> float:
    """Positive cube root of hbar^2 / (4 m alpha^4 V''(x0))."""
    v2 = p.d2(x0)
    if not v2 > 0:
        raise DomainError(
            f"V''({x0!r}) = {v2!r}: gamma undefined, use the linear-potential branch"
        )
    alpha = alpha_length(p, x0)
    return (units.hbar**2 / (4.0 * units.mass * alpha**4 * v2)) ** (1.0 / 3.0)


def linear_breakdown_distance(
    p: PotentialContract, x0: float, units: Units = Units(), strictness: float = 1.0
) -> float:
    """Distance below x0 where the wavelength condition alone fails for a linear V.

    With E - V = V'(x0) d the condition 2 d > s * hbar / sqrt(2 m V'(x0) d)
    turns into d > (s^2 hbar^2 / (8 m V'(x0)))^(1/3).
    """
    v1 = p.d1(x0)
    return (strictness**2 * units.hbar**2 / (8.0 * units.mass * v1)) ** (1.0 / 3.0)


@dataclass(frozen=True)
class TurningAnalysis:
    """Length scales and case classification for one turning point."""

    x0: float
    E: float
    alpha: float
    gamma: float | None
    ratio: float
    case_label: CaseLabel
    strictness: float = 1.0

    @property
    def effective_gamma(self) -> float | None:
        """gamma rescaled by the strictness factor applied to the wavelength condition."""
        if self.gamma is None:
            return None
        return self.strictness ** (2.0 / 3.0) * self.gamma

    def to_dict(self) -> dict:
        return {
            "x0": self.x0,
            "E": self.E,
            "alpha": self.alpha,
            "gamma": self.gamma,
            "ratio": self.ratio,
            "case_label": self.case_label.value,
            "strictness": self.strictness,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "TurningAnalysis":
        return cls(
            x0=d["x0"],
            E=d["E"],
            alpha=d["alpha"],
            gamma=d["gamma"],
            ratio=d["ratio"],
            case_label=CaseLabel(d["case_label"]),
            strictness=d.get("strictness", 1.0),
        )


def classify_ratio(ratio: float) -> CaseLabel:
    return CaseLabel.CASE1 if ratio <= 0.75 * (1 + _RATIO_TOL) else CaseLabel.CASE2


def analyze_turning_point(
    p: PotentialContract, x0: float, units: Units = Units(), strictness: float = 1.0
) -> TurningAnalysis:
    if not x0 > 0:
        raise DomainError(f"x0 must be positive, got {x0!r}")
    if not strictness > 0:
        raise ValueError("strictness must be positive")
    E = p.value(x0)
    alpha = alpha_length(p, x0)
    if math.isinf(alpha):
        return TurningAnalysis(x0, E, alpha, None, 0.0, CaseLabel.LINEAR_DEGENERATE, strictness)
    if isinstance(p, PowerLawPotential):
        ratio = (p.n - 1.0) / 2.0
    else:
        ratio = x0 / alpha
    gamma = gamma_param(p, x0, units)
    label = classify_ratio(ratio)
    if label is CaseLabel.CASE2:
        g = strictness ** (2.0 / 3.0) * gamma
        if abs(4.0 * g / 3.0 - 1.0) < SLOPE_DEGENERATE_TOL:
            label = CaseLabel.SLOPE_DEGENERATE
    return TurningAnalysis(x0, E, alpha, gamma, ratio, label, strictness)


@dataclass(frozen=True)
class Region:
    x_lo: float
    x_hi: float
    label: RegionLabel


@dataclass(frozen=True)
class RegionMap:
    """Ordered partition of the classical region (0, x0] into labelled intervals.

    ``z1`` and ``z2`` are the scaled-distance boundaries (``z2`` only when a
    third region exists). For a linear potential there is no scaled distance;
    ``near_distance`` (x0 minus the first boundary) is given in every case.
    """

    regions: tuple[Region, ...]
    analysis: TurningAnalysis
    z1: float | None
    z2: float | None
    near_distance: float

    @property
    def x0(self) -> float:
        return self.analysis.x0

    def label_at(self, x: float) -> RegionLabel:
        if not 0 < x <= self.x0:
            raise DomainError(f"x = {x!r} outside (0, {self.x0!r}]")
        for r in self.regions:
            if r.x_lo < x <= r.x_hi:
                return r.label
        # x below the first interval's open end can only happen through rounding
        return self.regions[0].label

    def rows(self) -> list[tuple[float, float, str]]:
        return [(r.x_lo, r.x_hi, r.label.value) for r in self.regions]

    def to_dict(self) -> dict:
        a = self.analysis
        return {
            "x0": a.x0,
            "E": a.E,
            "alpha": a.alpha,
            "gamma": a.gamma,
            "ratio": a.ratio,
            "case_label": a.case_label.value,
            "strictness": a.strictness,
            "z1": self.z1,
            "z2": self.z2,
            "near_distance": self.near_distance,
            "regions": [
                {"x_lo": lo, "x_hi": hi, "label": lab} for lo, hi, lab in self.rows()
            ],
        }

    @classmethod
    def from_dict(cls, d: dict) -> "RegionMap":
        regions = tuple(
            Region(r["x_lo"], r["x_hi"], RegionLabel(r["label"])) for r in d["regions"]
        )
        return cls(regions, TurningAnalysis.from_dict(d), d["z1"], d["z2"], d["near_distance"])

    def to_json(self, **kw) -> str:
        return json.dumps(self.to_dict(), **kw)

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["x_lo", "x_hi", "label"])
        for lo, hi, lab in self.rows():
            w.writerow([format(lo, ".17g"), format(hi, ".17g"), lab])
        return buf.getvalue()


def _z_of(x0: float, alpha: float, x: float) -> float:
    return (x0 - x) / alpha


def wkb_pointwise_ok(
    p: PotentialContract,
    x0: float,
    x: float,
    units: Units = Units(),
    strictness: float = 1.0,
) -> bool:
    """True when linear-turning-point WKB is usable at ``x`` for turning point ``x0``."""
    if not 0 < x <= x0:
        raise DomainError(f"x = {x!r} outside the classical region (0, {x0!r}]")
    alpha = alpha_length(p, x0)
    if math.isinf(alpha):
        return x0 - x > linear_breakdown_distance(p, x0, units, strictness)
    g = strictness ** (2.0 / 3.0) * gamma_param(p, x0, units)
    z = _z_of(x0, alpha, x)
    return abs(z) > g * abs(1.0 - 4.0 * z / 3.0)


def region_map(
    p: PotentialContract, x0: float, units: Units = Units(), strictness: float = 1.0
) -> RegionMap:
    """Partition (0, x0] into WKB-valid and WKB-breakdown intervals."""
    a = analyze_turning_point(p, x0, units, strictness)

    if a.case_label is CaseLabel.LINEAR_DEGENERATE:
        d1 = linear_breakdown_distance(p, x0, units, strictness)
        if d1 >= x0:
            regions = (Region(0.0, x0, RegionLabel.TOO_CLOSE),)
        else:
            xb = x0 - d1
            regions = (
                Region(0.0, xb, RegionLabel.WKB_VALID),
                Region(xb, x0, RegionLabel.TOO_CLOSE),
            )
        return RegionMap(regions, a, None, None, d1)

    g = a.effective_gamma
    zmax = x0 / a.alpha
    z1 = g / (1.0 + 4.0 * g / 3.0)
    z2 = None
    if a.case_label is not CaseLabel.SLOPE_DEGENERATE and 4.0 * g / 3.0 > 1.0:
        cand = g / (4.0 * g / 3.0 - 1.0)
        if cand < zmax:
            z2 = cand

    if z1 >= zmax:
        regions = (Region(0.0, x0, RegionLabel.TOO_CLOSE),)
    else:
        x1 = x0 - a.alpha * z1
        if z2 is None:
            regions = (
                Region(0.0, x1, RegionLabel.WKB_VALID),
                Region(x1, x0, RegionLabel.TOO_CLOSE),
            )
        else:
            x2 = x0 - a.alpha * z2
            regions = (
                Region(0.0, x2, RegionLabel.LINEAR_BROKEN),
                Region(x2, x1, RegionLabel.WKB_VALID),
                Region(x1, x0, RegionLabel.TOO_CLOSE),
            )
    return RegionMap(regions, a, z1, z2, a.alpha * z1)


@dataclass(frozen=True)
class LocalWavelength:
    """Reduced wavelength hbar / sqrt(2m(E - V)) and the length 2|E - V| / |V'|."""

    wavelength: float
    variation_length: float

    def satisfied(self, strictness: float = 1.0) -> bool:
        return self.variation_length > strictness * self.wavelength


def local_wavelength(
    p: PotentialContract, E: float, x: float, units: Units = Units()
) -> LocalWavelength:
    if x < 0:
        raise DomainError(f"x = {x!r} inside the hard wall")
    if x == 0:
        # V -> 0 at the wall for the whole family; only the power law knows its slope there
        if not isinstance(p, PowerLawPotential):
            raise DomainError("x = 0 is only supported for power-law potentials")
        v, slope = 0.0, (p.beta if p.n == 1 else 0.0)
    else:
        v, slope = p.value(x), p.d1(x)
    kinetic = E - v
    if not kinetic > 0:
        raise DomainError(f"x = {x!r} is classically forbidden for E = {E!r}")
    lam = units.hbar / math.sqrt(2.0 * units.mass * kinetic)
    var = math.inf if slope == 0 else 2.0 * abs(kinetic) / abs(slope)
    return LocalWavelength(lam, var)


@dataclass(frozen=True)
class TaylorDiagnostic:
    """Derivative ratios |V^(l+1) / V^(l)| at x0 for l = 1..k_max.

    ``terminates`` is set when some derivative vanishes identically (integer
    exponent), in which case the Taylor series is a polynomial and converges
    everywhere. ``generalized_alpha`` lists (l+1)|V^(l) / V^(l+1)|.
    """

    ratios: tuple[float, ...]
    terminates: bool
    radius: float
    generalized_alpha: tuple[float, ...] = field(default=())


def taylor_convergence_diagnostic(
    p: PotentialContract, x0: float, k_max: int = 8
) -> TaylorDiagnostic:
    if not hasattr(p, "derivative"):
        raise TypeError("potential must provide derivative(x, order) for this diagnostic")
    if k_max < 1:
        raise ValueError("k_max must be >= 1")
    derivs = [p.derivative(x0, k) for k in range(1, k_max + 2)]
    ratios, alphas = [], []
    terminates = False
    for l in range(1, k_max + 1):
        lo, hi = derivs[l - 1], derivs[l]
        if hi == 0.0:
            terminates = True
        ratios.append(0.0 if lo == 0.0 else abs(hi / lo))
        alphas.append(math.inf if hi == 0.0 else (l + 1) * abs(lo / hi))
    if terminates:
        radius = math.inf
    elif isinstance(p, PowerLawPotential):
        # branch point of x**n at the origin
        radius = x0
    else:
        radius = 1.0 / ratios[-1]
    return TaylorDiagnostic(tuple(ratios), terminates, radius, tuple(alphas))
