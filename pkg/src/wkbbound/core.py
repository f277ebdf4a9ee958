"""Units, the power-law potential family and the potential contract."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Protocol, runtime_checkable


class DomainError(ValueError):
    """Argument lies outside the domain where a quantity is defined."""


class NumericalError(RuntimeError):
    """A numerical procedure failed to converge or to bracket its target."""


@dataclass(frozen=True)
class Units:
    """Values of hbar and the particle mass defining the unit system."""

    hbar: float = 1.0
    mass: float = 1.0

    def __post_init__(self):
        for name in ("hbar", "mass"):
            v = getattr(self, name)
            if not (math.isfinite(v) and v > 0):
                raise ValueError(f"{name} must be positive and finite, got {v!r}")

    @property
    def kinetic(self) -> float:
        """hbar^2 / 2m."""
        return self.hbar**2 / (2.0 * self.mass)

    def to_dict(self) -> dict:
        return {"hbar": self.hbar, "mass": self.mass}

    @classmethod
    def from_dict(cls, d: dict) -> "Units":
        return cls(hbar=float(d["hbar"]), mass=float(d["mass"]))


@runtime_checkable
class PotentialContract(Protocol):
    """What the analysis needs from a potential on the half line x > 0.

    ``d1`` must be strictly positive (monotonically increasing potential) and
    ``d2`` non-negative. ``hard_wall_at_origin`` marks the infinite wall at
    x <= 0.
    """

    hard_wall_at_origin: bool

    def value(self, x: float) -> float: ...

    def d1(self, x: float) -> float: ...

    def d2(self, x: float) -> float: ...


def _check_x(x: float) -> None:
    if not x > 0:
        raise DomainError(f"x = {x!r} lies inside the hard wall (x <= 0)")


@dataclass(frozen=True)
class PowerLawPotential:
    """V(x) = beta * x**n for x > 0 with an infinite wall at x <= 0."""

    beta: float
    n: float
    hard_wall_at_origin: bool = True

    def __post_init__(self):
        if not (math.isfinite(self.beta) and self.beta > 0):
            raise ValueError(f"beta must be positive and finite, got {self.beta!r}")
        if not (math.isfinite(self.n) and self.n >= 1):
            raise ValueError(f"n must be finite and >= 1, got {self.n!r}")

    def value(self, x: float) -> float:
        _check_x(x)
        return self.beta * x**self.n

    def d1(self, x: float) -> float:
        _check_x(x)
        return self.beta * self.n * x ** (self.n - 1)

    def d2(self, x: float) -> float:
        _check_x(x)
        if self.n == 1:
            return 0.0
        return self.beta * self.n * (self.n - 1) * x ** (self.n - 2)

    def derivative(self, x: float, order: int) -> float:
        """Analytic derivative of any order; exactly zero past an integer exponent."""
        _check_x(x)
        if order < 0:
            raise ValueError("order must be non-negative")
        coef = self.beta
        for k in range(order):
            coef *= self.n - k
            if coef == 0.0:
                return 0.0
        return coef * x ** (self.n - order)

    def vectorized(self, x):
        """V on a numpy array, with V = 0 at x = 0 (the limit from the right)."""
        import numpy as np

        x = np.asarray(x, dtype=float)
        return self.beta * np.power(np.maximum(x, 0.0), self.n)

    def turning_point(self, energy: float) -> float:
        return (energy / self.beta) ** (1.0 / self.n)

    @classmethod
    def oscillator(cls, omega: float, units: Units = Units()) -> "PowerLawPotential":
        """Truncated oscillator (m/2) omega^2 x^2."""
        return cls(beta=0.5 * units.mass * omega**2, n=2.0)

    @classmethod
    def free_fall(cls, g: float, units: Units = Units()) -> "PowerLawPotential":
        """Linear potential m g x above a hard floor."""
        return cls(beta=units.mass * g, n=1.0)

    def to_dict(self) -> dict:
        return {"kind": "power_law", "beta": self.beta, "n": self.n}


def value(p: PotentialContract, x: float) -> float:
    """V(x); raises :class:`DomainError` for x <= 0."""
    _check_x(x)
    return p.value(x)


def turning_point_of_energy(p: PotentialContract, energy: float) -> float:
    """The unique x0 > 0 with V(x0) = energy.

    Closed form for the power law, otherwise bisection on a logarithmic
    bracket (V is monotone by contract).
    """
    if not energy > 0:
        raise DomainError(f"no turning point for energy {energy!r} <= 0")
    if isinstance(p, PowerLawPotential):
        return p.turning_point(energy)
    lo, hi = 1e-12, 1e12
    if p.value(lo) > energy or p.value(hi) < energy:
        raise NumericalError(f"turning point for E={energy!r} not bracketed in [1e-12, 1e12]")
    for _ in range(200):
        mid = math.sqrt(lo * hi)
        if p.value(mid) < energy:
            lo = mid
        else:
            hi = mid
        if hi / lo - 1.0 < 1e-15:
            break
    return math.sqrt(lo * hi)
