"""Full bracket pipeline for one potential, and parameter sweeps."""

from __future__ import annotations

import csv
import enum
import io
import json
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass

from .bounds import LowerBound, lower_bound_energy
from .core import NumericalError, PowerLawPotential, Units
from .reference import NumerovConfig, ReferenceEnergy, numerov_ground_state
from .variational import UpperBound, upper_bound
from .wkb import RegionMap, TurningAnalysis, region_map

SWEEP_COLUMNS = ("beta", "n", "x0", "E_cl", "certified", "E_ref", "E_rr", "bracket_holds", "error")


class Verdict(str, enum.Enum):
    CERTIFIED = "Certified"
    UPPER_ONLY = "UpperOnly"
    UNCERTIFIED = "Uncertified"


def _ordering(lower: LowerBound, ref: ReferenceEnergy, upper: UpperBound) -> tuple[bool, bool]:
    """(E_cl <= E_ref, E_ref <= E_rr), the latter up to the combined error estimates."""
    slack = upper.quadrature_error_estimate + ref.error_estimate + 1e-12 * abs(upper.E_rr)
    return lower.E_cl <= ref.E0, ref.E0 <= upper.E_rr + slack


def judge(lower: LowerBound, ref: ReferenceEnergy, upper: UpperBound) -> tuple[Verdict, bool, str]:
    """Verdict, violation flag and reason.

    The violation flag is raised only when a certified lower bound (or the
    upper bound) is contradicted by the reference energy.
    """
    low_ok, up_ok = _ordering(lower, ref, upper)
    if not up_ok:
        return Verdict.UNCERTIFIED, True, "reference energy exceeds the variational upper bound"
    if lower.certified:
        if low_ok:
            return Verdict.CERTIFIED, False, lower.reason
        return Verdict.UNCERTIFIED, True, "certified lower bound exceeds the reference energy"
    if lower.heuristic:
        return Verdict.UPPER_ONLY, False, lower.reason
    return Verdict.UNCERTIFIED, False, lower.reason


@dataclass(frozen=True)
class AnalysisReport:
    potential: PowerLawPotential
    units: Units
    turning: TurningAnalysis
    regions: RegionMap
    lower: LowerBound
    upper: UpperBound
    reference: ReferenceEnergy
    bracket_verdict: Verdict
    violation: bool
    reason: str
    timing: dict | None = None

    @property
    def bracket_holds(self) -> bool:
        low_ok, up_ok = _ordering(self.lower, self.reference, self.upper)
        return low_ok and up_ok

    def to_dict(self) -> dict:
        return {
            "potential": self.potential.to_dict(),
            "units": self.units.to_dict(),
            "turning": self.turning.to_dict(),
            "region_map": self.regions.to_dict(),
            "lower_bound": self.lower.to_dict(),
            "upper_bound": self.upper.to_dict(),
            "reference": self.reference.to_dict(),
            "bracket_verdict": self.bracket_verdict.value,
            "violation": self.violation,
            "reason": self.reason,
            "timing": self.timing,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "AnalysisReport":
        pot = d["potential"]
        return cls(
            potential=PowerLawPotential(pot["beta"], pot["n"]),
            units=Units.from_dict(d["units"]),
            turning=TurningAnalysis.from_dict(d["turning"]),
            regions=RegionMap.from_dict(d["region_map"]),
            lower=LowerBound.from_dict(d["lower_bound"]),
            upper=UpperBound.from_dict(d["upper_bound"]),
            reference=ReferenceEnergy.from_dict(d["reference"]),
            bracket_verdict=Verdict(d["bracket_verdict"]),
            violation=d["violation"],
            reason=d["reason"],
            timing=d.get("timing"),
        )

    def to_json(self, indent: int | None = 2) -> str:
        return json.dumps(self.to_dict(), indent=indent)

    @classmethod
    def from_json(cls, text: str) -> "AnalysisReport":
        return cls.from_dict(json.loads(text))


def analyze(
    beta: float,
    n: float,
    units: Units = Units(),
    strictness: float = 1.0,
    numerov: NumerovConfig = NumerovConfig(),
    timing: bool = True,
    trial: str = "auto",
) -> AnalysisReport:
    """x0 -> region map -> lower bound -> upper bound -> reference -> verdict."""
    p = PowerLawPotential(beta, n)
    t0 = time.perf_counter()
    lower = lower_bound_energy(p, units)
    t1 = time.perf_counter()
    regions = region_map(p, lower.x0_min, units, strictness)
    t2 = time.perf_counter()
    upper = upper_bound(p, units, trial)
    t3 = time.perf_counter()
    ref = numerov_ground_state(p, numerov, units)
    t4 = time.perf_counter()
    verdict, violation, reason = judge(lower, ref, upper)
    times = None
    if timing:
        times = {
            "lower_bound_s": t1 - t0,
            "region_map_s": t2 - t1,
            "upper_bound_s": t3 - t2,
            "reference_s": t4 - t3,
            "total_s": t4 - t0,
        }
    return AnalysisReport(
        potential=p,
        units=units,
        turning=regions.analysis,
        regions=regions,
        lower=lower,
        upper=upper,
        reference=ref,
        bracket_verdict=verdict,
        violation=violation,
        reason=reason,
        timing=times,
    )


def sweep_row(
    beta: float,
    n: float,
    units: Units = Units(),
    numerov: NumerovConfig = NumerovConfig(),
    trial: str = "auto",
) -> dict:
    """One sweep row; solver failures land in the ``error`` column."""
    row = dict.fromkeys(SWEEP_COLUMNS)
    row.update(beta=beta, n=n, error="")
    try:
        rep = analyze(beta, n, units, numerov=numerov, timing=False, trial=trial)
    except (NumericalError, ValueError, ArithmeticError) as exc:
        row["error"] = f"{type(exc).__name__}: {exc}"
        return row
    row.update(
        x0=rep.lower.x0_min,
        E_cl=rep.lower.E_cl,
        certified=rep.lower.certified,
        E_ref=rep.reference.E0,
        E_rr=rep.upper.E_rr,
        bracket_holds=rep.bracket_holds,
    )
    row["violation"] = rep.violation
    return row


def _row_star(args):
    return sweep_row(*args)


def sweep(
    n_values,
    betas,
    units: Units = Units(),
    numerov: NumerovConfig = NumerovConfig(),
    jobs: int = 1,
    trial: str = "auto",
) -> list[dict]:
    """Rows for every (beta, n) pair, ordered by beta then n."""
    tasks = [(b, n, units, numerov, trial) for b in betas for n in n_values]
    if jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as ex:
            return list(ex.map(_row_star, tasks))
    return [_row_star(t) for t in tasks]


def _fmt(v) -> str:
    if v is None:
        return ""
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, float):
        return format(v, ".17g")
    return str(v)


def rows_to_csv(rows: list[dict]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(SWEEP_COLUMNS)
    for r in rows:
        w.writerow([_fmt(r.get(c)) for c in SWEEP_COLUMNS])
    return buf.getvalue()
