"""Ground-state energy brackets for half-line power-law potentials.

A lower bound comes from the breakdown of the linear-turning-point WKB
approximation, an upper bound from a one-parameter Rayleigh-Ritz trial, and
both are checked against a Numerov shooting solver.
"""

from .core import (
    DomainError,
    NumericalError,
    PotentialContract,
    PowerLawPotential,
    Units,
    turning_point_of_energy,
    value,
)
from .wkb import (
    CaseLabel,
    RegionLabel,
    RegionMap,
    TurningAnalysis,
    alpha_length,
    analyze_turning_point,
    gamma_param,
    local_wavelength,
    region_map,
    taylor_convergence_diagnostic,
    wkb_pointwise_ok,
)
from .bounds import (
    LowerBound,
    condition_37_check,
    lower_bound_energy,
    solve_x0_exact,
    solve_x0_rough,
)
from .variational import (
    TrialFamily,
    UpperBound,
    minimize_upper_bound,
    rayleigh_quotient,
)
from .reference import (
    NumerovConfig,
    ReferenceEnergy,
    airy_ai,
    airy_zero,
    bouncer_spectrum,
    freefall_paper_wkb,
    numerov_ground_state,
    truncated_oscillator_exact,
)

__version__ = "0.1.0"
