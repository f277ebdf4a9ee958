import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from wkbbound import (
    CaseLabel,
    DomainError,
    PowerLawPotential,
    RegionLabel,
    RegionMap,
    Units,
    alpha_length,
    analyze_turning_point,
    gamma_param,
    local_wavelength,
    region_map,
    taylor_convergence_diagnostic,
    wkb_pointwise_ok,
)

OSC = PowerLawPotential(0.5, 2)
X0_OSC = (1 / 8) ** 0.25


def brute_alpha(p, x0):
    return 2 * abs(p.d1(x0) / p.d2(x0))


def test_alpha_examples():
    assert alpha_length(OSC, 0.594604) == pytest.approx(1.189208, rel=1e-12)
    assert math.isinf(alpha_length(PowerLawPotential(1, 1), 0.7))
    assert alpha_length(PowerLawPotential(1, 2.5), 1.0) == pytest.approx(4 / 3, rel=1e-14)


def test_gamma_examples():
    assert gamma_param(OSC, X0_OSC) == pytest.approx(0.5, rel=1e-14)
    with pytest.raises(DomainError):
        gamma_param(PowerLawPotential(1, 1), 0.5)


@pytest.mark.parametrize("c", [0.5, 2.0, 7.0])
def test_gamma_hbar_homogeneity(c):
    p = PowerLawPotential(1.3, 2.2)
    base = gamma_param(p, 0.8, Units(1.0, 1.0))
    assert gamma_param(p, 0.8, Units(c, 1.0)) == pytest.approx(c ** (2 / 3) * base, rel=1e-13)


def test_local_wavelength_examples():
    assert local_wavelength(OSC, 0.5, 0.0).wavelength == pytest.approx(1.0, rel=1e-15)
    lw = local_wavelength(PowerLawPotential(1, 1), 0.5, 0.25)
    assert lw.wavelength == pytest.approx(1 / math.sqrt(0.5), rel=1e-15)
    assert lw.variation_length == pytest.approx(0.5, rel=1e-15)
    near = local_wavelength(OSC, 0.5, 1.0 - 1e-12).wavelength
    assert near > 1e5
    with pytest.raises(DomainError):
        local_wavelength(OSC, 0.5, 1.0)


def test_pointwise_examples():
    assert wkb_pointwise_ok(OSC, X0_OSC, X0_OSC) is False
    assert wkb_pointwise_ok(OSC, X0_OSC, 0.1 * X0_OSC) is True
    with pytest.raises(DomainError):
        wkb_pointwise_ok(OSC, X0_OSC, 1.1 * X0_OSC)


def test_pointwise_flips_once_for_case1():
    xs = np.linspace(1e-9, X0_OSC, 20001)
    flags = np.array([wkb_pointwise_ok(OSC, X0_OSC, x) for x in xs])
    flips = np.flatnonzero(flags[1:] != flags[:-1])
    assert len(flips) == 1
    # boundary x0 - alpha z1 with z1 = 0.3 and alpha = 2 x0
    xb = X0_OSC * (1 - 0.6)
    assert xs[flips[0]] <= xb <= xs[flips[0] + 1]


def test_region_map_oscillator():
    rm = region_map(OSC, X0_OSC)
    assert rm.analysis.case_label is CaseLabel.CASE1
    assert rm.z1 == pytest.approx(0.3, rel=1e-14)
    assert rm.z2 is None
    assert [r.label for r in rm.regions] == [RegionLabel.WKB_VALID, RegionLabel.TOO_CLOSE]
    assert rm.regions[0].x_hi == pytest.approx(0.237841423000544, rel=1e-12)
    assert rm.regions[0].x_lo == 0.0 and rm.regions[-1].x_hi == X0_OSC


def _case2_oracle(p, x0, units=Units()):
    alpha = brute_alpha(p, x0)
    gamma = (units.hbar**2 / (4 * units.mass * alpha**4 * p.d2(x0))) ** (1 / 3)
    zmax = x0 / alpha
    z2 = gamma / (4 * gamma / 3 - 1) if 4 * gamma / 3 > 1 else math.inf
    return 3 / 4 < z2 <= zmax


@pytest.mark.parametrize("x0", [0.05, 0.1, 0.2, 0.3, 0.5, 1.0, 2.0])
def test_region_map_case2_three_regions_iff_condition(x0):
    p = PowerLawPotential(1.0, 4)
    rm = region_map(p, x0)
    assert rm.analysis.case_label is CaseLabel.CASE2
    three = len(rm.regions) == 3
    assert three == _case2_oracle(p, x0)
    if three:
        assert [r.label for r in rm.regions] == [
            RegionLabel.LINEAR_BROKEN,
            RegionLabel.WKB_VALID,
            RegionLabel.TOO_CLOSE,
        ]


def test_region_map_case2_three_regions_occur():
    # small x0 makes gamma large, 4 gamma/3 -> 1+ and z2 -> 3/4+
    assert len(region_map(PowerLawPotential(1.0, 4), 0.1).regions) == 3


def test_region_map_single_region_when_z1_exceeds_range():
    rm = region_map(OSC, 0.05)
    assert rm.z1 >= 0.05 / rm.analysis.alpha
    assert [(r.x_lo, r.x_hi, r.label) for r in rm.regions] == [(0.0, 0.05, RegionLabel.TOO_CLOSE)]


def test_linear_degenerate_map():
    p = PowerLawPotential(1.0, 1)
    rm = region_map(p, 0.5)
    assert rm.analysis.case_label is CaseLabel.LINEAR_DEGENERATE
    assert rm.near_distance == pytest.approx(0.5, rel=1e-15)
    assert [r.label for r in rm.regions] == [RegionLabel.TOO_CLOSE]
    rm = region_map(p, 2.0)
    assert [r.label for r in rm.regions] == [RegionLabel.WKB_VALID, RegionLabel.TOO_CLOSE]
    # boundary is where the wavelength condition is an equality
    xb = rm.regions[0].x_hi
    lw = local_wavelength(p, p.value(2.0), xb)
    assert lw.variation_length == pytest.approx(lw.wavelength, rel=1e-12)


def test_slope_degenerate():
    # choose x0 so that gamma = 3/4 exactly for n = 4, beta = 1
    p = PowerLawPotential(1.0, 4)
    # gamma^3 = 1/(4 alpha^4 V''), alpha = 2x/3, V'' = 12 x^2
    x0 = (1 / (4 * (2 / 3) ** 4 * 12 * 0.75**3)) ** (1 / 6)
    rm = region_map(p, x0)
    assert rm.analysis.case_label is CaseLabel.SLOPE_DEGENERATE
    assert rm.z2 is None
    assert len(rm.regions) == 2


def test_strictness_scales_gamma():
    a = analyze_turning_point(OSC, X0_OSC, strictness=8.0)
    assert a.effective_gamma == pytest.approx(4 * a.gamma, rel=1e-14)
    assert region_map(OSC, X0_OSC, strictness=8.0).z1 > region_map(OSC, X0_OSC).z1


def test_taylor_diagnostic():
    d = taylor_convergence_diagnostic(OSC, 0.7, k_max=4)
    assert d.ratios[1] == 0.0 and d.terminates and math.isinf(d.radius)
    d = taylor_convergence_diagnostic(PowerLawPotential(1, 1), 0.7, k_max=4)
    assert d.ratios == (0.0, 0.0, 0.0, 0.0)
    d = taylor_convergence_diagnostic(PowerLawPotential(1, 2.5), 1.0, k_max=6)
    assert not d.terminates
    assert d.radius == 1.0
    assert d.ratios == pytest.approx([abs(2.5 - l) for l in range(1, 7)], rel=1e-14)
    assert d.generalized_alpha[0] == pytest.approx(alpha_length(PowerLawPotential(1, 2.5), 1.0))


def _random_cases(seed, count, n_lo=1.05, n_hi=2.5):
    rng = np.random.default_rng(seed)
    for _ in range(count):
        yield (10 ** rng.uniform(-2, 2), rng.uniform(n_lo, n_hi), 10 ** rng.uniform(-2, 1))


@pytest.mark.parametrize("beta, n, x0", list(_random_cases(1, 10)) + list(_random_cases(2, 10, 2.6, 6)))
def test_partition_and_fixed_points(beta, n, x0):
    p = PowerLawPotential(beta, n)
    rm = region_map(p, x0)
    regs = rm.regions
    assert regs[0].x_lo == 0.0 and regs[-1].x_hi == x0
    for a, b in zip(regs, regs[1:]):
        assert a.x_hi == b.x_lo
        assert a.x_lo < a.x_hi
    g = rm.analysis.gamma
    assert abs(rm.z1 - g * abs(1 - 4 * rm.z1 / 3)) <= 1e-10 * max(1.0, rm.z1)
    if rm.z2 is not None:
        assert abs(rm.z2 - g * abs(1 - 4 * rm.z2 / 3)) <= 1e-10 * max(1.0, rm.z2)


@pytest.mark.parametrize("beta, n, x0", list(_random_cases(3, 5)) + [(1.0, 4, 0.1), (1.0, 1, 3.0)])
def test_pointwise_agrees_with_map(beta, n, x0):
    p = PowerLawPotential(beta, n)
    rm = region_map(p, x0)
    rng = np.random.default_rng(7)
    for x in rng.uniform(0, x0, 10_000):
        if x == 0:
            continue
        ok = wkb_pointwise_ok(p, x0, float(x))
        assert ok == (rm.label_at(float(x)) is RegionLabel.WKB_VALID)


@settings(max_examples=100, deadline=None)
@given(st.floats(1e-3, 1e3), st.floats(1.0001, 6.0), st.floats(1e-3, 1e2))
def test_case_label_depends_only_on_n(beta, n, x0):
    a = analyze_turning_point(PowerLawPotential(beta, n), x0)
    expected = CaseLabel.CASE1 if (n - 1) / 2 <= 0.75 else CaseLabel.CASE2
    if a.case_label is CaseLabel.SLOPE_DEGENERATE:
        assert expected is CaseLabel.CASE2
    else:
        assert a.case_label is expected
    assert a.ratio == (n - 1) / 2


@settings(max_examples=100, deadline=None)
@given(st.floats(1e-2, 1e2), st.floats(1.05, 5.0), st.floats(0.05, 5.0), st.floats(0.1, 10.0))
def test_rescaling_leaves_z_boundaries_invariant(beta, n, x0, c):
    a = region_map(PowerLawPotential(beta, n), x0)
    # energies stay fixed while lengths scale by c, so hbar must scale by c too
    b = region_map(PowerLawPotential(beta / c**n, n), c * x0, Units(hbar=c))
    assert b.z1 == pytest.approx(a.z1, rel=1e-9)
    assert (a.z2 is None) == (b.z2 is None)


def test_serialization_round_trip():
    rm = region_map(PowerLawPotential(1.0, 4), 0.1)
    assert RegionMap.from_dict(rm.to_dict()) == rm
    lines = rm.to_csv().strip().splitlines()
    assert lines[0] == "x_lo,x_hi,label"
    assert len(lines) == 1 + len(rm.regions)
