"""Exit criteria, one test per criterion; a PASS/FAIL line each is printed at the end."""

import math
import time

import numpy as np
import pytest
from scipy.special import gamma as G

from wkbbound import (
    CaseLabel,
    NumerovConfig,
    PowerLawPotential,
    TrialFamily,
    airy_ai,
    alpha_length,
    bouncer_spectrum,
    condition_37_check,
    freefall_paper_wkb,
    lower_bound_energy,
    minimize_upper_bound,
    numerov_ground_state,
    rayleigh_quotient,
    region_map,
)
from wkbbound.bounds import second_case_condition, x0_closed_form, x0_rough_root
from wkbbound.report import Verdict, analyze


def test_c1_harmonic_oscillator(criterion):
    t0 = time.perf_counter()
    rep = analyze(0.5, 2.0)
    elapsed = time.perf_counter() - t0
    checks = {
        "x0": abs(rep.lower.x0_min - (1 / 8) ** 0.25) <= 1e-10,
        "E_cl": abs(rep.lower.E_cl - 1 / (2 * math.sqrt(8))) <= 1e-10,
        "E_ref": abs(rep.reference.E0 - 1.5) <= 1e-6,
        "E_rr": abs(rep.upper.E_rr - 1.5) <= 1e-8,
        "certified": rep.bracket_verdict is Verdict.CERTIFIED,
        "runtime": elapsed < 1.0,
    }
    criterion("1 harmonic oscillator", all(checks.values()),
              f"E_cl={rep.lower.E_cl:.10f} E0={rep.reference.E0:.10f} E_rr={rep.upper.E_rr:.10f} t={elapsed:.3f}s")
    assert checks == dict.fromkeys(checks, True)


def test_c2_free_fall(criterion):
    p = PowerLawPotential.free_fall(1.0)
    lb = lower_bound_energy(p)
    ref = numerov_ground_state(p)
    airy = bouncer_spectrum(1, 1.0).E0
    ub = minimize_upper_bound(p, TrialFamily.EXP_LINEAR)
    # minimum of a^2/2 + 3/(2a): a^3 = 3/2, value 1.5 a^2
    e_rr_oracle = 1.5 * (1.5 ** (1 / 3)) ** 2
    ratio = freefall_paper_wkb(1, 1.0).E0 / airy
    checks = {
        "x0": lb.x0_min == 0.5,
        "E_cl": abs(lb.E_cl - 0.5) <= 1e-12,
        "E_ref": abs(ref.E0 - airy) <= 1e-5 and abs(airy - 1.855757) < 1e-6,
        "E_rr": abs(ub.E_rr - e_rr_oracle) <= 1e-8,
        "bracket": lb.certified and lb.E_cl <= ref.E0 <= ub.E_rr,
        "ratio": abs(ratio - 0.9924) <= 0.0005,
    }
    criterion("2 free fall", all(checks.values()),
              f"E0={ref.E0:.8f} E_rr={ub.E_rr:.10f} ratio={ratio:.5f}")
    assert checks == dict.fromkeys(checks, True)


def test_c3_certification_sweep(criterion):
    ns = [round(1.0 + 0.1 * i, 12) for i in range(16)]
    betas = [0.1, 1.0, 10.0]
    t0 = time.perf_counter()
    failures = []
    count = 0
    for beta in betas:
        for n in ns:
            p = PowerLawPotential(beta, n)
            lb = lower_bound_energy(p)
            e0 = numerov_ground_state(p).E0
            count += 1
            if not (lb.certified and lb.E_cl < e0 and condition_37_check(lb.E_cl, lb.x0_min)):
                failures.append((beta, n, lb.E_cl, e0))
    elapsed = time.perf_counter() - t0
    ok = count == 48 and not failures and elapsed < 30
    criterion("3 certification sweep", ok, f"{count} cases, {len(failures)} failures, t={elapsed:.2f}s")
    assert ok, failures


def test_c4_second_case_refusal(criterion):
    results = {}
    for n in (3.0, 4.0, 5.0):
        lb = lower_bound_energy(PowerLawPotential(1.0, n))
        results[n] = (lb.certified, second_case_condition(n), lb.case_label)
    ok = all(not c and not g and lab is CaseLabel.CASE2 for c, g, lab in results.values())
    ok = ok and 4 / 27 < 27 / 8
    criterion("4 case-2 refusal", ok, "n=3,4,5 uncertified; (3/2)^3 <= n/(n-1)^3 false")
    assert ok


def test_c5_region_fixed_points(criterion):
    rng = np.random.default_rng(2024)
    worst = 0.0
    partition_ok = True
    for _ in range(20):
        beta, n, x0 = 10 ** rng.uniform(-2, 2), rng.uniform(1.05, 2.5), 10 ** rng.uniform(-1.5, 1)
        rm = region_map(PowerLawPotential(beta, n), x0)
        assert rm.analysis.case_label is CaseLabel.CASE1
        g = rm.analysis.gamma
        worst = max(worst, abs(rm.z1 - g * (1 - 4 * rm.z1 / 3)))
        regs = rm.regions
        partition_ok &= regs[0].x_lo == 0.0 and regs[-1].x_hi == x0
        partition_ok &= all(a.x_hi == b.x_lo and a.x_lo < a.x_hi for a, b in zip(regs, regs[1:]))
    ok = worst <= 1e-10 and partition_ok
    criterion("5 region-map fixed points", ok, f"max residual {worst:.2e}")
    assert ok


def test_c6_power_law_ratio(criterion):
    rng = np.random.default_rng(6)
    worst = 0.0
    for _ in range(100):
        beta, n, x0 = 10 ** rng.uniform(-3, 3), rng.uniform(1.01, 6.0), 10 ** rng.uniform(-3, 3)
        ratio = x0 / alpha_length(PowerLawPotential(beta, n), x0)
        worst = max(worst, abs(ratio - (n - 1) / 2))
    ok = worst <= 1e-12
    criterion("6 x0/alpha = (n-1)/2", ok, f"max deviation {worst:.2e}")
    assert ok


def _closed_quotient(beta, n, trial, a):
    if trial is TrialFamily.EXP_LINEAR:
        mom = lambda k: G(k + 1) / (2 * a) ** (k + 1)
        kin = mom(0) - 2 * a * mom(1) + a * a * mom(2)
    else:
        mom = lambda k: G((k + 1) / 2) / (2 * (2 * a) ** ((k + 1) / 2))
        kin = mom(0) - 4 * a * mom(2) + 4 * a * a * mom(4)
    return (0.5 * kin + beta * mom(n + 2)) / mom(2)


def test_c7_oracle_equivalences(criterion):
    rng = np.random.default_rng(7)
    x0_dev = 0.0
    for _ in range(50):
        p = PowerLawPotential(10 ** rng.uniform(-3, 3), rng.uniform(1.0, 2.5))
        x0_dev = max(x0_dev, abs(x0_rough_root(p) / x0_closed_form(p) - 1))
    quad_dev = 0.0
    for n in (1.0, 2.0):
        for trial in TrialFamily:
            for a in (0.1, 0.5, 1.0, 2.0, 10.0):
                num = rayleigh_quotient(PowerLawPotential(0.7, n), trial, a)
                quad_dev = max(quad_dev, abs(num / _closed_quotient(0.7, n, trial, a) - 1))
    ai_dev = abs(airy_ai(0.0) - 0.3550280539)
    ok = x0_dev <= 1e-10 and quad_dev <= 1e-9 and ai_dev <= 1e-9
    criterion("7 oracle equivalences", ok,
              f"x0 {x0_dev:.1e}, quadrature {quad_dev:.1e}, Ai(0) {ai_dev:.1e}")
    assert ok


def test_c8_numerov_self_consistency(criterion):
    out = []
    ok = True
    for p in (PowerLawPotential(0.5, 2.0), PowerLawPotential(1.0, 1.0)):
        base = numerov_ground_state(p)
        wide = numerov_ground_state(p, NumerovConfig(safety=2 * NumerovConfig().safety))
        shift = abs(wide.E0 - base.E0)
        ok &= base.error_estimate < 1e-6 and shift < 1e-8
        out.append(f"halving {base.error_estimate:.1e} x_max {shift:.1e}")
    criterion("8 Numerov self-consistency", ok, "; ".join(out))
    assert ok
