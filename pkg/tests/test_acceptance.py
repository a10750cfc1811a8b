"""Acceptance criteria, one test each; verdict lines appear in the terminal summary.

Run alone with ``pytest -v -s tests/test_acceptance.py`` to see the lines inline.
"""

import math
import time

import numpy as np
import pytest

from nsmode.bath import build_bath, evolve_moments, extract_decay
from nsmode.decoherence import CatStateSpec, c12, c12_from_gamma
from nsmode.engineering import DriveSpec, dispersive_compare, effective_stark, regime_check
from nsmode.fock import TruncatedState, coherence_extract, evolve_master, gamma_interpolant
from nsmode.kernel import (big_gamma_trace, gamma_2d, gamma_of_t, kernel_integrand,
                           samples_per_period, stationary_reference)
from nsmode.params import (DimensionlessGroup, ModulationSpec, ReservoirSpec, derive_groups,
                           modulation_from_groups)

RES = ReservoirSpec.from_rate(1.0, 1.0)
SETS = [(0.1, 0.1), (0.5, 0.1), (0.1, 0.5), (0.5, 0.5)]
T_MAX = 5.0     # gamma0 t


@pytest.fixture(scope="module")
def fig1_traces():
    """Damping traces for the four sets over gamma0 t in [0, 5], grid <= period/50."""
    out = {}
    start = time.perf_counter()
    for vk, k in SETS:
        mod = modulation_from_groups(vk, k, RES, omega0=1e4)
        n = samples_per_period(mod, T_MAX, 101)
        out[vk, k] = (mod, big_gamma_trace(derive_groups(mod, RES), mod, T_MAX, n))
    return out, time.perf_counter() - start


def test_criterion_1_stationary_bath(report):
    start = time.perf_counter()
    res = ReservoirSpec.from_rate(1.0, 180.0)
    mod = ModulationSpec(1e4)
    grid = build_bath(res, mod, 2.0, 4000, halfwidth_xi_multiples=16.5, horizon_factor=2.0)
    env = extract_decay(evolve_moments(grid, mod, res, 1.0, 2.0, np.linspace(0, 2.0, 41)), mod)
    window = env.times >= 0.2 - 1e-12
    rel = np.abs(env.re_gamma[window] / stationary_reference(res, env.times[window]) - 1)
    elapsed = time.perf_counter() - start
    ok = rel.max() < 0.05 and elapsed < 60
    assert report("1 stationary bath", ok,
                  f"max rel err {rel.max():.3%} over gamma0 t in [0.2, 2], M=4000, "
                  f"{elapsed:.1f} s")


def test_criterion_2_kernel_self_consistency(report):
    start = time.perf_counter()
    worst, points = 0.0, 0
    for vk, k in SETS:
        for sign in (-1, 1):
            mod = modulation_from_groups(vk, k, RES, omega0=1e4, sign=sign)
            assert mod.omega0 / mod.chi >= 100
            g = derive_groups(mod, RES)
            zts = (0.5, 1.5, 3.0, 4.5, 6.0) if sign == -1 else (2.5,)
            for zt in zts:
                t = zt / mod.zeta
                a = gamma_of_t(g, mod, t, atol=1e-12)
                b = gamma_2d(g, mod, t)
                worst = max(worst, abs(a - b) / abs(b))
                points += 1
    elapsed = time.perf_counter() - start
    ok = points >= 20 and worst < 1e-6 and elapsed < 120
    assert report("2 kernel 1-D vs 2-D", ok,
                  f"max rel diff {worst:.2e} on {points} points, {elapsed:.1f} s")


def test_criterion_3_fig1_ordering(report, fig1_traces):
    traces, _ = fig1_traces
    vals = [float(traces[s][1].big_gamma_at(T_MAX).real) for s in SETS]
    stationary = 0.5 * T_MAX
    chain = vals + [stationary]
    gaps = np.diff(chain)
    margin = 0.01 * stationary
    ok = bool(np.all(gaps > margin))
    # Informational: values at literally equal zeta t = 50 (different gamma0 t per set).
    fixed = []
    for vk, k in SETS:
        mod = traces[vk, k][0]
        t50 = 50 / mod.zeta
        if t50 <= T_MAX + 1e-12:
            fixed.append(float(traces[vk, k][1].big_gamma_at(t50).real))
        else:
            fixed.append(float(big_gamma_trace(derive_groups(mod, RES), mod, t50, 11)
                               .big_gamma[-1].real))
    print("   at zeta t = 50: " + ", ".join(f"{s}: {v:.4f}" for s, v in zip(SETS, fixed)))
    assert report("3 ordering", ok,
                  "Re Gamma at gamma0 t = 5 (zeta t = 50 for varkappa = 1/10): "
                  + " < ".join(f"{v:.4f}" for v in chain)
                  + f"; min gap {gaps.min():.4f} > {margin:.4f}")


def test_criterion_4_fock_oracle(report, fig1_traces):
    traces, trace_time = fig1_traces
    spec = CatStateSpec.even_cat(1.0)
    start = time.perf_counter()
    worst_diff, worst_drift = 0.0, 0.0
    for s in SETS:
        tr = traces[s][1]
        states = evolve_master(TruncatedState.from_cat(spec, 24), gamma_interpolant(tr), T_MAX,
                               51, rtol=1e-10)
        series = coherence_extract(states, spec)
        assert series.valid.all(), series.note
        worst_diff = max(worst_diff, float(np.abs(series.coherence
                                                  - c12(1.0, tr, series.times)).max()))
        worst_drift = max(worst_drift, max(abs(st.trace - 1) for st in states))
    elapsed = time.perf_counter() - start + trace_time
    ok = worst_diff < 1e-3 and worst_drift < 1e-9 and elapsed < 300
    assert report("4 Fock oracle", ok,
                  f"max |coherence - C12| {worst_diff:.2e}, trace drift {worst_drift:.1e}, "
                  f"n_cut=24, {elapsed:.1f} s")


def test_criterion_5_small_G_branch(report):
    worst = 0.0
    for zt in (0.3, 1.1, 2.0, 4.0, 7.5):
        for kappa, eps in ((0.1, 1.0), (0.5, 0.2), (0.1, 5.0), (0.5, 1.0)):
            groups = DimensionlessGroup(1.0, kappa, eps)
            for target in (1e-5, -1e-5):
                # tau with G = s[sin zt - sin(zt - tau)] = target, s = +1.
                tau = zt - math.asin(math.sin(zt) - target)
                if math.cos(zt) < 0:
                    tau = zt - (math.pi - math.asin(math.sin(zt) - target))
                tau %= 2 * math.pi
                gen = kernel_integrand(tau, zt, groups, -1, branch="general")
                ser = kernel_integrand(tau, zt, groups, -1, branch="series")
                worst = max(worst, abs(gen - ser) / abs(gen))
    assert report("5 small-G branch", worst < 1e-8, f"max rel diff {worst:.2e} at |G| = 1e-5")


def test_criterion_6_engineering_numbers(report):
    spec = DriveSpec(G=3e5, delta1=1e6, delta2=1e7, F0=10 * 3e5)
    prof = effective_stark(spec, 1e6)
    checks = {c.name: c for c in regime_check(spec, 1e6, 2)}
    marginal = checks["|delta2|/F0"]
    ok = prof.upsilon2 == 40500.0 and marginal.status == "marginal"
    assert report("6 engineering numbers", ok,
                  f"Upsilon2 = {prof.upsilon2!r}, Upsilon1 = {prof.upsilon1:.6g}, "
                  f"|delta2|/F0 = {marginal.ratio:.4g} ({marginal.status})")


def test_criterion_7_dispersive_validation(report):
    spec = DriveSpec(G=3e5, delta1=1e6, delta2=1e7, F0=3e6)
    zeta = 1e6
    start = time.perf_counter()
    rep = dispersive_compare(spec, zeta, 1.0, 24, 2 * math.pi / zeta, n_max=4, samples=201)
    elapsed = time.perf_counter() - start
    pop = float(rep.pop_ground.min())
    err = rep.max_error("printed")
    print(f"   F^2/delta1 vs F^2/delta2 shift: max phase error {err:.3e} vs "
          f"{rep.max_error('james'):.3e} rad; convention-free (n vs 0) "
          f"{np.abs(rep.relative_phase_error).max():.3e} rad")
    ok = pop >= 0.99 and err < 5e-2 and elapsed < 120
    assert report("7 dispersive validation", ok,
                  f"min ground population {pop:.4f} (need >= 0.99), max phase error "
                  f"{err:.3e} rad for n <= 4 (need < 5e-2), {elapsed:.1f} s")


def test_criterion_8_c12_limits(report):
    at_zero = c12_from_gamma(1.0, 0.0)
    far = [abs(c12_from_gamma(a, 60.0) - math.exp(-2 * a * a)) for a in (0.5, 1.0, 2.0)]
    ok = at_zero == 1.0 and max(far) < 1e-12
    assert report("8 C12 limits", ok,
                  f"C12(0) = {float(at_zero)!r}, max |C12 - exp(-2|a|^2)| at Re Gamma = 60: "
                  f"{max(far):.1e}")
