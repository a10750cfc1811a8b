import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from nsmode.decoherence import CutoffError
from nsmode.engineering import (DriveSpec, JointState, SingularDetuningError,
                                dispersive_compare, drive_F, effective_stark, full_tdse_evolve,
                                regime_check)
from nsmode.params import ReservoirSpec, derive_groups

QUOTED = DriveSpec(G=3e5, delta1=1e6, delta2=1e7, F0=3e6)


def test_drive_amplitude():
    spec = DriveSpec(1.0, 1.0, 1.0, 2.0, phi=0.0)
    assert drive_F(spec, 0.0, 3.0) == 2.0
    t = np.linspace(0, 5, 11)
    np.testing.assert_allclose(drive_F(QUOTED, t, 3.0) ** 2,
                               QUOTED.F0**2 * (1 - np.sin(3.0 * t)) / 2, rtol=1e-12)
    assert drive_F(DriveSpec(1.0, 1.0, 1.0, 0.0), 1.3, 2.0) == 0.0


def test_quoted_shifts():
    prof = effective_stark(QUOTED, 1e6)
    assert prof.upsilon2 == 40500.0
    assert prof.upsilon1 == pytest.approx(-31500.0, rel=1e-14)
    exact = Fraction(3 * 10**5) ** 2 / 10**6 * Fraction(9 * 10**12, 2 * 10**13)
    assert Fraction(prof.upsilon2) == exact


def test_laser_off_gives_usual_shift():
    spec = DriveSpec(3e5, 1e6, 1e7, 0.0)
    prof = effective_stark(spec, 1e6)
    assert prof.upsilon1 == spec.G**2 / spec.delta1 and prof.upsilon2 == 0.0


@settings(max_examples=30)
@given(st.floats(1e3, 1e7))
def test_upsilon2_quadratic_in_drive(F0):
    a = effective_stark(DriveSpec(3e5, 1e6, 1e7, F0), 1e6).upsilon2
    b = effective_stark(DriveSpec(3e5, 1e6, 1e7, 2 * F0), 1e6).upsilon2
    assert b == pytest.approx(4 * a, rel=1e-12)


def test_singular_detuning():
    with pytest.raises(SingularDetuningError):
        effective_stark(DriveSpec(1.0, 0.0, 1.0, 1.0), 1.0)
    with pytest.raises(SingularDetuningError):
        effective_stark(DriveSpec(1.0, 1.0, 0.0, 1.0), 1.0)
    with pytest.raises(ValueError):
        effective_stark(QUOTED, 1.0, convention="other")


def test_redundant_frequency_fields():
    DriveSpec(1.0, 2.0, 5.0, 1.0, omega_c=10.0, omega_a=12.0, omega_L=7.0)
    with pytest.raises(ValueError):
        DriveSpec(1.0, 2.0, 5.0, 1.0, omega_c=10.0, omega_a=13.0)
    with pytest.raises(ValueError):
        DriveSpec(1.0, 2.0, 5.0, 1.0, omega_c=10.0, omega_a=12.0, omega_L=8.0)


def test_regime_check_quoted_values():
    checks = {c.name: c for c in regime_check(QUOTED, 1e6, 2)}
    assert checks["|delta2|/F0"].status == "marginal"
    assert checks["|delta2|/F0"].ratio == pytest.approx(10 / 3)
    assert checks["|delta2|/zeta"].status == "pass"
    assert checks["|delta2|/G"].status == "pass"
    assert checks["|delta1|/G"].status == "marginal"
    assert not any(c.status == "fail" for c in checks.values())


def test_regime_check_edges():
    fail = {c.name: c.status for c in regime_check(DriveSpec(1e6, 1e6, 1e8, 1e6), 1e3, 1)}
    assert fail["|delta1|/G"] == "fail"
    free = {c.name: c for c in regime_check(DriveSpec(1e4, 1e6, 1e7, 0.0), 1e6, 1)}
    for name in ("|delta2|/F0", "|delta2|/zeta", "|delta2|/G", "|delta2|/|delta1|"):
        assert free[name].status == "pass" and math.isinf(free[name].ratio)


def test_engineered_modulation_handoff():
    spec = DriveSpec(3e5, 1e6, 1e7, math.sqrt(2e13 / 9), omega_c=3.2e11)
    prof = effective_stark(spec, 1e4)
    mod = prof.engineered_modulation()
    assert mod.omega0 == spec.omega_c - prof.upsilon1
    assert mod.chi == pytest.approx(1e4) and mod.sign == -1
    t = np.linspace(0, 1e-3, 7)
    np.testing.assert_allclose(prof.omega_g(t), mod.omega0 - mod.chi * np.sin(1e4 * t),
                               rtol=1e-15)
    g = derive_groups(mod, ReservoirSpec.from_rate(1e3, 1e3))
    assert g.varkappa == pytest.approx(0.1) and g.kappa == pytest.approx(0.1)
    # Negative Upsilon2 flips the canonical sign.
    neg = effective_stark(DriveSpec(3e5, 1e6, -1e7, 1e6, omega_c=3.2e11), 1e4)
    assert neg.engineered_modulation().sign == 1
    assert effective_stark(DriveSpec(3e5, 1e6, 1e7, 0.0, omega_c=1e9), 1e4) \
        .engineered_modulation().stationary
    with pytest.raises(ValueError):
        prof_zero = effective_stark(DriveSpec(3e5, 1e6, 1e7, 1e6), 1e4)
        prof_zero.engineered_modulation()


def test_integrals_match_rates():
    from scipy.integrate import quad
    prof = effective_stark(QUOTED, 1e6)
    T = 2 * math.pi / 1e6
    for conv in ("printed", "james"):
        p = effective_stark(QUOTED, 1e6, conv)
        val, _ = quad(lambda t: float(p.stark_omega(t)), 0, 0.7 * T, epsabs=1e-12)
        assert p.stark_omega_integral(0.7 * T) == pytest.approx(val, rel=1e-10)
    val, _ = quad(lambda t: float(prof.upsilon(t)), 0, 0.7 * T, epsabs=1e-14)
    assert prof.upsilon_integral(0.7 * T) == pytest.approx(val, rel=1e-10)


def test_free_evolution_is_constant():
    init = JointState.ground_coherent(1.0, 12)
    out = full_tdse_evolve(DriveSpec(0.0, 1e6, 1e7, 0.0), 1e6, init, 1e-5, 5)
    np.testing.assert_allclose(out[-1].psi, init.psi, atol=1e-14)
    rep = dispersive_compare(DriveSpec(0.0, 1e6, 1e7, 0.0), 1e6, 1.0, 12, 1e-5, samples=11)
    assert rep.max_error("printed") < 1e-12 and rep.max_error("james") < 1e-12


def test_norm_conserved_at_quoted_values():
    out = full_tdse_evolve(QUOTED, 1e6, JointState.ground_coherent(1.0, 24),
                           2 * math.pi / 1e6, 51)
    assert max(abs(s.norm - 1) for s in out) < 1e-7


def test_tdse_cutoff_guard():
    with pytest.raises(CutoffError):
        full_tdse_evolve(QUOTED, 1e6, JointState.ground_coherent(3.0, 12), 1e-6, 3)


def test_deep_dispersive_regime_matches_effective_model():
    spec = DriveSpec(1e4, 1e6, 1e8, 3e6)
    rep = dispersive_compare(spec, 1e5, 1.0, 24, 2 * math.pi / 1e5)
    assert rep.pop_ground.min() > 0.99
    assert rep.max_error("james") < 5e-2
    assert np.abs(rep.relative_phase_error).max() < 5e-2
    # The F^2/delta1 atomic shift misses the global phase by a wide margin.
    assert rep.max_error("printed") > 1.0
