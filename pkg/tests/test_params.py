import math

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from nsmode.params import (ModulationSpec, ReservoirSpec, StationaryModeError, derive_groups,
                           modulation_from_groups, validate_regime)

pos = st.floats(min_value=1e-3, max_value=1e3, allow_nan=False, allow_infinity=False)


def test_gamma0_is_derived():
    res = ReservoirSpec(lambda0=2.0, xi=1.0, sigma0=0.25)
    assert res.gamma0 == 1.0
    assert ReservoirSpec.from_rate(3.0, 1.0, lambda0=0.5).gamma0 == pytest.approx(3.0)


@pytest.mark.parametrize("kw", [dict(omega0=0.0), dict(omega0=1.0, chi=-1.0),
                                dict(omega0=1.0, chi=1.0, zeta=0.0),
                                dict(omega0=1.0, sign=0)])
def test_modulation_rejects_bad_fields(kw):
    with pytest.raises(ValueError):
        ModulationSpec(**kw)


def test_stationary_groups_raise():
    res = ReservoirSpec.from_rate(1.0, 1.0)
    with pytest.raises(StationaryModeError):
        derive_groups(ModulationSpec(10.0), res)


def test_reference_groups():
    res = ReservoirSpec.from_rate(1e3, 1e3)
    g = derive_groups(ModulationSpec(1e9, chi=1e4, zeta=1e4), res)
    assert (g.varkappa, g.kappa, g.epsilon) == (0.1, 0.1, 1.0)


@given(pos, pos, pos, pos, st.floats(min_value=1e-2, max_value=1e2))
def test_groups_scale_covariant(g0, xi, chi, zeta, c):
    res = ReservoirSpec.from_rate(g0, xi)
    mod = ModulationSpec(1e9, chi, zeta)
    a = derive_groups(mod, res)
    b = derive_groups(ModulationSpec(1e9 * c, chi * c, zeta * c),
                      ReservoirSpec.from_rate(g0 * c, xi * c))
    assert b.varkappa == pytest.approx(a.varkappa, rel=1e-12)
    assert b.kappa == pytest.approx(a.kappa, rel=1e-12)
    assert b.epsilon == pytest.approx(a.epsilon, rel=1e-12)


@given(pos, pos, pos, pos)
def test_epsilon_kappa_is_xi_over_zeta(g0, xi, chi, zeta):
    g = derive_groups(ModulationSpec(1e9, chi, zeta), ReservoirSpec.from_rate(g0, xi))
    assert g.epsilon * g.kappa == pytest.approx(xi / zeta, rel=1e-12)


@settings(max_examples=50)
@given(pos, pos, pos, pos)
def test_groups_round_trip(vk, k, g0, xi):
    res = ReservoirSpec.from_rate(g0, xi)
    g = derive_groups(modulation_from_groups(vk, k, res, omega0=1e9), res)
    assert g.varkappa == pytest.approx(vk, rel=1e-12)
    assert g.kappa == pytest.approx(k, rel=1e-12)


def test_flipped_sign():
    mod = ModulationSpec(10.0, 1.0, 2.0)
    assert mod.flipped().sign == 1 and mod.flipped().flipped() == mod
    assert mod.period == pytest.approx(math.pi)


def test_validate_regime_codes():
    res = ReservoirSpec.from_rate(1.0, 1.0)
    codes = {d.code for d in validate_regime(ModulationSpec(10.0, 2.0, 5.0), res)}
    assert {"strong-modulation", "non-adiabatic"} <= codes
    assert "stationary" in {d.code for d in validate_regime(ModulationSpec(10.0), res)}
    assert validate_regime(ModulationSpec(1e4, 1.0, 1.0), ReservoirSpec(0.1, 1.0, 1.0)) == []
    notes = validate_regime(ModulationSpec(1e4, 1.0, 1.0), ReservoirSpec(0.0, 1.0, 1.0, 0.5))
    assert {d.code for d in notes} == {"decoupled", "finite-temperature"}
