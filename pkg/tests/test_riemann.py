import json

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from wavepatterns.errors import ConfigurationError
from wavepatterns.gas import GasParams, ThermoState, char_speed, entropy, pressure
from wavepatterns.rarefaction import make_rarefaction, state_at_volume
from wavepatterns.riemann import build_forward, decompose, is_pure_contact

P = GasParams()
ZL = ThermoState(1.0, 0.0, 1.0)


def test_pure_contact_classification():
    assert is_pure_contact(P, ZL, ZL)
    assert is_pure_contact(P, ZL, ThermoState(2.0, 0.0, 2.0))
    assert not is_pure_contact(P, ZL, ThermoState(1.0, 0.1, 1.0))
    assert not is_pure_contact(P, ZL, ThermoState(1.0, 0.0, 1.1))


def test_pure_contact_gives_zero_strength():
    zr = ThermoState(1.1, 0.0, 1.1)
    pat = decompose(P, ZL, zr)
    assert pat.z_minus_m == ZL and pat.z_plus_m == zr
    assert pat.u_m == 0.0 and pat.p_m == 1.0
    assert pat.pure_contact and pat.closeness() == 0.0


@settings(max_examples=30, deadline=None)
@given(st.floats(1.0, 1.1), st.floats(0.9, 1.2), st.floats(0.01, 0.2))
def test_forward_pattern_recovered(vm_ratio, thm, dtheta):
    built = build_forward(P, ZL, vm_ratio, thm, thm + dtheta)
    pat = decompose(P, ZL, built.z_plus)
    for a, b in ((pat.z_minus_m, built.z_minus_m), (pat.z_plus_m, built.z_plus_m)):
        assert np.max(np.abs(a.as_array() - b.as_array())) < 1e-8
    assert pat.p_m == pytest.approx(built.p_m, abs=1e-8)
    assert pat.u_m == pytest.approx(built.u_m, abs=1e-8)


def test_invariants_of_solved_pattern():
    built = build_forward(P, ZL, 1.02, 1.08, 1.1)
    pat = decompose(P, ZL, built.z_plus)
    assert max(abs(r) for r in pat.residuals) < 1e-12
    for z, s in ((pat.z_minus_m, pat.s_minus), (pat.z_plus_m, pat.s_plus)):
        assert pressure(P, z.v, z.theta) == pytest.approx(pat.p_m, rel=1e-10)
        assert entropy(P, z.v, z.theta) == pytest.approx(s, abs=1e-10)
        assert z.u == pat.u_m
    assert char_speed(P, pat.z_minus_m.v, pat.s_minus, 1) > char_speed(P, ZL.v, pat.s_minus, 1)
    assert char_speed(P, pat.z_plus.v, pat.s_plus, 3) > char_speed(P, pat.z_plus_m.v, pat.s_plus, 3)
    assert pat.delta == pytest.approx(0.1)


def test_reconstruction_from_both_sides():
    built = build_forward(P, ZL, 1.03, 0.95, 1.05)
    pat = decompose(P, ZL, built.z_plus)
    r1 = make_rarefaction(P, 1, pat.z_minus, pat.z_minus_m.v)
    r3 = make_rarefaction(P, 3, pat.z_plus, pat.z_plus_m.v)
    u_left = state_at_volume(r1, P, pat.z_minus_m.v)[1]
    u_right = state_at_volume(r3, P, pat.z_plus_m.v)[1]
    assert abs(u_left - pat.u_m) < 1e-12 and abs(u_right - pat.u_m) < 1e-12


def test_bisection_fallback_agrees():
    built = build_forward(P, ZL, 1.05, 1.0, 1.1)
    newton = decompose(P, ZL, built.z_plus)
    fallback = decompose(P, ZL, built.z_plus, max_iter=0)
    assert fallback.method == "bisection"
    assert fallback.z_minus_m.v == pytest.approx(newton.z_minus_m.v, rel=1e-12)
    assert fallback.u_m == pytest.approx(newton.u_m, abs=1e-12)


def test_compressive_data_rejected():
    # u+ < u- with equal pressures needs shocks, not rarefactions
    with pytest.raises(ConfigurationError, match="ordering"):
        decompose(P, ZL, ThermoState(1.0, -0.2, 1.0))


def test_halving_scaling():
    built = build_forward(P, ZL, 1.04, 1.07, 1.1)
    direction = built.z_plus.as_array() - ZL.as_array()
    d_full = decompose(P, ZL, ThermoState(*(ZL.as_array() + direction))).closeness()
    d_half = decompose(P, ZL, ThermoState(*(ZL.as_array() + 0.5 * direction))).closeness()
    assert 0.3 <= d_half / d_full <= 0.7


def test_json_round_trip():
    pat = decompose(P, ZL, build_forward(P, ZL, 1.02, 1.08, 1.1).z_plus)
    doc = json.loads(json.dumps(pat.to_dict()))
    assert doc["p_m"] == pat.p_m and doc["z_minus_m"]["v"] == pat.z_minus_m.v
