import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from oracles import normal_mode_exchange_rate, random_density_matrix
from qlspin.errors import NonPositiveDistance, NonPositiveField, OrderingViolation, TruncationError, UnstableTrap, WrongRegisterKind
from qlspin.state import CompositeState, RegisterSpec, make_pure_state, make_thermal_mode, mean_phonon_number, tensor
from qlspin.trap import (
    ANTIPROTON,
    BERYLLIUM_ION,
    PROTON,
    TrapArrayConfig,
    TrapFrequencies,
    ZoneRole,
    apply_shuttle_heating,
    eigenfrequencies_from,
    exchange_rate,
    exchange_time,
    free_cyclotron_frequency,
    invariance_theorem,
    larmor_frequency_truth,
)

FC_PROTON_5T = 76225932.18805414
FL_PROTON_5T = 212887392.304878
F_MINUS_REF = 2361.3482351500413  # (76.23 MHz, 0.6 MHz), 50-digit decimal evaluation


def test_cyclotron_proton():
    assert free_cyclotron_frequency(PROTON, 5.0) == pytest.approx(FC_PROTON_5T, rel=1e-14)
    assert free_cyclotron_frequency(ANTIPROTON, 5.0) == free_cyclotron_frequency(PROTON, 5.0)
    assert free_cyclotron_frequency(PROTON, 10.0) == 2 * free_cyclotron_frequency(PROTON, 5.0)
    with pytest.raises(NonPositiveField):
        free_cyclotron_frequency(PROTON, 0.0)


def test_larmor_truth():
    assert larmor_frequency_truth(PROTON, 5.0) == pytest.approx(FL_PROTON_5T, rel=1e-14)
    assert larmor_frequency_truth(PROTON, 2.5) * 2 == pytest.approx(FL_PROTON_5T, rel=1e-15)
    # g = 2 means spin precession at the cyclotron frequency
    assert larmor_frequency_truth(BERYLLIUM_ION, 5.0) == free_cyclotron_frequency(BERYLLIUM_ION, 5.0)
    with pytest.raises(NonPositiveField):
        larmor_frequency_truth(PROTON, -1.0)


def test_invariance_limits():
    assert invariance_theorem(TrapFrequencies(1e6, 0.0, 0.0)) == 1e6
    tf = TrapFrequencies(50e6, 0.5e6, 2.5e3)
    assert invariance_theorem(TrapFrequencies(*(3 * tf.as_array()))) == pytest.approx(3 * invariance_theorem(tf), rel=1e-15)
    with pytest.raises(OrderingViolation):
        invariance_theorem(TrapFrequencies(1e5, 1e6, 0.0))
    with pytest.raises(OrderingViolation):
        invariance_theorem(TrapFrequencies(1e6, 1e5, 2e5))


def test_eigenfrequencies_reference():
    fc, fz = 76.23e6, 0.6e6
    tf = eigenfrequencies_from(fc, fz)
    assert tf.f_minus == pytest.approx(F_MINUS_REF, rel=1e-12)
    assert tf.f_plus == pytest.approx((fc + math.sqrt(fc * fc - 2 * fz * fz)) / 2, rel=1e-15)
    assert invariance_theorem(tf) == pytest.approx(fc, rel=1e-12)
    assert eigenfrequencies_from(5e6, 0.0) == TrapFrequencies(5e6, 0.0, 0.0)
    with pytest.raises(UnstableTrap):
        eigenfrequencies_from(1e6, 0.9e6)


def test_invariance_round_trip_grid():
    worst = 0.0
    checked = 0
    for fc in np.linspace(1e6, 100e6, 100):
        for fz in np.linspace(0.1e6, 1e6, 46):
            if fc <= 1.5 * fz:
                continue
            checked += 1
            worst = max(worst, abs(invariance_theorem(eigenfrequencies_from(fc, fz)) / fc - 1))
    assert checked > 4000
    assert worst < 1e-12


@settings(max_examples=200, deadline=None)
@given(st.floats(1e6, 100e6), st.floats(0.1e6, 1e6))
def test_invariance_round_trip_random(fc, fz):
    if fc * fc <= 2 * fz * fz:
        with pytest.raises(UnstableTrap):
            eigenfrequencies_from(fc, fz)
        return
    tf = eigenfrequencies_from(fc, fz)
    if not tf.f_plus > fz:
        with pytest.raises(OrderingViolation):
            invariance_theorem(tf)
        return
    assert abs(invariance_theorem(tf) / fc - 1) < 1e-12


# exchange rate -----------------------------------------------------------------

def test_exchange_rate_scaling():
    r = exchange_rate(PROTON, BERYLLIUM_ION, 100e-6, 400e3)
    assert exchange_rate(PROTON, BERYLLIUM_ION, 200e-6, 400e3) == pytest.approx(r / 8, rel=1e-14)
    assert exchange_rate(BERYLLIUM_ION, PROTON, 100e-6, 400e3) == r
    assert exchange_rate(ANTIPROTON, BERYLLIUM_ION, 100e-6, 400e3) == r
    assert exchange_time(PROTON, BERYLLIUM_ION, 100e-6, 400e3) == pytest.approx(0.5 * math.pi / r)
    with pytest.raises(NonPositiveDistance):
        exchange_rate(PROTON, BERYLLIUM_ION, 0.0, 400e3)


@pytest.mark.parametrize("d", [50e-6, 100e-6, 200e-6])
@pytest.mark.parametrize("sp", [PROTON, ANTIPROTON], ids=["proton", "antiproton"])
def test_exchange_rate_vs_normal_modes(d, sp):
    f = 400e3
    ref = normal_mode_exchange_rate(sp.charge, sp.mass, BERYLLIUM_ION.charge, BERYLLIUM_ION.mass, d, f)
    assert exchange_rate(sp, BERYLLIUM_ION, d, f) == pytest.approx(ref, rel=0.01)


# trap array --------------------------------------------------------------------

def test_default_array_roles():
    t = TrapArrayConfig()
    assert t.role("a") is ZoneRole.PRECISION
    assert t.zones_with(ZoneRole.COUPLING) == ["c"]
    assert t.coupling_frequency == 400e3
    with pytest.raises(NonPositiveField):
        TrapArrayConfig(b_field=0)
    with pytest.raises(NonPositiveDistance):
        TrapArrayConfig(well_separation_d=-1)
    with pytest.raises(ValueError):
        TrapArrayConfig(zones=(("a", "precision"), ("b", "coupling")))


# heating ------------------------------------------------------------------------

def test_heating_zero_is_identity():
    s = make_thermal_mode(0.1, 15)
    assert apply_shuttle_heating(s, "mode", 0.0) is s


def test_heating_from_ground():
    s = apply_shuttle_heating(make_pure_state([RegisterSpec.mode("m", 15)], {"m": 0}), "m", 0.1)
    assert mean_phonon_number(s, "m") == pytest.approx(0.1, abs=1e-6)


@pytest.mark.parametrize("q1,q2", [(0.1, 0.2), (0.5, 1.7), (0.05, 0.05)])
def test_heating_additive(q1, q2):
    s = make_pure_state([RegisterSpec.mode("m", 15)], {"m": 0})
    s = apply_shuttle_heating(apply_shuttle_heating(s, "m", q1), "m", q2)
    assert mean_phonon_number(s, "m") == pytest.approx(q1 + q2, abs=1e-6)


def test_heating_guard_and_kind():
    s = make_pure_state([RegisterSpec.mode("m", 3), RegisterSpec.spin("s")], {"m": 3, "s": 0})
    with pytest.raises(TruncationError):
        apply_shuttle_heating(s, "m", 0.1)
    with pytest.raises(WrongRegisterKind):
        apply_shuttle_heating(s, "s", 0.1)


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 2**31), st.floats(0.0, 2.0))
def test_heating_monotone_and_trace(seed, q):
    rng = np.random.default_rng(seed)
    spin = CompositeState((RegisterSpec.spin("s"),), random_density_matrix(2, rng))
    mode = make_thermal_mode(0.05, 15, "m")
    s = tensor(spin, mode)
    out = apply_shuttle_heating(s, "m", q)
    assert mean_phonon_number(out, "m") >= mean_phonon_number(s, "m") - 1e-12
    assert abs(out.trace() - 1) < 1e-10
    np.testing.assert_allclose(out.rho, out.rho.conj().T, atol=1e-12)
    out.check_physical()
