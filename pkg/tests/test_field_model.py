"""Dipole law oracles: closed-form examples first, then algebraic
properties (round trip, decay, anisotropy), then validation guards."""
import math

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from magtrack import (
    DegenerateGeometry,
    DipoleSource,
    DomainError,
    OutOfRange,
    RigConfig,
    Vec2,
    Vec3,
    dipole_field_at,
    field_magnitude_sq,
    invert_radius,
)

Y_AXIS = Vec2(0.0, 1.0)


# --- closed-form examples -------------------------------------------------

def test_axial_field_is_twice_moment_over_r_cubed():
    src = DipoleSource(Vec2(0, 0), Y_AXIS, m_eff=1.0, frequency=20.0)
    f = dipole_field_at(src, Vec2(0.0, 1.0))
    assert f.x == pytest.approx(0.0, abs=1e-15)
    assert f.y == pytest.approx(2.0, abs=1e-12)


def test_equatorial_field_is_moment_over_r_cubed_antiparallel():
    src = DipoleSource(Vec2(0, 0), Y_AXIS, m_eff=1.0, frequency=20.0)
    f = dipole_field_at(src, Vec2(1.0, 0.0))
    assert f.x == pytest.approx(0.0, abs=1e-15)
    assert f.y == pytest.approx(-1.0, abs=1e-12)


def test_field_at_dipole_center_degenerate():
    src = DipoleSource(Vec2(2, 3), Y_AXIS, m_eff=1.0, frequency=20.0)
    with pytest.raises(DegenerateGeometry):
        dipole_field_at(src, Vec2(2, 3))


def test_magnitude_axial_unit():
    assert field_magnitude_sq(k=1.0, r=1.0, cos2theta=1.0) == pytest.approx(4.0, rel=1e-15)


def test_magnitude_equatorial_r2():
    assert field_magnitude_sq(k=1.0, r=2.0, cos2theta=0.0) == pytest.approx(1.0 / 64.0, rel=1e-15)


def test_magnitude_k_scales_linearly():
    assert field_magnitude_sq(k=64.0, r=2.0, cos2theta=1.0) == pytest.approx(4.0, rel=1e-15)


def test_invert_radius_examples():
    assert invert_radius(k=1.0, cos2theta=1.0, h_sq=4.0) == pytest.approx(1.0, rel=1e-12)
    assert invert_radius(k=64.0, cos2theta=1.0, h_sq=4.0) == pytest.approx(2.0, rel=1e-12)


def test_invert_radius_noise_floor_guard():
    with pytest.raises(OutOfRange):
        invert_radius(k=1.0, cos2theta=1.0, h_sq=0.01, noise_floor_sq=0.01)
    with pytest.raises(OutOfRange):
        invert_radius(k=1.0, cos2theta=1.0, h_sq=0.0)


# --- algebraic properties -------------------------------------------------

def test_inverse_sixth_power_decay():
    h1 = field_magnitude_sq(k=9.0, r=1.5, cos2theta=0.3)
    h2 = field_magnitude_sq(k=9.0, r=3.0, cos2theta=0.3)
    assert h1 / h2 == pytest.approx(64.0, rel=1e-12)


def test_axial_magnitude_is_four_times_equatorial():
    ax = field_magnitude_sq(k=5.0, r=2.5, cos2theta=1.0)
    eq = field_magnitude_sq(k=5.0, r=2.5, cos2theta=0.0)
    assert ax / eq == pytest.approx(4.0, rel=1e-12)


@settings(max_examples=60, deadline=None)
@given(
    k=st.floats(1e-3, 1e9),
    r=st.floats(0.1, 50.0),
    c=st.floats(0.0, 1.0),
)
def test_invert_radius_round_trip(k, r, c):
    h_sq = field_magnitude_sq(k, r, c)
    assert invert_radius(k, c, h_sq) == pytest.approx(r, rel=1e-9)


@settings(max_examples=60, deadline=None)
@given(
    c=st.floats(0.0, 1.0),
    h_lo=st.floats(1e-6, 1e3),
    factor=st.floats(1.0001, 1e4),
)
def test_invert_radius_strictly_decreasing_in_h_sq(c, h_lo, factor):
    r_lo = invert_radius(2.0, c, h_lo)
    r_hi = invert_radius(2.0, c, h_lo * factor)
    assert r_hi < r_lo


def test_vector_and_scalar_magnitudes_agree():
    src = DipoleSource(Vec2(0, 0), Y_AXIS, m_eff=7.5, frequency=20.0)
    for px, py in [(1.0, 2.0), (3.3, 4.7), (-2.0, 0.5), (0.0, 6.0), (5.0, 0.0)]:
        p = Vec2(px, py)
        r = (p - src.position).norm()
        cos2 = (src.axis.dot(p - src.position) / r) ** 2
        vec_sq = dipole_field_at(src, p).norm() ** 2
        assert vec_sq == pytest.approx(
            field_magnitude_sq(src.m_eff**2, r, cos2), rel=1e-12)


# --- validation guards ----------------------------------------------------

@pytest.mark.parametrize("kwargs", [
    dict(k=0.0, r=1.0, cos2theta=0.5),
    dict(k=-1.0, r=1.0, cos2theta=0.5),
    dict(k=1.0, r=0.0, cos2theta=0.5),
    dict(k=1.0, r=-2.0, cos2theta=0.5),
    dict(k=1.0, r=1.0, cos2theta=-0.1),
    dict(k=1.0, r=1.0, cos2theta=1.1),
])
def test_magnitude_rejects_bad_arguments(kwargs):
    with pytest.raises(DomainError):
        field_magnitude_sq(**kwargs)


def test_source_requires_unit_axis_and_positive_moment():
    with pytest.raises(DomainError):
        DipoleSource(Vec2(0, 0), Vec2(0.0, 2.0), m_eff=1.0, frequency=20.0)
    with pytest.raises(DomainError):
        DipoleSource(Vec2(0, 0), Y_AXIS, m_eff=0.0, frequency=20.0)
    with pytest.raises(DomainError):
        DipoleSource(Vec2(0, 0), Y_AXIS, m_eff=1.0, frequency=-20.0)


def test_vectors_reject_non_finite_components():
    with pytest.raises(DomainError):
        Vec2(float("nan"), 0.0)
    with pytest.raises(DomainError):
        Vec3(0.0, float("inf"), 0.0)


def test_vec2_arithmetic():
    a, b = Vec2(1, 2), Vec2(3, -4)
    assert (a + b).as_tuple() == (4.0, -2.0)
    assert (b - a).as_tuple() == (2.0, -6.0)
    assert (2.0 * a).as_tuple() == (2.0, 4.0)
    assert a.dot(b) == -5.0
    assert b.norm() == 5.0
    assert Vec3(3.0, 4.0, 12.0).norm() == 13.0


def test_rig_validates_tone_placement():
    with pytest.raises(DomainError):
        RigConfig(f20=20.0, f30=20.0)
    with pytest.raises(DomainError):
        RigConfig(f30=60.0)  # above Nyquist at fs=100
    with pytest.raises(DomainError):
        RigConfig(buffer_len=25)  # 30 Hz lands between bins
    with pytest.raises(DomainError):
        RigConfig(k20=-1.0, k30=1.0)
    with pytest.raises(DomainError):
        RigConfig(baseline_d=0.0)
    # both default window lengths give exact bins
    assert RigConfig(buffer_len=50).buffer_len == 50
    assert RigConfig(buffer_len=20).buffer_len == 20


def test_rig_anchor_positions_and_calibrated_flag(rig):
    assert rig.anchor20().as_tuple() == (0.0, 0.0)
    assert rig.anchor30().as_tuple() == (10.0, 0.0)
    assert not rig.calibrated
    assert RigConfig(k20=1.0, k30=1.0).calibrated
