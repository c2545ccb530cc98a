"""Tests for directions, adapted frames, spherical curves, and solid angles."""

import math

import numpy as np
import numpy.testing as npt
import pytest

from spinphase.errors import (
    DegenerateField,
    InsufficientResolution,
    ParametrizationError,
    PoleSingularity,
)
from spinphase.frames import (
    Direction,
    SphericalCurve,
    adapted_frame,
    curve_from_field,
    frame_vectors,
    solid_angle_phase,
)

TWO_PI = 2.0 * np.pi


def bessel_j0(x: float) -> float:
    """Series evaluation of J0, accurate to machine precision for |x| < 1."""
    total = 0.0
    for k in range(12):
        total += (-1.0) ** k * (0.5 * x) ** (2 * k) / math.factorial(k) ** 2
    return total


# ---------------------------------------------------------------------------
# Direction


def test_direction_from_cartesian_round_trip():
    d = Direction.from_cartesian(np.array([1.0, -2.0, 0.5]))
    npt.assert_allclose(np.linalg.norm(d.cartesian), 1.0, atol=1e-15)
    npt.assert_allclose(
        d.cartesian, np.array([1.0, -2.0, 0.5]) / np.sqrt(5.25), atol=1e-15
    )


def test_direction_angles_match_unit_vector():
    theta, phi = 1.1, 2.3
    d = Direction(theta=theta, phi=phi)
    expected = np.array(
        [
            np.sin(theta) * np.cos(phi),
            np.sin(theta) * np.sin(phi),
            np.cos(theta),
        ]
    )
    npt.assert_allclose(d.cartesian, expected, atol=1e-15)


def test_direction_rejects_zero_vector():
    with pytest.raises(DegenerateField):
        Direction.from_cartesian(np.zeros(3))


# ---------------------------------------------------------------------------
# Adapted frame


def test_adapted_frame_explicit_components():
    theta, phi = np.pi / 3, np.pi / 4
    frame = adapted_frame(theta, phi)
    ct, st = np.cos(theta), np.sin(theta)
    cp, sp = np.cos(phi), np.sin(phi)
    npt.assert_allclose(frame.e1, [ct * cp, ct * sp, -st], atol=1e-15)
    npt.assert_allclose(frame.e2, [-sp, cp, 0.0], atol=1e-15)
    npt.assert_allclose(frame.e3, [st * cp, st * sp, ct], atol=1e-15)


@pytest.mark.parametrize("theta", [0.2, np.pi / 4, 1.9, 2.9])
@pytest.mark.parametrize("phi", [0.0, 1.0, 4.5])
def test_adapted_frame_is_orthonormal_right_handed(theta, phi):
    frame = adapted_frame(theta, phi)
    basis = np.stack([frame.e1, frame.e2, frame.e3])
    npt.assert_allclose(basis @ basis.T, np.eye(3), atol=1e-14)
    npt.assert_allclose(np.cross(frame.e1, frame.e2), frame.e3, atol=1e-14)


def test_adapted_frame_third_axis_is_direction():
    theta, phi = 0.7, 5.1
    frame = adapted_frame(theta, phi)
    npt.assert_allclose(
        frame.e3, Direction(theta=theta, phi=phi).cartesian, atol=1e-15
    )


@pytest.mark.parametrize("theta", [0.0, np.pi])
def test_adapted_frame_rejects_poles(theta):
    with pytest.raises(PoleSingularity):
        adapted_frame(theta, 0.3)


def test_frame_vectors_matches_adapted_frame():
    theta0 = 0.8
    phi = np.linspace(0.0, 2.0, 5)
    e1, e2, e3 = frame_vectors(theta0, phi)
    assert e1.shape == e2.shape == e3.shape == (5, 3)
    for i in range(5):
        frame = adapted_frame(theta0, phi[i])
        npt.assert_allclose(e1[i], frame.e1, atol=1e-15)
        npt.assert_allclose(e2[i], frame.e2, atol=1e-15)
        npt.assert_allclose(e3[i], frame.e3, atol=1e-15)


def test_frame_vectors_rejects_poles():
    with pytest.raises(PoleSingularity):
        frame_vectors(np.pi, np.linspace(0.0, 1.0, 4))


# ---------------------------------------------------------------------------
# SphericalCurve validation


def _circle(theta0=np.pi / 4, n=257, n_turns=1):
    phi = np.linspace(0.0, TWO_PI * n_turns, n)
    theta = np.full_like(phi, theta0)
    return phi, theta


def test_curve_accepts_closed_circle():
    phi, theta = _circle()
    curve = SphericalCurve(phi=phi, theta=theta)
    assert curve.periodic
    assert curve.n_turns == 1


def test_curve_requires_two_samples():
    with pytest.raises(InsufficientResolution):
        SphericalCurve(phi=np.array([0.0]), theta=np.array([1.0]))


def test_curve_requires_increasing_phi():
    phi, theta = _circle()
    phi[5] = phi[4]
    with pytest.raises(ParametrizationError):
        SphericalCurve(phi=phi, theta=theta)


def test_curve_rejects_polar_theta():
    phi, theta = _circle()
    theta[3] = 0.0
    with pytest.raises(PoleSingularity):
        SphericalCurve(phi=phi, theta=theta)


def test_periodic_curve_needs_full_span():
    phi = np.linspace(0.0, 0.9 * TWO_PI, 100)
    theta = np.full_like(phi, 1.0)
    with pytest.raises(ParametrizationError):
        SphericalCurve(phi=phi, theta=theta)


def test_periodic_curve_needs_matching_endpoints():
    phi, theta = _circle()
    theta = theta + np.linspace(0.0, 0.1, phi.size)
    with pytest.raises(ParametrizationError):
        SphericalCurve(phi=phi, theta=theta)


def test_aperiodic_curve_may_stay_open():
    phi = np.linspace(0.0, 4.0, 50)
    theta = 1.0 + 0.1 * np.sin(phi)
    curve = SphericalCurve(phi=phi, theta=theta, periodic=False)
    assert not curve.periodic


def test_multi_turn_curve_span_checked():
    phi, theta = _circle(n_turns=2, n=513)
    curve = SphericalCurve(phi=phi, theta=theta, n_turns=2)
    assert curve.n_turns == 2
    with pytest.raises(ParametrizationError):
        SphericalCurve(phi=phi, theta=theta, n_turns=3)


# ---------------------------------------------------------------------------
# Solid-angle phase


@pytest.mark.parametrize("theta0", [np.pi / 6, np.pi / 4, np.pi / 3, np.pi / 2])
def test_circular_cone_solid_angle(theta0):
    phi, theta = _circle(theta0=theta0, n=1025)
    phase = solid_angle_phase(SphericalCurve(phi=phi, theta=theta))
    npt.assert_allclose(phase, -np.pi * (1.0 - np.cos(theta0)), atol=1e-12)


def test_oscillating_cone_matches_bessel_average():
    # theta(phi) = theta0 + a*sin(phi): the phi-average of cos(theta) is
    # cos(theta0)*J0(a), so the loop phase is -pi*(1 - cos(theta0)*J0(a)).
    theta0, a = np.pi / 4, 0.3
    phi = np.linspace(0.0, TWO_PI, 4097)
    theta = theta0 + a * np.sin(phi)
    phase = solid_angle_phase(SphericalCurve(phi=phi, theta=theta))
    expected = -np.pi * (1.0 - np.cos(theta0) * bessel_j0(a))
    npt.assert_allclose(expected, -0.969853168269393, atol=1e-12)
    npt.assert_allclose(phase, expected, atol=1e-12)


def test_two_turn_curve_doubles_phase():
    theta0 = 2.0 * np.pi / 3.0  # one turn already gives -1.5*pi
    phi1, theta1 = _circle(theta0=theta0, n=513)
    phi2, theta2 = _circle(theta0=theta0, n=1025, n_turns=2)
    one = solid_angle_phase(SphericalCurve(phi=phi1, theta=theta1))
    two = solid_angle_phase(SphericalCurve(phi=phi2, theta=theta2, n_turns=2))
    npt.assert_allclose(one, -1.5 * np.pi, atol=1e-12)
    npt.assert_allclose(two, 2.0 * one, atol=1e-12)
    assert two < -TWO_PI  # raw winding phase, not reduced mod 2*pi


def test_solid_angle_needs_enough_samples():
    phi = np.linspace(0.0, TWO_PI, 7)
    theta = np.full_like(phi, 1.0)
    with pytest.raises(InsufficientResolution):
        solid_angle_phase(SphericalCurve(phi=phi, theta=theta))


# ---------------------------------------------------------------------------
# curve_from_field


def _field_samples(theta0=0.8, n=513, scale=2.0):
    phi = np.linspace(0.0, TWO_PI, n)
    st, ct = np.sin(theta0), np.cos(theta0)
    return scale * np.stack(
        [st * np.cos(phi), st * np.sin(phi), np.full_like(phi, ct)], axis=1
    ), phi


def test_curve_from_field_recovers_angles():
    samples, phi = _field_samples()
    curve = curve_from_field(samples)
    npt.assert_allclose(curve.theta, np.full_like(phi, 0.8), atol=1e-12)
    npt.assert_allclose(curve.phi, phi, atol=1e-12)
    npt.assert_allclose(
        solid_angle_phase(curve), -np.pi * (1.0 - np.cos(0.8)), atol=1e-10
    )


def test_curve_from_field_unwraps_many_turns():
    phi = np.linspace(0.0, 3.0 * TWO_PI, 1537)
    samples = np.stack(
        [np.cos(phi), np.sin(phi), np.ones_like(phi)], axis=1
    ) / np.sqrt(2.0)
    curve = curve_from_field(samples)
    assert curve.n_turns == 3
    assert curve.periodic
    assert curve.phi[-1] - curve.phi[0] == pytest.approx(3.0 * TWO_PI, abs=1e-9)


def test_curve_from_field_orders_by_timestamps():
    samples, phi = _field_samples()
    timestamps = np.linspace(0.0, 1.0, phi.size)
    reversed_curve = curve_from_field(
        samples[::-1], timestamps=timestamps[::-1]
    )
    npt.assert_allclose(reversed_curve.phi, phi, atol=1e-12)


def test_curve_from_field_rejects_duplicate_timestamps():
    samples, phi = _field_samples()
    timestamps = np.zeros(phi.size)
    with pytest.raises(ParametrizationError):
        curve_from_field(samples, timestamps=timestamps)


def test_curve_from_field_rejects_zero_sample():
    samples, _ = _field_samples()
    samples[10] = 0.0
    with pytest.raises(DegenerateField):
        curve_from_field(samples)


def test_curve_from_field_rejects_giant_azimuth_step():
    phi = np.array([0.0, 0.96 * np.pi, TWO_PI])
    samples = np.stack(
        [np.cos(phi), np.sin(phi), np.ones_like(phi)], axis=1
    )
    with pytest.raises(ParametrizationError):
        curve_from_field(samples)


def test_curve_from_field_flags_open_loop_as_aperiodic():
    samples, phi = _field_samples()
    open_curve = curve_from_field(samples[:-40])
    assert not open_curve.periodic
    closed_curve = curve_from_field(samples)
    assert closed_curve.periodic


def test_curve_from_field_wrong_shape():
    with pytest.raises(ValueError):
        curve_from_field(np.zeros((5, 2)))
