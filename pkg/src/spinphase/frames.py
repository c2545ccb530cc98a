"""Directions, adapted frames, and curves on the unit sphere.

A direction is a point (theta, phi) on the unit sphere, theta measured
from the +z axis.  Away from the poles every direction carries an
orthonormal frame (e1, e2, e3) adapted to it: e3 is the direction
itself, e2 is the azimuthal unit vector, and e1 = e2 x e3 completes a
right-handed triad.  Closed (or almost closed) curves of directions are
what the geometric phase is computed from: for a spin 1/2 following the
curve, the phase of the aligned state is minus half the enclosed solid
angle,

    phase = -1/2 * integral (1 - cos(theta)) dphi,

taken over the curve parametrized by its own azimuth.  Open curves are
closed along the meridian of constant phi, which adds nothing to the
integral above.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import (
    DegenerateField,
    InsufficientResolution,
    ParametrizationError,
    PoleSingularity,
)

TWO_PI = 2.0 * np.pi

# Largest nearest-branch azimuth step accepted between consecutive
# samples.  Steps close to pi cannot be distinguished from steps going
# the other way around, so they are rejected as under-sampling.
_MAX_PHI_STEP = 0.95 * np.pi

_ENDPOINT_ATOL = 1e-6


@dataclass(frozen=True)
class Direction:
    """A point on the unit sphere, theta in [0, pi], phi unrestricted."""

    theta: float
    phi: float

    @property
    def cartesian(self) -> np.ndarray:
        st = np.sin(self.theta)
        return np.array(
            [st * np.cos(self.phi), st * np.sin(self.phi), np.cos(self.theta)]
        )

    @staticmethod
    def from_cartesian(v) -> "Direction":
        v = np.asarray(v, dtype=float)
        r = np.linalg.norm(v)
        if r == 0.0:
            raise DegenerateField("zero vector has no direction")
        return Direction(float(np.arccos(np.clip(v[2] / r, -1.0, 1.0))),
                         float(np.arctan2(v[1], v[0])))


@dataclass(frozen=True)
class AdaptedFrame:
    """Right-handed orthonormal triad attached to a direction.

    e3 points along the direction, e2 along increasing azimuth, and
    e1 = e2 x e3 points "downhill" toward increasing theta component.
    """

    e1: np.ndarray
    e2: np.ndarray
    e3: np.ndarray


def adapted_frame(theta0: float, phi: float) -> AdaptedFrame:
    """Frame adapted to the direction (theta0, phi).

    Undefined at the poles, where the azimuth loses meaning.
    """
    if not 0.0 < theta0 < np.pi:
        raise PoleSingularity(f"adapted frame undefined at theta0={theta0!r}")
    ct, st = np.cos(theta0), np.sin(theta0)
    cp, sp = np.cos(phi), np.sin(phi)
    e1 = np.array([ct * cp, ct * sp, -st])
    e2 = np.array([-sp, cp, 0.0])
    e3 = np.array([st * cp, st * sp, ct])
    return AdaptedFrame(e1, e2, e3)


def frame_vectors(theta0: float, phi: np.ndarray):
    """Vectorized adapted frame: three arrays of shape (n, 3)."""
    if not 0.0 < theta0 < np.pi:
        raise PoleSingularity(f"adapted frame undefined at theta0={theta0!r}")
    phi = np.asarray(phi, dtype=float)
    ct, st = np.cos(theta0), np.sin(theta0)
    cp, sp = np.cos(phi), np.sin(phi)
    zeros = np.zeros_like(phi)
    e1 = np.stack([ct * cp, ct * sp, -st + zeros], axis=-1)
    e2 = np.stack([-sp, cp, zeros], axis=-1)
    e3 = np.stack([st * cp, st * sp, ct + zeros], axis=-1)
    return e1, e2, e3


@dataclass
class SphericalCurve:
    """Curve on the unit sphere sampled as (phi_k, theta_k) pairs.

    phi must be strictly increasing (the curve is parametrized by its
    own azimuth).  For periodic curves the closing sample is included:
    phi spans 2*pi*n_turns and theta matches at both ends.
    """

    phi: np.ndarray
    theta: np.ndarray
    periodic: bool = True
    n_turns: int = field(default=1)

    def __post_init__(self):
        self.phi = np.asarray(self.phi, dtype=float)
        self.theta = np.asarray(self.theta, dtype=float)
        if self.phi.shape != self.theta.shape or self.phi.ndim != 1:
            raise ValueError("phi and theta must be 1-d arrays of equal length")
        if self.phi.size < 2:
            raise InsufficientResolution("need at least two samples")
        dphi = np.diff(self.phi)
        if np.any(dphi <= 0.0):
            raise ParametrizationError("phi must be strictly increasing")
        if np.any(self.theta <= 0.0) or np.any(self.theta >= np.pi):
            raise PoleSingularity("curve touches a pole; rejected")
        if self.n_turns < 1:
            raise ValueError("n_turns must be a positive integer")
        if self.periodic:
            span = self.phi[-1] - self.phi[0]
            if abs(span - TWO_PI * self.n_turns) > _ENDPOINT_ATOL:
                raise ParametrizationError(
                    "periodic curve must span 2*pi*n_turns including the "
                    f"closing sample (span={span!r})"
                )
            if abs(self.theta[0] - self.theta[-1]) > _ENDPOINT_ATOL:
                raise ParametrizationError(
                    "periodic curve must have matching theta at both ends"
                )

    @property
    def span(self) -> float:
        return float(self.phi[-1] - self.phi[0])


def curve_from_field(samples, timestamps=None) -> SphericalCurve:
    """Extract the direction curve traced by a 3-vector field.

    samples is an (n, 3) array of field vectors ordered in time
    (timestamps, if given, only fix that order).  The field is
    normalized, azimuth is unwrapped by nearest-branch continuation,
    and the result is reparametrized by the field's own azimuth.
    Closure is detected from the endpoint directions.
    """
    b = np.asarray(samples, dtype=float)
    if b.ndim != 2 or b.shape[1] != 3:
        raise ValueError("samples must have shape (n, 3)")
    if b.shape[0] < 2:
        raise InsufficientResolution("need at least two field samples")
    if timestamps is not None:
        t = np.asarray(timestamps, dtype=float)
        if t.shape != (b.shape[0],):
            raise ValueError("timestamps must match the number of samples")
        if np.any(np.diff(t) == 0.0):
            raise ParametrizationError("timestamps must be distinct")
        order = np.argsort(t, kind="stable")
        b = b[order]

    norms = np.linalg.norm(b, axis=1)
    if np.any(norms < 1e-14):
        raise DegenerateField("field sample with zero magnitude")
    unit = b / norms[:, None]

    theta = np.arccos(np.clip(unit[:, 2], -1.0, 1.0))
    phi_raw = np.arctan2(unit[:, 1], unit[:, 0])
    dphi = np.diff(phi_raw)
    dphi = (dphi + np.pi) % TWO_PI - np.pi  # nearest branch
    if np.any(np.abs(dphi) >= _MAX_PHI_STEP):
        raise ParametrizationError(
            "azimuth step of nearly pi between samples; sampling too coarse"
        )
    if np.any(dphi <= 0.0):
        raise ParametrizationError("field azimuth is not strictly increasing")
    phi = phi_raw[0] + np.concatenate(([0.0], np.cumsum(dphi)))

    span = phi[-1] - phi[0]
    closed = (
        np.linalg.norm(unit[-1] - unit[0]) < 1e-9
        and abs(span / TWO_PI - round(span / TWO_PI)) < 1e-9 / TWO_PI
    )
    n_turns = max(1, int(round(span / TWO_PI)))
    return SphericalCurve(phi=phi, theta=theta, periodic=closed, n_turns=n_turns)


def solid_angle_phase(curve: SphericalCurve) -> float:
    """Geometric phase -1/2 * integral (1 - cos(theta)) dphi over the curve.

    Trapezoidal quadrature on the curve's own phi grid.  The result is
    reported raw (not reduced mod 2*pi), so an n-turn curve accumulates
    n times the single-turn phase.  Open curves are closed along the
    meridian of constant phi, which contributes nothing to the integral.
    """
    if curve.phi.size < 8:
        raise InsufficientResolution(
            "at least 8 samples are required for the phase quadrature"
        )
    integrand = 1.0 - np.cos(curve.theta)
    return float(-0.5 * np.trapezoid(integrand, curve.phi))
