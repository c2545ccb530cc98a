"""Stochastic transverse-noise realizations for a precessing field.

A realization is a triple of dimensionless functions b_i(phi) giving the
noise components in the frame adapted to the field direction at azimuth
phi (index 1 along e1, 2 along e2, 3 along e3).  Each component is a
zero-mean Gaussian Fourier series with no DC term; coefficient variances
are scaled so that the pointwise variance of each component equals
sigma**2 at every phi (the ensemble is stationary in phi).

Two modes:

* ``isotropic3``: three independent component series.
* ``z_only``: a single cartesian series b_z(phi) along the lab z axis,
  projected onto the adapted frame at evaluation time:
  b_1 = -sin(theta0) b_z,  b_2 = 0,  b_3 = cos(theta0) b_z.
  These are algebraic identities of the projection and hold exactly for
  every realization.

Periodic realizations use integer harmonics (fundamental 1/n_turns when
the pattern repeats only after n_turns revolutions).  Aperiodic ones add
a term at the incommensurate frequency sqrt(2), so the pattern does not
close after a full turn.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

import numpy as np

from .frames import frame_vectors

# Frequency of the extra harmonic used by aperiodic realizations.  Any
# irrational value works; sqrt(2) keeps b(0) != b(2*pi) almost surely.
INCOMMENSURATE_FREQUENCY = np.sqrt(2.0)

_MODES = ("isotropic3", "z_only")


@dataclass(frozen=True)
class NoiseStatistics:
    """Ensemble parameters for sampling noise realizations.

    sigma is the pointwise standard deviation of each component, k_max
    the highest integer harmonic (in the azimuth), and seed a 64-bit
    integer seeding the draw.  n_turns > 1 makes the fundamental
    frequency 1/n_turns so the realization closes only after n_turns
    revolutions (periodic mode only).
    """

    sigma: float
    k_max: int
    mode: str = "isotropic3"
    periodic: bool = True
    seed: int = 0
    n_turns: int = 1

    def __post_init__(self):
        if self.sigma < 0.0:
            raise ValueError("sigma must be nonnegative")
        if self.k_max < 1:
            raise ValueError("k_max must be at least 1")
        if self.mode not in _MODES:
            raise ValueError(f"mode must be one of {_MODES}")
        if self.n_turns < 1:
            raise ValueError("n_turns must be a positive integer")
        if not self.periodic and self.n_turns != 1:
            raise ValueError("aperiodic realizations are single-turn")


@dataclass
class NoiseRealization:
    """One sampled noise pattern, evaluable at any azimuth.

    coefficients have shape (n_components, n_frequencies): one row for
    z_only (the cartesian z series), three rows for isotropic3 (the
    adapted-frame components directly).
    """

    frequencies: np.ndarray
    cos_coeffs: np.ndarray
    sin_coeffs: np.ndarray
    mode: str
    periodic: bool = True
    n_turns: int = 1

    def _series(self, phi, derivative=False):
        phi = np.atleast_1d(np.asarray(phi, dtype=float))
        arg = np.multiply.outer(self.frequencies, phi)
        c, s = np.cos(arg), np.sin(arg)
        if derivative:
            return (self.sin_coeffs * self.frequencies) @ c - (
                self.cos_coeffs * self.frequencies
            ) @ s
        return self.cos_coeffs @ c + self.sin_coeffs @ s

    def components(self, phi, theta0: float | None = None) -> np.ndarray:
        """Adapted-frame components b_i(phi), shape (3, len(phi))."""
        vals = self._series(phi)
        if self.mode == "isotropic3":
            return vals
        if theta0 is None:
            raise ValueError("z_only evaluation requires theta0")
        bz = vals[0]
        return np.stack(
            [-np.sin(theta0) * bz, np.zeros_like(bz), np.cos(theta0) * bz]
        )

    def components_derivative(self, phi, theta0: float | None = None) -> np.ndarray:
        """d b_i / d phi, same shape conventions as components()."""
        vals = self._series(phi, derivative=True)
        if self.mode == "isotropic3":
            return vals
        if theta0 is None:
            raise ValueError("z_only evaluation requires theta0")
        bz = vals[0]
        return np.stack(
            [-np.sin(theta0) * bz, np.zeros_like(bz), np.cos(theta0) * bz]
        )

    def z_series(self, phi) -> np.ndarray:
        """Cartesian b_z(phi) for z_only realizations."""
        if self.mode != "z_only":
            raise ValueError("z_series is only defined for z_only realizations")
        return self._series(phi)[0]

    def to_dict(self) -> dict:
        return {
            "frequencies": self.frequencies.tolist(),
            "cos_coeffs": self.cos_coeffs.tolist(),
            "sin_coeffs": self.sin_coeffs.tolist(),
            "mode": self.mode,
            "periodic": self.periodic,
            "n_turns": self.n_turns,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True)

    @staticmethod
    def from_dict(data: dict) -> "NoiseRealization":
        return NoiseRealization(
            frequencies=np.asarray(data["frequencies"], dtype=float),
            cos_coeffs=np.asarray(data["cos_coeffs"], dtype=float),
            sin_coeffs=np.asarray(data["sin_coeffs"], dtype=float),
            mode=data["mode"],
            periodic=data["periodic"],
            n_turns=data["n_turns"],
        )

    @staticmethod
    def from_json(text: str) -> "NoiseRealization":
        return NoiseRealization.from_dict(json.loads(text))


def sample_noise(stats: NoiseStatistics) -> NoiseRealization:
    """Draw one realization from the given ensemble.

    Every Fourier coefficient is an independent Gaussian with variance
    sigma**2 / n_frequencies, which makes the pointwise variance of each
    component exactly sigma**2 (cos**2 + sin**2 sums to one per term).
    """
    if stats.periodic:
        n_harm = stats.k_max * stats.n_turns
        freqs = np.arange(1, n_harm + 1, dtype=float) / stats.n_turns
    else:
        freqs = np.append(
            np.arange(1, stats.k_max + 1, dtype=float), INCOMMENSURATE_FREQUENCY
        )
    n_comp = 3 if stats.mode == "isotropic3" else 1
    rng = np.random.default_rng(stats.seed)
    scale = stats.sigma / np.sqrt(freqs.size)
    cos_coeffs = rng.normal(0.0, scale, size=(n_comp, freqs.size))
    sin_coeffs = rng.normal(0.0, scale, size=(n_comp, freqs.size))
    return NoiseRealization(
        frequencies=freqs,
        cos_coeffs=cos_coeffs,
        sin_coeffs=sin_coeffs,
        mode=stats.mode,
        periodic=stats.periodic,
        n_turns=stats.n_turns,
    )


def field_from_noise(
    theta0: float, epsilon: float, realization: NoiseRealization, phi_grid
) -> np.ndarray:
    """Cartesian field samples tracing the noisy precession curve.

    The grid parametrizes the azimuth of the *total* field.  The noise
    components are defined in the frame adapted to that azimuth, so the
    unperturbed direction is attached at the first-order-compensated
    azimuth u = phi - epsilon * b_2(phi) / sin(theta0); the transverse
    e2 component is what advances the azimuth, and without the
    compensation the constructed field would land at azimuth
    phi + epsilon * b_2 / sin(theta0) instead of phi.  With it, the
    components read off the field in the frame of its own azimuth agree
    with the stored b_i(phi) through second order in epsilon.
    """
    phi_grid = np.atleast_1d(np.asarray(phi_grid, dtype=float))
    theta0 = float(theta0)
    b = realization.components(phi_grid, theta0)
    u = phi_grid - epsilon * b[1] / np.sin(theta0)
    e1, e2, e3 = frame_vectors(theta0, u)
    return (
        e3
        + epsilon * b[0][:, None] * e1
        + epsilon * b[1][:, None] * e2
        + epsilon * b[2][:, None] * e3
    )
