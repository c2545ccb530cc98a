"""Numerical Schrodinger evolution used as an oracle for the phase formulas.

The state is propagated with per-step unitaries exp(-i*H(t_mid)*dt)
built from the midpoint Hamiltonian, so the norm is preserved to
roundoff and the only discretization error is the variation of H within
a step (second order in dt).  The geometric phase of a closed drive is
the accumulated total phase minus the dynamical phase

    D = integral <psi| H |psi> dt.

The total phase must be tracked raw, without modular reduction, because
loops can wind several times around the phase circle (a composite
system picks up -(2 m + 1) * pi * (1 - cos(theta0)) per turn).  It is
accumulated against an explicit reference family r(t): per step the
increment

    arg( <r(t+dt)|psi(t+dt)> * conj(<r(t)|psi(t)>) )

is summed.  The increments are small for adiabatic runs (of order
E*dt), so each argument is branch-unambiguous, and they telescope to
the unwrapped phase of <r|psi>.  The family must be single-valued over
the drive (r(T) = r(0)) and stay close to the tracked eigenstate; the
builders below provide such families for precessing fields (the
aligned-spinor gauge regular at the north pole) and for rigidly
rotating composite Hamiltonians (exp(-i*omega*t*(J_z - j0)) v0, which
is single-valued because J_z - j0 has integer spectrum on the tower
containing the tracked state).
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .errors import AdiabaticityBroken, IntegratorFailure, TrackingAmbiguity
from .noise import NoiseRealization, field_from_noise
from .operators import SX, SY, SZ, angular_momentum, tensor

TWO_PI = 2.0 * np.pi

_NORM_DRIFT_LIMIT = 1e-8
_MIN_FINAL_OVERLAP = 0.9
_MIN_TRACKING_QUALITY = 0.5
# Complex entries held per Hamiltonian block (~32 MB), traded for loop speed.
_BATCH_ENTRIES = 1 << 21


@dataclass
class EvolutionConfig:
    """One closed drive of duration 2*pi*n_turns/omega.

    hamiltonian maps a time to a hermitian matrix; it may also accept a
    1-d array of times and return the stacked (n, d, d) matrices, which
    the integrator uses to batch its work.  dt is the integrator step
    (rounded so an integer number of steps tiles each turn).  reference
    is the single-valued family used for raw phase tracking; it is only
    needed by berry_phase_numeric.  adiabaticity, if given, is the
    drive-to-gap frequency ratio; values of 0.1 or more trigger a
    warning since the phase extraction assumes slow driving.
    """

    hamiltonian: Callable
    omega: float
    dt: float
    n_turns: int = 1
    reference: Callable | None = None
    adiabaticity: float | None = None

    def __post_init__(self):
        if self.omega <= 0.0 or self.dt <= 0.0 or self.n_turns < 1:
            raise ValueError("omega, dt must be positive and n_turns >= 1")
        if self.adiabaticity is not None and self.adiabaticity >= 0.1:
            warnings.warn(
                f"adiabaticity ratio {self.adiabaticity} is not small; the "
                "adiabatic phase extraction may be unreliable",
                stacklevel=2,
            )

    @property
    def total_time(self) -> float:
        return TWO_PI * self.n_turns / self.omega


@dataclass
class EvolutionResult:
    final_state: np.ndarray
    dynamical_phase: float
    norm_drift: float
    n_steps: int


@dataclass
class BerryPhaseResult:
    """Geometric phase of one closed adiabatic drive.

    total_phase is the raw accumulated phase of the state (tracked
    against the reference family, so multi-turn windings are kept);
    geometric_phase = total_phase + dynamical_phase.
    """

    geometric_phase: float
    total_phase: float
    dynamical_phase: float
    final_overlap: float
    norm_drift: float
    n_steps: int

    def to_dict(self) -> dict:
        return {
            "geometric_phase": self.geometric_phase,
            "total_phase": self.total_phase,
            "dynamical_phase": self.dynamical_phase,
            "final_overlap": self.final_overlap,
            "norm_drift": self.norm_drift,
            "n_steps": self.n_steps,
        }


def _state_vector(state) -> np.ndarray:
    vec = getattr(state, "amplitudes", state)
    vec = np.asarray(vec, dtype=complex)
    norm = np.linalg.norm(vec)
    if norm == 0.0:
        raise ValueError("state must be nonzero")
    return vec / norm


def _hamiltonian_block(hamiltonian, times: np.ndarray, dim: int) -> np.ndarray:
    try:
        block = np.asarray(hamiltonian(times), dtype=complex)
        if block.shape == (times.size, dim, dim):
            return block
    except Exception:
        pass
    return np.stack(
        [np.asarray(hamiltonian(float(t)), dtype=complex) for t in times]
    )


def _reference_block(reference, times: np.ndarray, dim: int) -> np.ndarray:
    try:
        block = np.asarray(reference(times), dtype=complex)
        if block.shape == (times.size, dim):
            return block
    except Exception:
        pass
    return np.stack(
        [np.asarray(reference(float(t)), dtype=complex) for t in times]
    )


def _step_unitaries(h_block: np.ndarray, dt: float) -> np.ndarray:
    if h_block.shape[-1] == 2:
        diag_sum = h_block[:, 0, 0].real + h_block[:, 1, 1].real
        c0 = 0.5 * diag_sum
        hz = h_block[:, 0, 0].real - 0.5 * diag_sum
        hx = h_block[:, 0, 1].real
        hy = -h_block[:, 0, 1].imag
        r = np.sqrt(hx * hx + hy * hy + hz * hz)
        cos_r = np.cos(r * dt)
        safe = np.where(r > 0.0, r, 1.0)
        sinc = np.where(r > 0.0, np.sin(r * dt) / safe, dt)
        u = np.empty(h_block.shape, dtype=complex)
        u[:, 0, 0] = cos_r - 1j * sinc * hz
        u[:, 0, 1] = -1j * sinc * (hx - 1j * hy)
        u[:, 1, 0] = -1j * sinc * (hx + 1j * hy)
        u[:, 1, 1] = cos_r + 1j * sinc * hz
        return np.exp(-1j * c0 * dt)[:, None, None] * u
    w, v = np.linalg.eigh(h_block)
    phases = np.exp(-1j * w * dt)
    return (v * phases[:, None, :]) @ np.conjugate(np.swapaxes(v, -1, -2))


def _propagate(config: EvolutionConfig, psi0, reference):
    psi = _state_vector(psi0).copy()
    dim = psi.size
    turn_time = TWO_PI / config.omega
    steps_per_turn = max(1, int(round(turn_time / config.dt)))
    n_steps = steps_per_turn * config.n_turns
    dt = turn_time / steps_per_turn
    dynamical = 0.0
    total = 0.0
    min_quality = 1.0
    if reference is not None:
        r0 = _state_vector(reference(0.0))
        c_prev = np.vdot(r0, psi)
        min_quality = abs(c_prev)
    block = max(1, _BATCH_ENTRIES // (dim * dim))
    for start in range(0, n_steps, block):
        stop = min(start + block, n_steps)
        mids = (np.arange(start, stop) + 0.5) * dt
        h_block = _hamiltonian_block(config.hamiltonian, mids, dim)
        u_block = _step_unitaries(h_block, dt)
        if reference is not None:
            ends = np.arange(start + 1, stop + 1) * dt
            r_block = _reference_block(reference, ends, dim)
            r_block = r_block / np.linalg.norm(r_block, axis=1)[:, None]
        for i in range(stop - start):
            h = h_block[i]
            dynamical += np.vdot(psi, h @ psi).real * dt
            psi = u_block[i] @ psi
            if reference is not None:
                c = np.vdot(r_block[i], psi)
                total += float(np.angle(c * np.conj(c_prev)))
                c_prev = c
                quality = abs(c)
                if quality < min_quality:
                    min_quality = quality
    drift = abs(np.linalg.norm(psi) - 1.0)
    if drift > _NORM_DRIFT_LIMIT:
        raise IntegratorFailure(f"norm drift {drift:.2e} exceeds 1e-8")
    return psi, dynamical, total, min_quality, drift, n_steps


def evolve(config: EvolutionConfig, psi0) -> EvolutionResult:
    """Propagate psi0 through one closed drive.

    Raises IntegratorFailure if the norm drifts by more than 1e-8
    (unitary steps should keep it at roundoff level).
    """
    psi, dynamical, _, _, drift, n_steps = _propagate(config, psi0, None)
    return EvolutionResult(
        final_state=psi,
        dynamical_phase=dynamical,
        norm_drift=drift,
        n_steps=n_steps,
    )


def berry_phase_numeric(config: EvolutionConfig, psi0=None) -> BerryPhaseResult:
    """Geometric phase accumulated over the closed drive.

    psi0 defaults to the reference family at t = 0 (which the builders
    make the adiabatically tracked state).  Raises TrackingAmbiguity if
    the state ever loses half its overlap with the reference family,
    and AdiabaticityBroken when the final state has less than 0.9
    overlap with the initial one, since the extraction assumes the loop
    is traversed adiabatically.
    """
    if config.reference is None:
        raise ValueError(
            "berry_phase_numeric needs config.reference, the single-valued "
            "family the raw phase is tracked against"
        )
    psi_init = _state_vector(config.reference(0.0) if psi0 is None else psi0)
    final, dynamical, total, quality, drift, n_steps = _propagate(
        config, psi_init, config.reference
    )
    if quality < _MIN_TRACKING_QUALITY:
        raise TrackingAmbiguity(
            f"state overlap with the reference family fell to {quality:.3f}; "
            "phase tracking is unreliable"
        )
    overlap = abs(np.vdot(psi_init, final))
    if overlap < _MIN_FINAL_OVERLAP:
        raise AdiabaticityBroken(
            f"final overlap {overlap:.3f} with the initial state is below 0.9"
        )
    return BerryPhaseResult(
        geometric_phase=total + dynamical,
        total_phase=total,
        dynamical_phase=dynamical,
        final_overlap=overlap,
        norm_drift=drift,
        n_steps=n_steps,
    )


# ---------------------------------------------------------------------------
# Drive builders for the standard scenarios.  All accept scalar times and
# 1-d time arrays (returning stacked results for the latter).


def precessing_direction(theta0: float, omega: float):
    """n_hat(t) tracing the cone of angle theta0 at frequency omega."""
    st, ct = np.sin(theta0), np.cos(theta0)

    def n_hat(t):
        t = np.asarray(t, dtype=float)
        return np.stack(
            [
                st * np.cos(omega * t),
                st * np.sin(omega * t),
                ct + np.zeros_like(t),
            ],
            axis=-1,
        )

    return n_hat


def aligned_spin_state(theta0: float, phi: float = 0.0) -> np.ndarray:
    """Spin-1/2 state pointing along (theta0, phi)."""
    return np.array(
        [np.cos(theta0 / 2), np.sin(theta0 / 2) * np.exp(1j * phi)], dtype=complex
    )


def _field_hamiltonian(b: np.ndarray, scale: float) -> np.ndarray:
    """scale * (b . sigma) for b of shape (..., 3)."""
    h = np.empty(b.shape[:-1] + (2, 2), dtype=complex)
    h[..., 0, 0] = scale * b[..., 2]
    h[..., 0, 1] = scale * (b[..., 0] - 1j * b[..., 1])
    h[..., 1, 0] = scale * (b[..., 0] + 1j * b[..., 1])
    h[..., 1, 1] = -scale * b[..., 2]
    return h


def spin_direction_reference(direction):
    """Aligned-spinor family (cos(t/2), e^{i phi} sin(t/2)) of a field path.

    direction maps t to a (..., 3) field vector (not necessarily
    normalized).  The returned family is smooth and single-valued as
    long as the field stays off the -z axis, because the azimuth enters
    only through e^{i phi} computed directly from the transverse
    components.
    """

    def reference(t):
        b = np.asarray(direction(t), dtype=float)
        norm = np.linalg.norm(b, axis=-1)
        cos_theta = b[..., 2] / norm
        perp = np.hypot(b[..., 0], b[..., 1])
        safe = np.where(perp > 0.0, perp, 1.0)
        azimuth_phase = np.where(
            perp > 0.0, (b[..., 0] + 1j * b[..., 1]) / safe, 1.0
        )
        out = np.empty(b.shape[:-1] + (2,), dtype=complex)
        out[..., 0] = np.sqrt(0.5 * (1.0 + cos_theta))
        out[..., 1] = azimuth_phase * np.sqrt(0.5 * (1.0 - cos_theta))
        return out

    return reference


def precessing_spin_path(theta0: float, omega: float, omega_larmor: float):
    """H(t) = (omega_larmor/2) * n_hat(t) . sigma for a bare spin 1/2."""
    n_hat = precessing_direction(theta0, omega)

    def path(t):
        return _field_hamiltonian(n_hat(t), 0.5 * omega_larmor)

    return path


def precessing_spin_reference(theta0: float, omega: float):
    return spin_direction_reference(precessing_direction(theta0, omega))


def noisy_spin_path(
    theta0: float,
    epsilon: float,
    realization: NoiseRealization,
    omega: float,
    omega_larmor: float,
):
    """Spin 1/2 in the noisy precessing field, azimuth advancing as omega*t."""

    def path(t):
        t = np.asarray(t, dtype=float)
        b = field_from_noise(theta0, epsilon, realization, omega * np.atleast_1d(t))
        if t.ndim == 0:
            return _field_hamiltonian(b[0], 0.5 * omega_larmor)
        return _field_hamiltonian(b, 0.5 * omega_larmor)

    return path


def noisy_spin_reference(
    theta0: float, epsilon: float, realization: NoiseRealization, omega: float
):
    def direction(t):
        t = np.asarray(t, dtype=float)
        b = field_from_noise(theta0, epsilon, realization, omega * np.atleast_1d(t))
        return b[0] if t.ndim == 0 else b

    return spin_direction_reference(direction)


def rotating_reference(v0, jz_diagonal, j0: float, omega: float):
    """Single-valued family exp(-i*omega*t*(J_z - j0)) v0 for rigid drives.

    v0 must be an eigenvector of n_hat(0) . J with eigenvalue j0; the
    family then follows the eigenstate of the rigidly rotated
    Hamiltonian exactly, and is single-valued over a turn because the
    spectrum of J_z - j0 on the relevant tower is integer.
    """
    v0 = _state_vector(v0)
    jz = np.asarray(jz_diagonal, dtype=float)
    if jz.shape != v0.shape:
        raise ValueError("jz_diagonal must match the state dimension")

    def reference(t):
        t = np.asarray(t, dtype=float)
        phases = np.exp(1j * omega * np.multiply.outer(t, j0 - jz))
        return phases * v0

    return reference


def two_spin_path(theta0: float, omega: float, b0: float, lam: float):
    """H(t) = b0 * n_hat(t) . s1 + lam * s1 . s2 on two spins 1/2."""
    n_hat = precessing_direction(theta0, omega)
    eye2 = np.eye(2, dtype=complex)
    s1 = np.stack([0.5 * tensor(s, eye2) for s in (SX, SY, SZ)])
    s2 = [0.5 * tensor(eye2, s) for s in (SX, SY, SZ)]
    coupling = lam * sum(a @ b for a, b in zip(s1, s2))

    def path(t):
        return b0 * np.tensordot(n_hat(t), s1, axes=(-1, 0)) + coupling

    return path


def two_spin_reference(theta0: float, omega: float):
    """Aligned product family for the two-spin drive (total j0 = 1)."""
    v0 = np.kron(aligned_spin_state(theta0), aligned_spin_state(theta0))
    return rotating_reference(v0, [1.0, 0.0, 0.0, -1.0], 1.0, omega)


def composite_jz_diagonal(l) -> np.ndarray:
    """Diagonal of L_z + sigma_z/2 on kron(particle, spin) for given l."""
    m_particle = l - np.arange(int(round(2 * l)) + 1)
    return np.add.outer(m_particle, np.array([0.5, -0.5])).ravel()


def angular_momentum_path(l, theta0: float, omega: float, b0: float, lam: float):
    """H(t) = b0 * n_hat(t) . L (x) 1 + (lam/2) sum_i L_i (x) sigma_i.

    The coupling term is a rotational scalar and needs no time
    dependence; only the Zeeman-like term follows the precessing axis.
    """
    l_ops = angular_momentum(l)
    n_hat = precessing_direction(theta0, omega)
    eye2 = np.eye(2, dtype=complex)
    zeeman = np.stack([tensor(op, eye2) for op in l_ops])
    coupling = 0.5 * lam * sum(
        tensor(op, s) for op, s in zip(l_ops, (SX, SY, SZ))
    )

    def path(t):
        return b0 * np.tensordot(n_hat(t), zeeman, axes=(-1, 0)) + coupling

    return path
