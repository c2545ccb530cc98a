"""Finite-dimensional operator toolkit: spins, oscillators, rotations.

Conventions: hbar = 1 throughout; angular momentum matrices use the
basis ordered m = l, l-1, ..., -l; composite states live on
kron(particle, spin) with the spin factor last.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import reduce

import numpy as np

from .errors import DegenerateDrivingField
from .frames import Direction

SX = np.array([[0.0, 1.0], [1.0, 0.0]], dtype=complex)
SY = np.array([[0.0, -1.0j], [1.0j, 0.0]], dtype=complex)
SZ = np.array([[1.0, 0.0], [0.0, -1.0]], dtype=complex)
ID2 = np.eye(2, dtype=complex)

_EPSILON_IJK = np.zeros((3, 3, 3))
for _i, _j, _k in ((0, 1, 2), (1, 2, 0), (2, 0, 1)):
    _EPSILON_IJK[_i, _j, _k] = 1.0
    _EPSILON_IJK[_i, _k, _j] = -1.0


def pauli():
    """The Pauli matrices (sigma_x, sigma_y, sigma_z)."""
    return SX, SY, SZ


def tensor(*ops) -> np.ndarray:
    return reduce(np.kron, ops)


def commutator(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    return a @ b - b @ a


def expectation(op: np.ndarray, state: np.ndarray) -> complex:
    return complex(np.vdot(state, op @ state))


def is_hermitian(op: np.ndarray, tol: float = 1e-12) -> bool:
    return bool(np.allclose(op, op.conj().T, atol=tol, rtol=0.0))


def angular_momentum(l):
    """Angular momentum matrices (Lx, Ly, Lz) for integer or half-integer l."""
    two_l = int(round(2 * l))
    if two_l < 0 or abs(2 * l - two_l) > 1e-12:
        raise ValueError("l must be a nonnegative integer or half-integer")
    dim = two_l + 1
    m = l - np.arange(dim)
    lp = np.zeros((dim, dim), dtype=complex)
    for i in range(1, dim):
        lp[i - 1, i] = np.sqrt(l * (l + 1) - m[i] * (m[i] + 1))
    lx = 0.5 * (lp + lp.conj().T)
    ly = -0.5j * (lp - lp.conj().T)
    lz = np.diag(m.astype(complex))
    return lx, ly, lz


def angular_basis_state(l, m) -> np.ndarray:
    """The |l, m> basis vector in the m-descending ordering."""
    dim = int(round(2 * l)) + 1
    index = int(round(l - m))
    if not 0 <= index < dim:
        raise ValueError(f"m={m} out of range for l={l}")
    state = np.zeros(dim, dtype=complex)
    state[index] = 1.0
    return state


def annihilation(n_max: int) -> np.ndarray:
    """Single-mode annihilation operator truncated at occupation n_max."""
    if n_max < 1:
        raise ValueError("n_max must be at least 1")
    return np.diag(np.sqrt(np.arange(1, n_max + 1, dtype=float)), 1).astype(complex)


def sho_quadratures(n_max: int):
    """Position quadratures of a 3-mode oscillator, plus its ground state.

    Each component is b = a + a_dagger of its own mode, so the
    ground-state variance of every component is exactly 1 and the three
    components commute.  Ground-state moments of b and b**2 are exact
    for any cutoff n_max >= 2.
    """
    a = annihilation(n_max)
    b = a + a.conj().T
    eye = np.eye(n_max + 1, dtype=complex)
    b1 = tensor(b, eye, eye)
    b2 = tensor(eye, b, eye)
    b3 = tensor(eye, eye, b)
    ground = np.zeros((n_max + 1) ** 3, dtype=complex)
    ground[0] = 1.0
    return (b1, b2, b3), ground


def sho_number_operator(n_max: int) -> np.ndarray:
    """Total occupation number of the 3-mode oscillator."""
    a = annihilation(n_max)
    n = a.conj().T @ a
    eye = np.eye(n_max + 1, dtype=complex)
    return tensor(n, eye, eye) + tensor(eye, n, eye) + tensor(eye, eye, n)


def sho_orbital_angular_momentum(n_max: int):
    """Orbital generators L_i = -i eps_ijk a_j^dag a_k on the truncated
    3-mode Fock space.  Truncation breaks the algebra only through
    matrix elements that reach the cutoff level."""
    a = annihilation(n_max)
    eye = np.eye(n_max + 1, dtype=complex)
    modes = [tensor(a, eye, eye), tensor(eye, a, eye), tensor(eye, eye, a)]
    l_ops = []
    for i in range(3):
        op = np.zeros_like(modes[0])
        for j in range(3):
            for k in range(3):
                if _EPSILON_IJK[i, j, k]:
                    op += -1j * _EPSILON_IJK[i, j, k] * (
                        modes[j].conj().T @ modes[k]
                    )
        l_ops.append(op)
    return tuple(l_ops)


def verify_vector_operator(l_ops, a_ops) -> float:
    """Largest violation of the vector-operator algebra, in Frobenius norm.

    Checks [L_i, A_j] = i eps_ijk A_k for all pairs and the equivalent
    ladder relation [L_z, A_plus_minus] = +-A_plus_minus; returns the
    maximum deviation norm (0 for an exact vector operator).
    """
    worst = 0.0
    for i in range(3):
        for j in range(3):
            target = sum(
                1j * _EPSILON_IJK[i, j, k] * a_ops[k] for k in range(3)
            )
            worst = max(
                worst, float(np.linalg.norm(commutator(l_ops[i], a_ops[j]) - target))
            )
    a_plus = a_ops[0] + 1j * a_ops[1]
    a_minus = a_ops[0] - 1j * a_ops[1]
    worst = max(worst, float(np.linalg.norm(commutator(l_ops[2], a_plus) - a_plus)))
    worst = max(
        worst, float(np.linalg.norm(commutator(l_ops[2], a_minus) + a_minus))
    )
    return worst


def transverse_basis(n_hat):
    """Orthonormal pair (f1, f2) perpendicular to n_hat with f1 x f2 = n_hat.

    For n_hat = z this returns (x, y).  Any other right-handed choice
    differs by a rotation about n_hat, which no reported quantity
    depends on.
    """
    n = np.asarray(n_hat, dtype=float)
    n = n / np.linalg.norm(n)
    if abs(n[2]) <= 0.9:
        f2 = np.cross([0.0, 0.0, 1.0], n)
    else:
        f2 = np.cross(n, [1.0, 0.0, 0.0])
    f2 = f2 / np.linalg.norm(f2)
    f1 = np.cross(f2, n)
    return f1, f2


def rotation_taking_z_to(n_hat):
    """Axis and angle of the rotation carrying +z onto n_hat.

    The axis is z x n_hat (undefined only at the poles, where the
    rotation degenerates to the identity or a flip about x).
    """
    n = np.asarray(n_hat, dtype=float)
    n = n / np.linalg.norm(n)
    axis = np.cross([0.0, 0.0, 1.0], n)
    norm = np.linalg.norm(axis)
    if norm < 1e-12:
        if n[2] > 0:
            return np.array([1.0, 0.0, 0.0]), 0.0
        return np.array([1.0, 0.0, 0.0]), np.pi
    return axis / norm, float(np.arccos(np.clip(n[2], -1.0, 1.0)))


def generator_rotation(generators, axis, angle: float) -> np.ndarray:
    """Unitary exp(-i * angle * axis . J) for hermitian generators J."""
    axis = np.asarray(axis, dtype=float)
    g = sum(axis[i] * generators[i] for i in range(3))
    w, v = np.linalg.eigh(g)
    return (v * np.exp(-1j * angle * w)) @ v.conj().T


def spin_half_rotation(axis, angle: float) -> np.ndarray:
    """Closed-form SU(2) rotation exp(-i * angle * axis . sigma / 2)."""
    axis = np.asarray(axis, dtype=float)
    n_sigma = axis[0] * SX + axis[1] * SY + axis[2] * SZ
    return np.cos(angle / 2) * ID2 - 1j * np.sin(angle / 2) * n_sigma


@dataclass
class VectorOperatorSystem:
    """A particle observable A driving a spin 1/2 through (lam/2) A . sigma.

    l_ops generate rotations on the particle space and A transforms as a
    vector under them.  reference_state is the particle state whose mean
    <A> = rho * n_hat sets the driving direction; h_particle is the bare
    particle Hamiltonian, required to commute with n_hat . L.
    """

    h_particle: np.ndarray
    l_ops: tuple
    a_ops: tuple
    reference_state: np.ndarray
    rho: float
    n_hat: Direction

    @property
    def dim(self) -> int:
        return self.h_particle.shape[0]

    def validate(self, atol: float = 1e-10):
        d = self.dim
        for name, op in (
            ("h_particle", self.h_particle),
            ("l1", self.l_ops[0]),
            ("l2", self.l_ops[1]),
            ("l3", self.l_ops[2]),
            ("a1", self.a_ops[0]),
            ("a2", self.a_ops[1]),
            ("a3", self.a_ops[2]),
        ):
            if op.shape != (d, d):
                raise ValueError(f"{name} has shape {op.shape}, expected {(d, d)}")
            if not is_hermitian(op, tol=atol):
                raise ValueError(f"{name} is not hermitian")
        if abs(np.linalg.norm(self.reference_state) - 1.0) > atol:
            raise ValueError("reference_state is not normalized")
        n = self.n_hat.cartesian
        mean_a = np.array(
            [expectation(op, self.reference_state).real for op in self.a_ops]
        )
        if self.rho != 0.0 and not np.allclose(mean_a, self.rho * n, atol=atol):
            raise ValueError(
                f"<A> = {mean_a} does not match rho * n_hat = {self.rho * n}"
            )
        n_dot_l = sum(n[i] * self.l_ops[i] for i in range(3))
        if np.linalg.norm(commutator(self.h_particle, n_dot_l)) > atol:
            raise ValueError("h_particle does not commute with n_hat . L")
        return self


def two_spin_system() -> VectorOperatorSystem:
    """Driving spin s = sigma/2 of a spin-1/2 particle, reference |+z>."""
    half = tuple(0.5 * s for s in (SX, SY, SZ))
    ref = np.array([1.0, 0.0], dtype=complex)
    return VectorOperatorSystem(
        h_particle=np.zeros((2, 2), dtype=complex),
        l_ops=half,
        a_ops=half,
        reference_state=ref,
        rho=0.5,
        n_hat=Direction(0.0, 0.0),
    ).validate()


def angular_momentum_system(l, m, e_scale: float = 0.0) -> VectorOperatorSystem:
    """A = L in the state |l, m>, driving along +z with rho = m.

    e_scale, if nonzero, adds the rotation-invariant particle term
    e_scale * L**2, which leaves every m level of fixed l degenerate.
    """
    l_ops = angular_momentum(l)
    ref = angular_basis_state(l, m)
    l_sq = sum(op @ op for op in l_ops)
    return VectorOperatorSystem(
        h_particle=e_scale * l_sq,
        l_ops=l_ops,
        a_ops=l_ops,
        reference_state=ref,
        rho=float(m),
        n_hat=Direction(0.0, 0.0),
    ).validate()


def sho_system(epsilon: float, n_max: int = 3, rho: float = 1.0) -> VectorOperatorSystem:
    """Oscillator quadratures displaced by rho along +z.

    A = rho * z_hat + r0 * b with r0 = epsilon * rho, b the quadrature
    fluctuations about the displaced minimum; the reference is the
    oscillator ground state and the particle Hamiltonian is the total
    occupation number.
    """
    (b1, b2, b3), ground = sho_quadratures(n_max)
    r0 = epsilon * rho
    eye = np.eye(b1.shape[0], dtype=complex)
    a_ops = (r0 * b1, r0 * b2, rho * eye + r0 * b3)
    return VectorOperatorSystem(
        h_particle=sho_number_operator(n_max),
        l_ops=sho_orbital_angular_momentum(n_max),
        a_ops=a_ops,
        reference_state=ground,
        rho=rho,
        n_hat=Direction(0.0, 0.0),
    ).validate()
