"""Dense complex linear algebra for small spin-1/2 registers.

Operators are plain ``numpy`` arrays of dtype ``complex128``.  Basis index
``b`` of an n-spin register encodes spin 0 in its most significant bit, so
``|10>`` (spin 0 up-flipped, spin 1 unflipped) is index 2.
"""
from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from functools import reduce

import numpy as np
from scipy.optimize import minimize_scalar

NORM_TOL = 1e-12
HERMITIAN_TOL = 1e-12
PSD_TOL = 1e-10
UNITARY_TOL = 1e-10

I2 = np.eye(2, dtype=complex)
SIGMA_X = np.array([[0, 1], [1, 0]], dtype=complex)
SIGMA_Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
SIGMA_Z = np.array([[1, 0], [0, -1]], dtype=complex)

IX = SIGMA_X / 2
IY = SIGMA_Y / 2
IZ = SIGMA_Z / 2

HADAMARD = np.array([[1, 1], [1, -1]], dtype=complex) / np.sqrt(2)


class DimensionError(ValueError):
    """Operands have incompatible Hilbert-space dimensions."""


class SpinAxis(Enum):
    PX = "+x"
    MX = "-x"
    PY = "+y"
    MY = "-y"
    PZ = "+z"
    MZ = "-z"

    @property
    def sign(self) -> int:
        return -1 if self.value[0] == "-" else 1

    @property
    def cartesian(self) -> str:
        return self.value[1]

    @property
    def pauli(self) -> np.ndarray:
        return {"x": SIGMA_X, "y": SIGMA_Y, "z": SIGMA_Z}[self.cartesian]

    @classmethod
    def parse(cls, token: str) -> "SpinAxis":
        token = token.strip().lower()
        if token in ("x", "y", "z"):
            token = "+" + token
        return cls(token)


def _nspins_for(dim: int) -> int:
    n = int(dim).bit_length() - 1
    if n < 0 or 2**n != dim:
        raise DimensionError(f"dimension {dim} is not a power of two")
    return n


@dataclass(frozen=True, eq=False)
class StateVector:
    """Normalized pure state of an n-spin register.

    Parameters
    ----------
    amplitudes : array_like, shape (2**n,)
        Complex amplitudes, ordered ``|00..0>`` to ``|11..1>``.
    """

    amplitudes: np.ndarray

    def __post_init__(self):
        amps = np.array(self.amplitudes, dtype=complex).reshape(-1)
        _nspins_for(amps.size)
        if not np.all(np.isfinite(amps)):
            raise ValueError("state amplitudes must be finite")
        norm = np.vdot(amps, amps).real
        if abs(norm - 1.0) > NORM_TOL:
            raise ValueError(f"state is not normalized (norm**2 = {norm!r})")
        amps.setflags(write=False)
        object.__setattr__(self, "amplitudes", amps)

    @property
    def nspins(self) -> int:
        return _nspins_for(self.amplitudes.size)

    @property
    def dim(self) -> int:
        return self.amplitudes.size

    @classmethod
    def basis(cls, bits) -> "StateVector":
        """Computational basis state ``|b0 b1 ... b_{n-1}>``."""
        bits = [int(b) for b in bits]
        if not bits or any(b not in (0, 1) for b in bits):
            raise ValueError(f"invalid bit pattern {bits!r}")
        amps = np.zeros(2 ** len(bits), dtype=complex)
        amps[basis_index(bits)] = 1.0
        return cls(amps)

    @classmethod
    def normalized(cls, amplitudes) -> "StateVector":
        amps = np.asarray(amplitudes, dtype=complex).reshape(-1)
        return cls(amps / np.linalg.norm(amps))

    def density(self) -> "DensityOperator":
        return DensityOperator(np.outer(self.amplitudes, self.amplitudes.conj()))


@dataclass(frozen=True, eq=False)
class DensityOperator:
    """Mixed state: Hermitian, unit trace, positive semidefinite."""

    matrix: np.ndarray

    def __post_init__(self):
        m = np.array(self.matrix, dtype=complex)
        if m.ndim != 2 or m.shape[0] != m.shape[1]:
            raise DimensionError(f"density matrix must be square, got {m.shape}")
        _nspins_for(m.shape[0])
        if not np.all(np.isfinite(m)):
            raise ValueError("density matrix must be finite")
        if np.abs(m - m.conj().T).max() > HERMITIAN_TOL:
            raise ValueError("density matrix is not Hermitian")
        if abs(np.trace(m) - 1.0) > HERMITIAN_TOL:
            raise ValueError("density matrix trace is not 1")
        if np.linalg.eigvalsh(m).min() < -PSD_TOL:
            raise ValueError("density matrix is not positive semidefinite")
        m.setflags(write=False)
        object.__setattr__(self, "matrix", m)

    @property
    def nspins(self) -> int:
        return _nspins_for(self.matrix.shape[0])

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]

    @classmethod
    def maximally_mixed(cls, nspins: int) -> "DensityOperator":
        d = 2**nspins
        return cls(np.eye(d, dtype=complex) / d)


def basis_index(bits) -> int:
    """Index of ``|b0 b1 ...>`` with spin 0 as the most significant bit."""
    idx = 0
    for b in bits:
        idx = (idx << 1) | int(b)
    return idx


def index_bits(index: int, nspins: int) -> list[int]:
    return [(index >> (nspins - 1 - k)) & 1 for k in range(nspins)]


def is_unitary(u: np.ndarray, tol: float = UNITARY_TOL) -> bool:
    u = np.asarray(u)
    if u.ndim != 2 or u.shape[0] != u.shape[1]:
        return False
    return bool(np.abs(u @ u.conj().T - np.eye(u.shape[0])).max() <= tol)


def kron(*ops: np.ndarray) -> np.ndarray:
    """Kronecker product, leftmost operand acting on the most significant spin."""
    if not ops:
        raise ValueError("kron needs at least one operand")
    return reduce(np.kron, (np.asarray(op, dtype=complex) for op in ops))


def rotation(axis: SpinAxis | str, theta: float) -> np.ndarray:
    """Spin-1/2 rotation ``exp(-i theta I_axis)``.

    Minus axes rotate by ``-theta`` about the positive axis.  Uses the closed
    form ``cos(theta/2) I - i sin(theta/2) sigma``.
    """
    if isinstance(axis, str):
        axis = SpinAxis.parse(axis)
    if not np.isfinite(theta):
        raise ValueError("rotation angle must be finite")
    half = axis.sign * theta / 2
    if axis.cartesian == "z":
        return np.diag([np.exp(-1j * half), np.exp(1j * half)])
    return np.cos(half) * I2 - 1j * np.sin(half) * axis.pauli


def embed(u: np.ndarray, spin: int, nspins: int) -> np.ndarray:
    """Place a 2x2 operator on ``spin`` of an ``nspins`` register."""
    u = np.asarray(u, dtype=complex)
    if u.shape != (2, 2):
        raise DimensionError(f"embed expects a 2x2 operator, got {u.shape}")
    if not 0 <= spin < nspins:
        raise IndexError(f"spin {spin} out of range for {nspins} spins")
    left = np.eye(2**spin, dtype=complex)
    right = np.eye(2 ** (nspins - spin - 1), dtype=complex)
    return np.kron(np.kron(left, u), right)


def _phase_distance_at(u: np.ndarray, v: np.ndarray, phi: float) -> float:
    return float(np.abs(u - np.exp(1j * phi) * v).max())


def global_phase_distance(u: np.ndarray, v: np.ndarray, *, return_phase: bool = False):
    """Smallest max-elementwise deviation between ``u`` and ``exp(i phi) v``.

    The trace overlap gives the least-squares phase; a coarse scan of the
    circle followed by a bounded scalar minimization polishes it under the
    max norm.

    Returns
    -------
    distance : float
    phase : float
        Only when ``return_phase`` is set; the phase ``phi`` in ``(-pi, pi]``.
    """
    u = np.asarray(u, dtype=complex)
    v = np.asarray(v, dtype=complex)
    if u.shape != v.shape:
        raise DimensionError(f"shape mismatch: {u.shape} vs {v.shape}")

    candidates = []
    overlap = np.vdot(v, u)  # tr(v^dag u)
    if abs(overlap) > 1e-12:
        candidates.append(float(np.angle(overlap)))
    candidates.extend(np.linspace(-np.pi, np.pi, 64, endpoint=False))
    scores = [_phase_distance_at(u, v, phi) for phi in candidates]
    best = int(np.argmin(scores))
    phi0, d0 = candidates[best], scores[best]

    if d0 > 0.0:
        width = 2 * np.pi / 64
        res = minimize_scalar(
            lambda p: _phase_distance_at(u, v, p),
            bounds=(phi0 - width, phi0 + width),
            method="bounded",
            options={"xatol": 1e-13},
        )
        if res.fun < d0:
            phi0, d0 = float(res.x), float(res.fun)

    phi0 = float(np.angle(np.exp(1j * phi0)))
    if return_phase:
        return d0, phi0
    return d0


def apply(u: np.ndarray, state: StateVector) -> StateVector:
    """Evolve a pure state; renormalizes away accumulated rounding."""
    u = np.asarray(u, dtype=complex)
    if u.shape != (state.dim, state.dim):
        raise DimensionError(f"operator {u.shape} does not act on dim {state.dim}")
    out = u @ state.amplitudes
    norm = np.linalg.norm(out)
    if abs(norm - 1.0) > 1e-9:
        raise ValueError(f"operator is not norm preserving (|U psi| = {norm!r})")
    return StateVector(out / norm)


def evolve(u: np.ndarray, rho: DensityOperator) -> DensityOperator:
    u = np.asarray(u, dtype=complex)
    if u.shape != (rho.dim, rho.dim):
        raise DimensionError(f"operator {u.shape} does not act on dim {rho.dim}")
    m = u @ rho.matrix @ u.conj().T
    return DensityOperator((m + m.conj().T) / 2)
