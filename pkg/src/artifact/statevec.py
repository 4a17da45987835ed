"""Dense complex state-vector simulator.

Qubit ordering is little-endian throughout the package: qubit 0 is the
least significant bit of a basis index.  Gates are applied with
stride-based kernels (reshape/moveaxis), never by building the full
2^n x 2^n matrix, so states up to the configured cap stay cheap.

Tolerances are centralized here: states must be normalized to
``NORM_TOL``; observables must be Hermitian to ``HERM_TOL``.
"""

from __future__ import annotations

import math
import os
from dataclasses import dataclass

import numpy as np

NORM_TOL = 1e-10
HERM_TOL = 1e-12

QUBIT_CAP_ENV = "GSIP_QUBIT_CAP"
DEFAULT_QUBIT_CAP = 24

SQRT2_INV = 1 / math.sqrt(2)

PAULI_I = np.eye(2, dtype=complex)
PAULI_X = np.array([[0, 1], [1, 0]], dtype=complex)
PAULI_Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
PAULI_Z = np.array([[1, 0], [0, -1]], dtype=complex)
HADAMARD = np.array([[1, 1], [1, -1]], dtype=complex) * SQRT2_INV


class QubitCapError(ValueError):
    pass


class ImaginaryResidueError(ValueError):
    pass


class NormUnderflowError(ValueError):
    pass


def qubit_cap() -> int:
    raw = os.environ.get(QUBIT_CAP_ENV)
    return int(raw) if raw else DEFAULT_QUBIT_CAP


def rotation_matrix(theta: float) -> np.ndarray:
    """R(theta) = cos(theta) X + sin(theta) Z, the protocol's X-Z plane."""
    return math.cos(theta) * PAULI_X + math.sin(theta) * PAULI_Z


def xz_plane_observable(phi: float) -> np.ndarray:
    """Same family as rotation_matrix; named for the Bloch-angle reading."""
    return rotation_matrix(phi)


@dataclass(frozen=True)
class SingleQubitObservable:
    """A 2x2 Hermitian involution (eigenvalues exactly +-1), or identity."""

    kind: str
    matrix: np.ndarray

    def __post_init__(self):
        m = self.matrix
        if m.shape != (2, 2):
            raise ValueError("single-qubit observables are 2x2")
        if np.abs(m - m.conj().T).max() > HERM_TOL:
            raise ValueError("observable is not Hermitian")
        if np.abs(m @ m - PAULI_I).max() > 1e-10:
            raise ValueError("observable does not square to identity")
        m.setflags(write=False)

    @staticmethod
    def x() -> "SingleQubitObservable":
        return SingleQubitObservable("X", PAULI_X.copy())

    @staticmethod
    def z() -> "SingleQubitObservable":
        return SingleQubitObservable("Z", PAULI_Z.copy())

    @staticmethod
    def rotation(theta: float) -> "SingleQubitObservable":
        return SingleQubitObservable(f"R({theta:.6g})", rotation_matrix(theta))

    @staticmethod
    def identity() -> "SingleQubitObservable":
        return SingleQubitObservable("I", PAULI_I.copy())

    @property
    def is_identity(self) -> bool:
        return self.kind == "I"


class ProductObservable:
    """Tensor product of per-qubit 2x2 operators with a +-1 prefactor.

    ``terms`` maps qubit -> 2x2 matrix; unassigned qubits act as identity.
    The per-qubit matrices need not be Hermitian (Pauli labels X^q Z^p put
    XZ on a qubit), but ``expectation`` insists the result is real.
    """

    def __init__(self, terms: dict, sign: int = 1):
        if sign not in (1, -1):
            raise ValueError("sign must be +-1")
        cleaned = {}
        for q, m in terms.items():
            if isinstance(m, SingleQubitObservable):
                m = m.matrix
            m = np.asarray(m, dtype=complex)
            if m.shape != (2, 2):
                raise ValueError("terms must be 2x2 matrices")
            if int(q) in cleaned:
                raise ValueError(f"duplicate term for qubit {q}")
            cleaned[int(q)] = m
        self.terms = cleaned
        self.sign = sign

    def qubits(self) -> list[int]:
        return sorted(self.terms)

    def apply(self, state: "StateVector") -> "StateVector":
        """M |psi> as a raw (possibly unnormalized) vector wrapper."""
        amps = state.amplitudes
        for q, m in self.terms.items():
            amps = apply_single(amps, m, q, state.n_qubits)
        if self.sign < 0:
            amps = -amps
        return StateVector(state.n_qubits, amps, _validate=False)


class StateVector:
    """Normalized dense amplitudes over ``n_qubits`` little-endian qubits."""

    __slots__ = ("n_qubits", "amplitudes")

    def __init__(self, n_qubits: int, amplitudes: np.ndarray, _validate: bool = True):
        cap = qubit_cap()
        if n_qubits > cap:
            raise QubitCapError(f"{n_qubits} qubits exceeds cap {cap} "
                                f"(override with {QUBIT_CAP_ENV})")
        amplitudes = np.asarray(amplitudes, dtype=complex)
        if amplitudes.shape != (2 ** n_qubits,):
            raise ValueError("amplitude vector has wrong length")
        if _validate and abs(np.linalg.norm(amplitudes) - 1.0) > NORM_TOL:
            raise ValueError("state is not normalized")
        self.n_qubits = n_qubits
        self.amplitudes = amplitudes

    def copy(self) -> "StateVector":
        return StateVector(self.n_qubits, self.amplitudes.copy(), _validate=False)

    def norm(self) -> float:
        return float(np.linalg.norm(self.amplitudes))

    def inner(self, other: "StateVector") -> complex:
        return complex(np.vdot(self.amplitudes, other.amplitudes))

    def distance(self, other: "StateVector") -> float:
        return float(np.linalg.norm(self.amplitudes - other.amplitudes))


def apply_single(amps: np.ndarray, m: np.ndarray, qubit: int, n: int) -> np.ndarray:
    """Apply a 2x2 matrix to one qubit of a length-2^n vector."""
    # axis n-1-qubit of the [2]*n tensor is the qubit (little-endian)
    t = amps.reshape([2] * n)
    axis = n - 1 - qubit
    t = np.moveaxis(t, axis, -1)
    t = t @ m.T
    return np.moveaxis(t, -1, axis).reshape(-1)


def apply_unitary(amps: np.ndarray, u: np.ndarray, qubits: list[int], n: int) -> np.ndarray:
    """Apply a 2^k x 2^k matrix to ``qubits`` (qubits[0] = least significant)."""
    k = len(qubits)
    if u.shape != (2 ** k, 2 ** k):
        raise ValueError("matrix size does not match qubit count")
    if len(set(qubits)) != k:
        raise ValueError("duplicate qubits")
    t = amps.reshape([2] * n)
    # Our axis for qubit q is n-1-q; u's index packs qubits[k-1]..qubits[0]
    # most-to-least significant, so order the moved axes the same way.
    axes = [n - 1 - q for q in reversed(qubits)]
    t = np.moveaxis(t, axes, range(n - k, n))
    t = t.reshape(-1, 2 ** k) @ u.T
    t = t.reshape([2] * n)
    t = np.moveaxis(t, range(n - k, n), axes)
    return t.reshape(-1)


def plus_state(n: int) -> StateVector:
    """|+>^n, the uniform real-positive superposition."""
    if n < 1:
        raise ValueError("need at least one qubit")
    amps = np.full(2 ** n, 2 ** (-n / 2), dtype=complex)
    return StateVector(n, amps)


def apply_cz(state: StateVector, u: int, v: int) -> StateVector:
    """ctl-Z between qubits u and v (symmetric)."""
    n = state.n_qubits
    if u == v:
        raise ValueError("CZ needs two distinct qubits")
    if not (0 <= u < n and 0 <= v < n):
        raise IndexError("qubit out of range")
    amps = state.amplitudes.copy()
    t = amps.reshape([2] * n)
    idx = [slice(None)] * n
    idx[n - 1 - u] = 1
    idx[n - 1 - v] = 1
    t[tuple(idx)] *= -1
    return StateVector(n, amps, _validate=False)


def expectation(state: StateVector, obs: ProductObservable) -> float:
    """<psi| M |psi>, asserting the imaginary residue is negligible."""
    n = state.n_qubits
    for q in obs.terms:
        if not 0 <= q < n:
            raise IndexError(f"observable qubit {q} out of range")
    val = state.inner(obs.apply(state))
    if abs(val.imag) >= 1e-10:
        raise ImaginaryResidueError(f"expectation has imaginary part {val.imag:g}")
    return float(val.real)


def measure(state: StateVector, obs: SingleQubitObservable, qubit: int,
            rng: np.random.Generator) -> tuple[int, StateVector]:
    """Projective measurement of a +-1 observable on one qubit.

    Returns (outcome, collapsed state); Born probabilities (1 +- <o>)/2.
    """
    if obs.is_identity:
        raise ValueError("cannot measure the identity")
    n = state.n_qubits
    if not 0 <= qubit < n:
        raise IndexError(f"qubit {qubit} out of range")
    applied = apply_single(state.amplitudes, obs.matrix, qubit, n)
    plus = 0.5 * (state.amplitudes + applied)
    p_plus = float(np.real(np.vdot(plus, plus)))
    outcome = 1 if rng.random() < p_plus else -1
    branch = plus if outcome == 1 else 0.5 * (state.amplitudes - applied)
    norm = float(np.linalg.norm(branch))
    if norm < 1e-12:
        raise NormUnderflowError("measured an impossible branch")
    return outcome, StateVector(n, branch / norm, _validate=False)


def project(state: StateVector, obs: SingleQubitObservable, qubit: int,
            outcome: int) -> tuple[float, StateVector | None]:
    """Deterministic branch of ``measure``: (probability, collapsed|None)."""
    n = state.n_qubits
    applied = apply_single(state.amplitudes, obs.matrix, qubit, n)
    branch = 0.5 * (state.amplitudes + outcome * applied)
    p = float(np.real(np.vdot(branch, branch)))
    if p < 1e-24:
        return 0.0, None
    return p, StateVector(n, branch / math.sqrt(p), _validate=False)
