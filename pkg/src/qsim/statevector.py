"""Dense statevector simulation and exact reference propagators.

Amplitude index bits follow :mod:`qsim.pauli`: qubit 0 is the most
significant bit, so a state array reshaped to ``(2,)*n`` has axis ``q`` for
qubit ``q``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .circuit import CNOT, GLOBAL_PHASE, RZ, TPHASE, Circuit, Gate, base_matrix, slice_gates, trotter_plan
from .errors import ContractError, DimensionError, NonHermitianError
from .fermion import GroupedHamiltonian, lower_grouped
from .pauli import PauliSum, check_cap

NORM_TOL = 1e-10
HERMITIAN_TOL = 1e-10


class StateVector:
    """Normalized ``2^n`` amplitude vector; operations return new states."""

    __slots__ = ("n_qubits", "_amps")

    def __init__(self, amplitudes, n_qubits: int | None = None, normalize: bool = False):
        amps = np.array(amplitudes, dtype=complex).reshape(-1)
        n = int(round(math.log2(len(amps)))) if len(amps) else -1
        if n < 0 or 1 << n != len(amps):
            raise DimensionError(f"length {len(amps)} is not a power of two")
        if n_qubits is not None and n_qubits != n:
            raise DimensionError(f"{len(amps)} amplitudes do not describe {n_qubits} qubits")
        check_cap(n)
        norm = np.linalg.norm(amps)
        if normalize:
            if norm == 0:
                raise ValueError("cannot normalize the zero vector")
            amps = amps / norm
        elif abs(norm - 1) > NORM_TOL:
            raise ValueError(f"state norm {norm} differs from 1")
        amps.setflags(write=False)
        self.n_qubits = n
        self._amps = amps

    @classmethod
    def zero(cls, n_qubits: int) -> StateVector:
        return cls.basis(n_qubits, 0)

    @classmethod
    def basis(cls, n_qubits: int, index: int | str) -> StateVector:
        """Computational basis state from an index or a bit string like ``"1100"``."""
        if isinstance(index, str):
            if len(index) != n_qubits or set(index) - {"0", "1"}:
                raise ValueError(f"bad bit string {index!r} for {n_qubits} qubits")
            index = int(index, 2)
        check_cap(n_qubits)
        amps = np.zeros(1 << n_qubits, dtype=complex)
        amps[index] = 1
        return cls(amps)

    @property
    def amplitudes(self) -> np.ndarray:
        return self._amps

    @property
    def dim(self) -> int:
        return len(self._amps)

    def norm(self) -> float:
        return float(np.linalg.norm(self._amps))

    def probabilities(self) -> np.ndarray:
        return np.abs(self._amps) ** 2

    def overlap(self, other: StateVector | np.ndarray) -> float:
        """``|<other|self>|^2``."""
        v = other.amplitudes if isinstance(other, StateVector) else np.asarray(other)
        return float(abs(np.vdot(v, self._amps)) ** 2)

    def inner(self, other: StateVector) -> complex:
        """``<self|other>``."""
        return complex(np.vdot(self._amps, other.amplitudes))

    def tensor(self, other: StateVector) -> StateVector:
        """``self ⊗ other`` with ``self`` on the leading (high) qubits."""
        return StateVector(np.kron(self._amps, other.amplitudes))

    def expectation(self, h: PauliSum | np.ndarray) -> float:
        m = h.matrix() if isinstance(h, PauliSum) else np.asarray(h)
        if m.shape != (self.dim, self.dim):
            raise DimensionError(f"operator of shape {m.shape} on a {self.n_qubits}-qubit state")
        return float(np.vdot(self._amps, m @ self._amps).real)

    def __repr__(self):
        return f"StateVector(n_qubits={self.n_qubits})"


# --------------------------------------------------------------------------
# gate application on (2,)*n [+ batch] tensors


def _axes_index(n_extra: int, fixed: dict[int, int], n: int):
    idx = [slice(None)] * (n + n_extra)
    for q, v in fixed.items():
        idx[q] = v
    return tuple(idx)


def apply_gate_inplace(psi: np.ndarray, gate: Gate, n: int) -> None:
    """Apply ``gate`` to an array of shape ``(2,)*n`` or ``(2,)*n + (batch,)``."""
    extra = psi.ndim - n
    t, c = gate.target, gate.control
    if t >= n or (c is not None and c >= n):
        raise DimensionError(f"{gate} does not fit {n} qubits")
    base = {} if c is None else {c: 1}
    i0 = _axes_index(extra, {**base, t: 0}, n)
    i1 = _axes_index(extra, {**base, t: 1}, n)
    k = gate.kind
    if k == CNOT:
        a0 = psi[i0].copy()
        psi[i0] = psi[i1]
        psi[i1] = a0
        return
    u = base_matrix(gate)
    if k in (RZ, TPHASE, GLOBAL_PHASE):
        if u[0, 0] != 1:
            psi[i0] *= u[0, 0]
        psi[i1] *= u[1, 1]
        return
    a0 = psi[i0].copy()
    a1 = psi[i1]
    psi[i0] = u[0, 0] * a0 + u[0, 1] * a1
    psi[i1] = u[1, 0] * a0 + u[1, 1] * a1


def _check_width(n: int, circuit: Circuit):
    if circuit.n_qubits != n:
        raise DimensionError(f"{circuit.n_qubits}-qubit circuit on a {n}-qubit state")


def apply_gate(state: StateVector, gate: Gate) -> StateVector:
    n = state.n_qubits
    psi = state.amplitudes.copy().reshape((2,) * n)
    apply_gate_inplace(psi, gate, n)
    return StateVector(psi.reshape(-1))


def run_circuit(state: StateVector, circuit: Circuit) -> StateVector:
    n = state.n_qubits
    _check_width(n, circuit)
    psi = state.amplitudes.copy().reshape((2,) * n)
    for g in circuit.gates:
        apply_gate_inplace(psi, g, n)
    return StateVector(psi.reshape(-1))


def apply_to_columns(mat: np.ndarray, circuit: Circuit) -> np.ndarray:
    """Apply a circuit to every column of a ``2^n x k`` matrix."""
    n = circuit.n_qubits
    check_cap(n)
    if mat.shape[0] != 1 << n:
        raise DimensionError(f"{mat.shape[0]} rows for a {n}-qubit circuit")
    psi = np.array(mat, dtype=complex).reshape((2,) * n + (mat.shape[1],))
    for g in circuit.gates:
        apply_gate_inplace(psi, g, n)
    return psi.reshape(1 << n, mat.shape[1])


def circuit_unitary(circuit: Circuit) -> np.ndarray:
    """Dense unitary of a circuit (columns are images of basis states)."""
    check_cap(circuit.n_qubits)
    return apply_to_columns(np.eye(1 << circuit.n_qubits, dtype=complex), circuit)


# --------------------------------------------------------------------------
# exact reference


@dataclass(frozen=True)
class SpectralDecomposition:
    """Eigenvalues ascending with orthonormal eigenvectors as columns."""

    eigenvalues: np.ndarray
    eigenvectors: np.ndarray

    @property
    def ground_energy(self) -> float:
        return float(self.eigenvalues[0])

    @property
    def ground_state(self) -> StateVector:
        return StateVector(self.eigenvectors[:, 0], normalize=True)

    def state(self, k: int) -> StateVector:
        return StateVector(self.eigenvectors[:, k], normalize=True)

    def gap(self, degeneracy_tol: float = 1e-8) -> tuple[float, bool]:
        """Gap above the lowest level and whether that level is degenerate."""
        ev = self.eigenvalues
        if len(ev) < 2:
            return math.inf, False
        return float(ev[1] - ev[0]), bool(ev[1] - ev[0] < degeneracy_tol)

    def propagator(self, t: float) -> np.ndarray:
        v = self.eigenvectors
        return (v * np.exp(-1j * self.eigenvalues * t)) @ v.conj().T


def _hermitian_matrix(h: PauliSum | np.ndarray) -> np.ndarray:
    if isinstance(h, PauliSum):
        m = h.matrix()
    else:
        m = np.asarray(h, dtype=complex)
        if m.ndim != 2 or m.shape[0] != m.shape[1]:
            raise DimensionError(f"expected a square matrix, got shape {m.shape}")
    dev = np.max(np.abs(m - m.conj().T)) if m.size else 0.0
    if dev > HERMITIAN_TOL:
        raise NonHermitianError(f"operator deviates from Hermitian by {dev:.3g}")
    return (m + m.conj().T) / 2


@lru_cache(maxsize=64)
def _diagonalize_cached(h: PauliSum) -> SpectralDecomposition:
    w, v = np.linalg.eigh(_hermitian_matrix(h))
    w.setflags(write=False)
    v.setflags(write=False)
    return SpectralDecomposition(w, v)


def diagonalize(h: PauliSum | np.ndarray) -> SpectralDecomposition:
    """Full eigendecomposition; degenerate subspaces get an orthonormal basis."""
    if isinstance(h, PauliSum):
        return _diagonalize_cached(h)
    w, v = np.linalg.eigh(_hermitian_matrix(h))
    return SpectralDecomposition(w, v)


def exact_propagator(h: PauliSum | np.ndarray, t: float) -> np.ndarray:
    """``exp(-i H t)`` from the eigendecomposition of ``H``."""
    return diagonalize(h).propagator(t)


# --------------------------------------------------------------------------
# Trotter error


TROTTER_METRICS = ("operator_norm", "ground_energy")


def trotter_unitary(g: GroupedHamiltonian, t: float, dt: float, order: int = 1) -> np.ndarray:
    """Unitary of ``trotter_compile(g, t, dt, order)``.

    The compiled circuit is identical slices plus a remainder, so the
    full-slice unitary is simulated once and raised to the slice count.
    """
    n = g.n_spin_orbitals
    n_full, rem = trotter_plan(t, dt)
    u = np.eye(1 << n, dtype=complex)
    if n_full:
        body, _ = slice_gates(g, dt, order)
        u = np.linalg.matrix_power(circuit_unitary(Circuit(n, body)), n_full)
    if rem:
        body, _ = slice_gates(g, rem, order)
        u = apply_to_columns(u, Circuit(n, body))
    return u


def effective_ground_energy(u: np.ndarray, spectrum: SpectralDecomposition, t: float) -> float:
    """Energy read off the phase a propagator imprints on the exact ground state,
    unwrapped relative to the exact ground energy."""
    if t <= 0:
        raise ContractError("need t > 0 to read an energy from a phase")
    psi = spectrum.eigenvectors[:, 0]
    amp = np.vdot(psi, u @ psi)
    e0 = spectrum.ground_energy
    drift = np.angle(amp * np.exp(1j * e0 * t))
    return e0 - drift / t


def trotter_error(g: GroupedHamiltonian, t: float, dt: float, order: int = 1,
                  metric: str = "operator_norm") -> float:
    """Distance between the compiled propagator and the exact one.

    ``operator_norm`` is the spectral norm of the difference;
    ``ground_energy`` is the absolute error of :func:`effective_ground_energy`.
    """
    if metric not in TROTTER_METRICS:
        raise ContractError(f"unknown metric {metric!r}; choose from {TROTTER_METRICS}")
    h = lower_grouped(g)
    spectrum = diagonalize(h)
    u_c = trotter_unitary(g, t, dt, order)
    if metric == "operator_norm":
        return float(np.linalg.norm(u_c - spectrum.propagator(t), 2))
    return abs(effective_ground_energy(u_c, spectrum, t) - spectrum.ground_energy)
