"""Iterative phase estimation and adiabatic state preparation.

Phase convention: an eigenstate of energy ``E`` in window ``w`` has phase
``phi = (E - w.e_shift) / w.omega + w.K`` (taken mod 1), and
:func:`phase_to_energy` inverts that map exactly.  Phase estimation runs
``U = exp(-i H t0)`` with ``t0 = 2 pi / omega`` and multiplies the
register's ``|1>`` branch by ``exp(+i 2^k E_s t0)`` so the register picks up
``exp(-2 pi i 2^k phi)``.

Bits are reported most significant first, ``phi = 0.j0 j1 ... j_{L-1}``,
and measured in the opposite order: ``j_{L-1}`` (the ``U^(2^(L-1))``
iteration) comes first.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Mapping

import numpy as np

from .circuit import TPHASE, Circuit, Gate, compile_pauli_sum, controlize
from .errors import ContractError, DimensionError
from .pauli import PauliSum
from .statevector import (
    StateVector,
    apply_gate_inplace,
    circuit_unitary,
    diagonalize,
    exact_propagator,
    run_circuit,
)

TWO_PI = 2 * math.pi
DEFAULT_MARGIN = 0.1
DEGENERATE_GAP = 1e-12


# --------------------------------------------------------------------------
# windows and phases


@dataclass(frozen=True)
class EnergyWindow:
    """Energy interval ``[e_min, e_max)`` mapped onto phases ``[0, 1)``."""

    e_min: float
    e_max: float
    e_shift: float | None = None

    def __post_init__(self):
        if not self.e_min < self.e_max:
            raise ContractError(f"window needs e_min < e_max, got [{self.e_min}, {self.e_max})")
        if self.e_shift is None:
            object.__setattr__(self, "e_shift", float(self.e_min))
        k = (self.e_shift - self.e_min) / self.omega
        if abs(k - round(k)) > 1e-9:
            raise ContractError(f"(e_shift - e_min)/omega = {k} is not an integer")

    @property
    def omega(self) -> float:
        return self.e_max - self.e_min

    @property
    def t0(self) -> float:
        return TWO_PI / self.omega

    @property
    def K(self) -> int:
        return int(round((self.e_shift - self.e_min) / self.omega))

    def contains(self, energy: float) -> bool:
        return self.e_min <= energy < self.e_max

    def to_dict(self) -> dict:
        return {"e_min": self.e_min, "e_max": self.e_max, "e_shift": self.e_shift,
                "omega": self.omega, "t0": self.t0, "K": self.K}


def encode_phase(energy: float, window: EnergyWindow) -> float:
    """Phase in ``[0, 1)`` that an eigenstate of ``energy`` imprints.

    Since ``K omega = E_s - e_min``, ``(E - E_s)/omega + K`` equals
    ``(E - e_min)/omega``; the latter avoids cancellation near the edges.
    """
    phi = ((energy - window.e_min) / window.omega) % 1.0
    return 0.0 if phi >= 1.0 else phi


def phase_to_energy(phi: float | PhaseRecord, window: EnergyWindow | None = None) -> float:
    """``omega (phi - K) + E_s`` mapped into ``[e_min, e_max)``."""
    if isinstance(phi, PhaseRecord):
        window = phi.window if window is None else window
        phi = phi.phi
    if window is None:
        raise ContractError("a window is needed to convert a phase")
    # omega (phi - K) + E_s == e_min + omega phi, reduced into the window
    return window.e_min + window.omega * (phi % 1.0)


def default_window(h: PauliSum, margin: float = DEFAULT_MARGIN) -> EnergyWindow:
    """Window ``+-(sum |c_k| + margin)``, which bounds every eigenvalue."""
    if not h.is_hermitian():
        raise ContractError("window bounds need a Hermitian Pauli sum")
    if margin < 0:
        raise ContractError("margin must be non-negative")
    bound = h.norm1() + margin
    if bound == 0:
        bound = DEFAULT_MARGIN
    return EnergyWindow(-bound, bound)


@dataclass(frozen=True)
class PhaseRecord:
    """Outcome of one phase-estimation run."""

    bits: tuple[int, ...]
    window: EnergyWindow
    probabilities: tuple[float, ...] = ()
    final_state: StateVector | None = field(default=None, compare=False, repr=False)

    def __post_init__(self):
        object.__setattr__(self, "bits", tuple(int(b) for b in self.bits))
        if any(b not in (0, 1) for b in self.bits):
            raise ValueError("bits must be 0 or 1")

    @property
    def L(self) -> int:
        return len(self.bits)

    @property
    def phi(self) -> float:
        return sum(b * 2.0 ** -(k + 1) for k, b in enumerate(self.bits))

    @property
    def energy(self) -> float:
        return phase_to_energy(self)

    @property
    def bitstring(self) -> str:
        return "".join(map(str, self.bits))

    def to_dict(self) -> dict:
        return {"bits": self.bitstring, "L": self.L, "phi": self.phi,
                "energy": self.energy, "window": self.window.to_dict()}


def phase_distance(a: float, b: float) -> float:
    """Distance between two phases on the unit circle of circumference 1."""
    d = (a - b) % 1.0
    return min(d, 1.0 - d)


# --------------------------------------------------------------------------
# phase estimation


def _known_bits(known_bits, n_bits):
    if isinstance(known_bits, Mapping):
        return dict(known_bits), n_bits
    seq = list(known_bits)
    return {m: b for m, b in enumerate(seq) if b is not None}, len(seq) if n_bits is None else n_bits


def s_feedback_angle(k: int, known_bits, n_bits: int | None = None) -> float:
    """Phase ``2 pi sum_{l>=2} j_{k+l-1} / 2^l`` that S_k must undo."""
    bits, n_bits = _known_bits(known_bits, n_bits)
    if n_bits is None:
        raise ContractError("n_bits is required when known_bits is a mapping")
    if not 0 <= k < n_bits:
        raise ContractError(f"bit index {k} outside 0..{n_bits - 1}")
    total = 0.0
    for m in range(k + 1, n_bits):
        if m not in bits:
            raise ContractError(f"bit j{m} must be measured before j{k}")
        total += bits[m] * 2.0 ** -(m - k + 1)
    return TWO_PI * total


def s_gate(k: int, known_bits, n_bits: int | None = None, register: int = 0) -> Gate:
    """Feedback rotation ``S_k = diag(1, Phi_k)`` with ``Phi_k = exp(2 pi i sum j/2^l)``.

    ``known_bits`` is a sequence of length L (``None`` for unmeasured bits)
    or a ``{index: bit}`` mapping together with ``n_bits``.
    """
    return Gate(TPHASE, register, None, -s_feedback_angle(k, known_bits, n_bits))


Provider = Callable[[int], "Circuit | np.ndarray"]


class ExactProvider:
    """``power -> exp(-i H power t0)`` on the system qubits."""

    def __init__(self, h: PauliSum, t0: float):
        self.h, self.t0 = h, t0

    def __call__(self, power: int) -> np.ndarray:
        return exact_propagator(self.h, power * self.t0)


class MatrixProvider:
    """``power -> U^power`` for a fixed system unitary."""

    def __init__(self, unitary: np.ndarray):
        self.unitary = np.asarray(unitary, dtype=complex)
        self._cache = {1: self.unitary}

    def __call__(self, power: int) -> np.ndarray:
        if power not in self._cache:
            self._cache[power] = np.linalg.matrix_power(self.unitary, power)
        return self._cache[power]


class RepetitionProvider:
    """``power -> power`` copies of a controlled circuit.

    ``circuit`` acts on register qubit 0 plus the system and is already
    controlled (see :func:`qsim.circuit.controlled_system`).  With
    ``cache_unitary`` the circuit is simulated once and its matrix raised to
    the power, which is the same operator as the repeated gate stream.
    """

    def __init__(self, circuit: Circuit, cache_unitary: bool = False):
        self.circuit = circuit
        self.cache_unitary = cache_unitary
        self._provider = MatrixProvider(circuit_unitary(circuit)) if cache_unitary else None

    def __call__(self, power: int):
        if self._provider is not None:
            return self._provider(power)
        return self.circuit.repeated(power)


class ScaledProvider:
    """``power -> factory(power)``: one controlled circuit with scaled angles."""

    def __init__(self, factory: Callable[[float], Circuit]):
        self.factory = factory

    def __call__(self, power: int) -> Circuit:
        return self.factory(power)


def _apply_block(psi: np.ndarray, block, n_sys: int) -> np.ndarray:
    """Apply a provider result to a ``(2, 2^n_sys)`` register-major state."""
    dim = psi.shape[1]
    if isinstance(block, Circuit):
        if block.n_qubits != n_sys + 1:
            raise DimensionError(f"provider circuit has {block.n_qubits} qubits, need {n_sys + 1}")
        t = psi.reshape((2,) * (n_sys + 1))
        for g in block.gates:
            apply_gate_inplace(t, g, n_sys + 1)
        return t.reshape(2, dim)
    m = np.asarray(block)
    if m.shape == (dim, dim):
        psi[1] = m @ psi[1]
        return psi
    if m.shape == (2 * dim, 2 * dim):
        return (m @ psi.reshape(-1)).reshape(2, dim)
    raise DimensionError(f"provider returned shape {m.shape} for a {n_sys}-qubit system")


def ipea_run(controlled_u: Provider, eigenstate: StateVector, L: int, window: EnergyWindow,
             seed: int | np.random.Generator | None = None) -> PhaseRecord:
    """Iterative phase estimation with one register qubit.

    Iteration ``k`` (from ``L-1`` down to 0) prepares the register in |+>,
    applies ``controlled_u(2^k)``, the energy-shift phase and ``S_k``, then a
    Hadamard and a Born-rule measurement.  The register is reset to |0>
    between iterations and the system keeps its collapsed state.
    """
    if L < 1:
        raise ContractError(f"need at least one bit, got L = {L}")
    rng = seed if isinstance(seed, np.random.Generator) else np.random.default_rng(seed)
    n_sys = eigenstate.n_qubits
    dim = eigenstate.dim
    sys = eigenstate.amplitudes.copy()
    bits: list[int | None] = [None] * L
    probs: list[float] = [0.0] * L
    h = 1 / math.sqrt(2)

    for k in range(L - 1, -1, -1):
        psi = np.zeros((2, dim), dtype=complex)
        psi[0] = h * sys
        psi[1] = h * sys
        power = 1 << k
        psi = _apply_block(psi, controlled_u(power), n_sys)
        shift = (power * window.e_shift * window.t0) % TWO_PI
        psi[1] *= np.exp(1j * shift) * np.exp(1j * s_feedback_angle(k, bits))
        zero = h * (psi[0] + psi[1])
        one = h * (psi[0] - psi[1])
        p1 = float(np.vdot(one, one).real)
        p0 = float(np.vdot(zero, zero).real)
        p1 = min(max(p1 / (p0 + p1), 0.0), 1.0)
        outcome = int(rng.random() < p1)
        branch = one if outcome else zero
        sys = branch / np.linalg.norm(branch)
        bits[k] = outcome
        probs[k] = p1 if outcome else 1 - p1

    return PhaseRecord(tuple(bits), window, tuple(probs), StateVector(sys, normalize=True))


# --------------------------------------------------------------------------
# adiabatic state preparation


def hf_hamiltonian(h_fci: PauliSum) -> PauliSum:
    """Reference Hamiltonian: the computational-basis diagonal of ``h_fci``."""
    return h_fci.diagonal_part()


def build_path(h_fci: PauliSum, s: float) -> PauliSum:
    """``(1 - s) H_diag + s H_fci``."""
    if not 0 <= s <= 1:
        raise ContractError(f"path parameter {s} outside [0, 1]")
    if s == 1:
        return h_fci
    return (1 - s) * hf_hamiltonian(h_fci) + s * h_fci


def reference_state(h_fci: PauliSum) -> StateVector:
    """Ground state of the diagonal reference: the lowest-energy basis state."""
    diag = np.real(np.diagonal(hf_hamiltonian(h_fci).matrix()))
    return StateVector.basis(h_fci.n_qubits, int(np.argmin(diag)))


@dataclass(frozen=True)
class AdiabaticSchedule:
    total_time: float
    steps: int

    def __post_init__(self):
        if self.total_time < 0:
            raise ContractError("total time must be non-negative")
        if self.steps < 1:
            raise ContractError("need at least one step")

    def s(self, k: int) -> float:
        return k / self.steps

    def grid(self) -> np.ndarray:
        return np.arange(self.steps + 1) / self.steps

    def midpoint(self, k: int) -> float:
        return (k + 0.5) / self.steps

    @property
    def step_time(self) -> float:
        return self.total_time / self.steps


@dataclass(frozen=True)
class TracePoint:
    s: float
    overlap: float
    gap: float
    degenerate: bool = False


ASP_MODES = ("oracle", "circuit")


def adiabatic_evolve(h_fci: PauliSum, schedule: AdiabaticSchedule, dt_inner: float | None = None,
                     mode: str = "oracle", initial: StateVector | None = None
                     ) -> tuple[StateVector, list[TracePoint]]:
    """Evolve the reference ground state along ``build_path`` from s = 0 to 1.

    Step ``k`` holds ``H((k + 1/2) / steps)`` fixed for ``T / steps``, either
    exactly (``oracle``) or as a first-order Trotter circuit with inner step
    ``dt_inner`` (``circuit``).  The trace has one point per grid value
    ``s_k = k / steps`` with the overlap on the exact ground state of
    ``h_fci`` and the instantaneous gap of ``H(s_k)``.
    """
    if mode not in ASP_MODES:
        raise ContractError(f"unknown mode {mode!r}; choose from {ASP_MODES}")
    target = diagonalize(h_fci).eigenvectors[:, 0]
    state = reference_state(h_fci) if initial is None else initial
    tau = schedule.step_time
    if mode == "circuit" and dt_inner is None:
        dt_inner = tau if tau > 0 else 1.0

    def point(s, st):
        gap, _ = diagonalize(build_path(h_fci, s)).gap()
        return TracePoint(float(s), st.overlap(target), gap, bool(gap <= DEGENERATE_GAP))

    trace = [point(0.0, state)]
    for k in range(schedule.steps):
        if tau > 0:
            hk = build_path(h_fci, schedule.midpoint(k))
            if mode == "oracle":
                amps = exact_propagator(hk, tau) @ state.amplitudes
                state = StateVector(amps, normalize=True)
            else:
                state = run_circuit(state, compile_pauli_sum(hk, tau, dt_inner, order=1))
        trace.append(point(schedule.s(k + 1), state))
    return state, trace


def energy_expectation(state: StateVector, h: PauliSum) -> float:
    return state.expectation(h)


def minimum_gap(h_fci: PauliSum, samples: int = 201) -> tuple[float, float]:
    """Smallest ground-state gap of ``build_path`` on a uniform grid, and where."""
    best = (math.inf, 0.0)
    for s in np.linspace(0, 1, samples):
        gap, _ = diagonalize(build_path(h_fci, float(s))).gap()
        if gap < best[0]:
            best = (gap, float(s))
    return best


# --------------------------------------------------------------------------
# synthetic one-qubit helpers


def phase_unitary(phi: float) -> np.ndarray:
    """``Tphase(2 pi phi)``: |1> is an eigenvector with phase ``exp(-2 pi i phi)``."""
    return np.diag([1.0, np.exp(-1j * TWO_PI * phi)])


def scaled_phase_circuit(phi: float) -> Callable[[float], Circuit]:
    """Factory for :class:`ScaledProvider` that scales the Tphase angle."""

    def factory(scale: float) -> Circuit:
        body = Circuit(1, (Gate(TPHASE, 0, None, (TWO_PI * phi * scale) % TWO_PI),))
        return controlize(body.shifted(1), 0)

    return factory


def repeated_phase_circuit(phi: float) -> Circuit:
    """Controlled ``Tphase(2 pi phi)`` for :class:`RepetitionProvider`."""
    return scaled_phase_circuit(phi)(1)


UNIT_WINDOW = EnergyWindow(0.0, TWO_PI)
"""Window with ``t0 = 1`` and zero shift: the phase of ``U`` itself is read."""
