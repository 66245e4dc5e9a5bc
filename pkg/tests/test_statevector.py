import math

import numpy as np
import pytest
import scipy.linalg as sl
from hypothesis import given, settings
from hypothesis import strategies as st

from qsim.circuit import CNOT, GLOBAL_PHASE, HADAMARD, RZ, Circuit, Gate, controlled_system, emit_zstring, trotter_compile
from qsim.errors import DimensionError, NonHermitianError, ResourceError
from qsim.fermion import IntegralTable, group_hamiltonian, lower_grouped
from qsim.pauli import PauliSum
from qsim.statevector import (
    StateVector,
    apply_gate,
    circuit_unitary,
    diagonalize,
    effective_ground_energy,
    exact_propagator,
    run_circuit,
    trotter_error,
    trotter_unitary,
)

gate_strategy = st.one_of(
    st.builds(lambda q, th: Gate(RZ, q, None, th), st.integers(0, 2), st.floats(-6, 6)),
    st.builds(lambda q: Gate(HADAMARD, q), st.integers(0, 2)),
    st.builds(lambda q, c: Gate(CNOT, q, (q + c) % 3), st.integers(0, 2), st.integers(1, 2)),
    st.builds(lambda q, c, th: Gate("Tphase", q, (q + c) % 3, th), st.integers(0, 2), st.integers(1, 2), st.floats(-6, 6)),
    st.builds(lambda q: Gate("Ybasis", q), st.integers(0, 2)),
    st.builds(lambda q, th: Gate("Rx", q, None, th), st.integers(0, 2), st.floats(-6, 6)),
)


def random_state(rng, n):
    v = rng.normal(size=1 << n) + 1j * rng.normal(size=1 << n)
    return StateVector(v, normalize=True)


def test_hadamard_on_zero():
    s = apply_gate(StateVector.zero(1), Gate(HADAMARD, 0))
    np.testing.assert_allclose(s.amplitudes, [1 / math.sqrt(2)] * 2)


def test_cnot_on_10():
    s = apply_gate(StateVector.basis(2, "10"), Gate(CNOT, 1, 0))
    assert s.amplitudes[0b11] == 1


def test_controlled_global_phase_kicks_back():
    rng = np.random.default_rng(0)
    psi = random_state(rng, 2)
    s = StateVector.basis(1, 1).tensor(psi)
    out = apply_gate(s, Gate(GLOBAL_PHASE, 1, 0, 0.3))
    np.testing.assert_allclose(out.amplitudes, np.exp(-0.3j) * s.amplitudes)
    s0 = StateVector.basis(1, 0).tensor(psi)
    np.testing.assert_allclose(apply_gate(s0, Gate(GLOBAL_PHASE, 1, 0, 0.3)).amplitudes, s0.amplitudes)


def test_empty_circuit_and_inverse():
    rng = np.random.default_rng(1)
    psi = random_state(rng, 3)
    assert np.array_equal(run_circuit(psi, Circuit(3)).amplitudes, psi.amplitudes)
    c = Circuit(3, [Gate(HADAMARD, 0), Gate(CNOT, 2, 0), Gate(RZ, 1, 2, 0.4), Gate("Ybasis", 2)])
    back = run_circuit(run_circuit(psi, c), c.inverse())
    np.testing.assert_allclose(back.amplitudes, psi.amplitudes, atol=1e-10)


def test_zstring_phase_on_11():
    th = 0.9
    s = run_circuit(StateVector.basis(2, "11"), emit_zstring([0, 1], th))
    np.testing.assert_allclose(s.amplitudes[3], np.exp(-0.5j * th))


def test_errors():
    with pytest.raises(DimensionError):
        apply_gate(StateVector.zero(1), Gate(HADAMARD, 1))
    with pytest.raises(DimensionError):
        run_circuit(StateVector.zero(2), Circuit(3))
    with pytest.raises(ValueError):
        StateVector([1, 1])
    with pytest.raises(DimensionError):
        StateVector([1, 0, 0])


def test_cap(monkeypatch):
    monkeypatch.setenv("QSIM_QUBIT_CAP", "3")
    with pytest.raises(ResourceError):
        StateVector.zero(4)


@settings(max_examples=60, deadline=None)
@given(st.lists(gate_strategy, max_size=12), st.integers(0, 2**32 - 1))
def test_run_matches_composite_matrix(gates, seed):
    c = Circuit(3, gates)
    psi = random_state(np.random.default_rng(seed), 3)
    out = run_circuit(psi, c)
    assert abs(out.norm() - 1) < 1e-10
    np.testing.assert_allclose(out.amplitudes, circuit_unitary(c) @ psi.amplitudes, atol=1e-10)


def test_gate_by_gate_matches_kron():
    # a controlled gate whose control sits below its target
    g = Gate(RZ, 0, 2, 0.7)
    u = circuit_unitary(Circuit(3, [g]))
    rz = np.diag([np.exp(-0.35j), np.exp(0.35j)])
    p0, p1 = np.diag([1, 0]), np.diag([0, 1])
    expected = np.kron(np.kron(np.eye(2), np.eye(2)), p0) + np.kron(np.kron(rz, np.eye(2)), p1)
    np.testing.assert_allclose(u, expected, atol=1e-15)


# --------------------------------------------------------------------------
# exact reference


def test_exact_propagator_basics():
    z = PauliSum.from_string("Z")
    np.testing.assert_allclose(exact_propagator(z, 0.0), np.eye(2))
    t = 0.8
    np.testing.assert_allclose(exact_propagator(z, t), np.diag([np.exp(-1j * t), np.exp(1j * t)]), atol=1e-15)


def test_propagator_group_law(h2_ham):
    u1, u2 = exact_propagator(h2_ham, 0.3), exact_propagator(h2_ham, 1.1)
    np.testing.assert_allclose(exact_propagator(h2_ham, 1.4), u1 @ u2, atol=1e-11)
    u = exact_propagator(h2_ham, 2.0)
    h = h2_ham.matrix()
    assert np.abs(u @ h - h @ u).max() < 1e-10
    assert np.abs(u.conj().T @ u - np.eye(16)).max() < 1e-12
    np.testing.assert_allclose(u, sl.expm(-2j * h), atol=1e-12)


def test_diagonalize(h2_ham, h2_spectrum, golden):
    w = diagonalize(PauliSum(1, {"I": 0.5, "Z": -0.5})).eigenvalues
    np.testing.assert_allclose(w, [0, 1], atol=1e-15)
    spec = h2_spectrum
    assert len(spec.eigenvalues) == 16
    assert np.all(np.diff(spec.eigenvalues) >= 0)
    h = h2_ham.matrix()
    for k in range(16):
        v = spec.eigenvectors[:, k]
        assert np.linalg.norm(h @ v - spec.eigenvalues[k] * v) < 1e-10
    assert np.abs(spec.eigenvectors.conj().T @ spec.eigenvectors - np.eye(16)).max() < 1e-12
    assert spec.ground_energy == pytest.approx(golden["fci_energy"], abs=1e-12)


def test_spin_relabeling_preserves_spectrum(h2, h2_spectrum):
    from qsim import build_hamiltonian

    # swap alpha and beta: 1<->2, 3<->4
    perm = {1: 2, 2: 1, 3: 4, 4: 3}
    t = IntegralTable(4, {perm[p]: s for p, s in h2.spin.items()},
                      {(perm[p], perm[q]): v for (p, q), v in h2.h1.items()},
                      {tuple(perm[k] for k in idx): v for idx, v in h2.h2.items()})
    np.testing.assert_allclose(diagonalize(build_hamiltonian(t)).eigenvalues, h2_spectrum.eigenvalues, atol=1e-12)


def test_non_hermitian_rejected():
    with pytest.raises(NonHermitianError):
        diagonalize(PauliSum(1, {"X": 1j}))


# --------------------------------------------------------------------------
# Trotter error


def test_commuting_only_has_no_trotter_error():
    t = IntegralTable(2, {1: "a", 2: "b"}, {(1, 1): -0.5, (2, 2): 0.2},
                      {(1, 2, 2, 1): 0.4, (2, 1, 1, 2): 0.4})
    g = group_hamiltonian(t)
    for metric in ("operator_norm", "ground_energy"):
        assert trotter_error(g, 1.0, 0.1, 1, metric) < 1e-12


def test_h2_error_decreases(h2_grouped):
    errs = [trotter_error(h2_grouped, 1.0, dt, 1) for dt in (0.4, 0.2, 0.1, 0.05, 0.025)]
    assert all(b <= a * 1.05 for a, b in zip(errs, errs[1:]))


def test_trotter_unitary_equals_circuit(h2_grouped):
    for t, dt, order in ((1.0, 0.3, 1), (0.5, 0.2, 2)):
        np.testing.assert_allclose(trotter_unitary(h2_grouped, t, dt, order),
                                   circuit_unitary(trotter_compile(h2_grouped, t, dt, order)), atol=1e-12)


def test_threshold_reachable(h2_grouped):
    errs = [trotter_error(h2_grouped, 1.0, dt, 1, "ground_energy") for dt in (0.1, 0.05, 0.025)]
    assert min(errs) < 1e-4


def test_effective_energy_of_exact_propagator(h2_ham, h2_spectrum):
    e = effective_ground_energy(exact_propagator(h2_ham, 1.0), h2_spectrum, 1.0)
    assert e == pytest.approx(h2_spectrum.ground_energy, abs=1e-12)


def test_particle_number_conserved(h2_grouped, h2_spectrum):
    n_op = sum((PauliSum(4, {"IIII": 0.5, "".join("Z" if k == p else "I" for k in range(4)): -0.5})
                for p in range(4)), PauliSum.zero(4))
    psi = StateVector.basis(4, "1100")
    before = psi.expectation(n_op)
    psi = run_circuit(psi, trotter_compile(h2_grouped, 2.0, 0.2))
    assert psi.expectation(n_op) == pytest.approx(before, abs=1e-8)
    mixed = StateVector(np.ones(16), normalize=True)
    after = run_circuit(mixed, trotter_compile(h2_grouped, 1.0, 0.1, 2))
    assert after.expectation(n_op) == pytest.approx(mixed.expectation(n_op), abs=1e-8)


def test_controlled_run_preserves_norm(h2_grouped):
    c = controlled_system(trotter_compile(h2_grouped, 0.5, 0.1))
    s = run_circuit(StateVector(np.ones(32), normalize=True), c)
    assert abs(s.norm() - 1) < 1e-10
