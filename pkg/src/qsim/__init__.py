"""Simulate chemical Hamiltonians with Trotterized quantum circuits.

Typical flow::

    from qsim import h2_table, group_hamiltonian, trotter_compile
    table = h2_table()
    circuit = trotter_compile(group_hamiltonian(table), t=1.0, dt=0.1)
"""

from .errors import ContractError, DimensionError, NonHermitianError, ParseError, QsimError, ResourceError
from .pauli import PauliString, PauliSum, commutator, pauli_mul, to_matrix
from .fermion import (
    GroupedHamiltonian,
    IntegralTable,
    build_hamiltonian,
    group_hamiltonian,
    h2_table,
    jw_lower_ladder,
    load_integrals,
    loads_integrals,
    lower_grouped,
    template_lower,
)
from .circuit import Circuit, Gate, compile_pauli_sum, controlize, emit_h2_program, emit_template, emit_zstring, gate_matrix, trotter_compile
from .statevector import StateVector, apply_gate, circuit_unitary, diagonalize, exact_propagator, run_circuit, trotter_error

__version__ = "0.1.0"
