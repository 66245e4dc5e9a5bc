"""
Reading the ground energy off a single register qubit
=====================================================

Iterative phase estimation: one register qubit, one bit per round, least
significant bit first, with feedback rotations from the bits already known.
"""

# %%
import collections

import numpy as np

from qsim import StateVector, build_hamiltonian, diagonalize, group_hamiltonian, h2_table, trotter_compile
from qsim.circuit import controlled_system
from qsim.spectral import ExactProvider, RepetitionProvider, default_window, encode_phase, ipea_run

table = h2_table()
h = build_hamiltonian(table)
spec = diagonalize(h)
window = default_window(h)
print("window:", window.to_dict())
print("exact phase x 1024:", encode_phase(spec.ground_energy, window) * 1024)

# %%
# Exact propagator, exact eigenstate, ten bits.
rec = ipea_run(ExactProvider(h, window.t0), spec.ground_state, 10, window, seed=0)
print("bits", rec.bitstring, "-> E =", rec.energy, " error", abs(rec.energy - spec.ground_energy))
print("resolution omega/2^10 =", window.omega / 1024)

# %%
# The phase is not a 10-bit fraction, so outcomes spread over neighbouring
# bins; the nearest one wins about four times in five.
provider = ExactProvider(h, window.t0)
counts = collections.Counter(round(ipea_run(provider, spec.ground_state, 10, window, s).phi * 1024)
                             for s in range(300))
for k, n in sorted(counts.items()):
    print(f"  bin {k:4d}: {'#' * (n // 3)} {n}")

# %%
# Same measurement with gates: a controlled first-order Trotter circuit for
# one unit of t0, repeated 2^k times in round k.
circuit = controlled_system(trotter_compile(group_hamiltonian(table), window.t0, window.t0 / 16, 1))
rec = ipea_run(RepetitionProvider(circuit, cache_unitary=True), spec.ground_state, 10, window, seed=0)
print("compiled:", rec.bitstring, "E =", rec.energy, " gates per call:", circuit.gate_count)

# %%
# A superposition collapses: each run reports one eigenvalue.
psi = np.sqrt(0.8) * spec.eigenvectors[:, 0] + np.sqrt(0.2) * spec.eigenvectors[:, 1]
state = StateVector(psi, normalize=True)
rng = np.random.default_rng(1)
energies = [ipea_run(provider, state, 10, window, rng).energy for _ in range(200)]
ground = sum(abs(e - spec.eigenvalues[0]) < abs(e - spec.eigenvalues[1]) for e in energies)
print(f"ground-energy outcomes: {ground}/200")
