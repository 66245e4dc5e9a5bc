"""
From integrals to qubits: the H2 Hamiltonian
=============================================

Load the bundled minimal-basis H2 integrals, map them to a Pauli sum with
the Jordan-Wigner encoding, and look at the spectrum.
"""

# %%
# The integrals file lists one- and two-electron terms; symmetric partners
# are filled in on load.
import numpy as np

from qsim import build_hamiltonian, diagonalize, group_hamiltonian, h2_table

table = h2_table()
print("spin orbitals:", table.n_spin_orbitals, "spins:", table.spin)
print("h11 =", table.one(1, 1), " h1221 =", table.two(1, 2, 2, 1))

# %%
# Lowering gives a 4-qubit Pauli sum.  Qubit 0 holds orbital 1.
h = build_hamiltonian(table)
for string, coeff in sorted(h.items(), key=lambda kv: str(kv[0])):
    print(f"{str(string)}  {coeff.real:+.6f}")

# %%
# The grouped form collects commuting diagonal pieces into a few constants.
g = group_hamiltonian(table)
print("Theta   =", round(g.theta_cap, 6))
print("theta_p =", {p: round(v, 6) for p, v in g.theta_p.items()})
print("eta_pq  =", {k: round(v, 6) for k, v in g.eta.items()})

# %%
# Exact diagonalization: the ground state lives in the two-electron sector
# and is dominated by the Hartree-Fock determinant |1100>.
spec = diagonalize(h)
print("ground energy:", spec.ground_energy)
psi0 = spec.eigenvectors[:, 0]
top = np.argsort(-np.abs(psi0))[:2]
for idx in top:
    print(f"  |{idx:04b}>  amplitude {psi0[idx].real:+.6f}")
