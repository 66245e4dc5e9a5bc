"""
Preparing the ground state adiabatically
========================================

Start in the Hartree-Fock determinant, the ground state of the diagonal
part of H, and slowly turn on the rest.
"""

# %%
import numpy as np

from qsim import build_hamiltonian, diagonalize, h2_table
from qsim.spectral import AdiabaticSchedule, adiabatic_evolve, build_path, minimum_gap, reference_state

h = build_hamiltonian(h2_table())
spec = diagonalize(h)
ground = spec.ground_state
print("HF overlap with the ground state:", reference_state(h).overlap(ground))

# %%
# The gap along H(s) = (1-s) H_HF + s H sets the time scale.
gap, where = minimum_gap(h)
print(f"minimum gap {gap:.6f} at s = {where:.3f}")
for s in np.linspace(0, 1, 5):
    print(f"  s={s:.2f}  gap {diagonalize(build_path(h, float(s))).gap()[0]:.6f}")

# %%
# Final overlap as the total time doubles.
for total in 2.0 ** np.arange(-2, 8):
    state, _ = adiabatic_evolve(h, AdiabaticSchedule(float(total), max(100, int(4 * total))))
    print(f"T = {total:7.2f}   overlap {state.overlap(ground):.6f}")

# %%
# The trace records overlap and instantaneous gap along the way.
_, trace = adiabatic_evolve(h, AdiabaticSchedule(50.0, 200))
for point in trace[::40]:
    print(f"  s={point.s:.3f}  overlap {point.overlap:.6f}  gap {point.gap:.6f}")
