"""
Trotter error against circuit size
==================================

Compile exp(-iHt) for H2 into gates at a range of time steps and compare
the resulting propagator with the exact one.
"""

# %%
import numpy as np

from qsim import group_hamiltonian, h2_table, trotter_compile
from qsim.cli import sweep_rows
from qsim.statevector import trotter_error

table = h2_table()
g = group_hamiltonian(table)

# %%
# One first-order slice, listed unit by unit.
c = trotter_compile(g, 0.1, 0.1, order=1)
print("gates per slice:", c.gate_count)
for unit in c.metadata["slices"][0]["units"]:
    print(" ", unit)

# %%
# Ground-energy error and gate count over a halving grid of time steps.
rows = sweep_rows(table, [0.8, 0.4, 0.2, 0.1, 0.05, 0.025, 0.0125], 1, 1.0)
print(f"{'N':>5} {'dt':>8} {'gates':>7} {'|dE|':>10}")
for r in rows:
    mark = "  <- below 1e-4" if r["abs_error"] < 1e-4 else ""
    print(f"{r['trotter_number']:5d} {r['dt']:8.5f} {r['gate_count']:7d} {r['abs_error']:10.3e}{mark}")

# %%
# Log-log slopes of the operator-norm error: first order ~1, second order ~2.
dts = np.logspace(-3, -1, 5)
for order in (1, 2):
    errs = [trotter_error(g, 1.0, float(dt), order) for dt in dts]
    slope = np.polyfit(np.log(dts), np.log(errs), 1)[0]
    print(f"order {order}: slope {slope:.3f}")
