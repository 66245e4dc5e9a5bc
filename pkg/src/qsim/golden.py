"""Reference constants for the bundled H2 integrals.

The values in ``data/h2_golden.json`` are produced by :func:`compute_golden`
(exact diagonalization and the grouped Hamiltonian) and checked back
against it by the test suite.  Regenerate with ``python -m qsim.golden``.
"""

from __future__ import annotations

import json
from importlib import resources

from .fermion import build_hamiltonian, group_hamiltonian, h2_table
from .spectral import minimum_gap, reference_state
from .statevector import diagonalize

SCHEMA_VERSION = 1
GOLDEN_FILE = "h2_golden.json"


def compute_golden() -> dict:
    table = h2_table()
    g = group_hamiltonian(table)
    h = build_hamiltonian(table)
    spec = diagonalize(h)
    gap, gap_at = minimum_gap(h)
    return {
        "schema_version": SCHEMA_VERSION,
        "integrals": "h2_sto3g_1.401.ints",
        "fci_energy": spec.ground_energy,
        "first_excited_energy": float(spec.eigenvalues[1]),
        "spectrum": [float(e) for e in spec.eigenvalues],
        "hf_state": "1100",
        "hf_overlap": reference_state(h).overlap(spec.ground_state),
        "theta_cap": g.theta_cap,
        "theta_p": {str(p): v for p, v in sorted(g.theta_p.items())},
        "eta": {f"{p}{q}": v for (p, q), v in sorted(g.eta.items())},
        "min_gap": gap,
        "min_gap_s": gap_at,
    }


def load_golden() -> dict:
    text = resources.files("qsim").joinpath("data", GOLDEN_FILE).read_text()
    return json.loads(text)


def write_golden(path=None) -> str:
    data = compute_golden()
    if path is None:
        path = str(resources.files("qsim").joinpath("data", GOLDEN_FILE))
    with open(path, "w") as fh:
        json.dump(data, fh, indent=2)
        fh.write("\n")
    return path


if __name__ == "__main__":
    print(write_golden())
