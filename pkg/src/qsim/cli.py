"""``qsim`` command line: exact, compile, ipea, sweep and asp verbs.

Exit codes: 0 success, 1 usage, 2 unreadable or malformed input,
3 numeric contract violation, 4 sweep threshold not met.
"""

from __future__ import annotations

import argparse
import io
import json
import math
import sys

import numpy as np

from . import __version__
from .circuit import controlled_system, emit_h2_program, trotter_compile
from .errors import ContractError, NonHermitianError, ParseError, ResourceError
from .fermion import bundled_path, build_hamiltonian, group_hamiltonian, load_integrals
from .spectral import (
    ASP_MODES,
    AdiabaticSchedule,
    ExactProvider,
    RepetitionProvider,
    adiabatic_evolve,
    default_window,
    ipea_run,
    reference_state,
)
from .statevector import (
    TROTTER_METRICS,
    StateVector,
    diagonalize,
    effective_ground_energy,
    trotter_unitary,
)

EXIT_OK, EXIT_USAGE, EXIT_PARSE, EXIT_NUMERIC, EXIT_THRESHOLD = 0, 1, 2, 3, 4
SWEEP_SCHEMA = "# qsim sweep v1"
ASP_SCHEMA = "# qsim asp v1"
DEFAULT_DT_GRID = "0.8,0.4,0.2,0.1,0.05,0.025,0.0125,0.00625"


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{self.prog}: {message}")


def fmt(x: float) -> str:
    return f"{x:.17g}"


def _emit(text: str, out: str | None):
    if out:
        with open(out, "w", newline="\n") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _positive(name):
    def conv(value):
        try:
            x = float(value)
        except ValueError:
            raise argparse.ArgumentTypeError(f"{name} must be a number, got {value!r}")
        if not x > 0 or not math.isfinite(x):
            raise argparse.ArgumentTypeError(f"{name} must be positive, got {value!r}")
        return x
    return conv


def _nonnegative(name):
    def conv(value):
        try:
            x = float(value)
        except ValueError:
            raise argparse.ArgumentTypeError(f"{name} must be a number, got {value!r}")
        if x < 0 or not math.isfinite(x):
            raise argparse.ArgumentTypeError(f"{name} must be non-negative, got {value!r}")
        return x
    return conv


def _load(args):
    return load_integrals(args.integrals)


# --------------------------------------------------------------------------
# verbs


def cmd_exact(args) -> int:
    table = _load(args)
    h = build_hamiltonian(table)
    spec = diagonalize(h)
    ground = spec.eigenvectors[:, 0]
    n = table.n_spin_orbitals
    occupations = []
    for q in range(n):
        mask = 1 << (n - 1 - q)
        occupations.append(float(sum(abs(a) ** 2 for i, a in enumerate(ground) if i & mask)))
    report = {
        "n_spin_orbitals": n,
        "eigenvalues": [float(e) for e in spec.eigenvalues],
        "ground_energy": spec.ground_energy,
        "gap": spec.gap()[0],
        "ground_occupations": occupations,
    }
    text = json.dumps(report, indent=2) + "\n"
    if args.out:
        _emit(text, args.out)
    if args.json:
        sys.stdout.write(text)
    else:
        print(f"ground energy  {fmt(spec.ground_energy)}")
        print("eigenvalues")
        for e in spec.eigenvalues:
            print(f"  {fmt(e)}")
        print("ground occupations  " + " ".join(f"{o:.6f}" for o in occupations))
    return EXIT_OK


def cmd_compile(args) -> int:
    table = _load(args)
    if args.appendix:
        circuit = emit_h2_program(table, args.dt)
    else:
        time = args.dt if args.time is None else args.time
        circuit = trotter_compile(group_hamiltonian(table), time, args.dt, args.order)
        if args.controlled:
            circuit = controlled_system(circuit)
    text = circuit.to_json(indent=1 if args.out else None) + "\n"
    _emit(text, args.out)
    if args.out:
        print(f"wrote {circuit.gate_count} gates on {circuit.n_qubits} qubits to {args.out}")
    return EXIT_OK


def _load_state(path: str, n: int) -> StateVector:
    with open(path) as fh:
        data = json.load(fh)
    amps = data["amplitudes"] if isinstance(data, dict) else data
    vec = np.array([complex(a[0], a[1]) if isinstance(a, list) else complex(a) for a in amps])
    return StateVector(vec, n_qubits=n, normalize=True)


def cmd_ipea(args) -> int:
    if args.bits < 1:
        raise UsageError("ipea: --bits must be at least 1")
    table = _load(args)
    n = table.n_spin_orbitals
    h = build_hamiltonian(table)
    spec = diagonalize(h)
    window = default_window(h, args.margin)
    if args.state == "exact":
        state = spec.ground_state
    elif args.state == "hf":
        state = reference_state(h)
    else:
        if not args.state_file:
            raise UsageError("ipea: --state file needs --state-file PATH")
        state = _load_state(args.state_file, n)

    if args.provider == "exact":
        provider = ExactProvider(h, window.t0)
    else:
        g = group_hamiltonian(table)
        provider = RepetitionProvider(controlled_system(trotter_compile(g, window.t0, args.dt, args.order)),
                                      cache_unitary=not args.gate_stream)
    record = ipea_run(provider, state, args.bits, window, args.seed)
    report = record.to_dict()
    report.update({"provider": args.provider, "state": args.state, "seed": args.seed,
                   "exact_energy": spec.ground_energy,
                   "abs_error": abs(record.energy - spec.ground_energy),
                   "resolution": window.omega * 2.0 ** -args.bits})
    if args.provider == "circuit":
        report.update({"dt": args.dt, "order": args.order})
    text = json.dumps(report, indent=2) + "\n"
    if args.out:
        _emit(text, args.out)
    if args.json:
        sys.stdout.write(text)
    else:
        print(f"bits        {record.bitstring}")
        print(f"phi         {fmt(record.phi)}")
        print(f"energy      {fmt(record.energy)}")
        print(f"window      omega={fmt(window.omega)} K={window.K} E_s={fmt(window.e_shift)} t0={fmt(window.t0)}")
        print(f"exact       {fmt(spec.ground_energy)}")
        print(f"abs error   {fmt(report['abs_error'])} (resolution {fmt(report['resolution'])})")
    return EXIT_OK


def _parse_grid(text: str) -> list[float]:
    try:
        grid = [float(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise UsageError(f"sweep: bad --dt-grid {text!r}")
    if not grid:
        raise UsageError("sweep: --dt-grid is empty")
    if any(not dt > 0 for dt in grid):
        raise UsageError("sweep: every dt must be positive")
    return sorted(set(grid), reverse=True)


def sweep_rows(table, grid, order, time):
    g = group_hamiltonian(table)
    spec = diagonalize(build_hamiltonian(table))
    rows = []
    for dt in grid:
        u = trotter_unitary(g, time, dt, order)
        circuit_meta = trotter_compile(g, time, dt, order).metadata
        estimate = effective_ground_energy(u, spec, time)
        rows.append({
            "trotter_number": circuit_meta["trotter_number"],
            "dt": dt,
            "gate_count": circuit_meta["gate_count"],
            "energy_estimate": estimate,
            "abs_error": abs(estimate - spec.ground_energy),
            "operator_norm": float(np.linalg.norm(u - spec.propagator(time), 2)),
        })
    return rows


SWEEP_COLUMNS = ("trotter_number", "dt", "gate_count", "energy_estimate", "abs_error", "operator_norm")


def cmd_sweep(args) -> int:
    grid = _parse_grid(args.dt_grid)
    table = _load(args)
    e0 = diagonalize(build_hamiltonian(table)).ground_energy
    if abs(e0 * args.time) >= math.pi:
        raise UsageError(f"sweep: |E0 t| = {abs(e0 * args.time):.3g} >= pi; choose a shorter --time")
    rows = sweep_rows(table, grid, args.order, args.time)
    key = "abs_error" if args.metric == "ground_energy" else "operator_norm"
    buf = io.StringIO()
    buf.write(f"{SWEEP_SCHEMA} order={args.order} time={fmt(args.time)} metric={args.metric}\n")
    buf.write(",".join(SWEEP_COLUMNS) + "\n")
    for r in rows:
        buf.write(",".join(str(r[c]) if isinstance(r[c], int) else fmt(r[c]) for c in SWEEP_COLUMNS) + "\n")
    _emit(buf.getvalue(), args.out)
    hit = next((r for r in rows if r[key] < args.threshold), None)
    dest = sys.stdout if args.out else sys.stderr
    if hit is None:
        print(f"threshold {args.threshold:g} on {key} not met on this grid", file=dest)
        return EXIT_THRESHOLD
    print(f"threshold {args.threshold:g} on {key} first met at dt={fmt(hit['dt'])} "
          f"(trotter number {hit['trotter_number']}, {hit['gate_count']} gates)", file=dest)
    return EXIT_OK


def cmd_asp(args) -> int:
    if args.steps < 1:
        raise UsageError("asp: --steps must be at least 1")
    table = _load(args)
    h = build_hamiltonian(table)
    schedule = AdiabaticSchedule(args.T, args.steps)
    final, trace = adiabatic_evolve(h, schedule, args.dt_inner, args.mode)
    buf = io.StringIO()
    buf.write(f"{ASP_SCHEMA} T={fmt(args.T)} steps={args.steps} mode={args.mode}\n")
    buf.write("s,overlap,gap,degenerate\n")
    for p in trace:
        buf.write(f"{fmt(p.s)},{fmt(p.overlap)},{fmt(p.gap)},{int(p.degenerate)}\n")
    _emit(buf.getvalue(), args.out)
    dest = sys.stdout if args.out else sys.stderr
    min_gap = min(p.gap for p in trace)
    print(f"final overlap {fmt(trace[-1].overlap)}  min gap {fmt(min_gap)}", file=dest)
    return EXIT_OK


# --------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    common = _Parser(add_help=False)
    common.add_argument("--integrals", default=bundled_path(),
                        help="integrals file (default: bundled H2 at 1.401 bohr)")
    common.add_argument("--seed", type=int, default=0, help="RNG seed (default 0)")
    common.add_argument("--out", help="write the artifact to this path")
    common.add_argument("--json", action="store_true", help="print the JSON report")

    parser = _Parser(prog="qsim", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"qsim {__version__}")
    sub = parser.add_subparsers(dest="verb", required=True, parser_class=_Parser)

    p = sub.add_parser("exact", parents=[common], help="diagonalize the Hamiltonian")
    p.set_defaults(func=cmd_exact)

    p = sub.add_parser("compile", parents=[common], help="emit a Trotter circuit as JSON")
    p.add_argument("--order", type=int, choices=(1, 2), default=1)
    p.add_argument("--dt", type=_positive("--dt"), default=0.1)
    p.add_argument("--time", type=_nonnegative("--time"), help="total time (default: one slice)")
    p.add_argument("--controlled", action="store_true",
                   help="shift the system up one qubit and control on qubit 0")
    p.add_argument("--appendix", action="store_true",
                   help="emit the explicit controlled H2 listing for one slice of --dt")
    p.set_defaults(func=cmd_compile)

    p = sub.add_parser("ipea", parents=[common], help="iterative phase estimation")
    p.add_argument("--bits", type=int, default=10)
    p.add_argument("--state", choices=("hf", "exact", "file"), default="exact")
    p.add_argument("--state-file", help="JSON list of [re, im] amplitudes")
    p.add_argument("--provider", choices=("exact", "circuit"), default="exact",
                   help="exact propagator or compiled Trotter circuits")
    p.add_argument("--dt", type=_positive("--dt"), default=0.01)
    p.add_argument("--order", type=int, choices=(1, 2), default=1)
    p.add_argument("--margin", type=_nonnegative("--margin"), default=0.1)
    p.add_argument("--gate-stream", action="store_true",
                   help="simulate every repeated gate instead of caching the slice unitary")
    p.set_defaults(func=cmd_ipea)

    p = sub.add_parser("sweep", parents=[common], help="Trotter error versus time step")
    p.add_argument("--dt-grid", default=DEFAULT_DT_GRID, help="comma-separated time steps")
    p.add_argument("--order", type=int, choices=(1, 2), default=1)
    p.add_argument("--metric", choices=TROTTER_METRICS, default="ground_energy")
    p.add_argument("--threshold", type=_positive("--threshold"), default=1e-4)
    p.add_argument("--time", type=_positive("--time"), default=1.0)
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("asp", parents=[common], help="adiabatic state preparation")
    p.add_argument("--T", type=_nonnegative("--T"), default=50.0)
    p.add_argument("--steps", type=int, default=200)
    p.add_argument("--mode", choices=ASP_MODES, default="oracle")
    p.add_argument("--dt-inner", type=_positive("--dt-inner"))
    p.set_defaults(func=cmd_asp)
    return parser


def main(argv=None) -> int:
    try:
        args = build_parser().parse_args(argv)
        return args.func(args)
    except UsageError as exc:
        print(exc, file=sys.stderr)
        return EXIT_USAGE
    except ParseError as exc:
        print(f"qsim: parse error: {exc}", file=sys.stderr)
        return EXIT_PARSE
    except OSError as exc:
        print(f"qsim: {exc}", file=sys.stderr)
        return EXIT_PARSE
    except (NonHermitianError, ContractError, ResourceError) as exc:
        print(f"qsim: {exc}", file=sys.stderr)
        return EXIT_NUMERIC


if __name__ == "__main__":
    sys.exit(main())
