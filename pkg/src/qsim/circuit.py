"""Gate-level IR and the lowering of Hamiltonian terms to circuits.

Qubits are 0-based.  Uncontrolled system circuits put spin orbital ``p`` on
qubit ``p - 1``; phase-estimation circuits shift the system up by one and use
qubit 0 as the register (see :meth:`Circuit.shifted` and :func:`controlize`).

Every emitted block implements ``exp(-i h dt)`` of its term exactly,
global phase included, so Trotter error comes only from ordering.
"""

from __future__ import annotations

import cmath
import json
import math
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

from .errors import ContractError, DimensionError
from .fermion import GroupedHamiltonian, IntegralTable, _double_phase, group_hamiltonian
from .pauli import PauliString, PauliSum

HADAMARD = "Hadamard"
YBASIS = "Ybasis"
YBASIS_DAG = "YbasisDagger"
RX = "Rx"
RZ = "Rz"
TPHASE = "Tphase"
GLOBAL_PHASE = "GlobalPhase"
CNOT = "CNOT"

GATE_KINDS = (HADAMARD, YBASIS, YBASIS_DAG, RX, RZ, TPHASE, GLOBAL_PHASE, CNOT)
PARAMETRIC = (RX, RZ, TPHASE, GLOBAL_PHASE)
# gates whose angle carries the evolution time; these become controlled
PHASE_BEARING = (RZ, TPHASE, GLOBAL_PHASE)

_SQ2 = 1 / math.sqrt(2)


@dataclass(frozen=True)
class Gate:
    kind: str
    target: int
    control: int | None = None
    param: float | None = None

    def __post_init__(self):
        if self.kind not in GATE_KINDS:
            raise ValueError(f"unknown gate kind {self.kind!r}")
        if self.kind in PARAMETRIC:
            if self.param is None or not math.isfinite(self.param):
                raise ValueError(f"{self.kind} needs a finite parameter")
        elif self.param is not None:
            raise ValueError(f"{self.kind} takes no parameter")
        if self.kind == CNOT and self.control is None:
            raise ValueError("CNOT needs a control qubit")
        if self.control is not None and self.control == self.target:
            raise ValueError("target and control must differ")

    @property
    def qubits(self) -> tuple[int, ...]:
        return (self.target,) if self.control is None else (self.control, self.target)

    def inverse(self) -> Gate:
        if self.kind == YBASIS:
            return Gate(YBASIS_DAG, self.target, self.control)
        if self.kind == YBASIS_DAG:
            return Gate(YBASIS, self.target, self.control)
        if self.kind in PARAMETRIC:
            return Gate(self.kind, self.target, self.control, -self.param)
        return self

    def relabel(self, mapping) -> Gate:
        ctrl = None if self.control is None else mapping(self.control)
        return Gate(self.kind, mapping(self.target), ctrl, self.param)

    def to_dict(self) -> dict:
        return {"kind": self.kind, "target": self.target,
                "control": self.control, "param": self.param}

    @classmethod
    def from_dict(cls, d: dict) -> Gate:
        param = d.get("param")
        return cls(d["kind"], int(d["target"]),
                   None if d.get("control") is None else int(d["control"]),
                   None if param is None else float(param))


def base_matrix(g: Gate) -> np.ndarray:
    """2x2 matrix applied to the target (when the control, if any, is |1>)."""
    k, th = g.kind, g.param
    if k == HADAMARD:
        return np.array([[_SQ2, _SQ2], [_SQ2, -_SQ2]], dtype=complex)
    if k == YBASIS:
        return rx_matrix(-math.pi / 2)
    if k == YBASIS_DAG:
        return rx_matrix(math.pi / 2)
    if k == RX:
        return rx_matrix(th)
    if k == RZ:
        return np.diag([cmath.exp(-0.5j * th), cmath.exp(0.5j * th)])
    if k == TPHASE:
        return np.diag([1, cmath.exp(-1j * th)]).astype(complex)
    if k == GLOBAL_PHASE:
        return cmath.exp(-1j * th) * np.eye(2, dtype=complex)
    if k == CNOT:
        return np.array([[0, 1], [1, 0]], dtype=complex)
    raise ValueError(k)


def rx_matrix(theta: float) -> np.ndarray:
    c, s = math.cos(theta / 2), math.sin(theta / 2)
    return np.array([[c, -1j * s], [-1j * s, c]], dtype=complex)


def gate_matrix(g: Gate) -> np.ndarray:
    """2x2 matrix, or 4x4 on (control, target) with the control leftmost."""
    u = base_matrix(g)
    if g.control is None:
        return u
    out = np.zeros((4, 4), dtype=complex)
    out[:2, :2] = np.eye(2)
    out[2:, 2:] = u
    return out


@dataclass(frozen=True)
class Circuit:
    n_qubits: int
    gates: tuple[Gate, ...] = ()
    metadata: dict = field(default_factory=dict, compare=False)

    def __post_init__(self):
        object.__setattr__(self, "gates", tuple(self.gates))
        for g in self.gates:
            for q in g.qubits:
                if not 0 <= q < self.n_qubits:
                    raise DimensionError(f"{g} touches qubit {q} outside 0..{self.n_qubits - 1}")

    def __len__(self):
        return len(self.gates)

    def __iter__(self):
        return iter(self.gates)

    @property
    def gate_count(self) -> int:
        return len(self.gates)

    def __add__(self, other: Circuit) -> Circuit:
        if other.n_qubits != self.n_qubits:
            raise DimensionError("circuits act on different qubit counts")
        return Circuit(self.n_qubits, self.gates + other.gates)

    def repeated(self, times: int) -> Circuit:
        return Circuit(self.n_qubits, self.gates * times, dict(self.metadata))

    def inverse(self) -> Circuit:
        return Circuit(self.n_qubits, tuple(g.inverse() for g in reversed(self.gates)))

    def shifted(self, offset: int = 1) -> Circuit:
        """Relabel qubit ``q`` as ``q + offset`` and widen the register."""
        return Circuit(self.n_qubits + offset,
                       tuple(g.relabel(lambda q: q + offset) for g in self.gates),
                       dict(self.metadata))

    def used_qubits(self) -> set[int]:
        return {q for g in self.gates for q in g.qubits}

    def to_dict(self) -> dict:
        return {"n_qubits": self.n_qubits,
                "gates": [g.to_dict() for g in self.gates],
                "metadata": self.metadata}

    @classmethod
    def from_dict(cls, d: dict) -> Circuit:
        return cls(int(d["n_qubits"]), tuple(Gate.from_dict(g) for g in d["gates"]),
                   dict(d.get("metadata", {})))

    def to_json(self, **kwargs) -> str:
        return json.dumps(self.to_dict(), **kwargs)

    @classmethod
    def from_json(cls, text: str) -> Circuit:
        return cls.from_dict(json.loads(text))


def _concat(n: int, blocks: Iterable[Iterable[Gate]]) -> list[Gate]:
    return [g for b in blocks for g in b]


# --------------------------------------------------------------------------
# primitives


def zstring_gates(qubits: Sequence[int], theta: float) -> list[Gate]:
    qubits = list(qubits)
    if not qubits:
        raise ContractError("a Z-string needs at least one qubit")
    if len(set(qubits)) != len(qubits):
        raise ContractError(f"duplicate qubits in {qubits}")
    ladder = [Gate(CNOT, qubits[i + 1], qubits[i]) for i in range(len(qubits) - 1)]
    return ladder + [Gate(RZ, qubits[-1], None, theta)] + ladder[::-1]


def emit_zstring(qubits: Sequence[int], theta: float, n_qubits: int | None = None) -> Circuit:
    """``exp(-i theta/2 Z...Z)`` on ``qubits`` by a CNOT ladder around one Rz."""
    gates = zstring_gates(qubits, theta)
    n = n_qubits if n_qubits is not None else max(qubits) + 1
    return Circuit(n, gates)


def pauli_rotation_gates(string: PauliString, theta: float,
                         y_pre: str = YBASIS) -> list[Gate]:
    """``exp(-i theta/2 P)`` for one Pauli string (qubit i <-> letter i).

    X letters are rotated with Hadamards.  Y letters use ``y_pre`` before and
    its inverse after; because ``Ybasis^dag Z Ybasis = -Y`` each Ybasis
    pre-rotation flips the sign of the angle.
    """
    support = string.support
    if not support:
        return [Gate(GLOBAL_PHASE, 0, None, theta / 2)]
    pre, sign = [], 1.0
    for q in support:
        c = string.letters[q]
        if c == "X":
            pre.append(Gate(HADAMARD, q))
        elif c == "Y":
            pre.append(Gate(y_pre, q))
            if y_pre == YBASIS:
                sign = -sign
    post = [g.inverse() for g in reversed(pre)]
    return pre + zstring_gates(support, sign * theta) + post


def pauli_exponential_gates(terms: Iterable[tuple[PauliString, float]], tau: float) -> list[Gate]:
    """``prod exp(-i tau c P)`` in the given order (exact only for commuting terms)."""
    gates = []
    for s, c in terms:
        if c == 0:
            continue
        gates += pauli_rotation_gates(s, 2 * c * tau)
    return gates


def _phase_split(theta: complex) -> tuple[float, float]:
    theta = complex(theta)
    if theta.imag == 0:
        return theta.real, 0.0
    return abs(theta), cmath.phase(theta)


def _wrap_phase(gates: list[Gate], qubit: int, phi: float) -> list[Gate]:
    """Conjugate a block by ``exp(i phi n_qubit)``, turning a real coefficient complex."""
    if phi == 0:
        return gates
    return [Gate(TPHASE, qubit, None, phi)] + gates + [Gate(TPHASE, qubit, None, -phi)]


# canonical quadruplet order (M1, M2, M3, M4) for p > q > r > s
QUADRUPLETS = ("HHHH", "YYYY", "HYHY", "YHYH", "YYHH", "HHYY", "YHHY", "HYYH")


def _letters_from_basis(m: str) -> str:
    return m.replace("H", "X")


def _ladder_block(n, ops: dict[int, str], theta: float) -> list[Gate]:
    """Rotation for a sparse 1-based ``{orbital: letter}`` map, mapped to qubits."""
    return pauli_rotation_gates(PauliString.from_sparse(n, ops), theta)


def template_gates(kind: str, indices: tuple, theta: complex, n: int) -> list[Gate]:
    """Gates realizing ``exp(-i O)`` where ``O = template_lower(kind, indices, theta)``."""
    idx = tuple(indices)
    for k in idx:
        if not 1 <= k <= n:
            raise DimensionError(f"orbital {k} outside 1..{n}")

    if kind == "number":
        (p,) = idx
        theta = complex(theta)
        if theta.imag:
            raise ContractError("number term needs a real coefficient")
        return [Gate(TPHASE, p - 1, None, theta.real)]

    if kind == "coulomb":
        p, q = idx
        if not p > q:
            raise ContractError(f"coulomb needs p > q, got {idx}")
        theta = complex(theta)
        if theta.imag:
            raise ContractError("coulomb term needs a real coefficient")
        th = theta.real
        return [Gate(GLOBAL_PHASE, p - 1, None, th / 4),
                Gate(RZ, p - 1, None, -th / 2),
                Gate(RZ, q - 1, None, -th / 2)] + zstring_gates([q - 1, p - 1], th / 2)

    if kind == "excitation":
        p, q = idx
        if not p > q:
            raise ContractError(f"excitation needs p > q, got {idx}")
        mag, phi = _phase_split(theta)
        gates = []
        for m in "XY":
            ops = {k: "Z" for k in range(q + 1, p)}
            ops[q] = ops[p] = m
            gates += _ladder_block(n, ops, mag)
        return _wrap_phase(gates, p - 1, phi)

    if kind == "number_excitation":
        p, q, r = idx
        if not p > r or q in (p, r):
            raise ContractError(f"number_excitation needs p > r and q distinct, got {idx}")
        mag, phi = _phase_split(theta)
        gates = []
        for m in "XY":
            ops = {k: "Z" for k in range(r + 1, p)}
            ops[r] = ops[p] = m
            toggled = dict(ops)
            if q in toggled:
                del toggled[q]
            else:
                toggled[q] = "Z"
            gates += _ladder_block(n, ops, mag / 2)
            gates += _ladder_block(n, toggled, -mag / 2)
        return _wrap_phase(gates, p - 1, phi)

    if kind == "double_excitation":
        p, q, r, s = idx
        if not p > q > r > s:
            raise ContractError(f"double_excitation needs p > q > r > s, got {idx}")
        mag, phi = _phase_split(theta)
        zs = {k: "Z" for k in list(range(s + 1, r)) + list(range(q + 1, p))}
        gates = []
        for m in QUADRUPLETS:
            letters = _letters_from_basis(m)
            # letter order is (p, q, r, s); odd-Y strings vanish for real mag
            c = -(mag * _double_phase(letters)).real / 8
            ops = {**zs, p: letters[0], q: letters[1], r: letters[2], s: letters[3]}
            gates += _ladder_block(n, ops, 2 * c)
        return _wrap_phase(gates, p - 1, phi)

    raise ValueError(f"unknown template kind {kind!r}")


def emit_template(kind: str, indices: tuple, theta: complex, n: int) -> Circuit:
    """Circuit for ``exp(-i theta O_kind)``; ``theta`` is coefficient times time.

    Orbital indices follow :func:`qsim.fermion.template_lower`.
    """
    return Circuit(n, template_gates(kind, indices, theta, n), {"template": kind, "indices": list(indices)})


# --------------------------------------------------------------------------
# Trotter compilation


def coulomb_block_gates(g: GroupedHamiltonian, tau: float) -> list[Gate]:
    """Number-number block: global phase, single-Z rotations, then ZZ pairs
    ordered (n-1, n), (n-2, n), ..., (1, 2)."""
    n = g.n_spin_orbitals
    gates = []
    if g.theta_cap:
        gates.append(Gate(GLOBAL_PHASE, 0, None, g.theta_cap * tau))
    for p in range(1, n + 1):
        th = g.theta_p.get(p, 0.0)
        if th:
            gates.append(Gate(RZ, p - 1, None, -th * tau / 2))
    for q in range(n, 1, -1):
        for p in range(q - 1, 0, -1):
            e = g.eta.get((p, q), 0.0)
            if e:
                gates += zstring_gates([p - 1, q - 1], 2 * e * tau)
    return gates


def quadruple_gates(quad, n: int, tau: float) -> list[Gate]:
    """The eight even-XY strings of one quadruple, in canonical quadruplet order."""
    coeffs = quad.pauli_coefficients()
    a, b, c, d = quad.indices
    zs = {k: "Z" for k in list(range(a + 1, b)) + list(range(c + 1, d))}
    gates = []
    for m in QUADRUPLETS:
        # M1 acts on the highest orbital d, M4 on the lowest a
        letters = _letters_from_basis(m)[::-1]
        coef = coeffs[letters]
        if abs(coef * tau) < 1e-15:
            continue
        ops = {**zs, a: letters[0], b: letters[1], c: letters[2], d: letters[3]}
        gates += _ladder_block(n, ops, 2 * coef * tau)
    return gates


def trotter_units(g: GroupedHamiltonian) -> list[tuple[str, callable]]:
    """Canonical term order as ``(label, tau -> gates)`` pairs."""
    n = g.n_spin_orbitals
    units = []
    if g.constant:
        units.append(("constant", lambda tau: [Gate(GLOBAL_PHASE, 0, None, g.constant * tau)]))
    for p, h in sorted(g.number_terms):
        units.append((f"number({p})", lambda tau, p=p, h=h: template_gates("number", (p,), h * tau, n)))
    if g.coulomb_exchange_terms:
        units.append(("coulomb_exchange", lambda tau: coulomb_block_gates(g, tau)))
    for p, q, r, c in g.number_excitation_terms:
        units.append((f"number_excitation({p},{q},{r})",
                      lambda tau, i=(p, q, r), c=c: template_gates("number_excitation", i, c * tau, n)))
    for p, q, h in g.excitation_terms:
        units.append((f"excitation({p},{q})",
                      lambda tau, i=(p, q), h=h: template_gates("excitation", i, h * tau, n)))
    for quad in g.double_excitation_terms:
        label = "double_excitation({},{},{},{})".format(*quad.indices)
        units.append((label, lambda tau, quad=quad: quadruple_gates(quad, n, tau)))
    return units


def slice_gates(g: GroupedHamiltonian, tau: float, order: int) -> tuple[list[Gate], list[dict]]:
    """One Trotter slice of length ``tau`` and its unit schedule."""
    units = trotter_units(g)
    if order == 1:
        plan = [(label, fn, tau) for label, fn in units]
    elif order == 2:
        if not units:
            plan = []
        else:
            head = [(label, fn, tau / 2) for label, fn in units[:-1]]
            last = units[-1]
            plan = head + [(last[0], last[1], tau)] + head[::-1]
    else:
        raise ContractError(f"Trotter order must be 1 or 2, got {order}")
    gates, schedule = [], []
    for label, fn, dt in plan:
        block = fn(dt)
        schedule.append({"unit": label, "dt": dt, "gates": len(block)})
        gates += block
    return gates, schedule


def trotter_plan(t: float, dt: float) -> tuple[int, float]:
    """Number of full slices and the remainder slice length."""
    if not dt > 0:
        raise ContractError(f"time step must be positive, got {dt}")
    if t < 0:
        raise ContractError(f"evolution time must be non-negative, got {t}")
    n_full = math.floor(t / dt + 1e-9)
    rem = t - n_full * dt
    if abs(rem) < 1e-12 * max(1.0, t):
        rem = 0.0
    return n_full, rem


def trotter_compile(g: GroupedHamiltonian | IntegralTable, t: float, dt: float, order: int = 1) -> Circuit:
    """Trotterized ``exp(-i H t)`` with slices of length ``dt``.

    ``floor(t/dt)`` full slices are followed by one shorter slice for any
    remainder.  Order 2 uses the palindromic half-step sequence.
    """
    if isinstance(g, IntegralTable):
        g = group_hamiltonian(g)
    n_full, rem = trotter_plan(t, dt)
    n = g.n_spin_orbitals
    gates: list[Gate] = []
    slices = []
    if n_full:
        body, schedule = slice_gates(g, dt, order)
        gates = body * n_full
        slices.append({"repeat": n_full, "dt": dt, "gates_per_slice": len(body), "units": schedule})
    if rem:
        body, schedule = slice_gates(g, rem, order)
        gates += body
        slices.append({"repeat": 1, "dt": rem, "gates_per_slice": len(body), "units": schedule})
    meta = {
        "time": t, "dt": dt, "order": order,
        "trotter_number": n_full + (1 if rem else 0),
        "full_slices": n_full, "remainder": rem,
        "gate_count": len(gates),
        "term_order": [label for label, _ in trotter_units(g)],
        "slices": slices,
    }
    return Circuit(n, gates, meta)


def compile_pauli_sum(h: PauliSum, t: float, dt: float, order: int = 1) -> Circuit:
    """Trotterize an arbitrary real Pauli sum, one rotation per string."""
    n_full, rem = trotter_plan(t, dt)
    terms = [(s, c.real) for s, c in h.items()]

    def one_slice(tau):
        if order == 1:
            return pauli_exponential_gates(terms, tau)
        if order == 2:
            if not terms:
                return []
            head = pauli_exponential_gates(terms[:-1], tau / 2)
            mid = pauli_exponential_gates(terms[-1:], tau)
            tail = pauli_exponential_gates(terms[-2::-1], tau / 2)
            return head + mid + tail
        raise ContractError(f"Trotter order must be 1 or 2, got {order}")

    gates = one_slice(dt) * n_full if n_full else []
    if rem:
        gates += one_slice(rem)
    return Circuit(h.n_qubits, gates, {"time": t, "dt": dt, "order": order, "gate_count": len(gates)})


# --------------------------------------------------------------------------
# controlled variants


def controlize(c: Circuit, register: int) -> Circuit:
    """Attach ``register`` as control to every Rz, Tphase and GlobalPhase.

    Basis changes and CNOTs stay uncontrolled; they come in mirrored pairs in
    every compiler-emitted block, so with the register in |0> they cancel.
    ``register`` may equal ``c.n_qubits`` to append a fresh qubit.
    """
    if register in c.used_qubits():
        raise ContractError(f"register qubit {register} is used by the circuit")
    n = max(c.n_qubits, register + 1)
    gates = []
    for g in c.gates:
        if g.kind in PHASE_BEARING:
            if g.control is not None:
                raise ContractError(f"{g} is already controlled")
            gates.append(Gate(g.kind, g.target, register, g.param))
        else:
            gates.append(g)
    meta = dict(c.metadata)
    meta["register"] = register
    return Circuit(n, gates, meta)


def controlled_system(c: Circuit) -> Circuit:
    """Shift a system circuit up by one qubit and control it on qubit 0."""
    return controlize(c.shifted(1), 0)


# --------------------------------------------------------------------------
# the explicit H2 program


def emit_h2_program(table: IntegralTable, dt: float, with_hadamard: bool = True) -> Circuit:
    """Single first-order slice of the H2 propagator, controlled on a register.

    Qubit 0 is the register and qubit ``p`` holds spin orbital ``p``.  The
    gate list follows the textbook listing block by block: single-electron
    controlled phases, the number-number block, then the XXYY, YYXX, XYYX
    and YXXY excitation blocks.  ``metadata["param_expr"]`` records each
    parameter symbolically.
    """
    if table.n_spin_orbitals != 4:
        raise ContractError(f"H2 program needs 4 spin orbitals, got {table.n_spin_orbitals}")
    g = group_hamiltonian(table)
    reg = 0
    t = dt
    gates: list[Gate] = []
    exprs: list[str | None] = []

    def add(gate, expr=None):
        gates.append(gate)
        exprs.append(expr)

    if with_hadamard:
        add(Gate(HADAMARD, reg))
    for p in range(1, 5):
        add(Gate(TPHASE, p, reg, table.one_allowed(p, p) * t), f"h{p}{p}*t")

    add(Gate(TPHASE, reg, None, g.theta_cap * t), "Theta*t")
    for p in range(1, 5):
        add(Gate(RZ, p, reg, -g.theta_p[p] * t / 2), f"-theta{p}*t/2")
    for q in range(4, 1, -1):
        for p in range(q - 1, 0, -1):
            add(Gate(CNOT, q, p))
            add(Gate(RZ, q, reg, 2 * g.eta[(p, q)] * t), f"2*n{p}{q}*t")
            add(Gate(CNOT, q, p))

    theta = table.two(1, 4, 2, 3) + table.two(1, 2, 4, 3)
    half = math.pi / 2
    # (pattern, pre-rotation order, post-rotation order, sign of the Rz angle)
    blocks = (
        ("XXYY", (1, 2, 3, 4), (4, 3, 2, 1), -1, -half),
        ("YYXX", (1, 2, 3, 4), (4, 3, 2, 1), -1, -half),
        ("XYYX", (1, 2, 3, 4), (4, 3, 2, 1), +1, -half),
        ("YXXY", (1, 2, 3, 4), (1, 2, 3, 4), +1, +half),
    )
    for pattern, pre_order, post_order, sign, y_angle in blocks:
        for q in pre_order:
            if pattern[q - 1] == "X":
                add(Gate(HADAMARD, q))
            else:
                add(Gate(RX, q, None, y_angle), "-pi/2" if y_angle < 0 else "pi/2")
        for q in (1, 2, 3):
            add(Gate(CNOT, q + 1, q))
        expr = "-t*(h1423+h1243)/4" if sign < 0 else "t*(h1423+h1243)/4"
        add(Gate(RZ, 4, reg, sign * t * theta / 4), expr)
        for q in (3, 2, 1):
            add(Gate(CNOT, q + 1, q))
        for q in post_order:
            if pattern[q - 1] == "X":
                add(Gate(HADAMARD, q))
            else:
                add(Gate(RX, q, None, -y_angle), "pi/2" if y_angle < 0 else "-pi/2")

    meta = {"program": "h2", "dt": dt, "register": reg, "param_expr": exprs,
            "gate_count": len(gates)}
    return Circuit(5, gates, meta)
