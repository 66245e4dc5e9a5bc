"""Second-quantized Hamiltonians and their Jordan-Wigner lowering.

Orbital indices are 1-based and spin orbital ``p`` lives on qubit ``p``.
The annihilator is ``I^(p-1) (x) sigma+ (x) Z^(n-p)`` with
``sigma+ = (X + iY)/2 = |0><1|``; ``|1>`` marks an occupied orbital.

Two routes produce Pauli sums and are kept independent of each other:
the generic route multiplies lowered ladder operators (:func:`jw_lower_term`,
:func:`build_hamiltonian`), the template route writes the closed-form Pauli
expansion of each operator class directly (:func:`template_lower`,
:func:`lower_grouped`).
"""

from __future__ import annotations

import io
import itertools
import math
import os
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Iterable, TextIO

from .errors import ContractError, DimensionError, NonHermitianError, ParseError
from .pauli import PauliString, PauliSum, sum_mul

CREATE = "create"
ANNIHILATE = "annihilate"

SYMMETRY_TOL = 1e-12


# --------------------------------------------------------------------------
# integral tables


def pair_swap(idx):
    """``h_pqrs -> h_qpsr``: relabel the two electrons."""
    p, q, r, s = idx
    return (q, p, s, r)


def real8_orbit(idx) -> set[tuple[int, int, int, int]]:
    """All index tuples equal to ``idx`` for real orbitals.

    ``h_pqrs`` pairs ``p`` with ``s`` (electron 1) and ``q`` with ``r``
    (electron 2); real orbitals allow swapping within each pair and swapping
    the pairs.
    """
    gens = (
        pair_swap,
        lambda t: (t[3], t[1], t[2], t[0]),
        lambda t: (t[0], t[2], t[1], t[3]),
    )
    orbit = {tuple(idx)}
    frontier = [tuple(idx)]
    while frontier:
        t = frontier.pop()
        for g in gens:
            u = g(t)
            if u not in orbit:
                orbit.add(u)
                frontier.append(u)
    return orbit


@dataclass
class IntegralTable:
    """One- and two-electron integrals over spin orbitals (atomic units).

    ``h2`` is stored in ``h_pqrs`` order, meaning
    ``integral chi_p*(1) chi_q*(2) chi_r(2) chi_s(1) / r12``.  Missing
    entries are zero.
    """

    n_spin_orbitals: int
    spin: dict[int, str] = field(default_factory=dict)
    h1: dict[tuple[int, int], float] = field(default_factory=dict)
    h2: dict[tuple[int, int, int, int], float] = field(default_factory=dict)
    energy_shift: float = 0.0

    def __post_init__(self):
        n = self.n_spin_orbitals
        if n < 1:
            raise ContractError("n_spin_orbitals must be positive")
        for p in range(1, n + 1):
            self.spin.setdefault(p, "a" if p % 2 else "b")
        for key in list(self.h1) + list(self.h2):
            if any(not 1 <= k <= n for k in key):
                raise ContractError(f"index {key} outside 1..{n}")

    # spin helpers -----------------------------------------------------

    def delta(self, p: int, q: int) -> float:
        """Spin Kronecker delta."""
        return 1.0 if self.spin[p] == self.spin[q] else 0.0

    def one(self, p: int, q: int) -> float:
        return self.h1.get((p, q), 0.0)

    def two(self, p: int, q: int, r: int, s: int) -> float:
        return self.h2.get((p, q, r, s), 0.0)

    def one_allowed(self, p, q) -> float:
        """``h_pq`` with spin orthogonality applied."""
        return self.one(p, q) * self.delta(p, q)

    def two_allowed(self, p, q, r, s) -> float:
        """``h_pqrs`` with spin orthogonality applied (p~s, q~r)."""
        return self.two(p, q, r, s) * self.delta(p, s) * self.delta(q, r)

    # validation ---------------------------------------------------------

    def hermiticity_violation(self) -> float:
        """Largest ``|h_pq - h_qp|`` or ``|h_pqrs - h_srqp|``."""
        worst = 0.0
        for (p, q), v in self.h1.items():
            worst = max(worst, abs(v - self.one(q, p)))
        for (p, q, r, s), v in self.h2.items():
            worst = max(worst, abs(v - self.two(s, r, q, p)))
        return worst

    def check_hermitian(self, tol: float = SYMMETRY_TOL) -> None:
        bad = self.hermiticity_violation()
        if bad > tol:
            raise NonHermitianError(f"integral table is not Hermitian (violation {bad:.3g})")

    def check_pair_symmetry(self, tol: float = SYMMETRY_TOL) -> None:
        for idx, v in self.h2.items():
            if abs(v - self.h2.get(pair_swap(idx), 0.0)) > tol:
                raise ContractError(f"h{idx} != h{pair_swap(idx)}; table lacks symmetry completion")

    def with_symmetry(self, real8: bool = False) -> IntegralTable:
        """Copy with ``h_qp``, ``h_qpsr`` (and optionally the real 8-fold set) filled."""
        h1 = {}
        for (p, q), v in self.h1.items():
            h1[(p, q)] = v
            h1.setdefault((q, p), v)
        h2 = {}
        for idx, v in self.h2.items():
            orbit = real8_orbit(idx) if real8 else {idx, pair_swap(idx)}
            for t in orbit:
                h2.setdefault(t, v)
        return IntegralTable(self.n_spin_orbitals, dict(self.spin), h1, h2, self.energy_shift)


def load_integrals(stream: TextIO | str | os.PathLike) -> IntegralTable:
    """Parse an integrals file.

    Accepts an open text stream or a path.  Directives, one per line, with
    ``#`` starting a comment::

        norb <n>                      (required, first)
        spin <p> <a|b>
        eshift <real>
        h1 <p> <q> <real>
        h2 <p> <q> <r> <s> <real>
        symmetry real8
    """
    if isinstance(stream, (str, os.PathLike)):
        with open(stream, encoding="utf-8") as fh:
            return load_integrals(fh)

    n = None
    spin: dict[int, str] = {}
    shift = 0.0
    real8 = False
    raw1: list[tuple[int, tuple, float]] = []
    raw2: list[tuple[int, tuple, float]] = []

    def ints(tokens, lineno, count):
        if len(tokens) != count:
            raise ParseError(f"expected {count} fields, got {len(tokens)}", lineno)
        try:
            vals = [int(t) for t in tokens]
        except ValueError:
            raise ParseError(f"bad orbital index in {tokens}", lineno) from None
        for v in vals:
            if not 1 <= v <= n:
                raise ParseError(f"orbital index {v} outside 1..{n}", lineno)
        return tuple(vals)

    def real(token, lineno):
        try:
            value = float(token)
        except ValueError:
            raise ParseError(f"bad number {token!r}", lineno) from None
        if not math.isfinite(value):
            raise ParseError(f"non-finite value {token!r}", lineno)
        return value

    for lineno, line in enumerate(stream, start=1):
        tokens = line.split("#", 1)[0].split()
        if not tokens:
            continue
        key, args = tokens[0], tokens[1:]
        if n is None and key != "norb":
            raise ParseError("'norb' must be the first directive", lineno)
        if key == "norb":
            if n is not None:
                raise ParseError("duplicate 'norb'", lineno)
            if len(args) != 1 or not args[0].isdigit() or int(args[0]) < 1:
                raise ParseError("'norb' takes one positive integer", lineno)
            n = int(args[0])
        elif key == "spin":
            if len(args) != 2 or args[1] not in ("a", "b"):
                raise ParseError("usage: spin <p> <a|b>", lineno)
            (p,) = ints(args[:1], lineno, 1)
            if p in spin and spin[p] != args[1]:
                raise ParseError(f"conflicting spin for orbital {p}", lineno)
            spin[p] = args[1]
        elif key == "eshift":
            if len(args) != 1:
                raise ParseError("usage: eshift <real>", lineno)
            shift = real(args[0], lineno)
        elif key == "h1":
            if len(args) != 3:
                raise ParseError("usage: h1 <p> <q> <real>", lineno)
            raw1.append((lineno, ints(args[:2], lineno, 2), real(args[2], lineno)))
        elif key == "h2":
            if len(args) != 5:
                raise ParseError("usage: h2 <p> <q> <r> <s> <real>", lineno)
            raw2.append((lineno, ints(args[:4], lineno, 4), real(args[4], lineno)))
        elif key == "symmetry":
            if args != ["real8"]:
                raise ParseError(f"unknown symmetry {' '.join(args)!r}", lineno)
            real8 = True
        else:
            raise ParseError(f"unknown directive {key!r}", lineno)

    if n is None:
        raise ParseError("missing 'norb' directive")

    def fill(target, lineno, keys, value):
        for k in keys:
            old = target.get(k)
            if old is not None and abs(old - value) > SYMMETRY_TOL:
                raise ParseError(f"value {value} for {k} conflicts with {old}", lineno)
            target[k] = value

    h1: dict = {}
    for lineno, (p, q), v in raw1:
        fill(h1, lineno, {(p, q), (q, p)}, v)
    h2: dict = {}
    for lineno, idx, v in raw2:
        fill(h2, lineno, real8_orbit(idx) if real8 else {idx, pair_swap(idx)}, v)
    return IntegralTable(n, spin, h1, h2, shift)


def loads_integrals(text: str) -> IntegralTable:
    return load_integrals(io.StringIO(text))


def bundled_path(name: str = "h2_sto3g_1.401.ints") -> str:
    return os.path.join(os.path.dirname(__file__), "data", name)


def h2_table() -> IntegralTable:
    """Minimal-basis H2 integrals at R = 1.401 bohr shipped with the package."""
    return load_integrals(bundled_path())


# --------------------------------------------------------------------------
# Jordan-Wigner lowering (generic route)


@dataclass(frozen=True)
class LadderTerm:
    """``coefficient * op_1 op_2 ...`` with ops as ``(orbital, kind)``."""

    coefficient: complex
    ops: tuple[tuple[int, str], ...]

    @classmethod
    def normal(cls, coefficient, creators: Iterable[int], annihilators: Iterable[int]) -> LadderTerm:
        ops = tuple((p, CREATE) for p in creators) + tuple((p, ANNIHILATE) for p in annihilators)
        return cls(coefficient, ops)

    def dagger(self) -> LadderTerm:
        flip = {CREATE: ANNIHILATE, ANNIHILATE: CREATE}
        ops = tuple((p, flip[k]) for p, k in reversed(self.ops))
        return LadderTerm(complex(self.coefficient).conjugate(), ops)


@lru_cache(maxsize=None)
def jw_lower_ladder(op: tuple[int, str], n: int) -> PauliSum:
    """Pauli sum of a single creation or annihilation operator."""
    j, kind = op
    if not 1 <= j <= n:
        raise DimensionError(f"orbital {j} outside 1..{n}")
    if kind not in (CREATE, ANNIHILATE):
        raise ValueError(f"unknown ladder kind {kind!r}")
    head = "I" * (j - 1)
    tail = "Z" * (n - j)
    y = 0.5j if kind == ANNIHILATE else -0.5j
    return PauliSum(n, {head + "X" + tail: 0.5, head + "Y" + tail: y})


def jw_lower_term(term: LadderTerm, n: int) -> PauliSum:
    out = PauliSum.identity(n, term.coefficient)
    for op in term.ops:
        if not out:
            break
        out = sum_mul(out, jw_lower_ladder(tuple(op), n))
    return out


# --------------------------------------------------------------------------
# closed-form templates


def _zrange(lo: int, hi: int) -> dict[int, str]:
    """Z on orbitals strictly between lo and hi."""
    return {k: "Z" for k in range(min(lo, hi) + 1, max(lo, hi))}


def _excitation_pauli(n, p, q, h):
    """``h a+_p a_q + h.c.`` for p > q.

    Real part multiplies ``X_q X_p + Y_q Y_p``; imaginary part multiplies
    ``X_q Y_p - Y_q X_p``; both carry the Z-string strictly between q and p.
    """
    h = complex(h)
    terms = {}
    for lq, lp, c in (("X", "X", h.real / 2), ("Y", "Y", h.real / 2),
                      ("X", "Y", h.imag / 2), ("Y", "X", -h.imag / 2)):
        ops = _zrange(q, p)
        ops[q], ops[p] = lq, lp
        terms[PauliString.from_sparse(n, ops)] = c
    return PauliSum(n, terms)


def _double_phase(letters: str) -> complex:
    """Phase of ``sigma-_p sigma-_q sigma+_r sigma+_s`` on letter pattern (p,q,r,s)."""
    ph = 1 + 0j
    for i, c in enumerate(letters):
        if c == "Y":
            ph *= -1j if i < 2 else 1j
    return ph


def template_lower(kind: str, indices: tuple, coefficient: complex, n: int) -> PauliSum:
    """Closed-form Pauli expansion of one Hermitian operator class.

    ``kind`` and index convention (orbitals 1-based):

    * ``number``: ``(p,)``, ``h a+_p a_p``
    * ``excitation``: ``(p, q)`` with p > q, ``h a+_p a_q + h.c.``
    * ``coulomb``: ``(p, q)`` with p > q, ``h a+_p a+_q a_q a_p`` (h real)
    * ``number_excitation``: ``(p, q, r)`` with p > r and q distinct,
      ``h a+_p a+_q a_q a_r + h.c.``
    * ``double_excitation``: ``(p, q, r, s)`` with p > q > r > s,
      ``h a+_p a+_q a_r a_s + h.c.``
    """
    idx = tuple(indices)
    for k in idx:
        if not 1 <= k <= n:
            raise DimensionError(f"orbital {k} outside 1..{n}")
    h = complex(coefficient)

    if kind == "number":
        (p,) = idx
        return PauliSum(n, {PauliString.identity(n): h / 2,
                            PauliString.from_sparse(n, {p: "Z"}): -h / 2})

    if kind == "excitation":
        p, q = idx
        if not p > q:
            raise ContractError(f"excitation needs p > q, got {idx}")
        return _excitation_pauli(n, p, q, h)

    if kind == "coulomb":
        p, q = idx
        if not p > q:
            raise ContractError(f"coulomb needs p > q, got {idx}")
        return PauliSum(n, {
            PauliString.identity(n): h / 4,
            PauliString.from_sparse(n, {p: "Z"}): -h / 4,
            PauliString.from_sparse(n, {q: "Z"}): -h / 4,
            PauliString.from_sparse(n, {p: "Z", q: "Z"}): h / 4,
        })

    if kind == "number_excitation":
        p, q, r = idx
        if not p > r or q in (p, r):
            raise ContractError(f"number_excitation needs p > r and q distinct, got {idx}")
        # n_q (h a+_p a_r + h.c.); Z_q either extends or cancels the Z-string
        number = PauliSum(n, {PauliString.identity(n): 0.5,
                              PauliString.from_sparse(n, {q: "Z"}): -0.5})
        base = _excitation_pauli(n, p, r, h)
        return base * number

    if kind == "double_excitation":
        p, q, r, s = idx
        if not p > q > r > s:
            raise ContractError(f"double_excitation needs p > q > r > s, got {idx}")
        terms = {}
        zs = {**_zrange(s, r), **_zrange(q, p)}
        for letters in itertools.product("XY", repeat=4):
            letters = "".join(letters)
            c = -(h * _double_phase(letters)).real / 8
            terms[PauliString.from_sparse(n, {**zs, p: letters[0], q: letters[1],
                                              r: letters[2], s: letters[3]})] = c
        return PauliSum(n, terms)

    raise ValueError(f"unknown template kind {kind!r}")


def template_ladder(kind: str, indices: tuple, coefficient: complex) -> list[LadderTerm]:
    """The ladder-operator terms a template row stands for."""
    h = complex(coefficient)
    idx = tuple(indices)
    if kind == "number":
        (p,) = idx
        return [LadderTerm.normal(h, [p], [p])]
    if kind == "excitation":
        p, q = idx
        t = LadderTerm.normal(h, [p], [q])
        return [t, t.dagger()]
    if kind == "coulomb":
        p, q = idx
        return [LadderTerm.normal(h, [p, q], [q, p])]
    if kind == "number_excitation":
        p, q, r = idx
        t = LadderTerm.normal(h, [p, q], [q, r])
        return [t, t.dagger()]
    if kind == "double_excitation":
        p, q, r, s = idx
        t = LadderTerm.normal(h, [p, q], [r, s])
        return [t, t.dagger()]
    raise ValueError(f"unknown template kind {kind!r}")


# --------------------------------------------------------------------------
# full Hamiltonian


def build_hamiltonian(table: IntegralTable) -> PauliSum:
    """Generic JW lowering of ``sum h_pq a+_p a_q + 1/2 sum h_pqrs a+_p a+_q a_r a_s``.

    Integrals that violate spin orthogonality are dropped.  Raises
    :class:`NonHermitianError` when the table is not Hermitian.
    """
    table.check_hermitian()
    n = table.n_spin_orbitals
    out = PauliSum.identity(n, table.energy_shift)
    parts = [out]
    for (p, q) in sorted(table.h1):
        v = table.one_allowed(p, q)
        if v:
            parts.append(jw_lower_term(LadderTerm.normal(v, [p], [q]), n))
    for (p, q, r, s) in sorted(table.h2):
        v = table.two_allowed(p, q, r, s)
        if v and p != q and r != s:
            parts.append(jw_lower_term(LadderTerm.normal(0.5 * v, [p, q], [r, s]), n))
    total = PauliSum(n, [(k, c) for part in parts for k, c in part.terms.items()])
    if not total.is_hermitian(1e-12):
        raise NonHermitianError("lowered Hamiltonian has complex coefficients")
    return total.real()


# --------------------------------------------------------------------------
# grouped Hamiltonian


@dataclass(frozen=True)
class QuadrupleTerm:
    """All double excitations on four distinct orbitals ``p < q < r < s``.

    ``h1, h2, h3`` are the spin-adapted combinations that fix the signs of
    the eight even-XY Pauli strings the quadruple lowers to.
    """

    p: int
    q: int
    r: int
    s: int
    h1: float
    h2: float
    h3: float

    @property
    def indices(self):
        return (self.p, self.q, self.r, self.s)

    def pauli_coefficients(self) -> dict[str, float]:
        """Coefficient of each XY letter pattern on (p, q, r, s), zeros kept."""
        h1, h2, h3 = self.h1, self.h2, self.h3
        groups = {
            ("XXXX", "YYYY"): -h1 - h2 + h3,
            ("XXYY", "YYXX"): h1 - h2 + h3,
            ("YXYX", "XYXY"): -h1 - h2 - h3,
            ("YXXY", "XYYX"): -h1 + h2 + h3,
        }
        return {letters: c / 8 for pair, c in groups.items() for letters in pair}

    def pauli_strings(self, n: int) -> list[tuple[PauliString, float]]:
        zs = {**_zrange(self.p, self.q), **_zrange(self.r, self.s)}
        out = []
        for letters, c in self.pauli_coefficients().items():
            ops = {**zs, self.p: letters[0], self.q: letters[1], self.r: letters[2], self.s: letters[3]}
            out.append((PauliString.from_sparse(n, ops), c))
        return out


@dataclass
class GroupedHamiltonian:
    """Hamiltonian partitioned into the five template classes.

    ``coulomb_exchange_terms`` hold ``(p, q, h_pqqp - h_pqpq delta)`` for
    p < q; ``theta_cap``, ``theta_p`` and ``eta`` are that block rewritten as
    ``Theta I - 1/4 sum theta_p Z_p + sum eta_pq Z_p Z_q``.
    """

    n_spin_orbitals: int
    constant: float
    number_terms: list[tuple[int, float]]
    excitation_terms: list[tuple[int, int, float]]
    coulomb_exchange_terms: list[tuple[int, int, float]]
    number_excitation_terms: list[tuple[int, int, int, float]]
    double_excitation_terms: list[QuadrupleTerm]
    theta_cap: float
    theta_p: dict[int, float]
    eta: dict[tuple[int, int], float]

    def is_commuting_only(self) -> bool:
        return not (self.excitation_terms or self.number_excitation_terms
                    or self.double_excitation_terms)


def _pairwise_coulomb(t: IntegralTable, p: int, q: int) -> float:
    return t.two(p, q, q, p) - t.two(p, q, p, q) * t.delta(p, q)


def group_hamiltonian(table: IntegralTable) -> GroupedHamiltonian:
    """Partition the Hamiltonian into number, excitation, Coulomb/exchange,
    number-excitation and double-excitation classes."""
    table.check_hermitian()
    table.check_pair_symmetry()
    t = table
    n = t.n_spin_orbitals
    orbs = range(1, n + 1)

    number = [(p, t.one_allowed(p, p)) for p in orbs if t.one_allowed(p, p)]
    excitation = [
        (p, q, t.one_allowed(p, q))
        for p in orbs for q in orbs if p > q and t.one_allowed(p, q)
    ]

    coulomb = []
    for p in orbs:
        for q in orbs:
            if p < q:
                c = _pairwise_coulomb(t, p, q)
                if c:
                    coulomb.append((p, q, c))
    theta_cap = 0.25 * sum(_pairwise_coulomb(t, p, q) for p in orbs for q in orbs if p < q)
    theta_p = {p: sum(_pairwise_coulomb(t, p, q) for q in orbs if q != p) for p in orbs}
    eta = {(p, q): 0.25 * _pairwise_coulomb(t, p, q) for p in orbs for q in orbs if p < q}

    # n_q (c a+_p a_r + h.c.) with c = h_pqqr - h_pqrq, spin deltas applied
    number_excitation = []
    for p in orbs:
        for r in orbs:
            if p <= r:
                continue
            for q in orbs:
                if q in (p, r):
                    continue
                c = (t.two(p, q, q, r) * t.delta(p, r)
                     - t.two(p, q, r, q) * t.delta(p, q) * t.delta(q, r))
                if c:
                    number_excitation.append((p, q, r, c))

    doubles = []
    d = t.delta
    for p, q, r, s in itertools.combinations(orbs, 4):
        h1 = t.two(p, q, r, s) * d(p, s) * d(q, r) - t.two(q, p, r, s) * d(p, r) * d(q, s)
        h2 = t.two(p, s, q, r) * d(p, r) * d(q, s) - t.two(s, p, q, r) * d(p, q) * d(r, s)
        h3 = t.two(p, r, s, q) * d(p, q) * d(r, s) - t.two(p, r, q, s) * d(p, s) * d(q, r)
        if h1 or h2 or h3:
            doubles.append(QuadrupleTerm(p, q, r, s, h1, h2, h3))

    return GroupedHamiltonian(
        n_spin_orbitals=n,
        constant=t.energy_shift,
        number_terms=number,
        excitation_terms=excitation,
        coulomb_exchange_terms=coulomb,
        number_excitation_terms=number_excitation,
        double_excitation_terms=doubles,
        theta_cap=theta_cap,
        theta_p=theta_p,
        eta=eta,
    )


def coulomb_block_pauli(g: GroupedHamiltonian) -> PauliSum:
    """Number-number block as ``Theta I - 1/4 sum theta_p Z_p + sum eta_pq Z_p Z_q``."""
    n = g.n_spin_orbitals
    terms = [(PauliString.identity(n), g.theta_cap)]
    for p, th in g.theta_p.items():
        terms.append((PauliString.from_sparse(n, {p: "Z"}), -th / 4))
    for (p, q), e in g.eta.items():
        terms.append((PauliString.from_sparse(n, {p: "Z", q: "Z"}), e))
    return PauliSum(n, terms)


def lower_grouped(g: GroupedHamiltonian) -> PauliSum:
    """Pauli sum of a grouped Hamiltonian via the closed-form templates."""
    n = g.n_spin_orbitals
    parts = [PauliSum.identity(n, g.constant)]
    parts += [template_lower("number", (p,), h, n) for p, h in g.number_terms]
    parts += [template_lower("excitation", (p, q), h, n) for p, q, h in g.excitation_terms]
    parts.append(coulomb_block_pauli(g))
    parts += [template_lower("number_excitation", (p, q, r), c, n)
              for p, q, r, c in g.number_excitation_terms]
    for quad in g.double_excitation_terms:
        parts.append(PauliSum(n, quad.pauli_strings(n)))
    total = PauliSum(n, [(k, c) for part in parts for k, c in part.terms.items()])
    return total.real()
