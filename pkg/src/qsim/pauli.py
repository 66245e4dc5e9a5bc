"""Pauli strings, Pauli sums and their dense matrix realization.

Qubit 1 (index 0 in a letter string) is the leftmost tensor factor, so it
selects the most significant bit of a computational-basis index.  Bit value 1
of a qubit means ``|1>``.
"""

from __future__ import annotations

import os
from dataclasses import dataclass
from typing import Iterable, Mapping

import numpy as np

from .errors import DimensionError, ResourceError

PRUNE_TOL = 1e-14
DEFAULT_QUBIT_CAP = 12

_LETTERS = "IXYZ"

# single-qubit products: (a, b) -> (phase, letter) with a.b = phase * letter
_PRODUCT = {}
for _a in _LETTERS:
    _PRODUCT[("I", _a)] = (1, _a)
    _PRODUCT[(_a, "I")] = (1, _a)
    _PRODUCT[(_a, _a)] = (1, "I")
for _a, _b, _c in (("X", "Y", "Z"), ("Y", "Z", "X"), ("Z", "X", "Y")):
    _PRODUCT[(_a, _b)] = (1j, _c)
    _PRODUCT[(_b, _a)] = (-1j, _c)

PAULI_MATRICES = {
    "I": np.eye(2, dtype=complex),
    "X": np.array([[0, 1], [1, 0]], dtype=complex),
    "Y": np.array([[0, -1j], [1j, 0]], dtype=complex),
    "Z": np.array([[1, 0], [0, -1]], dtype=complex),
}


def qubit_cap() -> int:
    """Dense-matrix qubit cap, overridable through ``QSIM_QUBIT_CAP``."""
    value = os.environ.get("QSIM_QUBIT_CAP")
    return int(value) if value else DEFAULT_QUBIT_CAP


def check_cap(n_qubits: int, cap: int | None = None) -> None:
    cap = qubit_cap() if cap is None else cap
    if n_qubits > cap:
        raise ResourceError(f"{n_qubits} qubits exceeds the dense cap of {cap}")


@dataclass(frozen=True, order=True)
class PauliString:
    """Tensor product of single-qubit Paulis, e.g. ``PauliString("XZZI")``."""

    letters: str

    def __post_init__(self):
        if not self.letters:
            raise ValueError("a Pauli string needs at least one qubit")
        bad = set(self.letters) - set(_LETTERS)
        if bad:
            raise ValueError(f"unknown Pauli letters {sorted(bad)}")

    @classmethod
    def identity(cls, n_qubits: int) -> PauliString:
        return cls("I" * n_qubits)

    @classmethod
    def from_sparse(cls, n_qubits: int, ops: Mapping[int, str]) -> PauliString:
        """Build from ``{qubit (1-based): letter}``; unset qubits are I."""
        letters = ["I"] * n_qubits
        for qubit, letter in ops.items():
            if not 1 <= qubit <= n_qubits:
                raise DimensionError(f"qubit {qubit} outside 1..{n_qubits}")
            letters[qubit - 1] = letter
        return cls("".join(letters))

    @property
    def n_qubits(self) -> int:
        return len(self.letters)

    @property
    def support(self) -> tuple[int, ...]:
        """0-based qubits carrying a non-identity letter."""
        return tuple(i for i, c in enumerate(self.letters) if c != "I")

    def is_identity(self) -> bool:
        return set(self.letters) == {"I"}

    def is_diagonal(self) -> bool:
        return set(self.letters) <= {"I", "Z"}

    def commutes_with(self, other: PauliString) -> bool:
        clashes = sum(
            1 for a, b in zip(self.letters, other.letters)
            if a != "I" and b != "I" and a != b
        )
        return clashes % 2 == 0

    def masks(self) -> tuple[int, int, int]:
        """Bit masks (x, z, y-count) over basis indices; qubit 0 is the MSB."""
        n = self.n_qubits
        x_mask = z_mask = 0
        n_y = 0
        for i, c in enumerate(self.letters):
            bit = 1 << (n - 1 - i)
            if c in "XY":
                x_mask |= bit
            if c in "ZY":
                z_mask |= bit
            if c == "Y":
                n_y += 1
        return x_mask, z_mask, n_y

    def __str__(self):
        return self.letters


def pauli_mul(a: PauliString, b: PauliString) -> tuple[complex, PauliString]:
    """Return ``(phase, out)`` with ``a * b == phase * out``."""
    if a.n_qubits != b.n_qubits:
        raise DimensionError(f"cannot multiply {a.n_qubits}- and {b.n_qubits}-qubit strings")
    phase = 1 + 0j
    out = []
    for x, y in zip(a.letters, b.letters):
        p, c = _PRODUCT[(x, y)]
        phase *= p
        out.append(c)
    return phase, PauliString("".join(out))


def _snap(c: complex) -> complex:
    re, im = c.real, c.imag
    if abs(re) < PRUNE_TOL:
        re = 0.0
    if abs(im) < PRUNE_TOL:
        im = 0.0
    return complex(re, im)


class PauliSum:
    """Complex-weighted sum of Pauli strings in canonical form.

    Construction canonicalizes: duplicate strings merge, real and imaginary
    parts below ``PRUNE_TOL`` are zeroed and vanishing terms dropped.  The
    object is immutable; arithmetic returns new sums.
    """

    __slots__ = ("_n", "_terms")

    def __init__(self, n_qubits: int, terms: Mapping[PauliString | str, complex] | Iterable = ()):
        if n_qubits < 1:
            raise ValueError("n_qubits must be positive")
        items = terms.items() if isinstance(terms, Mapping) else terms
        acc: dict[PauliString, complex] = {}
        for key, coeff in items:
            s = key if isinstance(key, PauliString) else PauliString(key)
            if s.n_qubits != n_qubits:
                raise DimensionError(f"string {s} does not act on {n_qubits} qubits")
            acc[s] = acc.get(s, 0) + complex(coeff)
        canon = {}
        for s, c in acc.items():
            c = _snap(c)
            if c != 0:
                canon[s] = c
        self._n = n_qubits
        self._terms = canon

    @classmethod
    def identity(cls, n_qubits: int, coeff: complex = 1.0) -> PauliSum:
        return cls(n_qubits, {PauliString.identity(n_qubits): coeff})

    @classmethod
    def zero(cls, n_qubits: int) -> PauliSum:
        return cls(n_qubits)

    @classmethod
    def from_string(cls, letters: str, coeff: complex = 1.0) -> PauliSum:
        return cls(len(letters), {letters: coeff})

    @property
    def n_qubits(self) -> int:
        return self._n

    @property
    def terms(self) -> dict[PauliString, complex]:
        return dict(self._terms)

    def items(self):
        """Terms sorted by letter string, for deterministic iteration."""
        return sorted(self._terms.items())

    def __len__(self):
        return len(self._terms)

    def __iter__(self):
        return iter(sorted(self._terms))

    def __getitem__(self, key) -> complex:
        s = key if isinstance(key, PauliString) else PauliString(key)
        return self._terms.get(s, 0j)

    def canonical(self) -> PauliSum:
        return PauliSum(self._n, self._terms)

    def _check(self, other: PauliSum):
        if self._n != other._n:
            raise DimensionError(f"{self._n}- vs {other._n}-qubit sums")

    def __add__(self, other):
        if not isinstance(other, PauliSum):
            return self + PauliSum.identity(self._n, other)
        self._check(other)
        return PauliSum(self._n, list(self._terms.items()) + list(other._terms.items()))

    __radd__ = __add__

    def __neg__(self):
        return PauliSum(self._n, {s: -c for s, c in self._terms.items()})

    def __sub__(self, other):
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, PauliSum):
            return sum_mul(self, other)
        return PauliSum(self._n, {s: c * other for s, c in self._terms.items()})

    def __rmul__(self, other):
        return PauliSum(self._n, {s: other * c for s, c in self._terms.items()})

    def __truediv__(self, other):
        return self * (1 / other)

    def __eq__(self, other):
        if not isinstance(other, PauliSum):
            return NotImplemented
        return self._n == other._n and self._terms == other._terms

    def __hash__(self):
        return hash((self._n, frozenset(self._terms.items())))

    def allclose(self, other: PauliSum, atol: float = 1e-12) -> bool:
        """Same string set (above ``atol``) with coefficients within ``atol``."""
        self._check(other)
        keys = set(self._terms) | set(other._terms)
        return all(abs(self[k] - other[k]) <= atol for k in keys)

    def max_coeff_diff(self, other: PauliSum) -> float:
        self._check(other)
        keys = set(self._terms) | set(other._terms)
        return max((abs(self[k] - other[k]) for k in keys), default=0.0)

    def dagger(self) -> PauliSum:
        return PauliSum(self._n, {s: c.conjugate() for s, c in self._terms.items()})

    def is_hermitian(self, atol: float = 1e-13) -> bool:
        return all(abs(c.imag) <= atol for c in self._terms.values())

    def real(self) -> PauliSum:
        return PauliSum(self._n, {s: c.real for s, c in self._terms.items()})

    def norm1(self) -> float:
        return float(sum(abs(c) for c in self._terms.values()))

    def diagonal_part(self) -> PauliSum:
        """Terms built only from I and Z letters."""
        return PauliSum(self._n, {s: c for s, c in self._terms.items() if s.is_diagonal()})

    def matrix(self, cap: int | None = None) -> np.ndarray:
        return to_matrix(self, cap)

    def __repr__(self):
        if not self._terms:
            return f"PauliSum({self._n}, {{}})"
        body = " + ".join(f"({c:.6g})*{s}" for s, c in self.items())
        return f"PauliSum({self._n}: {body})"


def sum_add(a: PauliSum, b: PauliSum) -> PauliSum:
    return a + b


def sum_mul(a: PauliSum, b: PauliSum) -> PauliSum:
    """Distribute ``pauli_mul`` over all term pairs."""
    a._check(b)
    out = []
    for sa, ca in a._terms.items():
        for sb, cb in b._terms.items():
            phase, s = pauli_mul(sa, sb)
            out.append((s, phase * ca * cb))
    return PauliSum(a.n_qubits, out)


def commutator(a: PauliSum, b: PauliSum) -> PauliSum:
    return sum_mul(a, b) - sum_mul(b, a)


def anticommutator(a: PauliSum, b: PauliSum) -> PauliSum:
    return sum_mul(a, b) + sum_mul(b, a)


def string_matrix(s: PauliString) -> np.ndarray:
    """Dense matrix of a single string (permutation with phases)."""
    return to_matrix(PauliSum(s.n_qubits, {s: 1.0}))


def to_matrix(h: PauliSum, cap: int | None = None) -> np.ndarray:
    """Dense ``2^n x 2^n`` matrix of a Pauli sum."""
    n = h.n_qubits
    check_cap(n, cap)
    dim = 1 << n
    idx = np.arange(dim)
    out = np.zeros((dim, dim), dtype=complex)
    for s, c in h._terms.items():
        x_mask, z_mask, n_y = s.masks()
        parity = np.zeros(dim, dtype=np.int64)
        bits = idx & z_mask
        while np.any(bits):
            parity ^= bits & 1
            bits = bits >> 1
        phase = (1j ** n_y) * (1 - 2 * parity)
        out[idx ^ x_mask, idx] += c * phase
    return out
