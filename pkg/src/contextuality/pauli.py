"""N-qubit Pauli operators encoded as (x|z) bit vectors over GF(2).

Qubit 0 is the leftmost letter of the string form and the most significant
bit of both ``x`` and ``z``. The integer point id of an operator is
``(x << n) | z``, which gives a canonical total order and makes the product
of two operators (ignoring phase) the XOR of their ids.
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import reduce

_LETTERS = "IXZY"  # index = x + 2*z
_CODES = {"I": (0, 0), "X": (1, 0), "Z": (0, 1), "Y": (1, 1)}


class DimensionError(ValueError):
    """Operators acting on different numbers of qubits were combined."""


class NotALineError(ValueError):
    """A triple of operators does not form a context line."""


def _popcount(v: int) -> int:
    return bin(v).count("1")


@dataclass(frozen=True, order=True)
class PauliOperator:
    """Phase-free Pauli operator on ``n_qubits`` qubits."""

    n_qubits: int
    x: int = 0
    z: int = 0

    def __post_init__(self):
        if self.n_qubits < 1:
            raise ValueError("n_qubits must be positive")
        mask = (1 << self.n_qubits) - 1
        if self.x & ~mask or self.z & ~mask or self.x < 0 or self.z < 0:
            raise ValueError(f"bits out of range for {self.n_qubits} qubits")

    @classmethod
    def from_string(cls, label: str) -> "PauliOperator":
        label = label.strip().upper()
        if not label or any(ch not in _CODES for ch in label):
            raise ValueError(f"invalid Pauli string {label!r}")
        x = z = 0
        for ch in label:
            bx, bz = _CODES[ch]
            x = (x << 1) | bx
            z = (z << 1) | bz
        return cls(len(label), x, z)

    @classmethod
    def from_id(cls, pid: int, n_qubits: int) -> "PauliOperator":
        mask = (1 << n_qubits) - 1
        return cls(n_qubits, (pid >> n_qubits) & mask, pid & mask)

    @classmethod
    def identity(cls, n_qubits: int) -> "PauliOperator":
        return cls(n_qubits)

    @property
    def id(self) -> int:
        """Point id ``x || z``."""
        return (self.x << self.n_qubits) | self.z

    @property
    def x_bits(self) -> tuple[int, ...]:
        return tuple((self.x >> (self.n_qubits - 1 - q)) & 1 for q in range(self.n_qubits))

    @property
    def z_bits(self) -> tuple[int, ...]:
        return tuple((self.z >> (self.n_qubits - 1 - q)) & 1 for q in range(self.n_qubits))

    @property
    def is_identity(self) -> bool:
        return self.x == 0 and self.z == 0

    @property
    def y_count(self) -> int:
        return _popcount(self.x & self.z)

    def letter(self, qubit: int) -> str:
        s = self.n_qubits - 1 - qubit
        return _LETTERS[((self.x >> s) & 1) + 2 * ((self.z >> s) & 1)]

    def __str__(self) -> str:
        return "".join(self.letter(q) for q in range(self.n_qubits))

    def __repr__(self) -> str:
        return f"PauliOperator({str(self)!r})"

    def __mul__(self, other: "PauliOperator") -> "PhasedPauli":
        return multiply(self, other)


@dataclass(frozen=True)
class PhasedPauli:
    """Operator times ``i**phase_exp``."""

    op: PauliOperator
    phase_exp: int = 0

    def __post_init__(self):
        object.__setattr__(self, "phase_exp", self.phase_exp % 4)

    @property
    def phase(self) -> complex:
        return 1j**self.phase_exp

    def __mul__(self, other):
        if isinstance(other, PauliOperator):
            other = PhasedPauli(other)
        prod = multiply(self.op, other.op)
        return PhasedPauli(prod.op, prod.phase_exp + self.phase_exp + other.phase_exp)

    def __str__(self) -> str:
        return ("+", "+i", "-", "-i")[self.phase_exp] + str(self.op)


def _check_dims(*ops: PauliOperator) -> int:
    n = ops[0].n_qubits
    if any(op.n_qubits != n for op in ops):
        raise DimensionError(f"qubit counts differ: {[op.n_qubits for op in ops]}")
    return n


def symplectic_form(u: PauliOperator, v: PauliOperator) -> int:
    """Return 0 if ``u`` and ``v`` commute and 1 if they anticommute."""
    _check_dims(u, v)
    return _popcount((u.x & v.z) ^ (u.z & v.x)) & 1


def commutes(u: PauliOperator, v: PauliOperator) -> bool:
    return symplectic_form(u, v) == 0


def multiply(u: PauliOperator, v: PauliOperator) -> PhasedPauli:
    """Phase-tracked product ``u @ v``.

    Single-qubit convention: XY = iZ, YZ = iX, ZX = iY and the reversed
    orders carry -i.
    """
    n = _check_dims(u, v)
    phase = 0
    for s in range(n):
        a = ((u.x >> s) & 1) + 2 * ((u.z >> s) & 1)
        b = ((v.x >> s) & 1) + 2 * ((v.z >> s) & 1)
        if a == 0 or b == 0 or a == b:
            continue
        # cyclic order X -> Y -> Z -> X gives +i
        ca, cb = _CYCLIC[a], _CYCLIC[b]
        phase += 1 if (cb - ca) % 3 == 1 else 3
    return PhasedPauli(PauliOperator(n, u.x ^ v.x, u.z ^ v.z), phase)


_CYCLIC = {1: 0, 3: 1, 2: 2}  # X, Y, Z as encoded by x + 2*z


def product(*ops: PauliOperator) -> PhasedPauli:
    """Left-to-right product of several operators."""
    if not ops:
        raise ValueError("empty product")
    return reduce(lambda acc, op: acc * op, ops[1:], PhasedPauli(ops[0]))


def is_symmetric(p: PauliOperator) -> bool:
    """True when ``p`` has an even number of Y letters (the identity included)."""
    return p.y_count % 2 == 0


def line_sign(a: PauliOperator, b: PauliOperator, c: PauliOperator) -> int:
    """Scalar ``s`` with ``a @ b @ c == s * I`` for a commuting closing triple."""
    _check_dims(a, b, c)
    if a.id ^ b.id ^ c.id:
        raise NotALineError(f"{a}, {b}, {c} do not multiply to the identity")
    if symplectic_form(a, b) or symplectic_form(a, c) or symplectic_form(b, c):
        raise NotALineError(f"{a}, {b}, {c} are not pairwise commuting")
    prod = product(a, b, c)
    # phase is even because the triple commutes
    assert prod.op.is_identity and prod.phase_exp % 2 == 0
    return 1 if prod.phase_exp == 0 else -1


def all_operators(n_qubits: int, include_identity: bool = False) -> list[PauliOperator]:
    """Every operator on ``n_qubits`` in point-id order."""
    start = 0 if include_identity else 1
    return [PauliOperator.from_id(pid, n_qubits) for pid in range(start, 4**n_qubits)]


def to_matrix(p: PauliOperator | PhasedPauli):
    """Dense matrix, qubit 0 as the most significant tensor factor."""
    import numpy as np

    phase = 1.0
    if isinstance(p, PhasedPauli):
        phase, p = p.phase, p.op
    single = {
        "I": np.eye(2, dtype=complex),
        "X": np.array([[0, 1], [1, 0]], dtype=complex),
        "Y": np.array([[0, -1j], [1j, 0]], dtype=complex),
        "Z": np.array([[1, 0], [0, -1]], dtype=complex),
    }
    m = np.ones((1, 1), dtype=complex)
    for ch in str(p):
        m = np.kron(m, single[ch])
    return phase * m
