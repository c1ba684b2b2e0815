"""Dense statevector simulation of Pauli measurements with Monte Carlo noise.

Basis index bit ``n-1-q`` belongs to qubit ``q`` so that qubit 0 is the
leftmost letter of an operator string, matching ``PauliOperator.x``/``z``.
Most routines take a batch of states with shape ``(shots, 2**n)``; each row
is an independent trajectory.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .pauli import NotALineError, PauliOperator, symplectic_form

MAX_QUBITS = 12
NORM_TOL = 1e-10


@dataclass(frozen=True)
class NoiseParams:
    """Depolarizing probability per qubit per measured observable, and readout flip probability."""

    p_depolarize: float = 0.0
    p_readout: float = 0.0

    def __post_init__(self):
        for name in ("p_depolarize", "p_readout"):
            v = getattr(self, name)
            if not 0.0 <= v <= 1.0:
                raise ValueError(f"{name} must lie in [0, 1], got {v}")

    @property
    def is_zero(self) -> bool:
        return self.p_depolarize == 0.0 and self.p_readout == 0.0

    @classmethod
    def parse(cls, text: str) -> "NoiseParams":
        """Parse ``"p_dep,p_ro"``."""
        parts = [float(v) for v in text.split(",")]
        if len(parts) != 2:
            raise ValueError(f"noise must be 'p_depolarize,p_readout', got {text!r}")
        return cls(*parts)


ZERO_NOISE = NoiseParams()


@dataclass(frozen=True)
class MeasurementRecord:
    observable: PauliOperator
    outcome: int

    def __post_init__(self):
        if self.outcome not in (1, -1):
            raise ValueError("outcome must be +1 or -1")


class StateVector:
    """Normalised state of ``n_qubits`` qubits."""

    def __init__(self, amplitudes, n_qubits: int | None = None):
        amps = np.asarray(amplitudes, dtype=complex).ravel()
        n = int(np.log2(amps.size)) if n_qubits is None else n_qubits
        if amps.size != 2**n:
            raise ValueError(f"{amps.size} amplitudes do not describe {n} qubits")
        if n > MAX_QUBITS:
            raise ValueError(f"at most {MAX_QUBITS} qubits are supported")
        norm = np.linalg.norm(amps)
        if abs(norm - 1) > 1e-8:
            raise ValueError(f"state is not normalised (norm {norm})")
        self.n_qubits = n
        self.amplitudes = amps / norm

    @classmethod
    def zeros(cls, n_qubits: int) -> "StateVector":
        amps = np.zeros(2**n_qubits, dtype=complex)
        amps[0] = 1
        return cls(amps, n_qubits)

    @classmethod
    def random(cls, n_qubits: int, rng: np.random.Generator) -> "StateVector":
        """Haar-random pure state."""
        amps = rng.normal(size=2**n_qubits) + 1j * rng.normal(size=2**n_qubits)
        return cls(amps / np.linalg.norm(amps), n_qubits)

    @property
    def norm(self) -> float:
        return float(np.linalg.norm(self.amplitudes))

    def copy(self) -> "StateVector":
        return StateVector(self.amplitudes.copy(), self.n_qubits)

    def __repr__(self):
        return f"StateVector(n_qubits={self.n_qubits})"


def _check(n_state: int, op: PauliOperator):
    if op.n_qubits != n_state:
        from .pauli import DimensionError

        raise DimensionError(f"{op} acts on {op.n_qubits} qubits, state has {n_state}")


def _popcount(v: np.ndarray) -> np.ndarray:
    v = v.copy()
    out = np.zeros_like(v)
    while v.any():
        out += v & 1
        v >>= 1
    return out


def _parity(v: np.ndarray) -> np.ndarray:
    return _popcount(v) & 1


def apply_pauli(psi: np.ndarray, op: PauliOperator) -> np.ndarray:
    """``op @ psi`` along the last axis."""
    idx = np.arange(psi.shape[-1])
    src = idx ^ op.x
    sign = 1 - 2 * _parity(src & op.z)
    phase = 1j ** (bin(op.x & op.z).count("1") % 4)
    return phase * sign * psi[..., src]


def _apply_pauli_per_row(psi: np.ndarray, xs: np.ndarray, zs: np.ndarray) -> np.ndarray:
    """Apply a different Pauli (x, z masks) to every row of ``psi``."""
    idx = np.arange(psi.shape[-1])
    src = idx[None, :] ^ xs[:, None]
    sign = 1 - 2 * _parity(src & zs[:, None])
    phase = 1j ** (_popcount(xs & zs) % 4)
    return phase[:, None] * sign * np.take_along_axis(psi, src, axis=1)


def expectation(state: StateVector, op: PauliOperator) -> float:
    _check(state.n_qubits, op)
    val = np.vdot(state.amplitudes, apply_pauli(state.amplitudes, op))
    return float(np.clip(val.real, -1.0, 1.0))


def depolarize_batch(psi: np.ndarray, n_qubits: int, qubits, p: float, rng: np.random.Generator) -> np.ndarray:
    """Each listed qubit of each row suffers a uniform X/Y/Z error with probability ``p``."""
    if p <= 0:
        return psi
    shots = psi.shape[0]
    xs = np.zeros(shots, dtype=np.int64)
    zs = np.zeros(shots, dtype=np.int64)
    for q in qubits:
        hit = rng.random(shots) < p
        kind = rng.integers(1, 4, size=shots)  # 1=X, 2=Z, 3=Y as x + 2z
        bit = 1 << (n_qubits - 1 - q)
        xs ^= np.where(hit & (kind & 1 == 1), bit, 0)
        zs ^= np.where(hit & (kind & 2 == 2), bit, 0)
    if not (xs.any() or zs.any()):
        return psi
    return _apply_pauli_per_row(psi, xs, zs)


def measure_batch(psi: np.ndarray, op: PauliOperator, rng: np.random.Generator) -> tuple[np.ndarray, np.ndarray]:
    """Projectively measure ``op`` on every row; returns outcomes (+-1) and post-states."""
    p_psi = apply_pauli(psi, op)
    exp = np.einsum("sd,sd->s", psi.conj(), p_psi).real
    p_plus = np.clip((1 + exp) / 2, 0.0, 1.0)
    outcome = np.where(rng.random(psi.shape[0]) < p_plus, 1, -1)
    # sampled branches have positive probability, so the norm is nonzero
    post = (psi + outcome[:, None] * p_psi) / 2
    post /= np.linalg.norm(post, axis=1, keepdims=True)
    return outcome, post


def readout_flip(outcomes: np.ndarray, p: float, rng: np.random.Generator) -> np.ndarray:
    if p <= 0:
        return outcomes
    flip = rng.random(outcomes.shape) < p
    return np.where(flip, -outcomes, outcomes)


def measure_observable(state: StateVector, op: PauliOperator, rng: np.random.Generator):
    """Single projective measurement; returns ``(MeasurementRecord, post_state)``."""
    _check(state.n_qubits, op)
    if op.is_identity:
        raise ValueError("cannot measure the identity")
    outcome, post = measure_batch(state.amplitudes[None, :], op, rng)
    return MeasurementRecord(op, int(outcome[0])), StateVector(post[0], state.n_qubits)


def _check_line(ops):
    for i in range(len(ops)):
        for j in range(i + 1, len(ops)):
            if symplectic_form(ops[i], ops[j]):
                raise NotALineError(f"{ops[i]} and {ops[j]} do not commute")


def sample_sequence(
    psi: np.ndarray,
    ops,
    noise: NoiseParams,
    rng: np.random.Generator,
    noisy_qubits=None,
) -> tuple[np.ndarray, np.ndarray]:
    """Measure ``ops`` in order on a batch, injecting noise before each one.

    Returns ``(outcomes, post)`` with outcomes of shape ``(shots, len(ops))``.
    """
    n = ops[0].n_qubits
    qubits = range(n) if noisy_qubits is None else noisy_qubits
    outs = np.empty((psi.shape[0], len(ops)), dtype=np.int64)
    for k, op in enumerate(ops):
        psi = depolarize_batch(psi, n, qubits, noise.p_depolarize, rng)
        o, psi = measure_batch(psi, op, rng)
        outs[:, k] = readout_flip(o, noise.p_readout, rng)
    return outs, psi


def context_products(
    state: StateVector, ops, noise: NoiseParams, shots: int, rng: np.random.Generator
) -> np.ndarray:
    """Per-shot product of the measured outcomes of a commuting triple."""
    for op in ops:
        _check(state.n_qubits, op)
    _check_line(ops)
    psi = np.broadcast_to(state.amplitudes, (shots, state.amplitudes.size)).copy()
    outs, _ = sample_sequence(psi, ops, noise, rng)
    return outs.prod(axis=1)


def measure_context(state: StateVector, line, noise: NoiseParams, rng: np.random.Generator, n_qubits=None):
    """Measure the three observables of ``line`` in sequence on ``state``.

    ``line`` is a ``LineRecord`` (point ids) or a sequence of operators.
    Returns three ``MeasurementRecord``s; without noise their product equals
    the line sign for any input state.
    """
    if hasattr(line, "points"):
        ops = [PauliOperator.from_id(p, state.n_qubits) for p in line.points]
    else:
        ops = list(line)
    for op in ops:
        _check(state.n_qubits, op)
    _check_line(ops)
    outs, _ = sample_sequence(state.amplitudes[None, :].copy(), ops, noise, rng)
    return tuple(MeasurementRecord(op, int(o)) for op, o in zip(ops, outs[0]))


def ghz_resource(n_logical: int, parties: int) -> StateVector:
    """``n_logical`` GHZ blocks shared by ``parties`` players.

    Party ``k`` holds qubits ``k*n .. k*n + n - 1``; logical qubit ``i`` is
    the GHZ block on qubits ``{k*n + i}``.
    """
    total = n_logical * parties
    if total > MAX_QUBITS:
        raise ValueError(f"resource needs {total} qubits > {MAX_QUBITS}")
    amps = np.zeros(2**total, dtype=complex)
    for v in range(2**n_logical):
        idx = 0
        for _ in range(parties):
            idx = (idx << n_logical) | v
        amps[idx] = 1
    return StateVector(amps / np.sqrt(2**n_logical), total)


def bell_resource(n: int) -> StateVector:
    """Tensor product of ``n`` Bell pairs; pair ``i`` is qubits ``(i, n + i)``."""
    if n < 1:
        raise ValueError("need at least one Bell pair")
    return ghz_resource(n, 2)


def mirror_op(op: PauliOperator) -> tuple[PauliOperator, int]:
    """Observable and sign the second party measures to agree with ``op``.

    On a Bell pair ``<P (x) P> = (-1)**(#Y)`` since ``P^T = (-1)**(#Y) P``.
    """
    return op, -1 if op.y_count % 2 else 1


def embed(op: PauliOperator, offset: int, total: int) -> PauliOperator:
    """Place ``op`` on qubits ``offset .. offset + n - 1`` of a ``total``-qubit register."""
    shift = total - offset - op.n_qubits
    if shift < 0 or offset < 0:
        raise ValueError("operator does not fit in the register")
    return PauliOperator(total, op.x << shift, op.z << shift)
