"""Dense state-vector simulation of small qubit registers.

Conventions used across the package:

* Qubit 0 is the least significant bit of the amplitude index: basis state
  |q_{n-1} ... q_1 q_0> sits at index sum_i q_i * 2**i.
* State equality is judged through `state_fidelity` or density matrices,
  never by comparing amplitude vectors, because most identities in the
  one-time-pad algebra hold only up to a global phase.
* Phase gates are exactly P = diag(1, i) and R = diag(1, e^{i pi/4}); no
  extra phase convention is applied on top.
* Two-qubit gates act in control (x) target order: the control qubit is the
  more significant axis of the 4x4 matrix.
* Dense registers are capped at MAX_QUBITS qubits.
"""

from __future__ import annotations

import math
import string
from dataclasses import dataclass
from typing import NamedTuple, Sequence, Union

import numpy as np

MAX_QUBITS = 12

GATE_KINDS = ("X", "Z", "H", "P", "R", "CNOT")


class DegenerateBranchError(ValueError):
    """Forcing a measurement branch whose probability is numerically zero."""


_GATES = {
    "X": np.array([[0, 1], [1, 0]], dtype=complex),
    "Z": np.array([[1, 0], [0, -1]], dtype=complex),
    "H": np.array([[1, 1], [1, -1]], dtype=complex) / math.sqrt(2),
    "P": np.array([[1, 0], [0, 1j]], dtype=complex),
    "R": np.array([[1, 0], [0, np.exp(1j * math.pi / 4)]], dtype=complex),
    # control (x) target ordering: |c t> basis 00, 01, 10, 11
    "CNOT": np.array(
        [[1, 0, 0, 0], [0, 1, 0, 0], [0, 0, 0, 1], [0, 0, 1, 0]], dtype=complex
    ),
}


def gate_matrix(kind: str) -> np.ndarray:
    """Unitary matrix of a supported gate (2x2, or 4x4 for CNOT)."""
    if kind not in _GATES:
        raise ValueError(f"unknown gate kind {kind!r}; expected one of {GATE_KINDS}")
    return _GATES[kind].copy()


@dataclass(frozen=True)
class PureState:
    """Normalized amplitude vector over little-endian qubits.

    Treated as an immutable value; every operation returns a new state.
    """

    n_qubits: int
    amplitudes: np.ndarray

    def __post_init__(self) -> None:
        if not isinstance(self.n_qubits, int) or not 1 <= self.n_qubits <= MAX_QUBITS:
            raise ValueError(
                f"register size must be 1..{MAX_QUBITS} qubits, got {self.n_qubits!r}"
            )
        amps = np.array(self.amplitudes, dtype=complex)
        if amps.shape != (2**self.n_qubits,):
            raise ValueError(
                f"amplitude vector has shape {amps.shape}, "
                f"expected ({2 ** self.n_qubits},)"
            )
        norm2 = float(np.sum(np.abs(amps) ** 2))
        if abs(norm2 - 1.0) > 1e-12:
            raise ValueError(f"state is not normalized: |psi|^2 = {norm2!r}")
        amps.setflags(write=False)
        object.__setattr__(self, "amplitudes", amps)

    @staticmethod
    def computational(n_qubits: int, index: int = 0) -> "PureState":
        if not 0 <= index < 2**n_qubits:
            raise ValueError(f"basis index {index} out of range for {n_qubits} qubits")
        amps = np.zeros(2**n_qubits, dtype=complex)
        amps[index] = 1.0
        return PureState(n_qubits, amps)


def zero_state(n_qubits: int) -> PureState:
    return PureState.computational(n_qubits, 0)


def ket(bits: str) -> PureState:
    """Computational basis state from a bit string, qubit 0 first."""
    if not bits or any(b not in "01" for b in bits):
        raise ValueError(f"expected a nonempty string of 0/1, got {bits!r}")
    index = sum(int(b) << i for i, b in enumerate(bits))
    return PureState.computational(len(bits), index)


_SQ2 = 1 / math.sqrt(2)
KET_0 = PureState(1, np.array([1, 0], dtype=complex))
KET_1 = PureState(1, np.array([0, 1], dtype=complex))
KET_PLUS = PureState(1, np.array([_SQ2, _SQ2], dtype=complex))
KET_MINUS = PureState(1, np.array([_SQ2, -_SQ2], dtype=complex))
KET_PLUS_Y = PureState(1, np.array([_SQ2, 1j * _SQ2], dtype=complex))
KET_MINUS_Y = PureState(1, np.array([_SQ2, -1j * _SQ2], dtype=complex))


@dataclass(frozen=True)
class GateOp:
    """One gate application; targets are (control, target) for CNOT."""

    kind: str
    targets: tuple[int, ...]

    def __post_init__(self) -> None:
        if self.kind not in GATE_KINDS:
            raise ValueError(
                f"unknown gate kind {self.kind!r}; expected one of {GATE_KINDS}"
            )
        targets = tuple(int(t) for t in self.targets)
        object.__setattr__(self, "targets", targets)
        arity = 2 if self.kind == "CNOT" else 1
        if len(targets) != arity:
            raise ValueError(f"{self.kind} takes {arity} target(s), got {targets}")
        if any(t < 0 for t in targets):
            raise ValueError(f"negative qubit index in {targets}")
        if len(set(targets)) != len(targets):
            raise ValueError(f"repeated qubit index in {targets}")

    def validate_for(self, n_qubits: int) -> None:
        if max(self.targets) >= n_qubits:
            raise ValueError(
                f"{self.kind} on qubit(s) {self.targets} does not fit a "
                f"{n_qubits}-qubit register"
            )


@dataclass(frozen=True)
class Circuit:
    n_qubits: int
    ops: tuple[GateOp, ...]

    def __post_init__(self) -> None:
        if not isinstance(self.n_qubits, int) or self.n_qubits < 1:
            raise ValueError(f"circuit needs at least one qubit, got {self.n_qubits!r}")
        ops = tuple(self.ops)
        object.__setattr__(self, "ops", ops)
        for op in ops:
            op.validate_for(self.n_qubits)

    @property
    def r_count(self) -> int:
        return sum(1 for op in self.ops if op.kind == "R")


def _axis(n_qubits: int, qubit: int) -> int:
    # amplitudes.reshape([2]*n) puts the most significant bit on axis 0
    return n_qubits - 1 - qubit


def apply_gate(state: PureState, op: GateOp) -> PureState:
    """Apply one gate to the register, returning the new state."""
    op.validate_for(state.n_qubits)
    n = state.n_qubits
    t = state.amplitudes.reshape((2,) * n)
    if op.kind == "CNOT":
        mat = _GATES["CNOT"]
        ax_c, ax_t = _axis(n, op.targets[0]), _axis(n, op.targets[1])
        t = np.moveaxis(t, (ax_c, ax_t), (n - 2, n - 1))
        t = t.reshape((-1, 4) if n > 2 else (4,))
        t = t @ mat.T
        t = t.reshape((2,) * n)
        t = np.moveaxis(t, (n - 2, n - 1), (ax_c, ax_t))
    else:
        mat = _GATES[op.kind]
        ax = _axis(n, op.targets[0])
        t = np.moveaxis(t, ax, n - 1)
        t = t @ mat.T
        t = np.moveaxis(t, n - 1, ax)
    return PureState(n, t.reshape(-1))


def circuit_unitary(circuit: Circuit) -> np.ndarray:
    """Full-register unitary of a circuit, built column by column."""
    dim = 2**circuit.n_qubits
    u = np.empty((dim, dim), dtype=complex)
    for j in range(dim):
        state = PureState.computational(circuit.n_qubits, j)
        for op in circuit.ops:
            state = apply_gate(state, op)
        u[:, j] = state.amplitudes
    return u


class MeasureResult(NamedTuple):
    outcome: int
    state: PureState
    probability: float


def measure_z(
    state: PureState,
    qubit: int,
    rng: np.random.Generator | None = None,
    force: int | None = None,
) -> MeasureResult:
    """Computational-basis measurement of one qubit.

    The branch is drawn from `rng` unless `force` picks it explicitly (used
    for exact branch enumeration). Forcing a branch whose probability is
    below 1e-12 raises DegenerateBranchError. Returns the outcome, the
    collapsed (renormalized) register and the branch probability.
    """
    if not 0 <= qubit < state.n_qubits:
        raise ValueError(f"qubit {qubit} out of range")
    n = state.n_qubits
    ax = _axis(n, qubit)
    t = state.amplitudes.reshape((2,) * n)
    p1 = float(np.sum(np.abs(np.take(t, 1, axis=ax)) ** 2))
    probs = (1.0 - p1, p1)
    if force is not None:
        if force not in (0, 1):
            raise ValueError(f"forced outcome must be 0 or 1, got {force!r}")
        outcome = force
        if probs[outcome] <= 1e-12:
            raise DegenerateBranchError(
                f"forced branch {outcome} on qubit {qubit} has probability "
                f"{probs[outcome]:.3e}"
            )
    else:
        if rng is None:
            raise ValueError("measure_z needs either rng or a forced branch")
        outcome = int(rng.random() < p1)
    prob = probs[outcome]
    collapsed = t.copy()
    sel: list[Union[slice, int]] = [slice(None)] * n
    sel[ax] = 1 - outcome
    collapsed[tuple(sel)] = 0
    collapsed = collapsed.reshape(-1) / math.sqrt(prob)
    return MeasureResult(outcome, PureState(n, collapsed), prob)


def tensor(low: PureState, high: PureState) -> PureState:
    """Combined register with `low`'s qubits at positions 0..n_low-1."""
    n = low.n_qubits + high.n_qubits
    if n > MAX_QUBITS:
        raise ValueError(f"combined register of {n} qubits exceeds cap {MAX_QUBITS}")
    return PureState(n, np.kron(high.amplitudes, low.amplitudes))


def discard_qubit(state: PureState, qubit: int, outcome: int) -> PureState:
    """Drop a qubit that has collapsed to |outcome>; higher qubits shift down.

    Valid only right after a measurement of that qubit (the remaining
    register must carry all the weight on the given outcome).
    """
    if state.n_qubits < 2:
        raise ValueError("cannot discard the last qubit of a register")
    n = state.n_qubits
    sub = np.take(state.amplitudes.reshape((2,) * n), outcome, axis=_axis(n, qubit))
    remaining = float(np.sum(np.abs(sub) ** 2))
    if abs(remaining - 1.0) > 1e-9:
        raise ValueError(
            f"qubit {qubit} is not collapsed to |{outcome}> "
            f"(residual weight {1 - remaining:.3e})"
        )
    return PureState(n - 1, sub.reshape(-1) / math.sqrt(remaining))


def permute_qubits(state: PureState, perm: Sequence[int]) -> PureState:
    """Relabel qubits so that new qubit i is old qubit perm[i]."""
    n = state.n_qubits
    if sorted(perm) != list(range(n)):
        raise ValueError(f"{perm!r} is not a permutation of 0..{n - 1}")
    axes = [_axis(n, perm[n - 1 - k]) for k in range(n)]
    t = state.amplitudes.reshape((2,) * n).transpose(axes)
    return PureState(n, t.reshape(-1))


@dataclass(frozen=True)
class DensityMatrix:
    """Hermitian, unit-trace, positive-semidefinite operator."""

    n_qubits: int
    matrix: np.ndarray

    def __post_init__(self) -> None:
        if not isinstance(self.n_qubits, int) or not 1 <= self.n_qubits <= MAX_QUBITS:
            raise ValueError(f"register size out of range: {self.n_qubits!r}")
        m = np.array(self.matrix, dtype=complex)
        dim = 2**self.n_qubits
        if m.shape != (dim, dim):
            raise ValueError(f"matrix shape {m.shape}, expected ({dim}, {dim})")
        if np.max(np.abs(m - m.conj().T)) > 1e-12:
            raise ValueError("density matrix is not Hermitian")
        if abs(np.trace(m).real - 1.0) > 1e-12 or abs(np.trace(m).imag) > 1e-12:
            raise ValueError(f"density matrix trace is {np.trace(m)!r}, expected 1")
        if float(np.min(np.linalg.eigvalsh(m))) < -1e-10:
            raise ValueError("density matrix has a negative eigenvalue")
        m.setflags(write=False)
        object.__setattr__(self, "matrix", m)


def density_of(state: PureState) -> DensityMatrix:
    return DensityMatrix(state.n_qubits, np.outer(state.amplitudes, state.amplitudes.conj()))


def mix(members: Sequence[tuple[float, Union[PureState, DensityMatrix]]]) -> DensityMatrix:
    """Convex mixture of states; weights must be nonnegative and sum to 1."""
    if not members:
        raise ValueError("mix() needs at least one member")
    weights = [float(w) for w, _ in members]
    if any(w < 0 for w in weights):
        raise ValueError(f"negative mixture weight in {weights}")
    if abs(sum(weights) - 1.0) > 1e-12:
        raise ValueError(f"mixture weights sum to {sum(weights)!r}, expected 1")
    n = members[0][1].n_qubits
    total = np.zeros((2**n, 2**n), dtype=complex)
    for w, member in members:
        if member.n_qubits != n:
            raise ValueError("mixture members live on different register sizes")
        m = member.matrix if isinstance(member, DensityMatrix) else density_of(member).matrix
        total += w * m
    return DensityMatrix(n, total)


def maximally_mixed(n_qubits: int) -> DensityMatrix:
    dim = 2**n_qubits
    return DensityMatrix(n_qubits, np.eye(dim, dtype=complex) / dim)


def state_fidelity(a: PureState, b: PureState) -> float:
    """|<a|b>|^2; insensitive to global phase."""
    if a.n_qubits != b.n_qubits:
        raise ValueError("states live on different register sizes")
    return float(abs(np.vdot(a.amplitudes, b.amplitudes)) ** 2)


def trace_distance(rho: DensityMatrix, sigma: DensityMatrix) -> float:
    """Half the trace norm of rho - sigma."""
    if rho.n_qubits != sigma.n_qubits:
        raise ValueError("operators live on different register sizes")
    eigs = np.linalg.eigvalsh(rho.matrix - sigma.matrix)
    return float(0.5 * np.sum(np.abs(eigs)))


def partial_trace(rho: DensityMatrix, keep: Sequence[int]) -> DensityMatrix:
    """Reduced state on `keep`, which becomes qubits 0..len(keep)-1 in order."""
    n = rho.n_qubits
    keep = [int(q) for q in keep]
    if not keep or len(set(keep)) != len(keep) or any(not 0 <= q < n for q in keep):
        raise ValueError(f"bad qubit subset {keep!r} for a {n}-qubit register")
    letters = iter(string.ascii_letters)
    row = {q: next(letters) for q in range(n)}
    col = {q: row[q] if q not in keep else next(letters) for q in range(n)}
    in_sub = "".join(row[n - 1 - a] for a in range(n)) + "".join(
        col[n - 1 - a] for a in range(n)
    )
    k = len(keep)
    out_sub = "".join(row[keep[k - 1 - j]] for j in range(k)) + "".join(
        col[keep[k - 1 - j]] for j in range(k)
    )
    t = rho.matrix.reshape((2,) * (2 * n))
    reduced = np.einsum(f"{in_sub}->{out_sub}", t).reshape((2**k, 2**k))
    return DensityMatrix(k, reduced)
