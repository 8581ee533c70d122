"""Quantum one-time pad: per-qubit Pauli keys and their update algebra.

Encryption applies X^a Z^b with uniformly random key bits (a, b); averaged
over the four keys any qubit is maximally mixed. Clifford gates commute
through the pad at the cost of a classical key update only. The
non-Clifford R gate consumes one client-prepared auxiliary qubit
Z^d P^y |+> plus one round of classical communication; the logical qubit
comes out on the auxiliary wire with a fresh key.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterator, Sequence

import numpy as np

from .sim import (
    KET_PLUS,
    DensityMatrix,
    GateOp,
    PureState,
    apply_gate,
    gate_matrix,
    mix,
)


def _bit(value: int, name: str) -> int:
    if value not in (0, 1):
        raise ValueError(f"{name} must be 0 or 1, got {value!r}")
    return int(value)


@dataclass(frozen=True)
class EncKey:
    """One qubit's pad key: X exponent `a`, Z exponent `b`."""

    a: int
    b: int

    def __post_init__(self) -> None:
        object.__setattr__(self, "a", _bit(self.a, "a"))
        object.__setattr__(self, "b", _bit(self.b, "b"))


@dataclass(frozen=True)
class AuxSecret:
    """Secret bits of one auxiliary qubit: P exponent `y`, Z exponent `d`."""

    y: int
    d: int

    def __post_init__(self) -> None:
        object.__setattr__(self, "y", _bit(self.y, "y"))
        object.__setattr__(self, "d", _bit(self.d, "d"))


ALL_KEYS = tuple(EncKey(a, b) for a in (0, 1) for b in (0, 1))
ALL_AUX_SECRETS = tuple(AuxSecret(y, d) for y in (0, 1) for d in (0, 1))


@dataclass
class KeyRegister:
    """Mutable list of per-qubit keys tracked by the client during a session."""

    keys: list[EncKey]

    def __len__(self) -> int:
        return len(self.keys)

    def __getitem__(self, qubit: int) -> EncKey:
        return self.keys[qubit]

    def __setitem__(self, qubit: int, key: EncKey) -> None:
        self.keys[qubit] = key

    def __iter__(self) -> Iterator[EncKey]:
        return iter(self.keys)

    def snapshot(self) -> tuple[EncKey, ...]:
        return tuple(self.keys)

    def fork(self) -> "KeyRegister":
        return KeyRegister(list(self.keys))


def generate_key(rng: np.random.Generator) -> EncKey:
    return EncKey(int(rng.integers(2)), int(rng.integers(2)))


def generate_keys(n_qubits: int, rng: np.random.Generator) -> KeyRegister:
    return KeyRegister([generate_key(rng) for _ in range(n_qubits)])


def generate_aux_secret(rng: np.random.Generator) -> AuxSecret:
    return AuxSecret(int(rng.integers(2)), int(rng.integers(2)))


def generate_aux_secrets(count: int, rng: np.random.Generator) -> list[AuxSecret]:
    return [generate_aux_secret(rng) for _ in range(count)]


def pauli_op(a: int, b: int) -> np.ndarray:
    """2x2 matrix of X^a Z^b."""
    op = np.eye(2, dtype=complex)
    if _bit(b, "b"):
        op = gate_matrix("Z") @ op
    if _bit(a, "a"):
        op = gate_matrix("X") @ op
    return op


def encrypt(state: PureState, qubit: int, key: EncKey) -> PureState:
    """Apply the pad X^a Z^b to one qubit (Z first, then X)."""
    out = state
    if key.b:
        out = apply_gate(out, GateOp("Z", (qubit,)))
    if key.a:
        out = apply_gate(out, GateOp("X", (qubit,)))
    return out


# X^a Z^b is self-inverse up to global phase, so decryption is the same map.
decrypt = encrypt


def aux_state(secret: AuxSecret) -> PureState:
    """Auxiliary qubit Z^d P^y |+>; one of |+>, |->, |+y>, |-y>."""
    out = KET_PLUS
    if secret.y:
        out = apply_gate(out, GateOp("P", (0,)))
    if secret.d:
        out = apply_gate(out, GateOp("Z", (0,)))
    return out


def average_over_keys(state: PureState, qubit: int) -> DensityMatrix:
    """Uniform mixture of the four encryptions of one qubit."""
    return mix([(0.25, encrypt(state, qubit, key)) for key in ALL_KEYS])


# Decryption keys after the server applies a Clifford gate to an encrypted
# qubit: commuting the gate through X^a Z^b only permutes the exponents.
#   X, Z: (a, b) unchanged        H: (a, b) -> (b, a)        P: (a, b) -> (a, a xor b)
_CLIFFORD_1Q = ("X", "Z", "H", "P")


def update_clifford(kind: str, key: EncKey) -> EncKey:
    """Key update for a single-qubit Clifford gate."""
    if kind == "X" or kind == "Z":
        return key
    if kind == "H":
        return EncKey(key.b, key.a)
    if kind == "P":
        return EncKey(key.a, key.a ^ key.b)
    raise ValueError(
        f"update_clifford handles {_CLIFFORD_1Q}; got {kind!r} "
        "(CNOT uses update_cnot, R uses update_r)"
    )


def update_cnot(control_key: EncKey, target_key: EncKey) -> tuple[EncKey, EncKey]:
    """Key update for CNOT: X propagates control->target, Z target->control."""
    new_control = EncKey(control_key.a, control_key.b ^ target_key.b)
    new_target = EncKey(control_key.a ^ target_key.a, target_key.b)
    return new_control, new_target


def correction_bit(key: EncKey, secret: AuxSecret) -> int:
    """Classical bit x = a xor y the client sends after an R-gate round."""
    return key.a ^ secret.y


def update_r(key: EncKey, c: int, secret: AuxSecret) -> EncKey:
    """Key update for the R-gate gadget, given measurement outcome c."""
    c = _bit(c, "c")
    a, b = key.a, key.b
    y, d = secret.y, secret.d
    new_a = a ^ c
    new_b = (a & (c ^ y ^ 1)) ^ b ^ d ^ y
    return EncKey(new_a, new_b)


def r_branch_operator(secret: AuxSecret, c: int) -> np.ndarray:
    """Branch operator of the R gadget, data qubit in, auxiliary wire out.

    Composes R on the data qubit, a CNOT controlled by the auxiliary qubit,
    and projection of the data qubit onto |c>. The squared norm of the
    image is the branch probability (exactly 1/2 for normalized input).
    """
    c = _bit(c, "c")
    aux = aux_state(secret).amplitudes.reshape(2, 1)
    # joint basis: auxiliary (x) data, auxiliary acting as the CNOT control
    pre = gate_matrix("CNOT") @ np.kron(aux, gate_matrix("R"))
    return pre[[c, 2 + c], :]
