"""Client/server sessions that run circuits on pad-encrypted registers.

Session flow: the client encrypts its data qubits and hands the register to
the server together with one auxiliary qubit per R gate in the circuit, in
circuit order. The server applies Clifford gates on its own. Each R gate
costs one classical round trip: the server measures the former data qubit
and returns the outcome bit c, the client answers with the correction bit
x = a xor y, and the auxiliary wire becomes the new logical qubit. All the
client's key material stays on its side of the channel; mid-computation
messages carry exactly one classical bit each.

Exact mode enumerates both branches of every gadget measurement (weight 1/2
each); sampled mode draws each branch from a PRNG seeded by the session.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import NamedTuple, Sequence, Union

import numpy as np

from .pad import (
    AuxSecret,
    EncKey,
    KeyRegister,
    aux_state,
    correction_bit,
    decrypt,
    encrypt,
    generate_aux_secrets,
    generate_keys,
    update_clifford,
    update_cnot,
    update_r,
)
from .sim import (
    GATE_KINDS,
    Circuit,
    GateOp,
    PureState,
    apply_gate,
    discard_qubit,
    measure_z,
    permute_qubits,
    tensor,
)


class ProtocolError(RuntimeError):
    """A session step that violates the protocol contract."""


class ProtocolOrderError(ProtocolError):
    """Messages or server steps attempted out of their fixed order."""


class CircuitParseError(ValueError):
    """A circuit document that does not match the expected JSON shape."""


CLIENT_TO_SERVER = "client->server"
SERVER_TO_CLIENT = "server->client"

MSG_ENCRYPTED_INPUT = "EncryptedInput"
MSG_AUX_QUBIT = "AuxQubit"
MSG_OUTCOME_C = "OutcomeC"
MSG_CORRECTION_X = "CorrectionX"
MSG_ENCRYPTED_OUTPUT = "EncryptedOutput"


@dataclass(frozen=True)
class Message:
    """One channel record; quantum payloads are opaque handles, never amplitudes."""

    direction: str
    kind: str
    payload: Union[int, str]
    gate_index: int | None = None

    def record(self) -> dict:
        return {
            "direction": self.direction,
            "kind": self.kind,
            "payload": self.payload,
            "gate_index": self.gate_index,
        }


@dataclass
class Transcript:
    """Everything one branch of a session produced, plus client-side records."""

    seed: int
    messages: list[Message] = field(default_factory=list)
    r_outcomes: list[int] = field(default_factory=list)
    relabels: list[tuple[int, int, int]] = field(default_factory=list)
    final_keys: tuple[EncKey, ...] = ()

    def records(self) -> list[dict]:
        return [m.record() for m in self.messages]


@dataclass(frozen=True)
class SessionConfig:
    circuit: Circuit
    input_state: PureState
    seed: int = 0
    mode: str = "exact"

    def __post_init__(self) -> None:
        if self.mode not in ("exact", "sampled"):
            raise ValueError(f"mode must be 'exact' or 'sampled', got {self.mode!r}")
        if not isinstance(self.seed, int) or self.seed < 0:
            raise ValueError(f"seed must be a nonnegative int, got {self.seed!r}")
        if self.circuit.n_qubits != self.input_state.n_qubits:
            raise ValueError(
                f"circuit is on {self.circuit.n_qubits} qubits but the input "
                f"has {self.input_state.n_qubits}"
            )


class ClientPreparation(NamedTuple):
    encrypted: PureState
    keys: KeyRegister
    aux_secrets: list[AuxSecret]
    aux_states: list[PureState]


def client_prepare(config: SessionConfig) -> ClientPreparation:
    """Draw keys, encrypt the input, and prepare one auxiliary per R gate."""
    rng = np.random.default_rng([config.seed, 0])
    keys = generate_keys(config.circuit.n_qubits, rng)
    secrets = generate_aux_secrets(config.circuit.r_count, rng)
    encrypted = config.input_state
    for qubit in range(config.circuit.n_qubits):
        encrypted = encrypt(encrypted, qubit, keys[qubit])
    return ClientPreparation(encrypted, keys, secrets, [aux_state(s) for s in secrets])


class Server:
    """Holds the encrypted register and executes gates on request.

    The server sees only the quantum payloads and the correction bits; it
    never learns key or auxiliary secret bits. Auxiliary qubits are stored
    until their R gate runs; the gadget joins the next one to the register,
    measures the former data qubit (which is then discarded from the dense
    register) and, after the correction, relabels the auxiliary wire as the
    logical qubit. Wire ids are stable: data wires 0..n-1, auxiliary wires
    n, n+1, ... in delivery order.
    """

    def __init__(self, register: PureState, aux_states: Sequence[PureState]):
        for aux in aux_states:
            if aux.n_qubits != 1:
                raise ValueError("auxiliary states must be single qubits")
        self._state = register
        self._n_data = register.n_qubits
        self._aux_states = list(aux_states)
        self._next_aux = 0
        # position p in the dense register currently holds wire _wires[p]
        self._wires = list(range(register.n_qubits))
        self._logical = list(range(register.n_qubits))
        self._pending: tuple[int, int] | None = None

    def fork(self) -> "Server":
        copy = object.__new__(Server)
        copy._state = self._state
        copy._n_data = self._n_data
        copy._aux_states = self._aux_states
        copy._next_aux = self._next_aux
        copy._wires = list(self._wires)
        copy._logical = list(self._logical)
        copy._pending = self._pending
        return copy

    def wire_of(self, logical_qubit: int) -> int:
        return self._logical[logical_qubit]

    def _position(self, wire: int) -> int:
        return self._wires.index(wire)

    def execute_clifford(self, op: GateOp) -> None:
        """Apply X, Z, H, P or CNOT to the logical targets."""
        if op.kind == "R":
            raise ValueError("R gates go through execute_r, not execute_clifford")
        if self._pending is not None:
            raise ProtocolOrderError("a gadget correction is still outstanding")
        positions = tuple(self._position(self._logical[q]) for q in op.targets)
        self._state = apply_gate(self._state, GateOp(op.kind, positions))

    def execute_r(
        self,
        logical_qubit: int,
        rng: np.random.Generator | None = None,
        force: int | None = None,
    ) -> tuple[int, float]:
        """Run the R gadget up to the measurement; returns (c, probability)."""
        if self._pending is not None:
            raise ProtocolOrderError("a gadget correction is still outstanding")
        if self._next_aux >= len(self._aux_states):
            raise ProtocolError(
                "circuit requires more auxiliary qubits than were delivered"
            )
        aux_wire = self._n_data + self._next_aux
        aux = self._aux_states[self._next_aux]
        self._next_aux += 1

        data_pos = self._position(self._logical[logical_qubit])
        self._state = tensor(self._state, aux)
        aux_pos = self._state.n_qubits - 1
        self._wires.append(aux_wire)

        self._state = apply_gate(self._state, GateOp("R", (data_pos,)))
        self._state = apply_gate(self._state, GateOp("CNOT", (aux_pos, data_pos)))
        outcome, collapsed, prob = measure_z(self._state, data_pos, rng=rng, force=force)
        self._state = discard_qubit(collapsed, data_pos, outcome)
        self._wires.pop(data_pos)
        self._pending = (logical_qubit, aux_wire)
        return outcome, prob

    def apply_correction(self, x: int) -> None:
        """Apply P^x to the auxiliary wire and promote it to the logical qubit."""
        if self._pending is None:
            raise ProtocolOrderError("no measurement outcome awaiting a correction")
        if x not in (0, 1):
            raise ValueError(f"correction bit must be 0 or 1, got {x!r}")
        logical_qubit, aux_wire = self._pending
        if x:
            self._state = apply_gate(self._state, GateOp("P", (self._position(aux_wire),)))
        self._logical[logical_qubit] = aux_wire
        self._pending = None

    def output_state(self) -> PureState:
        """Final register, permuted so position i is logical qubit i."""
        if self._pending is not None:
            raise ProtocolOrderError("a gadget correction is still outstanding")
        perm = [self._position(self._logical[q]) for q in range(self._n_data)]
        return permute_qubits(self._state, perm)


@dataclass(frozen=True)
class BranchResult:
    branch: tuple[int, ...]
    probability: float
    decrypted_output: PureState
    transcript: Transcript


@dataclass(frozen=True)
class SessionResult:
    decrypted_output: PureState
    transcript: Transcript
    branches: tuple[BranchResult, ...]


def reference_apply(circuit: Circuit, state: PureState) -> PureState:
    """Plaintext oracle: the circuit applied directly, no encryption."""
    for op in circuit.ops:
        state = apply_gate(state, op)
    return state


def run_session(config: SessionConfig) -> SessionResult:
    """Run one encrypted session end to end.

    Returns the decrypted output of the first branch (the all-zero outcome
    path in exact mode, the sampled path otherwise) plus every branch's
    decrypted output and transcript. All branches of a correct session
    decrypt to the same state.
    """
    circuit = config.circuit
    prep = client_prepare(config)
    r_gate_indices = [i for i, op in enumerate(circuit.ops) if op.kind == "R"]
    measure_rng = np.random.default_rng([config.seed, 1])

    base_messages = [Message(CLIENT_TO_SERVER, MSG_ENCRYPTED_INPUT, "q:data")]
    for j, gate_index in enumerate(r_gate_indices):
        base_messages.append(
            Message(CLIENT_TO_SERVER, MSG_AUX_QUBIT, f"q:aux{j}", gate_index)
        )

    server0 = Server(prep.encrypted, prep.aux_states)
    results: list[BranchResult] = []

    def finish_r_round(
        server: Server,
        keys: KeyRegister,
        messages: list[Message],
        outcomes: list[int],
        relabels: list[tuple[int, int, int]],
        gate_index: int,
        qubit: int,
        secret: AuxSecret,
        c: int,
    ) -> None:
        messages.append(Message(SERVER_TO_CLIENT, MSG_OUTCOME_C, c, gate_index))
        x = correction_bit(keys[qubit], secret)
        messages.append(Message(CLIENT_TO_SERVER, MSG_CORRECTION_X, x, gate_index))
        server.apply_correction(x)
        relabels.append((gate_index, qubit, server.wire_of(qubit)))
        keys[qubit] = update_r(keys[qubit], c, secret)
        outcomes.append(c)

    def finalize(
        server: Server,
        keys: KeyRegister,
        messages: list[Message],
        outcomes: list[int],
        relabels: list[tuple[int, int, int]],
        weight: float,
        bits: tuple[int, ...],
    ) -> None:
        messages.append(Message(SERVER_TO_CLIENT, MSG_ENCRYPTED_OUTPUT, "q:out"))
        output = server.output_state()
        for qubit in range(circuit.n_qubits):
            output = decrypt(output, qubit, keys[qubit])
        transcript = Transcript(
            seed=config.seed,
            messages=messages,
            r_outcomes=outcomes,
            relabels=relabels,
            final_keys=keys.snapshot(),
        )
        results.append(BranchResult(bits, weight, output, transcript))

    def walk(
        op_index: int,
        server: Server,
        keys: KeyRegister,
        messages: list[Message],
        outcomes: list[int],
        relabels: list[tuple[int, int, int]],
        weight: float,
        bits: tuple[int, ...],
    ) -> None:
        i = op_index
        while i < len(circuit.ops):
            op = circuit.ops[i]
            if op.kind != "R":
                server.execute_clifford(op)
                if op.kind == "CNOT":
                    ctrl, tgt = op.targets
                    keys[ctrl], keys[tgt] = update_cnot(keys[ctrl], keys[tgt])
                else:
                    keys[op.targets[0]] = update_clifford(op.kind, keys[op.targets[0]])
            else:
                qubit = op.targets[0]
                secret = prep.aux_secrets[len(outcomes)]
                if config.mode == "exact":
                    for c in (0, 1):
                        srv = server.fork()
                        kf = keys.fork()
                        msgs = list(messages)
                        outs = list(outcomes)
                        rels = list(relabels)
                        c_out, prob = srv.execute_r(qubit, force=c)
                        finish_r_round(srv, kf, msgs, outs, rels, i, qubit, secret, c_out)
                        walk(i + 1, srv, kf, msgs, outs, rels, weight * prob, bits + (c,))
                    return
                c_out, prob = server.execute_r(qubit, rng=measure_rng)
                finish_r_round(
                    server, keys, messages, outcomes, relabels, i, qubit, secret, c_out
                )
                weight *= prob
                bits = bits + (c_out,)
            i += 1
        finalize(server, keys, messages, outcomes, relabels, weight, bits)

    walk(0, server0, prep.keys, list(base_messages), [], [], 1.0, ())
    branches = tuple(results)
    return SessionResult(branches[0].decrypted_output, branches[0].transcript, branches)


def circuit_to_dict(circuit: Circuit) -> dict:
    return {
        "n_qubits": circuit.n_qubits,
        "ops": [{"kind": op.kind, "targets": list(op.targets)} for op in circuit.ops],
    }


def circuit_from_dict(doc: dict) -> Circuit:
    """Parse {"n_qubits": int, "ops": [{"kind", "targets"}, ...]}."""
    if not isinstance(doc, dict):
        raise CircuitParseError(f"circuit document must be an object, got {type(doc).__name__}")
    n_qubits = doc.get("n_qubits")
    if not isinstance(n_qubits, int) or n_qubits < 1:
        raise CircuitParseError(f"n_qubits must be a positive int, got {n_qubits!r}")
    raw_ops = doc.get("ops")
    if not isinstance(raw_ops, list):
        raise CircuitParseError("ops must be a list of gate objects")
    ops = []
    for i, raw in enumerate(raw_ops):
        if not isinstance(raw, dict):
            raise CircuitParseError(f"op {i}: expected an object, got {raw!r}")
        kind = raw.get("kind")
        targets = raw.get("targets")
        if kind not in GATE_KINDS:
            raise CircuitParseError(
                f"op {i}: unknown gate kind {kind!r}; expected one of {GATE_KINDS}"
            )
        if not isinstance(targets, list) or not all(isinstance(t, int) for t in targets):
            raise CircuitParseError(f"op {i} ({kind}): targets must be a list of ints")
        try:
            op = GateOp(kind, tuple(targets))
            op.validate_for(n_qubits)
        except ValueError as exc:
            raise CircuitParseError(f"op {i} ({kind}): {exc}") from exc
        ops.append(op)
    return Circuit(n_qubits, tuple(ops))


def load_circuit(path: str | Path) -> Circuit:
    text = Path(path).read_text()
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise CircuitParseError(f"{path}: not valid JSON ({exc})") from exc
    return circuit_from_dict(doc)


def save_circuit(circuit: Circuit, path: str | Path) -> None:
    Path(path).write_text(json.dumps(circuit_to_dict(circuit), indent=2) + "\n")


def write_transcript_jsonl(transcript: Transcript, path: str | Path) -> None:
    """One JSON record per message, in channel order."""
    lines = [json.dumps(r, sort_keys=True) for r in transcript.records()]
    Path(path).write_text("\n".join(lines) + "\n")


__all__ = [
    "BranchResult",
    "CircuitParseError",
    "ClientPreparation",
    "Message",
    "ProtocolError",
    "ProtocolOrderError",
    "Server",
    "SessionConfig",
    "SessionResult",
    "Transcript",
    "circuit_from_dict",
    "circuit_to_dict",
    "client_prepare",
    "load_circuit",
    "reference_apply",
    "run_session",
    "save_circuit",
    "write_transcript_jsonl",
]
