"""Quantum one-time-pad computing on encrypted data.

A client Pauli-encrypts its qubits, a server runs Clifford gates plus a
non-Clifford phase-gate gadget on the ciphertext, and the client tracks
key updates so the final decryption recovers the plaintext circuit
output. Process tomography reconstructs every gate from both sides of
the pad: the decrypted view returns the ideal gate, the server view
returns the fully depolarizing channel.
"""

from .pad import (
    ALL_AUX_SECRETS,
    ALL_KEYS,
    AuxSecret,
    EncKey,
    KeyRegister,
    aux_state,
    average_over_keys,
    correction_bit,
    decrypt,
    encrypt,
    generate_aux_secret,
    generate_key,
    pauli_op,
    r_branch_operator,
    update_clifford,
    update_cnot,
    update_r,
)
from .protocol import (
    BranchResult,
    CircuitParseError,
    Message,
    ProtocolError,
    ProtocolOrderError,
    Server,
    SessionConfig,
    SessionResult,
    Transcript,
    circuit_from_dict,
    circuit_to_dict,
    client_prepare,
    load_circuit,
    reference_apply,
    run_session,
    save_circuit,
    write_transcript_jsonl,
)
from .sim import (
    GATE_KINDS,
    MAX_QUBITS,
    Circuit,
    DegenerateBranchError,
    DensityMatrix,
    GateOp,
    PureState,
    apply_gate,
    circuit_unitary,
    density_of,
    discard_qubit,
    gate_matrix,
    ket,
    maximally_mixed,
    measure_z,
    mix,
    partial_trace,
    permute_qubits,
    state_fidelity,
    tensor,
    trace_distance,
    zero_state,
)
from .tomography import (
    ChiMatrix,
    CountTable,
    ReconstructionError,
    TomographyPlan,
    apply_chi,
    channel_of_gate_decrypted,
    channel_of_gate_server_view,
    chi_of_unitary,
    collect,
    depolarizing_chi,
    ideal_gate_channel,
    ideal_gate_chi,
    monte_carlo_uncertainty,
    pauli_labels,
    pauli_matrices,
    process_fidelity,
    r_gadget_bin_channel,
    reconstruct_chi,
    tp_residual,
)
from .verify import VerifyRow, full_table

__version__ = "0.1.0"

__all__ = [
    "ALL_AUX_SECRETS",
    "ALL_KEYS",
    "AuxSecret",
    "BranchResult",
    "ChiMatrix",
    "Circuit",
    "CircuitParseError",
    "CountTable",
    "DegenerateBranchError",
    "DensityMatrix",
    "EncKey",
    "GATE_KINDS",
    "GateOp",
    "KeyRegister",
    "MAX_QUBITS",
    "Message",
    "ProtocolError",
    "ProtocolOrderError",
    "PureState",
    "ReconstructionError",
    "Server",
    "SessionConfig",
    "SessionResult",
    "TomographyPlan",
    "Transcript",
    "VerifyRow",
    "apply_chi",
    "apply_gate",
    "aux_state",
    "average_over_keys",
    "channel_of_gate_decrypted",
    "channel_of_gate_server_view",
    "chi_of_unitary",
    "circuit_from_dict",
    "circuit_to_dict",
    "circuit_unitary",
    "client_prepare",
    "collect",
    "correction_bit",
    "decrypt",
    "density_of",
    "depolarizing_chi",
    "discard_qubit",
    "encrypt",
    "full_table",
    "gate_matrix",
    "generate_aux_secret",
    "generate_key",
    "ideal_gate_channel",
    "ideal_gate_chi",
    "ket",
    "load_circuit",
    "maximally_mixed",
    "measure_z",
    "mix",
    "monte_carlo_uncertainty",
    "partial_trace",
    "pauli_labels",
    "pauli_matrices",
    "pauli_op",
    "permute_qubits",
    "process_fidelity",
    "r_branch_operator",
    "r_gadget_bin_channel",
    "reconstruct_chi",
    "reference_apply",
    "run_session",
    "save_circuit",
    "state_fidelity",
    "tensor",
    "tp_residual",
    "trace_distance",
    "update_clifford",
    "update_cnot",
    "update_r",
    "write_transcript_jsonl",
    "zero_state",
]
