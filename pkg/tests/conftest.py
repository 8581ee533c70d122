import numpy as np
import pytest

from qpad.sim import Circuit, GateOp, PureState


def random_state(n_qubits: int, rng: np.random.Generator) -> PureState:
    amps = rng.normal(size=2**n_qubits) + 1j * rng.normal(size=2**n_qubits)
    return PureState(n_qubits, amps / np.linalg.norm(amps))


def random_circuit(
    n_qubits: int,
    n_gates: int,
    n_r: int,
    rng: np.random.Generator,
) -> Circuit:
    """Random gate list with exactly n_r phase-gadget gates mixed in."""
    if n_r > n_gates:
        raise ValueError("more R gates than gates")
    kinds = ["R"] * n_r
    clifford = ["X", "Z", "H", "P", "CNOT"] if n_qubits >= 2 else ["X", "Z", "H", "P"]
    kinds += [clifford[rng.integers(len(clifford))] for _ in range(n_gates - n_r)]
    rng.shuffle(kinds)
    ops = []
    for kind in kinds:
        if kind == "CNOT":
            control, target = rng.choice(n_qubits, size=2, replace=False)
            ops.append(GateOp("CNOT", (int(control), int(target))))
        else:
            ops.append(GateOp(kind, (int(rng.integers(n_qubits)),)))
    return Circuit(n_qubits, tuple(ops))


@pytest.fixture
def rng() -> np.random.Generator:
    return np.random.default_rng(1234)
