"""Exhaustive identity checks for the pad algebra and the R gadget.

Each row states one identity (one gate and key combination, or one gadget
branch combination) checked against a batch of random states through the
real server machinery. The security rows check that key-averaged qubits
are maximally mixed and that the correction bit is uniform. Update rules
are injectable so a deliberately wrong rule shows up as failing rows.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np

from .pad import (
    ALL_AUX_SECRETS,
    ALL_KEYS,
    AuxSecret,
    EncKey,
    aux_state,
    average_over_keys,
    correction_bit,
    decrypt,
    encrypt,
    update_clifford,
    update_cnot,
    update_r,
)
from .protocol import Server
from .sim import (
    KET_0,
    KET_1,
    KET_PLUS,
    KET_PLUS_Y,
    GateOp,
    PureState,
    apply_gate,
    maximally_mixed,
    partial_trace,
    state_fidelity,
    trace_distance,
)

FIDELITY_TOL = 1e-12
MIXED_TOL = 1e-12


@dataclass(frozen=True)
class VerifyRow:
    suite: str
    name: str
    passed: bool
    metric: float
    note: str


def _random_state(n_qubits: int, rng: np.random.Generator) -> PureState:
    vec = rng.normal(size=2**n_qubits) + 1j * rng.normal(size=2**n_qubits)
    return PureState(n_qubits, vec / np.linalg.norm(vec))


def single_gate_rows(
    kind: str,
    n_states: int = 20,
    seed: int = 0,
    update_fn: Callable[[str, EncKey], EncKey] = update_clifford,
) -> list[VerifyRow]:
    """One row per key: encrypt, run the gate on the server, decrypt with
    the updated key, compare against the plaintext gate."""
    rng = np.random.default_rng([seed, sum(ord(ch) for ch in kind)])
    rows = []
    op = GateOp(kind, (0,))
    for key in ALL_KEYS:
        new_key = update_fn(kind, key)
        worst = 1.0
        for _ in range(n_states):
            psi = _random_state(1, rng)
            server = Server(encrypt(psi, 0, key), [])
            server.execute_clifford(op)
            out = decrypt(server.output_state(), 0, new_key)
            worst = min(worst, state_fidelity(out, apply_gate(psi, op)))
        rows.append(
            VerifyRow(
                suite=kind,
                name=f"{kind} key(a={key.a},b={key.b})",
                passed=worst >= 1.0 - FIDELITY_TOL,
                metric=worst,
                note=f"min fidelity over {n_states} random states",
            )
        )
    return rows


def cnot_rows(
    n_states: int = 20,
    seed: int = 0,
    update_fn: Callable[[EncKey, EncKey], tuple[EncKey, EncKey]] = update_cnot,
) -> list[VerifyRow]:
    rng = np.random.default_rng([seed, 5])
    rows = []
    op = GateOp("CNOT", (0, 1))
    for ck in ALL_KEYS:
        for tk in ALL_KEYS:
            new_ck, new_tk = update_fn(ck, tk)
            worst = 1.0
            for _ in range(n_states):
                psi = _random_state(2, rng)
                enc = encrypt(encrypt(psi, 0, ck), 1, tk)
                server = Server(enc, [])
                server.execute_clifford(op)
                out = decrypt(decrypt(server.output_state(), 0, new_ck), 1, new_tk)
                worst = min(worst, state_fidelity(out, apply_gate(psi, op)))
            rows.append(
                VerifyRow(
                    suite="CNOT",
                    name=(
                        f"CNOT control(a={ck.a},b={ck.b}) "
                        f"target(a={tk.a},b={tk.b})"
                    ),
                    passed=worst >= 1.0 - FIDELITY_TOL,
                    metric=worst,
                    note=f"min fidelity over {n_states} random states",
                )
            )
    return rows


def gadget_rows(
    n_states: int = 20,
    seed: int = 0,
    update_fn: Callable[[EncKey, int, AuxSecret], EncKey] = update_r,
) -> list[VerifyRow]:
    """One row per (key, auxiliary secret, branch): run the R gadget on the
    server with that branch forced, decrypt, compare against plain R.
    Checks that the branch probability is exactly one half as well."""
    rng = np.random.default_rng([seed, 7])
    reference_op = GateOp("R", (0,))
    rows = []
    for key in ALL_KEYS:
        for secret in ALL_AUX_SECRETS:
            for c in (0, 1):
                new_key = update_fn(key, c, secret)
                worst = 1.0
                prob_dev = 0.0
                for _ in range(n_states):
                    psi = _random_state(1, rng)
                    server = Server(encrypt(psi, 0, key), [aux_state(secret)])
                    outcome, prob = server.execute_r(0, force=c)
                    server.apply_correction(correction_bit(key, secret))
                    out = decrypt(server.output_state(), 0, new_key)
                    worst = min(worst, state_fidelity(out, apply_gate(psi, reference_op)))
                    prob_dev = max(prob_dev, abs(prob - 0.5))
                passed = worst >= 1.0 - FIDELITY_TOL and prob_dev <= 1e-12
                rows.append(
                    VerifyRow(
                        suite="R-gadget",
                        name=(
                            f"R key(a={key.a},b={key.b}) "
                            f"aux(y={secret.y},d={secret.d}) c={c}"
                        ),
                        passed=passed,
                        metric=worst,
                        note=(
                            f"min fidelity over {n_states} random states; "
                            f"max |p-1/2| = {prob_dev:.2e}"
                        ),
                    )
                )
    return rows


def security_rows(n_states: int = 50, seed: int = 0) -> list[VerifyRow]:
    rng = np.random.default_rng([seed, 11])
    rows = []
    named = (("|0>", KET_0), ("|1>", KET_1), ("|+>", KET_PLUS), ("|+y>", KET_PLUS_Y))
    worst = 0.0
    for _, state in named:
        worst = max(worst, trace_distance(average_over_keys(state, 0), maximally_mixed(1)))
    for _ in range(n_states):
        worst = max(
            worst,
            trace_distance(average_over_keys(_random_state(1, rng), 0), maximally_mixed(1)),
        )
    rows.append(
        VerifyRow(
            suite="security",
            name="key-averaged qubit is maximally mixed",
            passed=worst <= MIXED_TOL,
            metric=worst,
            note=f"max trace distance to I/2 over {len(named)} named + {n_states} random states",
        )
    )
    worst2 = 0.0
    for _ in range(n_states):
        avg = average_over_keys(_random_state(2, rng), 0)
        worst2 = max(worst2, trace_distance(partial_trace(avg, [0]), maximally_mixed(1)))
    rows.append(
        VerifyRow(
            suite="security",
            name="key-averaged qubit of an entangled pair is maximally mixed",
            passed=worst2 <= MIXED_TOL,
            metric=worst2,
            note=f"max trace distance to I/2 over {n_states} random two-qubit states",
        )
    )
    # x = a xor y hits both values exactly once as y runs over {0, 1}
    uniform = all(
        sorted(correction_bit(EncKey(a, b), AuxSecret(y, d)) for y in (0, 1)) == [0, 1]
        for a in (0, 1)
        for b in (0, 1)
        for d in (0, 1)
    )
    rows.append(
        VerifyRow(
            suite="security",
            name="correction bit is uniform for either key bit",
            passed=uniform,
            metric=1.0 if uniform else 0.0,
            note="exact enumeration over keys and auxiliary secrets",
        )
    )
    return rows


def full_table(n_states: int = 20, seed: int = 0) -> list[VerifyRow]:
    """All identity rows (4 per single-qubit gate, 16 for CNOT, 32 for the
    R gadget) followed by the security rows."""
    rows: list[VerifyRow] = []
    for kind in ("X", "Z", "H", "P"):
        rows.extend(single_gate_rows(kind, n_states=n_states, seed=seed))
    rows.extend(cnot_rows(n_states=n_states, seed=seed))
    rows.extend(gadget_rows(n_states=n_states, seed=seed))
    rows.extend(security_rows(seed=seed))
    return rows
