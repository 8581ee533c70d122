"""Process tomography of encrypted-execution channels.

Chi-matrix convention: a channel acts as

    E(rho) = sum_mn chi[m, n] P_m rho P_n

with P ranging over the unnormalized Pauli products (I, X, Y, Z)^n in
lexicographic order; the first label character indexes the more significant
tensor factor (the control qubit for two-qubit gates). Trace-preserving
channels then have unit-trace chi, the identity channel is a single 1 in
the (I, I) corner, and the completely depolarizing channel is
diag(1/4^n, ..., 1/4^n).

Inputs are the 6^n Pauli eigenstate products, measurements the 3^n local
Pauli bases, so the design is overcomplete. Exact probabilities are
reconstructed by least squares followed by projection of the spectrum onto
the probability simplex (the nearest Hermitian PSD unit-trace matrix in
Frobenius norm). Counted data additionally run an iterative maximum-
likelihood fixed point in the channel-state (Choi) picture, with a
trace-preservation projection every step and a diluted fallback step
whenever the plain step would lower the likelihood.

Two channels are offered per gate: the decrypted (client) view composes
encryption, server-side execution and decryption, averaged over all keys,
auxiliary secrets and measurement branches, and reproduces the bare gate;
the server view omits decryption and averages the same secrets, which
leaves every input maximally mixed.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Callable, Sequence

import numpy as np

from .pad import (
    ALL_AUX_SECRETS,
    ALL_KEYS,
    AuxSecret,
    EncKey,
    correction_bit,
    pauli_op,
    r_branch_operator,
    update_clifford,
    update_cnot,
    update_r,
)
from .sim import (
    KET_0,
    KET_1,
    KET_MINUS,
    KET_MINUS_Y,
    KET_PLUS,
    KET_PLUS_Y,
    DensityMatrix,
    gate_matrix,
)

Channel = Callable[[DensityMatrix], DensityMatrix]


class ReconstructionError(RuntimeError):
    """Tomographic reconstruction cannot proceed (e.g. rank-deficient design)."""


_PAULI_1Q = {
    "I": np.eye(2, dtype=complex),
    "X": np.array([[0, 1], [1, 0]], dtype=complex),
    "Y": np.array([[0, -1j], [1j, 0]], dtype=complex),
    "Z": np.array([[1, 0], [0, -1]], dtype=complex),
}

# per-qubit input states, in reporting order
_EIG_1Q = (
    ("0", KET_0.amplitudes),
    ("1", KET_1.amplitudes),
    ("+", KET_PLUS.amplitudes),
    ("-", KET_MINUS.amplitudes),
    ("+y", KET_PLUS_Y.amplitudes),
    ("-y", KET_MINUS_Y.amplitudes),
)

# measurement bases: outcome 0 is the +1 eigenvector
_BASIS_1Q = {
    "X": (KET_PLUS.amplitudes, KET_MINUS.amplitudes),
    "Y": (KET_PLUS_Y.amplitudes, KET_MINUS_Y.amplitudes),
    "Z": (KET_0.amplitudes, KET_1.amplitudes),
}


def _check_n(n_qubits: int) -> None:
    if n_qubits not in (1, 2):
        raise ValueError(f"tomography supports 1 or 2 qubits, got {n_qubits!r}")


@lru_cache(maxsize=None)
def pauli_labels(n_qubits: int) -> tuple[str, ...]:
    _check_n(n_qubits)
    return tuple(
        "".join(combo) for combo in itertools.product("IXYZ", repeat=n_qubits)
    )


@lru_cache(maxsize=None)
def _pauli_stack(n_qubits: int) -> np.ndarray:
    mats = []
    for label in pauli_labels(n_qubits):
        m = _PAULI_1Q[label[0]]
        for ch in label[1:]:
            m = np.kron(m, _PAULI_1Q[ch])
        mats.append(m)
    stack = np.array(mats)
    stack.setflags(write=False)
    return stack


def pauli_matrices(n_qubits: int) -> np.ndarray:
    """Stack of the 4^n Pauli products, indexed like `pauli_labels`."""
    return _pauli_stack(n_qubits).copy()


@lru_cache(maxsize=None)
def _inputs(n_qubits: int) -> tuple[tuple[str, ...], np.ndarray]:
    _check_n(n_qubits)
    labels = []
    kets = []
    for combo in itertools.product(_EIG_1Q, repeat=n_qubits):
        labels.append(",".join(name for name, _ in combo))
        vec = combo[0][1]
        for _, v in combo[1:]:
            vec = np.kron(vec, v)
        kets.append(vec)
    arr = np.array(kets)
    arr.setflags(write=False)
    return tuple(labels), arr


@lru_cache(maxsize=None)
def _settings(n_qubits: int) -> tuple[tuple[str, ...], np.ndarray]:
    _check_n(n_qubits)
    labels = []
    projs = []
    for combo in itertools.product("XYZ", repeat=n_qubits):
        labels.append("".join(combo))
        per_outcome = []
        for outcome in itertools.product((0, 1), repeat=n_qubits):
            vec = _BASIS_1Q[combo[0]][outcome[0]]
            for basis, o in zip(combo[1:], outcome[1:]):
                vec = np.kron(vec, _BASIS_1Q[basis][o])
            per_outcome.append(np.outer(vec, vec.conj()))
        projs.append(per_outcome)
    arr = np.array(projs)
    arr.setflags(write=False)
    return tuple(labels), arr


@dataclass(frozen=True)
class TomographyPlan:
    """Input states and measurement settings for one reconstruction run.

    shots == 0 means exact probabilities; otherwise multinomial counts of
    that size are drawn per (input, setting) pair.
    """

    n_qubits: int
    shots: int = 0

    def __post_init__(self) -> None:
        _check_n(self.n_qubits)
        if not isinstance(self.shots, int) or self.shots < 0:
            raise ValueError(f"shots must be a nonnegative int, got {self.shots!r}")

    @property
    def exact(self) -> bool:
        return self.shots == 0

    @property
    def input_labels(self) -> tuple[str, ...]:
        return _inputs(self.n_qubits)[0]

    @property
    def input_kets(self) -> np.ndarray:
        return _inputs(self.n_qubits)[1].copy()

    @property
    def setting_labels(self) -> tuple[str, ...]:
        return _settings(self.n_qubits)[0]

    @property
    def projectors(self) -> np.ndarray:
        return _settings(self.n_qubits)[1].copy()

    @property
    def n_inputs(self) -> int:
        return 6**self.n_qubits

    @property
    def n_settings(self) -> int:
        return 3**self.n_qubits

    @property
    def n_outcomes(self) -> int:
        return 2**self.n_qubits


@dataclass(frozen=True)
class CountTable:
    """Probabilities (exact) or counts (sampled) per input, setting, outcome."""

    n_qubits: int
    shots: int
    values: np.ndarray

    def __post_init__(self) -> None:
        _check_n(self.n_qubits)
        expected = (6**self.n_qubits, 3**self.n_qubits, 2**self.n_qubits)
        values = np.array(self.values, dtype=float)
        if values.shape != expected:
            raise ValueError(f"values shape {values.shape}, expected {expected}")
        if np.any(values < 0):
            raise ValueError("negative entries in count table")
        if self.shots == 0:
            sums = values.sum(axis=2)
            if np.max(np.abs(sums - 1.0)) > 1e-12:
                raise ValueError(
                    "exact-mode outcome distributions must each sum to 1"
                )
        values.setflags(write=False)
        object.__setattr__(self, "values", values)

    @property
    def exact(self) -> bool:
        return self.shots == 0


def collect(channel: Channel, plan: TomographyPlan, seed: int = 0) -> CountTable:
    """Push every plan input through the channel and read out every setting.

    Sampled mode draws multinomial counts of size `plan.shots` per
    (input, setting) pair, each pair on its own PRNG stream derived from
    `seed` and the pair index, so collection order does not matter.
    """
    if not isinstance(seed, int) or seed < 0:
        raise ValueError(f"seed must be a nonnegative int, got {seed!r}")
    _, kets = _inputs(plan.n_qubits)
    _, projs = _settings(plan.n_qubits)
    probs = np.empty((plan.n_inputs, plan.n_settings, plan.n_outcomes))
    for i, vec in enumerate(kets):
        rho_out = channel(DensityMatrix(plan.n_qubits, np.outer(vec, vec.conj())))
        # Born probabilities for all settings at once
        p = np.einsum("soab,ba->so", projs, rho_out.matrix).real
        probs[i] = p
    sums = probs.sum(axis=2)
    if np.max(np.abs(sums - 1.0)) > 1e-12:
        raise ValueError("channel is not trace preserving on the plan inputs")
    if plan.exact:
        return CountTable(plan.n_qubits, 0, probs)
    counts = np.empty_like(probs)
    for i in range(plan.n_inputs):
        for s in range(plan.n_settings):
            rng = np.random.default_rng([seed, i, s])
            p = np.clip(probs[i, s], 0, None)
            counts[i, s] = rng.multinomial(plan.shots, p / p.sum())
    return CountTable(plan.n_qubits, plan.shots, counts)


@lru_cache(maxsize=None)
def _design(n_qubits: int) -> dict:
    """Cached linear maps between chi / Choi space and the plan's data space."""
    _, kets = _inputs(n_qubits)
    _, projs = _settings(n_qubits)
    paulis = _pauli_stack(n_qubits)
    d = 2**n_qubits
    rhos = np.einsum("ia,ib->iab", kets, kets.conj())
    # A[(i,s,o), (m,n)] = Tr(P_m rho_i P_n Proj_so)
    left = np.einsum("mab,ibc->miac", paulis, rhos)
    both = np.einsum("miac,ncd->minad", left, paulis)
    a_full = np.einsum("minad,soda->isomn", both, projs)
    rows = kets.shape[0] * projs.shape[0] * projs.shape[1]
    a_mat = a_full.reshape(rows, d**2 * d**2)
    # Choi-picture effects K = Proj (x) rho^T, flattened for fast traces
    effects = np.einsum("soab,idc->isoacbd", projs, rhos).reshape(
        rows, d**2, d**2
    )
    k_rows = effects.reshape(rows, -1)
    kt_rows = np.ascontiguousarray(effects.transpose(0, 2, 1)).reshape(rows, -1)
    # isometry chi -> Choi: column m is vec(P_m)/sqrt(d)
    w = paulis.reshape(d**2, d**2).T / math.sqrt(d)
    for arr in (a_mat, k_rows, kt_rows, w):
        arr.setflags(write=False)
    return {"A": a_mat, "K": k_rows, "KT": kt_rows, "W": w}


@dataclass(frozen=True)
class ChiMatrix:
    """Process matrix in the Pauli basis; Hermitian, PSD, unit trace."""

    n_qubits: int
    matrix: np.ndarray

    def __post_init__(self) -> None:
        _check_n(self.n_qubits)
        m = np.array(self.matrix, dtype=complex)
        dim = 4**self.n_qubits
        if m.shape != (dim, dim):
            raise ValueError(f"chi shape {m.shape}, expected ({dim}, {dim})")
        if np.max(np.abs(m - m.conj().T)) > 1e-10:
            raise ValueError("chi matrix is not Hermitian")
        if abs(np.trace(m).real - 1.0) > 1e-10:
            raise ValueError(f"chi trace is {np.trace(m).real!r}, expected 1")
        if float(np.min(np.linalg.eigvalsh(m))) < -1e-8:
            raise ValueError("chi matrix has a significantly negative eigenvalue")
        m.setflags(write=False)
        object.__setattr__(self, "matrix", m)

    @property
    def labels(self) -> tuple[str, ...]:
        return pauli_labels(self.n_qubits)


def chi_of_unitary(unitary: np.ndarray) -> ChiMatrix:
    """Rank-one chi of the channel rho -> U rho U^dagger."""
    u = np.asarray(unitary, dtype=complex)
    d = u.shape[0]
    n = int(round(math.log2(d)))
    _check_n(n)
    paulis = _pauli_stack(n)
    coeffs = np.einsum("mab,ba->m", paulis, u) / d
    return ChiMatrix(n, np.outer(coeffs, coeffs.conj()))


def ideal_gate_chi(kind: str) -> ChiMatrix:
    return chi_of_unitary(gate_matrix(kind))


def depolarizing_chi(n_qubits: int) -> ChiMatrix:
    _check_n(n_qubits)
    dim = 4**n_qubits
    return ChiMatrix(n_qubits, np.eye(dim, dtype=complex) / dim)


def apply_chi(chi: ChiMatrix, rho: DensityMatrix) -> DensityMatrix:
    """Act with the channel encoded by chi on a state."""
    if chi.n_qubits != rho.n_qubits:
        raise ValueError("chi and state live on different register sizes")
    paulis = _pauli_stack(chi.n_qubits)
    out = np.einsum(
        "mn,mab,bc,ndc->ad", chi.matrix, paulis, rho.matrix, paulis.conj()
    )
    return DensityMatrix(rho.n_qubits, out)


def tp_residual(chi: ChiMatrix) -> float:
    """Max deviation of sum_mn chi[m,n] P_n P_m from the identity."""
    paulis = _pauli_stack(chi.n_qubits)
    total = np.einsum("mn,nab,mbc->ac", chi.matrix, paulis, paulis)
    return float(np.max(np.abs(total - np.eye(2**chi.n_qubits))))


def _nearest_unit_trace_psd(hermitian: np.ndarray) -> np.ndarray:
    """Frobenius-nearest PSD unit-trace matrix: project the spectrum onto
    the probability simplex, keeping the eigenvectors."""
    eigvals, eigvecs = np.linalg.eigh(hermitian)
    u = np.sort(eigvals)[::-1]
    css = np.cumsum(u)
    ks = np.arange(1, len(u) + 1)
    mask = u + (1.0 - css) / ks > 0
    k = int(np.nonzero(mask)[0][-1]) + 1
    tau = (1.0 - css[k - 1]) / k
    clipped = np.clip(eigvals + tau, 0.0, None)
    clipped /= clipped.sum()
    return (eigvecs * clipped) @ eigvecs.conj().T


def _solve_linear_inversion(a_mat: np.ndarray, freqs: np.ndarray, dim: int) -> np.ndarray:
    sol, _, rank, _ = np.linalg.lstsq(a_mat, freqs, rcond=None)
    if rank < dim**4:
        raise ReconstructionError(
            f"design matrix rank {rank} < {dim**4}: inputs and settings "
            "do not span operator space"
        )
    chi = sol.reshape(dim * dim, dim * dim)
    return _nearest_unit_trace_psd(0.5 * (chi + chi.conj().T))


def _tp_normalize(choi: np.ndarray, d: int) -> np.ndarray:
    """Rescale a PSD Choi candidate so the output partial trace is exactly I."""
    k_in = np.einsum("abac->bc", choi.reshape(d, d, d, d))
    eigvals, eigvecs = np.linalg.eigh(k_in)
    floor = max(float(eigvals.max()), 1e-30) * 1e-14
    inv_sqrt = (eigvecs / np.sqrt(np.clip(eigvals, floor, None))) @ eigvecs.conj().T
    lam = np.kron(np.eye(d), inv_sqrt)
    return lam @ choi @ lam


def _mle_chi(
    counts: np.ndarray,
    chi_init: np.ndarray,
    n_qubits: int,
    max_iterations: int = 5000,
    tolerance: float = 1e-10,
) -> np.ndarray:
    """Iterative likelihood fixed point over trace-preserving CP channels.

    Works on the Choi matrix J = d W chi W^dagger, for which the measured
    probabilities are Tr(J K) with K = Proj (x) rho^T. Each step sandwiches
    J between R = sum counts/probabilities * K and re-imposes trace
    preservation; a diluted step (I + eps R) is substituted whenever the
    plain step would lower the log likelihood. Stops once the gain drops
    below `tolerance` or after `max_iterations`.
    """
    design = _design(n_qubits)
    k_rows, kt_rows, w = design["K"], design["KT"], design["W"]
    d = 2**n_qubits
    n_flat = counts.reshape(-1)
    total = float(n_flat.sum())
    nonzero = n_flat > 0
    eye = np.eye(d * d)

    # small depolarizing admixture keeps every observed effect at p > 0
    choi = d * (w @ chi_init @ w.conj().T)
    choi = _tp_normalize(0.99 * choi + 0.01 * np.eye(d * d) / d, d)

    def probabilities(j: np.ndarray) -> np.ndarray:
        return np.clip((kt_rows @ j.reshape(-1)).real, 1e-14, None)

    def log_likelihood(p: np.ndarray) -> float:
        return float(np.sum(n_flat[nonzero] * np.log(p[nonzero])))

    probs = probabilities(choi)
    ll = log_likelihood(probs)
    for _ in range(max_iterations):
        weights = np.where(nonzero, n_flat / probs, 0.0) / total
        r_op = (weights @ k_rows).reshape(d * d, d * d)
        r_op = 0.5 * (r_op + r_op.conj().T)
        candidate = _tp_normalize(r_op @ choi @ r_op, d)
        cand_probs = probabilities(candidate)
        cand_ll = log_likelihood(cand_probs)
        if cand_ll < ll:
            eps = 0.5
            while eps > 1e-7:
                diluted = (eye + eps * r_op) / (1.0 + eps)
                candidate = _tp_normalize(diluted @ choi @ diluted, d)
                cand_probs = probabilities(candidate)
                cand_ll = log_likelihood(cand_probs)
                if cand_ll >= ll:
                    break
                eps *= 0.5
        gain = cand_ll - ll
        if cand_ll >= ll:
            choi, probs, ll = candidate, cand_probs, cand_ll
        if gain < tolerance:
            break
    chi = w.conj().T @ (choi / d) @ w
    return 0.5 * (chi + chi.conj().T)


def reconstruct_chi(table: CountTable, plan: TomographyPlan) -> ChiMatrix:
    """Estimate chi from collected data.

    Exact tables go through least squares plus the PSD/unit-trace
    projection; sampled tables continue into the maximum-likelihood
    iteration, initialized at the projected least-squares estimate.
    """
    if table.n_qubits != plan.n_qubits or table.shots != plan.shots:
        raise ValueError("count table does not match the plan it is decoded with")
    d = 2**plan.n_qubits
    values = table.values
    if table.exact:
        freqs = values.reshape(-1)
    else:
        sums = values.sum(axis=2, keepdims=True)
        freqs = np.divide(
            values, sums, out=np.full_like(values, 1.0 / plan.n_outcomes),
            where=sums > 0,
        ).reshape(-1)
    chi0 = _solve_linear_inversion(_design(plan.n_qubits)["A"], freqs, d)
    if table.exact:
        return ChiMatrix(plan.n_qubits, chi0)
    chi = _mle_chi(values, chi0, plan.n_qubits)
    eigvals = np.linalg.eigvalsh(chi)
    if eigvals.min() < -1e-9:  # guard against a numerically sick iteration
        chi = _nearest_unit_trace_psd(chi)
    return ChiMatrix(plan.n_qubits, chi)


def _sqrt_psd(matrix: np.ndarray) -> np.ndarray:
    eigvals, eigvecs = np.linalg.eigh(matrix)
    return (eigvecs * np.sqrt(np.clip(eigvals, 0.0, None))) @ eigvecs.conj().T


def process_fidelity(chi: ChiMatrix, ideal: ChiMatrix) -> float:
    """Fidelity between two processes via their unit-trace chi matrices.

    For a rank-one (unitary) ideal this is Tr(chi ideal); otherwise the
    general positive-square-root formula is used.
    """
    if chi.n_qubits != ideal.n_qubits:
        raise ValueError("chi matrices live on different register sizes")
    purity = float(np.trace(ideal.matrix @ ideal.matrix).real)
    if purity >= 1.0 - 1e-9:
        value = float(np.trace(chi.matrix @ ideal.matrix).real)
    else:
        root = _sqrt_psd(ideal.matrix)
        inner = root @ chi.matrix @ root
        value = float(np.sum(np.sqrt(np.clip(np.linalg.eigvalsh(inner), 0.0, None))) ** 2)
    return min(max(value, 0.0), 1.0)


def monte_carlo_uncertainty(
    table: CountTable,
    plan: TomographyPlan,
    ideal: ChiMatrix,
    iterations: int = 100,
    seed: int = 0,
    resample: str = "poisson",
) -> tuple[float, float]:
    """Fidelity mean and standard deviation under count resampling.

    Each iteration redraws every count from a Poisson law centered on the
    observed value, reconstructs, and scores against `ideal`. The
    "identity" resampler is a debug switch that reuses the observed counts
    verbatim (its standard deviation is exactly zero).
    """
    if table.exact:
        raise ValueError("Monte Carlo resampling needs counted data, not probabilities")
    if iterations < 2:
        raise ValueError(f"need at least 2 iterations, got {iterations}")
    if resample not in ("poisson", "identity"):
        raise ValueError(f"unknown resampler {resample!r}")
    fidelities = np.empty(iterations)
    for it in range(iterations):
        if resample == "poisson":
            rng = np.random.default_rng([seed, it])
            values = rng.poisson(table.values).astype(float)
        else:
            values = table.values
        resampled = CountTable(table.n_qubits, table.shots, values)
        chi = reconstruct_chi(resampled, plan)
        fidelities[it] = process_fidelity(chi, ideal)
    return float(fidelities.mean()), float(fidelities.std())


# ---------------------------------------------------------------------------
# channels of the six gates, as seen after decryption and as the server sees


def _kraus_channel(terms: Sequence[tuple[float, np.ndarray]]) -> Channel:
    def channel(rho: DensityMatrix) -> DensityMatrix:
        out = np.zeros_like(rho.matrix)
        for weight, op in terms:
            out += weight * (op @ rho.matrix @ op.conj().T)
        return DensityMatrix(rho.n_qubits, out)

    return channel


def _two_qubit_pad(control_key: EncKey, target_key: EncKey) -> np.ndarray:
    return np.kron(
        pauli_op(control_key.a, control_key.b), pauli_op(target_key.a, target_key.b)
    )


def _r_branch_terms(decrypted: bool) -> list[tuple[float, np.ndarray]]:
    p_mat = gate_matrix("P")
    terms = []
    for key in ALL_KEYS:
        for secret in ALL_AUX_SECRETS:
            x = correction_bit(key, secret)
            correction = p_mat if x else np.eye(2, dtype=complex)
            enc = pauli_op(key.a, key.b)
            for c in (0, 1):
                op = correction @ r_branch_operator(secret, c) @ enc
                if decrypted:
                    new_key = update_r(key, c, secret)
                    op = pauli_op(new_key.a, new_key.b) @ op
                terms.append((1.0 / 16.0, op))
    return terms


def channel_of_gate_decrypted(kind: str) -> Channel:
    """Encrypt, run the gate server-side, decrypt with the updated key;
    uniform average over keys, auxiliary secrets and measurement branches."""
    if kind == "R":
        return _kraus_channel(_r_branch_terms(decrypted=True))
    if kind == "CNOT":
        cnot = gate_matrix("CNOT")
        terms = []
        for ck in ALL_KEYS:
            for tk in ALL_KEYS:
                new_ck, new_tk = update_cnot(ck, tk)
                op = _two_qubit_pad(new_ck, new_tk) @ cnot @ _two_qubit_pad(ck, tk)
                terms.append((1.0 / 16.0, op))
        return _kraus_channel(terms)
    gate = gate_matrix(kind)
    terms = []
    for key in ALL_KEYS:
        new_key = update_clifford(kind, key)
        op = pauli_op(new_key.a, new_key.b) @ gate @ pauli_op(key.a, key.b)
        terms.append((0.25, op))
    return _kraus_channel(terms)


def channel_of_gate_server_view(kind: str) -> Channel:
    """What the server could reconstruct: the key-averaged input is pushed
    through the gate (or gadget, binned only by c) with no decryption."""
    if kind == "R":
        return _kraus_channel(_r_branch_terms(decrypted=False))
    if kind == "CNOT":
        cnot = gate_matrix("CNOT")
        terms = [
            (1.0 / 16.0, cnot @ _two_qubit_pad(ck, tk))
            for ck in ALL_KEYS
            for tk in ALL_KEYS
        ]
        return _kraus_channel(terms)
    gate = gate_matrix(kind)
    terms = [(0.25, gate @ pauli_op(key.a, key.b)) for key in ALL_KEYS]
    return _kraus_channel(terms)


def r_gadget_bin_channel(secret: AuxSecret, c: int) -> Channel:
    """Decrypted R-gate channel conditioned on one (y, d, c) bin.

    The measurement branch has probability exactly 1/2 for every input, so
    the conditional map is linear; averaged over keys it reproduces the
    bare R gate on its own.
    """
    if c not in (0, 1):
        raise ValueError(f"c must be 0 or 1, got {c!r}")
    p_mat = gate_matrix("P")
    terms = []
    for key in ALL_KEYS:
        x = correction_bit(key, secret)
        correction = p_mat if x else np.eye(2, dtype=complex)
        new_key = update_r(key, c, secret)
        op = (
            pauli_op(new_key.a, new_key.b)
            @ correction
            @ r_branch_operator(secret, c)
            @ pauli_op(key.a, key.b)
        )
        terms.append((0.5, op))  # 1/4 per key, times 1/(branch probability 1/2)
    return _kraus_channel(terms)


def ideal_gate_channel(kind: str) -> Channel:
    gate = gate_matrix(kind)
    return _kraus_channel([(1.0, gate)])
