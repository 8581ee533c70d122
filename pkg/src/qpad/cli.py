"""Command line interface: run, qpt, verify and report."""

from __future__ import annotations

import sys
from dataclasses import asdict
from pathlib import Path

import click

from .protocol import (
    CircuitParseError,
    SessionConfig,
    load_circuit,
    reference_apply,
    run_session,
    write_transcript_jsonl,
)
from .report import (
    chi_document,
    render_chi_figure,
    write_json_document,
    write_summary_csv,
)
from .sim import GATE_KINDS, state_fidelity, zero_state
from .tomography import (
    TomographyPlan,
    channel_of_gate_decrypted,
    channel_of_gate_server_view,
    collect,
    depolarizing_chi,
    ideal_gate_chi,
    monte_carlo_uncertainty,
    process_fidelity,
    reconstruct_chi,
)
from .verify import full_table

SELF_CHECK_TOL = 1e-9
MC_ITERATIONS = 100


@click.group()
def main() -> None:
    """Quantum one-time-pad computing toolkit.

    Run circuits on encrypted registers, tomograph every gate from the
    client and server viewpoints, verify the key-update algebra
    exhaustively, and render report figures with delimited summaries.
    """


@main.command("run")
@click.option("--circuit", "circuit_path", required=True, type=click.Path(dir_okay=False), help="Circuit JSON file.")
@click.option("--seed", default=0, show_default=True, help="Session seed (keys, secrets, sampled branches).")
@click.option("--mode", type=click.Choice(["exact", "sampled"]), default="exact", show_default=True, help="Enumerate both gadget branches, or sample them.")
@click.option("--out", "out_path", required=True, type=click.Path(dir_okay=False), help="Result document (JSON); the transcript goes to <out>.transcript.jsonl.")
def cmd_run(circuit_path: str, seed: int, mode: str, out_path: str) -> None:
    """Run one encrypted session on |0...0> and self-check the output."""
    try:
        circuit = load_circuit(circuit_path)
    except (CircuitParseError, OSError) as exc:
        write_json_document({"status": "parse-error", "error": str(exc)}, out_path)
        click.echo(f"error: {exc}", err=True)
        sys.exit(1)
    config = SessionConfig(circuit, zero_state(circuit.n_qubits), seed=seed, mode=mode)
    result = run_session(config)
    reference = reference_apply(circuit, config.input_state)
    fidelity = min(
        state_fidelity(branch.decrypted_output, reference)
        for branch in result.branches
    )
    ok = fidelity >= 1.0 - SELF_CHECK_TOL
    transcript_path = out_path + ".transcript.jsonl"
    doc = {
        "status": "ok" if ok else "self-check-failed",
        "n_qubits": circuit.n_qubits,
        "n_gates": len(circuit.ops),
        "n_r_gates": circuit.r_count,
        "mode": mode,
        "seed": seed,
        "branches": len(result.branches),
        "fidelity_vs_reference": fidelity,
        "decrypted_amplitudes": [
            [float(a.real), float(a.imag)]
            for a in result.decrypted_output.amplitudes
        ],
        "transcript_path": transcript_path,
    }
    write_json_document(doc, out_path)
    write_transcript_jsonl(result.transcript, transcript_path)
    click.echo(
        f"{doc['status']}: fidelity {fidelity:.12f} over {len(result.branches)} "
        f"branch(es); wrote {out_path}"
    )
    if not ok:
        sys.exit(1)


@main.command("qpt")
@click.option("--gate", type=click.Choice(GATE_KINDS), required=True, help="Gate to tomograph.")
@click.option("--view", type=click.Choice(["decrypted", "server"]), default="decrypted", show_default=True, help="Client (decrypted) or server viewpoint.")
@click.option("--mode", type=click.Choice(["exact", "sampled"]), default="exact", show_default=True)
@click.option("--shots", default=10000, show_default=True, help="Shots per (input, setting) pair in sampled mode.")
@click.option("--seed", default=0, show_default=True)
@click.option("--out", "out_path", required=True, type=click.Path(dir_okay=False), help="Chi document (JSON).")
def cmd_qpt(gate: str, view: str, mode: str, shots: int, seed: int, out_path: str) -> None:
    """Reconstruct one gate's chi matrix from tomographic data."""
    if mode == "sampled" and shots < 1:
        click.echo("error: sampled mode needs shots >= 1", err=True)
        sys.exit(1)
    n_qubits = 2 if gate == "CNOT" else 1
    channel = (
        channel_of_gate_decrypted(gate)
        if view == "decrypted"
        else channel_of_gate_server_view(gate)
    )
    plan = TomographyPlan(n_qubits, 0 if mode == "exact" else shots)
    table = collect(channel, plan, seed=seed)
    chi = reconstruct_chi(table, plan)
    if view == "decrypted":
        reference_name, reference = "ideal-gate", ideal_gate_chi(gate)
    else:
        reference_name, reference = "depolarizing", depolarizing_chi(n_qubits)
    fidelity = process_fidelity(chi, reference)
    monte_carlo = None
    if mode == "sampled":
        mean, std = monte_carlo_uncertainty(
            table, plan, reference, iterations=MC_ITERATIONS, seed=seed
        )
        monte_carlo = {"iterations": MC_ITERATIONS, "mean": mean, "std": std}
    doc = chi_document(
        chi,
        gate=gate,
        view=view,
        mode=mode,
        shots=0 if mode == "exact" else shots,
        seed=seed,
        fidelity={"reference": reference_name, "value": fidelity},
        monte_carlo=monte_carlo,
    )
    write_json_document(doc, out_path)
    line = f"{gate} ({view}): fidelity vs {reference_name} = {fidelity:.9f}"
    if monte_carlo is not None:
        line += f" (mc {monte_carlo['mean']:.6f} +/- {monte_carlo['std']:.6f})"
    click.echo(line + f"; wrote {out_path}")


@main.command("verify")
@click.option("--seed", default=0, show_default=True)
@click.option("--out", "out_path", default=None, type=click.Path(dir_okay=False), help="Optional table document (JSON).")
def cmd_verify(seed: int, out_path: str | None) -> None:
    """Print pass/fail for every pad and gadget identity."""
    rows = full_table(seed=seed)
    for row in rows:
        status = "PASS" if row.passed else "FAIL"
        click.echo(f"{status}  {row.suite:<10} {row.name}  ({row.note})")
    failed = [row for row in rows if not row.passed]
    identity_rows = [r for r in rows if r.suite != "security"]
    click.echo(
        f"{len(rows) - len(failed)}/{len(rows)} rows passed "
        f"({len(identity_rows)} identity rows)"
    )
    if out_path is not None:
        doc = {
            "status": "ok" if not failed else "failed",
            "seed": seed,
            "rows": [asdict(row) for row in rows],
        }
        write_json_document(doc, out_path)
    if failed:
        sys.exit(1)


@main.command("report")
@click.option("--out-dir", "out_dir", required=True, type=click.Path(file_okay=False), help="Directory for figures, chi documents and summary.csv.")
@click.option("--mode", type=click.Choice(["exact", "sampled"]), default="exact", show_default=True)
@click.option("--shots", default=10000, show_default=True)
@click.option("--seed", default=0, show_default=True)
@click.option("--gates", default=",".join(GATE_KINDS), show_default=True, help="Comma-separated gate subset.")
def cmd_report(out_dir: str, mode: str, shots: int, seed: int, gates: str) -> None:
    """Tomograph gates in both views; render figures and a CSV summary."""
    kinds = [g.strip() for g in gates.split(",") if g.strip()]
    unknown = [g for g in kinds if g not in GATE_KINDS]
    if unknown or not kinds:
        click.echo(f"error: unknown gate(s) {unknown}", err=True)
        sys.exit(1)
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    summary_rows = []
    for gate in kinds:
        n_qubits = 2 if gate == "CNOT" else 1
        for view, channel in (
            ("decrypted", channel_of_gate_decrypted(gate)),
            ("server", channel_of_gate_server_view(gate)),
        ):
            plan = TomographyPlan(n_qubits, 0 if mode == "exact" else shots)
            table = collect(channel, plan, seed=seed)
            chi = reconstruct_chi(table, plan)
            f_gate = process_fidelity(chi, ideal_gate_chi(gate))
            f_depol = process_fidelity(chi, depolarizing_chi(n_qubits))
            reference = (
                ("ideal-gate", f_gate) if view == "decrypted" else ("depolarizing", f_depol)
            )
            monte_carlo = None
            if mode == "sampled":
                ref_chi = ideal_gate_chi(gate) if view == "decrypted" else depolarizing_chi(n_qubits)
                mean, std = monte_carlo_uncertainty(
                    table, plan, ref_chi, iterations=MC_ITERATIONS, seed=seed
                )
                monte_carlo = {"iterations": MC_ITERATIONS, "mean": mean, "std": std}
            stem = f"chi_{gate}_{view}"
            render_chi_figure(chi, f"{gate} ({view} view, {mode})", out / f"{stem}.png")
            write_json_document(
                chi_document(
                    chi,
                    gate=gate,
                    view=view,
                    mode=mode,
                    shots=0 if mode == "exact" else shots,
                    seed=seed,
                    fidelity={"reference": reference[0], "value": reference[1]},
                    monte_carlo=monte_carlo,
                ),
                out / f"{stem}.json",
            )
            summary_rows.append(
                {
                    "gate": gate,
                    "view": view,
                    "mode": mode,
                    "shots": 0 if mode == "exact" else shots,
                    "fidelity_vs_gate": f"{f_gate:.12f}",
                    "fidelity_vs_depolarizing": f"{f_depol:.12f}",
                    "mc_mean": "" if monte_carlo is None else f"{monte_carlo['mean']:.12f}",
                    "mc_std": "" if monte_carlo is None else f"{monte_carlo['std']:.12f}",
                }
            )
            click.echo(
                f"{gate} ({view}): fidelity vs {reference[0]} = {reference[1]:.9f}"
            )
    write_summary_csv(summary_rows, out / "summary.csv")
    click.echo(f"wrote {len(summary_rows)} figures and documents to {out}")


if __name__ == "__main__":
    main()
