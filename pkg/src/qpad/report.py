"""Report rendering: chi-matrix figures, JSON documents and CSV summaries.

Figures are rendered straight to files (no display); each one shows the
real and imaginary parts of a chi matrix as 3D bar charts over the Pauli
basis labels. Documents are written with sorted keys so identical inputs
produce byte-identical files.
"""

from __future__ import annotations

import csv
import json
from pathlib import Path
from typing import Sequence

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

from .tomography import ChiMatrix


def write_json_document(doc: dict, path: str | Path) -> None:
    Path(path).write_text(json.dumps(doc, sort_keys=True, indent=2) + "\n")


def chi_document(
    chi: ChiMatrix,
    gate: str,
    view: str,
    mode: str,
    shots: int,
    seed: int,
    fidelity: dict,
    monte_carlo: dict | None = None,
) -> dict:
    entries = [
        [[float(v.real), float(v.imag)] for v in row] for row in chi.matrix
    ]
    return {
        "status": "ok",
        "gate": gate,
        "view": view,
        "mode": mode,
        "shots": int(shots),
        "seed": int(seed),
        "n_qubits": chi.n_qubits,
        "basis": list(chi.labels),
        "chi": entries,
        "fidelity": fidelity,
        "monte_carlo": monte_carlo,
    }


def render_chi_figure(chi: ChiMatrix, title: str, path: str | Path) -> None:
    """Real and imaginary parts of chi as side-by-side 3D bar charts."""
    labels = chi.labels
    dim = len(labels)
    xs, ys = np.meshgrid(np.arange(dim), np.arange(dim), indexing="ij")
    xs = xs.ravel().astype(float)
    ys = ys.ravel().astype(float)
    width = 0.8
    fig = plt.figure(figsize=(11, 4.6) if dim <= 4 else (14, 6))
    for index, (part, name) in enumerate(
        ((chi.matrix.real, "Re"), (chi.matrix.imag, "Im"))
    ):
        ax = fig.add_subplot(1, 2, index + 1, projection="3d")
        heights = part.ravel()
        top = max(0.25, float(np.max(np.abs(part))))
        colors = np.where(heights >= 0, "#3b6fb6", "#c0504d")
        ax.bar3d(
            xs - width / 2,
            ys - width / 2,
            np.zeros_like(heights),
            width,
            width,
            heights,
            color=colors,
            shade=True,
        )
        ax.set_zlim(-top, top)
        ax.set_xticks(np.arange(dim))
        ax.set_yticks(np.arange(dim))
        fontsize = 9 if dim <= 4 else 6
        ax.set_xticklabels(labels, fontsize=fontsize)
        ax.set_yticklabels(labels, fontsize=fontsize)
        ax.set_title(f"{name}(chi)")
    fig.suptitle(title)
    fig.savefig(path, dpi=150, metadata={"Software": None})
    plt.close(fig)


SUMMARY_FIELDS = (
    "gate",
    "view",
    "mode",
    "shots",
    "fidelity_vs_gate",
    "fidelity_vs_depolarizing",
    "mc_mean",
    "mc_std",
)


def write_summary_csv(rows: Sequence[dict], path: str | Path) -> None:
    """Delimited summary, one row per (gate, view)."""
    with open(path, "w", newline="") as handle:
        writer = csv.DictWriter(handle, fieldnames=SUMMARY_FIELDS)
        writer.writeheader()
        for row in rows:
            writer.writerow({field: row.get(field, "") for field in SUMMARY_FIELDS})
