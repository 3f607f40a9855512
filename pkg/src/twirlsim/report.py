"""CSV and SVG output for sweep results."""

from __future__ import annotations

import csv
from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402

from twirlsim.sweep import SweepResult, SweepRow  # noqa: E402

CSV_COLUMNS = ["p_step", "E", "phi", "T2_over_T1", "mode", "P", "err", "cycles_mean", "wall_s"]

# filled symbols for the exact model, open symbols for the twirled ones
MODE_STYLE = {
    "exact": dict(marker="o", fillstyle="full", linestyle="-"),
    "pta": dict(marker="o", fillstyle="none", linestyle="--"),
    "bound": dict(marker="^", fillstyle="none", linestyle=":"),
    "mc": dict(marker="s", fillstyle="none", linestyle="-."),
}

RC = {
    "font.size": 10,
    "axes.labelsize": 11,
    "legend.fontsize": 7,
    "lines.linewidth": 1.0,
    "lines.markersize": 5,
    "svg.hashsalt": "twirlsim",
    "svg.fonttype": "none",
}


def _fmt(value) -> str:
    if isinstance(value, float):
        return repr(value)
    return str(value)


def emit_csv(res: SweepResult, path) -> Path:
    path = Path(path)
    try:
        with open(path, "w", newline="") as fh:
            writer = csv.writer(fh, lineterminator="\n")
            writer.writerow(CSV_COLUMNS)
            for row in res.rows:
                writer.writerow([_fmt(getattr(row, c)) for c in CSV_COLUMNS])
    except OSError as exc:
        raise OSError(f"cannot write CSV {path}: {exc}") from exc
    return path


def read_csv(path) -> SweepResult:
    rows = []
    with open(path, newline="") as fh:
        reader = csv.DictReader(fh)
        if reader.fieldnames != CSV_COLUMNS:
            raise ValueError(f"{path}: unexpected header {reader.fieldnames}")
        for rec in reader:
            rows.append(SweepRow(**{c: (rec[c] if c == "mode" else float(rec[c]))
                                    for c in CSV_COLUMNS}))
    return SweepResult(rows)


def _curves(res: SweepResult):
    curves = {}
    for row in res.rows:
        curves.setdefault((row.E, row.mode), []).append(row)
    return curves


def emit_plot(res: SweepResult, path, title: str | None = None):
    """Log-log failure probability vs p_step, one curve per (gate error, mode).

    Points with P = 0 cannot sit on log axes and are left out. Returns the
    figure so callers can inspect the drawn curves.
    """
    path = Path(path)
    with plt.rc_context(RC):
        fig, ax = plt.subplots(figsize=(5.0, 3.8))
        curves = _curves(res)
        gate_errors = sorted({E for E, _ in curves})
        colors = {E: plt.cm.viridis(i / max(len(gate_errors) - 1, 1))
                  for i, E in enumerate(gate_errors)}
        for (E, mode), rows in curves.items():
            pts = sorted((r.p_step, r.P) for r in rows if r.P > 0)
            style = MODE_STYLE.get(mode, dict(marker="x", linestyle="-"))
            ax.plot([p for p, _ in pts], [v for _, v in pts], color=colors[E],
                    label=f"E={E:g} {mode}", **style)
        ax.set_xscale("log")
        ax.set_yscale("log")
        ax.set_xlabel(r"$p_{\rm step}$")
        ax.set_ylabel("failure probability $P$")
        if res.rows:
            r0 = res.rows[0]
            title = title or rf"$T_2/T_1={r0.T2_over_T1:g}$, $\phi={r0.phi:.3g}$"
        if title:
            ax.set_title(title, fontsize=10)
        if curves:
            ax.legend(ncol=2, frameon=False)
        ax.grid(True, which="major", alpha=0.3)
        fig.tight_layout()
        caption = ("Failure probability vs per-step decoherence error; filled = exact, "
                   "open = Pauli-twirled models")
        try:
            fig.savefig(path, format="svg", metadata={"Title": title or "sweep",
                                                      "Description": caption, "Date": None})
        except OSError as exc:
            raise OSError(f"cannot write plot {path}: {exc}") from exc
        plt.close(fig)
    return fig
