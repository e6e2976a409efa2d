"""Optional SVG figures rendered from scenario CSVs (requires matplotlib)."""

from __future__ import annotations

from pathlib import Path

import numpy as np


def _load(path: Path):
    return np.genfromtxt(path, delimiter=",", names=True, dtype=None, encoding="utf-8")


def render(scenario: str, out_dir) -> list[Path]:
    try:
        import matplotlib
        matplotlib.use("Agg")
        import matplotlib.pyplot as plt
    except ImportError as exc:
        raise RuntimeError("plots need matplotlib: pip install 'artifact[plots]'") from exc
    # fixed metadata keeps the SVG bytes reproducible
    plt.rcParams["svg.hashsalt"] = "qcdma"
    out = Path(out_dir)
    made = []

    def save(fig, name):
        p = out / name
        fig.savefig(p, format="svg", metadata={"Date": None})
        plt.close(fig)
        made.append(p)

    if scenario == "chaos":
        d = _load(out / "trajectory.csv")
        fig, ax = plt.subplots(figsize=(6, 3))
        ax.plot(d["t"], d["x"], lw=0.5)
        ax.set_xlabel("t (1/omega0)")
        ax.set_ylabel("x")
        save(fig, "trajectory.svg")
    elif scenario == "sync":
        d = _load(out / "sync.csv")
        fig, ax = plt.subplots(figsize=(6, 3))
        ax.semilogy(d["t"], np.abs(d["diff"]) + 1e-300, lw=0.5)
        ax.set_xlabel("t (1/omega0)")
        ax.set_ylabel("|x_a - x_b|")
        save(fig, "sync.svg")
    elif scenario == "spectrum":
        d = _load(out / "psd.csv")
        fig, ax = plt.subplots(figsize=(6, 3))
        sel = d["omega"] > 0
        ax.loglog(d["omega"][sel], d["density"][sel] + 1e-300, lw=0.7)
        ax.set_xlabel("omega / omega0")
        ax.set_ylabel("S(omega)")
        save(fig, "psd.svg")
    elif scenario == "fidelity-sweep":
        d = _load(out / "fidelity_sweep.csv")
        x = d[d.dtype.names[0]]
        fig, (a1, a2) = plt.subplots(2, 1, figsize=(6, 5), sharex=True)
        a1.plot(x, d["F1"], "o-", ms=3, label="F1")
        a1.plot(x, d["F2"], "s-", ms=3, label="F2")
        a1.plot(x, 1 - d["M"], "k--", lw=0.8, label="1 - M")
        a1.legend()
        a1.set_ylabel("fidelity")
        a2.plot(x, d["lambda"], "o-", ms=3)
        a2.axhline(0, color="k", lw=0.5)
        a2.set_ylabel("lambda")
        a2.set_xlabel(d.dtype.names[0])
        save(fig, "fidelity_sweep.svg")
    elif scenario == "p0-sweep":
        d = _load(out / "p0_sweep.csv")
        fig, ax = plt.subplots(figsize=(6, 3))
        for k in ("F1", "F2", "Fbar", "one_minus_M"):
            ax.plot(d["p0"], d[k], label=k)
        ax.legend()
        ax.set_xlabel("p0")
        save(fig, "p0_sweep.svg")
    elif scenario == "capacity":
        d = _load(out / "rates.csv")
        fig, axes = plt.subplots(1, 2, figsize=(8, 3), sharey=True)
        for ax, col in zip(axes, ("classical_rate", "quantum_rate")):
            for kind in ("Single", "FDMA", "CDMA"):
                for N in sorted(set(d["N"][d["kind"] == kind])):
                    if kind != "Single" and N not in (2, 8):
                        continue
                    m = (d["kind"] == kind) & (d["N"] == N)
                    ax.plot(d["eta"][m], d[col][m], label=f"{kind} N={N}")
            ax.set_xlabel("eta")
            ax.set_title(col)
        axes[0].legend(fontsize=7)
        save(fig, "rates.svg")
    return made
