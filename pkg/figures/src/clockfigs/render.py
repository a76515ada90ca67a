"""Figure builders: each reads the CSVs of one experiment output directory
and produces a deterministic SVG.

Figure ids:
  fig2b  mass-defect fraction vs delta/Omega         (dressing-scan dir)
  fig2c  cavity couplings and their ratio            (dressing-scan dir)
  fig3   synchronization panels: omega_j, variance,
         squeezing, Renyi entropy, collectivity      (sync dir)
  fig4   t_syn ratio vs theta, Delta t_syn vs Q,
         witness C_yz vs F_Q                         (squeeze-scan dir)
  supp   closed-form t_syn scaling check             (analytics-check dir)

Missing or ill-formed CSVs raise InputError with a column diagnostic.
"""

from __future__ import annotations

import csv
import json
from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt
import numpy as np

# fixed salt and no timestamps: identical inputs give identical SVG bytes
matplotlib.rcParams["svg.hashsalt"] = "clockfigs"
matplotlib.rcParams["figure.dpi"] = 100

FIGURE_IDS = ("fig2b", "fig2c", "fig3", "fig4", "supp")


class InputError(ValueError):
    """Missing or ill-formed input file."""


def load_csv(path: Path, required: list[str]) -> dict[str, np.ndarray]:
    """Read a CSV into float columns; empty cells become NaN."""
    if not path.is_file():
        raise InputError(f"missing input file: {path}")
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise InputError(f"{path}: empty file") from None
        missing = [c for c in required if c not in header]
        if missing:
            raise InputError(f"{path}: missing columns {missing}; found {header}")
        rows = list(reader)
    if not rows:
        raise InputError(f"{path}: no data rows")
    cols = {name: [] for name in header}
    for k, row in enumerate(rows, start=2):
        if len(row) != len(header):
            raise InputError(f"{path}: line {k} has {len(row)} cells, header has {len(header)}")
        for name, cell in zip(header, row):
            try:
                cols[name].append(float(cell) if cell else np.nan)
            except ValueError:
                raise InputError(f"{path}: line {k}, column {name!r}: not a number: {cell!r}") from None
    return {name: np.array(vals) for name, vals in cols.items()}


def _save(fig, out_path: Path) -> None:
    out_path = Path(out_path)
    out_path.parent.mkdir(parents=True, exist_ok=True)
    fig.savefig(out_path, format="svg", metadata={"Date": None})
    plt.close(fig)


def render_fig2b(in_dir: Path, out_path: Path) -> None:
    data = load_csv(in_dir / "massdefect.csv", ["delta_over_omega", "mass_defect_fraction"])
    fig, ax = plt.subplots(figsize=(4.2, 3.2), constrained_layout=True)
    ax.plot(data["delta_over_omega"], data["mass_defect_fraction"], color="tab:blue")
    ax.axhline(0.5, ls=":", lw=0.8, color="gray")
    ax.set_xlabel(r"$\delta/\Omega$")
    ax.set_ylabel(r"$\Delta M/\Delta M_0$")
    ax.set_title("Tunable mass defect")
    _save(fig, out_path)


def render_fig2c(in_dir: Path, out_path: Path) -> None:
    data = load_csv(
        in_dir / "couplings.csv",
        ["delta_over_omega", "jperp_over_chi", "jz_over_chi", "jz_over_jperp"],
    )
    fig, (ax1, ax2) = plt.subplots(1, 2, figsize=(7.0, 3.2), constrained_layout=True)
    x = data["delta_over_omega"]
    ax1.plot(x, data["jperp_over_chi"], label=r"$J_\perp/\chi$")
    ax1.plot(x, data["jz_over_chi"], label=r"$J_z/\chi$")
    ax1.set_xlabel(r"$\delta/\Omega$")
    ax1.set_ylabel(r"coupling / $\chi$")
    ax1.legend(frameon=False)
    ax2.plot(x, data["jz_over_jperp"], color="tab:green")
    ax2.axhline(1.0, ls=":", lw=0.8, color="gray")
    hp_file = in_dir / "heisenberg.json"
    if hp_file.is_file():
        hp = json.loads(hp_file.read_text()).get("delta_over_omega")
        if hp is not None:
            ax2.axvline(hp, ls="--", lw=0.8, color="tab:red")
    ax2.set_xlabel(r"$\delta/\Omega$")
    ax2.set_ylabel(r"$J_z/J_\perp$")
    fig.suptitle("Cavity-mediated couplings")
    _save(fig, out_path)


def render_fig3(in_dir: Path, out_path: Path) -> None:
    omega = load_csv(in_dir / "omega_j.csv", ["t_s", "njperp_t"])
    var = load_csv(in_dir / "variance.csv", ["njperp_t", "freq_variance_rad2_s2"])
    xi2 = load_csv(in_dir / "xi2.csv", ["njperp_t", "xi2"])
    renyi = load_csv(in_dir / "renyi.csv", ["njperp_t", "renyi_half_chain"])
    kcol = load_csv(in_dir / "kcol.csv", ["njperp_t", "collectivity"])
    site_cols = sorted(
        (c for c in omega if c.startswith("omega_")),
        key=lambda c: int(c.split("_")[1]),
    )
    if not site_cols:
        raise InputError(f"{in_dir / 'omega_j.csv'}: no omega_<j>_rad_s columns")

    fig, axes = plt.subplots(2, 2, figsize=(8.0, 5.6), constrained_layout=True)
    t = omega["njperp_t"]
    cmap = plt.get_cmap("coolwarm")
    for i, col in enumerate(site_cols):
        axes[0, 0].plot(t, omega[col], lw=0.8, color=cmap(i / max(1, len(site_cols) - 1)))
    axes[0, 0].set_ylabel(r"$\omega_j(t)$ (rad/s)")
    axes[0, 0].set_title("Per-site frequencies")

    axes[0, 1].semilogy(var["njperp_t"], var["freq_variance_rad2_s2"], color="tab:purple")
    axes[0, 1].set_ylabel(r"Var$_j\,\omega_j$")
    axes[0, 1].set_title("Across-site frequency variance")

    axes[1, 0].plot(xi2["njperp_t"], xi2["xi2"], color="tab:orange")
    axes[1, 0].axhline(1.0, ls=":", lw=0.8, color="gray")
    axes[1, 0].set_ylabel(r"$\xi^2$")
    axes[1, 0].set_title("Spin squeezing")

    axes[1, 1].plot(renyi["njperp_t"], renyi["renyi_half_chain"], label="Renyi (half chain)")
    axes[1, 1].plot(kcol["njperp_t"], kcol["collectivity"], label=r"$K_{col}$")
    axes[1, 1].legend(frameon=False)
    axes[1, 1].set_title("Entanglement and collectivity")
    for ax in axes.flat:
        ax.set_xlabel(r"$N J_\perp t$")
    _save(fig, out_path)


def render_fig4(in_dir: Path, out_path: Path) -> None:
    theta = load_csv(in_dir / "tsyn_vs_theta.csv", ["theta_rad", "ratio_ed", "ratio_analytic"])
    qscan = load_csv(in_dir / "dtsyn_vs_Q.csv", ["q_over_2pi", "dtsyn_ed_s", "dtsyn_analytic_s"])
    witness = load_csv(in_dir / "cyz_fq.csv", ["q_over_2pi", "c_yz", "f_q"])

    fig, (ax1, ax2, ax3) = plt.subplots(1, 3, figsize=(10.5, 3.3), constrained_layout=True)
    ax1.plot(theta["theta_rad"], theta["ratio_analytic"], "k--", lw=1.0, label="closed form")
    ax1.plot(theta["theta_rad"], theta["ratio_ed"], "o", ms=4, color="tab:blue", label="ED")
    ax1.set_xlabel(r"$\theta$ (rad)")
    ax1.set_ylabel(r"$t_{syn}/t_{syn,0}$")
    ax1.legend(frameon=False)

    ax2.plot(qscan["q_over_2pi"], qscan["dtsyn_analytic_s"], "k--", lw=1.0, label="closed form")
    ax2.plot(qscan["q_over_2pi"], qscan["dtsyn_ed_s"], "s", ms=4, color="tab:red", label="ED")
    ax2.set_xlabel(r"$Q/2\pi$")
    ax2.set_ylabel(r"$\Delta t_{syn}$ (s)")
    ax2.legend(frameon=False)

    ax3.plot(witness["q_over_2pi"], witness["f_q"], "k--", lw=1.0, label=r"$F_Q$")
    ax3.plot(witness["q_over_2pi"], witness["c_yz"], "^", ms=4, color="tab:green", label=r"$C_{yz}$")
    ax3.set_xlabel(r"$Q/2\pi$")
    ax3.set_ylabel("witness")
    ax3.legend(frameon=False)
    fig.suptitle("Shearing-tuned synchronization and entanglement witness")
    _save(fig, out_path)


def render_supp(in_dir: Path, out_path: Path) -> None:
    data = load_csv(
        in_dir / "tsyn_closed_form.csv",
        ["n_atoms", "jz_over_jperp", "tsyn_analytic_s", "tsyn_ed_s"],
    )
    fig, ax = plt.subplots(figsize=(4.6, 3.4), constrained_layout=True)
    for jz_frac, marker in ((0.0, "o"), (1.0, "s")):
        sel = data["jz_over_jperp"] == jz_frac
        if not np.any(sel):
            continue
        ax.plot(
            data["n_atoms"][sel], data["tsyn_analytic_s"][sel], "k--", lw=1.0,
            label=None if jz_frac else "closed form",
        )
        ax.plot(
            data["n_atoms"][sel], data["tsyn_ed_s"][sel], marker, ms=5,
            label=rf"ED, $J_z/J_\perp={jz_frac:g}$",
        )
    ax.set_xlabel("N")
    ax.set_ylabel(r"$t_{syn}$ (s)")
    ax.legend(frameon=False)
    ax.set_title("Synchronization-time scaling")
    _save(fig, out_path)


RENDERERS = {
    "fig2b": render_fig2b,
    "fig2c": render_fig2c,
    "fig3": render_fig3,
    "fig4": render_fig4,
    "supp": render_supp,
}


def render(fig_id: str, in_dir, out_path) -> None:
    if fig_id not in RENDERERS:
        raise InputError(f"unknown figure id {fig_id!r}; have {sorted(RENDERERS)}")
    RENDERERS[fig_id](Path(in_dir), Path(out_path))
