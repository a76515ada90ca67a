"""Experiment driver: wires configs to the physics modules, runs the three
protocols (synchronization, squeeze-scan, Lindblad dissipation check) plus
the dressing scan, the relativistic budget table and the analytics
self-check, and serializes everything as CSV/JSON with a run manifest.

All pipelines are deterministic: identical configs reproduce identical
bytes.
"""

from __future__ import annotations

import csv
import hashlib
import json
import time
from dataclasses import asdict, dataclass, field
from pathlib import Path

import numpy as np

from . import __version__, analytics, dressing, evolve, gr_budget, observables, spin_core
from .hamiltonian import (
    CavityParams,
    CgrParams,
    build_hcgr,
    cavity_to_couplings,
    oat_unitary_apply,
    rotation_apply,
)

KINDS = ("sync", "squeeze-scan", "lindblad", "dressing-scan", "gr-budget", "analytics-check")


class ConfigError(ValueError):
    pass


@dataclass
class ExperimentConfig:
    kind: str
    n_atoms: int = 16
    j_perp: float = None  # rad/s; default 1/N so that N*J_perp = 1
    j_z: float = None  # default equals j_perp (Heisenberg point)
    omega_split_over_njperp: float = 0.3125
    centered: bool = True
    dt_sample: float = None
    t_final: float = None
    krylov_dim: int = 30
    step_tolerance: float = 1e-10
    # squeeze-scan
    q_over_2pi: float = 0.6
    theta_points: int = 21
    q_over_2pi_grid: tuple = tuple(round(0.1 * k, 1) for k in range(1, 11))
    # lindblad
    gamma_over_jperp: float = 0.032
    shearing_initial: float = 0.0
    # dressing scan
    delta_over_omega_grid: tuple = tuple(np.round(np.linspace(-5, 5, 101), 6))
    f_spin: float = 4.5
    m_f: float = 1.5
    # gr budget
    depth_er: float = 300.0
    separation: float = 1e-2
    seed: int = 0  # reserved; current experiments are deterministic

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ConfigError(f"unknown experiment kind {self.kind!r}")
        if self.j_perp is None:
            self.j_perp = 1.0 / self.n_atoms
        if self.j_z is None:
            self.j_z = self.j_perp

    @property
    def nj_perp(self) -> float:
        return self.n_atoms * self.j_perp

    def cgr_params(self) -> CgrParams:
        omega_split = self.omega_split_over_njperp * self.nj_perp
        return CgrParams(
            n_sites=self.n_atoms,
            j_perp=self.j_perp,
            j_z=self.j_z,
            omega_grs=omega_split / (self.n_atoms - 1),
            centered=self.centered,
        )

    def propagator(self) -> evolve.PropagatorConfig:
        dt = self.dt_sample
        t_final = self.t_final
        if dt is None:
            dt = (np.pi / 200) / self.nj_perp
            omega_split = self.omega_split_over_njperp * self.nj_perp
            if omega_split > 0:
                dt = min(dt, (np.pi / 8) / omega_split)
        if t_final is None:
            t_final = 2 * np.pi / self.nj_perp
        return evolve.PropagatorConfig(
            dt_sample=dt,
            t_final=t_final,
            krylov_dim=self.krylov_dim,
            step_tolerance=self.step_tolerance,
        )

    def to_json(self) -> str:
        d = asdict(self)
        d["q_over_2pi_grid"] = list(d["q_over_2pi_grid"])
        d["delta_over_omega_grid"] = list(d["delta_over_omega_grid"])
        return json.dumps(d, sort_keys=True, indent=2)

    @classmethod
    def from_json(cls, text: str) -> "ExperimentConfig":
        d = json.loads(text)
        for key in ("q_over_2pi_grid", "delta_over_omega_grid"):
            if key in d:
                d[key] = tuple(d[key])
        known = cls.__dataclass_fields__
        unknown = set(d) - set(known)
        if unknown:
            raise ConfigError(f"unknown config fields: {sorted(unknown)}")
        if "kind" not in d:
            raise ConfigError("config is missing 'kind'")
        return cls(**d)


PRESETS = {
    "fig3b": dict(kind="sync", n_atoms=16, omega_split_over_njperp=0.3125),
    "fig3c": dict(kind="sync", n_atoms=16, omega_split_over_njperp=3.125),
    # the scan tolerances are at the percent level, so the squeeze scan can
    # sample twice as coarsely as the sync presets
    "fig4": dict(
        kind="squeeze-scan", n_atoms=16, q_over_2pi=0.6, theta_points=21,
        dt_sample=float(np.pi / 100),
    ),
}


def preset_config(name: str) -> ExperimentConfig:
    if name not in PRESETS:
        raise ConfigError(f"unknown preset {name!r}; have {sorted(PRESETS)}")
    return ExperimentConfig(**PRESETS[name])


# ---------------------------------------------------------------------------
# serialization helpers

def _fmt(x) -> str:
    if x is None or (isinstance(x, float) and np.isnan(x)):
        return ""
    if isinstance(x, float):
        return format(x, ".17g")
    return str(x)


def write_csv(path: Path, header: list[str], rows) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(header)
        for row in rows:
            writer.writerow([_fmt(x) for x in row])


def write_manifest(out_dir: Path, cfg: ExperimentConfig, wall_time: float) -> None:
    files = {}
    for p in sorted(out_dir.iterdir()):
        if p.name == "manifest.json" or not p.is_file():
            continue
        files[p.name] = hashlib.sha256(p.read_bytes()).hexdigest()
    manifest = {
        "config_sha256": hashlib.sha256(cfg.to_json().encode()).hexdigest(),
        "code_version": __version__,
        "wall_time_s": wall_time,
        "files": files,
    }
    (out_dir / "manifest.json").write_text(json.dumps(manifest, indent=2, sort_keys=True))


def _prepare_all_plus_x(n: int) -> np.ndarray:
    psi = spin_core.product_state(n, (1.0, 0.0))  # all |down>
    return rotation_apply(psi, "y", np.pi / 2, sign=+1)


# ---------------------------------------------------------------------------
# protocols

def run_sync(cfg: ExperimentConfig, out_dir) -> dict:
    """All-down -> R_y^{-pi/2} -> H_cGR evolution; emits per-site frequencies,
    frequency variance, squeezing, Renyi entropy, collectivity and the
    synchronization report."""
    if cfg.kind != "sync":
        raise ConfigError("run_sync needs kind='sync'")
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    t0 = time.monotonic()

    p = cfg.cgr_params()
    prop = cfg.propagator()
    n = cfg.n_atoms
    h = build_hcgr(p)
    psi = _prepare_all_plus_x(n)
    rec = observables.StateRecorder(n)
    evolve.evolve_unitary(psi, h, prop, rec)
    ts = rec.timeseries()

    times_w, omega = observables.site_frequencies(ts)
    report = observables.detect_tsyn(omega, times_w)
    xi2 = observables.squeezing_curve(ts, n)
    kcol = ts.total_spin_sq / ((n / 2) * (n / 2 + 1))
    renyi = np.array(
        [observables.renyi_from_purity(pu, n) for pu in ts.half_chain_purity]
    )

    njp = cfg.nj_perp
    write_csv(
        out_dir / "omega_j.csv",
        ["t_s", "njperp_t"] + [f"omega_{j}_rad_s" for j in range(n)],
        [[times_w[k], njp * times_w[k], *omega[k]] for k in range(len(times_w))],
    )
    write_csv(
        out_dir / "variance.csv",
        ["t_s", "njperp_t", "freq_variance_rad2_s2"],
        [[times_w[k], njp * times_w[k], report.variance_curve[k]] for k in range(len(times_w))],
    )
    write_csv(
        out_dir / "xi2.csv",
        ["t_s", "njperp_t", "xi2"],
        [[ts.times[k], njp * ts.times[k], xi2[k]] for k in range(len(ts.times))],
    )
    write_csv(
        out_dir / "renyi.csv",
        ["t_s", "njperp_t", "renyi_half_chain"],
        [[ts.times[k], njp * ts.times[k], renyi[k]] for k in range(len(ts.times))],
    )
    write_csv(
        out_dir / "kcol.csv",
        ["t_s", "njperp_t", "collectivity"],
        [[ts.times[k], njp * ts.times[k], kcol[k]] for k in range(len(ts.times))],
    )
    summary = {
        "synchronized": report.synchronized,
        "t_syn_s": report.t_syn,
        "njperp_t_syn": None if report.t_syn is None else njp * report.t_syn,
        "omega_split_rad_s": p.omega_split,
        "omega_at_tsyn_rad_s": None
        if report.omega_at_tsyn is None
        else list(report.omega_at_tsyn),
    }
    (out_dir / "sync_report.json").write_text(json.dumps(summary, indent=2, sort_keys=True))
    write_manifest(out_dir, cfg, time.monotonic() - t0)
    return {"report": report, "timeseries": ts, "xi2": xi2, "kcol": kcol, "renyi": renyi}


def _tsyn_for_state(psi, h, prop, n) -> observables.SyncReport:
    rec = observables.StateRecorder(n, half_chain=False, full=False)
    evolve.evolve_unitary(psi, h, prop, rec)
    ts = rec.timeseries()
    times_w, omega = observables.site_frequencies(ts)
    return observables.detect_tsyn(omega, times_w)


def run_squeeze_scan(cfg: ExperimentConfig, out_dir) -> dict:
    """Sheared initial states: theta-scan of t_syn at the configured shearing
    strength, shearing-scan of the tunable range, and the entanglement
    witness C_yz vs F_Q, each with the closed-form prediction alongside."""
    if cfg.kind != "squeeze-scan":
        raise ConfigError("run_squeeze_scan needs kind='squeeze-scan'")
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    t0 = time.monotonic()

    n = cfg.n_atoms
    p = cfg.cgr_params()
    h = build_hcgr(p)
    base_prop = cfg.propagator()
    psi_x = _prepare_all_plus_x(n)

    ref = _tsyn_for_state(psi_x, h, base_prop, n)
    if not ref.synchronized:
        raise evolve.PropagationError("product-state reference run failed to synchronize")
    tsyn0 = ref.t_syn

    def scan_window(ratio_bound: float) -> evolve.PropagatorConfig:
        # cover the analytic t_syn range with margin; keep the base sampling
        return evolve.PropagatorConfig(
            dt_sample=base_prop.dt_sample,
            t_final=max(base_prop.t_final, 1.4 * (1 + ratio_bound) * tsyn0),
            krylov_dim=base_prop.krylov_dim,
            step_tolerance=base_prop.step_tolerance,
        )

    # theta scan at the configured shearing strength
    q = 2 * np.pi * cfg.q_over_2pi
    psi_q = oat_unitary_apply(psi_x, q)
    # the closed-form ratio uses <Sx> of the pre-rotation sheared state
    sx0 = spin_core.expval(spin_core.collective_operator(n, "x"), psi_q).real
    thetas = np.linspace(0.0, np.pi, cfg.theta_points)
    theta_rows = []
    for th in thetas:
        psi_th = rotation_apply(psi_q, "x", th)
        cov_pred = analytics.oat_cov_yz(n, q, th)
        ratio_pred = analytics.tsyn_ratio(cov_pred, sx0, n)
        rep = _tsyn_for_state(psi_th, h, scan_window(1.0), n)
        ratio_ed = None if rep.t_syn is None else rep.t_syn / tsyn0
        theta_rows.append([th, rep.t_syn, ratio_ed, ratio_pred])
    write_csv(
        out_dir / "tsyn_vs_theta.csv",
        ["theta_rad", "tsyn_ed_s", "ratio_ed", "ratio_analytic"],
        theta_rows,
    )

    # shearing scan: ED extremal-theta runs vs closed-form tunable range
    q_rows = []
    witness_rows = []
    for q2pi in cfg.q_over_2pi_grid:
        qq = 2 * np.pi * q2pi
        psi_qq = oat_unitary_apply(psi_x, qq)
        sx_q = analytics.oat_sx(n, qq)
        th_max, cov_max, th_min, cov_min = analytics.oat_cov_yz_extrema(n, qq)
        dtsyn_pred = analytics.dtsyn_range(cov_max, sx_q, n) * tsyn0
        rep_fast = _tsyn_for_state(rotation_apply(psi_qq, "x", th_max), h, scan_window(1.0), n)
        rep_slow = _tsyn_for_state(rotation_apply(psi_qq, "x", th_min), h, scan_window(1.0), n)
        dtsyn_ed = (
            None
            if rep_fast.t_syn is None or rep_slow.t_syn is None
            else rep_slow.t_syn - rep_fast.t_syn
        )
        q_rows.append([q2pi, dtsyn_ed, dtsyn_pred, rep_fast.t_syn, rep_slow.t_syn])
        fq, cyz = observables.qfi_and_cyz(psi_qq)
        witness_rows.append([q2pi, cyz, fq, cyz / fq])
    write_csv(
        out_dir / "dtsyn_vs_Q.csv",
        ["q_over_2pi", "dtsyn_ed_s", "dtsyn_analytic_s", "tsyn_min_s", "tsyn_max_s"],
        q_rows,
    )
    write_csv(
        out_dir / "cyz_fq.csv",
        ["q_over_2pi", "c_yz", "f_q", "c_yz_over_f_q"],
        witness_rows,
    )
    (out_dir / "scan_report.json").write_text(
        json.dumps({"t_syn0_s": tsyn0, "njperp_t_syn0": cfg.nj_perp * tsyn0}, indent=2)
    )
    write_manifest(out_dir, cfg, time.monotonic() - t0)
    return {"tsyn0": tsyn0, "theta_rows": theta_rows, "q_rows": q_rows, "witness_rows": witness_rows}


def run_lindblad(cfg: ExperimentConfig, out_dir) -> dict:
    """Open-system run: exchange Hamiltonian plus superradiant decay at
    Gamma/J_perp = kappa/Delta_c; reports <Sz>(t), xi^2(t) and N Gamma t_syn."""
    if cfg.kind != "lindblad":
        raise ConfigError("run_lindblad needs kind='lindblad'")
    if cfg.n_atoms > 10:
        raise ConfigError("Lindblad runs are limited to N <= 10")
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    t0 = time.monotonic()

    n = cfg.n_atoms
    p = cfg.cgr_params()
    gamma = cfg.gamma_over_jperp * cfg.j_perp
    s_plus = spin_core.collective_operator(n, "+")
    s_minus = spin_core.collective_operator(n, "-")
    # exchange Hamiltonian of the undressed cavity: J_perp S+S- plus gradient
    h = (cfg.j_perp * (s_plus @ s_minus)).tocsr() + build_hcgr(
        CgrParams(n, 0.0, 0.0, p.omega_grs, p.centered)
    )
    psi = _prepare_all_plus_x(n)
    if cfg.shearing_initial:
        psi = oat_unitary_apply(psi, cfg.shearing_initial)
    rho = np.outer(psi, psi.conj())
    spec = evolve.LindbladSpec(hamiltonian=h, jumps=[(s_minus, gamma)])
    prop = cfg.propagator()
    rec = observables.StateRecorder(n, half_chain=False)
    warnings_pos = evolve.evolve_lindblad(rho, spec, prop, rec)
    ts = rec.timeseries()

    times_w, omega = observables.site_frequencies(ts)
    report = observables.detect_tsyn(omega, times_w)
    xi2 = observables.squeezing_curve(ts, n)

    write_csv(
        out_dir / "decay.csv",
        ["t_s", "sz_total"],
        [[ts.times[k], ts.first_moments["z"][k]] for k in range(len(ts.times))],
    )
    write_csv(
        out_dir / "xi2_floor.csv",
        ["t_s", "xi2"],
        [[ts.times[k], xi2[k]] for k in range(len(ts.times))],
    )
    meta = {
        "gamma_over_jperp": cfg.gamma_over_jperp,
        "n_gamma_t_syn": None if report.t_syn is None else n * gamma * report.t_syn,
        "t_syn_s": report.t_syn,
        "synchronized": report.synchronized,
        "positivity_warnings": len(warnings_pos),
    }
    (out_dir / "lindblad_report.json").write_text(json.dumps(meta, indent=2, sort_keys=True))
    write_manifest(out_dir, cfg, time.monotonic() - t0)
    return {"report": report, "timeseries": ts, "xi2": xi2, "meta": meta}


def run_dressing_scan(cfg: ExperimentConfig, out_dir) -> dict:
    """Mass-defect and cavity-coupling curves over delta/Omega, plus the
    located Heisenberg point."""
    if cfg.kind != "dressing-scan":
        raise ConfigError("run_dressing_scan needs kind='dressing-scan'")
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    t0 = time.monotonic()

    md_rows, coupling_rows = [], []
    for x in cfg.delta_over_omega_grid:
        dcfg = dressing.DressingConfig(rabi=1.0, detuning=float(x), f_spin=cfg.f_spin, m_f=cfg.m_f)
        c2sq = dressing.mass_defect(dcfg)
        j_perp, j_z = dressing.cavity_couplings(dcfg, 1.0)
        md_rows.append([x, c2sq])
        coupling_rows.append([x, j_perp, j_z, j_z / j_perp if j_perp else None])
    write_csv(out_dir / "massdefect.csv", ["delta_over_omega", "mass_defect_fraction"], md_rows)
    write_csv(
        out_dir / "couplings.csv",
        ["delta_over_omega", "jperp_over_chi", "jz_over_chi", "jz_over_jperp"],
        coupling_rows,
    )
    try:
        hp = dressing.heisenberg_point(cfg.f_spin, cfg.m_f)
    except ValueError:
        hp = None
    (out_dir / "heisenberg.json").write_text(
        json.dumps({"f_spin": cfg.f_spin, "m_f": cfg.m_f, "delta_over_omega": hp}, indent=2)
    )
    write_manifest(out_dir, cfg, time.monotonic() - t0)
    return {"heisenberg_point": hp}


def run_gr_budget(cfg: ExperimentConfig, out_dir) -> dict:
    if cfg.kind != "gr-budget":
        raise ConfigError("run_gr_budget needs kind='gr-budget'")
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    t0 = time.monotonic()

    params = gr_budget.LatticeClockParams(
        depth_x=cfg.depth_er, depth_y=cfg.depth_er, depth_z=cfg.depth_er,
        separation=cfg.separation,
    )
    report = gr_budget.other_corrections(params)
    report.entries.insert(
        0, gr_budget.BudgetEntry("grs_per_site", gr_budget.grs_per_site(params), "nearest-neighbor redshift"),
    )
    report.entries.insert(
        1,
        gr_budget.BudgetEntry(
            "grs_over_separation",
            gr_budget.grs_over_separation(params),
            f"redshift across Z={params.separation} m",
        ),
    )
    report.entries.insert(
        2, gr_budget.BudgetEntry("sds", gr_budget.sds_shift(params), "second-order Doppler shift"),
    )
    (out_dir / "budget.csv").write_text(report.to_csv(), encoding="utf-8")
    (out_dir / "budget.txt").write_text(report.pretty() + "\n", encoding="utf-8")
    write_manifest(out_dir, cfg, time.monotonic() - t0)
    return {"report": report}


def run_analytics_check(cfg: ExperimentConfig, out_dir) -> dict:
    """Small-N ED cross-checks of the closed-form synchronization times and
    the two-large-spin reduction."""
    if cfg.kind != "analytics-check":
        raise ConfigError("run_analytics_check needs kind='analytics-check'")
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    t0 = time.monotonic()

    rows = []
    for n in (8, 12):
        for jz_frac in (0.0, 1.0):
            j_perp = 1.0 / n
            j_z = jz_frac * j_perp
            pred = analytics.tsyn_general(n, j_perp, j_z)
            p = CgrParams(n, j_perp, j_z, 0.3125 * n * j_perp / (n - 1))
            h = build_hcgr(p)
            prop = evolve.PropagatorConfig(
                dt_sample=pred / 100, t_final=1.6 * pred, krylov_dim=cfg.krylov_dim
            )
            rep = _tsyn_for_state(_prepare_all_plus_x(n), h, prop, n)
            rows.append([n, jz_frac, pred, rep.t_syn, abs(rep.t_syn / pred - 1)])
    write_csv(
        out_dir / "tsyn_closed_form.csv",
        ["n_atoms", "jz_over_jperp", "tsyn_analytic_s", "tsyn_ed_s", "rel_dev"],
        rows,
    )
    checks = [analytics.two_spin_reduction(n) for n in (4, 8, 12, 16, 20)]
    (out_dir / "two_spin_check.json").write_text(json.dumps(checks, indent=2))
    write_manifest(out_dir, cfg, time.monotonic() - t0)
    return {"rows": rows, "two_spin": checks}


RUNNERS = {
    "sync": run_sync,
    "squeeze-scan": run_squeeze_scan,
    "lindblad": run_lindblad,
    "dressing-scan": run_dressing_scan,
    "gr-budget": run_gr_budget,
    "analytics-check": run_analytics_check,
}


def run(cfg: ExperimentConfig, out_dir) -> dict:
    return RUNNERS[cfg.kind](cfg, out_dir)
