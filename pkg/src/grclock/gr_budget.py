"""Dimensional evaluators for the relativistic frequency-shift budget of a
Wannier-Stark lattice clock: per-site gravitational redshift, second-order
Doppler shift from lattice zero-point motion, and the subleading
center-of-mass and light-field corrections, all as fractional frequencies."""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass, field

import numpy as np
from scipy.constants import c as C_LIGHT
from scipy.constants import hbar, pi, physical_constants

_U = physical_constants["atomic mass constant"][0]

SR87_MASS = 86.9088775 * _U
SR_MAGIC_WAVELENGTH = 813.4e-9  # magic lattice wavelength, calibrated default
SR_CLOCK_OMEGA = 2 * pi * 429.228004229e12


@dataclass(frozen=True)
class LatticeClockParams:
    atom_mass: float = SR87_MASS
    lattice_wavelength: float = SR_MAGIC_WAVELENGTH
    depth_x: float = 300.0  # units of E_R
    depth_y: float = 300.0
    depth_z: float = 300.0
    g_lo: float = 9.80
    separation: float = 1e-2  # m
    clock_omega: float = SR_CLOCK_OMEGA
    c: float = C_LIGHT

    def __post_init__(self):
        for name in ("atom_mass", "lattice_wavelength", "g_lo", "clock_omega", "c"):
            if getattr(self, name) <= 0:
                raise ValueError(f"{name} must be positive")
        if min(self.depth_x, self.depth_y, self.depth_z) < 1:
            raise ValueError("lattice depths below 1 E_R leave the tight-binding regime")

    @property
    def lattice_spacing(self) -> float:
        return self.lattice_wavelength / 2.0

    @property
    def recoil_energy(self) -> float:
        k = 2 * pi / self.lattice_wavelength
        return hbar**2 * k**2 / (2 * self.atom_mass)

    @property
    def depths(self) -> tuple[float, float, float]:
        return (self.depth_x, self.depth_y, self.depth_z)

    @property
    def trap_energies(self) -> np.ndarray:
        """hbar * omega_alpha = 2 sqrt(V_alpha E_R) per axis."""
        return 2.0 * np.sqrt(np.array(self.depths)) * self.recoil_energy


def grs_per_site(p: LatticeClockParams) -> float:
    """Fractional redshift between nearest-neighbor sites, g a_L / c^2."""
    return p.g_lo * p.lattice_spacing / p.c**2


def grs_over_separation(p: LatticeClockParams) -> float:
    """Fractional redshift across the full separation Z, g Z / c^2."""
    return p.g_lo * p.separation / p.c**2


def band_energy(p: LatticeClockParams) -> float:
    """Ground-band zero-point energy sum_alpha E_R (sqrt(V_alpha/E_R) - 1/4)."""
    er = p.recoil_energy
    return float(sum(er * (np.sqrt(v) - 0.25) for v in p.depths))


def sds_shift(p: LatticeClockParams) -> float:
    """Fractional second-order Doppler shift, -E_band / (2 M c^2)."""
    return -band_energy(p) / (2 * p.atom_mass * p.c**2)


@dataclass
class BudgetEntry:
    term: str
    fractional_value: float | None
    note: str = ""


@dataclass
class BudgetReport:
    entries: list[BudgetEntry] = field(default_factory=list)

    def value(self, term: str) -> float:
        for e in self.entries:
            if e.term == term:
                return e.fractional_value
        raise KeyError(term)

    def to_csv(self) -> str:
        buf = io.StringIO()
        writer = csv.writer(buf)
        writer.writerow(["term", "fractional_value", "note"])
        for e in self.entries:
            val = "" if e.fractional_value is None else f"{e.fractional_value:.17g}"
            writer.writerow([e.term, val, e.note])
        return buf.getvalue()

    def pretty(self) -> str:
        width = max(len(e.term) for e in self.entries)
        lines = [f"{'term':<{width}}  fractional value"]
        for e in self.entries:
            val = "   (not computed)" if e.fractional_value is None else f"{e.fractional_value: .3e}"
            suffix = f"  # {e.note}" if e.note else ""
            lines.append(f"{e.term:<{width}}  {val}{suffix}")
        return "\n".join(lines)


def other_corrections(p: LatticeClockParams) -> BudgetReport:
    """Order-of-magnitude budget of the center-of-mass and light-field
    corrections beyond redshift and Doppler, each divided by hbar*omega_0
    (the per-term convention fixed by matching the quoted magnitudes)."""
    hw = p.trap_energies
    mc2 = p.atom_mass * p.c**2
    hw0 = hbar * p.clock_omega
    phi = p.g_lo * p.separation

    p4 = (np.sum(hw**2) / 16.0 + np.sum(np.outer(hw, hw)) / 32.0) / mc2
    phi2 = p.atom_mass * phi**2 / (2 * p.c**2)
    # <P.phi P>/(M c^2) with phi a c-number and <P^2>/2M = sum hw/4
    p_phi_p = np.sum(hw) / 2.0 * phi / p.c**2
    omega_lattice = 2 * pi * p.c / p.lattice_wavelength

    report = BudgetReport()
    report.entries.append(
        BudgetEntry("p4_kinetic", float(p4 / hw0), "quartic kinetic correction, harmonic ground state")
    )
    report.entries.append(
        BudgetEntry("phi_squared", float(phi2 / hw0), f"M phi^2/2c^2 at Z={p.separation} m")
    )
    report.entries.append(
        BudgetEntry("p_phi_p", float(p_phi_p / hw0), f"kinetic-potential cross term at Z={p.separation} m")
    )
    report.entries.append(
        BudgetEntry(
            "roentgen_lattice_depth",
            float(hbar * omega_lattice / mc2),
            "relative lattice-depth correction from the moving-dipole coupling; "
            "no clock shift at the magic wavelength",
        )
    )
    report.entries.append(
        BudgetEntry(
            "mode_function",
            float(phi / p.c**2),
            "relative correction to lattice/cavity mode functions",
        )
    )
    report.entries.append(
        BudgetEntry(
            "dirac_curved_spacetime",
            None,
            "internal-structure correction, typically below 1e-23; quoted bound only",
        )
    )
    return report
