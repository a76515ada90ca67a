"""Dressed-state algebra for the nuclear-spin dressing scheme: mixing
coefficients and energies, the tunable mass defect, Clebsch-Gordan-derived
cavity couplings, magnetic-gradient discrimination, and the sensitivity of
the dressed energies to Rabi-frequency inhomogeneity."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import factorial, sqrt

import numpy as np
from scipy.optimize import brentq


def _half_int(x) -> Fraction:
    f = Fraction(x).limit_denominator(2)
    if f.denominator not in (1, 2):
        raise ValueError(f"{x} is not a half-integer")
    return f


@dataclass(frozen=True)
class DressingConfig:
    """Dressing laser Rabi frequency and detuning (rad/s) coupling
    |e, m_F> to |g, m_F - 1> in an atom of nuclear spin F."""

    rabi: float
    detuning: float
    f_spin: float = 4.5
    m_f: float = 1.5

    def __post_init__(self):
        if self.rabi <= 0:
            raise ValueError("Rabi frequency must be positive")
        f, m = _half_int(self.f_spin), _half_int(self.m_f)
        if abs(m) > f or abs(m - 1) > f:
            raise ValueError(f"m_F={self.m_f} invalid for both coupled levels at F={self.f_spin}")

    @property
    def generalized_rabi(self) -> float:
        return sqrt(self.rabi**2 + self.detuning**2)


@dataclass(frozen=True)
class DressedState:
    """|+> = c1|e,m_F> + c2|g,m_F-1>, |-> = -c2|e,m_F> + c1|g,m_F-1>;
    energies relative to the rotating frame, omega_0 excluded."""

    c1: float
    c2: float
    e_plus: float
    e_minus: float


def dress(cfg: DressingConfig) -> DressedState:
    """Closed-form dressed states: E+- = delta/2 +- sqrt(Omega^2+delta^2)/2."""
    gap = cfg.generalized_rabi
    c1 = sqrt((1.0 - cfg.detuning / gap) / 2.0)
    c2 = sqrt((1.0 + cfg.detuning / gap) / 2.0)
    return DressedState(
        c1=c1,
        c2=c2,
        e_plus=cfg.detuning / 2.0 + gap / 2.0,
        e_minus=cfg.detuning / 2.0 - gap / 2.0,
    )


def mass_defect(cfg: DressingConfig) -> float:
    """|C2|^2: the fraction of the bare mass defect (and of the bare per-site
    redshift) retained by the dressed clock transition."""
    return dress(cfg).c2 ** 2


def clebsch_gordan(f_spin, m, sigma: int) -> float:
    """<F, m; 1, sigma | F, m + sigma> via the Racah sum with exact rational
    arithmetic, converted to float at the boundary."""
    if sigma not in (-1, 0, 1):
        raise ValueError("sigma must be -1, 0 or +1")
    f = _half_int(f_spin)
    m = _half_int(m)
    if abs(m) > f or abs(m + sigma) > f:
        raise ValueError(f"m={m} or m+sigma out of range for F={f}")
    return _cg(f, m, Fraction(1), Fraction(sigma), f, m + sigma)


def _frac_factorial(x: Fraction) -> int:
    if x.denominator != 1 or x < 0:
        raise ValueError(f"factorial of non-integer or negative {x}")
    return factorial(int(x))


def _cg(j1, m1, j2, m2, j3, m3) -> float:
    """General <j1 m1; j2 m2 | j3 m3> (Racah formula)."""
    if m1 + m2 != m3:
        return 0.0
    if not (abs(j1 - j2) <= j3 <= j1 + j2):
        return 0.0
    pref = (
        Fraction(2 * j3 + 1)
        * Fraction(
            _frac_factorial(j3 + j1 - j2)
            * _frac_factorial(j3 - j1 + j2)
            * _frac_factorial(j1 + j2 - j3),
            _frac_factorial(j1 + j2 + j3 + 1),
        )
        * _frac_factorial(j3 + m3)
        * _frac_factorial(j3 - m3)
        * _frac_factorial(j1 - m1)
        * _frac_factorial(j1 + m1)
        * _frac_factorial(j2 - m2)
        * _frac_factorial(j2 + m2)
    )
    k_min = int(max(Fraction(0), -(j3 - j2 + m1), -(j3 - j1 - m2)))
    k_max = int(min(j1 + j2 - j3, j1 - m1, j2 + m2))
    total = Fraction(0)
    for k in range(k_min, k_max + 1):
        denom = _frac_factorial(Fraction(k))
        for a in (
            j1 + j2 - j3 - k,
            j1 - m1 - k,
            j2 + m2 - k,
            j3 - j2 + m1 + k,
            j3 - j1 - m2 + k,
        ):
            denom *= _frac_factorial(a)
        total += Fraction((-1) ** k, denom)
    sign = 1.0 if total >= 0 else -1.0
    # total^2 * pref is rational; one sqrt at the boundary avoids cancellation
    return sign * sqrt(float(total * total * pref))


def cavity_couplings(cfg: DressingConfig, chi: float) -> tuple[float, float]:
    """(J_perp, J_z) of the dressed cavity-mediated interactions:
    J_perp = chi (C0_mF)^2 |C2|^2, J_z = chi (C+1_{mF-1})^2 / 2 |C1|^2 |C2|^2."""
    ds = dress(cfg)
    c0 = clebsch_gordan(cfg.f_spin, cfg.m_f, 0)
    cp = clebsch_gordan(cfg.f_spin, cfg.m_f - 1, +1)
    j_perp = chi * c0**2 * ds.c2**2
    j_z = chi * cp**2 / 2.0 * ds.c1**2 * ds.c2**2
    return j_perp, j_z


def heisenberg_point(f_spin=4.5, m_f=1.5, bracket=(-5.0, 5.0)) -> float:
    """delta/Omega where J_perp = J_z, located by root bracketing on
    J_z/J_perp - 1.  Raises if the couplings never cross in the bracket."""

    def ratio_minus_one(x):
        cfg = DressingConfig(rabi=1.0, detuning=x, f_spin=f_spin, m_f=m_f)
        j_perp, j_z = cavity_couplings(cfg, 1.0)
        return j_z / j_perp - 1.0

    lo, hi = bracket
    f_lo, f_hi = ratio_minus_one(lo), ratio_minus_one(hi)
    if f_lo * f_hi > 0:
        raise ValueError(f"no Heisenberg point in delta/Omega bracket {bracket}")
    return float(brentq(ratio_minus_one, lo, hi, xtol=1e-12))


def gradient_discrimination(configs, grs_slope: float, zeeman) -> list[dict]:
    """Per-config slopes of E_-(Z): the redshift-induced slope (proportional
    to |C2|^2) and the magnetic-gradient slope
    |C2|^2 (eta_e - eta_g) m_F - |C1|^2 eta_g.

    zeeman = (eta_e, eta_g, m_f).  The two families are distinguishable by a
    delta/Omega scan iff eta_g != 0 (nonzero intercept in |C2|^2).
    """
    if not configs:
        raise ValueError("config scan must be nonempty")
    eta_e, eta_g, m_f = zeeman
    rows = []
    for cfg in configs:
        c2sq = mass_defect(cfg)
        c1sq = 1.0 - c2sq
        rows.append(
            {
                "delta_over_omega": cfg.detuning / cfg.rabi,
                "grs_slope": grs_slope * c2sq,
                "zeeman_slope": c2sq * (eta_e - eta_g) * m_f - c1sq * eta_g,
            }
        )
    return rows


def rabi_sensitivity(cfg: DressingConfig, delta_rabi: float) -> tuple[float, float, float]:
    """(dE+, dE-, d(averaged transition)) to first order in the Rabi
    inhomogeneity delta_rabi.  The perturbative parts of dE+ and dE- cancel,
    so the averaged |g,mF> <-> |+-> transition is Omega-independent."""
    gap = cfg.generalized_rabi
    pert = 0.5 * gap * delta_rabi * cfg.rabi / gap**2
    return +pert, -pert, 0.0
