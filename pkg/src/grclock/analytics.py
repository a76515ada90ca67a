"""Closed-form results used as oracles for the numerics: the spin-wave
frequency profile, the two-large-spin Clebsch-Gordan reduction, the
synchronization-time formulas, and moments of sheared (one-axis-twisted)
states."""

from __future__ import annotations

import warnings
from math import comb, sqrt

import numpy as np

from . import spin_core
from .hamiltonian import CgrParams


def hp_frequency(site: int, t: float, p: CgrParams) -> float:
    """Spin-wave prediction omega_j(t) = omega_grs sinc(N J_perp t) *
    (j - (Ns-1)/2), valid for omega_split << N J_perp."""
    n = p.n_sites
    eta = p.omega_split / (n * p.j_perp)
    if eta > 0.3:
        warnings.warn(f"spin-wave regime parameter eta={eta:.3g} above 0.3", stacklevel=2)
    x = n * p.j_perp * t
    sinc = 1.0 if x == 0 else np.sin(x) / x
    return float(p.omega_grs * sinc * (site - (n - 1) / 2))


def oat_sx(n_atoms: int, shearing: float) -> float:
    """<Sx> of the sheared coherent state, (N/2) cos^{N-1}(Q/N)."""
    return n_atoms / 2 * np.cos(shearing / n_atoms) ** (n_atoms - 1)


def oat_cov_yz(n_atoms: int, shearing: float, theta: float = 0.0) -> float:
    """Cov(y,z) of the sheared state after an x-rotation by theta:
    cos(2 theta) A + sin(2 theta) B with the closed-form A and B."""
    q = shearing / n_atoms
    a = n_atoms * (n_atoms - 1) / 2 * np.sin(q) * np.cos(q) ** (n_atoms - 2)
    b = n_atoms * (n_atoms - 1) / 8 * (1 - np.cos(2 * q) ** (n_atoms - 2))
    return float(np.cos(2 * theta) * a + np.sin(2 * theta) * b)


def oat_cov_yz_extrema(n_atoms: int, shearing: float) -> tuple[float, float, float, float]:
    """(theta_max, cov_max, theta_min, cov_min) of Cov(y,z) over theta;
    exact since Cov is a pure second harmonic in theta."""
    q = shearing / n_atoms
    a = n_atoms * (n_atoms - 1) / 2 * np.sin(q) * np.cos(q) ** (n_atoms - 2)
    b = n_atoms * (n_atoms - 1) / 8 * (1 - np.cos(2 * q) ** (n_atoms - 2))
    amp = np.hypot(a, b)
    theta_max = 0.5 * np.arctan2(b, a) % np.pi
    theta_min = (theta_max + np.pi / 2) % np.pi
    return float(theta_max), float(amp), float(theta_min), float(-amp)


def tsyn_ratio(cov_yz: float, sx0: float, n_atoms: int) -> float:
    """t_syn / t_syn0 = 1 - (2/pi) arctan[Cov(y,z) / ((N-1) <Sx>_0)]."""
    if sx0 == 0:
        raise ValueError("vanishing <Sx> of the pre-rotation state")
    return float(1.0 - (2.0 / np.pi) * np.arctan(cov_yz / ((n_atoms - 1) * sx0)))


def tsyn_ratio_from_state(psi0: np.ndarray, psi_theta: np.ndarray) -> float:
    """Ratio evaluated from states: Cov on the rotated state, <Sx> on the
    pre-rotation state."""
    from . import observables

    n = spin_core.n_atoms_of(psi0)
    sx0 = spin_core.expval(spin_core.collective_operator(n, "x"), psi0).real
    cov = observables.covariance_matrix(psi_theta)[1, 2]
    return tsyn_ratio(cov, sx0, n)


def dtsyn_range(cov_max: float, sx0: float, n_atoms: int) -> float:
    """Delta t_syn / t_syn0 = (4/pi) arctan[Cov_max / ((N-1) <Sx>_0)]."""
    if sx0 == 0:
        raise ValueError("vanishing <Sx> of the pre-rotation state")
    return float((4.0 / np.pi) * np.arctan(cov_max / ((n_atoms - 1) * sx0)))


def tsyn_general(n_atoms: int, j_perp: float, j_z: float) -> float:
    """Closed-form synchronization time for the product initial state:
    ((N-2) J_perp + 2 J_z) t_syn = pi."""
    denom = (n_atoms - 2) * j_perp + 2 * j_z
    if denom <= 0:
        raise ValueError("nonpositive (N-2)J_perp + 2J_z: no synchronization predicted")
    return float(np.pi / denom)


def _binomial_amp(n: int, m_total: float, m1: float) -> float:
    """Collective-manifold amplitude sqrt(C(N/2,N/4+m1) C(N/2,N/4+m-m1)/C(N,N/2+m))."""
    half, quarter = n // 2, n // 4
    k1 = float(quarter + m1)
    k2 = float(quarter + m_total - m1)
    if not (k1.is_integer() and 0 <= k1 <= half and 0 <= k2 <= half):
        return 0.0
    return sqrt(comb(half, int(k1)) * comb(half, int(k2)) / comb(n, int(half + m_total)))


def two_spin_state(n: int, total_spin_label: str, m_total: float) -> np.ndarray:
    """|N/2, m> or |N/2-1, m> in the product basis of two spins S=N/4
    (index = (m1 + N/4) * (N/2+1) + (m2 + N/4))."""
    if n % 4:
        raise ValueError("N must be divisible by 4")
    half, quarter = n // 2, n // 4
    dim1 = half + 1
    out = np.zeros(dim1 * dim1)
    for i1 in range(dim1):
        m1 = i1 - quarter
        m2 = m_total - m1
        i2 = int(m2 + quarter)
        if not 0 <= i2 < dim1 or not float(m2 + quarter).is_integer():
            continue
        amp = _binomial_amp(n, m_total, m1)
        if total_spin_label == "collective":
            out[i1 * dim1 + i2] = amp
        elif total_spin_label == "spin-wave":
            k = half - 1 + m_total
            if not 0 <= k <= n - 2:
                continue
            out[i1 * dim1 + i2] = (
                (2 * m1 - m_total)
                * sqrt(comb(half, i1) * comb(half, i2) / (n * comb(n - 2, int(k))))
            )
        else:
            raise ValueError("label must be 'collective' or 'spin-wave'")
    return out


def two_spin_reduction(n: int) -> dict:
    """Verify the two-large-spin ladder identity
    (S1z - S2z)|N/2,m> = sqrt((N/2+m)(N/2-m)/(N-1)) |N/2-1,m>
    and orthonormality, for every m.  Raises on violation."""
    if n % 4 or n > 24:
        raise ValueError("N must be divisible by 4 and at most 24")
    half, quarter = n // 2, n // 4
    dim1 = half + 1
    mats = spin_core.spin_matrices(quarter)
    eye = np.eye(dim1)
    s1z = np.kron(mats["z"], eye)
    s2z = np.kron(eye, mats["z"])
    worst = 0.0
    for mi in range(-half, half + 1):
        m = float(mi)
        col = two_spin_state(n, "collective", m)
        coeff = sqrt((half + m) * (half - m) / (n - 1))
        lhs = (s1z - s2z) @ col
        if abs(m) == half:
            err = np.linalg.norm(lhs)
        else:
            sw = two_spin_state(n, "spin-wave", m)
            err = np.linalg.norm(lhs - coeff * sw)
            overlap = abs(col @ sw)
            if overlap > 1e-12:
                raise AssertionError(f"manifolds not orthogonal at m={m}: {overlap}")
        if err > 1e-10:
            raise AssertionError(f"ladder identity violated at m={m}: err={err}")
        worst = max(worst, err)
    return {"n": n, "max_error": worst, "dim": dim1 * dim1}
