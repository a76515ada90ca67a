"""Assembly of the cavity-plus-redshift Hamiltonian and the state-preparation
unitaries (shearing, global rotations), plus the map from cavity parameters to
exchange coupling and superradiant decay rate.

All frequencies are angular (rad/s) with hbar = 1.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp
from scipy.linalg import expm

from . import spin_core

# refuse to assemble operators whose dense state vector would not fit; the
# sparse Hamiltonian at N=16 holds ~4e6 entries and is the intended ceiling
MAX_ATOMS = 20


@dataclass(frozen=True)
class CgrParams:
    """Couplings of the chain Hamiltonian: collective exchange j_perp,
    Ising j_z, and per-site redshift gradient omega_grs (all rad/s)."""

    n_sites: int
    j_perp: float
    j_z: float
    omega_grs: float
    centered: bool = True

    def __post_init__(self):
        if self.n_sites < 2:
            raise ValueError("need at least two sites")

    @property
    def omega_split(self) -> float:
        """Maximum redshift across the array, (Ns - 1) * omega_grs."""
        return (self.n_sites - 1) * self.omega_grs


@dataclass(frozen=True)
class CavityParams:
    """g_c is half the single-photon Rabi frequency; kappa the cavity
    linewidth; delta_c the atom-cavity detuning (all rad/s)."""

    g_c: float
    kappa: float
    delta_c: float
    n_atoms: int

    def __post_init__(self):
        if self.kappa <= 0:
            raise ValueError("kappa must be positive")
        if self.delta_c == 0:
            raise ValueError("delta_c must be nonzero")


def gradient_site_coefficients(p: CgrParams) -> np.ndarray:
    """Per-site gradient coefficients: j - (Ns-1)/2 when centered, else j."""
    j = np.arange(p.n_sites, dtype=float)
    if p.centered:
        j -= (p.n_sites - 1) / 2
    return j


def build_hcgr(p: CgrParams) -> sp.csr_matrix:
    """H = j_perp S.S + (j_z - j_perp) Sz Sz + omega_grs sum_j c_j Sz_j,
    one atom per site."""
    n = p.n_sites
    if n > MAX_ATOMS:
        need = 16 * (2**n) * (n**2 // 4 + 1)
        raise MemoryError(f"N={n} exceeds the N<={MAX_ATOMS} budget (~{need} bytes sparse)")
    sz = spin_core.collective_operator(n, "z")
    h = p.j_perp * spin_core.total_spin_squared(n) + (p.j_z - p.j_perp) * (sz @ sz)
    coeffs = gradient_site_coefficients(p)
    diag = np.zeros(2**n)
    idx = np.arange(2**n, dtype=np.uint64)
    for site in range(n):
        bit = ((idx >> np.uint64(site)) & np.uint64(1)).astype(float) - 0.5
        diag += p.omega_grs * coeffs[site] * bit
    h = (h + sp.diags(diag)).tocsr()
    h.eliminate_zeros()
    return h


def oat_unitary_apply(state: np.ndarray, shearing: float) -> np.ndarray:
    """Apply exp(-i Q Sz Sz / N): a pure phase exp(-i Q m^2 / N) on each
    magnetization-m basis state."""
    n = spin_core.n_atoms_of(state)
    m = spin_core.magnetization_values(n)
    return state * np.exp(-1j * shearing * m**2 / n)


def rotation_apply(state: np.ndarray, axis: str, angle: float, sign: int = -1) -> np.ndarray:
    """Apply exp(sign * i * angle * S^axis); the default sign=-1 gives the
    propagator convention exp(-i theta S^axis).  Collective rotations
    factorize into identical 2x2 single-site rotations."""
    if axis not in ("x", "y", "z"):
        raise ValueError("rotation axis must be x, y or z")
    if sign not in (-1, +1):
        raise ValueError("sign must be +1 or -1")
    n = spin_core.n_atoms_of(state)
    u = expm(sign * 1j * angle * spin_core.site_matrix(axis))
    tensor = state.reshape((2,) * n)
    for k in range(n):
        tensor = np.moveaxis(
            np.tensordot(u, np.moveaxis(tensor, k, 0), axes=([1], [0])), 0, k
        )
    return np.ascontiguousarray(tensor.reshape(-1))


def cavity_to_couplings(p: CavityParams) -> tuple[float, float]:
    """(J_perp, Gamma) from cavity parameters; Gamma/J_perp = kappa/delta_c
    holds exactly."""
    denom = p.delta_c**2 + p.kappa**2 / 4
    j_perp = p.g_c**2 * p.delta_c / denom
    gamma = p.g_c**2 * p.kappa / denom
    return j_perp, gamma
