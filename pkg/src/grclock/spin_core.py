"""Spin-1/2 linear-algebra substrate.

States are complex vectors over the 2^N product basis with site 0 stored in
the least-significant bit (|down> = 0, |up> = 1).  Operators are scipy CSR
matrices, assembled once and applied many times.  Collective (Dicke) states
live in a compact length-(2S+1) vector indexed by m = -S..S.
"""

from __future__ import annotations

from functools import lru_cache
from math import comb

import numpy as np
import scipy.sparse as sp

NORM_TOL = 1e-10

# single-site spin-1/2 matrices in the (|down>, |up>) basis
_SZ = np.array([[-0.5, 0.0], [0.0, 0.5]])
_SP = np.array([[0.0, 0.0], [1.0, 0.0]])
_SM = _SP.T.copy()
_SX = 0.5 * (_SP + _SM)
_SY = -0.5j * (_SP - _SM)

_SITE_MATS = {"x": _SX, "y": _SY, "z": _SZ, "+": _SP, "-": _SM}


def site_matrix(axis: str) -> np.ndarray:
    """2x2 spin-1/2 matrix for axis in {x, y, z, +, -}."""
    try:
        return _SITE_MATS[axis]
    except KeyError:
        raise ValueError(f"unknown axis {axis!r}") from None


@lru_cache(maxsize=None)
def local_operator(n_atoms: int, site: int, axis: str) -> sp.csr_matrix:
    """Spin-1/2 operator on `site` (identity elsewhere), eigenvalues +-1/2
    for x, y, z; S^+- = S^x +- i S^y."""
    if not 0 <= site < n_atoms:
        raise ValueError(f"site {site} out of range for N={n_atoms}")
    op = sp.csr_matrix(site_matrix(axis))
    left = sp.identity(2 ** (n_atoms - 1 - site), format="csr")
    right = sp.identity(2**site, format="csr")
    return sp.kron(left, sp.kron(op, right, format="csr"), format="csr")


@lru_cache(maxsize=None)
def collective_operator(n_atoms: int, axis: str) -> sp.csr_matrix:
    """Sum of local_operator over all sites."""
    if n_atoms < 1:
        raise ValueError("need at least one atom")
    total = local_operator(n_atoms, 0, axis).copy()
    for site in range(1, n_atoms):
        total = total + local_operator(n_atoms, site, axis)
    return total.tocsr()


@lru_cache(maxsize=None)
def total_spin_squared(n_atoms: int) -> sp.csr_matrix:
    """S.S = Sx^2 + Sy^2 + Sz^2 as a sparse matrix."""
    ss = None
    for axis in "xyz":
        s = collective_operator(n_atoms, axis)
        term = (s @ s).tocsr()
        ss = term if ss is None else ss + term
    ss = ss.tocsr()
    ss.eliminate_zeros()
    return ss


@lru_cache(maxsize=None)
def magnetization_values(n_atoms: int) -> np.ndarray:
    """<Sz> eigenvalue (popcount - N/2) for every product-basis index."""
    idx = np.arange(2**n_atoms, dtype=np.uint64)
    pop = np.zeros(2**n_atoms, dtype=np.int64)
    for b in range(n_atoms):
        pop += ((idx >> np.uint64(b)) & np.uint64(1)).astype(np.int64)
    return pop - n_atoms / 2


def product_state(n_atoms: int, single_site) -> np.ndarray:
    """N-fold tensor power of a normalized single-site 2-vector."""
    v = np.asarray(single_site, dtype=complex)
    if v.shape != (2,):
        raise ValueError("single-site vector must have length 2")
    if abs(np.vdot(v, v).real - 1.0) > NORM_TOL:
        raise ValueError("single-site vector is not normalized")
    amps = np.array([1.0 + 0.0j])
    for _ in range(n_atoms):
        amps = np.kron(v, amps)
    return amps


def check_normalized(state: np.ndarray, tol: float = NORM_TOL) -> None:
    nrm = np.vdot(state, state).real
    if abs(nrm - 1.0) > tol:
        raise ValueError(f"state norm^2 = {nrm} deviates from 1 beyond {tol}")


def n_atoms_of(state: np.ndarray) -> int:
    n = int(np.log2(state.size).round())
    if 2**n != state.size:
        raise ValueError(f"state length {state.size} is not a power of two")
    return n


def partial_trace_purity(state: np.ndarray, subset) -> float:
    """tr(rho_A^2) for the reduced state on `subset`, via the Schmidt
    decomposition of the amplitude matrix (no 2^N x 2^N density matrix)."""
    n = n_atoms_of(state)
    subset = sorted(set(int(s) for s in subset))
    if not subset or len(subset) == n:
        raise ValueError("subset must be a nonempty proper subset of sites")
    if subset[0] < 0 or subset[-1] >= n:
        raise ValueError("subset contains out-of-range sites")
    tensor = state.reshape((2,) * n)
    # axis k of the reshape holds site n-1-k (site 0 is the lowest bit)
    axes = [n - 1 - s for s in subset]
    mat = np.moveaxis(tensor, axes, range(len(axes))).reshape(2 ** len(axes), -1)
    if mat.shape[0] > mat.shape[1]:
        mat = mat.T
    gram = mat @ mat.conj().T
    return float(np.sum(np.abs(gram) ** 2).real)


def dicke_state(total_spin: float, amplitudes) -> np.ndarray:
    """Validate and return a collective-spin amplitude vector indexed by
    m = -S..S."""
    amps = np.asarray(amplitudes, dtype=complex)
    dim = int(round(2 * total_spin + 1))
    if amps.size != dim:
        raise ValueError(f"expected {dim} amplitudes for S={total_spin}")
    if abs(np.vdot(amps, amps).real - 1.0) > NORM_TOL:
        raise ValueError("Dicke amplitudes are not normalized")
    return amps


def dicke_expand(amplitudes: np.ndarray, n_atoms: int) -> np.ndarray:
    """Embed |S=N/2, m> amplitudes into the symmetric subspace of the
    product basis with 1/sqrt(C(N, n_up)) weights."""
    amps = np.asarray(amplitudes, dtype=complex)
    if amps.size != n_atoms + 1:
        raise ValueError(f"Dicke vector must have S=N/2, i.e. length N+1={n_atoms + 1}")
    out = np.zeros(2**n_atoms, dtype=complex)
    mags = magnetization_values(n_atoms)
    for n_up in range(n_atoms + 1):
        c = amps[n_up]
        if c == 0:
            continue
        mask = mags == (n_up - n_atoms / 2)
        out[mask] = c / np.sqrt(comb(n_atoms, n_up))
    return out


def spin_matrices(total_spin: float) -> dict[str, np.ndarray]:
    """Dense spin matrices for arbitrary spin S in the |S, m> basis with
    m = -S..S (index 0 = m = -S)."""
    dim = int(round(2 * total_spin + 1))
    m = np.arange(dim) - total_spin
    sz = np.diag(m)
    # <m+1| S+ |m> = sqrt(S(S+1) - m(m+1))
    sp_ = np.diag(np.sqrt(total_spin * (total_spin + 1) - m[:-1] * (m[:-1] + 1)), -1)
    sm = sp_.T.copy()
    return {
        "z": sz,
        "+": sp_,
        "-": sm,
        "x": 0.5 * (sp_ + sm),
        "y": -0.5j * (sp_ - sm),
    }


def density_matrix(rho: np.ndarray, tol_herm: float = 1e-10, tol_trace: float = 1e-8) -> np.ndarray:
    """Validate a density matrix (Hermitian, unit trace)."""
    rho = np.asarray(rho, dtype=complex)
    if rho.ndim != 2 or rho.shape[0] != rho.shape[1]:
        raise ValueError("density matrix must be square")
    if np.max(np.abs(rho - rho.conj().T)) > tol_herm:
        raise ValueError("density matrix is not Hermitian")
    if abs(np.trace(rho).real - 1.0) > tol_trace:
        raise ValueError("density matrix trace deviates from 1")
    return rho


def expval(op, state) -> complex:
    """<op> for a pure state vector or a density matrix."""
    state = np.asarray(state)
    if state.ndim == 1:
        return complex(np.vdot(state, op @ state))
    return complex(np.trace(op @ state))
