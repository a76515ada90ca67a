"""Time propagation.

Pure states move under a restarted Lanczos (Hermitian Krylov) approximation
of exp(-iHt); between observable samples the step is subdivided until the
standard Krylov residual estimate drops below the configured tolerance.
Density matrices move under a fixed-step RK4 integration of the Lindblad
master equation, with trace and positivity guards.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
import scipy.sparse as sp
from scipy.linalg import eigh_tridiagonal


class PropagationError(RuntimeError):
    pass


@dataclass(frozen=True)
class PropagatorConfig:
    dt_sample: float
    t_final: float
    krylov_dim: int = 30
    step_tolerance: float = 1e-10
    norm_drift_tol: float = 1e-9

    def __post_init__(self):
        if self.dt_sample <= 0 or self.t_final <= 0:
            raise ValueError("dt_sample and t_final must be positive")
        if self.krylov_dim < 4:
            raise ValueError("krylov_dim must be at least 4")

    def sample_times(self) -> np.ndarray:
        n = int(round(self.t_final / self.dt_sample))
        return np.arange(n + 1) * self.dt_sample


@dataclass
class LindbladSpec:
    hamiltonian: sp.spmatrix
    jumps: list = field(default_factory=list)  # (operator, rate >= 0) pairs

    def __post_init__(self):
        for _, rate in self.jumps:
            if rate < 0:
                raise ValueError("jump rates must be nonnegative")


def lanczos_expm_apply(
    h, v: np.ndarray, dt: float, m: int, tol: float = 0.0
) -> tuple[np.ndarray, float]:
    """One Lanczos approximation of exp(-i h dt) v for Hermitian h.

    The basis grows until the residual estimate beta_k * |[exp(-i T dt)]_{k,1}|
    falls below tol (or m vectors are reached); a happy breakdown (beta ~ 0)
    means the Krylov space is invariant and the result is exact to roundoff.
    Returns the propagated vector and the achieved residual estimate.
    """
    dim = v.shape[0]
    m = min(m, dim)
    basis = np.empty((m, dim), dtype=complex)
    alpha = np.empty(m)
    beta = np.empty(m)  # beta[k] couples vector k to k+1

    nrm = np.linalg.norm(v)
    basis[0] = v / nrm
    small = np.array([np.exp(-1j * 0.0)])
    residual = np.inf
    k_used = 1
    for k in range(m):
        w = h @ basis[k]
        if k > 0:
            w -= beta[k - 1] * basis[k - 1]
        alpha[k] = np.real(np.vdot(basis[k], w))
        w -= alpha[k] * basis[k]
        # one pass of re-orthogonalization keeps the basis clean at small m
        coeffs = basis[: k + 1].conj() @ w
        w -= coeffs.T @ basis[: k + 1]
        b = np.linalg.norm(w)
        k_used = k + 1
        evals, evecs = eigh_tridiagonal(alpha[:k_used], beta[: k_used - 1])
        small = evecs @ (np.exp(-1j * evals * dt) * evecs[0, :].conj())
        residual = float(b * dt * abs(small[-1]))
        breakdown = b < 1e-14 * max(1.0, abs(alpha[k]))
        if breakdown:
            residual = 0.0
        if breakdown or residual <= tol or k == m - 1:
            break
        beta[k] = b
        basis[k + 1] = w / b

    out = nrm * (small @ basis[:k_used])
    return out, residual


def _propagate_interval(h, psi: np.ndarray, dt: float, cfg: PropagatorConfig) -> np.ndarray:
    n_sub = 1
    while True:
        cur = psi
        ok = True
        for _ in range(n_sub):
            cur, res = lanczos_expm_apply(
                h, cur, dt / n_sub, cfg.krylov_dim, cfg.step_tolerance
            )
            if res > cfg.step_tolerance:
                ok = False
                break
        if ok:
            return cur
        n_sub *= 2
        if n_sub > 4096:
            raise PropagationError(
                f"Krylov residual {res:.3e} stuck above tolerance {cfg.step_tolerance:.1e}"
            )


def evolve_unitary(state: np.ndarray, h, cfg: PropagatorConfig, observers) -> None:
    """Propagate |psi> under exp(-iHt), invoking each observer(t, psi) at the
    sample grid (including t=0).  `observers` is a single callable or an
    iterable of callables."""
    if callable(observers):
        observers = [observers]
    psi = np.asarray(state, dtype=complex).copy()
    times = cfg.sample_times()
    for obs in observers:
        obs(times[0], psi)
    for k in range(1, len(times)):
        psi = _propagate_interval(h, psi, cfg.dt_sample, cfg)
        nrm = np.linalg.norm(psi)
        if abs(nrm - 1.0) > cfg.norm_drift_tol:
            raise PropagationError(f"norm drift |{nrm} - 1| exceeds {cfg.norm_drift_tol}")
        psi /= nrm
        for obs in observers:
            obs(times[k], psi)


MAX_LINDBLAD_DIM = 2**10


def lindblad_rhs(rho: np.ndarray, h, jump_ops) -> np.ndarray:
    """drho/dt = -i[H, rho] + sum_k rate_k (L rho L+ - {L+L, rho}/2)."""
    out = -1j * (h @ rho - rho @ h)
    for op, op_dag, op_dag_op, rate in jump_ops:
        out += rate * (op @ rho @ op_dag - 0.5 * (op_dag_op @ rho + rho @ op_dag_op))
    return out


def evolve_lindblad(rho: np.ndarray, spec: LindbladSpec, cfg: PropagatorConfig, observers) -> list:
    """Fixed-step RK4 integration of the Lindblad equation, sampling the
    observers on the cfg grid.  Returns a list of positivity warnings
    (t, min_eigenvalue) for samples where min eig < -1e-6."""
    if callable(observers):
        observers = [observers]
    rho = np.asarray(rho, dtype=complex).copy()
    if rho.shape[0] > MAX_LINDBLAD_DIM:
        raise MemoryError(f"Lindblad dimension {rho.shape[0]} over budget {MAX_LINDBLAD_DIM}")
    h = spec.hamiltonian
    if sp.issparse(h):
        h = h.toarray()
    jump_ops = []
    for op, rate in spec.jumps:
        op = op.toarray() if sp.issparse(op) else np.asarray(op, dtype=complex)
        jump_ops.append((op, op.conj().T, op.conj().T @ op, rate))

    n_sub = 20
    dt = cfg.dt_sample / n_sub
    times = cfg.sample_times()
    warnings = []

    def sample(t):
        for obs in observers:
            obs(t, rho)
        min_eig = float(np.linalg.eigvalsh(rho)[0])
        if min_eig < -1e-6:
            warnings.append((t, min_eig))

    sample(times[0])
    for k in range(1, len(times)):
        for _ in range(n_sub):
            k1 = lindblad_rhs(rho, h, jump_ops)
            k2 = lindblad_rhs(rho + 0.5 * dt * k1, h, jump_ops)
            k3 = lindblad_rhs(rho + 0.5 * dt * k2, h, jump_ops)
            k4 = lindblad_rhs(rho + dt * k3, h, jump_ops)
            rho = rho + (dt / 6.0) * (k1 + 2 * k2 + 2 * k3 + k4)
        tr = np.trace(rho).real
        if abs(tr - 1.0) > 1e-6:
            raise PropagationError(f"trace drift |{tr} - 1| exceeds 1e-6")
        sample(times[k])
    return warnings


def dense_expm_propagate(h, state: np.ndarray, t: float) -> np.ndarray:
    """Dense eigendecomposition propagator, the test oracle for small N."""
    hd = h.toarray() if sp.issparse(h) else np.asarray(h)
    evals, evecs = np.linalg.eigh(hd)
    return evecs @ (np.exp(-1j * evals * t) * (evecs.conj().T @ state))
