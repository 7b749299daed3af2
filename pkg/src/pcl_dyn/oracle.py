"""Brute-force verifier: exact dynamics of system x truncated Fock modes.

This is the independent oracle the hierarchy is checked against.  One or
two explicit harmonic modes are kept in a truncated number basis, the full
Hamiltonian (with either the exponential phase coupling or the linear
coupling) is diagonalized, and the reduced system dynamics is obtained by
partial trace.  It deliberately stays desk-scale; it is a verification
tool, not a converged-bath simulator.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from pcl_dyn.errors import ValidationError
from pcl_dyn.generator import SystemModel

__all__ = [
    "DiscreteBath",
    "build_total_hamiltonian",
    "thermal_bath_state",
    "propagate_exact",
    "mode_correlation_check",
]

DIMENSION_CAP = 100_000
#: truncation adequacy: thermal tail weight nbar * exp(-beta w n_max)
TAIL_TOL = 1e-6


@dataclass(frozen=True)
class DiscreteBath:
    """Explicit harmonic modes (omega_j, c_j) with a per-mode Fock cutoff."""

    modes: tuple
    n_max: int
    beta: float

    def __post_init__(self):
        object.__setattr__(self, "modes", tuple((float(w), float(c)) for w, c in self.modes))
        if self.n_max < 2:
            raise ValidationError("need at least two Fock states per mode")
        for w, _ in self.modes:
            if w <= 0:
                raise ValidationError("mode frequencies must be positive")
            x = math.exp(-self.beta * w)
            nbar = x / (1.0 - x)
            if nbar * math.exp(-self.beta * w * self.n_max) > TAIL_TOL:
                raise ValidationError(
                    f"Fock truncation n_max={self.n_max} inadequate for "
                    f"beta*omega={self.beta * w:g}")

    @property
    def dim(self) -> int:
        return self.n_max ** len(self.modes)


def _ladder(n_max: int) -> np.ndarray:
    a = np.zeros((n_max, n_max), dtype=complex)
    for n in range(1, n_max):
        a[n - 1, n] = math.sqrt(n)
    return a


def _mode_ops(bath: DiscreteBath):
    """Position operator of each mode embedded in the full bath space."""
    nm = bath.n_max
    a = _ladder(nm)
    x = (a + a.conj().T) / math.sqrt(2.0)
    num = a.conj().T @ a
    xs, nums = [], []
    J = len(bath.modes)
    for j in range(J):
        ops_x = [np.eye(nm, dtype=complex)] * J
        ops_n = [np.eye(nm, dtype=complex)] * J
        ops_x[j] = x
        ops_n[j] = num
        full_x, full_n = ops_x[0], ops_n[0]
        for k in range(1, J):
            full_x = np.kron(full_x, ops_x[k])
            full_n = np.kron(full_n, ops_n[k])
        xs.append(full_x)
        nums.append(full_n)
    return xs, nums


def collective_coordinate(bath: DiscreteBath) -> np.ndarray:
    """F = sum_j c_j x_j on the truncated bath space."""
    xs, _ = _mode_ops(bath)
    return sum(c * x for (_, c), x in zip(bath.modes, xs))


def bath_hamiltonian(bath: DiscreteBath) -> np.ndarray:
    """H_B = sum_j omega_j n_j (zero-point energy dropped)."""
    _, nums = _mode_ops(bath)
    return sum(w * n for (w, _), n in zip(bath.modes, nums))


def phase_coupling_operator(bath: DiscreteBath, lam: float) -> np.ndarray:
    """B = exp(i lam F) + exp(-i lam F) = 2 cos(lam F).

    Built from the eigendecomposition of the truncated F so the
    exponentials are unitary to machine precision within the subspace.
    """
    F = collective_coordinate(bath)
    ev, vec = np.linalg.eigh(F)
    return vec @ np.diag(2.0 * np.cos(lam * ev)) @ vec.conj().T


def build_total_hamiltonian(model: SystemModel, bath: DiscreteBath,
                            coupling: str = "pcl") -> np.ndarray:
    """H_T = H_S x 1 + S x B + 1 x H_B on the product space."""
    D = bath.dim
    if model.dim * D > DIMENSION_CAP:
        raise ValidationError(f"product dimension {model.dim * D} exceeds cap")
    if coupling == "pcl":
        B = phase_coupling_operator(bath, model.lam)
    elif coupling == "cl":
        B = collective_coordinate(bath)
    else:
        raise ValidationError(f"unknown coupling kind {coupling!r}")
    eye_b = np.eye(D, dtype=complex)
    eye_s = np.eye(model.dim, dtype=complex)
    return (np.kron(model.H, eye_b) + np.kron(model.S, B)
            + np.kron(eye_s, bath_hamiltonian(bath)))


def thermal_bath_state(bath: DiscreteBath) -> np.ndarray:
    """Product of per-mode thermal states, renormalized after truncation."""
    rho = None
    for w, _ in bath.modes:
        p = np.exp(-bath.beta * w * np.arange(bath.n_max))
        p /= p.sum()
        mode = np.diag(p.astype(complex))
        rho = mode if rho is None else np.kron(rho, mode)
    return rho


def _partial_trace_bath(rho_t: np.ndarray, d: int, D: int) -> np.ndarray:
    return np.einsum("aibi->ab", rho_t.reshape(d, D, d, D))


def propagate_exact(model: SystemModel, bath: DiscreteBath, coupling: str,
                    t_grid, rho0: np.ndarray | None = None) -> np.ndarray:
    """Reduced system dynamics rho_S(t) by full eigendecomposition.

    Initial condition is the product rho0 x thermal bath state.
    """
    d = model.dim
    D = bath.dim
    H = build_total_hamiltonian(model, bath, coupling)
    if rho0 is None:
        rho0 = np.zeros((d, d), dtype=complex)
        rho0[0, 0] = 1.0
    rho_total = np.kron(np.asarray(rho0, dtype=complex), thermal_bath_state(bath))
    ev, vec = np.linalg.eigh(H)
    rho_eig = vec.conj().T @ rho_total @ vec
    out = np.empty((len(t_grid), d, d), dtype=complex)
    for i, t in enumerate(t_grid):
        phase = np.exp(-1j * ev * t)
        rho_t = vec @ (phase[:, None] * rho_eig * np.conj(phase)[None, :]) @ vec.conj().T
        out[i] = _partial_trace_bath(rho_t, d, D)
    return out


def mode_correlation_check(bath: DiscreteBath, t_grid=None) -> float:
    """Max deviation of the exact single-mode <F(t) F(0)> from the
    two-exponential decomposition."""
    from pcl_dyn.bath import discrete_mode_decompose, reconstruct

    if len(bath.modes) != 1:
        raise ValidationError("mode_correlation_check expects a single mode")
    if t_grid is None:
        t_grid = np.linspace(0.0, 10.0 / bath.modes[0][0], 64)
    w, c = bath.modes[0]
    F = collective_coordinate(bath)
    Hb = bath_hamiltonian(bath)
    rho_eq = thermal_bath_state(bath)
    ev, vec = np.linalg.eigh(Hb)
    F_eig = vec.conj().T @ F @ vec
    rho_eig = vec.conj().T @ rho_eq @ vec
    spec = discrete_mode_decompose(w, c, bath.beta)
    worst = 0.0
    for t in np.atleast_1d(t_grid):
        phase = np.exp(1j * ev * t)
        F_t = phase[:, None] * F_eig * np.conj(phase)[None, :]
        exact = complex(np.trace(F_t @ F_eig @ rho_eig))
        model_val = complex(reconstruct(spec, [t])[0])
        worst = max(worst, abs(exact - model_val))
    return worst
