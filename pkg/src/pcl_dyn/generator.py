"""Right-hand side of the hierarchical equations of motion.

Both models share the same evaluation shape: a common unitary + damping
part plus a table-driven coupling, so a single routine serves the
phase-coupled generator and the linear baseline once the matching
``CouplingTable`` is supplied.  The generator is exposed as a pure
state -> derivative map; a dense superoperator can also be assembled for
eigenvalue diagnostics and steady-state cross-checks.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from pcl_dyn.errors import ConfigError, ValidationError
from pcl_dyn.hierarchy import CouplingTable

__all__ = [
    "SystemModel",
    "HierarchyState",
    "table_rhs",
    "pcl_rhs",
    "cl_rhs",
    "assemble_superoperator",
    "spectral_abscissa",
    "hermiticity_defect",
]

SIGMA_X = np.array([[0.0, 1.0], [1.0, 0.0]], dtype=complex)
SIGMA_Y = np.array([[0.0, -1.0j], [1.0j, 0.0]], dtype=complex)
SIGMA_Z = np.array([[1.0, 0.0], [0.0, -1.0]], dtype=complex)

HERMITICITY_TOL = 1e-12


@dataclass(frozen=True)
class SystemModel:
    """System Hamiltonian, coupling operator and scenario scalars."""

    H: np.ndarray
    S: np.ndarray
    lam: float
    epsilon_s: float = 1.0
    alpha: float = 1.0

    def __post_init__(self):
        H = np.asarray(self.H, dtype=complex)
        S = np.asarray(self.S, dtype=complex)
        if H.ndim != 2 or H.shape[0] != H.shape[1] or H.shape != S.shape:
            raise ValidationError("H and S must be square matrices of equal size")
        for name, op in (("H", H), ("S", S)):
            if np.max(np.abs(op - op.conj().T)) > HERMITICITY_TOL:
                raise ValidationError(f"{name} is not Hermitian")
        object.__setattr__(self, "H", H)
        object.__setattr__(self, "S", S)
        H.setflags(write=False)
        S.setflags(write=False)

    @property
    def dim(self) -> int:
        return self.H.shape[0]

    @classmethod
    def two_level(cls, epsilon_s: float, alpha: float, lam: float) -> "SystemModel":
        """Benchmark model: H = eps * sigma_z, S = alpha * sigma_x."""
        return cls(H=epsilon_s * SIGMA_Z, S=alpha * SIGMA_X, lam=lam,
                   epsilon_s=epsilon_s, alpha=alpha)


@dataclass
class HierarchyState:
    """One complex d x d matrix per multi-index, in enumeration order."""

    data: np.ndarray  # shape (N, d, d)
    t: float = 0.0

    @classmethod
    def initial(cls, rho0: np.ndarray, n_indices: int) -> "HierarchyState":
        """Factorized initial condition: physical block rho0, all others zero."""
        rho0 = np.asarray(rho0, dtype=complex)
        if abs(np.trace(rho0) - 1.0) > 1e-10:
            raise ValidationError("initial density matrix must have unit trace")
        d = rho0.shape[0]
        data = np.zeros((n_indices, d, d), dtype=complex)
        data[0] = rho0
        return cls(data=data, t=0.0)

    @property
    def rho(self) -> np.ndarray:
        """The physical reduced density matrix (row 0)."""
        return self.data[0]


def table_rhs(data: np.ndarray, model: SystemModel, table: CouplingTable) -> np.ndarray:
    """Derivative of the full hierarchy block array under a coupling table.

    drho_n = -i[H, rho_n] - damping_n rho_n
             - i sum_n' A_left(n,n') S rho_n'
             + i sum_n' A_right(n,n') rho_n' S
    """
    if data.shape[0] != len(table.space) or data.shape[1] != model.dim:
        raise ConfigError("state shape does not match model/table dimensions")
    H, S = model.H, model.S
    s_rho = np.einsum("ab,jbc->jac", S, data)
    rho_s = np.einsum("jab,bc->jac", data, S)
    out = -1j * (np.einsum("ab,jbc->jac", H, data) - np.einsum("jab,bc->jac", data, H))
    out -= table.damping[:, None, None] * data
    out -= 1j * np.einsum("ij,jab->iab", table.a_left, s_rho)
    out += 1j * np.einsum("ij,jab->iab", table.a_right, rho_s)
    return out


def pcl_rhs(data: np.ndarray, model: SystemModel, table: CouplingTable) -> np.ndarray:
    if table.model != "pcl":
        raise ConfigError("pcl_rhs needs a table built by build_pcl_coupling")
    return table_rhs(data, model, table)


def cl_rhs(data: np.ndarray, model: SystemModel, table: CouplingTable) -> np.ndarray:
    if table.model != "cl":
        raise ConfigError("cl_rhs needs a table built by build_cl_coupling")
    return table_rhs(data, model, table)


def assemble_superoperator(model: SystemModel, table: CouplingTable) -> np.ndarray:
    """Dense matrix form of table_rhs acting on the row-major flattened state.

    vec(A rho B) = (A kron B^T) vec(rho); cheap at desk scale and used for
    spectral diagnostics and steady-state null-space solves.
    """
    d = model.dim
    N = len(table.space)
    eye_d = np.eye(d)
    eye_n = np.eye(N)
    comm = np.kron(model.H, eye_d) - np.kron(eye_d, model.H.T)
    s_left = np.kron(model.S, eye_d)
    s_right = np.kron(eye_d, model.S.T)
    M = np.kron(eye_n, -1j * comm)
    M -= np.kron(np.diag(table.damping), np.eye(d * d))
    M -= 1j * np.kron(table.a_left, s_left)
    M += 1j * np.kron(table.a_right, s_right)
    return M


def spectral_abscissa(M: np.ndarray, drop_null: bool = True) -> float:
    """Largest real part of the generator spectrum, optionally excluding the
    (near-)null steady-state eigenvalue."""
    ev = np.linalg.eigvals(M)
    if drop_null:
        ev = np.delete(ev, np.argmin(np.abs(ev)))
    return float(np.max(ev.real)) if len(ev) else 0.0


def hermiticity_defect(data: np.ndarray, space, mode_pair) -> float:
    """Max deviation from rho_{nbar} == rho_n^dagger.

    nbar swaps the counts between conjugate-paired modes:
    nbar_k = n_{pair(k)}.  ``mode_pair`` is the spectrum's pairing array.
    """
    worst = 0.0
    for i, n in enumerate(space.indices):
        nbar = tuple(n[mode_pair[k]] for k in range(space.K))
        j = space.lookup(nbar)
        worst = max(worst, float(np.max(np.abs(data[j] - data[i].conj().T))))
    return worst
