"""Observables contracted from the physical density matrix, and trajectory IO.

Everything the benchmark scenarios report: Pauli expectations, Bloch norm,
von Neumann entropy, instantaneous eigen-populations, the Hamiltonian of
mean force recovered from a steady state, and the first-order estimate of
the renormalized oscillation frequency.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from pcl_dyn.errors import ValidationError
from pcl_dyn.generator import SIGMA_X, SIGMA_Y, SIGMA_Z, SystemModel

__all__ = [
    "Trajectory",
    "pauli_expectations",
    "vn_entropy",
    "eigen_populations",
    "hamiltonian_of_mean_force",
    "frequency_estimate",
    "dominant_frequency",
]

CSV_HEADER = "t,sx,sy,sz,bloch_norm,entropy,p_plus,p_minus"


def pauli_expectations(rho: np.ndarray):
    """(sx, sy, sz, |sigma|) of a two-level density matrix."""
    rho = np.asarray(rho, dtype=complex)
    if rho.shape != (2, 2):
        raise ValidationError("pauli_expectations supports d=2 only")
    if abs(np.trace(rho) - 1.0) > 1e-8:
        raise ValidationError("density matrix trace deviates from 1")
    sx = float(np.trace(SIGMA_X @ rho).real)
    sy = float(np.trace(SIGMA_Y @ rho).real)
    sz = float(np.trace(SIGMA_Z @ rho).real)
    return sx, sy, sz, math.sqrt(sx * sx + sy * sy + sz * sz)


def vn_entropy(rho: np.ndarray, floor: float = 1e-10) -> float:
    """-tr[rho ln rho] with eigenvalues clamped at zero; 0 ln 0 = 0.

    Eigenvalues below -floor raise; tier truncation can push transient
    states slightly negative, so trajectory assembly passes a looser floor.
    """
    rho = np.asarray(rho, dtype=complex)
    if abs(np.trace(rho) - 1.0) > 1e-6:
        raise ValidationError("density matrix trace deviates from 1")
    ev = np.linalg.eigvalsh(0.5 * (rho + rho.conj().T))
    if np.min(ev) < -floor:
        raise ValidationError(f"negative eigenvalue {np.min(ev):.3e} beyond tolerance")
    ev = np.clip(ev.real, 0.0, None)
    nz = ev[ev > 0]
    return float(-np.sum(nz * np.log(nz)))


def eigen_populations(rho: np.ndarray):
    """Descending eigenvalues and phase-fixed eigenvectors of rho.

    The phase gauge makes the first component of each eigenvector with
    magnitude above 1e-12 real and positive.
    """
    rho = np.asarray(rho, dtype=complex)
    ev, vec = np.linalg.eigh(0.5 * (rho + rho.conj().T))
    order = np.argsort(ev)[::-1]
    ev = ev[order].real
    vec = vec[:, order]
    for i in range(vec.shape[1]):
        col = vec[:, i]
        j = np.argmax(np.abs(col) > 1e-12)
        phase = col[j] / abs(col[j])
        vec[:, i] = col / phase
    return ev, vec


def hamiltonian_of_mean_force(rho_st: np.ndarray, beta: float):
    """Effective Hamiltonian H_eff with rho_st = exp(-beta H_eff)/Z_eff.

    Gauge-fixed to traceless; the additive constant ln Z_eff is returned
    separately.  Requires a full-rank steady state.
    """
    rho_st = np.asarray(rho_st, dtype=complex)
    ev, vec = np.linalg.eigh(0.5 * (rho_st + rho_st.conj().T))
    if np.min(ev.real) <= 1e-12:
        raise ValidationError(
            f"steady state is rank deficient; eigenvalues {ev.real}")
    log_rho = vec @ np.diag(np.log(ev.real)) @ vec.conj().T
    h = -log_rho / beta
    d = rho_st.shape[0]
    shift = np.trace(h).real / d
    h_eff = h - shift * np.eye(d)
    ln_z = beta * shift
    return h_eff, float(ln_z)


def frequency_estimate(model: SystemModel, g: float) -> float:
    """First-order renormalized splitting 2 sqrt(eps^2 + 4 alpha^2 g^2).

    Only meaningful for the two-level benchmark form (H = eps sigma_z,
    S = alpha sigma_x)."""
    if model.dim != 2:
        raise ValidationError("frequency_estimate supports the two-level benchmark only")
    if (np.max(np.abs(model.H - model.epsilon_s * SIGMA_Z)) > 1e-10
            or np.max(np.abs(model.S - model.alpha * SIGMA_X)) > 1e-10):
        raise ValidationError("model is not in the eps*sigma_z / alpha*sigma_x form")
    return 2.0 * math.sqrt(model.epsilon_s**2 + 4.0 * model.alpha**2 * g**2)


def dominant_frequency(t: np.ndarray, signal: np.ndarray, pad: int = 1 << 17) -> float:
    """Angular frequency of the dominant FFT peak of a real signal.

    The mean is removed, the transform zero-padded, and the peak refined by
    quadratic interpolation of the log magnitude.
    """
    t = np.asarray(t, dtype=float)
    y = np.asarray(signal, dtype=float) - np.mean(signal)
    dt = t[1] - t[0]
    n = max(pad, len(y))
    spec = np.abs(np.fft.rfft(y, n=n))
    freqs = np.fft.rfftfreq(n, d=dt)
    k = int(np.argmax(spec[1:]) + 1)
    if 1 <= k < len(spec) - 1 and spec[k] > 0:
        lm, l0, lp = np.log(spec[k - 1] + 1e-300), np.log(spec[k] + 1e-300), np.log(spec[k + 1] + 1e-300)
        denom = lm - 2 * l0 + lp
        delta = 0.5 * (lm - lp) / denom if denom != 0 else 0.0
    else:
        delta = 0.0
    return 2.0 * math.pi * float(freqs[k] + delta * (freqs[1] - freqs[0]))


@dataclass
class Trajectory:
    """Time series of contracted observables plus run metadata."""

    t: np.ndarray
    sx: np.ndarray
    sy: np.ndarray
    sz: np.ndarray
    bloch_norm: np.ndarray
    entropy: np.ndarray
    p_plus: np.ndarray
    p_minus: np.ndarray
    meta: dict = field(default_factory=dict)

    @classmethod
    def from_states(cls, t, rhos, meta=None) -> "Trajectory":
        """Contract density matrices into observable rows.

        Populations are clamped into [0, 1] and renormalized before the
        entropy is taken: tier truncation can push strongly-coupled
        transients below zero, and the figure pipeline must still report
        them.  The worst eigenvalue seen is recorded in the metadata.
        """
        rows = []
        min_eig = 0.0
        for rho in rhos:
            sx, sy, sz, norm = pauli_expectations(rho)
            pops, _ = eigen_populations(rho)
            min_eig = min(min_eig, float(pops[-1]))
            p = np.clip(pops, 0.0, None)
            p = p / p.sum()
            nz = p[p > 0]
            ent = float(-np.sum(nz * np.log(nz)))
            rows.append((sx, sy, sz, norm, ent, p[0], p[1]))
        arr = np.array(rows, dtype=float)
        meta = dict(meta or {})
        meta.setdefault("min_eigenvalue", f"{min_eig:.6g}")
        return cls(t=np.asarray(t, dtype=float),
                   sx=arr[:, 0], sy=arr[:, 1], sz=arr[:, 2],
                   bloch_norm=arr[:, 3], entropy=arr[:, 4],
                   p_plus=arr[:, 5], p_minus=arr[:, 6],
                   meta=meta)

    def to_csv(self, path) -> None:
        """Write the fixed-schema CSV: metadata as '#' key=value lines,
        floats with 12 significant digits."""
        with open(path, "w") as fh:
            fh.write(self.to_csv_text())

    def to_csv_text(self) -> str:
        lines = [f"# {k}={v}" for k, v in sorted(self.meta.items())]
        lines.append(CSV_HEADER)
        cols = (self.t, self.sx, self.sy, self.sz,
                self.bloch_norm, self.entropy, self.p_plus, self.p_minus)
        for i in range(len(self.t)):
            lines.append(",".join(f"{c[i]:.12g}" for c in cols))
        return "\n".join(lines) + "\n"

    @classmethod
    def from_csv(cls, path) -> "Trajectory":
        meta = {}
        data = []
        saw_header = False
        with open(path) as fh:
            for raw in fh:
                line = raw.strip()
                if not line:
                    continue
                if line.startswith("#"):
                    key, _, value = line[1:].strip().partition("=")
                    meta[key] = value
                elif not saw_header:
                    if line != CSV_HEADER:
                        raise ValidationError(
                            f"CSV at {path} does not match the trajectory "
                            f"schema: header {line!r}")
                    saw_header = True
                else:
                    data.append([float(x) for x in line.split(",")])
        arr = np.array(data, dtype=float)
        if arr.ndim != 2 or arr.shape[1] != 8:
            raise ValidationError(f"CSV at {path} does not match the trajectory schema")
        return cls(t=arr[:, 0], sx=arr[:, 1], sy=arr[:, 2], sz=arr[:, 3],
                   bloch_norm=arr[:, 4], entropy=arr[:, 5],
                   p_plus=arr[:, 6], p_minus=arr[:, 7], meta=meta)
