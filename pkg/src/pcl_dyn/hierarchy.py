"""Multi-index enumeration and precomputed coupling tables.

The dynamical variables are labeled by multi-indices n = (n_1..n_K) with
tier sum(n) <= L.  For the phase-coupled model the inter-index coupling is
the re-indexed finite form of the generator's double sum: for a fixed
(row, column) pair only finitely many contraction counts l contribute,
since l_k <= n_k per component.  The table is built once, pruned, and kept
immutable; row 0 of any table satisfies A_left == A_right, which is what
makes the trace of the physical block conserved.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from math import comb, factorial

import numpy as np

from pcl_dyn.bath import DissipatonSpectrum, validate_spectrum
from pcl_dyn.errors import ValidationError

__all__ = [
    "IndexSpace",
    "CouplingTable",
    "enumerate_indices",
    "index_lookup",
    "build_pcl_coupling",
    "build_cl_coupling",
]

PRUNE_RTOL = 1e-14


def _compositions(K: int, total: int):
    """Weak compositions of ``total`` into K parts, first part descending."""
    if K == 1:
        yield (total,)
        return
    for first in range(total, -1, -1):
        for rest in _compositions(K - 1, total - first):
            yield (first,) + rest


def enumerate_indices(K: int, L: int) -> list[tuple[int, ...]]:
    """All multi-indices with tier <= L, tier-major canonical order.

    The count is binom(L + K, K).
    """
    if K < 1 or L < 0:
        raise ValidationError("need K >= 1 and L >= 0")
    out = []
    for tier in range(L + 1):
        out.extend(_compositions(K, tier))
    return out


@dataclass(frozen=True)
class IndexSpace:
    """Frozen enumeration of the truncated index set with O(1) lookup."""

    K: int
    L: int
    indices: tuple
    offset: dict

    @classmethod
    def build(cls, K: int, L: int) -> "IndexSpace":
        idx = tuple(enumerate_indices(K, L))
        return cls(K=K, L=L, indices=idx,
                   offset={n: i for i, n in enumerate(idx)})

    def __len__(self) -> int:
        return len(self.indices)

    def lookup(self, counts) -> int | None:
        """Offset of a multi-index, or None when it lies beyond the truncation."""
        return self.offset.get(tuple(counts))


def index_lookup(space: IndexSpace, counts) -> int | None:
    return space.lookup(counts)


@dataclass(frozen=True)
class CouplingTable:
    """Sparse-in-spirit coupling weights between hierarchy rows.

    The generator applies, for every row n,
        drho_n += -i * sum_n' a_left[n, n']  S rho_n'
                  +i * sum_n' a_right[n, n'] rho_n' S
    on top of the common -i[H, rho_n] - damping[n] rho_n part.
    """

    space: IndexSpace
    model: str
    convention: str | None
    g: float
    a_left: np.ndarray
    a_right: np.ndarray
    damping: np.ndarray

    def __post_init__(self):
        for arr in (self.a_left, self.a_right, self.damping):
            arr.setflags(write=False)

    def entries(self, row: int):
        """Nonzero (column, A_left, A_right) triples of one row."""
        cols = np.nonzero((self.a_left[row] != 0) | (self.a_right[row] != 0))[0]
        return [(int(c), self.a_left[row, c], self.a_right[row, c]) for c in cols]

    def dump_text(self) -> str:
        """Debug dump for diffing tables across implementations."""
        lines = [f"# model={self.model} K={self.space.K} L={self.space.L} "
                 f"convention={self.convention} g={self.g!r}"]
        for i in range(len(self.space)):
            for c, al, ar in self.entries(i):
                lines.append(f"{i} {c} {al.real!r} {al.imag!r} {ar.real!r} {ar.imag!r}")
        return "\n".join(lines) + "\n"


def _prune(a: np.ndarray) -> np.ndarray:
    peak = np.max(np.abs(a)) if a.size else 0.0
    if peak > 0:
        a[np.abs(a) < PRUNE_RTOL * peak] = 0.0
    return a


def _damping(space: IndexSpace, gamma: np.ndarray) -> np.ndarray:
    return np.array([np.dot(n, gamma) for n in space.indices], dtype=complex)


def build_pcl_coupling(
    spec: DissipatonSpectrum,
    lam: float,
    L: int,
    convention: str = "even",
) -> CouplingTable:
    """Coupling table of the phase-coupled generator at truncation level L.

    For each ordered pair (n, n') with both tiers <= L,

        A_left(n, n') = g * sum_l s(m) * prod_k eta_k^{l_k}
                        * C(n_k, l_k) / (m_k - l_k)!

    with per-component m_k = n'_k - n_k + 2 l_k and admissible
    max(0, n_k - n'_k) <= l_k <= n_k.  The phase factor is
    s(m) = (i lam)^m + (-i lam)^m under the default 'even' convention and
    the difference under 'odd-paper-literal'; either kills half of all
    parities, so entries vanish unless sum(n' - n) matches the convention
    parity.  A_right uses conj(eta[pair(k)]) in place of eta_k.
    """
    if convention not in ("even", "odd-paper-literal"):
        raise ValidationError(f"unknown sign convention {convention!r}")
    g = validate_spectrum(spec, lam=lam).g
    K = spec.K
    space = IndexSpace.build(K, L)
    N = len(space)
    eta_l = spec.eta
    eta_r = np.conj(spec.eta[spec.pair])
    want_parity = 0 if convention == "even" else 1

    a_left = np.zeros((N, N), dtype=complex)
    a_right = np.zeros((N, N), dtype=complex)
    for i, n in enumerate(space.indices):
        for j, np_ in enumerate(space.indices):
            if (sum(np_) - sum(n)) % 2 != want_parity:
                continue
            tot_l = 0.0 + 0j
            tot_r = 0.0 + 0j
            ranges = [range(max(0, n[k] - np_[k]), n[k] + 1) for k in range(K)]
            for ls in itertools.product(*ranges):
                m = 0
                w_l = 1.0 + 0j
                w_r = 1.0 + 0j
                for k in range(K):
                    mk = np_[k] - n[k] + 2 * ls[k]
                    m += mk
                    base = comb(n[k], ls[k]) / factorial(mk - ls[k])
                    w_l *= base * eta_l[k] ** ls[k]
                    w_r *= base * eta_r[k] ** ls[k]
                # s(m) = 2 (i lam)^m on the surviving parity
                s = 2.0 * (1j * lam) ** m
                tot_l += s * w_l
                tot_r += s * w_r
            a_left[i, j] = g * tot_l
            a_right[i, j] = g * tot_r
    return CouplingTable(space=space, model="pcl", convention=convention, g=g,
                         a_left=_prune(a_left), a_right=_prune(a_right),
                         damping=_damping(space, spec.gamma))


def build_cl_coupling(spec: DissipatonSpectrum, L: int) -> CouplingTable:
    """Nearest-tier coupling table of the linear-coupling baseline.

    Upward moves carry symmetric weight 1 (commutator with the coupling
    operator); the downward move along mode k carries n_k eta_k on the left
    and n_k conj(eta[pair(k)]) on the right.
    """
    validate_spectrum(spec)
    K = spec.K
    space = IndexSpace.build(K, L)
    N = len(space)
    eta_r = np.conj(spec.eta[spec.pair])
    a_left = np.zeros((N, N), dtype=complex)
    a_right = np.zeros((N, N), dtype=complex)
    for i, n in enumerate(space.indices):
        for k in range(K):
            up = list(n)
            up[k] += 1
            j = space.lookup(up)
            if j is not None:
                a_left[i, j] += 1.0
                a_right[i, j] += 1.0
            if n[k] > 0:
                down = list(n)
                down[k] -= 1
                j = space.lookup(down)
                a_left[i, j] += n[k] * spec.eta[k]
                a_right[i, j] += n[k] * eta_r[k]
    return CouplingTable(space=space, model="cl", convention=None, g=1.0,
                         a_left=_prune(a_left), a_right=_prune(a_right),
                         damping=_damping(space, spec.gamma))
