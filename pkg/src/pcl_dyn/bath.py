"""Bath correlation functions and their exponential decompositions.

The environment enters the dynamics only through the correlation function
C(t) of the collective bath coordinate.  Everything downstream works with a
finite sum of exponentials C(t) = sum_k eta_k exp(-gamma_k t), held in a
``DissipatonSpectrum``.  This module builds such spectra analytically (Drude
pole + Matsubara series, single discrete mode) or by Prony fitting of
sampled data, and checks them against direct quadrature of the
fluctuation-dissipation integral.

Units: hbar = 1, energies in units of the system splitting, xi in energy^2.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field

import numpy as np
from scipy.integrate import quad

from pcl_dyn.errors import FitError, QuadratureError, ValidationError

__all__ = [
    "SpectralDensity",
    "DissipatonSpectrum",
    "spectral_density_eval",
    "correlation_fdt",
    "matsubara_decompose_drude",
    "prony_fit",
    "discrete_mode_decompose",
    "validate_spectrum",
    "g_factor",
    "fit_residual",
    "reconstruct",
    "reconstruct_backward",
    "spectrum_to_text",
    "spectrum_from_text",
]

#: default absolute quadrature tolerance per point
QUAD_ATOL = 1e-10
#: relative tolerance on Im(sum eta) before validation complains
IMAG_SUM_RTOL = 1e-6


@dataclass(frozen=True)
class SpectralDensity:
    """Spectral density J(omega), antisymmetric in omega.

    kind 'drude': J(w) = xi * w / (w^2 + gamma_c^2).
    kind 'discrete_mode': a single harmonic mode (omega0, c); J is a pair of
    delta functions and cannot be evaluated pointwise.
    """

    kind: str
    xi: float = 0.0
    gamma_c: float = 1.0
    omega0: float = 0.0
    c: float = 0.0

    def __post_init__(self):
        if self.kind not in ("drude", "discrete_mode"):
            raise ValidationError(f"unknown spectral density kind {self.kind!r}")
        if self.xi < 0:
            raise ValidationError("coupling strength xi must be >= 0")
        if self.kind == "drude" and self.gamma_c <= 0:
            raise ValidationError("Drude cutoff gamma_c must be > 0")
        if self.kind == "discrete_mode" and self.omega0 <= 0:
            raise ValidationError("mode frequency omega0 must be > 0")


@dataclass(frozen=True)
class DissipatonSpectrum:
    """Exponential decomposition C(t) = sum_k eta[k] exp(-gamma[k] t).

    ``pair`` maps each index k to its conjugate partner kbar with
    gamma[pair[k]] == conj(gamma[k]) exactly; real exponents are self-paired.
    """

    eta: np.ndarray
    gamma: np.ndarray
    pair: np.ndarray
    beta: float

    def __post_init__(self):
        object.__setattr__(self, "eta", np.asarray(self.eta, dtype=complex))
        object.__setattr__(self, "gamma", np.asarray(self.gamma, dtype=complex))
        object.__setattr__(self, "pair", np.asarray(self.pair, dtype=int))
        self.eta.setflags(write=False)
        self.gamma.setflags(write=False)
        self.pair.setflags(write=False)

    @property
    def K(self) -> int:
        return len(self.eta)


def spectral_density_eval(sd: SpectralDensity, omega: float) -> float:
    """Evaluate J(omega); only continuous densities support this."""
    if sd.kind != "drude":
        raise ValidationError(f"spectral density of kind {sd.kind!r} is not pointwise evaluable")
    return sd.xi * omega / (omega**2 + sd.gamma_c**2)


def _thermal_weight(sd: SpectralDensity, beta: float, omega: np.ndarray) -> np.ndarray:
    """J(w) * coth(beta w / 2), with the finite w->0 limit 2 xi/(beta gamma_c^2)."""
    omega = np.asarray(omega, dtype=float)
    small = np.abs(beta * omega) < 1e-8
    safe = np.where(small, 1.0, omega)
    val = sd.xi * safe / (safe**2 + sd.gamma_c**2) / np.tanh(beta * safe / 2.0)
    limit = 2.0 * sd.xi / (beta * sd.gamma_c**2)
    return np.where(small, limit, val)


def correlation_fdt(
    sd: SpectralDensity,
    beta: float,
    t: float,
    cutoff: float | None = None,
    atol: float = QUAD_ATOL,
    backward: bool = False,
) -> complex:
    """Bath correlation C(t) from the thermal quadrature over the density.

    Folding the integral over omega > 0 gives
    C(t) = (1/pi) int_0^inf J(w) [coth(bw/2) cos(wt) - i sin(wt)] dw,
    evaluated with oscillatory-weight quadrature up to a finite cutoff
    (default 200 * max(gamma_c, 1/beta)).  Note the Drude Re C(0) grows
    logarithmically with the cutoff; callers comparing t=0 values must fix it.

    With ``backward=True`` returns C(-t) = conj(C(t)).
    """
    if t < 0:
        raise ValidationError("correlation_fdt expects t >= 0; use backward=True for C(-t)")
    if sd.kind != "drude":
        raise ValidationError("correlation_fdt requires an evaluable spectral density")
    if cutoff is None:
        cutoff = 200.0 * max(sd.gamma_c, 1.0 / beta)

    def re_part(w):
        return _thermal_weight(sd, beta, w) / math.pi

    def im_part(w):
        return spectral_density_eval(sd, w) / math.pi

    limit = 800
    if t == 0.0:
        re, re_err = quad(re_part, 0.0, cutoff, epsabs=atol, epsrel=1e-12, limit=limit)
        im, im_err = 0.0, 0.0
    else:
        # true Fourier integrals to infinity (QAWF); no cutoff truncation tail
        re, re_err = quad(re_part, 0.0, np.inf, weight="cos", wvar=t,
                          epsabs=atol, limit=limit)
        im, im_err = quad(im_part, 0.0, np.inf, weight="sin", wvar=t,
                          epsabs=atol, limit=limit)
    err = re_err + im_err
    value = complex(re, -im)
    if err > max(atol * 100.0, 1e-13 * abs(value)):
        raise QuadratureError(
            f"quadrature error estimate {err:.3e} exceeds tolerance at t={t}",
            estimate=value, error=err)
    return value.conjugate() if backward else value


def _pair_of_terms(gamma: np.ndarray, tol: float = 1e-9) -> np.ndarray:
    """Pair conjugate exponents; real exponents pair with themselves.

    Mutates nothing; raises FitError when a complex exponent has no
    conjugate partner within tolerance.
    """
    K = len(gamma)
    scale = max(1.0, float(np.max(np.abs(gamma))))
    pair = -np.ones(K, dtype=int)
    for k in range(K):
        if pair[k] >= 0:
            continue
        if abs(gamma[k].imag) <= tol * scale:
            pair[k] = k
            continue
        candidates = [
            j for j in range(K)
            if pair[j] < 0 and j != k and abs(gamma[j] - np.conj(gamma[k])) <= tol * scale
        ]
        if not candidates:
            raise FitError(f"exponent {gamma[k]} has no conjugate partner")
        j = min(candidates, key=lambda j: abs(gamma[j] - np.conj(gamma[k])))
        pair[k], pair[j] = j, k
    return pair


def _canonicalize(eta, gamma, beta) -> DissipatonSpectrum:
    """Enforce exact conjugate pairing and build the spectrum object."""
    eta = np.asarray(eta, dtype=complex).copy()
    gamma = np.asarray(gamma, dtype=complex).copy()
    pair = _pair_of_terms(gamma)
    for k in range(len(gamma)):
        j = pair[k]
        if j == k:
            gamma[k] = complex(gamma[k].real, 0.0)
        elif j > k:
            # make gamma[j] = conj(gamma[k]) bit-exact
            mean = 0.5 * (gamma[k] + np.conj(gamma[j]))
            gamma[k] = mean
            gamma[j] = np.conj(mean)
    return DissipatonSpectrum(eta=eta, gamma=gamma, pair=pair, beta=beta)


def matsubara_decompose_drude(sd: SpectralDensity, beta: float, K: int) -> DissipatonSpectrum:
    """Pole + Matsubara decomposition of the Drude correlation function.

    Term 1 is the Drude pole residue, eta_1 = (xi/2)[cot(beta gamma/2) - i]
    at gamma_1 = gamma_c; terms 2..K sit at the Matsubara frequencies
    nu_n = 2 pi n / beta with eta = 2 xi nu_n / (beta (nu_n^2 - gamma_c^2)).
    """
    if sd.kind != "drude":
        raise ValidationError("matsubara_decompose_drude requires a Drude density")
    if K < 1:
        raise ValidationError("need at least one exponential term")
    half = beta * sd.gamma_c / 2.0
    if abs(half / math.pi - round(half / math.pi)) * math.pi < 1e-9:
        raise ValidationError("beta*gamma_c/2 sits on a cot() pole")
    eta = np.empty(K, dtype=complex)
    gamma = np.empty(K, dtype=complex)
    eta[0] = (sd.xi / 2.0) * (1.0 / math.tan(half) - 1j)
    gamma[0] = sd.gamma_c
    for n in range(1, K):
        nu = 2.0 * math.pi * n / beta
        if abs(nu - sd.gamma_c) < 1e-12 * max(nu, sd.gamma_c):
            raise ValidationError(f"Matsubara frequency nu_{n} coincides with the Drude pole")
        eta[n] = 2.0 * sd.xi * nu / (beta * (nu**2 - sd.gamma_c**2))
        gamma[n] = nu
    return _canonicalize(eta, gamma, beta)


def discrete_mode_decompose(omega0: float, c: float, beta: float) -> DissipatonSpectrum:
    """Exact two-term spectrum of a single thermal harmonic mode.

    C(t) = c^2/2 [(nbar+1) e^{-i w0 t} + nbar e^{+i w0 t}], i.e. purely
    imaginary conjugate exponents +-i w0.
    """
    if omega0 <= 0:
        raise ValidationError("omega0 must be > 0")
    # exp(-x)/(1 - exp(-x)) underflows gracefully at low temperature where
    # 1/expm1(x) would overflow
    x = math.exp(-beta * omega0)
    nbar = x / (1.0 - x)
    eta = np.array([c**2 * (nbar + 1.0) / 2.0, c**2 * nbar / 2.0], dtype=complex)
    gamma = np.array([1j * omega0, -1j * omega0], dtype=complex)
    return DissipatonSpectrum(eta=eta, gamma=gamma, pair=np.array([1, 0]), beta=beta)


@dataclass
class SpectrumReport:
    """Outcome of validate_spectrum."""

    ok: bool
    checks: dict = field(default_factory=dict)
    eta_sum: complex = 0.0
    g: float | None = None


def validate_spectrum(
    spec: DissipatonSpectrum,
    lam: float | None = None,
    imag_rtol: float = IMAG_SUM_RTOL,
) -> SpectrumReport:
    """Check pairing and reality invariants; optionally compute the g factor.

    g = exp(-lam^2 * Re(sum_k eta_k) / 2) is always taken from the working
    (truncated) spectrum, never from quadrature: the raw Drude <F^2>
    diverges with the frequency cutoff, only the finite-K sum is meaningful.
    """
    checks = {}
    p = spec.pair
    if sorted(p.tolist()) != list(range(spec.K)):
        raise ValidationError("pair is not a permutation")
    checks["pair_involution"] = bool(np.all(p[p] == np.arange(spec.K)))
    if not checks["pair_involution"]:
        raise ValidationError("pair map is not an involution")
    checks["conjugate_exponents"] = bool(
        np.all(spec.gamma[p] == np.conj(spec.gamma)))
    if not checks["conjugate_exponents"]:
        raise ValidationError("gamma[pair(k)] != conj(gamma[k])")
    checks["damping_sign"] = bool(np.all(spec.gamma.real >= 0))
    if not checks["damping_sign"]:
        raise ValidationError("some Re gamma_k < 0 (growing exponential)")
    s = complex(np.sum(spec.eta))
    checks["imag_eta_sum"] = abs(s.imag) <= imag_rtol * max(abs(s.real), 1e-300)
    if not checks["imag_eta_sum"]:
        # The exponential series of C(t) is discontinuous at t=0+ (the pole
        # term carries Im eta_1 = -xi/2 for Drude), so only the real part
        # enters g.  Report, do not fail.
        warnings.warn(
            f"Im(sum eta) = {s.imag:.3e} exceeds {imag_rtol:g} of "
            f"Re = {s.real:.3e}; imaginary part is dropped for g",
            stacklevel=2)
    g = None
    if lam is not None:
        g = math.exp(-(lam**2) * s.real / 2.0)
    return SpectrumReport(ok=True, checks=checks, eta_sum=s, g=g)


def g_factor(spec: DissipatonSpectrum, lam: float) -> float:
    """Polaron renormalization factor from the truncated spectrum."""
    return validate_spectrum(spec, lam=lam).g


def reconstruct(spec: DissipatonSpectrum, t) -> np.ndarray:
    """C(t) = sum_k eta_k exp(-gamma_k t) on an array of times."""
    t = np.atleast_1d(np.asarray(t, dtype=float))
    return np.sum(spec.eta[None, :] * np.exp(-np.outer(t, spec.gamma)), axis=1)


def reconstruct_backward(spec: DissipatonSpectrum, t) -> np.ndarray:
    """C(-t) = conj(C(t)) via the paired coefficients conj(eta[pair(k)])."""
    t = np.atleast_1d(np.asarray(t, dtype=float))
    coeff = np.conj(spec.eta[spec.pair])
    return np.sum(coeff[None, :] * np.exp(-np.outer(t, spec.gamma)), axis=1)


def prony_fit(samples, K: int, realify_rtol: float = 0.1) -> DissipatonSpectrum:
    """Least-squares multi-exponential fit of uniformly sampled C(t).

    Uses linear prediction on the sample sequence followed by a Vandermonde
    solve for the amplitudes.  Exponents with |z| > 1 are reflected into the
    unit disc so that Re gamma >= 0.  Needs >= 4K samples on a uniform grid.
    """
    samples = list(samples)
    if len(samples) < 4 * K:
        raise FitError(f"need at least {4 * K} samples for K={K}, got {len(samples)}")
    t = np.array([s[0] for s in samples], dtype=float)
    y = np.array([s[1] for s in samples], dtype=complex)
    dt = t[1] - t[0]
    if dt <= 0 or not np.allclose(np.diff(t), dt, rtol=1e-8, atol=1e-12 * max(abs(t[-1]), 1.0)):
        raise FitError("samples must lie on a uniform, increasing time grid")

    # linear prediction: y[i+K] = sum_j a_j y[i+K-j]
    n = len(y)
    A = np.column_stack([y[K - j:n - j] for j in range(1, K + 1)])
    b = y[K:]
    coeffs, res, rank, _ = np.linalg.lstsq(A, b, rcond=None)
    if rank < K:
        residual = float(np.linalg.norm(A @ coeffs - b))
        raise FitError(f"rank-deficient Hankel system (rank {rank} < {K})",
                       residual=residual)
    z = np.roots(np.concatenate(([1.0], -coeffs)))
    # stabilize: reflect unstable roots into the unit disc
    grow = np.abs(z) > 1.0
    z[grow] = 1.0 / np.conj(z[grow])
    gamma = -np.log(z) / dt

    # C(t) is complex, so exponents need not come out conjugate-paired;
    # snap nearly-real ones onto the real axis (self-paired) and refit the
    # amplitudes with the snapped exponents
    scale = np.max(np.abs(gamma))
    for k in range(len(gamma)):
        near_conj = np.min(np.abs(np.delete(gamma, k) - np.conj(gamma[k]))) if len(gamma) > 1 else np.inf
        if abs(gamma[k].imag) <= realify_rtol * scale and abs(gamma[k].imag) < near_conj:
            gamma[k] = complex(gamma[k].real, 0.0)

    V = np.exp(-np.outer(t, gamma))
    eta, _, _, _ = np.linalg.lstsq(V, y, rcond=None)
    spec = _canonicalize(eta, gamma, beta=math.nan)
    return spec


def fit_residual(spec: DissipatonSpectrum, samples) -> float:
    """RMS misfit of a spectrum against sampled correlation data."""
    t = np.array([s[0] for s in samples], dtype=float)
    y = np.array([s[1] for s in samples], dtype=complex)
    return float(np.sqrt(np.mean(np.abs(reconstruct(spec, t) - y) ** 2)))


def spectrum_to_text(spec: DissipatonSpectrum) -> str:
    """Serialize a spectrum to the plain-text block format.

    One header line per scalar field, then one ``term =`` line per
    exponential carrying Re eta, Im eta, Re gamma, Im gamma and the 1-based
    conjugate-partner index.
    """
    lines = [f"K = {spec.K}", f"beta = {float(spec.beta)!r}"]
    for k in range(spec.K):
        e, gm = complex(spec.eta[k]), complex(spec.gamma[k])
        lines.append(
            f"term = {e.real!r} {e.imag!r} {gm.real!r} {gm.imag!r} {spec.pair[k] + 1}")
    return "\n".join(lines) + "\n"


def spectrum_from_text(text: str) -> DissipatonSpectrum:
    """Parse the block format written by spectrum_to_text."""
    K = None
    beta = None
    terms = []
    for raw in text.splitlines():
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        key, _, value = line.partition("=")
        key, value = key.strip(), value.strip()
        if key == "K":
            K = int(value)
        elif key == "beta":
            beta = float(value)
        elif key == "term":
            parts = value.split()
            if len(parts) != 5:
                raise ValidationError(f"bad term line: {raw!r}")
            terms.append((complex(float(parts[0]), float(parts[1])),
                          complex(float(parts[2]), float(parts[3])),
                          int(parts[4]) - 1))
        else:
            raise ValidationError(f"unknown field {key!r} in spectrum block")
    if K is None or beta is None:
        raise ValidationError("spectrum block is missing K or beta")
    if len(terms) != K:
        raise ValidationError(f"declared K={K} but found {len(terms)} terms")
    eta = np.array([tm[0] for tm in terms])
    gamma = np.array([tm[1] for tm in terms])
    pair = np.array([tm[2] for tm in terms])
    spec = DissipatonSpectrum(eta=eta, gamma=gamma, pair=pair, beta=beta)
    validate_spectrum(spec)
    return spec
