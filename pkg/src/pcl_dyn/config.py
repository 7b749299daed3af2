"""Flat key = value configuration files with dotted section names.

Example::

    system.epsilon_s = 1.0
    coupling.lambda = 0.5
    bath.kind = drude
    propagation.L = 6

Values parse as int, float, a comma list of numbers, or a bare string.
The schema used by the CLI is documented in the README.
"""

from __future__ import annotations

import math

import numpy as np

from pcl_dyn.bath import (
    SpectralDensity,
    correlation_fdt,
    discrete_mode_decompose,
    matsubara_decompose_drude,
    prony_fit,
)
from pcl_dyn.errors import ConfigError
from pcl_dyn.generator import SystemModel

__all__ = ["parse_config", "format_config", "load_config",
           "model_from_config", "spectrum_from_config"]


def _parse_scalar(text: str):
    text = text.strip()
    try:
        return int(text)
    except ValueError:
        pass
    try:
        return float(text)
    except ValueError:
        pass
    return text


def parse_config(text: str) -> dict:
    """Parse the flat format into a nested dict keyed by section."""
    out: dict = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"line {lineno}: expected 'key = value', got {raw!r}")
        key, value = (part.strip() for part in line.split("=", 1))
        if "," in value:
            parsed = [_parse_scalar(v) for v in value.split(",") if v.strip()]
        else:
            parsed = _parse_scalar(value)
        node = out
        parts = key.split(".")
        for part in parts[:-1]:
            node = node.setdefault(part, {})
            if not isinstance(node, dict):
                raise ConfigError(f"key {key!r} conflicts with a scalar entry")
        node[parts[-1]] = parsed
    return out


def format_config(cfg: dict) -> str:
    """Serialize a nested dict back to the flat format, sections sorted."""
    lines = []

    def walk(prefix, node):
        for key in sorted(node):
            value = node[key]
            full = f"{prefix}.{key}" if prefix else key
            if isinstance(value, dict):
                walk(full, value)
            elif isinstance(value, (list, tuple)):
                lines.append(f"{full} = " + ",".join(str(v) for v in value))
            else:
                lines.append(f"{full} = {value}")

    walk("", cfg)
    return "\n".join(lines) + "\n"


def load_config(path) -> dict:
    with open(path) as fh:
        return parse_config(fh.read())


def _get(cfg: dict, section: str, key: str, default=None, required: bool = False):
    value = cfg.get(section, {}).get(key, default)
    if required and value is None:
        raise ConfigError(f"missing required config key {section}.{key}")
    return value


def model_from_config(cfg: dict) -> SystemModel:
    eps = float(_get(cfg, "system", "epsilon_s", 1.0))
    alpha = float(_get(cfg, "system", "alpha", 1.0))
    lam = float(_get(cfg, "coupling", "lambda", required=True))
    return SystemModel.two_level(eps, alpha, lam)


def beta_from_config(cfg: dict) -> float:
    bath = cfg.get("bath", {})
    if "beta" in bath:
        return float(bath["beta"])
    if "temperature" in bath:
        return 1.0 / float(bath["temperature"])
    raise ConfigError("bath needs either beta or temperature")


def spectrum_from_config(cfg: dict):
    """Build the dissipaton spectrum requested by the bath section."""
    bath = cfg.get("bath", {})
    kind = bath.get("kind", "drude")
    beta = beta_from_config(cfg)
    if kind == "drude":
        sd = SpectralDensity(kind="drude", xi=float(bath.get("xi", 1.0)),
                             gamma_c=float(bath.get("gamma_c", 1.0)))
        K = int(bath.get("K", 2))
        scheme = bath.get("decomposition", "matsubara")
        if scheme == "matsubara":
            return sd, matsubara_decompose_drude(sd, beta, K)
        if scheme == "prony":
            t_max = float(bath.get("prony_t_max", 10.0 / sd.gamma_c))
            n_samples = int(bath.get("prony_samples", max(64, 8 * K)))
            # skip t = 0: its quadrature value depends on the artificial
            # frequency cutoff and poisons the fast exponents
            grid = np.linspace(t_max / n_samples, t_max, n_samples)
            samples = [(t, correlation_fdt(sd, beta, t)) for t in grid]
            spec = prony_fit(samples, K)
            # prony_fit cannot know beta; re-attach it
            from pcl_dyn.bath import DissipatonSpectrum
            return sd, DissipatonSpectrum(eta=spec.eta, gamma=spec.gamma,
                                          pair=spec.pair, beta=beta)
        raise ConfigError(f"unknown decomposition scheme {scheme!r}")
    if kind == "discrete_mode":
        omega0 = float(bath.get("omega0", 1.0))
        c = float(bath.get("c", 0.1))
        sd = SpectralDensity(kind="discrete_mode", omega0=omega0, c=c)
        return sd, discrete_mode_decompose(omega0, c, beta)
    raise ConfigError(f"unknown bath kind {kind!r}")


def initial_state_from_config(cfg: dict):
    """Initial density matrix; default the ground projector.

    propagation.initial is either 'ground', 'mixed', or three comma
    numbers giving a Bloch vector."""
    spec = _get(cfg, "propagation", "initial", "ground")
    if spec == "ground":
        return None
    if spec == "mixed":
        return np.eye(2, dtype=complex) / 2.0
    if isinstance(spec, (list, tuple)) and len(spec) == 3:
        bx, by, bz = (float(v) for v in spec)
        if math.sqrt(bx * bx + by * by + bz * bz) > 1.0 + 1e-12:
            raise ConfigError("Bloch vector of the initial state exceeds unit norm")
        return 0.5 * np.array([[1.0 + bz, bx - 1j * by],
                               [bx + 1j * by, 1.0 - bz]], dtype=complex)
    raise ConfigError(f"cannot interpret propagation.initial = {spec!r}")
