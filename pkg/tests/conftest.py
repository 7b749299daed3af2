"""Shared fixtures: benchmark presets and cached propagation results.

The two-level benchmark (H = eps sigma_z, S = alpha sigma_x, Drude bath
with xi = 1, gamma_c = 1, temperature 2 in units of eps) is reused across
the unit suites and the acceptance suite, so the expensive propagations
are computed once per session.
"""

import numpy as np
import pytest

from pcl_dyn.bath import SpectralDensity, matsubara_decompose_drude
from pcl_dyn.generator import SystemModel
from pcl_dyn.integrator import evolve

BETA = 0.5


@pytest.fixture(scope="session")
def drude_sd():
    return SpectralDensity(kind="drude", xi=1.0, gamma_c=1.0)


@pytest.fixture(scope="session")
def benchmark_spectrum(drude_sd):
    """K=2 Matsubara spectrum of the benchmark bath at beta = 0.5."""
    return matsubara_decompose_drude(drude_sd, BETA, 2)


@pytest.fixture(scope="session")
def benchmark_model():
    """Two-level benchmark system at lambda = 0.5."""
    return SystemModel.two_level(1.0, 1.0, 0.5)


@pytest.fixture(scope="session")
def benchmark_runs(benchmark_model, benchmark_spectrum):
    """Phase-coupled propagations of the benchmark at L in {2, 4, 6, 8}.

    Session-cached because the tier-convergence, steady-state and
    conservation tests all consume the same trajectories.
    """
    runs = {}
    for L in (2, 4, 6, 8):
        runs[L] = evolve(benchmark_model, benchmark_spectrum, L,
                         dt=1e-3, t_final=50.0, which="pcl")
    return runs


@pytest.fixture(scope="session")
def benchmark_cl_run(benchmark_model, benchmark_spectrum):
    return evolve(benchmark_model, benchmark_spectrum, 6,
                  dt=1e-3, t_final=50.0, which="cl")


@pytest.fixture(scope="session")
def coupling_sweep_runs(benchmark_spectrum):
    """Phase-coupled runs at alpha = 2 over lambda in {0.5, 1, 2}."""
    runs = {}
    for lam in (0.5, 1.0, 2.0):
        model = SystemModel.two_level(1.0, 2.0, lam)
        runs[lam] = evolve(model, benchmark_spectrum, 6,
                           dt=1e-3, t_final=50.0, which="pcl")
    return runs


@pytest.fixture(scope="session")
def tunneling_sweep_runs(benchmark_spectrum):
    """Phase-coupled runs at lambda = 0.5 over alpha in {0.5, 1, 1.5, 2}."""
    runs = {}
    for alpha in (0.5, 1.0, 1.5, 2.0):
        model = SystemModel.two_level(1.0, alpha, 0.5)
        runs[alpha] = evolve(model, benchmark_spectrum, 6,
                             dt=1e-3, t_final=50.0, which="pcl")
    return runs
