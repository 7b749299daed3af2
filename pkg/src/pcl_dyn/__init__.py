"""Non-Markovian open quantum dynamics with phase-type and linear bath coupling."""

from pcl_dyn.bath import (
    SpectralDensity,
    DissipatonSpectrum,
    spectral_density_eval,
    correlation_fdt,
    matsubara_decompose_drude,
    prony_fit,
    discrete_mode_decompose,
    validate_spectrum,
)
from pcl_dyn.generator import SystemModel, HierarchyState
from pcl_dyn.hierarchy import enumerate_indices, build_pcl_coupling, build_cl_coupling

__all__ = [
    "SpectralDensity",
    "DissipatonSpectrum",
    "spectral_density_eval",
    "correlation_fdt",
    "matsubara_decompose_drude",
    "prony_fit",
    "discrete_mode_decompose",
    "validate_spectrum",
    "SystemModel",
    "HierarchyState",
    "enumerate_indices",
    "build_pcl_coupling",
    "build_cl_coupling",
]

__version__ = "0.1.0"
