"""Hierarchy right-hand side, superoperator assembly, model validation."""

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from pcl_dyn.bath import DissipatonSpectrum, matsubara_decompose_drude
from pcl_dyn.bath import SpectralDensity
from pcl_dyn.errors import ConfigError, ValidationError
from pcl_dyn.generator import (
    SIGMA_X,
    SIGMA_Z,
    HierarchyState,
    SystemModel,
    assemble_superoperator,
    cl_rhs,
    hermiticity_defect,
    pcl_rhs,
    spectral_abscissa,
    table_rhs,
)
from pcl_dyn.hierarchy import build_cl_coupling, build_pcl_coupling

BETA = 0.5


def benchmark_spec(K=2):
    sd = SpectralDensity(kind="drude", xi=1.0, gamma_c=1.0)
    return matsubara_decompose_drude(sd, BETA, K)


def random_state(rng, N, d=2):
    data = rng.normal(size=(N, d, d)) + 1j * rng.normal(size=(N, d, d))
    return data


class TestSystemModel:
    def test_two_level_layout(self):
        m = SystemModel.two_level(1.5, 0.7, 0.5)
        assert np.array_equal(m.H, 1.5 * SIGMA_Z)
        assert np.array_equal(m.S, 0.7 * SIGMA_X)
        assert m.dim == 2

    def test_non_hermitian_rejected(self):
        with pytest.raises(ValidationError):
            SystemModel(H=np.array([[0.0, 1.0], [0.0, 0.0]]),
                        S=SIGMA_X, lam=0.5)

    def test_shape_mismatch_rejected(self):
        with pytest.raises(ValidationError):
            SystemModel(H=np.eye(3), S=SIGMA_X, lam=0.5)

    def test_operators_are_frozen(self):
        m = SystemModel.two_level(1.0, 1.0, 0.5)
        with pytest.raises(ValueError):
            m.H[0, 0] = 5.0


class TestHierarchyState:
    def test_initial_layout(self):
        rho0 = np.array([[1.0, 0.0], [0.0, 0.0]], dtype=complex)
        state = HierarchyState.initial(rho0, 5)
        assert state.data.shape == (5, 2, 2)
        assert np.array_equal(state.rho, rho0)
        assert np.all(state.data[1:] == 0)

    def test_trace_check(self):
        with pytest.raises(ValidationError):
            HierarchyState.initial(np.eye(2, dtype=complex), 3)


class TestTableRhs:
    def test_zero_state_zero_derivative(self):
        model = SystemModel.two_level(1.0, 1.0, 0.5)
        table = build_pcl_coupling(benchmark_spec(), 0.5, 4)
        data = np.zeros((len(table.space), 2, 2), dtype=complex)
        assert np.all(table_rhs(data, model, table) == 0)

    def test_linearity(self):
        rng = np.random.default_rng(7)
        model = SystemModel.two_level(1.0, 1.0, 0.5)
        table = build_pcl_coupling(benchmark_spec(), 0.5, 3)
        a = random_state(rng, len(table.space))
        b = random_state(rng, len(table.space))
        lhs = table_rhs(2.0 * a - 1.5j * b, model, table)
        rhs = 2.0 * table_rhs(a, model, table) - 1.5j * table_rhs(b, model, table)
        assert np.allclose(lhs, rhs, atol=1e-12)

    @pytest.mark.parametrize("which", ["pcl", "cl"])
    def test_physical_trace_derivative_vanishes(self, which):
        # row 0 has A_left == A_right, so tr(d rho_0/dt) = 0 for any state
        rng = np.random.default_rng(11)
        model = SystemModel.two_level(1.0, 1.0, 0.5)
        spec = benchmark_spec()
        if which == "pcl":
            table = build_pcl_coupling(spec, 0.5, 4)
        else:
            table = build_cl_coupling(spec, 4)
        for _ in range(5):
            data = random_state(rng, len(table.space))
            deriv = table_rhs(data, model, table)
            assert abs(np.trace(deriv[0])) < 1e-10 * np.max(np.abs(data))

    def test_shape_mismatch_rejected(self):
        model = SystemModel.two_level(1.0, 1.0, 0.5)
        table = build_pcl_coupling(benchmark_spec(), 0.5, 3)
        with pytest.raises(ConfigError):
            table_rhs(np.zeros((2, 2, 2), dtype=complex), model, table)

    def test_model_selector_guards(self):
        model = SystemModel.two_level(1.0, 1.0, 0.5)
        pcl = build_pcl_coupling(benchmark_spec(), 0.5, 3)
        cl = build_cl_coupling(benchmark_spec(), 3)
        data = np.zeros((len(pcl.space), 2, 2), dtype=complex)
        with pytest.raises(ConfigError):
            pcl_rhs(data, model, cl)
        with pytest.raises(ConfigError):
            cl_rhs(data, model, pcl)

    def test_all_eta_zero_keeps_physical_block_unitary(self):
        # with eta = 0 the downward couplings vanish, so a factorized state
        # never populates higher tiers and rho_0 moves unitarily under
        # H + 2 g S (here g = 1)
        model = SystemModel.two_level(1.0, 1.0, 0.5)
        spec = DissipatonSpectrum(eta=[0.0], gamma=[1.0], pair=[0], beta=BETA)
        table = build_pcl_coupling(spec, 0.5, 3)
        assert table.g == 1.0
        rho0 = np.array([[0.6, 0.2 - 0.1j], [0.2 + 0.1j, 0.4]], dtype=complex)
        data = np.zeros((len(table.space), 2, 2), dtype=complex)
        data[0] = rho0
        deriv = table_rhs(data, model, table)
        h_eff = model.H + 2.0 * model.S
        expected = -1j * (h_eff @ rho0 - rho0 @ h_eff)
        assert np.allclose(deriv[0], expected, atol=1e-12)
        assert np.allclose(deriv[1:], 0.0, atol=1e-12)


class TestSuperoperator:
    @pytest.mark.parametrize("which", ["pcl", "cl"])
    def test_matches_direct_rhs(self, which):
        rng = np.random.default_rng(5)
        model = SystemModel.two_level(1.0, 1.0, 0.5)
        spec = benchmark_spec()
        if which == "pcl":
            table = build_pcl_coupling(spec, 0.5, 3)
        else:
            table = build_cl_coupling(spec, 3)
        M = assemble_superoperator(model, table)
        data = random_state(rng, len(table.space))
        direct = table_rhs(data, model, table).reshape(-1)
        assert np.allclose(M @ data.reshape(-1), direct, atol=1e-11)

    def test_generator_is_dissipative(self):
        model = SystemModel.two_level(1.0, 1.0, 0.5)
        table = build_pcl_coupling(benchmark_spec(), 0.5, 4)
        M = assemble_superoperator(model, table)
        assert spectral_abscissa(M) < 0.0


class TestHermiticityDefect:
    def test_hermitian_conjugate_structure_detected(self):
        spec = benchmark_spec()
        table = build_pcl_coupling(spec, 0.5, 3)
        space = table.space
        rng = np.random.default_rng(13)
        data = np.zeros((len(space), 2, 2), dtype=complex)
        # construct a state satisfying rho_{nbar} = rho_n^dagger exactly
        for i, n in enumerate(space.indices):
            nbar = tuple(n[spec.pair[k]] for k in range(space.K))
            j = space.lookup(nbar)
            if np.any(data[i]):
                continue
            block = rng.normal(size=(2, 2)) + 1j * rng.normal(size=(2, 2))
            if j == i:
                block = 0.5 * (block + block.conj().T)
            data[i] = block
            data[j] = block.conj().T
        assert hermiticity_defect(data, space, spec.pair) < 1e-14
        data[2][0, 1] += 0.1j
        assert hermiticity_defect(data, space, spec.pair) > 0.01
