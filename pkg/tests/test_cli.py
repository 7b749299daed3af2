"""End-to-end command line tests on small, fast configurations."""

import numpy as np
import pytest

from pcl_dyn.cli import main
from pcl_dyn.observables import Trajectory

FAST_CONFIG = """
system.epsilon_s = 1.0
system.alpha = 1.0
coupling.lambda = 0.5
bath.kind = drude
bath.xi = 1.0
bath.gamma_c = 1.0
bath.temperature = 2.0
bath.K = 2
propagation.L = 4
propagation.dt = 0.002
propagation.t_final = 2.0
output.prefix = fast
"""


@pytest.fixture
def fast_config(tmp_path):
    path = tmp_path / "fast.toml"
    path.write_text(FAST_CONFIG)
    return path


def test_preset_writes_config(tmp_path):
    assert main(["preset", "fig2", "--out", str(tmp_path)]) == 0
    text = (tmp_path / "fig2.toml").read_text()
    assert "coupling.lambda = 0.5" in text
    assert "propagation.L = 6" in text


def test_preset_names(tmp_path):
    for name in ("fig2", "fig3", "fig4"):
        assert main(["preset", name, "--out", str(tmp_path)]) == 0


def test_decompose(fast_config, tmp_path):
    assert main(["decompose", "--config", str(fast_config),
                 "--out", str(tmp_path)]) == 0
    spectrum = (tmp_path / "fast_spectrum.txt").read_text()
    assert spectrum.startswith("K = 2")
    report = (tmp_path / "fast_reconstruction.txt").read_text()
    assert "reconstruction_max_rel_error" in report


def test_evolve_writes_both_models_and_manifest(fast_config, tmp_path):
    assert main(["evolve", "--config", str(fast_config),
                 "--out", str(tmp_path)]) == 0
    pcl = Trajectory.from_csv(tmp_path / "fast_pcl.csv")
    cl = Trajectory.from_csv(tmp_path / "fast_cl.csv")
    assert len(pcl.t) == len(cl.t) == 101
    assert pcl.meta["model"] == "pcl"
    manifest = (tmp_path / "fast_manifest.txt").read_text()
    assert "fast_pcl.g" in manifest
    assert "fast_cl.model = cl" in manifest


def test_evolve_single_model(fast_config, tmp_path):
    assert main(["evolve", "--config", str(fast_config),
                 "--out", str(tmp_path), "--model", "pcl"]) == 0
    assert (tmp_path / "fast_pcl.csv").exists()
    assert not (tmp_path / "fast_cl.csv").exists()


def test_evolve_is_deterministic(fast_config, tmp_path):
    out_a = tmp_path / "a"
    out_b = tmp_path / "b"
    for out in (out_a, out_b):
        assert main(["evolve", "--config", str(fast_config),
                     "--out", str(out), "--model", "pcl"]) == 0
    a = (out_a / "fast_pcl.csv").read_text()
    b = (out_b / "fast_pcl.csv").read_text()
    assert a == b


def test_evolve_sweep(fast_config, tmp_path):
    text = fast_config.read_text() + (
        "sweep.parameter = coupling.lambda\nsweep.values = 0.5, 1.0\n")
    cfg = tmp_path / "sweep.toml"
    cfg.write_text(text)
    assert main(["evolve", "--config", str(cfg), "--out", str(tmp_path),
                 "--model", "pcl"]) == 0
    assert (tmp_path / "fast_lambda0.5_pcl.csv").exists()
    assert (tmp_path / "fast_lambda1_pcl.csv").exists()


def test_compare(fast_config, tmp_path):
    assert main(["compare", "--config", str(fast_config),
                 "--out", str(tmp_path)]) == 0
    lines = (tmp_path / "fast_compare.csv").read_text().splitlines()
    header = lines[0].split(",")
    assert header[0] == "t"
    assert "pcl_sz" in header
    assert "cl_sz" in header
    assert len(lines) == 1 + 101


def test_compare_matches_evolve_output(fast_config, tmp_path):
    assert main(["compare", "--config", str(fast_config),
                 "--out", str(tmp_path / "cmp")]) == 0
    assert main(["evolve", "--config", str(fast_config),
                 "--out", str(tmp_path / "ev"), "--model", "cl"]) == 0
    cl = Trajectory.from_csv(tmp_path / "ev" / "fast_cl.csv")
    lines = (tmp_path / "cmp" / "fast_compare.csv").read_text().splitlines()
    header = lines[0].split(",")
    col = header.index("cl_sz")
    sz = np.array([float(line.split(",")[col]) for line in lines[1:]])
    assert np.array_equal(sz, np.array([float(f"{v:.12g}") for v in cl.sz]))


def test_scan_l(fast_config, tmp_path):
    assert main(["scan-L", "--config", str(fast_config), "--levels", "2,4",
                 "--out", str(tmp_path)]) == 0
    lines = (tmp_path / "fast_scanL.txt").read_text().splitlines()
    assert lines[0] == "L_low,L_high,max_bloch_deviation"
    a, b, dev = lines[1].split(",")
    assert (a, b) == ("2", "4")
    assert float(dev) > 0


def test_config_error_exit_code(tmp_path):
    bad = tmp_path / "bad.toml"
    bad.write_text("system.alpha = 1.0\n")  # missing coupling.lambda
    assert main(["evolve", "--config", str(bad), "--out", str(tmp_path)]) == 1


def test_validation_error_exit_code(tmp_path):
    bad = tmp_path / "bad.toml"
    # beta * gamma_c / 2 on a cot() pole trips spectrum validation
    bad.write_text(FAST_CONFIG.replace("bath.gamma_c = 1.0",
                                       "bath.gamma_c = 12.566370614359172"))
    assert main(["evolve", "--config", str(bad), "--out", str(tmp_path)]) == 2


def test_divergence_exit_code(tmp_path):
    cfg = tmp_path / "diverge.toml"
    cfg.write_text(FAST_CONFIG.replace("propagation.dt = 0.002",
                                       "propagation.dt = 0.5")
                   .replace("propagation.L = 4", "propagation.L = 8")
                   .replace("propagation.t_final = 2.0",
                            "propagation.t_final = 50.0"))
    assert main(["evolve", "--config", str(cfg), "--out", str(tmp_path),
                 "--model", "pcl"]) == 3
