"""Shared fixtures: synthetic schema-conformant CSVs and, for the
acceptance check, real CSVs produced by the simulator command line."""

import shutil
import subprocess
import sys

import numpy as np
import pytest

HEADER = "t,sx,sy,sz,bloch_norm,entropy,p_plus,p_minus"

SIM_CONFIG = """
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
output.prefix = accept
"""


def trajectory_csv_text(n=40, phase=0.0, meta=None):
    """A physical trajectory: damped precession toward the pole."""
    t = np.linspace(0.0, 4.0, n)
    r = 0.7 * np.exp(-0.3 * t)
    sx = r * np.cos(3.0 * t + phase)
    sy = r * np.sin(3.0 * t + phase)
    sz = 0.3 + 0.3 * np.exp(-0.5 * t)
    norm = np.sqrt(sx**2 + sy**2 + sz**2)
    p_plus = (1.0 + norm) / 2.0
    p_minus = 1.0 - p_plus
    ent = -np.where(p_minus > 0, p_minus * np.log(np.clip(p_minus, 1e-300, None)), 0.0)
    lines = [f"# {k}={v}" for k, v in (meta or {}).items()]
    lines.append(HEADER)
    for i in range(n):
        lines.append(",".join(f"{v:.12g}" for v in
                              (t[i], sx[i], sy[i], sz[i], norm[i],
                               ent[i], p_plus[i], p_minus[i])))
    return "\n".join(lines) + "\n"


@pytest.fixture
def single_csv(tmp_path):
    path = tmp_path / "single.csv"
    path.write_text(trajectory_csv_text(meta={"model": "pcl", "tag": "demo"}))
    return path


@pytest.fixture
def compare_csv(tmp_path):
    t = np.linspace(0.0, 4.0, 30)
    cols = ["t"]
    cols += [f"pcl_{c}" for c in HEADER.split(",")[1:]]
    cols += [f"cl_{c}" for c in HEADER.split(",")[1:]]
    lines = [",".join(cols)]
    for ti in t:
        row = [ti]
        for damp in (0.3, 0.6):
            r = 0.8 * np.exp(-damp * ti)
            sx, sy = r * np.cos(3 * ti), r * np.sin(3 * ti)
            sz = 0.5 * np.exp(-damp * ti)
            norm = np.sqrt(sx**2 + sy**2 + sz**2)
            pp = (1 + norm) / 2
            row += [sx, sy, sz, norm, 0.1, pp, 1 - pp]
        lines.append(",".join(f"{v:.12g}" for v in row))
    path = tmp_path / "compare.csv"
    path.write_text("\n".join(lines) + "\n")
    return path


@pytest.fixture(scope="session")
def simulator_outputs(tmp_path_factory):
    """CSVs written by the simulator CLI on a fast configuration."""
    exe = shutil.which("pcl-dyn")
    if exe is None:
        pytest.skip("simulator command line is not installed")
    out = tmp_path_factory.mktemp("sim")
    cfg = out / "accept.toml"
    cfg.write_text(SIM_CONFIG)
    for cmd in (["evolve"], ["compare"]):
        proc = subprocess.run(
            [exe, *cmd, "--config", str(cfg), "--out", str(out)],
            capture_output=True, text=True)
        assert proc.returncode == 0, proc.stderr
    cfg_sweep = out / "sweep.toml"
    cfg_sweep.write_text(SIM_CONFIG + (
        "sweep.parameter = coupling.lambda\nsweep.values = 0.5, 1.0\n"))
    proc = subprocess.run(
        [exe, "evolve", "--config", str(cfg_sweep), "--out", str(out),
         "--model", "pcl"],
        capture_output=True, text=True)
    assert proc.returncode == 0, proc.stderr
    return out
