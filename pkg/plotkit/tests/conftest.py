"""Session fixtures: real simulator output at reduced scale.

The rendering tests consume genuine CLI artifacts so the CSV/sidecar
contract is exercised end to end; runs use a small Fock cutoff and a
short horizon to stay fast.
"""

import subprocess
import sys
from pathlib import Path

import pytest

BASE = """\
omega0 = 1.0
epsilon = 1.0
g = 0.05
kappa = 0.01
gamma = 0.05
gamma_phi = 0.05
drive.kind = cosine
drive.d = 0.01
drive.Omega = 2.0
fock.n_max = 4
integrator.t_end = 2 TR
"""


def _simulate(workdir: Path, name: str, overrides: dict) -> Path:
    conf = workdir / f"{name}.conf"
    out = workdir / f"{name}.csv"
    conf.write_text(BASE + f"output.path = {out}\n")
    command = [sys.executable, "-m", "casimir_sim.cli", "simulate", str(conf)]
    for key, value in overrides.items():
        command += ["--set", f"{key}={value}"]
    result = subprocess.run(command, capture_output=True, text=True)
    # 3 = truncation-guard breach: still writes the partial table, which
    # is a legitimate plotting input (the runaway archetype)
    assert result.returncode in (0, 3), result.stderr
    return out


@pytest.fixture(scope="session")
def sim_artifacts(tmp_path_factory):
    workdir = tmp_path_factory.mktemp("sim")
    outputs = {
        "full": _simulate(workdir, "full", {}),
        "corotating": _simulate(workdir, "corotating", {"terms.interaction": "jc"}),
        "runaway": _simulate(workdir, "runaway", {"drive.d": "0.1", "fock.n_max": "12"}),
    }
    for tag, gamma in (("g001", 0.01), ("g002", 0.02), ("g010", 0.1)):
        outputs[tag] = _simulate(
            workdir, tag, {"gamma": str(gamma), "gamma_phi": str(gamma)}
        )
    conf = workdir / "sweep.conf"
    out = workdir / "sweep.csv"
    conf.write_text(
        BASE
        + f"output.path = {out}\n"
        + "sweep.axis = Omega\n"
        + "sweep.values = 1.95,2.0,2.05\n"
    )
    result = subprocess.run(
        [sys.executable, "-m", "casimir_sim.cli", "sweep", str(conf)],
        capture_output=True,
        text=True,
    )
    assert result.returncode == 0, result.stderr
    outputs["sweep"] = out
    return outputs
