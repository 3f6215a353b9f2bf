"""Session fixtures: the four-room benchmark, solver runs, instance batch."""

from pathlib import Path

import numpy as np
import pytest

from compart_h2 import io
from compart_h2.model import PlantModel
from compart_h2.solver import SolverConfig, fipm, sipm

from helpers import instance_grid, make_feasible_instance

ROOT = Path(__file__).resolve().parents[1]
FIXTURES = ROOT / "fixtures"

# Published benchmark values for the four-room fixture.
PAPER_J_STAR = 26.7744
PAPER_J_START = 128.3285
PAPER_T_STAR = 1048576.0
PRINTED_K_STAR = np.array(
    [[0.6334, 0.5384, 0.6579, 0.0000],
     [0.0000, 0.5938, 0.5182, 0.5481]]
)
PRINTED_CLOSED_LOOP = np.array(
    [[0.4367, 0.1462, 0.0342, 0.0000],
     [0.1000, 0.6000, 0.0000, 0.2000],
     [0.4000, 0.0000, 0.8000, 0.4000],
     [0.0000, 0.1406, 0.0482, 0.3452]]
)


@pytest.fixture(scope="session")
def fourroom():
    return io.load_plant(FIXTURES / "fourroom.json")


@pytest.fixture(scope="session")
def fourroom_k0():
    return io.load_gain(FIXTURES / "fourroom_k0.json")


@pytest.fixture(scope="session")
def paper_config():
    # Defaults already carry the benchmark configuration; spelled out anyway.
    return SolverConfig(t0=1.0, mu=4.0, eps1=1e-5, eps2=1e-5, eps_r=1e-9, delta=1e-9)


@pytest.fixture(scope="session")
def toy_plant():
    eye = np.eye(2)
    return PlantModel(
        A=0.5 * eye,
        B=eye,
        C=np.vstack([eye, np.zeros((2, 2))]),
        D=np.vstack([np.zeros((2, 2)), eye]),
        G=eye,
        name="toy",
    )


@pytest.fixture(scope="session")
def interior_plant():
    """Two-state plant whose unconstrained optimum is strictly interior."""
    return PlantModel(
        A=np.array([[0.30, 0.10], [0.05, 0.25]]),
        B=np.array([[0.05], [0.02]]),
        C=np.vstack([np.eye(2), np.zeros((1, 2))]),
        D=np.array([[0.0], [0.0], [1.0]]),
        G=np.eye(2),
        name="interior",
    )


@pytest.fixture(scope="session")
def instance_batch():
    return [make_feasible_instance(n, m, seed) for n, m, seed in instance_grid(20)]


@pytest.fixture(scope="session")
def sipm_result(fourroom, fourroom_k0, paper_config):
    iterates = []
    report = sipm(fourroom, fourroom_k0, paper_config, callback=iterates.append)
    return report, iterates


@pytest.fixture(scope="session")
def fipm_result(fourroom, fourroom_k0, paper_config):
    iterates = []
    report = fipm(fourroom, fourroom_k0, paper_config, callback=iterates.append)
    return report, iterates
