"""
Shared fixtures for the qproc test suite
"""

import json

import numpy as np
import pytest

from qproc.core.config import QProcConfig
from qproc.process import QProcess
from qproc.unitary import InitialState, random_state, random_system, two_site_walk

# Seeds recorded so failures reproduce
RANDOM_SEEDS = (7, 11, 2024)


@pytest.fixture
def config():
    return QProcConfig()


@pytest.fixture
def walk_system():
    return two_site_walk()


@pytest.fixture
def walk_process(walk_system):
    """Two-site walk started at site 0 with the initial site fixed"""
    return QProcess(walk_system, InitialState.basis(2, 0), fixed_initial_site=0)


@pytest.fixture
def free_walk_process(walk_system):
    """Two-site walk from e_0 over the full path space"""
    return QProcess(walk_system, InitialState.basis(2, 0))


@pytest.fixture
def rng():
    return np.random.default_rng(RANDOM_SEEDS[0])


@pytest.fixture
def random_process():
    """Stationary random three-site system with a random initial state"""
    rng = np.random.default_rng(RANDOM_SEEDS[1])
    system = random_system(3, 0, rng, stationary=True)
    return QProcess(system, random_state(3, rng))


@pytest.fixture
def stepped_process():
    """Three-site system with eight independent random steps"""
    rng = np.random.default_rng(RANDOM_SEEDS[2])
    system = random_system(3, 8, rng)
    return QProcess(system, random_state(3, rng))


@pytest.fixture
def write_config(tmp_path):
    """Write an experiment config to a temporary JSON file and return its path"""
    def _write(data, name="experiment.json"):
        path = tmp_path / name
        path.write_text(json.dumps(data))
        return str(path)
    return _write
