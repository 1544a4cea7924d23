"""Shared fixtures: cached sample systems and their monodromy data."""

import numpy as np
import pytest

from garnier_lab.fuchsian import random_system
from garnier_lab.monodromy import IntegratorOptions, compute_monodromy

OPTS = IntegratorOptions()


@pytest.fixture(scope="session")
def sys1():
    return random_system(1, np.random.default_rng(11))


@pytest.fixture(scope="session")
def sys2():
    return random_system(2, np.random.default_rng(7))


@pytest.fixture(scope="session")
def mono1(sys1):
    return compute_monodromy(sys1, opts=OPTS)


@pytest.fixture(scope="session")
def mono2(sys2):
    return compute_monodromy(sys2, opts=OPTS)
