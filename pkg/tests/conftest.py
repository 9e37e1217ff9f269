# -*- coding: utf-8 -*-
"""
Created on Mon Oct  5 10:14:22 2026

shared fixtures and the slow-test switch

@author: PSBFEM developers
"""

import matplotlib
matplotlib.use("Agg")

import numpy as np
import pytest

from psbfem.mesh import hexGridMesh
from psbfem.kernel import Material


def pytest_addoption(parser):
    parser.addoption("--runslow", action="store_true", default=False,
                     help="run the benchmark reproductions marked slow")


def pytest_configure(config):
    config.addinivalue_line("markers",
                            "slow: benchmark reproduction, needs --runslow")


def pytest_collection_modifyitems(config, items):
    if config.getoption("--runslow"):
        return
    skipSlow = pytest.mark.skip(reason="needs --runslow")
    for item in items:
        if "slow" in item.keywords:
            item.add_marker(skipSlow)


@pytest.fixture
def unitCube():
    """Single hexahedron [0, 1]^3."""
    return hexGridMesh((0, 0, 0), (1, 1, 1), (1, 1, 1))


@pytest.fixture
def soil():
    """Isotropic material, k = 1, Ss = 1."""
    return Material.isotropic("soil", 1.0, 1.0)


@pytest.fixture
def rng():
    return np.random.default_rng(20261005)
