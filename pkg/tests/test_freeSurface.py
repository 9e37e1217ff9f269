# -*- coding: utf-8 -*-
"""
Created on Tue Oct  6 14:48:12 2026

tests for freeSurface.py

@author: PSBFEM developers
"""

import numpy as np
import pytest
from numpy.testing import assert_allclose

from psbfem.errors import ConfigError, PsbfemError
from psbfem.mesh import hexGridMesh
from psbfem.case import caseFromDict
from psbfem.freeSurface import (FreeSurfaceConfig, DamBoundaries, PhiGrid,
                                FreeSurfaceState, columnGrid,
                                classifyElements, recoverSurface,
                                updateOverflowBoundary, iterateFreeSurface)


def damCase(downstreamHead=0.5, maxIters=30):
    mesh = hexGridMesh((0, 0, 0), (0.5, 0.125, 1.0), (4, 1, 8))
    data = {"analysis": "free_surface",
            "materials": [{"name": "dam", "k": 1.0}],
            "boundary": {"dirichlet": []},
            "free_surface": {"upstream_set": "xmin", "upstream_head": 1.0,
                             "downstream_set": "xmax",
                             "downstream_head": downstreamHead,
                             "max_iters": maxIters}}
    return caseFromDict(data, mesh=mesh)


@pytest.mark.parametrize("kwargs", [{"epsilon": 0.0},
                                    {"dryFactor": 0.0},
                                    {"dryFactor": 1.0},
                                    {"relaxation": 0.0},
                                    {"relaxation": 1.5},
                                    {"maxIters": 0}])
def test_badConfig(kwargs):
    with pytest.raises(ConfigError):
        FreeSurfaceConfig(**kwargs)


def test_columnGrid():
    mesh = hexGridMesh((0, 0, 0), (1, 0.5, 1), (4, 2, 2))
    xs, ys = columnGrid(mesh)
    assert_allclose(xs, np.linspace(0, 1, 5))
    assert_allclose(ys, np.linspace(0, 0.5, 3))


def test_phiGridInterpolates():
    xs = np.array([0.0, 1.0])
    ys = np.array([0.0, 1.0])
    phi = PhiGrid(xs, ys, np.array([[1.0, 1.0], [3.0, 3.0]]))
    assert_allclose(phi.at([0.25, 0.5], [0.5, 0.0]), [1.5, 2.0])


def test_classifyElements():
    mesh = hexGridMesh((0, 0, 0), (1, 1, 1), (2, 2, 2))
    xs, ys = columnGrid(mesh)
    phi = PhiGrid(xs, ys, np.full((len(xs), len(ys)), 0.5))
    wet, factors = classifyElements(mesh, phi, FreeSurfaceConfig())
    assert wet.sum() == 4
    assert_allclose(factors[~wet], 1e-3)
    assert_allclose(factors[wet], 1.0)


@pytest.mark.parametrize("head, surface", [(0.6, 0.6), (-1.0, 0.0),
                                           (5.0, 1.0)])
def test_recoverSurface(head, surface):
    mesh = hexGridMesh((0, 0, 0), (1, 1, 1), (2, 2, 4))
    heads = np.full(mesh.nNodes, head)
    xs = np.array([0.25, 0.75])
    ys = np.array([0.3, 0.6])
    assert_allclose(recoverSurface(mesh, heads, xs, ys), surface, atol=1e-9)


def test_recoverSlopingSurface():
    mesh = hexGridMesh((0, 0, 0), (1, 1, 1), (4, 1, 8))
    # hydrostatic columns with the water table at 0.8 - 0.4 x
    heads = 0.8 - 0.4 * mesh.nodes[:, 0]
    xs = np.array([0.125, 0.5, 0.875])
    ys = np.array([0.5])
    recovered = recoverSurface(mesh, heads, xs, ys)
    assert_allclose(recovered[:, 0], 0.8 - 0.4 * xs, atol=1e-9)


def overflowSetup():
    mesh = hexGridMesh((0, 0, 0), (1, 1, 1), (1, 1, 4))
    dam = DamBoundaries("xmin", 0.75, "xmax", 0.25)
    state = FreeSurfaceState(None, np.zeros(0, dtype=int), None)
    return mesh, dam, state


def test_initialOverflowSet():
    mesh, dam, state = overflowSetup()
    overflow, exitElevation = updateOverflowBoundary(state, mesh, None, None,
                                                     None, dam, 1e-9)
    assert exitElevation == pytest.approx(0.75)
    assert_allclose(sorted(set(mesh.nodes[overflow, 2])), [0.5, 0.75])
    assert np.all(mesh.nodes[overflow, 0] == 1.0)


def test_overflowReleasesInflowNodes():
    mesh, dam, state = overflowSetup()
    state.overflowSet, _ = updateOverflowBoundary(state, mesh, None, None,
                                                  None, dam, 1e-9)
    state.iteration = 1
    z = mesh.nodes[:, 2]
    heads = z.copy()
    fixed = state.overflowSet
    # the upper seepage nodes take water in
    reactions = np.where(z[fixed] > 0.6, 0.1, -0.1)
    overflow, exitElevation = updateOverflowBoundary(state, mesh, heads,
                                                     reactions, fixed, dam,
                                                     1e-9)
    assert exitElevation == pytest.approx(0.5)
    assert_allclose(z[overflow], 0.5)


def test_overflowAddsWetNodes():
    mesh, dam, state = overflowSetup()
    state.overflowSet, _ = updateOverflowBoundary(state, mesh, None, None,
                                                  None, dam, 1e-9)
    state.iteration = 1
    z = mesh.nodes[:, 2]
    # positive pressure head at the crest of the downstream face
    heads = z + 0.01
    fixed = state.overflowSet
    overflow, exitElevation = updateOverflowBoundary(
        state, mesh, heads, -np.ones(len(fixed)), fixed, dam, 1e-9)
    assert exitElevation == pytest.approx(1.0)
    assert len(overflow) == 6


def test_emptyDownstreamSet():
    mesh, dam, state = overflowSetup()
    mesh.nodeSets["xmax"] = []
    with pytest.raises(PsbfemError, match="downstream"):
        updateOverflowBoundary(state, mesh, None, None, None, dam, 1e-9)


def test_unknownDownstreamSet():
    mesh, _, state = overflowSetup()
    dam = DamBoundaries("xmin", 0.75, "toe", 0.25)
    with pytest.raises(ConfigError, match="toe"):
        updateOverflowBoundary(state, mesh, None, None, None, dam, 1e-9)


def test_iterationOnCoarseDam():
    case = damCase()
    result, state = iterateFreeSurface(case)
    assert state.iteration == len(state.history) >= 1
    assert 0.5 <= state.exitElevation <= 1.0
    assert np.all(state.phi.values >= 0.5 - 1e-12)
    assert np.all(state.phi.values <= 1.0 + 1e-12)
    assert state.wetFlags.dtype == bool
    heads = result.finalHeads
    assert np.all(np.isfinite(heads))
    upstream = case.mesh.nodeSets["xmin"]
    assert_allclose(heads[upstream], 1.0)
    # seepage nodes carry their elevation
    assert_allclose(heads[state.overflowSet],
                    case.mesh.nodes[state.overflowSet, 2], atol=1e-12)


def test_tailwaterAboveReservoir():
    with pytest.raises(ConfigError, match="downstream head"):
        iterateFreeSurface(damCase(downstreamHead=1.5))
