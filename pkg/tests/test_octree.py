# -*- coding: utf-8 -*-
"""
Created on Mon Oct  5 11:02:40 2026

tests for octree.py

@author: PSBFEM developers
"""

import numpy as np
import pytest
from numpy.testing import assert_allclose

from psbfem.mesh import validateMesh, elementVolume, elementFaceLoops
from psbfem.octree import octreeLeaves, octreeRefineBox
from psbfem.solver import (BoundarySpec, DirichletCondition, assembleGlobal,
                           solveSteady)


def totalVolume(mesh):
    return sum(elementVolume(mesh, e) for e in range(mesh.nElements))


def test_leavesWithoutRefinement():
    leaves = octreeLeaves((2, 1, 3), None, 2)
    assert len(leaves) == 6
    assert all(cell.size == 4 and cell.level == 0 for cell in leaves)


def test_leavesRefineCorner():
    leaves = octreeLeaves((2, 2, 2), ((0, 0, 0), (1, 1, 1)), 1)
    assert len(leaves) == 15
    assert sum(cell.size ** 3 for cell in leaves) == 4 ** 3


def test_unrefinedIsHexGrid():
    mesh = octreeRefineBox(((0, 0, 0), (1, 1, 1)), (2, 2, 2))
    assert (mesh.nElements, mesh.nNodes, mesh.nFaces) == (8, 27, 36)
    assert validateMesh(mesh) == []


def test_refinedCornerIsConforming():
    mesh = octreeRefineBox(((0, 0, 0), (1, 1, 1)), (2, 2, 2),
                           ((0, 0, 0), (0.5, 0.5, 0.5)), levels=1)
    assert mesh.nElements == 15
    # 27 coarse + 19 new fine corners, plus face-centre nodes
    assert mesh.nNodes > 46
    assert validateMesh(mesh) == []
    assert totalVolume(mesh) == pytest.approx(1.0, rel=1e-12)
    assert any(len(face.nodeIds) == 3 for face in mesh.faces)
    assert len(mesh.nodeSets["xmin"]) > 9


def test_twoLevels():
    domain = ((0.0, 0.0, 0.0), (2.0, 1.0, 1.0))
    mesh = octreeRefineBox(domain, (2, 1, 1), ((0.9, 0.0, 0.0),
                                               (1.1, 1.0, 0.2)), levels=2)
    assert validateMesh(mesh) == []
    assert totalVolume(mesh) == pytest.approx(2.0, rel=1e-12)
    sizes = np.array([elementVolume(mesh, e) for e in range(mesh.nElements)])
    assert sizes.min() == pytest.approx(1.0 / 64, rel=1e-12)


def test_negativeLevels():
    with pytest.raises(ValueError, match="levels"):
        octreeRefineBox(((0, 0, 0), (1, 1, 1)), (1, 1, 1), levels=-1)


def test_regionOutsideDomain():
    with pytest.raises(ValueError, match="inside"):
        octreeRefineBox(((0, 0, 0), (1, 1, 1)), (1, 1, 1),
                        ((0.5, 0.5, 0.5), (1.5, 1.0, 1.0)), levels=1)


def test_unitCubeRefinedEverywhere():
    mesh = octreeRefineBox(((0, 0, 0), (1, 1, 1)), (1, 1, 1),
                           ((0, 0, 0), (1, 1, 1)), levels=1)
    assert mesh.nElements == 8
    assert all(len(element.faceRefs) == 6 for element in mesh.elements)
    assert validateMesh(mesh) == []
    assert totalVolume(mesh) == pytest.approx(1.0, rel=1e-12)


def test_refinedHalf():
    mesh = octreeRefineBox(((0, 0, 0), (2, 1, 1)), (2, 1, 1),
                           ((1, 0, 0), (2, 1, 1)), levels=1)
    assert mesh.nElements == 9
    assert validateMesh(mesh) == []
    faceCounts = [len(element.faceRefs) for element in mesh.elements]
    coarse = int(np.argmax(faceCounts))
    assert faceCounts[coarse] > 6
    assert sorted(faceCounts)[:-1] == [6] * 8
    # the side at x = 1 is tiled by the fine cells' faces
    shared = [loop for _, loop in elementFaceLoops(mesh, coarse)
              if np.allclose(mesh.nodes[loop, 0], 1.0)]
    assert len(shared) == 4
    assert all(len(loop) == 4 for loop in shared)
    assert totalVolume(mesh) == pytest.approx(2.0, rel=1e-12)


def test_threeLevelCornerVolume():
    mesh = octreeRefineBox(((0, 0, 0), (4, 4, 4)), (1, 1, 1),
                           ((0, 0, 0), (0.5, 0.5, 0.5)), levels=3)
    assert mesh.nElements == 22
    assert validateMesh(mesh) == []
    assert totalVolume(mesh) == pytest.approx(64.0, rel=1e-12)


def test_affineFieldOnRefinedMesh(soil):
    mesh = octreeRefineBox(((0, 0, 0), (4, 4, 4)), (1, 1, 1),
                           ((0, 0, 0), (0.5, 0.5, 0.5)), levels=3)
    names = ("xmin", "xmax", "ymin", "ymax", "zmin", "zmax")
    mesh.nodeSets["boundary"] = sorted(
        set().union(*(mesh.nodeSets[n] for n in names)))
    gradient = np.array([0.3, -1.0, 0.5])
    values = 2.0 + mesh.nodes[mesh.nodeSets["boundary"]] @ gradient
    system = assembleGlobal(mesh, {"soil": soil}, "soil")
    result = solveSteady(system, BoundarySpec(
        dirichlet=[DirichletCondition("boundary", values)]))
    # hanging and face-centre nodes included
    assert_allclose(result.finalHeads, 2.0 + mesh.nodes @ gradient,
                    atol=1e-9)
