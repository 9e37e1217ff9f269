# -*- coding: utf-8 -*-
"""
Created on Wed Oct  7 10:22:09 2026

tests for verification.py

@author: PSBFEM developers
"""

import numpy as np
import pytest
from numpy.testing import assert_allclose

from psbfem.errors import ConfigError, MeshValidationError, SolverError
from psbfem.mesh import hexGridMesh, elementVolume
from psbfem.kernel import (Material, assembleElementCoeffs, buildHamiltonian,
                           eigenSplit, elementStiffness, elementMass)
from psbfem.solver import (BoundarySpec, DirichletCondition, FluxCondition,
                           Monitor)
from psbfem.benchmarks import patchMesh
from psbfem.verification import (tetrahedralize, hexToTets, tetFemSolve,
                                 schurStiffnessOracle, radialMassOracle,
                                 randomConvexPolyhedron, oracleReport)


GRADIENT = np.array([0.5, -1.0, 2.0])


def tetVolumes(tmesh):
    x = tmesh.nodes[tmesh.tets]
    return np.einsum("ij,ij->i", x[:, 1] - x[:, 0],
                     np.cross(x[:, 2] - x[:, 0], x[:, 3] - x[:, 0])) / 6.0


def boundarySet(tmesh):
    names = ("xmin", "xmax", "ymin", "ymax", "zmin", "zmax")
    return sorted(set().union(*(tmesh.nodeSets[n] for n in names)))


#%% tetrahedron meshes

def test_cubeAsSixTets(unitCube):
    tmesh = hexToTets(unitCube)
    assert tmesh.nElements == 6
    volumes = tetVolumes(tmesh)
    assert np.all(volumes > 0.0)
    assert volumes.sum() == pytest.approx(1.0, rel=1e-14)


def test_hexToTetsNeedsHexahedra():
    with pytest.raises(MeshValidationError, match="hexahedron"):
        hexToTets(patchMesh())


def test_tetrahedralizePatch():
    mesh = patchMesh()
    tmesh = tetrahedralize(mesh)
    volumes = tetVolumes(tmesh)
    assert np.all(volumes > 0.0)
    total = sum(elementVolume(mesh, e) for e in range(mesh.nElements))
    assert volumes.sum() == pytest.approx(total, rel=1e-12)
    edges = sum(len(mesh.faces[f].nodeIds) for el in mesh.elements
                for f, _ in el.faceRefs)
    assert tmesh.nElements == edges
    # bottom face centroids join the set
    assert len(tmesh.nodeSets["zmin"]) == 9 + 4
    assert tmesh.faceSets["zmin"].shape == (16, 3)


#%% tetrahedron solver

def test_affineHeadsAreExact():
    mesh = hexGridMesh((0, 0, 0), (1, 1, 1), (2, 2, 2))
    tmesh = hexToTets(mesh)
    tmesh.nodeSets["boundary"] = boundarySet(tmesh)
    values = 1.0 + tmesh.nodes[tmesh.nodeSets["boundary"]] @ GRADIENT
    bc = BoundarySpec(dirichlet=[DirichletCondition("boundary", values)])
    result = tetFemSolve(tmesh, Material.isotropic("soil", 1.0), bc)
    assert_allclose(result.finalHeads, 1.0 + tmesh.nodes @ GRADIENT,
                    atol=1e-12)
    assert_allclose(result.fluxes[0], np.broadcast_to(-GRADIENT, (48, 3)),
                    atol=1e-12)


def test_tetPatchMonitor():
    tmesh = tetrahedralize(patchMesh())
    bc = BoundarySpec(dirichlet=[DirichletCondition("zmin", 30.0),
                                 DirichletCondition("zmax", 70.0)],
                      monitors=[Monitor("centre", np.array([0.55, 0.7,
                                                            2.0]))])
    result = tetFemSolve(tmesh, {"soil": Material.isotropic("soil", 1.0)},
                         bc)
    assert result.monitors[0, 0] == pytest.approx(30.0 + 80.0 / 3.0,
                                                  abs=1e-9)
    assert abs(result.reactions.sum()) <= 1e-9


def test_tetFluxColumn():
    tmesh = hexToTets(hexGridMesh((0, 0, 0), (0.1, 0.1, 1.0), (1, 1, 5)))
    bc = BoundarySpec(dirichlet=[DirichletCondition("zmin", 0.0)],
                      flux=[FluxCondition("zmax", 1.0)])
    result = tetFemSolve(tmesh, Material.isotropic("soil", 2.0), bc)
    assert_allclose(result.finalHeads, tmesh.nodes[:, 2] / 2.0, atol=1e-10)


def test_tetMaterialMap():
    mesh = hexGridMesh((0, 0, 0), (2, 1, 1), (2, 1, 1))
    tmesh = hexToTets(mesh)
    materials = {"a": Material.isotropic("a", 1.0),
                 "b": Material.isotropic("b", 3.0)}
    bc = BoundarySpec(dirichlet=[DirichletCondition("xmin", 0.0),
                                 DirichletCondition("xmax", 4.0)])
    result = tetFemSolve(tmesh, materials, bc, elementMaterials=["a", "b"])
    # series resistances 1 and 1/3 share the head drop 3:1
    interface = np.abs(tmesh.nodes[:, 0] - 1.0) < 1e-12
    assert_allclose(result.finalHeads[interface], 3.0, atol=1e-10)
    with pytest.raises(ConfigError, match="material map"):
        tetFemSolve(tmesh, materials, bc)


def test_tetSolveErrors(unitCube):
    tmesh = hexToTets(unitCube)
    soil = Material.isotropic("soil", 1.0)
    with pytest.raises(SolverError):
        tetFemSolve(tmesh, soil, BoundarySpec())
    bc = BoundarySpec(dirichlet=[DirichletCondition("zmin", 0.0)],
                      flux=[FluxCondition("top", 1.0)])
    with pytest.raises(ConfigError, match="top"):
        tetFemSolve(tmesh, soil, bc)


#%% element oracles

def pipeline(mesh, material, elementId=0):
    coeffs = assembleElementCoeffs(mesh, elementId, material)
    modal = eigenSplit(buildHamiltonian(coeffs))
    return coeffs, modal, elementStiffness(modal), \
        elementMass(modal, coeffs.M0)


def test_schurOracleOnCube(unitCube, soil):
    coeffs, _, K, _ = pipeline(unitCube, soil)
    Ks = schurStiffnessOracle(coeffs)
    assert np.linalg.norm(K - Ks) <= 1e-8 * np.linalg.norm(K)


def test_radialMassOracle(soil):
    mesh = patchMesh()
    coeffs, modal, _, M = pipeline(mesh, soil, 4)
    M64 = radialMassOracle(modal, coeffs.M0, 64)
    M32 = radialMassOracle(modal, coeffs.M0, 32)
    normM = np.linalg.norm(M)
    assert np.linalg.norm(M - M64) <= 1e-8 * normM
    assert np.linalg.norm(M64 - M32) <= 1e-9 * normM


def test_radialOracleNeedsPoints(unitCube, soil):
    coeffs, modal, _, _ = pipeline(unitCube, soil)
    with pytest.raises(ValueError):
        radialMassOracle(modal, coeffs.M0, 4)


def test_randomCorpus():
    rng = np.random.default_rng(7)
    material = Material("aniso", np.array([[1.5, 0.2, 0.0],
                                           [0.2, 1.0, -0.1],
                                           [0.0, -0.1, 0.7]]), 1.0)
    for _ in range(50):
        mesh = randomConvexPolyhedron(rng)
        row, = oracleReport(mesh, material)
        assert row["stiffness"] <= 1e-8
        assert row["mass"] <= 1e-8
        assert row["rowSum"] <= 1e-8


def test_oracleReportRows(soil):
    rows = oracleReport(patchMesh(), soil, elementIds=[0, 4])
    assert [row["element"] for row in rows] == [0, 4]
    assert [row["nDofs"] for row in rows] == [8, 13]
