# -*- coding: utf-8 -*-
"""
Created on Mon Oct  5 13:17:55 2026

tests for kernel.py

@author: PSBFEM developers
"""

from dataclasses import replace
import numpy as np
import pytest
from numpy.testing import assert_allclose

from psbfem.errors import (ConfigError, OrientationError, ConditioningError,
                           ModalBasisError, ConventionError,
                           MassSingularityError, EvaluationDomainError)
from psbfem.mesh import hexGridMesh, elementVolume
from psbfem.wachspress import (localPolygon, polygonCentroid,
                               triangulateAndQuadrature)
from psbfem.kernel import (Material, ElementCoefficients, HamiltonianSystem,
                           ModalBasis, faceGeometry, faceCoefficients,
                           assembleElementCoeffs, buildHamiltonian,
                           eigenSplit, elementStiffness, elementMass,
                           internalField, elementOperators, elementFlux)
from psbfem.verification import randomConvexPolyhedron
from psbfem.benchmarks import patchMesh


TOP_FACE = np.array([[0, 0, 1], [1, 0, 1], [1, 1, 1], [0, 1, 1]],
                    dtype=float)


def scalarCoeffs(M0=0.0):
    return ElementCoefficients(np.array([[1.0]]), np.array([[0.0]]),
                               np.array([[1.0]]), np.array([[M0]]),
                               np.array([0]))


#%% material

def test_isotropicMaterial():
    material = Material.isotropic("sand", 2.0, 1e-4)
    assert_allclose(material.k, 2.0 * np.eye(3))
    assert material.scaled(0.5).k[0, 0] == pytest.approx(1.0)


@pytest.mark.parametrize("k, Ss", [(np.diag([1.0, -1.0, 1.0]), 0.0),
                                   (np.eye(2), 0.0),
                                   ([[1, 0.5, 0], [0, 1, 0], [0, 0, 1]], 0.0),
                                   (np.eye(3), -1.0)])
def test_badMaterial(k, Ss):
    with pytest.raises(ConfigError):
        Material("bad", k, Ss)


#%% face level

def test_faceGeometryTopFace():
    poly = localPolygon(TOP_FACE)
    geometry = faceGeometry(poly, TOP_FACE - 0.5, [0.5, 0.5])
    assert geometry.detJb == pytest.approx(0.5)
    assert_allclose(geometry.b1, [0, 0, 2.0], atol=1e-14)


def test_faceGeometryWrongSide():
    poly = localPolygon(TOP_FACE)
    with pytest.raises(OrientationError):
        faceGeometry(poly, TOP_FACE - [0.5, 0.5, 2.0], [0.5, 0.5])


def test_faceMassSum(soil):
    poly = localPolygon(TOP_FACE)
    rule = triangulateAndQuadrature(poly, 3)
    _, _, _, M0f = faceCoefficients(poly, TOP_FACE - 0.5, soil, rule)
    assert M0f.sum() == pytest.approx(0.5, abs=1e-12)


#%% element coefficients

def test_cubeCoefficients(unitCube, soil):
    coeffs = assembleElementCoeffs(unitCube, 0, soil)
    ones = np.ones(len(coeffs.dofMap))
    assert_allclose(coeffs.E2 @ ones, 0.0, atol=1e-12)
    assert ones @ coeffs.M0 @ ones == pytest.approx(3.0, abs=1e-12)
    assert_allclose(coeffs.E0, coeffs.E0.T, atol=1e-14)
    assert np.all(np.linalg.eigvalsh(coeffs.E0) > 0.0)


def test_coefficientsScaleWithSize(unitCube, soil):
    big = hexGridMesh((0, 0, 0), (2, 2, 2), (1, 1, 1))
    small = assembleElementCoeffs(unitCube, 0, soil)
    large = assembleElementCoeffs(big, 0, soil)
    assert_allclose(large.E0, 2.0 * small.E0, rtol=1e-12, atol=1e-14)
    assert_allclose(large.E2, 2.0 * small.E2, rtol=1e-12, atol=1e-14)


#%% modal basis

def test_scalarHamiltonian():
    modal = eigenSplit(buildHamiltonian(scalarCoeffs()))
    assert_allclose(modal.eigenvalues, [np.sqrt(1.25)])
    K = elementStiffness(modal)
    assert K[0, 0] == pytest.approx(np.sqrt(1.25) - 0.5, rel=1e-12)


def test_scalarMass():
    coeffs = scalarCoeffs(M0=1.0)
    modal = eigenSplit(buildHamiltonian(coeffs))
    M = elementMass(modal, coeffs.M0)
    assert M[0, 0] == pytest.approx(1.0 / (2.0 * np.sqrt(1.25) + 2.0),
                                    rel=1e-12)


def test_spectrumIsSymmetric(unitCube, soil):
    Zp = buildHamiltonian(assembleElementCoeffs(unitCube, 0, soil)).Zp
    eigenvalues = np.linalg.eigvals(Zp)
    assert_allclose(np.sort_complex(eigenvalues),
                    np.sort_complex(-eigenvalues), atol=1e-9)


def test_constantModeAtOneHalf(unitCube, soil):
    modal = eigenSplit(buildHamiltonian(assembleElementCoeffs(unitCube, 0,
                                                              soil)))
    assert np.min(np.abs(modal.eigenvalues - 0.5)) <= 1e-9
    assert np.all(np.real(modal.eigenvalues) > 0.0)
    # the linear fields
    assert np.sum(np.abs(modal.eigenvalues - 1.5) <= 1e-6) >= 3


def test_illConditionedE0():
    coeffs = ElementCoefficients(np.diag([1.0, 1e-13]), np.zeros((2, 2)),
                                 np.eye(2), np.zeros((2, 2)), np.arange(2))
    with pytest.raises(ConditioningError):
        buildHamiltonian(coeffs)


def test_wrongModeCount():
    with pytest.raises(ModalBasisError):
        eigenSplit(HamiltonianSystem(np.diag([1.0, 2.0])))


def test_asymmetricStiffness():
    modal = ModalBasis(np.eye(2), np.array([[1.0, 1.0], [0.0, 1.0]]),
                       np.array([0.5, 1.5]))
    with pytest.raises(ConventionError):
        elementStiffness(modal)


def test_vanishingMassDenominator():
    modal = ModalBasis(np.eye(2), np.eye(2), np.array([-1.0, 0.5]))
    with pytest.raises(MassSingularityError):
        elementMass(modal, np.eye(2))


#%% element operators

def checkOperators(op, volume, Ss):
    K, M = op.K, op.M
    normK = np.linalg.norm(K)
    ones = np.ones(len(K))
    assert_allclose(K, K.T, atol=1e-12 * normK)
    assert np.max(np.abs(K @ ones)) <= 1e-8 * normK
    eigenvalues = np.linalg.eigvalsh(K)
    assert eigenvalues[0] >= -1e-10 * normK
    # a single zero mode
    assert eigenvalues[1] > 1e-6 * normK
    assert_allclose(M, M.T, atol=1e-12 * np.linalg.norm(M))
    assert np.all(np.linalg.eigvalsh(M) > 0.0)
    assert ones @ M @ ones == pytest.approx(Ss * volume, rel=1e-6)


def test_cubeOperators(unitCube, soil):
    checkOperators(elementOperators(unitCube, 0, soil), 1.0, 1.0)


def test_patchPolyhedronOperators(soil):
    mesh = patchMesh()
    op = elementOperators(mesh, 4, soil)
    assert len(op.dofMap) == 13
    checkOperators(op, elementVolume(mesh, 4), 1.0)


def test_randomPolyhedronOperators(rng):
    material = Material("aniso", np.diag([2.0, 1.0, 0.5]), 0.3)
    for _ in range(5):
        mesh = randomConvexPolyhedron(rng)
        checkOperators(elementOperators(mesh, 0, material),
                       elementVolume(mesh, 0), 0.3)


@pytest.mark.parametrize("elementId", [0, 4])
def test_affineEnergy(elementId):
    mesh = patchMesh()
    k = np.array([[2.0, 0.3, 0.0], [0.3, 1.0, 0.1], [0.0, 0.1, 0.5]])
    material = Material("aniso", k, 0.0)
    op = elementOperators(mesh, elementId, material)
    g = np.array([1.0, -2.0, 0.5])
    h = mesh.nodes[op.dofMap] @ g + 3.0
    assert h @ op.K @ h == pytest.approx(g @ k @ g * op.volume, rel=1e-8)


def randomRotation(rng):
    Q, R = np.linalg.qr(rng.normal(size=(3, 3)))
    Q = Q * np.sign(np.diag(R))
    if np.linalg.det(Q) < 0.0:
        Q[:, 0] = -Q[:, 0]
    return Q


def test_rotationInvariance(rng):
    material = Material.isotropic("soil", 2.0, 0.1)
    for _ in range(3):
        mesh = randomConvexPolyhedron(rng)
        rotated = replace(mesh, nodes=mesh.nodes @ randomRotation(rng).T)
        op = elementOperators(mesh, 0, material)
        opRotated = elementOperators(rotated, 0, material)
        assert_allclose(opRotated.dofMap, op.dofMap)
        assert_allclose(opRotated.K, op.K, atol=1e-9 * np.abs(op.K).max())
        assert_allclose(opRotated.M, op.M, atol=1e-9 * np.abs(op.M).max())


def test_cubeNodalFluxes(unitCube, soil):
    op = elementOperators(unitCube, 0, soil)
    z = unitCube.nodes[op.dofMap, 2]
    Q = op.K @ z
    # inflow positive: water enters at the top and leaves at the bottom
    assert Q[z == 1.0].sum() == pytest.approx(1.0, abs=1e-10)
    assert Q[z == 0.0].sum() == pytest.approx(-1.0, abs=1e-10)
    assert_allclose(Q[z == 1.0], 0.25, atol=1e-10)


def test_affineFlux(unitCube, soil):
    op = elementOperators(unitCube, 0, soil)
    g = np.array([1.0, 2.0, 3.0])
    heads = unitCube.nodes[op.dofMap] @ g
    assert_allclose(elementFlux(op, heads), -g, atol=1e-12)


def test_internalFieldOfAffineHeads(unitCube, soil):
    op = elementOperators(unitCube, 0, soil)
    g = np.array([1.0, 2.0, 3.0])
    heads = unitCube.nodes[op.dofMap] @ g
    top = next(face for face in op.coeffs.faces
               if face.poly.normal[2] > 0.5)
    eta, zeta = polygonCentroid(top.poly.vertices)
    value = internalField(op.modalBasis, heads, (0.5, eta, zeta), top)
    # point (0.5, 0.5, 0.75)
    assert value == pytest.approx(3.75, abs=1e-8)
    with pytest.raises(EvaluationDomainError):
        internalField(op.modalBasis, heads, (0.0, eta, zeta), top)
