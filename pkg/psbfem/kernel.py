#!/usr/bin/env python3
# -*- coding: utf-8 -*-
"""
Created on Thu Sep 17 11:40:22 2026

Semi-analytical element pipeline of the scaled boundary method for
Darcy seepage. Face geometry and B-matrices give the coefficient
matrices E0, E1, E2 and M0; the Hamiltonian matrix is split into its
bounded modal block, from which the element stiffness and mass follow
in closed form. The same modal basis reconstructs heads inside the
element.

@author: PSBFEM developers
"""

# python modules
import logging
from dataclasses import dataclass, field
import numpy as np
import scipy.linalg as sla

# custom modules
from psbfem.errors import (ConfigError, ConditioningError, ConventionError,
                           EvaluationDomainError, MassSingularityError,
                           ModalBasisError, OrientationError)
from psbfem.mesh import elementFaceLoops, elementNodes, scalingCentre, \
    elementVolume
from psbfem.wachspress import (localPolygon, wachspressBasis,
                               wachspressValues, triangulateAndQuadrature)


logger = logging.getLogger(__name__)

# listing all functions declared in this file so that sphinx-automodapi
# correctly documents them and doesn't document imported functions.
__all__ = ["Material",
           "FaceGeometryAtPoint",
           "FaceContext",
           "ElementCoefficients",
           "HamiltonianSystem",
           "ModalBasis",
           "ElementOperators",
           "faceGeometry",
           "faceCoefficients",
           "assembleElementCoeffs",
           "buildHamiltonian",
           "eigenSplit",
           "elementStiffness",
           "elementMass",
           "internalField",
           "elementOperators",
           "elementFlux",
           ]


# refuse to invert E0 beyond this condition estimate
COND_E0 = 1e12
# refuse a modal head matrix beyond this condition number
COND_PHI = 1e12
TOL_IMAG = 1e-9
TOL_ASYM = 1e-8
TOL_MASS_DENOM = 1e-8


@dataclass
class Material:
    r"""
    Seepage material.

    name : str
        Label used in case files.

    k : numpy.ndarray
        3x3 symmetric positive-definite hydraulic conductivity.

    Ss : float
        Specific storage (1/length), >= 0.
    """
    name: str
    k: np.ndarray
    Ss: float = 0.0

    def __post_init__(self):
        k = np.asarray(self.k, dtype=float)
        if k.ndim == 0:
            k = float(k) * np.eye(3)
        if k.shape != (3, 3) or not np.allclose(k, k.T, rtol=1e-12,
                                                atol=0.0):
            raise ConfigError(f"material {self.name!r}: k must be a "
                              f"symmetric 3x3 tensor")
        try:
            np.linalg.cholesky(k)
        except np.linalg.LinAlgError as err:
            raise ConfigError(f"material {self.name!r}: k is not positive "
                              f"definite") from err
        if not self.Ss >= 0.0:
            raise ConfigError(f"material {self.name!r}: Ss must be >= 0")
        self.k = k
        self.Ss = float(self.Ss)

    @classmethod
    def isotropic(cls, name, k, Ss=0.0):
        return cls(name, float(k) * np.eye(3), Ss)

    def scaled(self, factor):
        """Copy with conductivity multiplied by factor."""
        return Material(self.name, factor * self.k, self.Ss)


@dataclass
class FaceGeometryAtPoint:
    Jb: np.ndarray
    detJb: float
    b1: np.ndarray
    b2: np.ndarray
    b3: np.ndarray


@dataclass
class FaceContext:
    """
    Per-face data kept with the element for flux integration and
    internal-field sampling.
    """
    faceId: int
    localIds: np.ndarray
    poly: object
    coords: np.ndarray
    quadPoints: np.ndarray
    quadWeights: np.ndarray
    quadN: np.ndarray


@dataclass
class ElementCoefficients:
    E0: np.ndarray
    E1: np.ndarray
    E2: np.ndarray
    M0: np.ndarray
    dofMap: np.ndarray
    elementId: int = -1
    centre: np.ndarray = None
    faces: list = field(default_factory=list)


@dataclass
class HamiltonianSystem:
    Zp: np.ndarray
    elementId: int = -1


@dataclass
class ModalBasis:
    r"""
    Bounded modal block of the Hamiltonian matrix. Eigenvalues are
    those of Zp with positive real part; the head of mode i varies
    radially as xi**(eigenvalues[i] - 0.5).
    """
    PhiH: np.ndarray
    PhiQ: np.ndarray
    eigenvalues: np.ndarray
    condPhiH: float = np.nan
    elementId: int = -1


@dataclass
class ElementOperators:
    K: np.ndarray
    M: np.ndarray
    dofMap: np.ndarray
    volume: float
    coeffs: ElementCoefficients
    modalBasis: ModalBasis
    material: Material


#%% face level

def _geometryBatch(N, dN, faceCoords):
    """
    Boundary Jacobian rows, determinants and b-vectors at a batch of
    face points. N is (m, n), dN is (m, n, 2), faceCoords (n, 3).
    """
    x = N @ faceCoords
    xEta = dN[:, :, 0] @ faceCoords
    xZeta = dN[:, :, 1] @ faceCoords
    c1 = np.cross(xEta, xZeta)
    det = np.einsum('mk,mk->m', x, c1)
    b1 = c1 / det[:, None]
    b2 = np.cross(xZeta, x) / det[:, None]
    b3 = np.cross(x, xEta) / det[:, None]
    return x, xEta, xZeta, det, b1, b2, b3


def faceGeometry(poly, faceCoords, qp):
    r"""
    Boundary Jacobian and gradient-operator vectors of a face at one
    point.

    Parameters
    ----------
    poly : LocalPolygon
        Parametrisation of the face in (eta, zeta).

    faceCoords : numpy.ndarray
        (n, 3) face node coordinates relative to the scaling centre, in
        the order of poly's vertices.

    qp : array_like
        Point (eta, zeta) inside the face.

    Returns
    -------
    FaceGeometryAtPoint
        Jb has rows x(eta, zeta), dx/deta and dx/dzeta.
    """
    N, dN = wachspressBasis(poly, np.asarray(qp, dtype=float)[None, :])
    x, xEta, xZeta, det, b1, b2, b3 = _geometryBatch(N, dN,
                                                     np.asarray(faceCoords))
    if not det[0] > 0.0:
        raise OrientationError(f"non-positive boundary Jacobian "
                               f"{det[0]:.3e} at {list(qp)}")
    Jb = np.vstack([x[0], xEta[0], xZeta[0]])
    return FaceGeometryAtPoint(Jb, det[0], b1[0], b2[0], b3[0])


def _faceMatrices(N, dN, weights, faceCoords, material, label=""):
    """Coefficient matrices of one face from basis values at its rule."""
    _, _, _, det, b1, b2, b3 = _geometryBatch(N, dN, faceCoords)
    if np.any(det <= 0.0):
        raise OrientationError(f"non-positive boundary Jacobian "
                               f"{det.min():.3e}{label}")
    wJ = weights * det
    # B1 = b1 N and B2 = b2 N,eta + b3 N,zeta, each (m, 3, n)
    B1 = b1[:, :, None] * N[:, None, :]
    B2 = b2[:, :, None] * dN[:, None, :, 0] + b3[:, :, None] * dN[:, None, :, 1]
    k = material.k
    kB1 = np.einsum('ij,mjn->min', k, B1)
    kB2 = np.einsum('ij,mjn->min', k, B2)
    E0 = np.einsum('m,mia,mib->ab', wJ, B1, kB1)
    E1 = np.einsum('m,mia,mib->ab', wJ, B2, kB1)
    E2 = np.einsum('m,mia,mib->ab', wJ, B2, kB2)
    M0 = material.Ss * np.einsum('m,ma,mb->ab', wJ, N, N)
    return E0, E1, E2, M0


def faceCoefficients(poly, faceCoords, material, rule):
    r"""
    Face contributions E0f, E1f, E2f and M0f in face-local node order.

    Parameters
    ----------
    poly : LocalPolygon
        Face polygon.

    faceCoords : numpy.ndarray
        (n, 3) node coordinates relative to the scaling centre.

    material : Material
        Conductivity tensor and specific storage.

    rule : QuadratureRule
        Quadrature on poly.
    """
    N, dN = wachspressBasis(poly, rule.points)
    return _faceMatrices(N, dN, rule.weights, np.asarray(faceCoords),
                         material)


#%% element level

def assembleElementCoeffs(mesh, elementId, material, gaussOrder=3):
    r"""
    Assemble E0, E1, E2 and M0 of one polyhedral element from its
    faces.

    Parameters
    ----------
    mesh : Mesh
        Validated mesh.

    elementId : int
        Element index.

    material : Material
        Element material.

    gaussOrder : int
        Points per sub-triangle of the face quadrature. Default is 3.

    Returns
    -------
    ElementCoefficients
        Matrices over the element's nodes in ascending global order.
    """
    centre = scalingCentre(mesh, elementId)
    dofMap = elementNodes(mesh, elementId)
    local = {int(g): i for i, g in enumerate(dofMap)}
    n = len(dofMap)
    E0 = np.zeros((n, n))
    E1 = np.zeros((n, n))
    E2 = np.zeros((n, n))
    M0 = np.zeros((n, n))
    faces = []
    for faceId, loop in elementFaceLoops(mesh, elementId):
        coords = mesh.nodes[loop]
        poly = localPolygon(coords)
        rule = triangulateAndQuadrature(poly, gaussOrder)
        N, dN = wachspressBasis(poly, rule.points)
        E0f, E1f, E2f, M0f = _faceMatrices(
            N, dN, rule.weights, coords - centre, material,
            label=f", element {elementId}, face {faceId}")
        ids = np.array([local[int(g)] for g in loop])
        ix = np.ix_(ids, ids)
        E0[ix] += E0f
        E1[ix] += E1f
        E2[ix] += E2f
        M0[ix] += M0f
        faces.append(FaceContext(faceId, ids, poly, coords, rule.points,
                                 rule.weights, N))
    try:
        np.linalg.cholesky(0.5 * (E0 + E0.T))
    except np.linalg.LinAlgError as err:
        raise OrientationError(f"E0 of element {elementId} is not positive "
                               f"definite; check face orientation and "
                               f"star-convexity") from err
    return ElementCoefficients(E0, E1, E2, M0, dofMap, elementId, centre,
                               faces)


def buildHamiltonian(coeffs):
    r"""
    Hamiltonian coefficient matrix of the radial equation,

    Zp = [[-E0^-1 E1^T + I/2, E0^-1], [E2 - E1 E0^-1 E1^T, E1 E0^-1 - I/2]]

    Parameters
    ----------
    coeffs : ElementCoefficients
        E0 must be symmetric positive definite.
    """
    E0, E1, E2 = coeffs.E0, coeffs.E1, coeffs.E2
    n = E0.shape[0]
    cond = np.linalg.cond(E0)
    if not cond < COND_E0:
        raise ConditioningError(f"E0 of element {coeffs.elementId} has "
                                f"condition number {cond:.3e}")
    factor = sla.cho_factor(E0)
    E0inv = sla.cho_solve(factor, np.eye(n))
    E0invE1T = sla.cho_solve(factor, E1.T)
    eye = np.eye(n)
    Zp = np.block([[-E0invE1T + 0.5 * eye, E0inv],
                   [E2 - E1 @ E0invE1T, E1 @ E0inv - 0.5 * eye]])
    logger.debug("element %d: cond(E0) = %.3e", coeffs.elementId, cond)
    return HamiltonianSystem(Zp, coeffs.elementId)


def eigenSplit(hamiltonian):
    r"""
    Select the bounded modal block of Zp: the n eigenpairs with
    positive real part. The constant-head mode appears with eigenvalue
    0.5. Complex conjugate pairs are kept together.

    Parameters
    ----------
    hamiltonian : HamiltonianSystem

    Returns
    -------
    ModalBasis
    """
    Zp = hamiltonian.Zp
    n = Zp.shape[0] // 2
    elementId = hamiltonian.elementId
    eigenvalues, vectors = sla.eig(Zp)
    if not np.all(np.isfinite(eigenvalues)):
        raise ModalBasisError(f"eigen-decomposition failed for element "
                              f"{elementId}")
    selected = np.flatnonzero(eigenvalues.real > 0.0)
    if len(selected) != n:
        raise ModalBasisError(f"element {elementId}: {len(selected)} "
                              f"eigenvalues with positive real part, "
                              f"expected {n}")
    # order by real part, conjugate partners stay adjacent
    selected = selected[np.lexsort((eigenvalues[selected].imag,
                                    eigenvalues[selected].real))]
    lam = eigenvalues[selected]
    PhiH = vectors[:n, selected]
    PhiQ = vectors[n:, selected]
    if np.all(np.abs(lam.imag) == 0.0):
        lam = lam.real
        PhiH = PhiH.real
        PhiQ = PhiQ.real
    condPhiH = np.linalg.cond(PhiH)
    if not condPhiH < COND_PHI:
        raise ModalBasisError(f"element {elementId}: modal head matrix is "
                              f"singular or Zp is defective "
                              f"(condition number {condPhiH:.3e})")
    logger.debug("element %d: eigenvalues %.4f..%.4f, cond(PhiH) = %.3e",
                 elementId, lam.real.min(), lam.real.max(), condPhiH)
    return ModalBasis(PhiH, PhiQ, lam, condPhiH, elementId)


def elementStiffness(modalBasis):
    r"""
    Element stiffness K = PhiQ PhiH^-1. The imaginary residue and the
    asymmetry are checked before the real, symmetrised K is returned.
    """
    PhiH, PhiQ = modalBasis.PhiH, modalBasis.PhiQ
    K = np.linalg.solve(PhiH.T, PhiQ.T).T
    norm = np.linalg.norm(K)
    imag = np.linalg.norm(np.imag(K))
    if imag > TOL_IMAG * norm:
        raise ConventionError(f"element {modalBasis.elementId}: stiffness "
                              f"imaginary residue {imag / norm:.3e}")
    K = np.real(K)
    asym = np.linalg.norm(K - K.T)
    if asym > TOL_ASYM * norm:
        raise ConventionError(f"element {modalBasis.elementId}: stiffness "
                              f"asymmetry {asym / norm:.3e}")
    return 0.5 * (K + K.T)


def elementMass(modalBasis, M0):
    r"""
    Element mass from the closed-form radial integral,
    m0 = PhiH^T M0 PhiH, m_ij = m0_ij / (lambda_i + lambda_j + 2) and
    M = PhiH^-T m PhiH^-1.

    Parameters
    ----------
    modalBasis : ModalBasis

    M0 : numpy.ndarray
        Boundary mass coefficient matrix.
    """
    PhiH = modalBasis.PhiH
    lam = np.asarray(modalBasis.eigenvalues)
    denom = lam[:, None] + lam[None, :] + 2.0
    if np.any(np.abs(denom) < TOL_MASS_DENOM):
        i, j = np.argwhere(np.abs(denom) < TOL_MASS_DENOM)[0]
        raise MassSingularityError(f"element {modalBasis.elementId}: "
                                   f"eigenvalues {lam[i]} and {lam[j]} "
                                   f"give a vanishing mass denominator")
    m0 = PhiH.T @ M0 @ PhiH
    m = m0 / denom
    PhiHinv = np.linalg.inv(PhiH)
    M = np.real(PhiHinv.T @ m @ PhiHinv)
    return 0.5 * (M + M.T)


def internalField(modalBasis, boundaryHeads, sample, faceContext):
    r"""
    Head inside an element at scaled boundary coordinates.

    Parameters
    ----------
    modalBasis : ModalBasis
        Modal basis of the element.

    boundaryHeads : numpy.ndarray
        Nodal heads in element dof order.

    sample : tuple
        (xi, eta, zeta) with 0 < xi <= 1 and (eta, zeta) in the face.

    faceContext : FaceContext
        Face through which the radial line passes.
    """
    xi, eta, zeta = sample
    if not 0.0 < xi <= 1.0:
        raise EvaluationDomainError(f"radial coordinate {xi} outside (0, 1]")
    PhiH = modalBasis.PhiH
    c = np.linalg.solve(PhiH, np.asarray(boundaryHeads, dtype=PhiH.dtype))
    radial = PhiH @ (xi ** (np.asarray(modalBasis.eigenvalues) - 0.5) * c)
    N = wachspressValues(faceContext.poly, [(eta, zeta)])[0]
    return float(np.real(N @ radial[faceContext.localIds]))


def elementOperators(mesh, elementId, material, gaussOrder=3):
    """Full element pipeline, mesh element to K and M."""
    coeffs = assembleElementCoeffs(mesh, elementId, material, gaussOrder)
    modalBasis = eigenSplit(buildHamiltonian(coeffs))
    K = elementStiffness(modalBasis)
    M = elementMass(modalBasis, coeffs.M0)
    return ElementOperators(K, M, coeffs.dofMap,
                            elementVolume(mesh, elementId), coeffs,
                            modalBasis, material)


def elementFlux(operators, elementHeads):
    r"""
    Volume-averaged Darcy flux of an element, -k <grad h>, with the mean
    gradient from the divergence theorem as (1/V) sum_f n_f int_f h dS.
    """
    grad = np.zeros(3)
    for face in operators.coeffs.faces:
        faceHeads = elementHeads[face.localIds]
        integral = face.quadWeights @ (face.quadN @ faceHeads)
        grad += face.poly.normal * integral
    grad /= operators.volume
    return -operators.material.k @ grad
