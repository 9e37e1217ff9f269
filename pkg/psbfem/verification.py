#!/usr/bin/env python3
# -*- coding: utf-8 -*-
"""
Created on Tue Sep 22 10:41:05 2026

Independent reference computations: a linear tetrahedron Darcy solver,
an ordered real Schur stiffness and a numerically integrated radial
mass. They share no algorithm with the main element pipeline and are
used to cross-check it.

@author: PSBFEM developers
"""

# python modules
import time
import logging
from dataclasses import dataclass, field
import numpy as np
import scipy.linalg as sla
import scipy.sparse as sparse
from numpy.polynomial.legendre import leggauss
from scipy.spatial import cKDTree, ConvexHull

# custom modules
from psbfem.errors import (ConfigError, ConditioningError, MeshValidationError,
                           SolverError)
from psbfem.mesh import (elementFaceLoops, elementNodes, hexCorners,
                         meshFromCells)
from psbfem.kernel import (assembleElementCoeffs, buildHamiltonian,
                           eigenSplit, elementStiffness, elementMass)
from psbfem.solver import (FieldResult, dirichletValues, freeDofs,
                           solveReduced)


logger = logging.getLogger(__name__)

# listing all functions declared in this file so that sphinx-automodapi
# correctly documents them and doesn't document imported functions.
__all__ = ["TetMesh",
           "tetrahedralize",
           "hexToTets",
           "tetFemSolve",
           "schurStiffnessOracle",
           "radialMassOracle",
           "randomConvexPolyhedron",
           "oracleReport",
           ]


# Kuhn split of a hexahedron along its 0-6 diagonal
_KUHN_TETS = ((0, 1, 2, 6), (0, 2, 3, 6), (0, 3, 7, 6),
              (0, 7, 4, 6), (0, 4, 5, 6), (0, 5, 1, 6))


@dataclass
class TetMesh:
    r"""
    Linear tetrahedron mesh.

    nodes : numpy.ndarray
        (n, 3) coordinates.

    tets : numpy.ndarray
        (m, 4) node indices with positive signed volume.

    nodeSets : dict
        Name to node index list.

    faceSets : dict
        Name to (k, 3) boundary triangles.

    elementIds : numpy.ndarray
        Parent polyhedral element of every tetrahedron.
    """
    nodes: np.ndarray
    tets: np.ndarray
    nodeSets: dict = field(default_factory=dict)
    faceSets: dict = field(default_factory=dict)
    elementIds: np.ndarray = None

    @property
    def nNodes(self):
        return len(self.nodes)

    @property
    def nElements(self):
        return len(self.tets)


def _signedVolumes(nodes, tets):
    a, b, c, d = (nodes[tets[:, i]] for i in range(4))
    return np.einsum("ij,ij->i", b - a, np.cross(c - a, d - a)) / 6.0


def _orient(nodes, tets):
    """Swap two vertices of negatively oriented tetrahedra."""
    tets = np.array(tets, dtype=int)
    negative = _signedVolumes(nodes, tets) < 0.0
    tets[negative, 2], tets[negative, 3] = (tets[negative, 3].copy(),
                                            tets[negative, 2].copy())
    return tets


def tetrahedralize(mesh):
    r"""
    Split every polyhedron into tetrahedra joining its centroid, the
    centroid of each face and each face edge. Face centroids are shared
    between neighbouring elements, so the result is conforming.

    Node sets gain the face centroids of faces whose nodes all belong to
    the set; face sets become the corresponding boundary triangles.

    Parameters
    ----------
    mesh : Mesh
        Valid polyhedral mesh.

    Returns
    -------
    TetMesh
    """
    nodes = [np.asarray(mesh.nodes, dtype=float)]
    faceCentre = {}
    nextId = mesh.nNodes
    for faceId, face in enumerate(mesh.faces):
        faceCentre[faceId] = nextId
        nodes.append(mesh.nodes[list(face.nodeIds)].mean(axis=0)[None, :])
        nextId += 1
    tets = []
    parents = []
    for e in range(mesh.nElements):
        ids = elementNodes(mesh, e)
        nodes.append(mesh.nodes[ids].mean(axis=0)[None, :])
        centre = nextId
        nextId += 1
        for faceId, _ in elementFaceLoops(mesh, e):
            loop = mesh.faces[faceId].nodeIds
            f = faceCentre[faceId]
            for a, b in zip(loop, loop[1:] + loop[:1]):
                tets.append((centre, f, a, b))
                parents.append(e)
    allNodes = np.vstack(nodes)
    tets = _orient(allNodes, tets)

    nodeSets = {}
    for name, ids in mesh.nodeSets.items():
        members = set(ids)
        extra = [faceCentre[i] for i, face in enumerate(mesh.faces)
                 if members.issuperset(face.nodeIds)]
        nodeSets[name] = sorted(members) + extra
    faceSets = {}
    for name, faceIds in mesh.faceSets.items():
        triangles = []
        for faceId in faceIds:
            loop = mesh.faces[faceId].nodeIds
            for a, b in zip(loop, loop[1:] + loop[:1]):
                triangles.append((faceCentre[faceId], a, b))
        faceSets[name] = np.array(triangles, dtype=int).reshape(-1, 3)
    logger.debug("tetrahedralized %d polyhedra into %d tetrahedra",
                 mesh.nElements, len(tets))
    return TetMesh(allNodes, tets, nodeSets, faceSets, np.array(parents))


def hexToTets(mesh):
    r"""
    Six-tetrahedron split of every axis-aligned hexahedron along the
    diagonal from its lowest to its highest corner, which is conforming
    between neighbouring cells of a box grid. Sets are carried over.
    """
    tets = []
    parents = []
    for e in range(mesh.nElements):
        corners = hexCorners(mesh, e)
        if corners is None:
            raise MeshValidationError(f"element {e} is not a hexahedron")
        for tet in _KUHN_TETS:
            tets.append([corners[i] for i in tet])
            parents.append(e)
    nodes = np.asarray(mesh.nodes, dtype=float)
    tets = _orient(nodes, tets)
    faceSets = {}
    for name, faceIds in mesh.faceSets.items():
        triangles = []
        for faceId in faceIds:
            loop = list(mesh.faces[faceId].nodeIds)
            # split along the diagonal through the lowest corner
            start = int(np.argmin([nodes[n].sum() for n in loop]))
            loop = loop[start:] + loop[:start]
            triangles += [(loop[0], loop[1], loop[2]),
                          (loop[0], loop[2], loop[3])]
        faceSets[name] = np.array(triangles, dtype=int).reshape(-1, 3)
    nodeSets = {name: list(ids) for name, ids in mesh.nodeSets.items()}
    return TetMesh(nodes, tets, nodeSets, faceSets, np.array(parents))


def _tetGradients(nodes, tets):
    """Constant shape-function gradients (m, 4, 3) and volumes (m,)."""
    x = nodes[tets]
    J = np.transpose(x[:, 1:] - x[:, :1], (0, 2, 1))
    volume = np.linalg.det(J) / 6.0
    if np.any(volume <= 0.0):
        bad = int(np.flatnonzero(volume <= 0.0)[0])
        raise MeshValidationError(f"tetrahedron {bad} has non-positive "
                                  f"volume")
    invJ = np.linalg.inv(J)
    grads = np.zeros((len(tets), 4, 3))
    grads[:, 1:] = invJ
    grads[:, 0] = -invJ.sum(axis=1)
    return grads, volume


def _tetMaterials(tmesh, materials, elementMaterials):
    if not isinstance(materials, dict):
        return [materials] * tmesh.nElements
    if elementMaterials is None:
        if len(materials) != 1:
            raise ConfigError("several materials need an element material "
                              "map")
        return [next(iter(materials.values()))] * tmesh.nElements
    if isinstance(elementMaterials, str):
        return [materials[elementMaterials]] * tmesh.nElements
    names = list(elementMaterials)
    if tmesh.elementIds is not None:
        names = [names[p] for p in tmesh.elementIds]
    return [materials[name] for name in names]


def tetFemSolve(tmesh, materials, bc, elementMaterials=None, method="direct",
                t=0.0):
    r"""
    Steady linear-tetrahedron Darcy solve, exact for affine heads.

    Parameters
    ----------
    tmesh : TetMesh
        Reference mesh.

    materials : Material or dict
        One material, or materials by name.

    bc : BoundarySpec
        Dirichlet sets refer to tmesh.nodeSets, flux sets to
        tmesh.faceSets.

    elementMaterials : str or list
        Material name, or one name per parent polyhedral element (per
        tetrahedron when elementIds is None). Default is None.

    method : str
        Linear solver, as in solveSteady. Default is 'direct'.

    t : float
        Evaluation time of time-series data. Default is 0.

    Returns
    -------
    FieldResult
        Heads, per-tetrahedron fluxes and monitor values.
    """
    start = time.perf_counter()
    nodes = np.asarray(tmesh.nodes, dtype=float)
    tets = np.asarray(tmesh.tets, dtype=int)
    grads, volume = _tetGradients(nodes, tets)
    mats = _tetMaterials(tmesh, materials, elementMaterials)
    k = np.array([m.k for m in mats])
    Ke = np.einsum("e,eia,eab,ejb->eij", volume, grads, k, grads)
    rows = np.repeat(tets, 4, axis=1).ravel()
    cols = np.tile(tets, (1, 4)).ravel()
    n = len(nodes)
    K = sparse.coo_matrix((Ke.ravel(), (rows, cols)), shape=(n, n)).tocsr()

    f = np.zeros(n)
    for cond in bc.flux:
        if cond.faceSet not in tmesh.faceSets:
            raise ConfigError(f"unknown face set {cond.faceSet!r}")
        tri = np.asarray(tmesh.faceSets[cond.faceSet], dtype=int)
        p = nodes[tri]
        area = 0.5 * np.linalg.norm(np.cross(p[:, 1] - p[:, 0],
                                             p[:, 2] - p[:, 0]), axis=1)
        np.add.at(f, tri.ravel(), np.repeat(cond.at(t) * area / 3.0, 3))

    fixed, values = dirichletValues(tmesh, bc, t)
    if fixed.size == 0:
        raise SolverError("no Dirichlet constraint; the constant head mode "
                          "makes the system singular")
    free = freeDofs(n, fixed)
    h = np.zeros(n)
    h[fixed] = values
    if free.size:
        h[free] = solveReduced(K[free][:, free],
                               f[free] - K[free][:, fixed] @ values, method)
    reactions = (K @ h - f)[fixed]

    gradH = np.einsum("eia,ei->ea", grads, h[tets])
    fluxes = -np.einsum("eab,eb->ea", k, gradH)
    labels = [m.label for m in bc.monitors]
    monitors = np.zeros((1, len(labels)))
    if labels:
        points = np.array([m.point for m in bc.monitors], dtype=float)
        monitors[0] = _sampleP1(nodes, tets, h, points)
    elapsed = time.perf_counter() - start
    logger.info("tetrahedron reference solve: %d nodes, %d tets, %.2f s",
                n, len(tets), elapsed)
    return FieldResult(np.array([t]), h[None, :], fluxes[None], labels,
                       monitors, reactions, fixed, np.nan, True,
                       {"solve": elapsed})


def _sampleP1(nodes, tets, h, points, candidates=16):
    """Linear interpolation in the containing tetrahedron."""
    centroids = nodes[tets].mean(axis=1)
    tree = cKDTree(centroids)
    k = min(candidates, len(tets))
    _, nearest = tree.query(points, k=k)
    nearest = np.asarray(nearest).reshape(len(points), k)
    values = np.empty(len(points))
    for i, point in enumerate(points):
        best, bestValue = -np.inf, np.nan
        for e in nearest[i]:
            x = nodes[tets[e]]
            T = (x[1:] - x[0]).T
            lam = np.linalg.solve(T, point - x[0])
            bary = np.concatenate([[1.0 - lam.sum()], lam])
            if bary.min() > best:
                best, bestValue = bary.min(), bary @ h[tets[e]]
            if bary.min() >= -1e-10:
                break
        values[i] = bestValue
    return values


def schurStiffnessOracle(coeffs):
    r"""
    Element stiffness from the stable invariant subspace of Zp computed
    by an ordered real Schur decomposition.

    With Zp = Q T Q^T ordered so that the eigenvalues of positive real
    part lead, the first n Schur vectors [U1; U2] span the same subspace
    as the bounded modes and K = U2 U1^-1.

    Parameters
    ----------
    coeffs : ElementCoefficients
        Coefficient matrices; E0 symmetric positive definite.

    Returns
    -------
    numpy.ndarray
        Symmetric stiffness.
    """
    E0, E1, E2 = coeffs.E0, coeffs.E1, coeffs.E2
    n = E0.shape[0]
    E0inv = np.linalg.inv(E0)
    eye = np.eye(n)
    Zp = np.block([[-E0inv @ E1.T + 0.5 * eye, E0inv],
                   [E2 - E1 @ E0inv @ E1.T, E1 @ E0inv - 0.5 * eye]])
    _, Q, sdim = sla.schur(Zp, output="real", sort="rhp")
    if sdim != n:
        raise ConditioningError(f"element {coeffs.elementId}: Schur "
                                f"reordering selected {sdim} eigenvalues, "
                                f"expected {n}")
    U1, U2 = Q[:n, :n], Q[n:, :n]
    K = np.linalg.solve(U1.T, U2.T).T
    return 0.5 * (K + K.T)


def radialMassOracle(modalBasis, M0, nRadial=64, panelPoints=8):
    r"""
    Element mass by composite Gauss-Legendre integration of
    int_0^1 xi^2 A(xi)^T M0 A(xi) dxi, A(xi) = PhiH diag(xi^(lambda-1/2))
    PhiH^-1.

    Parameters
    ----------
    modalBasis : ModalBasis
        Bounded modes of the element.

    M0 : numpy.ndarray
        Boundary mass coefficient matrix.

    nRadial : int
        Total quadrature points, >= 8. Default is 64.

    panelPoints : int
        Gauss points per uniform panel. Default is 8.
    """
    if nRadial < 8:
        raise ValueError(f"nRadial must be >= 8, got {nRadial}")
    panels = max(1, nRadial // panelPoints)
    x, w = leggauss(panelPoints)
    edges = np.linspace(0.0, 1.0, panels + 1)
    half = 0.5 * np.diff(edges)
    xi = (edges[:-1, None] + half[:, None] * (x[None, :] + 1.0)).ravel()
    weights = (half[:, None] * w[None, :]).ravel()

    PhiH = modalBasis.PhiH
    PhiHinv = np.linalg.inv(PhiH)
    exponents = np.asarray(modalBasis.eigenvalues) - 0.5
    M = np.zeros(M0.shape, dtype=PhiH.dtype)
    for s, weight in zip(xi, weights):
        A = (PhiH * s ** exponents) @ PhiHinv
        M += weight * s ** 2 * (A.T @ M0 @ A)
    M = np.real(M)
    return 0.5 * (M + M.T)


def randomConvexPolyhedron(rng, nPoints=14, jitter=0.3):
    r"""
    Single-element mesh of the convex hull of random points scattered
    around the unit sphere. Hull faces are triangles.

    Parameters
    ----------
    rng : numpy.random.Generator
        Seeded generator.

    nPoints : int
        Points drawn before taking the hull. Default is 14.

    jitter : float
        Relative radial scatter of the points. Default is 0.3.
    """
    directions = rng.normal(size=(nPoints, 3))
    directions /= np.linalg.norm(directions, axis=1)[:, None]
    points = directions * (1.0 + jitter * rng.uniform(-1.0, 1.0,
                                                      (nPoints, 1)))
    hull = ConvexHull(points)
    used = np.unique(hull.simplices)
    remap = {int(old): new for new, old in enumerate(used)}
    nodes = points[used]
    loops = []
    for simplex, equation in zip(hull.simplices, hull.equations):
        a, b, c = points[simplex]
        if np.dot(np.cross(b - a, c - a), equation[:3]) < 0.0:
            simplex = simplex[::-1]
        loops.append([remap[int(n)] for n in simplex])
    return meshFromCells(nodes, [loops])


def oracleReport(mesh, material, elementIds=None, nRadial=64,
                 gaussOrder=3):
    r"""
    Compare the main element pipeline with the oracles element by
    element.

    Returns
    -------
    list of dict
        Per element: 'element', 'nDofs', 'stiffness' (relative
        difference to the Schur stiffness), 'mass' (relative difference
        to the radial-quadrature mass) and 'rowSum' (largest |K 1|
        relative to |K|).
    """
    if elementIds is None:
        elementIds = range(mesh.nElements)
    rows = []
    for e in elementIds:
        coeffs = assembleElementCoeffs(mesh, e, material, gaussOrder)
        modal = eigenSplit(buildHamiltonian(coeffs))
        K = elementStiffness(modal)
        M = elementMass(modal, coeffs.M0)
        Ks = schurStiffnessOracle(coeffs)
        Mr = radialMassOracle(modal, coeffs.M0, nRadial)
        normK = np.linalg.norm(K)
        normM = np.linalg.norm(M)
        rows.append({
            "element": int(e),
            "nDofs": int(K.shape[0]),
            "stiffness": float(np.linalg.norm(K - Ks) / normK),
            "mass": float(np.linalg.norm(M - Mr) / normM) if normM > 0
            else 0.0,
            "rowSum": float(np.max(np.abs(K.sum(axis=1))) / normK)})
    return rows
