#!/usr/bin/env python3
# -*- coding: utf-8 -*-
"""
Created on Fri Sep 18 08:55:10 2026

Global sparse assembly of element operators, boundary conditions,
steady-state solution, and backward-difference transient stepping.
Also samples heads at monitor points and recovers element fluxes.

@author: PSBFEM developers
"""

# python modules
import time
import logging
import multiprocessing
from dataclasses import dataclass, field, replace
import numpy as np
import scipy.sparse as sparse
from scipy.sparse.linalg import spsolve, splu, cg, LinearOperator
from scipy.spatial import cKDTree

# custom modules
from psbfem.errors import ConfigError, SolverError, EvaluationDomainError
from psbfem.kernel import elementOperators, elementFlux, internalField
from psbfem.mesh import elementFaceLoops, elementNodes, scalingCentre
from psbfem.wachspress import (localPolygon, triangulateAndQuadrature,
                               wachspressBasis, edgeDistances,
                               polygonCentroid)


logger = logging.getLogger(__name__)

# listing all functions declared in this file so that sphinx-automodapi
# correctly documents them and doesn't document imported functions.
__all__ = ["TimeSeries",
           "DirichletCondition",
           "FluxCondition",
           "Monitor",
           "BoundarySpec",
           "GlobalSystem",
           "FieldResult",
           "geometrySignature",
           "computeElementOperators",
           "assembleGlobal",
           "dirichletValues",
           "fluxLoad",
           "solveReduced",
           "freeDofs",
           "solveSteady",
           "TransientStepper",
           "stepTransient",
           "runTransient",
           "sampleHeads",
           "elementFluxes",
           ]


TOL_RESIDUAL = 1e-10
TOL_MAX_PRINCIPLE = 1e-9


@dataclass
class TimeSeries:
    """
    Piecewise-linear table, held constant beyond its first and last
    rows.
    """
    times: np.ndarray
    values: np.ndarray

    def __post_init__(self):
        self.times = np.asarray(self.times, dtype=float)
        self.values = np.asarray(self.values, dtype=float)
        if self.times.shape != self.values.shape or self.times.size == 0:
            raise ConfigError("time series needs equally long, non-empty "
                              "times and values")
        if np.any(np.diff(self.times) <= 0):
            raise ConfigError("time series times must be increasing")

    def __call__(self, t):
        return float(np.interp(t, self.times, self.values))


@dataclass
class DirichletCondition:
    r"""
    Prescribed head on a node set. value is a float, a TimeSeries, or
    an array with one head per node of the set.
    """
    nodeSet: str
    value: object

    def at(self, t, count):
        if isinstance(self.value, TimeSeries):
            return np.full(count, self.value(t))
        values = np.asarray(self.value, dtype=float)
        if values.ndim == 0:
            return np.full(count, float(values))
        if values.shape != (count,):
            raise ConfigError(f"Dirichlet set {self.nodeSet!r} has {count} "
                              f"nodes but {values.size} values")
        return values


@dataclass
class FluxCondition:
    """Normal inflow per unit area (positive into the domain)."""
    faceSet: str
    value: object

    def at(self, t):
        if isinstance(self.value, TimeSeries):
            return self.value(t)
        return float(self.value)


@dataclass
class Monitor:
    label: str
    point: np.ndarray


@dataclass
class BoundarySpec:
    dirichlet: list = field(default_factory=list)
    flux: list = field(default_factory=list)
    monitors: list = field(default_factory=list)


@dataclass
class GlobalSystem:
    r"""
    Assembled conductance K and storage M over all mesh nodes, with the
    element operators they came from.
    """
    mesh: object
    K: sparse.csr_matrix
    M: sparse.csr_matrix
    operators: list
    kFactors: np.ndarray = None

    @property
    def nDofs(self):
        return self.K.shape[0]


@dataclass
class FieldResult:
    r"""
    Nodal heads per output time, element-centroid Darcy fluxes, monitor
    histories and solve diagnostics.
    """
    times: np.ndarray
    heads: np.ndarray
    fluxes: np.ndarray
    monitorLabels: list
    monitors: np.ndarray
    reactions: np.ndarray = None
    fixedNodes: np.ndarray = None
    residual: float = np.nan
    maxPrincipleOk: bool = True
    timings: dict = field(default_factory=dict)

    @property
    def finalHeads(self):
        return self.heads[-1]


#%% element operators

def geometrySignature(mesh, elementId, materialName):
    r"""
    Hashable key identifying elements whose operators are identical:
    scaling-centre-relative node coordinates rounded to 1e-12 of the
    element diameter, local face loops, and the material.
    """
    dofMap = elementNodes(mesh, elementId)
    local = {int(g): i for i, g in enumerate(dofMap)}
    loops = tuple(tuple(local[int(g)] for g in loop)
                  for _, loop in elementFaceLoops(mesh, elementId))
    coords = mesh.nodes[dofMap]
    centre = coords.mean(axis=0)
    diameter = np.max(np.ptp(coords, axis=0))
    scaled = np.round((coords - centre) / (1e-12 * diameter)).astype(np.int64)
    return (materialName, f"{diameter:.12e}", loops, scaled.tobytes())


def _relocate(template, mesh, elementId):
    """Operators of a congruent element, carried to another element."""
    dofMap = elementNodes(mesh, elementId)
    centre = scalingCentre(mesh, elementId)
    faces = []
    for ctx, (faceId, loop) in zip(template.coeffs.faces,
                                   elementFaceLoops(mesh, elementId)):
        coords = mesh.nodes[loop]
        faces.append(replace(ctx, faceId=faceId, coords=coords,
                             poly=replace(ctx.poly, origin=coords[0])))
    coeffs = replace(template.coeffs, dofMap=dofMap, centre=centre,
                     elementId=elementId, faces=faces)
    return replace(template, dofMap=dofMap, coeffs=coeffs)


# mesh shared with pool workers
_workerMesh = None


def _initWorker(mesh):
    global _workerMesh
    _workerMesh = mesh


def _operatorsWorker(args):
    elementId, material, gaussOrder = args
    return elementOperators(_workerMesh, elementId, material, gaussOrder)


def computeElementOperators(mesh, materials, elementMaterials, workers=1,
                            gaussOrder=3, cache=True):
    r"""
    Element stiffness and mass matrices of every element.

    Parameters
    ----------
    mesh : Mesh
        Validated mesh.

    materials : dict
        Material name -> Material.

    elementMaterials : sequence of str
        Material name of each element.

    workers : int
        Worker processes. Default is 1 (serial).

    gaussOrder : int
        Face quadrature points per sub-triangle. Default is 3.

    cache : bool
        Share one decomposition between congruent elements. Default is
        True.

    Returns
    -------
    list of ElementOperators
        In element order.
    """
    start = time.perf_counter()
    if isinstance(elementMaterials, str):
        elementMaterials = [elementMaterials] * mesh.nElements
    if len(elementMaterials) != mesh.nElements:
        raise ConfigError(f"{len(elementMaterials)} element materials for "
                          f"{mesh.nElements} elements")
    for name in set(elementMaterials):
        if name not in materials:
            raise ConfigError(f"unknown material {name!r}")

    # unique representatives
    representative = {}
    owners = []
    for elementId, name in enumerate(elementMaterials):
        key = geometrySignature(mesh, elementId, name) if cache else elementId
        representative.setdefault(key, elementId)
        owners.append(representative[key])
    unique = sorted(set(owners))
    tasks = [(e, materials[elementMaterials[e]], gaussOrder) for e in unique]

    if workers > 1 and len(tasks) > 1:
        with multiprocessing.Pool(workers, initializer=_initWorker,
                                  initargs=(mesh,)) as pool:
            computed = pool.map(_operatorsWorker, tasks)
    else:
        computed = [elementOperators(mesh, e, m, g) for e, m, g in tasks]
    byId = dict(zip(unique, computed))

    operators = []
    for elementId, owner in enumerate(owners):
        if owner == elementId:
            operators.append(byId[owner])
        else:
            operators.append(_relocate(byId[owner], mesh, elementId))
    logger.info("element operators: %d elements, %d decompositions, "
                "%.2f s", mesh.nElements, len(unique),
                time.perf_counter() - start)
    return operators


#%% assembly

def assembleGlobal(mesh, materials=None, elementMaterials=None,
                   operators=None, kFactors=None, workers=1, gaussOrder=3):
    r"""
    Scatter-add element operators into sparse global K and M.

    Parameters
    ----------
    mesh : Mesh
        Validated mesh.

    materials, elementMaterials :
        As for computeElementOperators(). Ignored when operators is
        given.

    operators : list of ElementOperators
        Precomputed operators to reuse. Default is None.

    kFactors : numpy.ndarray
        Per-element multiplier of the conductance, used for dry
        elements. Default is None (all ones).

    Returns
    -------
    GlobalSystem
    """
    if operators is None:
        operators = computeElementOperators(mesh, materials, elementMaterials,
                                            workers=workers,
                                            gaussOrder=gaussOrder)
    if len(operators) != mesh.nElements:
        raise SolverError(f"{len(operators)} element operators for "
                          f"{mesh.nElements} elements")
    if kFactors is None:
        kFactors = np.ones(mesh.nElements)
    nDofs = mesh.nNodes
    rows, cols, kData, mData = [], [], [], []
    for op, factor in zip(operators, kFactors):
        dofs = op.dofMap
        if len(dofs) != op.K.shape[0] or np.any(dofs >= nDofs):
            raise SolverError(f"inconsistent dof map of element "
                              f"{op.coeffs.elementId}")
        r, c = np.meshgrid(dofs, dofs, indexing="ij")
        rows.append(r.ravel())
        cols.append(c.ravel())
        kData.append(factor * op.K.ravel())
        mData.append(op.M.ravel())
    rows = np.concatenate(rows)
    cols = np.concatenate(cols)
    K = sparse.coo_matrix((np.concatenate(kData), (rows, cols)),
                          shape=(nDofs, nDofs)).tocsr()
    M = sparse.coo_matrix((np.concatenate(mData), (rows, cols)),
                          shape=(nDofs, nDofs)).tocsr()
    return GlobalSystem(mesh, K, M, operators, np.asarray(kFactors))


#%% boundary conditions

def dirichletValues(mesh, bc, t=0.0):
    """
    Fixed node indices and their heads at time t. Overlapping sets must
    agree on shared nodes.
    """
    values = {}
    for cond in bc.dirichlet:
        if cond.nodeSet not in mesh.nodeSets:
            raise ConfigError(f"unknown node set {cond.nodeSet!r}")
        ids = mesh.nodeSets[cond.nodeSet]
        heads = cond.at(t, len(ids))
        for node, head in zip(ids, heads):
            if node in values and abs(values[node] - head) > 1e-12 * \
                    max(1.0, abs(head)):
                raise ConfigError(f"node {node} is fixed to {values[node]} "
                                  f"and {head} by overlapping Dirichlet "
                                  f"sets")
            values[node] = head
    fixed = np.array(sorted(values), dtype=int)
    return fixed, np.array([values[n] for n in fixed], dtype=float)


def fluxLoad(mesh, bc, t=0.0, gaussOrder=3):
    r"""
    Nodal inflow vector of the face-set flux conditions, integrated
    with the face Wachspress basis.
    """
    f = np.zeros(mesh.nNodes)
    for cond in bc.flux:
        if cond.faceSet not in mesh.faceSets:
            raise ConfigError(f"unknown face set {cond.faceSet!r}")
        value = cond.at(t)
        for faceId in mesh.faceSets[cond.faceSet]:
            loop = np.asarray(mesh.faces[faceId].nodeIds)
            poly = localPolygon(mesh.nodes[loop])
            rule = triangulateAndQuadrature(poly, gaussOrder)
            N, _ = wachspressBasis(poly, rule.points)
            np.add.at(f, loop, value * (rule.weights @ N))
    return f


#%% solves

def solveReduced(A, b, method):
    r"""
    Solve the reduced system A x = b of the free degrees of freedom.

    Parameters
    ----------
    A : scipy.sparse matrix
        Symmetric positive definite reduced matrix.

    b : numpy.ndarray
        Right-hand side.

    method : str
        'direct' (sparse LU) or 'cg' (Jacobi-preconditioned conjugate
        gradients).
    """
    if method == "direct":
        x = spsolve(A.tocsc(), b)
        if not np.all(np.isfinite(x)):
            raise SolverError("direct solve failed (singular system)")
        return x
    if method == "cg":
        diag = A.diagonal()
        if np.any(diag <= 0):
            raise SolverError("non-positive diagonal, CG needs an SPD "
                              "system")
        precond = LinearOperator(A.shape, matvec=lambda v: v / diag)
        # recursive residual; solveSteady checks the true one
        x, info = cg(A, b, rtol=0.1 * TOL_RESIDUAL, M=precond,
                     maxiter=10 * A.shape[0])
        if info != 0:
            raise SolverError(f"CG did not converge (info = {info})")
        return x
    raise ConfigError(f"unknown linear solver {method!r}")


def freeDofs(nDofs, fixed):
    """Sorted indices of the degrees of freedom not in fixed."""
    free = np.ones(nDofs, dtype=bool)
    free[fixed] = False
    return np.flatnonzero(free)


def solveSteady(system, bc, method="direct", t=0.0):
    r"""
    Steady heads with Dirichlet nodes eliminated by partitioning.

    Parameters
    ----------
    system : GlobalSystem
        Assembled system.

    bc : BoundarySpec
        Boundary conditions; at least one Dirichlet node is required.

    method : str
        'direct' (sparse LU) or 'cg' (Jacobi-preconditioned conjugate
        gradients). Default is 'direct'.

    t : float
        Time at which time-series values are evaluated. Default is 0.

    Returns
    -------
    FieldResult
        One output time.
    """
    start = time.perf_counter()
    mesh = system.mesh
    fixed, values = dirichletValues(mesh, bc, t)
    if fixed.size == 0:
        raise SolverError("no Dirichlet constraint; the constant head mode "
                          "makes the system singular")
    f = fluxLoad(mesh, bc, t)
    free = freeDofs(system.nDofs, fixed)
    h = np.zeros(system.nDofs)
    h[fixed] = values
    K = system.K
    if free.size:
        Kff = K[free][:, free]
        rhs = f[free] - K[free][:, fixed] @ values
        h[free] = solveReduced(Kff, rhs, method)
    residualVec = K @ h - f
    scale = np.linalg.norm(f) + np.linalg.norm(K[:, fixed] @ values)
    residual = np.linalg.norm(residualVec[free]) / scale if scale > 0 else 0.0
    if not residual <= TOL_RESIDUAL:
        raise SolverError(f"solver breakdown: relative residual "
                          f"{residual:.3e} above {TOL_RESIDUAL:.0e}")
    reactions = residualVec[fixed]
    ok = _checkMaxPrinciple(h, free, values, bc)
    elapsed = time.perf_counter() - start
    logger.info("steady solve: %d dofs (%d fixed), residual %.2e, %.2f s",
                system.nDofs, fixed.size, residual, elapsed)
    return _fieldResult(system, bc, [t], h[None, :], reactions, fixed,
                        residual, ok, {"solve": elapsed})


def _checkMaxPrinciple(h, free, values, bc):
    """Free heads within the Dirichlet range for source-free problems."""
    if bc.flux or free.size == 0:
        return True
    lo, hi = values.min(), values.max()
    slack = TOL_MAX_PRINCIPLE * max(1.0, abs(lo), abs(hi))
    ok = bool(np.all(h[free] >= lo - slack) and np.all(h[free] <= hi + slack))
    if not ok:
        logger.warning("maximum principle violated: heads in [%.6g, %.6g], "
                       "Dirichlet range [%.6g, %.6g]", h[free].min(),
                       h[free].max(), lo, hi)
    return ok


def _fieldResult(system, bc, times, heads, reactions, fixed, residual, ok,
                 timings):
    labels = [m.label for m in bc.monitors]
    points = np.array([m.point for m in bc.monitors], dtype=float)
    monitors = np.zeros((len(times), len(labels)))
    fluxes = np.zeros((len(times), system.mesh.nElements, 3))
    for i, h in enumerate(heads):
        if labels:
            monitors[i] = sampleHeads(system.mesh, system.operators, h,
                                      points)
        fluxes[i] = elementFluxes(system, h)
    return FieldResult(np.asarray(times, dtype=float), np.asarray(heads),
                       fluxes, labels, monitors, reactions, fixed, residual,
                       ok, timings)


class TransientStepper:
    r"""
    Backward-difference stepping of (K + M/dt) h_next = Q + (M/dt) h.
    Factorisations of the reduced effective matrix are kept per fixed
    node set, so steps with unchanged constraints reuse them.
    """

    def __init__(self, system, dt, method="direct"):
        if not dt > 0:
            raise ConfigError(f"time step must be positive, got {dt}")
        self.system = system
        self.dt = dt
        self.method = method
        self.A = (system.K + system.M / dt).tocsr()
        self.Mdt = (system.M / dt).tocsr()
        self._factors = {}

    def _factor(self, free):
        key = free.tobytes()
        if key not in self._factors:
            Aff = self.A[free][:, free].tocsc()
            try:
                self._factors[key] = splu(Aff)
            except RuntimeError as err:
                raise SolverError(f"singular effective matrix: {err}") \
                    from err
        return self._factors[key]

    def step(self, bc, hPrev, tNext):
        """Heads at tNext from heads hPrev one step earlier."""
        mesh = self.system.mesh
        hPrev = np.asarray(hPrev, dtype=float)
        if hPrev.shape != (self.system.nDofs,):
            raise SolverError(f"previous heads have shape {hPrev.shape}, "
                              f"expected ({self.system.nDofs},)")
        fixed, values = dirichletValues(mesh, bc, tNext)
        free = freeDofs(self.system.nDofs, fixed)
        rhs = fluxLoad(mesh, bc, tNext) + self.Mdt @ hPrev
        h = np.zeros_like(hPrev)
        h[fixed] = values
        if free.size:
            b = rhs[free] - self.A[free][:, fixed] @ values
            if self.method == "direct":
                h[free] = self._factor(free).solve(b)
            else:
                h[free] = solveReduced(self.A[free][:, free], b,
                                       self.method)
        if not np.all(np.isfinite(h)):
            raise SolverError("transient step produced non-finite heads")
        return h


def stepTransient(system, bcNext, hPrev, dt, tNext=0.0, method="direct"):
    r"""
    One implicit Euler step.

    Parameters
    ----------
    system : GlobalSystem
        Assembled K and M.

    bcNext : BoundarySpec
        Conditions, evaluated at tNext.

    hPrev : numpy.ndarray
        Heads at tNext - dt.

    dt : float
        Time step, > 0.
    """
    return TransientStepper(system, dt, method).step(bcNext, hPrev, tNext)


def runTransient(case, system=None):
    r"""
    March a transient case from its initial state.

    Parameters
    ----------
    case : AnalysisCase
        Case with a time configuration.

    system : GlobalSystem
        Assembled system to reuse. Default is None (assemble).

    Returns
    -------
    FieldResult
        Heads at t0 and every output-stride step.
    """
    start = time.perf_counter()
    tc = case.time
    if system is None:
        system = assembleGlobal(case.mesh, case.materials,
                                case.elementMaterials, workers=case.workers)
    bc = case.boundary
    t = tc.t0
    if tc.initial == "steady":
        h = solveSteady(system, bc, case.solver, t).finalHeads
    else:
        h = np.full(system.nDofs, float(tc.initial))
        fixed, values = dirichletValues(case.mesh, bc, t)
        h[fixed] = values
    stepper = TransientStepper(system, tc.dt, case.solver)
    times = [t]
    heads = [h.copy()]
    for n in range(1, tc.nSteps + 1):
        t = tc.t0 + n * tc.dt
        hPrev = h
        h = stepper.step(bc, h, t)
        if n % tc.outputStride == 0 or n == tc.nSteps:
            times.append(t)
            heads.append(h.copy())
    elapsed = time.perf_counter() - start
    logger.info("transient run: %d steps of %g, %.2f s", tc.nSteps, tc.dt,
                elapsed)
    fixed, values = dirichletValues(case.mesh, bc, t)
    reactions = None
    if tc.nSteps > 0:
        reactions = (system.K @ h + system.M @ (h - hPrev) / tc.dt
                     - fluxLoad(case.mesh, bc, t))[fixed]
    return _fieldResult(system, bc, times, np.array(heads), reactions, fixed,
                        np.nan, True, {"transient": elapsed})


#%% post-processing

def _locate(op, point, tol):
    """
    Scaled boundary coordinates (xi, eta, zeta) and face of a point in
    an element, or None if the point is outside.
    """
    coeffs = op.coeffs
    centre = coeffs.centre
    d = point - centre
    for face in coeffs.faces:
        n = face.poly.normal
        height = np.dot(face.coords[0] - centre, n)
        xi = np.dot(d, n) / height
        if xi <= 0.0:
            continue
        onFace = centre + d / xi
        local = (onFace - face.poly.origin) @ face.poly.axes.T
        diameter = np.max(np.ptp(face.poly.vertices, axis=0))
        if np.all(edgeDistances(face.poly, local)[0] >= -tol * diameter):
            if xi > 1.0 + tol:
                return None
            return max(min(xi, 1.0), 1e-12), local, face
    if np.linalg.norm(d) <= tol * np.max(np.ptp(coeffs.faces[0].coords,
                                                axis=0)):
        face = coeffs.faces[0]
        return 1e-12, polygonCentroid(face.poly.vertices), face
    return None


def sampleHeads(mesh, operators, heads, points, tol=1e-9, candidates=8):
    r"""
    Heads at arbitrary points from the internal field of the containing
    element.

    Parameters
    ----------
    mesh : Mesh
        Mesh of the solution.

    operators : list of ElementOperators
        Element operators, including modal bases.

    heads : numpy.ndarray
        Nodal heads.

    points : numpy.ndarray
        (m, 3) sample points.

    tol : float
        Relative containment tolerance. Default is 1e-9.

    candidates : int
        Nearest element centroids searched per point. Default is 8.
    """
    points = np.atleast_2d(np.asarray(points, dtype=float))
    centres = np.array([op.coeffs.centre for op in operators])
    tree = cKDTree(centres)
    k = min(candidates, len(operators))
    _, nearest = tree.query(points, k=k)
    nearest = np.atleast_2d(nearest).reshape(len(points), k)
    values = np.empty(len(points))
    for i, point in enumerate(points):
        for e in nearest[i]:
            op = operators[e]
            found = _locate(op, point, tol)
            if found is None:
                continue
            xi, local, face = found
            try:
                values[i] = internalField(op.modalBasis,
                                          heads[op.dofMap],
                                          (xi, local[0], local[1]), face)
                break
            except EvaluationDomainError:
                continue
        else:
            op = operators[nearest[i][0]]
            nodes = mesh.nodes[op.dofMap]
            dist = np.linalg.norm(nodes - point, axis=1)
            if np.any(dist == 0.0):
                values[i] = heads[op.dofMap][np.argmin(dist)]
            else:
                weights = 1.0 / dist
                values[i] = weights @ heads[op.dofMap] / np.sum(weights)
            logger.warning("point %s not located in any element, using "
                           "inverse-distance interpolation", point.tolist())
    return values


def elementFluxes(system, heads):
    """Volume-averaged Darcy flux (nE, 3) of every element."""
    fluxes = np.zeros((len(system.operators), 3))
    for e, op in enumerate(system.operators):
        factor = 1.0 if system.kFactors is None else system.kFactors[e]
        fluxes[e] = factor * elementFlux(op, heads[op.dofMap])
    return fluxes
