#!/usr/bin/env python3
# -*- coding: utf-8 -*-
"""
Created on Mon Sep 21 13:17:36 2026

Fixed-mesh iteration for steady free-surface (phreatic) seepage through
dams. Elements above the current surface have their conductivity
reduced, the downstream seepage face is updated from the computed heads
and reactions, and the surface is recovered as the zero of the pressure
head along vertical columns.

@author: PSBFEM developers
"""

# python modules
import logging
from dataclasses import dataclass, field, replace
import numpy as np
from scipy.interpolate import RegularGridInterpolator, LinearNDInterpolator
from scipy.spatial import Delaunay

# custom modules
from psbfem.errors import ConfigError, PsbfemError
from psbfem.mesh import scalingCentre
from psbfem.solver import (BoundarySpec, DirichletCondition, assembleGlobal,
                           computeElementOperators, solveSteady)


logger = logging.getLogger(__name__)

# listing all functions declared in this file so that sphinx-automodapi
# correctly documents them and doesn't document imported functions.
__all__ = ["FreeSurfaceConfig",
           "DamBoundaries",
           "PhiGrid",
           "FreeSurfaceState",
           "columnGrid",
           "classifyElements",
           "recoverSurface",
           "updateOverflowBoundary",
           "iterateFreeSurface",
           ]


@dataclass
class FreeSurfaceConfig:
    r"""
    Controls of the fixed-mesh iteration.

    epsilon : float
        Convergence tolerance on the surface elevation. None selects
        1e-4 times the dam height.

    maxIters : int
        Iteration limit. Default is 100.

    dryFactor : float
        Conductivity multiplier of dry elements, in (0, 1). Default is
        1e-3.

    relaxation : float
        Under-relaxation of the surface update, in (0, 1]. Default 0.5.

    seepageTol : float
        Head and reaction tolerance of the seepage-face update, relative
        to the dam height. Default is 1e-6.
    """
    epsilon: float = None
    maxIters: int = 100
    dryFactor: float = 1e-3
    relaxation: float = 0.5
    seepageTol: float = 1e-6

    def __post_init__(self):
        if self.epsilon is not None and not self.epsilon > 0:
            raise ConfigError("free_surface.epsilon must be positive")
        if not 0.0 < self.dryFactor < 1.0:
            raise ConfigError("free_surface.dry_factor must lie in (0, 1)")
        if not 0.0 < self.relaxation <= 1.0:
            raise ConfigError("free_surface.relaxation must lie in (0, 1]")
        if int(self.maxIters) < 1:
            raise ConfigError("free_surface.max_iters must be >= 1")


@dataclass
class DamBoundaries:
    """Reservoir levels and the node sets of the wetted dam faces."""
    upstreamSet: str
    upstreamHead: float
    downstreamSet: str
    downstreamHead: float


@dataclass
class PhiGrid:
    """Surface elevation on a structured grid of vertical columns."""
    xs: np.ndarray
    ys: np.ndarray
    values: np.ndarray

    def at(self, x, y):
        interp = RegularGridInterpolator((self.xs, self.ys), self.values,
                                         bounds_error=False, fill_value=None)
        return interp(np.column_stack([np.atleast_1d(x),
                                       np.atleast_1d(y)]))


@dataclass
class FreeSurfaceState:
    phi: PhiGrid
    overflowSet: np.ndarray
    wetFlags: np.ndarray
    iteration: int = 0
    exitElevation: float = np.nan
    converged: bool = False
    history: list = field(default_factory=list)
    oscillations: int = 0


def columnGrid(mesh, spacing=None):
    r"""
    Horizontal sample columns spanning the mesh footprint. The spacing
    defaults to the smallest distance between distinct nodal x (or y)
    coordinates, with at least two columns per direction.
    """
    lo = mesh.nodes.min(axis=0)
    hi = mesh.nodes.max(axis=0)
    axes = []
    for axis in (0, 1):
        coords = np.unique(np.round(mesh.nodes[:, axis], 12))
        step = spacing
        if step is None:
            gaps = np.diff(coords)
            step = gaps[gaps > 0].min() if np.any(gaps > 0) else 1.0
        count = max(2, int(np.ceil((hi[axis] - lo[axis]) / step - 1e-9)) + 1)
        axes.append(np.linspace(lo[axis], hi[axis], count))
    return axes[0], axes[1]


def classifyElements(mesh, phi, cfg, centroids=None):
    r"""
    Wet/dry flags and conductivity factors of every element. An element
    is wet when its centroid lies at or below the surface.

    Parameters
    ----------
    mesh : Mesh
        Analysis mesh.

    phi : PhiGrid
        Current surface.

    cfg : FreeSurfaceConfig
        Supplies the dry factor.

    centroids : numpy.ndarray
        (nE, 3) element centroids, computed when None.
    """
    if centroids is None:
        centroids = np.array([scalingCentre(mesh, e)
                              for e in range(mesh.nElements)])
    surface = phi.at(centroids[:, 0], centroids[:, 1])
    wet = centroids[:, 2] <= surface
    factors = np.where(wet, 1.0, cfg.dryFactor)
    return wet, factors


def recoverSurface(mesh, heads, xs, ys, triangulation=None, dz=None):
    r"""
    Elevation of the highest zero of the pressure head h - z along each
    column, by linear interpolation of nodal pressure heads.

    Returns
    -------
    numpy.ndarray
        (len(xs), len(ys)) surface elevations.
    """
    nodes = mesh.nodes
    if triangulation is None:
        triangulation = Delaunay(nodes)
    zlo, zhi = nodes[:, 2].min(), nodes[:, 2].max()
    if dz is None:
        zs = np.unique(np.round(nodes[:, 2], 12))
        gaps = np.diff(zs)
        dz = 0.5 * gaps[gaps > 0].min() if np.any(gaps > 0) else zhi - zlo
    levels = np.linspace(zlo, zhi, int(np.ceil((zhi - zlo) / dz)) + 1)
    interp = LinearNDInterpolator(triangulation, heads - nodes[:, 2])
    X, Y, Z = np.meshgrid(xs, ys, levels, indexing="ij")
    pressure = interp(np.column_stack([X.ravel(), Y.ravel(), Z.ravel()]))
    pressure = pressure.reshape(X.shape)

    surface = np.full((len(xs), len(ys)), zlo)
    for i in range(len(xs)):
        for j in range(len(ys)):
            p = pressure[i, j]
            valid = np.flatnonzero(np.isfinite(p))
            if valid.size == 0:
                continue
            p = p[valid]
            z = levels[valid]
            wet = np.flatnonzero(p >= 0.0)
            if wet.size == 0:
                surface[i, j] = z[0]
                continue
            top = wet[-1]
            if top == len(p) - 1:
                surface[i, j] = z[top]
            else:
                # zero crossing between top and top + 1
                t = p[top] / (p[top] - p[top + 1])
                surface[i, j] = z[top] + t * (z[top + 1] - z[top])
    return surface


def updateOverflowBoundary(state, mesh, heads, reactions, fixedNodes,
                           dam, tol):
    r"""
    Seepage-face update on the downstream face.

    Candidate nodes are the downstream-set nodes above the tailwater.
    On the first iteration the exit point is the upstream level. Later,
    seepage nodes taking water in (positive reaction) are released,
    free candidates with positive pressure head are added, and every
    candidate up to the highest remaining seepage node forms the new
    overflow set.

    Parameters
    ----------
    state : FreeSurfaceState
        Current state; its iteration index selects the initial rule.

    mesh : Mesh
        Analysis mesh.

    heads, reactions, fixedNodes : numpy.ndarray
        Last steady solution; reactions are net nodal inflows at the
        fixed nodes. Unused on the first iteration.

    dam : DamBoundaries
        Reservoir levels and dam face sets.

    tol : float
        Absolute head and reaction tolerance.

    Returns
    -------
    overflow : numpy.ndarray
        Sorted node indices with h = z.

    exitElevation : float
        Highest overflow node elevation, or the tailwater level.
    """
    if dam.downstreamSet not in mesh.nodeSets:
        raise ConfigError(f"unknown node set {dam.downstreamSet!r}")
    downstream = np.asarray(mesh.nodeSets[dam.downstreamSet], dtype=int)
    if downstream.size == 0:
        raise PsbfemError("empty downstream face, no seepage candidates")
    z = mesh.nodes[:, 2]
    candidates = downstream[z[downstream] > dam.downstreamHead + tol]

    if state.iteration == 0 or heads is None:
        exitElevation = dam.upstreamHead
    else:
        current = set(state.overflowSet.tolist())
        reaction = dict(zip(fixedNodes.tolist(), reactions))
        kept = [n for n in current if reaction.get(n, 0.0) <= tol]
        added = [n for n in candidates if n not in current
                 and heads[n] > z[n] + tol]
        active = kept + added
        exitElevation = max(z[active]) if active else dam.downstreamHead
    overflow = np.sort(candidates[z[candidates] <= exitElevation + tol])
    if overflow.size == 0:
        exitElevation = dam.downstreamHead
    return overflow, float(exitElevation)


def _damBoundarySpec(mesh, dam, overflow, base):
    """Boundary conditions of one iteration plus the node sets they use."""
    z = mesh.nodes[:, 2]
    for name in (dam.upstreamSet, dam.downstreamSet):
        if name not in mesh.nodeSets:
            raise ConfigError(f"unknown node set {name!r}")
    upstream = np.asarray(mesh.nodeSets[dam.upstreamSet], dtype=int)
    downstream = np.asarray(mesh.nodeSets[dam.downstreamSet], dtype=int)
    scale = np.ptp(z)
    sets = dict(mesh.nodeSets)
    sets["_reservoir"] = upstream[z[upstream] <= dam.upstreamHead
                                  + 1e-9 * scale].tolist()
    tail = downstream[z[downstream] <= dam.downstreamHead + 1e-9 * scale]
    sets["_tailwater"] = [n for n in tail.tolist()
                          if n not in set(sets["_reservoir"])]
    sets["_seepage"] = overflow.tolist()
    dirichlet = list(base.dirichlet)
    dirichlet.append(DirichletCondition("_reservoir", dam.upstreamHead))
    if sets["_tailwater"]:
        dirichlet.append(DirichletCondition("_tailwater", dam.downstreamHead))
    if overflow.size:
        dirichlet.append(DirichletCondition("_seepage", z[overflow]))
    bc = BoundarySpec(dirichlet, list(base.flux), list(base.monitors))
    return replace(mesh, nodeSets=sets), bc


def iterateFreeSurface(case, cfg=None, dam=None, operators=None):
    r"""
    Fixed-mesh free-surface iteration.

    Each iteration solves the steady problem with the current
    conductivity field and seepage face, recovers the surface, relaxes
    it, reclassifies the elements and updates the seepage face. The loop
    stops when the largest column change is below epsilon with an
    unchanged seepage face, or after maxIters iterations.

    Parameters
    ----------
    case : AnalysisCase
        Steady case; mesh, materials and extra boundary conditions.

    cfg : FreeSurfaceConfig
        Defaults to case.freeSurface.

    dam : DamBoundaries
        Defaults to case.dam.

    operators : list of ElementOperators
        Reused wet-element operators. Default is None.

    Returns
    -------
    result : FieldResult
        Steady solution of the last iteration.

    state : FreeSurfaceState
    """
    cfg = cfg or case.freeSurface
    dam = dam or case.dam
    mesh = case.mesh
    z = mesh.nodes[:, 2]
    height = np.ptp(z)
    epsilon = cfg.epsilon if cfg.epsilon is not None else 1e-4 * height
    tol = cfg.seepageTol * height
    if dam.downstreamHead > dam.upstreamHead:
        raise ConfigError("downstream head above upstream head")

    if operators is None:
        operators = computeElementOperators(mesh, case.materials,
                                            case.elementMaterials,
                                            workers=case.workers,
                                            gaussOrder=case.gaussOrder)
    centroids = np.array([op.coeffs.centre for op in operators])
    triangulation = Delaunay(mesh.nodes)
    xs, ys = columnGrid(mesh)
    phi = PhiGrid(xs, ys, np.full((len(xs), len(ys)), dam.upstreamHead))
    wet, factors = classifyElements(mesh, phi, cfg, centroids)
    state = FreeSurfaceState(phi, np.zeros(0, dtype=int), wet)
    state.overflowSet, state.exitElevation = updateOverflowBoundary(
        state, mesh, None, None, None, dam, tol)
    seen = [frozenset(state.overflowSet.tolist())]
    frozen = False

    result = None
    for iteration in range(1, int(cfg.maxIters) + 1):
        state.iteration = iteration
        iterMesh, bc = _damBoundarySpec(mesh, dam, state.overflowSet,
                                        case.boundary)
        system = assembleGlobal(iterMesh, operators=operators,
                                kFactors=factors)
        result = solveSteady(system, bc, case.solver)
        heads = result.finalHeads

        raw = recoverSurface(mesh, heads, xs, ys, triangulation)
        raw = np.clip(raw, dam.downstreamHead, dam.upstreamHead)
        new = phi.values + cfg.relaxation * (raw - phi.values)
        change = float(np.max(np.abs(new - phi.values)))
        phi = PhiGrid(xs, ys, new)
        wet, factors = classifyElements(mesh, phi, cfg, centroids)

        if frozen:
            overflow, exitElevation = state.overflowSet, state.exitElevation
        else:
            overflow, exitElevation = updateOverflowBoundary(
                state, mesh, heads, result.reactions, result.fixedNodes,
                dam, tol)
        unchanged = np.array_equal(overflow, state.overflowSet)
        key = frozenset(overflow.tolist())
        if not unchanged and key in seen[:-1]:
            # seepage face flip-flops between earlier sets
            state.oscillations += 1
            frozen = True
            overflow, exitElevation = state.overflowSet, state.exitElevation
            unchanged = True
            logger.debug("seepage face oscillation detected at iteration "
                         "%d, holding %d nodes", iteration, overflow.size)
        seen.append(key)

        state.phi = phi
        state.wetFlags = wet
        state.overflowSet = overflow
        state.exitElevation = exitElevation
        state.history.append((iteration, phi.values.copy(), change,
                              int(overflow.size), exitElevation))
        logger.debug("free surface iteration %d: max change %.3e, %d "
                     "seepage nodes, exit %.6g", iteration, change,
                     overflow.size, exitElevation)
        if change < epsilon and unchanged:
            state.converged = True
            break

    if state.converged:
        logger.info("free surface converged in %d iterations, exit "
                    "elevation %.6g", state.iteration, state.exitElevation)
    else:
        logger.warning("free surface not converged after %d iterations "
                       "(last change %.3e, %d seepage-face oscillations)",
                       state.iteration, change, state.oscillations)
    return result, state
