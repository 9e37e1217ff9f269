#!/usr/bin/env python3
# -*- coding: utf-8 -*-
"""
Created on Wed Sep 16 14:25:03 2026

Wachspress shape functions and gradients on planar convex polygons,
in-plane frames for mesh faces, and centroid-fan Gaussian quadrature.

@author: PSBFEM developers
"""

# python modules
import logging
from dataclasses import dataclass
import numpy as np

# custom modules
from psbfem.errors import EvaluationDomainError, QuadratureError


logger = logging.getLogger(__name__)

# listing all functions declared in this file so that sphinx-automodapi
# correctly documents them and doesn't document imported functions.
__all__ = ["LocalPolygon",
           "QuadratureRule",
           "BasisEval",
           "localPolygon",
           "polygonArea",
           "polygonCentroid",
           "edgeDistances",
           "wachspressBasis",
           "wachspressEval",
           "wachspressValues",
           "wachspressGradCheck",
           "triangleRule",
           "triangulateAndQuadrature",
           "TRIANGLE_RULES",
           "RULE_DEGREE",
           ]


@dataclass
class LocalPolygon:
    r"""
    Convex polygon in its own 2D coordinates (eta, zeta).

    vertices : numpy.ndarray
        (n, 2) counter-clockwise vertices.

    origin, axes, normal : numpy.ndarray
        In-plane frame in global coordinates, when the polygon comes
        from a mesh face. axes is (2, 3). None for reference polygons.
    """
    vertices: np.ndarray
    origin: np.ndarray = None
    axes: np.ndarray = None
    normal: np.ndarray = None

    @property
    def nVertices(self):
        return len(self.vertices)

    def toGlobal(self, points):
        """Map in-plane points (m, 2) to global coordinates (m, 3)."""
        return self.origin + np.asarray(points) @ self.axes


@dataclass
class QuadratureRule:
    points: np.ndarray
    weights: np.ndarray


@dataclass
class BasisEval:
    N: np.ndarray
    dNdEta: np.ndarray
    dNdZeta: np.ndarray


# symmetric triangle rules as (barycentric points, weights summing to 1)
_A6, _B6 = 0.445948490915965, 0.091576213509771
_W6A, _W6B = 0.223381589678011, 0.109951743655322
_A12, _B12 = 0.249286745170910, 0.063089014491502
_C12, _D12 = 0.310352451033784, 0.636502499121399
TRIANGLE_RULES = {
    1: ([(1/3, 1/3, 1/3)], [1.0]),
    3: ([(2/3, 1/6, 1/6), (1/6, 2/3, 1/6), (1/6, 1/6, 2/3)],
        [1/3, 1/3, 1/3]),
    6: ([(1 - 2*_A6, _A6, _A6), (_A6, 1 - 2*_A6, _A6), (_A6, _A6, 1 - 2*_A6),
         (1 - 2*_B6, _B6, _B6), (_B6, 1 - 2*_B6, _B6), (_B6, _B6, 1 - 2*_B6)],
        [_W6A] * 3 + [_W6B] * 3),
    12: ([(1 - 2*_A12, _A12, _A12), (_A12, 1 - 2*_A12, _A12),
          (_A12, _A12, 1 - 2*_A12),
          (1 - 2*_B12, _B12, _B12), (_B12, 1 - 2*_B12, _B12),
          (_B12, _B12, 1 - 2*_B12),
          (_C12, _D12, 1 - _C12 - _D12), (_D12, _C12, 1 - _C12 - _D12),
          (_C12, 1 - _C12 - _D12, _D12), (_D12, 1 - _C12 - _D12, _C12),
          (1 - _C12 - _D12, _C12, _D12), (1 - _C12 - _D12, _D12, _C12)],
         [0.116786275726379] * 3 + [0.050844906370207] * 3
         + [0.082851075618374] * 6),
    }

# polynomial degree integrated exactly by each rule
RULE_DEGREE = {1: 1, 3: 2, 6: 4, 12: 6}


def localPolygon(points):
    r"""
    Build the in-plane frame of a planar 3D polygon: first axis along
    the first edge, normal from Newell's method, second axis equal to
    normal x first axis.

    Parameters
    ----------
    points : numpy.ndarray
        (n, 3) ordered vertices.

    Returns
    -------
    LocalPolygon
        Counter-clockwise polygon in the frame coordinates.
    """
    points = np.asarray(points, dtype=float)
    nxt = np.roll(points, -1, axis=0)
    areaVec = np.sum(np.cross(points, nxt), axis=0)
    normal = areaVec / np.linalg.norm(areaVec)
    e1 = points[1] - points[0]
    e1 = e1 - np.dot(e1, normal) * normal
    e1 /= np.linalg.norm(e1)
    e2 = np.cross(normal, e1)
    axes = np.vstack([e1, e2])
    origin = points[0]
    vertices = (points - origin) @ axes.T
    return LocalPolygon(vertices, origin, axes, normal)


def polygonArea(vertices):
    """Signed area of a 2D polygon (positive if counter-clockwise)."""
    v = np.asarray(vertices)
    w = np.roll(v, -1, axis=0)
    return 0.5 * np.sum(v[:, 0] * w[:, 1] - w[:, 0] * v[:, 1])


def polygonCentroid(vertices):
    """Area centroid of a 2D polygon."""
    v = np.asarray(vertices)
    w = np.roll(v, -1, axis=0)
    cross = v[:, 0] * w[:, 1] - w[:, 0] * v[:, 1]
    area = 0.5 * np.sum(cross)
    return np.sum((v + w) * cross[:, None], axis=0) / (6.0 * area)


def _edgeData(vertices):
    """Outward unit normals and lengths of the edges v_i -> v_i+1."""
    edges = np.roll(vertices, -1, axis=0) - vertices
    lengths = np.linalg.norm(edges, axis=1)
    normals = np.column_stack([edges[:, 1], -edges[:, 0]]) / lengths[:, None]
    return normals, lengths


def edgeDistances(poly, points):
    """
    Signed distances (m, n) from points to the polygon's edge lines,
    positive on the inner side.
    """
    vertices = np.asarray(poly.vertices, dtype=float)
    points = np.atleast_2d(np.asarray(points, dtype=float))
    normals, _ = _edgeData(vertices)
    return np.einsum('mnk,nk->mn', vertices[None, :, :] - points[:, None, :],
                     normals)


def wachspressBasis(poly, points):
    r"""
    Wachspress shape functions and gradients at interior points.

    Parameters
    ----------
    poly : LocalPolygon
        Convex, counter-clockwise polygon.

    points : numpy.ndarray
        (m, 2) points strictly inside the polygon.

    Returns
    -------
    N : numpy.ndarray
        (m, n) shape function values.

    dN : numpy.ndarray
        (m, n, 2) gradients with respect to (eta, zeta).
    """
    vertices = np.asarray(poly.vertices, dtype=float)
    points = np.atleast_2d(np.asarray(points, dtype=float))
    normals, _ = _edgeData(vertices)
    diameter = np.max(np.ptp(vertices, axis=0))
    h = edgeDistances(poly, points)
    if np.any(h <= 1e-12 * diameter):
        bad = np.flatnonzero(np.any(h <= 1e-12 * diameter, axis=1))[0]
        raise EvaluationDomainError(f"point {points[bad].tolist()} is on "
                                    f"or outside the polygon boundary")
    # scaled normals p_e = n_e / h_e
    p = normals[None, :, :] / h[:, :, None]
    pPrev = np.roll(p, 1, axis=1)
    # vertex i sits between edges i-1 and i
    w = pPrev[:, :, 0] * p[:, :, 1] - pPrev[:, :, 1] * p[:, :, 0]
    N = w / np.sum(w, axis=1, keepdims=True)
    R = pPrev + p
    meanR = np.einsum('mn,mnk->mk', N, R)
    dN = N[:, :, None] * (R - meanR[:, None, :])
    return N, dN


def wachspressEval(poly, p):
    r"""
    Wachspress shape functions at a single interior point.

    Parameters
    ----------
    poly : LocalPolygon
        Convex, counter-clockwise polygon.

    p : array_like
        Point (eta, zeta) strictly inside the polygon.

    Returns
    -------
    BasisEval
    """
    N, dN = wachspressBasis(poly, np.asarray(p, dtype=float)[None, :])
    return BasisEval(N[0], dN[0, :, 0], dN[0, :, 1])


def wachspressValues(poly, points, tol=1e-9):
    r"""
    Shape function values on the closed polygon. Points within
    tol * diameter of an edge line use linear interpolation along that
    edge (the boundary limit of the basis); points further outside
    raise EvaluationDomainError.
    """
    vertices = np.asarray(poly.vertices, dtype=float)
    points = np.atleast_2d(np.asarray(points, dtype=float))
    n = len(vertices)
    _, lengths = _edgeData(vertices)
    diameter = np.max(np.ptp(vertices, axis=0))
    h = edgeDistances(poly, points)
    if np.any(h < -tol * diameter):
        bad = np.flatnonzero(np.any(h < -tol * diameter, axis=1))[0]
        raise EvaluationDomainError(f"point {points[bad].tolist()} is "
                                    f"outside the polygon")
    onEdge = h <= tol * diameter
    values = np.zeros((len(points), n))
    interior = ~np.any(onEdge, axis=1)
    if np.any(interior):
        values[interior] = wachspressBasis(poly, points[interior])[0]
    for m in np.flatnonzero(~interior):
        edge = int(np.argmin(h[m]))
        a = vertices[edge]
        b = vertices[(edge + 1) % n]
        t = np.dot(points[m] - a, b - a) / lengths[edge] ** 2
        t = min(max(t, 0.0), 1.0)
        values[m, edge] += 1.0 - t
        values[m, (edge + 1) % n] += t
    return values


def wachspressGradCheck(poly, p, step=1e-6):
    r"""
    Largest discrepancy between the analytic Wachspress gradients and
    central finite differences of the shape functions at p.

    Parameters
    ----------
    poly : LocalPolygon
        Convex polygon.

    p : array_like
        Interior point with margin larger than step.

    step : float
        Finite-difference step. Default is 1e-6.
    """
    p = np.asarray(p, dtype=float)
    analytic = wachspressEval(poly, p)
    stencil = np.array([p + [step, 0], p - [step, 0],
                        p + [0, step], p - [0, step]])
    N, _ = wachspressBasis(poly, stencil)
    fdEta = (N[0] - N[1]) / (2 * step)
    fdZeta = (N[2] - N[3]) / (2 * step)
    return max(np.max(np.abs(analytic.dNdEta - fdEta)),
               np.max(np.abs(analytic.dNdZeta - fdZeta)))


def triangleRule(gaussOrder):
    """Barycentric points (m, 3) and weights (m,) summing to one."""
    if gaussOrder not in TRIANGLE_RULES:
        raise QuadratureError(f"unsupported triangle rule with "
                              f"{gaussOrder} points; choose one of "
                              f"{sorted(TRIANGLE_RULES)}")
    bary, weights = TRIANGLE_RULES[gaussOrder]
    weights = np.asarray(weights)
    return np.asarray(bary), weights / np.sum(weights)


def triangulateAndQuadrature(poly, gaussOrder=3):
    r"""
    Quadrature rule on a convex polygon from sub-triangles joining each
    edge to the polygon centroid.

    Parameters
    ----------
    poly : LocalPolygon
        Convex, counter-clockwise polygon.

    gaussOrder : int
        Points per triangle, one of 1, 3, 6 or 12. Default is 3.

    Returns
    -------
    QuadratureRule
        Points in (eta, zeta) and weights summing to the polygon area.
    """
    bary, weights = triangleRule(gaussOrder)
    vertices = np.asarray(poly.vertices, dtype=float)
    centroid = polygonCentroid(vertices)
    nxt = np.roll(vertices, -1, axis=0)
    # one (apex, v_i, v_i+1) triangle per edge
    corners = np.stack([np.broadcast_to(centroid, vertices.shape),
                        vertices, nxt], axis=1)
    areas = 0.5 * ((vertices[:, 0] - centroid[0]) * (nxt[:, 1] - centroid[1])
                   - (nxt[:, 0] - centroid[0]) * (vertices[:, 1] - centroid[1]))
    if np.any(areas <= 0.0):
        raise QuadratureError("polygon is not convex and counter-clockwise")
    points = np.einsum('qk,tkd->tqd', bary, corners).reshape(-1, 2)
    pointWeights = (areas[:, None] * weights[None, :]).ravel()
    return QuadratureRule(points, pointWeights)
