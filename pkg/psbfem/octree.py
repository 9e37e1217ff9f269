#!/usr/bin/env python3
# -*- coding: utf-8 -*-
"""
Created on Tue Sep 15 09:12:47 2026

Box octree refiner producing conforming polyhedral meshes. Coarse cells
next to finer ones carry the finer cells' faces; square faces with hanging
vertices on their edges are fanned into triangles about a node added at
the face centre.

@author: PSBFEM developers
"""

# python modules
import logging
from dataclasses import dataclass
import numpy as np

# custom modules
from psbfem.mesh import HEX_FACES, meshFromCells, boxSideSets


logger = logging.getLogger(__name__)

# listing all functions declared in this file so that sphinx-automodapi
# correctly documents them and doesn't document imported functions.
__all__ = ["OctreeCell",
           "octreeLeaves",
           "octreeRefineBox",
           ]


# local face index of the side (axis, direction)
_SIDE_FACE = {(2, -1): 0, (2, 1): 1, (1, -1): 2,
              (0, 1): 3, (1, 1): 4, (0, -1): 5}


@dataclass(frozen=True)
class OctreeCell:
    """
    Leaf cell of the octree in integer lattice units of the finest
    level. `lo` is the lower corner, `size` the edge length in units.
    """
    lo: tuple
    size: int
    level: int

    @property
    def hi(self):
        return tuple(c + self.size for c in self.lo)

    def overlaps(self, boxLo, boxHi):
        """Positive-volume overlap with a box given in lattice units."""
        return all(self.lo[a] < boxHi[a] and self.hi[a] > boxLo[a]
                   for a in range(3))

    def children(self):
        half = self.size // 2
        return [OctreeCell((self.lo[0] + i * half,
                            self.lo[1] + j * half,
                            self.lo[2] + k * half), half, self.level + 1)
                for i in (0, 1) for j in (0, 1) for k in (0, 1)]


def _corners(lo, hi):
    """Hexahedron corner lattice points in HEX_FACES order."""
    (x0, y0, z0), (x1, y1, z1) = lo, hi
    return [(x0, y0, z0), (x1, y0, z0), (x1, y1, z0), (x0, y1, z0),
            (x0, y0, z1), (x1, y0, z1), (x1, y1, z1), (x0, y1, z1)]


def octreeLeaves(baseDivisions, refineBox, levels):
    r"""
    Leaf cells of a box octree in lattice units.

    Parameters
    ----------
    baseDivisions : tuple of int
        Base grid cell counts along x, y and z.

    refineBox : tuple
        (lo, hi) of the refinement region in lattice units, or None.

    levels : int
        Number of 8-way splits applied to cells overlapping refineBox.
    """
    unit = 2 ** levels
    leaves = []
    stack = [OctreeCell((i * unit, j * unit, k * unit), unit, 0)
             for i in range(baseDivisions[0])
             for j in range(baseDivisions[1])
             for k in range(baseDivisions[2])]
    stack.reverse()
    while stack:
        cell = stack.pop()
        if (refineBox is not None and cell.level < levels
                and cell.overlaps(*refineBox)):
            stack.extend(reversed(cell.children()))
        else:
            leaves.append(cell)
    return leaves


def _convexPieces(loop, centre):
    """
    Split a square face loop whose edges carry hanging vertices into
    triangles fanned from the face centre node. Every boundary segment
    of the loop stays a triangle edge, and both cells sharing the face
    produce the same triangles.
    """
    return [[centre, a, b] for a, b in zip(loop, loop[1:] + loop[:1])]


def octreeRefineBox(domain, baseDivisions, refineRegion=None, levels=0):
    r"""
    Mesh an axis-aligned box with hexahedra and refine the cells
    overlapping a region by 8-way splits.

    Parameters
    ----------
    domain : tuple
        (lo, hi) corners of the box.

    baseDivisions : tuple of int
        Base grid cell counts along x, y and z.

    refineRegion : tuple
        (lo, hi) corners of the refinement region, contained in the
        domain. Default is None (no refinement).

    levels : int
        Refinement levels, >= 0. Default is 0.

    Returns
    -------
    Mesh
        Conforming polyhedral mesh with side sets 'xmin' ... 'zmax'.
        Square faces whose edges carry hanging vertices are split into
        triangles fanned from a new node at the face centre.
    """
    if levels < 0:
        raise ValueError(f"levels must be >= 0, got {levels}")
    lo = np.asarray(domain[0], dtype=float)
    hi = np.asarray(domain[1], dtype=float)
    base = np.asarray(baseDivisions, dtype=int)
    unit = 2 ** levels
    spacing = (hi - lo) / (base * unit)

    refineBox = None
    if refineRegion is not None and levels > 0:
        rlo = np.asarray(refineRegion[0], dtype=float)
        rhi = np.asarray(refineRegion[1], dtype=float)
        tol = 1e-9 * np.max(hi - lo)
        if np.any(rlo < lo - tol) or np.any(rhi > hi + tol):
            raise ValueError("refine region must lie inside the domain")
        # region in (fractional) lattice units
        refineBox = (tuple((rlo - lo) / spacing), tuple((rhi - lo) / spacing))

    leaves = octreeLeaves(base, refineBox, levels)

    # lattice nodes at every leaf corner
    nodeIndex = {}
    for cell in leaves:
        for point in _corners(cell.lo, cell.hi):
            nodeIndex.setdefault(point, len(nodeIndex))

    # leaf cells indexed by the plane of their lower and upper sides
    byLoSide = [dict() for _ in range(3)]
    for cell in leaves:
        for axis in range(3):
            byLoSide[axis].setdefault(cell.lo[axis], []).append(cell)
    byHiSide = [dict() for _ in range(3)]
    for cell in leaves:
        for axis in range(3):
            byHiSide[axis].setdefault(cell.hi[axis], []).append(cell)

    def edgeLoop(corners):
        """Corner loop with lattice nodes inserted along each edge."""
        loop = []
        for p, q in zip(corners, corners[1:] + corners[:1]):
            loop.append(nodeIndex[p])
            step = np.sign(np.subtract(q, p)).astype(int)
            length = int(np.max(np.abs(np.subtract(q, p))))
            for s in range(1, length):
                point = tuple(int(c) for c in np.add(p, s * step))
                if point in nodeIndex:
                    loop.append(nodeIndex[point])
        return loop

    cells = []
    hangingCount = 0
    for cell in leaves:
        loops = []
        for (axis, direction), localFace in sorted(_SIDE_FACE.items(),
                                                   key=lambda kv: kv[1]):
            tangential = [a for a in range(3) if a != axis]
            if direction > 0:
                across = byLoSide[axis].get(cell.hi[axis], [])
            else:
                across = byHiSide[axis].get(cell.lo[axis], [])
            neighbours = [nb for nb in across
                          if all(nb.lo[a] < cell.hi[a] and nb.hi[a] > cell.lo[a]
                                 for a in tangential)]
            if neighbours and neighbours[0].size < cell.size:
                # the side is tiled by the finer neighbours' faces
                patches = []
                for nb in neighbours:
                    pLo = list(cell.lo)
                    pHi = list(cell.hi)
                    for a in tangential:
                        pLo[a], pHi[a] = nb.lo[a], nb.hi[a]
                    patches.append((tuple(pLo), tuple(pHi)))
            else:
                patches = [(cell.lo, cell.hi)]
            for pLo, pHi in patches:
                corners = _corners(pLo, pHi)
                square = [corners[c] for c in HEX_FACES[localFace]]
                loop = edgeLoop(square)
                if len(loop) > 4:
                    hangingCount += 1
                    # face centre, a lattice point since the side is at
                    # least two units long
                    centre = tuple((a + b) // 2 for a, b in
                                   zip(square[0], square[2]))
                    loops.extend(_convexPieces(
                        loop, nodeIndex.setdefault(centre, len(nodeIndex))))
                else:
                    loops.append(loop)
        cells.append(loops)

    points = np.array(sorted(nodeIndex, key=nodeIndex.get), dtype=float)
    nodes = lo + points * spacing
    mesh = meshFromCells(nodes, cells)
    tol = 1e-9 * np.max(hi - lo)
    mesh.nodeSets, mesh.faceSets = boxSideSets(mesh.nodes, mesh.faces,
                                               lo, hi, tol)
    logger.debug("octree mesh: %d cells, %d nodes, %d faces, "
                 "%d face patches with hanging vertices",
                 mesh.nElements, mesh.nNodes, mesh.nFaces, hangingCount)
    return mesh
