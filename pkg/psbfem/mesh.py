#!/usr/bin/env python3
# -*- coding: utf-8 -*-
"""
Created on Mon Sep 14 10:02:31 2026

Face-based polyhedral mesh data model, file ingestion and validation,
scaling-centre computation, and structured mesh builders.

@author: PSBFEM developers
"""

# python modules
import os
import json
import logging
from dataclasses import dataclass, field
import numpy as np

# custom modules
from psbfem.errors import MeshParseError, MeshValidationError


logger = logging.getLogger(__name__)

# listing all functions declared in this file so that sphinx-automodapi
# correctly documents them and doesn't document imported functions.
__all__ = ["PolygonFace",
           "Polyhedron",
           "Mesh",
           "Violation",
           "FaceRegistry",
           "meshFromCells",
           "elementFaceLoops",
           "elementNodes",
           "hexCorners",
           "polygonPlane",
           "elementVolumeCentroid",
           "elementVolume",
           "scalingCentre",
           "validateMesh",
           "checkMesh",
           "loadMesh",
           "saveMesh",
           "readInp",
           "writeInp",
           "hexGridMesh",
           "extrudeQuadMesh",
           "boxSideSets",
           "removeElements",
           "boxNodeSet",
           "boxFaceSet",
           "HEX_FACES",
           ]


# relative planarity tolerance (times face diameter)
TOL_PLANAR = 1e-8
# relative tolerance on the sine of a vertex turning angle
TOL_CONVEX = 1e-10

# outward, counter-clockwise local faces of a hexahedron with nodes
# 0-3 on the bottom (z-) and 4-7 on the top (z+)
HEX_FACES = ((0, 3, 2, 1),
             (4, 5, 6, 7),
             (0, 1, 5, 4),
             (1, 2, 6, 5),
             (2, 3, 7, 6),
             (3, 0, 4, 7))


@dataclass(frozen=True)
class PolygonFace:
    """Ordered polygon loop of global node indices."""
    nodeIds: tuple


@dataclass(frozen=True)
class Polyhedron:
    """
    Polyhedral element as a list of signed face references. A sign of
    +1 means the stored face loop is counter-clockwise seen from outside
    this element, -1 means it has to be reversed.
    """
    faceRefs: tuple
    elementId: int


@dataclass
class Mesh:
    """
    Container for nodes, polygon faces and face-referencing polyhedra.
    Treated as immutable once validated.
    """
    nodes: np.ndarray
    faces: list
    elements: list
    nodeSets: dict = field(default_factory=dict)
    faceSets: dict = field(default_factory=dict)

    @property
    def nNodes(self):
        return len(self.nodes)

    @property
    def nFaces(self):
        return len(self.faces)

    @property
    def nElements(self):
        return len(self.elements)


@dataclass
class Violation:
    """One entry of a mesh diagnostics report."""
    kind: str
    elementId: object
    faceId: object
    detail: str = ""

    def __str__(self):
        location = []
        if self.elementId is not None:
            location.append(f"element {self.elementId}")
        if self.faceId is not None:
            location.append(f"face {self.faceId}")
        text = ", ".join([self.kind] + location)
        if self.detail:
            text += f" ({self.detail})"
        return text


class FaceRegistry:
    """
    Deduplicates polygon faces while building a mesh from cells. Each
    face is stored once, with the orientation of the first cell that
    adds it; later cells get a negative reference when their loop runs
    the other way.
    """

    def __init__(self):
        self.faces = []
        self._index = {}

    def add(self, loop):
        """
        Register an outward loop and return the signed 1-based
        reference used in element face lists.
        """
        loop = tuple(int(n) for n in loop)
        key = tuple(sorted(loop))
        if key not in self._index:
            self._index[key] = len(self.faces)
            self.faces.append(PolygonFace(loop))
            return len(self.faces)
        faceId = self._index[key]
        stored = self.faces[faceId].nodeIds
        sign = 1 if _sameCyclicOrder(stored, loop) else -1
        return sign * (faceId + 1)


def _sameCyclicOrder(a, b):
    """True if loop b is a rotation of loop a (not of its reverse)."""
    n = len(a)
    start = b.index(a[0])
    return all(a[i] == b[(start + i) % n] for i in range(n))


def meshFromCells(nodes, cells, nodeSets=None, faceSets=None):
    r"""
    Build a Mesh from cells given as lists of outward polygon loops.

    Parameters
    ----------
    nodes : numpy.ndarray
        (N, 3) node coordinates.

    cells : list
        One entry per element, each a list of node-index loops that are
        counter-clockwise seen from outside the cell.

    nodeSets, faceSets : dict
        Optional named index collections.
    """
    registry = FaceRegistry()
    elements = []
    for elementId, loops in enumerate(cells):
        refs = []
        for loop in loops:
            signed = registry.add(loop)
            refs.append((abs(signed) - 1, 1 if signed > 0 else -1))
        elements.append(Polyhedron(tuple(refs), elementId))
    return Mesh(nodes=np.asarray(nodes, dtype=float),
                faces=registry.faces,
                elements=elements,
                nodeSets=dict(nodeSets or {}),
                faceSets=dict(faceSets or {}))


#%% element geometry

def elementFaceLoops(mesh, elementId):
    """
    Outward node loops of an element, in the element's face order.
    Returns a list of (faceId, loop) pairs.
    """
    loops = []
    for faceId, sign in mesh.elements[elementId].faceRefs:
        loop = mesh.faces[faceId].nodeIds
        if sign < 0:
            loop = loop[::-1]
        loops.append((faceId, np.asarray(loop, dtype=int)))
    return loops


def elementNodes(mesh, elementId):
    """Sorted global node indices of an element."""
    ids = set()
    for faceId, _ in mesh.elements[elementId].faceRefs:
        ids.update(mesh.faces[faceId].nodeIds)
    return np.array(sorted(ids), dtype=int)


def hexCorners(mesh, elementId):
    r"""
    Corner nodes of a hexahedral element in HEX_FACES order, or None if
    the element is not a hexahedron. The bottom face is the one whose
    outward normal points most along -z, and corner 0 is its node with
    the smallest coordinate sum.
    """
    loops = elementFaceLoops(mesh, elementId)
    ids = elementNodes(mesh, elementId)
    if len(ids) != 8 or len(loops) != 6 or any(len(l) != 4 for _, l in loops):
        return None
    x = mesh.nodes
    normals = [polygonPlane(x[loop])[1] for _, loop in loops]
    bottomLoop = loops[int(np.argmin([n[2] for n in normals]))][1]
    bottomLoop = [int(n) for n in bottomLoop[::-1]]
    start = int(np.argmin([x[n].sum() for n in bottomLoop]))
    bottom = bottomLoop[start:] + bottomLoop[:start]
    neighbours = {int(n): set() for n in ids}
    for _, loop in loops:
        loop = [int(n) for n in loop]
        for a, b in zip(loop, loop[1:] + loop[:1]):
            neighbours[a].add(b)
            neighbours[b].add(a)
    top = []
    for n in bottom:
        up = neighbours[n] - set(bottom)
        if len(up) != 1:
            return None
        top.append(up.pop())
    return bottom + top


def polygonPlane(points):
    r"""
    Area centroid, unit normal (Newell's method) and area of a planar
    polygon given by its ordered 3D vertices.
    """
    points = np.asarray(points, dtype=float)
    nxt = np.roll(points, -1, axis=0)
    # Newell normal, twice the vector area
    areaVec = 0.5 * np.sum(np.cross(points, nxt), axis=0)
    area = np.linalg.norm(areaVec)
    if area == 0.0:
        return points.mean(axis=0), np.zeros(3), 0.0
    normal = areaVec / area
    # area centroid from a fan about the vertex average
    ref = points.mean(axis=0)
    triAreas = 0.5 * np.cross(points - ref, nxt - ref) @ normal
    triCentroids = (ref + points + nxt) / 3.0
    centroid = triAreas @ triCentroids / np.sum(triAreas)
    return centroid, normal, area


def elementVolumeCentroid(mesh, elementId):
    """
    Volume and volume centroid of an element by decomposing it into
    tetrahedra formed by face fans and a reference point. Exact for any
    closed, consistently oriented surface.
    """
    loops = elementFaceLoops(mesh, elementId)
    coords = mesh.nodes
    ref = coords[elementNodes(mesh, elementId)].mean(axis=0)
    volume = 0.0
    moment = np.zeros(3)
    for _, loop in loops:
        pts = coords[loop]
        fc = pts.mean(axis=0)
        nxt = np.roll(pts, -1, axis=0)
        # signed volumes of tets (ref, fc, p_i, p_i+1)
        vols = np.einsum('ij,ij->i',
                         np.cross(pts - fc, nxt - fc),
                         np.broadcast_to(fc - ref, pts.shape)) / 6.0
        cents = (ref + fc + pts + nxt) / 4.0
        volume += np.sum(vols)
        moment += vols @ cents
    if volume == 0.0:
        return 0.0, ref
    return volume, moment / volume


def elementVolume(mesh, elementId):
    return elementVolumeCentroid(mesh, elementId)[0]


def scalingCentre(mesh, elementId):
    r"""
    Scaling centre of a polyhedral element, taken as its volume
    centroid.

    Parameters
    ----------
    mesh : Mesh
        Mesh containing the element.

    elementId : int
        Index of the element. The element must be closed.

    Returns
    -------
    numpy.ndarray
        Centroid coordinates (3,).
    """
    volume, centroid = elementVolumeCentroid(mesh, elementId)
    nodes = mesh.nodes[elementNodes(mesh, elementId)]
    diameter = np.ptp(nodes, axis=0).max()
    if not volume > 1e-14 * diameter ** 3:
        raise MeshValidationError(f"degenerate element {elementId}: "
                                  f"volume {volume:.3e}")
    return centroid


#%% validation

def _faceViolations(mesh, faceId, elementId):
    """Planarity and convexity checks for one face."""
    violations = []
    loop = mesh.faces[faceId].nodeIds
    if len(set(loop)) < 3 or len(set(loop)) != len(loop):
        violations.append(Violation("degenerate face", elementId, faceId,
                                    "fewer than 3 distinct nodes"))
        return violations
    pts = mesh.nodes[list(loop)]
    centroid, normal, area = polygonPlane(pts)
    diameter = np.max(np.linalg.norm(pts[:, None, :] - pts[None, :, :],
                                     axis=2))
    if area <= 1e-14 * diameter ** 2:
        violations.append(Violation("degenerate face", elementId, faceId,
                                    "zero area"))
        return violations
    deviation = np.max(np.abs((pts - centroid) @ normal))
    if deviation > TOL_PLANAR * diameter:
        violations.append(Violation("non-planar face", elementId, faceId,
                                    f"deviation {deviation:.3e}"))
    # turning test on consecutive edges
    edges = np.roll(pts, -1, axis=0) - pts
    prevEdges = np.roll(edges, 1, axis=0)
    lengths = np.linalg.norm(edges, axis=1)
    turns = np.cross(prevEdges, edges) @ normal
    sines = turns / (lengths * np.roll(lengths, 1))
    if np.any(sines < -TOL_CONVEX):
        violations.append(Violation("non-convex face", elementId, faceId))
    elif np.any(sines <= TOL_CONVEX):
        violations.append(Violation("non-convex face", elementId, faceId,
                                    "straight-angle vertex"))
    else:
        # a convex loop turns exactly once
        cosines = np.einsum('ij,ij->i', prevEdges, edges) / \
            (lengths * np.roll(lengths, 1))
        turning = np.sum(np.arctan2(sines, cosines))
        if abs(turning - 2 * np.pi) > 1e-6:
            violations.append(Violation("non-convex face", elementId,
                                        faceId, "self-intersecting"))
    return violations


def _elementViolations(mesh, elementId):
    """Closedness, orientation and star-convexity checks."""
    violations = []
    loops = elementFaceLoops(mesh, elementId)
    directed = {}
    undirected = {}
    for faceId, loop in loops:
        for a, b in zip(loop, np.roll(loop, -1)):
            directed.setdefault((a, b), []).append(faceId)
            key = (min(a, b), max(a, b))
            undirected[key] = undirected.get(key, 0) + 1

    for faceId, loop in loops:
        good = bad = 0
        openEdge = None
        for a, b in zip(loop, np.roll(loop, -1)):
            if undirected[(min(a, b), max(a, b))] != 2:
                openEdge = (int(a), int(b))
            if len(directed.get((a, b), [])) > 1:
                bad += 1
            if (b, a) in directed:
                good += 1
        if openEdge is not None:
            violations.append(Violation("open or non-manifold edge",
                                        elementId, faceId,
                                        f"edge {openEdge}"))
        elif bad > good:
            violations.append(Violation("non-outward normal", elementId,
                                        faceId))
    if violations:
        return violations

    volume, centre = elementVolumeCentroid(mesh, elementId)
    if volume <= 0.0:
        # consistently inside-out element
        return [Violation("non-outward normal", elementId, faceId)
                for faceId, _ in loops]
    for faceId, loop in loops:
        centroid, normal, area = polygonPlane(mesh.nodes[loop])
        pyramid = area * np.dot(centroid - centre, normal) / 3.0
        if pyramid <= 1e-12 * volume:
            violations.append(Violation("non-positive face pyramid",
                                        elementId, faceId,
                                        "element not star-convex about "
                                        "its centroid"))
    return violations


def validateMesh(mesh):
    r"""
    Diagnose every analysis-readiness invariant of a mesh.

    Parameters
    ----------
    mesh : Mesh
        Mesh to be checked.

    Returns
    -------
    list of Violation
        Empty if and only if the mesh is analysis-ready.
    """
    report = []
    nNodes = mesh.nNodes
    nFaces = mesh.nFaces
    if not np.all(np.isfinite(mesh.nodes)):
        report.append(Violation("non-finite coordinates", None, None))
    badFaces = set()
    for faceId, face in enumerate(mesh.faces):
        if any(n < 0 or n >= nNodes for n in face.nodeIds):
            report.append(Violation("index out of range", None, faceId,
                                    "node index"))
            badFaces.add(faceId)
    referenced = set()
    checkedFaces = set()
    for element in mesh.elements:
        elementId = element.elementId
        refsOk = True
        for faceId, sign in element.faceRefs:
            if faceId < 0 or faceId >= nFaces or sign not in (1, -1):
                report.append(Violation("index out of range", elementId,
                                        faceId, "face reference"))
                refsOk = False
            elif faceId in badFaces:
                refsOk = False
        if not refsOk:
            continue
        faceProblems = []
        for faceId, _ in element.faceRefs:
            referenced.add(faceId)
            if faceId not in checkedFaces:
                checkedFaces.add(faceId)
                faceProblems += _faceViolations(mesh, faceId, elementId)
        report += faceProblems
        if any(v.kind == "degenerate face" for v in faceProblems):
            continue
        report += _elementViolations(mesh, elementId)
    for faceId in range(nFaces):
        if faceId not in referenced and faceId not in badFaces:
            report.append(Violation("orphan face", None, faceId))
    for name, ids in mesh.nodeSets.items():
        if any(i < 0 or i >= nNodes for i in ids):
            report.append(Violation("index out of range", None, None,
                                    f"node set {name}"))
    for name, ids in mesh.faceSets.items():
        if any(i < 0 or i >= nFaces for i in ids):
            report.append(Violation("index out of range", None, None,
                                    f"face set {name}"))
    return report


def checkMesh(mesh):
    """Raise MeshValidationError if the mesh is not analysis-ready."""
    report = validateMesh(mesh)
    if report:
        raise MeshValidationError(f"{report[0]} "
                                  f"[{len(report)} violation(s)]",
                                  report)
    logger.debug("mesh valid: %d nodes, %d faces, %d elements",
                 mesh.nNodes, mesh.nFaces, mesh.nElements)
    return mesh


#%% file formats

def _meshFromJson(data):
    try:
        nodes = np.array(data["nodes"], dtype=float).reshape(-1, 3)
        faces = [PolygonFace(tuple(int(n) for n in face))
                 for face in data["faces"]]
        elements = []
        for elementId, refs in enumerate(data["elements"]):
            faceRefs = []
            for ref in refs:
                ref = int(ref)
                if ref == 0:
                    raise MeshParseError(f"element {elementId}: face "
                                         f"reference 0 is not allowed "
                                         f"(references are 1-based)")
                faceRefs.append((abs(ref) - 1, 1 if ref > 0 else -1))
            elements.append(Polyhedron(tuple(faceRefs), elementId))
        nodeSets = {name: [int(i) for i in ids]
                    for name, ids in data.get("node_sets", {}).items()}
        faceSets = {name: [int(i) for i in ids]
                    for name, ids in data.get("face_sets", {}).items()}
    except MeshParseError:
        raise
    except (KeyError, TypeError, ValueError) as err:
        raise MeshParseError(f"malformed JSON mesh: {err!r}") from err
    return Mesh(nodes, faces, elements, nodeSets, faceSets)


def _meshToJson(mesh):
    return {"nodes": mesh.nodes.tolist(),
            "faces": [list(face.nodeIds) for face in mesh.faces],
            "elements": [[sign * (faceId + 1)
                          for faceId, sign in element.faceRefs]
                         for element in mesh.elements],
            "node_sets": {name: [int(i) for i in ids]
                          for name, ids in mesh.nodeSets.items()},
            "face_sets": {name: [int(i) for i in ids]
                          for name, ids in mesh.faceSets.items()},
            }


def _inpRecords(lines):
    """Join continuation lines (trailing comma) of a data block."""
    record = ""
    for line in lines:
        record += line
        if line.rstrip().endswith(","):
            continue
        yield [tok.strip() for tok in record.split(",") if tok.strip()]
        record = ""
    if record:
        yield [tok.strip() for tok in record.split(",") if tok.strip()]


def readInp(path):
    r"""
    Read the ABAQUS-style polyhedral input subset.

    Grammar (keywords are case-insensitive, ``**`` starts a comment)::

        *NODE
        label, x, y, z
        *FACE
        label, n1, n2, n3, ...
        *ELEMENT, TYPE=UPOLY
        label, +-f1, +-f2, ...
        *NSET, NSET=name
        n1, n2, ...
        *FSET, FSET=name
        f1, f2, ...

    Labels are positive integers; node and face labels are mapped to
    zero-based indices in ascending label order. A face reference is
    negative when the element uses the reversed loop. Data lines ending
    with a comma continue on the next line.
    """
    with open(path, "r") as f:
        rawLines = f.readlines()

    blocks = []
    for lineNo, line in enumerate(rawLines, start=1):
        stripped = line.strip()
        if not stripped or stripped.startswith("**"):
            continue
        if stripped.startswith("*"):
            parts = [p.strip() for p in stripped[1:].split(",")]
            options = {}
            for opt in parts[1:]:
                if "=" in opt:
                    key, value = opt.split("=", 1)
                    options[key.strip().upper()] = value.strip()
            blocks.append((parts[0].upper(), options, lineNo, []))
        else:
            if not blocks:
                raise MeshParseError(f"{path}:{lineNo}: data before any "
                                     f"keyword")
            blocks[-1][3].append(stripped)

    nodeRows = {}
    faceRows = {}
    elementRows = {}
    nodeSets = {}
    faceSets = {}
    for keyword, options, lineNo, lines in blocks:
        try:
            records = list(_inpRecords(lines))
            if keyword == "NODE":
                for rec in records:
                    nodeRows[int(rec[0])] = [float(v) for v in rec[1:4]]
                    if len(rec) != 4:
                        raise ValueError("node needs label and 3 coordinates")
            elif keyword == "FACE":
                for rec in records:
                    faceRows[int(rec[0])] = [int(v) for v in rec[1:]]
            elif keyword == "ELEMENT":
                for rec in records:
                    elementRows[int(rec[0])] = [int(v) for v in rec[1:]]
            elif keyword == "NSET":
                name = options["NSET"]
                nodeSets.setdefault(name, []).extend(
                    int(v) for rec in records for v in rec)
            elif keyword == "FSET":
                name = options["FSET"]
                faceSets.setdefault(name, []).extend(
                    int(v) for rec in records for v in rec)
            else:
                raise ValueError(f"unsupported keyword *{keyword}")
        except (ValueError, KeyError, IndexError) as err:
            raise MeshParseError(f"{path}:{lineNo}: *{keyword} block: "
                                 f"{err}") from err

    if not nodeRows or not faceRows or not elementRows:
        raise MeshParseError(f"{path}: *NODE, *FACE and *ELEMENT blocks "
                             f"are required")
    nodeIndex = {label: i for i, label in enumerate(sorted(nodeRows))}
    faceIndex = {label: i for i, label in enumerate(sorted(faceRows))}
    try:
        nodes = np.array([nodeRows[label] for label in sorted(nodeRows)])
        faces = [PolygonFace(tuple(nodeIndex[n] for n in faceRows[label]))
                 for label in sorted(faceRows)]
        elements = []
        for elementId, label in enumerate(sorted(elementRows)):
            refs = tuple((faceIndex[abs(ref)], 1 if ref > 0 else -1)
                         for ref in elementRows[label])
            elements.append(Polyhedron(refs, elementId))
        nodeSets = {name: [nodeIndex[n] for n in ids]
                    for name, ids in nodeSets.items()}
        faceSets = {name: [faceIndex[n] for n in ids]
                    for name, ids in faceSets.items()}
    except KeyError as err:
        raise MeshParseError(f"{path}: undefined label {err}") from err
    return Mesh(nodes, faces, elements, nodeSets, faceSets)


def writeInp(mesh, path):
    """Write a mesh in the polyhedral input subset read by readInp()."""
    with open(path, "w") as f:
        f.write("** psbfem polyhedral mesh\n*NODE\n")
        for i, (x, y, z) in enumerate(mesh.nodes, start=1):
            f.write(f"{i}, {x!r}, {y!r}, {z!r}\n")
        f.write("*FACE\n")
        for i, face in enumerate(mesh.faces, start=1):
            f.write(f"{i}, " + ", ".join(str(n + 1) for n in face.nodeIds)
                    + "\n")
        f.write("*ELEMENT, TYPE=UPOLY\n")
        for i, element in enumerate(mesh.elements, start=1):
            f.write(f"{i}, " + ", ".join(str(sign * (faceId + 1))
                                         for faceId, sign in
                                         element.faceRefs) + "\n")
        for name, ids in mesh.nodeSets.items():
            f.write(f"*NSET, NSET={name}\n")
            for start in range(0, len(ids), 16):
                f.write(", ".join(str(i + 1) for i in ids[start:start + 16])
                        + "\n")
        for name, ids in mesh.faceSets.items():
            f.write(f"*FSET, FSET={name}\n")
            for start in range(0, len(ids), 16):
                f.write(", ".join(str(i + 1) for i in ids[start:start + 16])
                        + "\n")
    return


def loadMesh(path, fmt=None, validate=True):
    r"""
    Load and validate a polyhedral mesh.

    Parameters
    ----------
    path : str
        Path to the mesh file.

    fmt : str
        'json' or 'inp'. Default is None, which infers the format from
        the file extension.

    validate : bool
        Run validateMesh() and raise on the first violation. Default is
        True.
    """
    if fmt is None:
        fmt = os.path.splitext(path)[1].lstrip(".").lower()
    if fmt == "json":
        try:
            with open(path, "r") as f:
                data = json.load(f)
        except json.JSONDecodeError as err:
            raise MeshParseError(f"{path}:{err.lineno}:{err.colno}: "
                                 f"{err.msg}") from err
        mesh = _meshFromJson(data)
    elif fmt == "inp":
        mesh = readInp(path)
    else:
        raise MeshParseError(f"unknown mesh format {fmt!r}")
    logger.info("loaded mesh %s: %d nodes, %d faces, %d elements",
                path, mesh.nNodes, mesh.nFaces, mesh.nElements)
    if validate:
        checkMesh(mesh)
    return mesh


def saveMesh(mesh, path, fmt=None):
    """Write a mesh as JSON (default) or in the .inp subset."""
    if fmt is None:
        fmt = os.path.splitext(path)[1].lstrip(".").lower() or "json"
    if fmt == "inp":
        writeInp(mesh, path)
        return
    with open(path, "w") as f:
        json.dump(_meshToJson(mesh), f)
    return


#%% structured builders and set utilities

def boxSideSets(nodes, faces, lo, hi, tol):
    """Node and face sets on the six sides of a bounding box."""
    nodeSets = {}
    faceSets = {}
    for axis, name in enumerate("xyz"):
        for bound, side in ((lo[axis], "min"), (hi[axis], "max")):
            onSide = np.abs(nodes[:, axis] - bound) <= tol
            nodeSets[name + side] = np.flatnonzero(onSide).tolist()
            faceSets[name + side] = [i for i, face in enumerate(faces)
                                     if all(onSide[list(face.nodeIds)])]
    return nodeSets, faceSets


def hexGridMesh(lo, hi, divisions):
    r"""
    Structured hexahedral grid of an axis-aligned box.

    Parameters
    ----------
    lo, hi : sequence of float
        Opposite box corners.

    divisions : sequence of int
        Number of cells along x, y and z.

    Returns
    -------
    Mesh
        Grid with node and face sets 'xmin', 'xmax', ..., 'zmax'.
    """
    lo = np.asarray(lo, dtype=float)
    hi = np.asarray(hi, dtype=float)
    nx, ny, nz = (int(d) for d in divisions)
    xs = np.linspace(lo[0], hi[0], nx + 1)
    ys = np.linspace(lo[1], hi[1], ny + 1)
    zs = np.linspace(lo[2], hi[2], nz + 1)
    X, Y, Z = np.meshgrid(xs, ys, zs, indexing="ij")
    nodes = np.column_stack([X.ravel(), Y.ravel(), Z.ravel()])

    def nid(i, j, k):
        return (i * (ny + 1) + j) * (nz + 1) + k

    cells = []
    for i in range(nx):
        for j in range(ny):
            for k in range(nz):
                corners = [nid(i, j, k), nid(i + 1, j, k),
                           nid(i + 1, j + 1, k), nid(i, j + 1, k),
                           nid(i, j, k + 1), nid(i + 1, j, k + 1),
                           nid(i + 1, j + 1, k + 1), nid(i, j + 1, k + 1)]
                cells.append([[corners[c] for c in face]
                              for face in HEX_FACES])
    mesh = meshFromCells(nodes, cells)
    tol = 1e-9 * np.max(hi - lo)
    mesh.nodeSets, mesh.faceSets = boxSideSets(mesh.nodes, mesh.faces,
                                             lo, hi, tol)
    return mesh


def extrudeQuadMesh(points, quads, y0, y1, layers=1):
    r"""
    Extrude a planar quadrilateral mesh of the x-z plane along y.
    Every resulting cell is a hexahedron with planar faces, whatever
    the shape of the quadrilaterals.

    Parameters
    ----------
    points : numpy.ndarray
        (P, 2) array of (x, z) coordinates.

    quads : numpy.ndarray
        (Q, 4) node indices of each quadrilateral, counter-clockwise in
        the (x, z) plane.

    y0, y1 : float
        Extent of the extrusion.

    layers : int
        Number of cell layers along y. Default is 1.
    """
    points = np.asarray(points, dtype=float)
    nP = len(points)
    ys = np.linspace(y0, y1, layers + 1)
    nodes = np.vstack([np.column_stack([points[:, 0],
                                        np.full(nP, y),
                                        points[:, 1]]) for y in ys])
    cells = []
    for layer in range(layers):
        front = layer * nP
        back = (layer + 1) * nP
        for quad in np.asarray(quads, dtype=int):
            # counter-clockwise in (x, z) is clockwise seen from -y, so
            # the y0 side is the quad as given
            a, b, c, d = quad
            loops = [[front + a, front + b, front + c, front + d],
                     [back + d, back + c, back + b, back + a]]
            for p, q in ((a, b), (b, c), (c, d), (d, a)):
                loops.append([front + q, front + p, back + p, back + q])
            cells.append(loops)
    mesh = meshFromCells(nodes, cells)
    lo = mesh.nodes.min(axis=0)
    hi = mesh.nodes.max(axis=0)
    tol = 1e-9 * np.max(hi - lo)
    mesh.nodeSets, mesh.faceSets = boxSideSets(mesh.nodes, mesh.faces,
                                             lo, hi, tol)
    return mesh


def removeElements(mesh, elementIds):
    """
    Copy of the mesh without the given elements. Faces and nodes that
    are no longer referenced are dropped and the named sets remapped.
    """
    drop = set(int(e) for e in elementIds)
    kept = [el for el in mesh.elements if el.elementId not in drop]
    usedFaces = sorted({faceId for el in kept for faceId, _ in el.faceRefs})
    faceMap = {old: new for new, old in enumerate(usedFaces)}
    usedNodes = sorted({n for f in usedFaces
                        for n in mesh.faces[f].nodeIds})
    nodeMap = {old: new for new, old in enumerate(usedNodes)}
    faces = [PolygonFace(tuple(nodeMap[n] for n in mesh.faces[f].nodeIds))
             for f in usedFaces]
    elements = [Polyhedron(tuple((faceMap[f], s) for f, s in el.faceRefs),
                           newId)
                for newId, el in enumerate(kept)]
    nodeSets = {name: [nodeMap[i] for i in ids if i in nodeMap]
                for name, ids in mesh.nodeSets.items()}
    faceSets = {name: [faceMap[i] for i in ids if i in faceMap]
                for name, ids in mesh.faceSets.items()}
    return Mesh(mesh.nodes[usedNodes].copy(), faces, elements,
                nodeSets, faceSets)


def boxNodeSet(mesh, lo, hi, tol=None):
    """Indices of nodes inside the closed box [lo, hi]."""
    lo = np.asarray(lo, dtype=float)
    hi = np.asarray(hi, dtype=float)
    if tol is None:
        tol = 1e-9 * np.max(np.ptp(mesh.nodes, axis=0))
    inside = np.all((mesh.nodes >= lo - tol) & (mesh.nodes <= hi + tol),
                    axis=1)
    return np.flatnonzero(inside).tolist()


def boxFaceSet(mesh, lo, hi, tol=None):
    """Indices of faces whose nodes all lie inside the box [lo, hi]."""
    inside = np.zeros(mesh.nNodes, dtype=bool)
    inside[boxNodeSet(mesh, lo, hi, tol)] = True
    return [i for i, face in enumerate(mesh.faces)
            if all(inside[list(face.nodeIds)])]
