# -*- coding: utf-8 -*-
"""
Created on Mon Oct  5 10:31:07 2026

tests for mesh.py

@author: PSBFEM developers
"""

import numpy as np
import pytest
from numpy.testing import assert_allclose

from psbfem.errors import MeshParseError, MeshValidationError
from psbfem.mesh import (Polyhedron, PolygonFace, hexGridMesh,
                         extrudeQuadMesh, validateMesh, checkMesh,
                         elementVolumeCentroid, elementVolume,
                         elementFaceLoops, polygonPlane, scalingCentre,
                         hexCorners, loadMesh, saveMesh, removeElements,
                         boxNodeSet, boxFaceSet, meshFromCells)
from psbfem.benchmarks import patchMesh


def kinds(report):
    return {v.kind for v in report}


def test_hexGridCounts():
    mesh = hexGridMesh((0, 0, 0), (1, 1, 1), (2, 2, 2))
    assert mesh.nElements == 8
    assert mesh.nNodes == 27
    assert mesh.nFaces == 36
    assert validateMesh(mesh) == []
    assert len(mesh.nodeSets["zmin"]) == 9
    assert len(mesh.faceSets["xmax"]) == 4


def test_sharedFaceOppositeSigns():
    mesh = hexGridMesh((0, 0, 0), (2, 1, 1), (2, 1, 1))
    refs0 = dict(mesh.elements[0].faceRefs)
    refs1 = dict(mesh.elements[1].faceRefs)
    shared = set(refs0) & set(refs1)
    assert len(shared) == 1
    face = shared.pop()
    assert refs0[face] == -refs1[face]


def test_unitCubeVolumeCentroid(unitCube):
    volume, centroid = elementVolumeCentroid(unitCube, 0)
    assert volume == pytest.approx(1.0, rel=1e-14)
    assert_allclose(centroid, [0.5, 0.5, 0.5], atol=1e-14)
    assert_allclose(scalingCentre(unitCube, 0), [0.5, 0.5, 0.5], atol=1e-14)


def test_pyramidVolumesSumToElementVolume():
    mesh = patchMesh()
    for e in range(mesh.nElements):
        centre = scalingCentre(mesh, e)
        pyramids = []
        for _, loop in elementFaceLoops(mesh, e):
            centroid, normal, area = polygonPlane(mesh.nodes[loop])
            pyramids.append(area * np.dot(centroid - centre, normal) / 3.0)
        assert min(pyramids) > 0.0
        assert sum(pyramids) == pytest.approx(elementVolume(mesh, e),
                                              rel=1e-10)


def test_patchMeshShape():
    mesh = patchMesh()
    assert mesh.nElements == 5
    assert validateMesh(mesh) == []
    assert len(mesh.elements[4].faceRefs) == 13
    total = sum(elementVolume(mesh, e) for e in range(mesh.nElements))
    assert total == pytest.approx(1.25 * 1.25 * 3.0, rel=1e-12)


def test_hexCornersOrder():
    mesh = hexGridMesh((0, 0, 0), (1, 1, 1), (2, 2, 2))
    corners = hexCorners(mesh, 0)
    expected = [(0, 0, 0), (0.5, 0, 0), (0.5, 0.5, 0), (0, 0.5, 0),
                (0, 0, 0.5), (0.5, 0, 0.5), (0.5, 0.5, 0.5), (0, 0.5, 0.5)]
    assert_allclose(mesh.nodes[corners], expected, atol=1e-14)


def test_hexCornersOfPolyhedron():
    assert hexCorners(patchMesh(), 4) is None


def test_nonPlanarFace(unitCube):
    # lift the (1, 1, 1) corner, only the top face stops being planar
    corner = int(np.argmax(unitCube.nodes.sum(axis=1)))
    unitCube.nodes[corner, 2] = 1.1
    report = validateMesh(unitCube)
    planar = [v for v in report if v.kind == "non-planar face"]
    assert len(planar) == 1
    with pytest.raises(MeshValidationError) as err:
        checkMesh(unitCube)
    assert len(err.value.violations) == len(report)


def test_nonConvexFace():
    # dart-shaped cross-section, reflex vertex at (0.5, 1)
    points = [(0.0, 0.0), (2.0, 1.0), (0.0, 2.0), (0.5, 1.0)]
    mesh = extrudeQuadMesh(points, [(0, 1, 2, 3)], 0.0, 1.0)
    assert "non-convex face" in kinds(validateMesh(mesh))


def test_straightAngleVertexRejected():
    # pentagon with a vertex in the middle of an edge
    nodes = np.array([[0, 0, 0], [0.5, 0, 0], [1, 0, 0], [1, 1, 0], [0, 1, 0],
                      [0.5, 0.5, 1.0]], dtype=float)
    loops = [[0, 4, 3, 2, 1], [0, 1, 5], [1, 2, 5], [2, 3, 5], [3, 4, 5],
             [4, 0, 5]]
    mesh = meshFromCells(nodes, [loops])
    details = [v.detail for v in validateMesh(mesh)
               if v.kind == "non-convex face"]
    assert "straight-angle vertex" in details


def test_flippedFace(unitCube):
    refs = list(unitCube.elements[0].faceRefs)
    faceId, sign = refs[0]
    refs[0] = (faceId, -sign)
    unitCube.elements[0] = Polyhedron(tuple(refs), 0)
    report = validateMesh(unitCube)
    flipped = [v.faceId for v in report if v.kind == "non-outward normal"]
    assert flipped == [faceId]


def test_openElement(unitCube):
    refs = unitCube.elements[0].faceRefs
    unitCube.elements[0] = Polyhedron(refs[1:], 0)
    found = kinds(validateMesh(unitCube))
    assert "open or non-manifold edge" in found
    assert "orphan face" in found


def test_faceIndexOutOfRange(unitCube):
    refs = unitCube.elements[0].faceRefs + ((99, 1),)
    unitCube.elements[0] = Polyhedron(refs, 0)
    assert "index out of range" in kinds(validateMesh(unitCube))


def test_degenerateFace(unitCube):
    a, b, c, _ = unitCube.faces[0].nodeIds
    unitCube.faces[0] = PolygonFace((a, a, b, c))
    assert "degenerate face" in kinds(validateMesh(unitCube))


def test_degenerateElementCentre(unitCube):
    unitCube.nodes[:, 2] = 0.0
    with pytest.raises(MeshValidationError):
        scalingCentre(unitCube, 0)


def test_jsonRoundTrip(tmp_path):
    mesh = patchMesh()
    path = str(tmp_path / "patch.json")
    saveMesh(mesh, path)
    loaded = loadMesh(path)
    assert_allclose(loaded.nodes, mesh.nodes)
    assert [f.nodeIds for f in loaded.faces] == [f.nodeIds for f in
                                                  mesh.faces]
    assert [e.faceRefs for e in loaded.elements] == \
        [e.faceRefs for e in mesh.elements]
    assert loaded.nodeSets == mesh.nodeSets


CUBE_INP = """** unit cube with non-contiguous node labels
*NODE
101, 0.0, 0.0, 0.0
102, 1.0, 0.0, 0.0
103, 1.0, 1.0, 0.0
104, 0.0, 1.0, 0.0
105, 0.0, 0.0, 1.0
106, 1.0, 0.0, 1.0
107, 1.0, 1.0, 1.0
108, 0.0, 1.0, 1.0
*FACE
1, 101, 104, 103, 102
2, 105, 106, 107, 108
3, 101, 102, 106, 105
4, 102, 103, 107, 106
5, 103, 104, 108, 107
6, 104, 101, 105, 108
*element, type=UPOLY
1, 1, 2, 3,
   4, 5, 6
*NSET, NSET=bottom
101, 102, 103, 104
*FSET, FSET=top
2
"""


def test_readInp(tmp_path):
    path = tmp_path / "cube.inp"
    path.write_text(CUBE_INP)
    mesh = loadMesh(str(path))
    assert (mesh.nNodes, mesh.nFaces, mesh.nElements) == (8, 6, 1)
    assert mesh.nodeSets["bottom"] == [0, 1, 2, 3]
    assert mesh.faceSets["top"] == [1]
    assert elementVolume(mesh, 0) == pytest.approx(1.0)


def test_inpUndefinedFace(tmp_path):
    path = tmp_path / "bad.inp"
    path.write_text(CUBE_INP.replace("   4, 5, 6", "   4, 5, 9"))
    with pytest.raises(MeshParseError, match="undefined label"):
        loadMesh(str(path))


def test_inpUnknownKeyword(tmp_path):
    path = tmp_path / "bad.inp"
    path.write_text(CUBE_INP + "*STEP\n1\n")
    with pytest.raises(MeshParseError, match="STEP"):
        loadMesh(str(path))


def test_jsonZeroFaceReference(tmp_path):
    path = tmp_path / "bad.json"
    path.write_text('{"nodes": [[0, 0, 0]], "faces": [[0, 0, 0]], '
                    '"elements": [[0]]}')
    with pytest.raises(MeshParseError, match="1-based"):
        loadMesh(str(path), validate=False)


def test_jsonSyntaxError(tmp_path):
    path = tmp_path / "bad.json"
    path.write_text('{"nodes": [')
    with pytest.raises(MeshParseError, match="bad.json:1:"):
        loadMesh(str(path))


def test_unknownFormat(tmp_path):
    with pytest.raises(MeshParseError, match="format"):
        loadMesh(str(tmp_path / "mesh.vtu"))


def test_removeElements():
    mesh = hexGridMesh((0, 0, 0), (2, 1, 1), (2, 1, 1))
    kept = removeElements(mesh, [1])
    assert (kept.nElements, kept.nNodes, kept.nFaces) == (1, 8, 6)
    assert validateMesh(kept) == []
    assert kept.nodeSets["xmax"] == []
    assert len(kept.nodeSets["xmin"]) == 4


def test_boxSets():
    mesh = hexGridMesh((0, 0, 0), (1, 1, 1), (2, 2, 2))
    assert len(boxNodeSet(mesh, (0, 0, 0), (1, 1, 0))) == 9
    assert len(boxFaceSet(mesh, (0, 0, 0), (1, 1, 0))) == 4


def test_extrudedTrapezoidIsValid():
    points = [(0.0, 0.0), (2.0, 0.0), (1.5, 1.0), (0.5, 1.0)]
    mesh = extrudeQuadMesh(points, [(0, 1, 2, 3)], 0.0, 1.0, layers=2)
    assert mesh.nElements == 2
    assert validateMesh(mesh) == []
    assert sum(elementVolume(mesh, e) for e in range(2)) == \
        pytest.approx(1.5)
