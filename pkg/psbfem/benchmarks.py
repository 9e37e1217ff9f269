#!/usr/bin/env python3
# -*- coding: utf-8 -*-
"""
Created on Fri Sep 25 09:37:44 2026

Benchmark problems: analytic reference solutions, parametric mesh
generators, the shipped case/expected-value files, and the comparison of
a run against its expected values.

@author: PSBFEM developers
"""

# python modules
import os
import json
import logging
import numpy as np

# custom modules
from psbfem.errors import ConfigError
from psbfem.mesh import (meshFromCells, hexGridMesh, extrudeQuadMesh,
                         removeElements, boxNodeSet, boxFaceSet, boxSideSets,
                         scalingCentre, saveMesh)
from psbfem.octree import octreeRefineBox


logger = logging.getLogger(__name__)

# listing all functions declared in this file so that sphinx-automodapi
# correctly documents them and doesn't document imported functions.
__all__ = ["RECTANGULAR_DAM_EXIT",
           "flatDamHead",
           "columnDiffusionHead",
           "rectangularDamExit",
           "affineHead",
           "HEAD_FUNCTIONS",
           "patchMesh",
           "boxMesh",
           "concreteDamMesh",
           "inclusionMesh",
           "transientFoundationMesh",
           "rectangularDamMesh",
           "trapezoidalDamMesh",
           "columnMesh",
           "MESH_GENERATORS",
           "BENCHMARKS",
           "writeBenchmark",
           "compareExpected",
           ]


# free-surface exit elevation of the 1 m x 0.5 m rectangular dam with
# reservoir levels 1.0 m and 0.5 m
RECTANGULAR_DAM_EXIT = 0.662382


#%% analytic references

def flatDamHead(x, z, heelX=100.0, toeX=140.0, surfaceZ=70.0,
                upstreamHead=80.0, downstreamHead=20.0):
    r"""
    Head under a flat-based impervious dam on an infinitely deep,
    homogeneous foundation,

    h = h_d + (h_u - h_d)/pi * arccos((r1 - r2) / (2 b))

    with r1, r2 the distances to heel and toe in the x-z plane and 2b
    the base width.
    """
    x = np.asarray(x, dtype=float)
    z = np.asarray(z, dtype=float)
    b = 0.5 * (toeX - heelX)
    r1 = np.hypot(x - heelX, z - surfaceZ)
    r2 = np.hypot(x - toeX, z - surfaceZ)
    arg = np.clip((r1 - r2) / (2.0 * b), -1.0, 1.0)
    return downstreamHead + (upstreamHead - downstreamHead) / np.pi * \
        np.arccos(arg)


def columnDiffusionHead(z, t, length=1.0, diffusivity=1.0, h0=1.0, h1=2.0,
                        nTerms=50):
    r"""
    Head in a column 0 <= z <= length initially at h0, with z = 0 held
    at h0 and z = length raised to h1 at t = 0 (Fourier series).

    Parameters
    ----------
    z : numpy.ndarray
        Elevations.

    t : float
        Time since the step, >= 0.

    diffusivity : float
        k / Ss.

    nTerms : int
        Series terms. Default is 50.
    """
    z = np.asarray(z, dtype=float)
    s = z / length
    n = np.arange(1, nTerms + 1)[:, None]
    series = np.sum(2.0 * (-1.0) ** n / (n * np.pi)
                    * np.sin(n * np.pi * s[None, :])
                    * np.exp(-diffusivity * (n * np.pi / length) ** 2 * t),
                    axis=0)
    return h0 + (h1 - h0) * (s + series)


def rectangularDamExit():
    """Reference exit elevation of the rectangular dam."""
    return RECTANGULAR_DAM_EXIT


def affineHead(points, value=0.0, gradient=(0.0, 0.0, 0.0),
               origin=(0.0, 0.0, 0.0), t=None):
    """h = value + gradient . (x - origin)."""
    points = np.atleast_2d(np.asarray(points, dtype=float))
    return value + (points - np.asarray(origin)) @ np.asarray(gradient,
                                                               dtype=float)


def _flatDamPoints(points, t=None, **params):
    points = np.atleast_2d(np.asarray(points, dtype=float))
    return flatDamHead(points[:, 0], points[:, 2], **params)


def _columnPoints(points, t=0.0, **params):
    points = np.atleast_2d(np.asarray(points, dtype=float))
    return columnDiffusionHead(points[:, 2], t, **params)


# head functions usable in case files: f(points, t=..., **params)
HEAD_FUNCTIONS = {"affine": affineHead,
                  "flat_dam": _flatDamPoints,
                  "column_diffusion": _columnPoints}


#%% mesh generators

def _addSets(mesh, nodeSets=None, faceSets=None):
    mesh.nodeSets.update(nodeSets or {})
    mesh.faceSets.update(faceSets or {})
    return mesh


def patchMesh(width=1.25, height=3.0, split=2.0, interior=(0.55, 0.7)):
    r"""
    Patch-test prism: four hexahedra around an interior vertical line
    (shifted off the centre) below z = split, and one polyhedron above
    whose bottom is the four hexahedra's top faces. Each side of the
    polyhedron is split into a triangle and a quadrilateral at the
    mid-edge node of the layer below.
    """
    w = width
    cx, cy = interior
    # plan nodes: corners, mid-edges, interior, counter-clockwise rings
    plan = np.array([[0, 0], [w / 2, 0], [w, 0], [w, w / 2], [w, w],
                     [w / 2, w], [0, w], [0, w / 2], [cx, cy]])
    quads = [(0, 1, 8, 7), (1, 2, 3, 8), (8, 3, 4, 5), (7, 8, 5, 6)]
    levels = (0.0, split)
    nodes = [np.column_stack([plan, np.full(len(plan), z)]) for z in levels]
    top = 2 * len(plan)
    corners = (0, 2, 4, 6)
    nodes.append(np.array([[plan[c][0], plan[c][1], height]
                           for c in corners]))
    nodes = np.vstack(nodes)
    nP = len(plan)

    cells = []
    for quad in quads:
        bottom = [q for q in quad]
        upper = [q + nP for q in quad]
        loops = [bottom[::-1], upper]
        for i in range(4):
            a, b = bottom[i], bottom[(i + 1) % 4]
            loops.append([a, b, b + nP, a + nP])
        cells.append(loops)

    loops = [[q + nP for q in quad][::-1] for quad in quads]
    loops.append([top, top + 1, top + 2, top + 3])
    ring = [0, 1, 2, 3, 4, 5, 6, 7]
    for side in range(4):
        c0, m, c1 = ring[2 * side], ring[2 * side + 1], \
            ring[(2 * side + 2) % 8]
        t0, t1 = top + side, top + (side + 1) % 4
        loops.append([c0 + nP, m + nP, t0])
        loops.append([m + nP, c1 + nP, t1, t0])
    cells.append(loops)

    mesh = meshFromCells(nodes, cells)
    lo = np.zeros(3)
    hi = np.array([w, w, height])
    mesh.nodeSets, mesh.faceSets = boxSideSets(mesh.nodes, mesh.faces, lo,
                                               hi, 1e-9 * height)
    return mesh


def boxMesh(lo=(0.0, 0.0, 0.0), hi=(1.0, 1.0, 1.0), size=0.5):
    """Uniform hexahedral grid with cells of roughly the given size."""
    lo = np.asarray(lo, dtype=float)
    hi = np.asarray(hi, dtype=float)
    divisions = np.maximum(1, np.round((hi - lo) / size)).astype(int)
    return hexGridMesh(lo, hi, divisions)


def concreteDamMesh(size=10.0, octreeLevels=0, baseSize=20.0,
                    refineRegion=((80.0, 0.0, 40.0), (160.0, 160.0, 70.0))):
    r"""
    Foundation block x in [0, 240], y in [0, 160], z in [-10, 70] under a
    dam whose impervious base spans x in [100, 140] on the ground
    surface z = 70.

    With octreeLevels = 0 the block is a uniform grid of the given cell
    size; otherwise a baseSize grid is refined octreeLevels times in
    refineRegion.

    Node sets: 'upstream_bed' (z = 70, x <= 100), 'downstream_bed'
    (z = 70, x >= 140) and 'far_field' (x = 0, x = 240 and z = -10,
    without ground-surface nodes).
    """
    lo = (0.0, 0.0, -10.0)
    hi = (240.0, 160.0, 70.0)
    if octreeLevels:
        base = np.round((np.subtract(hi, lo)) / baseSize).astype(int)
        mesh = octreeRefineBox((lo, hi), base, refineRegion, octreeLevels)
    else:
        mesh = boxMesh(lo, hi, size)
    z = mesh.nodes[:, 2]
    surface = np.abs(z - 70.0) < 1e-6
    farField = sorted((set(mesh.nodeSets["xmin"]) | set(mesh.nodeSets["xmax"])
                       | set(mesh.nodeSets["zmin"]))
                      - set(np.flatnonzero(surface).tolist()))
    return _addSets(mesh, {
        "upstream_bed": boxNodeSet(mesh, (0, 0, 70), (100, 160, 70), 1e-6),
        "downstream_bed": boxNodeSet(mesh, (140, 0, 70), (240, 160, 70),
                                     1e-6),
        "far_field": farField})


def inclusionMesh(size=0.125, levels=1, inclusion=((0.375, 0.375, 0.375),
                                                    (0.625, 0.625, 0.625))):
    r"""
    Unit cube with an impervious box inclusion removed from an octree
    mesh refined around it.
    """
    lo = np.asarray(inclusion[0], dtype=float)
    hi = np.asarray(inclusion[1], dtype=float)
    base = int(round(1.0 / size))
    region = (np.maximum(lo - size, 0.0), np.minimum(hi + size, 1.0))
    mesh = octreeRefineBox(((0, 0, 0), (1, 1, 1)), (base, base, base),
                           region, levels)
    inside = [e for e in range(mesh.nElements)
              if np.all((scalingCentre(mesh, e) > lo)
                        & (scalingCentre(mesh, e) < hi))]
    return removeElements(mesh, inside)


def transientFoundationMesh(size=0.5, ground=((6.0, 5.0), (10.0, 4.0),
                                               (14.0, 3.0), (20.0, 2.5))):
    r"""
    Slab 20 m x 2 m x 5 m with a stepped ground surface: cells whose
    centre lies above the ground elevation of their x band are removed.
    ground lists (x upper bound, elevation) pairs.
    """
    mesh = boxMesh((0.0, 0.0, 0.0), (20.0, 2.0, 5.0), size)
    bounds = np.array([g[0] for g in ground])
    elevation = np.array([g[1] for g in ground])
    above = []
    for e in range(mesh.nElements):
        x, _, z = scalingCentre(mesh, e)
        band = min(np.searchsorted(bounds, x), len(ground) - 1)
        if z > elevation[band]:
            above.append(e)
    mesh = removeElements(mesh, above)
    return mesh


def rectangularDamMesh(baseSize=0.125, levels=2,
                       refineRegion=((0.25, 0.0, 0.375), (0.5, 0.125, 1.0))):
    r"""
    Rectangular dam x in [0, 0.5], z in [0, 1], one base cell thick in
    y, octree-refined near the downstream face above the tailwater.
    """
    thickness = baseSize
    base = (int(round(0.5 / baseSize)), 1, int(round(1.0 / baseSize)))
    region = (refineRegion[0], (refineRegion[1][0], thickness,
                                refineRegion[1][2]))
    return octreeRefineBox(((0.0, 0.0, 0.0), (0.5, thickness, 1.0)), base,
                           region, levels)


def trapezoidalDamMesh(nx=28, nz=12, height=6.0, crest=(6.0, 8.0),
                       base=14.0, thickness=0.5):
    r"""
    Trapezoidal dam section meshed by a mapped quadrilateral grid and
    extruded one layer in y. Node sets 'upstream_face' and
    'downstream_face' hold the slope nodes.
    """
    left = crest[0] / height
    right = (base - crest[1]) / height
    points = []
    for j in range(nz + 1):
        z = height * j / nz
        xl, xr = left * z, base - right * z
        for i in range(nx + 1):
            points.append((xl + (xr - xl) * i / nx, z))
    points = np.array(points)

    def pid(i, j):
        return j * (nx + 1) + i

    quads = [(pid(i, j), pid(i + 1, j), pid(i + 1, j + 1), pid(i, j + 1))
             for j in range(nz) for i in range(nx)]
    mesh = extrudeQuadMesh(points, quads, 0.0, thickness)
    nP = len(points)
    upstream = [layer * nP + pid(0, j) for layer in (0, 1)
                for j in range(nz + 1)]
    downstream = [layer * nP + pid(nx, j) for layer in (0, 1)
                  for j in range(nz + 1)]
    return _addSets(mesh, {"upstream_face": sorted(upstream),
                           "downstream_face": sorted(downstream)})


def columnMesh(size=0.05, length=1.0):
    """One-cell-wide column of cubes along z."""
    n = max(1, int(round(length / size)))
    return hexGridMesh((0.0, 0.0, 0.0), (size, size, length), (1, 1, n))


MESH_GENERATORS = {"patch": patchMesh,
                   "box": boxMesh,
                   "concrete_dam": concreteDamMesh,
                   "inclusion": inclusionMesh,
                   "transient_foundation": transientFoundationMesh,
                   "rectangular_dam": rectangularDamMesh,
                   "trapezoidal_dam": trapezoidalDamMesh,
                   "column": columnMesh}


#%% shipped cases

def _patchCase():
    case = {"analysis": "steady",
            "materials": [{"name": "soil", "k": 1.0}],
            "boundary": {"dirichlet": [{"node_set": "zmin", "head": 30.0},
                                       {"node_set": "zmax", "head": 70.0}],
                         "monitors": [{"label": "centre",
                                       "point": [0.55, 0.7, 2.0]}]}}
    expected = {"monitors": {"centre": {"value": 30.0 + 40.0 * 2.0 / 3.0,
                                        "rtol": 1e-4}},
                "nodal_field": {"function": {"name": "affine", "params": {
                    "value": 30.0, "gradient": [0.0, 0.0, 40.0 / 3.0]}},
                    "rtol": 1e-4}}
    return case, expected, {"generator": "patch", "params": {}}


def _concreteDamCase(size=10.0, octreeLevels=0):
    flat = {"name": "flat_dam", "params": {}}
    case = {"analysis": "steady",
            "materials": [{"name": "foundation", "k": 1e-7}],
            "boundary": {
                "dirichlet": [{"node_set": "upstream_bed", "head": 80.0},
                              {"node_set": "downstream_bed", "head": 20.0},
                              {"node_set": "far_field", "function": flat}],
                "monitors": [{"label": "m1", "point": [100.0, 80.0, 40.0]},
                             {"label": "m2", "point": [140.0, 80.0, 40.0]}]}}
    expected = {"monitors": {"m1": {"value": 60.0, "rtol": 0.02},
                             "m2": {"value": 40.0, "rtol": 0.02}},
                "reference_solver": {"name": "tet_fem", "rtol": 0.02}}
    return case, expected, {"generator": "concrete_dam",
                            "params": {"size": size,
                                       "octreeLevels": octreeLevels}}


def _concreteDamOctreeCase():
    # 40 m base cells split three times to 5 m between x = 40 and 200
    case, expected, generator = _concreteDamCase(octreeLevels=3)
    generator["params"].update({"baseSize": 40.0,
                                "refineRegion": [[40.0, 0.0, -10.0],
                                                 [200.0, 160.0, 70.0]]})
    expected.pop("reference_solver")
    expected["uniform_comparison"] = {"size": 5.0, "max_error_ratio": 1.1}
    return case, expected, generator


def _inclusionCase():
    case = {"analysis": "steady",
            "materials": [{"name": "soil", "k": 1e-7}],
            "boundary": {
                "dirichlet": [{"node_set": "xmin", "head": 1.0},
                              {"node_set": "xmax", "head": 0.0}],
                "monitors": [{"label": "upstream",
                              "point": [0.25, 0.5, 0.5]},
                             {"label": "above",
                              "point": [0.5, 0.5, 0.8125]},
                             {"label": "downstream",
                              "point": [0.75, 0.5, 0.5]}]}}
    expected = {"reference_solver": {"name": "tet_fem", "rtol": 0.02}}
    return case, expected, {"generator": "inclusion", "params": {}}


def _transientFoundationCase():
    case = {"analysis": "transient",
            "materials": [{"name": "foundation", "k": 1.02e-3, "Ss": 1e-3}],
            "boundary": {
                "dirichlet": [{"node_set": "xmin", "series": {
                    "times": [0.0, 600.0], "values": [1.0, 4.0]}},
                              {"node_set": "xmax", "head": 0.0}],
                "monitors": [{"label": "p1", "point": [5.0, 1.0, 1.0]},
                             {"label": "p2", "point": [10.0, 1.0, 1.0]},
                             {"label": "p3", "point": [15.0, 1.0, 1.0]}]},
            "time": {"dt": 10.0, "n_steps": 120, "initial": "steady"}}
    # the ramp ends 60 steps before the last one
    expected = {"steady_limit": {"rtol": 1e-4}}
    return case, expected, {"generator": "transient_foundation",
                            "params": {}}


def _rectangularDamCase():
    case = {"analysis": "free_surface",
            "materials": [{"name": "dam", "k": 1.0}],
            "boundary": {"dirichlet": []},
            "free_surface": {"upstream_set": "xmin", "upstream_head": 1.0,
                             "downstream_set": "xmax",
                             "downstream_head": 0.5, "max_iters": 50}}
    expected = {"exit_elevation": {"value": RECTANGULAR_DAM_EXIT,
                                   "rtol": 0.01}}
    return case, expected, {"generator": "rectangular_dam", "params": {}}


def _trapezoidalDamCase():
    case = {"analysis": "free_surface",
            "materials": [{"name": "dam", "k": 1.0}],
            "boundary": {"dirichlet": []},
            "free_surface": {"upstream_set": "upstream_face",
                             "upstream_head": 5.0,
                             "downstream_set": "downstream_face",
                             "downstream_head": 1.0}}
    # exit elevation within one node spacing of a mesh twice as fine
    expected = {"reference_mesh": {"params": {"nx": 56, "nz": 24},
                                   "atol": 0.5, "rtol": 0.0}}
    return case, expected, {"generator": "trapezoidal_dam", "params": {}}


def _columnCase():
    case = {"analysis": "transient",
            "materials": [{"name": "soil", "k": 1.0, "Ss": 1.0}],
            "boundary": {
                "dirichlet": [{"node_set": "zmin", "head": 1.0},
                              {"node_set": "zmax", "head": 2.0}],
                "monitors": [{"label": "z075",
                              "point": [0.025, 0.025, 0.75]}]},
            "time": {"dt": 0.01, "n_steps": 20, "initial": 1.0}}
    expected = {"monitor_history": {
        "function": {"name": "column_diffusion", "params": {}},
        "rtol": 0.02, "from_step": 5}}
    return case, expected, {"generator": "column", "params": {}}


BENCHMARKS = {"patch": _patchCase,
              "concrete_dam": _concreteDamCase,
              "concrete_dam_octree": _concreteDamOctreeCase,
              "inclusion": _inclusionCase,
              "transient_foundation": _transientFoundationCase,
              "rectangular_dam": _rectangularDamCase,
              "trapezoidal_dam": _trapezoidalDamCase,
              "column": _columnCase}


def writeBenchmark(name, directory):
    r"""
    Write <name>.json, <name>.mesh.json and <name>.expected.json (when
    there are expected values) into directory.

    Returns
    -------
    str
        Path of the case file.
    """
    if name not in BENCHMARKS:
        raise ConfigError(f"unknown benchmark {name!r}; choose from "
                          f"{', '.join(sorted(BENCHMARKS))}")
    os.makedirs(directory, exist_ok=True)
    case, expected, generator = BENCHMARKS[name]()
    mesh = MESH_GENERATORS[generator["generator"]](**generator["params"])
    meshFile = f"{name}.mesh.json"
    saveMesh(mesh, os.path.join(directory, meshFile))
    case = dict(case, name=name, mesh=meshFile, mesh_generator=generator,
                output={"directory": f"{name}_results"})
    casePath = os.path.join(directory, f"{name}.json")
    with open(casePath, "w") as f:
        json.dump(case, f, indent=2)
    if expected:
        with open(os.path.join(directory, f"{name}.expected.json"),
                  "w") as f:
            json.dump(expected, f, indent=2)
    logger.info("wrote benchmark %s (%d elements) to %s", name,
                mesh.nElements, directory)
    return casePath


#%% comparison against expected values

def _check(value, reference, rtol, atol=0.0):
    error = abs(value - reference) / max(abs(reference), 1e-300)
    return {"value": float(value), "reference": float(reference),
            "relError": float(error), "rtol": float(rtol),
            "pass": bool(abs(value - reference)
                         <= atol + rtol * abs(reference))}


def _bound(value, limit):
    """value <= limit, reported like a tolerance check."""
    excess = max(value - limit, 0.0) / max(abs(limit), 1e-300)
    return {"value": float(value), "reference": float(limit),
            "relError": float(excess), "rtol": 0.0,
            "pass": bool(value <= limit)}


def _monitorErrors(monitors, references):
    return np.abs(monitors - references) / np.abs(references)


def compareExpected(case, result, state=None, references=None):
    r"""
    Compare a run with the case's expected values.

    Parameters
    ----------
    case : AnalysisCase
        Case with case.expected loaded.

    result : FieldResult
        Run result.

    state : FreeSurfaceState
        Free-surface state, for 'exit_elevation'. Default is None.

    references : dict
        Reference runs by expected-value key, each a (FieldResult,
        FreeSurfaceState or None) pair: 'reference_solver' (tetrahedron
        solve), 'reference_mesh' (the case on another mesh),
        'steady_limit' (steady solve with the final boundary values)
        and 'uniform_comparison' (the case on a uniform mesh). Checks
        without their reference are skipped. Default is None.

    Returns
    -------
    dict
        Check name to {value, reference, relError, rtol, pass}.
    """
    expected = case.expected or {}
    references = references or {}
    checks = {}
    labels = list(result.monitorLabels)
    for label, spec in expected.get("monitors", {}).items():
        if label not in labels:
            raise ConfigError(f"expected monitor {label!r} is not defined "
                              f"in the case")
        value = result.monitors[-1, labels.index(label)]
        checks[f"monitor {label}"] = _check(value, spec["value"],
                                            spec["rtol"])
    if "nodal_field" in expected:
        spec = expected["nodal_field"]
        fn = spec["function"]
        reference = HEAD_FUNCTIONS[fn["name"]](case.mesh.nodes,
                                               **fn.get("params", {}))
        heads = result.finalHeads
        errors = np.abs(heads - reference) / np.maximum(np.abs(reference),
                                                        1e-300)
        worst = int(np.argmax(errors))
        checks["nodal field"] = _check(heads[worst], reference[worst],
                                       spec["rtol"])
    if "monitor_history" in expected:
        spec = expected["monitor_history"]
        fn = spec["function"]
        points = np.array([m.point for m in case.boundary.monitors])
        start = spec.get("from_step", 0)
        stride = case.time.outputStride if case.time else 1
        worst = None
        for row, t in enumerate(result.times):
            if row * stride < start:
                continue
            reference = HEAD_FUNCTIONS[fn["name"]](
                points, t=t - result.times[0], **fn.get("params", {}))
            for j in range(len(points)):
                check = _check(result.monitors[row, j], reference[j],
                               spec["rtol"])
                if worst is None or check["relError"] > worst["relError"]:
                    worst = check
        if worst is not None:
            checks["monitor history"] = worst
    if "exit_elevation" in expected and state is not None:
        spec = expected["exit_elevation"]
        checks["exit elevation"] = _check(state.exitElevation, spec["value"],
                                          spec["rtol"])
    if "reference_solver" in references:
        spec = expected["reference_solver"]
        reference, _ = references["reference_solver"]
        for j, label in enumerate(labels):
            checks[f"{spec['name']} {label}"] = _check(
                result.monitors[-1, j], reference.monitors[-1, j],
                spec["rtol"])
    if "reference_mesh" in references:
        spec = expected["reference_mesh"]
        reference, referenceState = references["reference_mesh"]
        rtol, atol = spec.get("rtol", 0.0), spec.get("atol", 0.0)
        if state is not None and referenceState is not None:
            checks["reference mesh exit elevation"] = _check(
                state.exitElevation, referenceState.exitElevation, rtol,
                atol)
        for j, label in enumerate(labels):
            checks[f"reference mesh {label}"] = _check(
                result.monitors[-1, j], reference.monitors[-1, j], rtol,
                atol)
    if "steady_limit" in references:
        spec = expected["steady_limit"]
        reference, _ = references["steady_limit"]
        for j, label in enumerate(labels):
            checks[f"steady limit {label}"] = _check(
                result.monitors[-1, j], reference.monitors[-1, j],
                spec["rtol"])
    if "uniform_comparison" in references:
        spec = expected["uniform_comparison"]
        uniform, _ = references["uniform_comparison"]
        monitorSpecs = expected.get("monitors", {})
        for label, monitorSpec in monitorSpecs.items():
            j = labels.index(label)
            ratio = _monitorErrors(result.monitors[-1, j],
                                   monitorSpec["value"]) \
                / _monitorErrors(uniform.monitors[-1, j],
                                 monitorSpec["value"])
            checks[f"uniform error ratio {label}"] = _bound(
                ratio, spec["max_error_ratio"])
        # fluxes hold one row per element
        checks["uniform element count"] = _bound(
            result.fluxes.shape[1], uniform.fluxes.shape[1] - 1)
    for name, check in checks.items():
        log = logger.info if check["pass"] else logger.warning
        log("%s: %.6g vs %.6g (relative error %.3e, tolerance %.1e) %s",
            name, check["value"], check["reference"], check["relError"],
            check["rtol"], "pass" if check["pass"] else "FAIL")
    return checks
