#!/usr/bin/env python3
# -*- coding: utf-8 -*-
"""
Created on Thu Sep 24 16:20:12 2026

Result writers: legacy VTK unstructured grids with polyhedron cells,
monitor and free-surface CSV tables, the JSON run summary, an HDF5
archive of the fields, and element matrix dumps.

@author: PSBFEM developers
"""

# python modules
import os
import json
import logging
import numpy as np
import h5py as h5

# custom modules
from psbfem.mesh import elementFaceLoops, hexCorners


logger = logging.getLogger(__name__)

# listing all functions declared in this file so that sphinx-automodapi
# correctly documents them and doesn't document imported functions.
__all__ = ["exportVtk",
           "readVtk",
           "writeMonitorCsv",
           "writeSurfaceHistoryCsv",
           "writeSummary",
           "saveResultsHdf",
           "openResultsHdf",
           "dumpElementMatrices",
           ]


# VTK cell types
VTK_POLY_LINE = 4
VTK_HEXAHEDRON = 12
VTK_POLYHEDRON = 42

# significant digits of the CSV tables
CSV_DIGITS = 12


def _fmt(value):
    return f"{value:.{CSV_DIGITS}g}"


def _cellRecord(mesh, e, hexAsNative):
    """Cell type and connectivity (face stream for polyhedra)."""
    if hexAsNative:
        corners = hexCorners(mesh, e)
        if corners is not None:
            return VTK_HEXAHEDRON, corners
    loops = elementFaceLoops(mesh, e)
    stream = [len(loops)]
    for _, loop in loops:
        stream.append(len(loop))
        stream.extend(int(n) for n in loop)
    return VTK_POLYHEDRON, stream


def _writeArrays(f, data, count, where):
    for name, values in data.items():
        values = np.asarray(values, dtype=float)
        if values.shape[0] != count:
            raise ValueError(f"{where} array {name!r} has {values.shape[0]} "
                             f"entries, expected {count}")
        label = name.replace(" ", "_")
        if values.ndim == 1:
            f.write(f"SCALARS {label} double 1\nLOOKUP_TABLE default\n")
            f.write("\n".join(_fmt(v) for v in values) + "\n")
        else:
            f.write(f"VECTORS {label} double\n")
            for row in values:
                f.write(" ".join(_fmt(v) for v in row) + "\n")


def exportVtk(mesh, path, pointData=None, cellData=None, polyline=None,
              hexAsNative=True, title="psbfem results"):
    r"""
    Write a legacy ASCII VTK unstructured grid. Polyhedra use the
    polyhedron cell type with the face-stream encoding
    [nFaces, n0, i..., n1, j..., ...]; hexahedra are written as native
    hexahedron cells unless hexAsNative is False.

    Parameters
    ----------
    mesh : Mesh
        Mesh to write.

    path : str
        Output .vtk file.

    pointData : dict
        Name to (nNodes,) or (nNodes, 3) arrays. Default is None.

    cellData : dict
        Name to (nElements,) or (nElements, 3) arrays. Default is None.

    polyline : numpy.ndarray
        (m, 3) points, written to a separate '<stem>_surface.vtk'
        polydata file. Default is None.

    hexAsNative : bool
        Write hexahedral elements as VTK hexahedra. Default is True.

    title : str
        Header line. Default is 'psbfem results'.

    Returns
    -------
    list of str
        Written file paths.
    """
    records = [_cellRecord(mesh, e, hexAsNative)
               for e in range(mesh.nElements)]
    size = sum(len(conn) + 1 for _, conn in records)
    with open(path, "w") as f:
        f.write(f"# vtk DataFile Version 4.2\n{title}\nASCII\n")
        f.write("DATASET UNSTRUCTURED_GRID\n")
        f.write(f"POINTS {mesh.nNodes} double\n")
        for x in mesh.nodes:
            f.write(" ".join(_fmt(c) for c in x) + "\n")
        f.write(f"CELLS {mesh.nElements} {size}\n")
        for _, conn in records:
            f.write(f"{len(conn)} " + " ".join(str(c) for c in conn) + "\n")
        f.write(f"CELL_TYPES {mesh.nElements}\n")
        f.write("\n".join(str(t) for t, _ in records) + "\n")
        if pointData:
            f.write(f"POINT_DATA {mesh.nNodes}\n")
            _writeArrays(f, pointData, mesh.nNodes, "point")
        if cellData:
            f.write(f"CELL_DATA {mesh.nElements}\n")
            _writeArrays(f, cellData, mesh.nElements, "cell")
    written = [path]
    if polyline is not None and len(polyline):
        polyline = np.asarray(polyline, dtype=float)
        linePath = os.path.splitext(path)[0] + "_surface.vtk"
        with open(linePath, "w") as f:
            f.write(f"# vtk DataFile Version 4.2\n{title} free surface\n"
                    f"ASCII\nDATASET POLYDATA\n")
            f.write(f"POINTS {len(polyline)} double\n")
            for x in polyline:
                f.write(" ".join(_fmt(c) for c in x) + "\n")
            f.write(f"LINES 1 {len(polyline) + 1}\n{len(polyline)} "
                    + " ".join(str(i) for i in range(len(polyline))) + "\n")
        written.append(linePath)
    logger.debug("wrote %s", ", ".join(written))
    return written


def readVtk(path):
    r"""
    Parse a legacy ASCII unstructured grid written by exportVtk().

    Returns
    -------
    dict
        'nodes' (n, 3), 'cells' (list of connectivity lists, face
        streams for polyhedra), 'cellTypes' and 'pointData' / 'cellData'
        dicts of arrays.
    """
    with open(path, "r") as f:
        tokens = f.read().split("\n")
    lines = iter(tokens[3:])
    out = {"pointData": {}, "cellData": {}}
    section = None
    for line in lines:
        words = line.split()
        if not words:
            continue
        key = words[0]
        if key == "POINTS":
            n = int(words[1])
            out["nodes"] = np.array([[float(v) for v in next(lines).split()]
                                     for _ in range(n)])
        elif key == "CELLS":
            out["cells"] = [[int(v) for v in next(lines).split()[1:]]
                            for _ in range(int(words[1]))]
        elif key == "CELL_TYPES":
            out["cellTypes"] = [int(next(lines)) for _ in range(int(words[1]))]
        elif key in ("POINT_DATA", "CELL_DATA"):
            section = "pointData" if key == "POINT_DATA" else "cellData"
            count = int(words[1])
        elif key == "SCALARS":
            next(lines)
            out[section][words[1]] = np.array([float(next(lines))
                                               for _ in range(count)])
        elif key == "VECTORS":
            out[section][words[1]] = np.array(
                [[float(v) for v in next(lines).split()]
                 for _ in range(count)])
    return out


def writeMonitorCsv(path, result):
    """Monitor histories, one row per output time, 12 significant digits."""
    with open(path, "w") as f:
        f.write(",".join(["time"] + list(result.monitorLabels)) + "\n")
        for t, row in zip(result.times, result.monitors):
            f.write(",".join([_fmt(t)] + [_fmt(v) for v in row]) + "\n")
    return


def writeSurfaceHistoryCsv(path, state):
    """Free-surface elevation of every column at every iteration."""
    xs, ys = state.phi.xs, state.phi.ys
    with open(path, "w") as f:
        f.write("iteration,x,y,phi\n")
        for iteration, values, *_ in state.history:
            for i, x in enumerate(xs):
                for j, y in enumerate(ys):
                    f.write(f"{iteration},{_fmt(x)},{_fmt(y)},"
                            f"{_fmt(values[i, j])}\n")
    return


def _jsonable(value):
    if isinstance(value, dict):
        return {str(k): _jsonable(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_jsonable(v) for v in value]
    if isinstance(value, np.ndarray):
        return _jsonable(value.tolist())
    if isinstance(value, (np.floating, float)):
        value = float(value)
        return value if np.isfinite(value) else None
    if isinstance(value, np.integer):
        return int(value)
    if isinstance(value, np.bool_):
        return bool(value)
    return value


def writeSummary(path, summary):
    """JSON summary with sorted keys; non-finite numbers become null."""
    with open(path, "w") as f:
        json.dump(_jsonable(summary), f, indent=2, sort_keys=True)
        f.write("\n")
    return


def saveResultsHdf(path, mesh, result, state=None):
    r"""
    Archive a run in HDF5: node coordinates, output times, nodal heads,
    element fluxes and monitor histories, plus the free-surface grid
    when a state is given.
    """
    with h5.File(path, "w") as f:
        f.create_dataset("nodes", data=mesh.nodes)
        f.create_dataset("times", data=result.times)
        f.create_dataset("heads", data=result.heads, compression="gzip")
        f.create_dataset("fluxes", data=result.fluxes, compression="gzip")
        monitors = f.create_group("monitors")
        for i, label in enumerate(result.monitorLabels):
            monitors.create_dataset(label, data=result.monitors[:, i])
        if result.fixedNodes is not None:
            f.create_dataset("fixedNodes", data=result.fixedNodes)
        if state is not None:
            surface = f.create_group("freeSurface")
            surface.create_dataset("x", data=state.phi.xs)
            surface.create_dataset("y", data=state.phi.ys)
            surface.create_dataset("phi", data=state.phi.values)
            surface.create_dataset("overflowNodes", data=state.overflowSet)
            surface.create_dataset("wet", data=state.wetFlags)
            surface.attrs["exitElevation"] = state.exitElevation
            surface.attrs["iterations"] = state.iteration
            surface.attrs["converged"] = state.converged
    return


def openResultsHdf(path):
    """Read an archive written by saveResultsHdf() into a dict."""
    out = {}
    with h5.File(path, "r") as f:
        for key in ("nodes", "times", "heads", "fluxes", "fixedNodes"):
            if key in f:
                out[key] = f[key][...]
        out["monitors"] = {label: f["monitors"][label][...]
                           for label in f["monitors"]}
        if "freeSurface" in f:
            group = f["freeSurface"]
            surface = {key: group[key][...] for key in group}
            surface.update({key: group.attrs[key] for key in group.attrs})
            out["freeSurface"] = surface
    return out


def dumpElementMatrices(operators, directory):
    r"""
    Write E0, E1, E2, M0, K and M of every element as text files
    element_<id>_<name>.txt and collect them in elements.h5.
    """
    os.makedirs(directory, exist_ok=True)
    with h5.File(os.path.join(directory, "elements.h5"), "w") as f:
        for e, op in enumerate(operators):
            matrices = {"E0": op.coeffs.E0, "E1": op.coeffs.E1,
                        "E2": op.coeffs.E2, "M0": op.coeffs.M0,
                        "K": op.K, "M": op.M}
            group = f.create_group(f"element_{e:06d}")
            group.create_dataset("dofMap", data=op.dofMap)
            group.create_dataset("eigenvalues",
                                 data=np.real(op.modalBasis.eigenvalues))
            for name, matrix in matrices.items():
                np.savetxt(os.path.join(directory,
                                        f"element_{e:06d}_{name}.txt"),
                           matrix, fmt="%.17g")
                group.create_dataset(name, data=matrix)
    logger.info("dumped matrices of %d elements to %s", len(operators),
                directory)
    return
