#!/usr/bin/env python3
# -*- coding: utf-8 -*-
"""
Created on Wed Sep 23 14:02:51 2026

Analysis case files. A case is a JSON document naming the mesh, the
materials, the boundary conditions and the analysis kind; loadCase()
validates it field by field and resolves it into an AnalysisCase ready
for the solvers. Reference values live in a separate
<case>.expected.json file.

@author: PSBFEM developers
"""

# python modules
import os
import json
import logging
import tempfile
from dataclasses import dataclass, field
import numpy as np

# custom modules
from psbfem.errors import ConfigError
from psbfem.kernel import Material
from psbfem.mesh import loadMesh, checkMesh
from psbfem.solver import (BoundarySpec, DirichletCondition, FluxCondition,
                           Monitor, TimeSeries)
from psbfem.freeSurface import FreeSurfaceConfig, DamBoundaries
from psbfem.benchmarks import MESH_GENERATORS, HEAD_FUNCTIONS


logger = logging.getLogger(__name__)

# listing all functions declared in this file so that sphinx-automodapi
# correctly documents them and doesn't document imported functions.
__all__ = ["TimeConfig",
           "OutputConfig",
           "AnalysisCase",
           "scratchDir",
           "expectedPath",
           "loadExpected",
           "buildMesh",
           "resolveBoundary",
           "caseFromDict",
           "loadCase",
           ]


ANALYSIS_KINDS = ("steady", "transient", "free_surface")
SOLVER_METHODS = ("direct", "cg")
_MISSING = object()


@dataclass
class TimeConfig:
    """Uniform time stepping of a transient case."""
    dt: float
    nSteps: int
    outputStride: int = 1
    t0: float = 0.0
    initial: object = "steady"


@dataclass
class OutputConfig:
    r"""
    Result files written by `psbfem run`. directory is resolved against
    the case file; the flags switch individual writers.
    """
    directory: str = "results"
    vtk: bool = True
    csv: bool = True
    hdf5: bool = True
    summary: bool = True


@dataclass
class AnalysisCase:
    r"""
    Fully resolved analysis case.

    name : str
        Case label, the file stem by default.

    mesh : Mesh
        Analysis mesh.

    materials : dict
        Material by name.

    elementMaterials : str or list
        One material name for all elements, or one name per element.

    kind : str
        'steady', 'transient' or 'free_surface'.

    boundary : BoundarySpec
        Dirichlet, flux and monitor definitions.

    time : TimeConfig
        Required for transient cases.

    freeSurface, dam : FreeSurfaceConfig, DamBoundaries
        Required for free-surface cases.

    solver : str
        Linear solver, 'direct' or 'cg'.

    workers : int
        Processes for element operators.

    gaussOrder : int
        Triangle rule order of the face integrals.

    output : OutputConfig
        Result file settings.

    expected : dict
        Contents of the expected-values file, or None.

    source : dict
        The raw JSON document, kept for parametric reruns.

    path : str
        Case file path, or None.
    """
    name: str
    mesh: object
    materials: dict
    elementMaterials: object
    kind: str
    boundary: BoundarySpec
    time: TimeConfig = None
    freeSurface: FreeSurfaceConfig = None
    dam: DamBoundaries = None
    solver: str = "direct"
    workers: int = 1
    gaussOrder: int = 3
    output: OutputConfig = field(default_factory=OutputConfig)
    expected: dict = None
    source: dict = None
    path: str = None

    @property
    def baseDir(self):
        return os.path.dirname(os.path.abspath(self.path)) if self.path \
            else os.getcwd()

    def outputDir(self):
        """Absolute output directory."""
        return os.path.join(self.baseDir, self.output.directory)


def scratchDir():
    """Scratch directory from PSBFEM_SCRATCH, or the system temp dir."""
    return os.environ.get("PSBFEM_SCRATCH") or tempfile.gettempdir()


def expectedPath(casePath):
    """<stem>.expected.json next to the case file."""
    stem = casePath[:-5] if casePath.endswith(".json") else casePath
    return stem + ".expected.json"


def loadExpected(casePath):
    """Expected-values document of a case, or None if there is none."""
    path = expectedPath(casePath)
    if not os.path.exists(path):
        return None
    return _readJson(path)


def _readJson(path):
    try:
        with open(path, "r") as f:
            return json.load(f)
    except json.JSONDecodeError as err:
        raise ConfigError(f"{path}: line {err.lineno}, column {err.colno}: "
                          f"{err.msg}") from err
    except OSError as err:
        raise ConfigError(f"cannot read {path}: {err.strerror}") from err


#%% typed field access with JSON-path messages

def _get(obj, key, path, types, default=_MISSING):
    where = f"{path}.{key}" if path else key
    if not isinstance(obj, dict):
        raise ConfigError(f"{path or 'case'} must be an object")
    if key not in obj:
        if default is _MISSING:
            raise ConfigError(f"{where} is required")
        return default
    value = obj[key]
    if types is float and isinstance(value, int) \
            and not isinstance(value, bool):
        value = float(value)
    if types is not None and not isinstance(value, types) \
            or isinstance(value, bool) and types in (int, float):
        raise ConfigError(f"{where} has the wrong type "
                          f"({type(value).__name__})")
    return value


def _vector(value, where, length=3):
    try:
        array = np.asarray(value, dtype=float)
    except (TypeError, ValueError) as err:
        raise ConfigError(f"{where} must be numeric") from err
    if array.shape != (length,) or not np.all(np.isfinite(array)):
        raise ConfigError(f"{where} must be a list of {length} numbers")
    return array


def _series(obj, where):
    times = _get(obj, "times", where, list)
    values = _get(obj, "values", where, list)
    try:
        return TimeSeries(times, values)
    except (TypeError, ValueError) as err:
        raise ConfigError(f"{where}: {err}") from err
    except ConfigError as err:
        raise ConfigError(f"{where}: {err}") from err


#%% sections

def buildMesh(spec, baseDir, where="mesh"):
    r"""
    Mesh from a case 'mesh' entry: a file path (json or inp) relative to
    the case file, or {"generator": NAME, "params": {...}} naming a
    parametric generator of psbfem.benchmarks.
    """
    if isinstance(spec, str):
        path = spec if os.path.isabs(spec) else os.path.join(baseDir, spec)
        if not os.path.exists(path):
            raise ConfigError(f"{where}: mesh file {path} not found")
        return loadMesh(path)
    if isinstance(spec, dict):
        name = _get(spec, "generator", where, str)
        params = _get(spec, "params", where, dict, {})
        if name not in MESH_GENERATORS:
            raise ConfigError(f"{where}.generator: unknown generator "
                              f"{name!r}")
        try:
            mesh = MESH_GENERATORS[name](**params)
        except TypeError as err:
            raise ConfigError(f"{where}.params: {err}") from err
        checkMesh(mesh)
        return mesh
    raise ConfigError(f"{where} must be a path or a generator object")


def _materials(data):
    entries = _get(data, "materials", "", list)
    if not entries:
        raise ConfigError("materials must not be empty")
    materials = {}
    for i, entry in enumerate(entries):
        where = f"materials[{i}]"
        name = _get(entry, "name", where, str)
        k = _get(entry, "k", where, (int, float, list))
        if isinstance(k, list):
            k = np.asarray(k, dtype=float)
            if k.shape == (3,):
                k = np.diag(k)
        Ss = _get(entry, "Ss", where, float, 0.0)
        if name in materials:
            raise ConfigError(f"{where}.name: duplicate material {name!r}")
        materials[name] = Material(name, k, Ss)
    return materials


def _elementMaterials(data, materials, mesh):
    value = data.get("element_materials", next(iter(materials)))
    if isinstance(value, str):
        names = [value]
    elif isinstance(value, list):
        if len(value) != mesh.nElements:
            raise ConfigError(f"element_materials has {len(value)} entries "
                              f"for {mesh.nElements} elements")
        names = value
    else:
        raise ConfigError("element_materials must be a name or a list")
    for name in set(names):
        if name not in materials:
            raise ConfigError(f"element_materials: unknown material "
                              f"{name!r}")
    return value


def _dirichletValue(entry, where, mesh, nodeSet):
    if "head" in entry:
        return _get(entry, "head", where, float)
    if "series" in entry:
        return _series(_get(entry, "series", where, dict), f"{where}.series")
    if "values" in entry:
        values = _get(entry, "values", where, list)
        if len(values) != len(mesh.nodeSets[nodeSet]):
            raise ConfigError(f"{where}.values has {len(values)} entries for "
                              f"{len(mesh.nodeSets[nodeSet])} nodes")
        return np.asarray(values, dtype=float)
    if "function" in entry:
        fn = _get(entry, "function", where, dict)
        name = _get(fn, "name", f"{where}.function", str)
        params = _get(fn, "params", f"{where}.function", dict, {})
        if name not in HEAD_FUNCTIONS:
            raise ConfigError(f"{where}.function.name: unknown head "
                              f"function {name!r}")
        points = mesh.nodes[mesh.nodeSets[nodeSet]]
        try:
            return np.asarray(HEAD_FUNCTIONS[name](points, **params))
        except TypeError as err:
            raise ConfigError(f"{where}.function.params: {err}") from err
    raise ConfigError(f"{where} needs one of head, series, values or "
                      f"function")


def resolveBoundary(data, mesh):
    """BoundarySpec of a case document against a mesh (or TetMesh)."""
    bc = _get(data, "boundary", "", dict)
    dirichlet = []
    for i, entry in enumerate(_get(bc, "dirichlet", "boundary", list, [])):
        where = f"boundary.dirichlet[{i}]"
        nodeSet = _get(entry, "node_set", where, str)
        if nodeSet not in mesh.nodeSets:
            raise ConfigError(f"{where}.node_set: unknown node set "
                              f"{nodeSet!r}")
        dirichlet.append(DirichletCondition(
            nodeSet, _dirichletValue(entry, where, mesh, nodeSet)))
    flux = []
    for i, entry in enumerate(_get(bc, "flux", "boundary", list, [])):
        where = f"boundary.flux[{i}]"
        faceSet = _get(entry, "face_set", where, str)
        if faceSet not in mesh.faceSets:
            raise ConfigError(f"{where}.face_set: unknown face set "
                              f"{faceSet!r}")
        if "series" in entry:
            value = _series(_get(entry, "series", where, dict),
                            f"{where}.series")
        else:
            value = _get(entry, "value", where, float)
        flux.append(FluxCondition(faceSet, value))
    monitors = []
    for i, entry in enumerate(_get(bc, "monitors", "boundary", list, [])):
        where = f"boundary.monitors[{i}]"
        monitors.append(Monitor(_get(entry, "label", where, str),
                                _vector(_get(entry, "point", where, list),
                                        f"{where}.point")))
    labels = [m.label for m in monitors]
    if len(set(labels)) != len(labels):
        raise ConfigError("boundary.monitors: duplicate labels")
    return BoundarySpec(dirichlet, flux, monitors)


def _time(data):
    tc = _get(data, "time", "", dict)
    dt = _get(tc, "dt", "time", float)
    nSteps = _get(tc, "n_steps", "time", int)
    stride = _get(tc, "output_stride", "time", int, 1)
    initial = _get(tc, "initial", "time", (str, int, float), "steady")
    if not dt > 0:
        raise ConfigError("time.dt must be positive")
    if nSteps < 0 or stride < 1:
        raise ConfigError("time.n_steps must be >= 0 and "
                          "time.output_stride >= 1")
    if isinstance(initial, str) and initial != "steady":
        raise ConfigError("time.initial must be 'steady' or a head value")
    return TimeConfig(dt, nSteps, stride, _get(tc, "t0", "time", float, 0.0),
                      initial)


def _freeSurface(data, mesh):
    fs = _get(data, "free_surface", "", dict)
    dam = DamBoundaries(_get(fs, "upstream_set", "free_surface", str),
                        _get(fs, "upstream_head", "free_surface", float),
                        _get(fs, "downstream_set", "free_surface", str),
                        _get(fs, "downstream_head", "free_surface", float))
    for key in ("upstream_set", "downstream_set"):
        if fs[key] not in mesh.nodeSets:
            raise ConfigError(f"free_surface.{key}: unknown node set "
                              f"{fs[key]!r}")
    cfg = FreeSurfaceConfig(
        epsilon=_get(fs, "epsilon", "free_surface", float, None),
        maxIters=_get(fs, "max_iters", "free_surface", int, 100),
        dryFactor=_get(fs, "dry_factor", "free_surface", float, 1e-3),
        relaxation=_get(fs, "relaxation", "free_surface", float, 0.5))
    return cfg, dam


def _output(data):
    out = _get(data, "output", "", dict, {})
    return OutputConfig(
        directory=_get(out, "directory", "output", str, "results"),
        vtk=_get(out, "vtk", "output", bool, True),
        csv=_get(out, "csv", "output", bool, True),
        hdf5=_get(out, "hdf5", "output", bool, True),
        summary=_get(out, "summary", "output", bool, True))


def caseFromDict(data, baseDir=".", name="case", path=None, mesh=None):
    r"""
    Resolve a case document.

    Parameters
    ----------
    data : dict
        Parsed case JSON.

    baseDir : str
        Directory relative paths resolve against. Default is '.'.

    name : str
        Fallback case name. Default is 'case'.

    path : str
        Case file path, kept on the result. Default is None.

    mesh : Mesh
        Prebuilt mesh replacing the 'mesh' entry. Default is None.

    Returns
    -------
    AnalysisCase
    """
    if not isinstance(data, dict):
        raise ConfigError("case must be a JSON object")
    kind = _get(data, "analysis", "", str, "steady")
    if kind not in ANALYSIS_KINDS:
        raise ConfigError(f"analysis must be one of {ANALYSIS_KINDS}, got "
                          f"{kind!r}")
    if mesh is None:
        mesh = buildMesh(_get(data, "mesh", "", (str, dict)), baseDir)
    materials = _materials(data)
    solver = _get(data, "solver", "", dict, {})
    method = _get(solver, "method", "solver", str, "direct")
    if method not in SOLVER_METHODS:
        raise ConfigError(f"solver.method must be one of {SOLVER_METHODS}")
    workers = _get(solver, "workers", "solver", int, 1)
    gaussOrder = _get(solver, "gauss_order", "solver", int, 3)
    case = AnalysisCase(
        name=_get(data, "name", "", str, name),
        mesh=mesh,
        materials=materials,
        elementMaterials=_elementMaterials(data, materials, mesh),
        kind=kind,
        boundary=resolveBoundary(data, mesh),
        solver=method,
        workers=max(1, workers),
        gaussOrder=gaussOrder,
        output=_output(data),
        source=data,
        path=path)
    if kind == "transient":
        case.time = _time(data)
    if kind == "free_surface":
        case.freeSurface, case.dam = _freeSurface(data, mesh)
    elif not case.boundary.dirichlet:
        raise ConfigError("boundary.dirichlet needs at least one entry")
    return case


def loadCase(path, expected=True):
    r"""
    Load and validate a case file.

    Parameters
    ----------
    path : str
        Case JSON path.

    expected : bool
        Also load <case>.expected.json when present. Default is True.

    Returns
    -------
    AnalysisCase
    """
    data = _readJson(path)
    baseDir = os.path.dirname(os.path.abspath(path))
    stem = os.path.splitext(os.path.basename(path))[0]
    case = caseFromDict(data, baseDir, stem, path)
    if expected:
        case.expected = loadExpected(path)
    logger.info("loaded %s case %r: %d elements, %d materials", case.kind,
                case.name, case.mesh.nElements, len(case.materials))
    return case
