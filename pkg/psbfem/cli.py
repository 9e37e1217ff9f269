#!/usr/bin/env python3
# -*- coding: utf-8 -*-
"""
Created on Tue Sep 29 10:12:08 2026

Command-line front end: run an analysis case, run a mesh or time-step
convergence study, validate a mesh, compare element operators with the
oracles, export archived results to VTK and write the benchmark cases.

@author: PSBFEM developers
"""

# python modules
import os
import sys
import json
import time
import logging
import argparse
import numpy as np

# custom modules
from psbfem.errors import (PsbfemError, ConfigError, ConvergenceError,
                           MeshParseError, MeshValidationError)
from psbfem.mesh import loadMesh, validateMesh
from psbfem.kernel import Material
from psbfem.case import loadCase, caseFromDict, buildMesh, resolveBoundary
from psbfem.solver import (computeElementOperators, assembleGlobal,
                           solveSteady, runTransient)
from psbfem.freeSurface import iterateFreeSurface
from psbfem.verification import (tetrahedralize, tetFemSolve, oracleReport,
                                 randomConvexPolyhedron)
from psbfem.benchmarks import (BENCHMARKS, HEAD_FUNCTIONS, writeBenchmark,
                               compareExpected)
from psbfem.export import (exportVtk, writeMonitorCsv,
                           writeSurfaceHistoryCsv, writeSummary,
                           saveResultsHdf, openResultsHdf,
                           dumpElementMatrices)
from psbfem import visualizations


logger = logging.getLogger(__name__)

# listing all functions declared in this file so that sphinx-automodapi
# correctly documents them and doesn't document imported functions.
__all__ = ["runCase",
           "rerunCase",
           "referenceRuns",
           "cmdRun",
           "cmdConvergence",
           "cmdValidateMesh",
           "cmdOracleCheck",
           "cmdExport",
           "cmdBenchmark",
           "buildParser",
           "main",
           ]


EXIT_OK = 0
EXIT_FAILURE = 1
EXIT_CONFIG = 2
EXIT_MESH = 3

LOG_FORMAT = "%(asctime)s %(name)s %(levelname)s: %(message)s"

# oracle agreement required by oracle-check
ORACLE_TOL = 1e-8


def runCase(case, operators=None):
    r"""
    Run the analysis a case asks for.

    Returns
    -------
    result : FieldResult
        Steady, transient or final free-surface solution.

    state : FreeSurfaceState
        None unless the case is a free-surface case.

    operators : list of ElementOperators
        Element operators used.
    """
    if operators is None:
        operators = computeElementOperators(case.mesh, case.materials,
                                            case.elementMaterials,
                                            workers=case.workers,
                                            gaussOrder=case.gaussOrder)
    state = None
    if case.kind == "free_surface":
        result, state = iterateFreeSurface(case, operators=operators)
    else:
        system = assembleGlobal(case.mesh, operators=operators)
        if case.kind == "transient":
            result = runTransient(case, system)
        else:
            result = solveSteady(system, case.boundary, case.solver)
    return result, state, operators


def rerunCase(case, params):
    r"""
    Run a case on its 'mesh_generator' with some generator parameters
    replaced.

    Returns
    -------
    run : AnalysisCase
        The case on the new mesh.

    result, state
        As from runCase.
    """
    generator = case.source.get("mesh_generator")
    if not isinstance(generator, dict):
        raise ConfigError("mesh_generator is required to rebuild the mesh")
    spec = dict(generator, params=dict(generator.get("params", {}),
                                       **params))
    mesh = buildMesh(spec, case.baseDir, "mesh_generator")
    run = caseFromDict(case.source, case.baseDir, case.name, case.path,
                       mesh=mesh)
    run.workers, run.expected = case.workers, case.expected
    result, state, _ = runCase(run)
    return run, result, state


def referenceRuns(case, operators=None):
    r"""
    Reference solutions named by the case's expected values.

    Parameters
    ----------
    case : AnalysisCase
        Case with case.expected loaded.

    operators : list of ElementOperators
        Operators of the case mesh, reused by 'steady_limit'. Default is
        None.

    Returns
    -------
    dict
        Expected-value key to (FieldResult, FreeSurfaceState or None),
        as compareExpected takes them.
    """
    expected = case.expected or {}
    references = {}
    if "reference_solver" in expected and case.kind == "steady":
        tmesh = tetrahedralize(case.mesh)
        bc = resolveBoundary(case.source, tmesh)
        references["reference_solver"] = (
            tetFemSolve(tmesh, case.materials, bc, case.elementMaterials,
                        case.solver), None)
    if "reference_mesh" in expected:
        params = expected["reference_mesh"].get("params", {})
        references["reference_mesh"] = rerunCase(case, params)[1:]
    if "uniform_comparison" in expected:
        size = expected["uniform_comparison"]["size"]
        references["uniform_comparison"] = rerunCase(
            case, {"size": size, "octreeLevels": 0})[1:]
    if "steady_limit" in expected and case.kind == "transient":
        if operators is None:
            operators = computeElementOperators(case.mesh, case.materials,
                                                case.elementMaterials,
                                                workers=case.workers,
                                                gaussOrder=case.gaussOrder)
        system = assembleGlobal(case.mesh, operators=operators)
        tEnd = case.time.t0 + case.time.dt * case.time.nSteps
        references["steady_limit"] = (
            solveSteady(system, case.boundary, case.solver, tEnd), None)
    for key in references:
        logger.info("reference run for %s done", key)
    return references


def _workers(args, case):
    if getattr(args, "workers", None):
        return args.workers
    if "workers" in case.source.get("solver", {}):
        return case.workers
    return os.cpu_count() or 1


def cmdRun(args):
    r"""
    `psbfem run CASE`: run the case, write VTK fields, monitor CSV,
    surface history, the HDF5 archive and a JSON summary, and check the
    results against <case>.expected.json when present.

    Returns the exit status: 0 when every check passes, 1 otherwise.
    """
    case = loadCase(args.case)
    case.workers = _workers(args, case)
    outDir = args.output or case.outputDir()
    os.makedirs(outDir, exist_ok=True)

    start = time.perf_counter()
    operators = computeElementOperators(case.mesh, case.materials,
                                        case.elementMaterials,
                                        workers=case.workers,
                                        gaussOrder=case.gaussOrder)
    elapsedOps = time.perf_counter() - start
    if args.dump_element_matrices:
        dumpElementMatrices(operators, args.dump_element_matrices)
    result, state, _ = runCase(case, operators)

    references = referenceRuns(case, operators)
    checks = compareExpected(case, result, state, references)

    mesh = case.mesh
    heads = result.finalHeads
    fluxes = result.fluxes[-1]
    stem = os.path.join(outDir, case.name)
    if case.output.vtk:
        polyline = None
        if state is not None:
            polyline = np.column_stack([
                state.phi.xs, np.full(len(state.phi.xs), state.phi.ys[0]),
                state.phi.values[:, 0]])
        exportVtk(mesh, stem + ".vtk",
                  pointData={"head": heads,
                             "pressure_head": heads - mesh.nodes[:, 2]},
                  cellData={"flux": fluxes,
                            "flux_magnitude": np.linalg.norm(fluxes,
                                                             axis=1)},
                  polyline=polyline)
    if case.output.csv:
        if result.monitorLabels:
            writeMonitorCsv(stem + "_monitors.csv", result)
        if state is not None:
            writeSurfaceHistoryCsv(stem + "_surface_history.csv", state)
    if case.output.hdf5:
        saveResultsHdf(stem + ".h5", mesh, result, state)

    summary = {"case": case.name,
               "analysis": case.kind,
               "nElements": mesh.nElements,
               "nNodes": mesh.nNodes,
               "residual": result.residual,
               "maxPrincipleOk": result.maxPrincipleOk,
               "monitors": {label: result.monitors[-1, j]
                            for j, label in enumerate(result.monitorLabels)},
               "checks": checks,
               "passed": all(c["pass"] for c in checks.values())}
    if state is not None:
        summary.update({"iterations": state.iteration,
                        "converged": state.converged,
                        "exitElevation": state.exitElevation,
                        "seepageNodes": int(state.overflowSet.size),
                        "oscillations": state.oscillations})
    if case.kind == "transient":
        summary["nSteps"] = case.time.nSteps
    if case.output.summary:
        writeSummary(stem + "_summary.json", summary)
        timings = dict(result.timings, elementOperators=elapsedOps,
                       total=time.perf_counter() - start)
        writeSummary(stem + "_timings.json", timings)

    if args.plots:
        if case.kind == "transient" and result.monitorLabels:
            visualizations.plotMonitorHistories(result, saveDir=outDir,
                                                showFlag=False)
        if state is not None:
            visualizations.plotFreeSurface(state, saveDir=outDir,
                                           showFlag=False)

    logger.info("results written to %s", outDir)
    if state is not None and not state.converged:
        raise ConvergenceError(f"free surface not converged after "
                               f"{state.iteration} iterations "
                               f"({state.oscillations} seepage-face "
                               f"oscillations)")
    if not summary["passed"]:
        failed = [name for name, c in checks.items() if not c["pass"]]
        logger.error("checks failed: %s", ", ".join(failed))
        return EXIT_FAILURE
    return EXIT_OK


def _monitorReferences(case, t):
    """Reference monitor heads from the expected values, or None."""
    expected = case.expected or {}
    labels = [m.label for m in case.boundary.monitors]
    if "monitors" in expected:
        return np.array([expected["monitors"][label]["value"]
                         if label in expected["monitors"] else np.nan
                         for label in labels])
    if "monitor_history" in expected:
        fn = expected["monitor_history"]["function"]
        points = np.array([m.point for m in case.boundary.monitors])
        return HEAD_FUNCTIONS[fn["name"]](points, t=t,
                                          **fn.get("params", {}))
    return None


def cmdConvergence(args):
    r"""
    `psbfem convergence CASE --sizes ...` or `--time-steps ...`: rerun
    the case over a sequence of mesh sizes (through the case's
    'mesh_generator') or time steps and tabulate monitor errors as CSV.

    Errors are relative to the expected monitor values when the case
    has them; otherwise each run is compared with the next finer one.
    """
    case = loadCase(args.case)
    case.workers = _workers(args, case)
    if bool(args.sizes) == bool(args.time_steps):
        raise ConfigError("give exactly one of --sizes and --time-steps")
    labels = [m.label for m in case.boundary.monitors]
    if not labels:
        raise ConfigError("convergence study needs monitors in the case")

    values = []
    rows = []
    if args.sizes:
        if not isinstance(case.source.get("mesh_generator"), dict):
            raise ConfigError("mesh_generator is required for a mesh-size "
                              "study")
        steps = sorted(args.sizes, reverse=True)
        for size in steps:
            run, result, _ = rerunCase(case, {"size": size})
            values.append(result.monitors[-1])
            rows.append((size, run.mesh.nElements, run.mesh.nNodes,
                         result.times[-1]))
    else:
        if case.kind != "transient":
            raise ConfigError("--time-steps needs a transient case")
        duration = case.time.dt * case.time.nSteps
        steps = sorted(args.time_steps, reverse=True)
        operators = None
        for dt in steps:
            case.time.dt = dt
            case.time.nSteps = int(round(duration / dt))
            case.time.outputStride = case.time.nSteps or 1
            result, _, operators = runCase(case, operators)
            values.append(result.monitors[-1])
            rows.append((dt, case.mesh.nElements, case.mesh.nNodes,
                         result.times[-1]))

    values = np.array(values)
    reference = _monitorReferences(case, rows[-1][3] - case.time.t0
                                   if case.time else 0.0)
    if reference is not None:
        errors = np.abs(values - reference) / np.abs(reference)
    else:
        errors = np.full(values.shape, np.nan)
        errors[:-1] = np.abs(values[:-1] - values[1:]) / np.abs(values[1:])

    output = args.output or os.path.join(case.outputDir(),
                                         f"{case.name}_convergence.csv")
    os.makedirs(os.path.dirname(os.path.abspath(output)), exist_ok=True)
    step = "size" if args.sizes else "dt"
    with open(output, "w") as f:
        header = [step, "n_elements", "n_nodes"]
        for label in labels:
            header += [f"{label}_value", f"{label}_error"]
        f.write(",".join(header) + "\n")
        for (h, nE, nN, _), vals, errs in zip(rows, values, errors):
            cells = [f"{h:.12g}", str(nE), str(nN)]
            for v, e in zip(vals, errs):
                cells += [f"{v:.12g}", f"{e:.12g}"]
            f.write(",".join(cells) + "\n")
    for j, label in enumerate(labels):
        finite = errors[:, j][np.isfinite(errors[:, j])]
        ratios = finite[:-1] / finite[1:] if finite.size > 1 else []
        logger.info("%s errors %s, ratios %s", label,
                    ", ".join(f"{e:.3e}" for e in finite),
                    ", ".join(f"{r:.2f}" for r in ratios))
    if args.plots:
        keep = np.all(np.isfinite(errors), axis=1)
        visualizations.plotConvergence(np.array([r[0] for r in rows])[keep],
                                       errors[keep], labels,
                                       saveDir=os.path.dirname(
                                           os.path.abspath(output)),
                                       showFlag=False)
    logger.info("convergence table written to %s", output)
    return EXIT_OK


def cmdValidateMesh(args):
    """`psbfem validate-mesh MESH`: list every violation."""
    mesh = loadMesh(args.mesh, fmt=args.format, validate=False)
    violations = validateMesh(mesh)
    for violation in violations:
        print(violation)
    if violations:
        raise MeshValidationError(f"{len(violations)} violation(s) in "
                                  f"{args.mesh}", violations)
    print(f"{args.mesh}: {mesh.nElements} elements, {mesh.nFaces} faces, "
          f"{mesh.nNodes} nodes, valid")
    return EXIT_OK


def cmdOracleCheck(args):
    r"""
    `psbfem oracle-check [MESH] [--random N]`: compare element stiffness
    and mass with the Schur and radial-quadrature oracles and print one
    CSV row per element.
    """
    material = Material.isotropic("oracle", args.k, args.ss)
    meshes = []
    if args.mesh:
        meshes.append(loadMesh(args.mesh))
    if args.random:
        rng = np.random.default_rng(args.seed)
        meshes += [randomConvexPolyhedron(rng) for _ in range(args.random)]
    if not meshes:
        raise ConfigError("give a mesh or --random N")
    print("mesh,element,n_dofs,stiffness_diff,mass_diff,row_sum,pass")
    failures = 0
    for m, mesh in enumerate(meshes):
        for row in oracleReport(mesh, material, nRadial=args.n_radial):
            ok = max(row["stiffness"], row["mass"], row["rowSum"]) \
                <= ORACLE_TOL
            failures += not ok
            print(f"{m},{row['element']},{row['nDofs']},"
                  f"{row['stiffness']:.3e},{row['mass']:.3e},"
                  f"{row['rowSum']:.3e},{'yes' if ok else 'no'}")
    if failures:
        logger.error("%d element(s) disagree with the oracles", failures)
        return EXIT_FAILURE
    return EXIT_OK


def cmdExport(args):
    """`psbfem export MESH RESULTS.h5 OUT.vtk`: archived heads to VTK."""
    mesh = loadMesh(args.mesh)
    archive = openResultsHdf(args.results)
    heads = archive["heads"]
    if heads.shape[1] != mesh.nNodes:
        raise ConfigError(f"{args.results} holds {heads.shape[1]} nodal "
                          f"heads, the mesh has {mesh.nNodes} nodes")
    h = heads[args.time_index]
    fluxes = archive["fluxes"][args.time_index]
    exportVtk(mesh, args.out,
              pointData={"head": h, "pressure_head": h - mesh.nodes[:, 2]},
              cellData={"flux": fluxes,
                        "flux_magnitude": np.linalg.norm(fluxes, axis=1)})
    return EXIT_OK


def cmdBenchmark(args):
    """`psbfem benchmark NAME DIR`: write a shipped benchmark case."""
    names = sorted(BENCHMARKS) if args.name == "all" else [args.name]
    for name in names:
        print(writeBenchmark(name, args.directory))
    return EXIT_OK


def buildParser():
    """Argument parser with one subparser per subcommand."""
    parser = argparse.ArgumentParser(
        prog="psbfem",
        description="Polyhedral scaled boundary finite element seepage "
                    "analysis.")
    verbosity = parser.add_mutually_exclusive_group()
    verbosity.add_argument("-v", "--verbose", action="store_true",
                           help="debug logging")
    verbosity.add_argument("-q", "--quiet", action="store_true",
                           help="warnings and errors only")
    sub = parser.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="run an analysis case")
    run.add_argument("case", help="case JSON file")
    run.add_argument("--workers", type=int, default=None,
                     help="processes for element operators (default: "
                          "case setting, else all cores)")
    run.add_argument("--output", default=None,
                     help="output directory (default: from the case)")
    run.add_argument("--dump-element-matrices", metavar="DIR", default=None,
                     help="write element coefficient matrices to DIR")
    run.add_argument("--plots", action="store_true",
                     help="save diagnostic plots to the output directory")
    run.set_defaults(func=cmdRun)

    conv = sub.add_parser("convergence",
                          help="mesh-size or time-step convergence study")
    conv.add_argument("case", help="case JSON file")
    conv.add_argument("--sizes", type=float, nargs="+", default=None,
                      help="mesh sizes passed to the case's mesh generator")
    conv.add_argument("--time-steps", type=float, nargs="+", default=None,
                      help="time steps of a transient case")
    conv.add_argument("--workers", type=int, default=None)
    conv.add_argument("--output", default=None, help="CSV table path")
    conv.add_argument("--plots", action="store_true",
                      help="save a log-log convergence plot")
    conv.set_defaults(func=cmdConvergence)

    val = sub.add_parser("validate-mesh", help="check a mesh file")
    val.add_argument("mesh", help="mesh file (.json or .inp)")
    val.add_argument("--format", choices=("json", "inp"), default=None)
    val.set_defaults(func=cmdValidateMesh)

    ora = sub.add_parser("oracle-check",
                         help="compare element operators with the oracles")
    ora.add_argument("mesh", nargs="?", default=None, help="mesh file")
    ora.add_argument("--random", type=int, default=0,
                     help="also check N random convex polyhedra")
    ora.add_argument("--seed", type=int, default=0)
    ora.add_argument("--k", type=float, default=1.0,
                     help="isotropic conductivity")
    ora.add_argument("--ss", type=float, default=1.0,
                     help="specific storage")
    ora.add_argument("--n-radial", type=int, default=64,
                     help="radial quadrature points")
    ora.set_defaults(func=cmdOracleCheck)

    exp = sub.add_parser("export", help="write archived results as VTK")
    exp.add_argument("mesh", help="mesh file")
    exp.add_argument("results", help="HDF5 archive written by run")
    exp.add_argument("out", help="output .vtk file")
    exp.add_argument("--time-index", type=int, default=-1)
    exp.set_defaults(func=cmdExport)

    bench = sub.add_parser("benchmark", help="write a benchmark case")
    bench.add_argument("name", choices=sorted(BENCHMARKS) + ["all"])
    bench.add_argument("directory")
    bench.set_defaults(func=cmdBenchmark)
    return parser


def _configureLogging(verbose=False, quiet=False):
    level = logging.DEBUG if verbose else logging.WARNING if quiet \
        else logging.INFO
    logging.basicConfig(level=level, format=LOG_FORMAT, force=True)
    return


def main(argv=None):
    """Console entry point; returns the exit status."""
    parser = buildParser()
    args = parser.parse_args(argv)
    _configureLogging(args.verbose, args.quiet)
    try:
        return args.func(args)
    except PsbfemError as err:
        print(f"error: {err.kind}: {err}", file=sys.stderr)
        if isinstance(err, ConfigError):
            return EXIT_CONFIG
        if isinstance(err, (MeshParseError, MeshValidationError)):
            return EXIT_MESH
        return EXIT_FAILURE


if __name__ == "__main__":
    sys.exit(main())
