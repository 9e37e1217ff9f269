# -*- coding: utf-8 -*-
"""
Created on Thu Oct  8 14:07:26 2026

tests for benchmarks.py

@author: PSBFEM developers
"""

import os
import numpy as np
import pytest
from numpy.testing import assert_allclose

from psbfem.errors import ConfigError
from psbfem.case import loadCase
from psbfem.cli import runCase, referenceRuns, main
from psbfem.benchmarks import (RECTANGULAR_DAM_EXIT, flatDamHead,
                               columnDiffusionHead, affineHead,
                               writeBenchmark, compareExpected)


#%% analytic references

def test_columnDiffusionLimits():
    z = np.linspace(0.0, 1.0, 11)
    final = columnDiffusionHead(z, 10.0)
    assert_allclose(final, 1.0 + z, atol=1e-12)
    early = columnDiffusionHead(z, 0.01)
    assert early[0] == pytest.approx(1.0, abs=1e-12)
    assert early[-1] == pytest.approx(2.0, abs=1e-12)
    assert np.all(np.diff(early) >= -1e-9)
    # far from the top the front has not arrived yet
    assert early[3] == pytest.approx(1.0, abs=1e-6)


def test_flatDamHead():
    assert flatDamHead(50.0, 70.0) == pytest.approx(80.0)
    assert flatDamHead(200.0, 70.0) == pytest.approx(20.0)
    # below the middle of the base
    assert flatDamHead(120.0, 30.0) == pytest.approx(50.0)
    heads = flatDamHead(np.linspace(100, 140, 9), 70.0)
    assert np.all(np.diff(heads) < 0.0)


def test_affineHead():
    points = np.array([[1.0, 2.0, 3.0], [0.0, 0.0, 0.0]])
    assert_allclose(affineHead(points, 1.0, (0, 0, 2), (0, 0, 1)),
                    [5.0, -1.0])


#%% shipped cases

@pytest.mark.parametrize("name", ["patch", "column", "rectangular_dam",
                                  "trapezoidal_dam"])
def test_writeAndLoadBenchmark(name, tmp_path):
    casePath = writeBenchmark(name, str(tmp_path))
    assert casePath == os.path.join(str(tmp_path), f"{name}.json")
    assert os.path.exists(os.path.join(str(tmp_path), f"{name}.mesh.json"))
    case = loadCase(casePath)
    assert case.name == name
    assert case.source["mesh_generator"]["generator"] == name
    assert case.outputDir() == os.path.join(str(tmp_path),
                                            f"{name}_results")


def test_unknownBenchmark(tmp_path):
    with pytest.raises(ConfigError, match="unknown benchmark 'weir'"):
        writeBenchmark("weir", str(tmp_path))


def test_patchBenchmark(tmp_path):
    case = loadCase(writeBenchmark("patch", str(tmp_path)))
    result, state, _ = runCase(case)
    assert state is None
    checks = compareExpected(case, result)
    assert set(checks) == {"monitor centre", "nodal field"}
    assert all(check["pass"] for check in checks.values())
    assert checks["monitor centre"]["relError"] <= 1e-8


def test_columnBenchmark(tmp_path):
    case = loadCase(writeBenchmark("column", str(tmp_path)))
    # quarter of the shipped step
    case.time.dt = 0.0025
    case.time.nSteps = 80
    case.expected["monitor_history"]["from_step"] = 20
    result, _, _ = runCase(case)
    assert len(result.times) == 81
    checks = compareExpected(case, result)
    assert checks["monitor history"]["pass"]
    assert checks["monitor history"]["relError"] <= 0.02


def test_columnTimeStepHalving(tmp_path):
    case = loadCase(writeBenchmark("column", str(tmp_path)))
    finals = []
    operators = None
    for dt in (0.02, 0.01, 0.005):
        case.time.dt = dt
        case.time.nSteps = int(round(0.2 / dt))
        result, _, operators = runCase(case, operators)
        assert result.times[-1] == pytest.approx(0.2)
        finals.append(result.monitors[-1, 0])
    # first-order scheme
    ratio = (finals[0] - finals[1]) / (finals[1] - finals[2])
    assert ratio == pytest.approx(2.0, rel=0.2)


def test_missingExpectedMonitor(tmp_path):
    case = loadCase(writeBenchmark("patch", str(tmp_path)))
    result, _, _ = runCase(case)
    case.expected["monitors"]["crest"] = {"value": 1.0, "rtol": 0.1}
    with pytest.raises(ConfigError, match="crest"):
        compareExpected(case, result)


@pytest.mark.slow
def test_rectangularDamExit(tmp_path):
    case = loadCase(writeBenchmark("rectangular_dam", str(tmp_path)))
    result, state, _ = runCase(case)
    assert state.converged
    checks = compareExpected(case, result, state)
    assert checks["exit elevation"]["reference"] == RECTANGULAR_DAM_EXIT
    assert checks["exit elevation"]["pass"]


@pytest.mark.slow
def test_concreteDamConvergence(tmp_path):
    writeBenchmark("concrete_dam", str(tmp_path))
    table = tmp_path / "table.csv"
    status = main(["-q", "convergence", str(tmp_path / "concrete_dam.json"),
                   "--sizes", "20", "10", "5", "--output", str(table)])
    assert status == 0
    rows = np.loadtxt(str(table), delimiter=",", skiprows=1)
    # columns: size, elements, nodes, m1 value, m1 error, m2 value, m2 error
    assert_allclose(rows[:, 0], [20, 10, 5])
    for column in (4, 6):
        assert np.all(np.diff(rows[:, column]) < 0.0)


@pytest.mark.slow
def test_concreteDamMonitors(tmp_path):
    case = loadCase(writeBenchmark("concrete_dam", str(tmp_path)))
    result, _, _ = runCase(case)
    checks = compareExpected(case, result)
    assert checks["monitor m1"]["pass"]
    assert checks["monitor m2"]["pass"]


def test_columnSteadyLimit(tmp_path):
    case = loadCase(writeBenchmark("column", str(tmp_path)))
    case.time.dt = 0.5
    case.time.nSteps = 40
    case.expected = {"steady_limit": {"rtol": 1e-6}}
    result, _, operators = runCase(case)
    references = referenceRuns(case, operators)
    assert set(references) == {"steady_limit"}
    steady, _ = references["steady_limit"]
    assert steady.monitors[-1, 0] == pytest.approx(1.75, rel=1e-9)
    checks = compareExpected(case, result, references=references)
    assert checks["steady limit z075"]["pass"]


@pytest.mark.slow
def test_concreteDamOctree(tmp_path):
    case = loadCase(writeBenchmark("concrete_dam_octree", str(tmp_path)))
    # 16 base cells outside the refined band, 5 m cells inside
    assert case.mesh.nElements == 16 + 32 * 512
    result, _, _ = runCase(case)
    references = referenceRuns(case)
    uniform, _ = references["uniform_comparison"]
    assert uniform.fluxes.shape[1] == 48 * 32 * 16
    checks = compareExpected(case, result, references=references)
    for name in ("uniform error ratio m1", "uniform error ratio m2",
                 "uniform element count"):
        assert checks[name]["pass"], name


@pytest.mark.slow
def test_inclusionBenchmark(tmp_path):
    case = loadCase(writeBenchmark("inclusion", str(tmp_path)))
    result, _, _ = runCase(case)
    upstream, above, downstream = result.monitors[-1]
    # the mesh and the heads are antisymmetric about x = 0.5
    assert above == pytest.approx(0.5, abs=1e-4)
    assert upstream > above > downstream
    checks = compareExpected(case, result, references=referenceRuns(case))
    assert {"tet_fem upstream", "tet_fem above",
            "tet_fem downstream"} <= set(checks)
    assert all(check["pass"] for check in checks.values())


@pytest.mark.slow
def test_transientFoundationBenchmark(tmp_path):
    case = loadCase(writeBenchmark("transient_foundation", str(tmp_path)))
    result, _, operators = runCase(case)
    assert len(result.times) == 121
    # rising reservoir
    assert np.all(result.monitors[-1] > result.monitors[0])
    assert np.all(np.diff(result.monitors[-1]) < 0.0)
    checks = compareExpected(case, result,
                             references=referenceRuns(case, operators))
    assert set(checks) == {"steady limit p1", "steady limit p2",
                           "steady limit p3"}
    assert all(check["pass"] for check in checks.values())


@pytest.mark.slow
def test_trapezoidalDamBenchmark(tmp_path):
    case = loadCase(writeBenchmark("trapezoidal_dam", str(tmp_path)))
    result, state, _ = runCase(case)
    assert 1.0 < state.exitElevation < 5.0
    checks = compareExpected(case, result, state, referenceRuns(case))
    assert checks["reference mesh exit elevation"]["pass"]
