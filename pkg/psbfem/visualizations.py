#!/usr/bin/env python3
# -*- coding: utf-8 -*-
"""
Created on Mon Sep 28 14:31:50 2026

Convenience functions for visualizing convergence studies, monitor
histories and free-surface iterations.

@author: PSBFEM developers
"""

# python modules
import os
import logging
import numpy as np
import matplotlib.pyplot as plt

# custom modules
from psbfem.pltDefaults import plotSlopeTriangle, lineCycler


logger = logging.getLogger(__name__)

# listing all functions declared in this file so that sphinx-automodapi
# correctly documents them and doesn't document imported functions.
__all__ = ["plotConvergence",
           "plotMonitorHistories",
           "plotFreeSurface",
           ]


def _finish(fig, saveDir, fileName, showFlag):
    path = None
    if saveDir:
        os.makedirs(saveDir, exist_ok=True)
        path = os.path.join(saveDir, fileName)
        fig.savefig(path, bbox_inches='tight')
        logger.debug("saved %s", path)
    if showFlag:
        plt.show()
    else:
        plt.close(fig)
    return path


def plotConvergence(sizes, errors, labels, slope=None, saveDir=None,
                    showFlag=True):
    r"""
    Log-log plot of monitor errors against mesh size (or time step).

    sizes : numpy.ndarray
        (m,) mesh sizes.

    errors : numpy.ndarray
        (m, k) relative errors, one column per monitor.

    labels : list of str
        Monitor labels.

    slope : float
        Draw a reference slope triangle of this order. Default is None.

    saveDir : str
        Directory to save 'convergence.png' to. Default is None.

    showFlag : bool
        Flag for showing the plot. Default is True.
    """
    sizes = np.asarray(sizes, dtype=float)
    errors = np.atleast_2d(np.asarray(errors, dtype=float))
    if errors.shape[0] != len(sizes):
        errors = errors.T
    fig, ax = plt.subplots()
    styles = lineCycler()
    for j, label in enumerate(labels):
        ax.loglog(sizes, errors[:, j], next(styles), marker='o', label=label)
    if slope is not None:
        positive = errors[errors > 0]
        if positive.size:
            plotSlopeTriangle(ax, sizes.min(), positive.min(), slope,
                              size=0.3)
    ax.set_xlabel('Mesh size')
    ax.set_ylabel('Relative error')
    ax.legend(frameon=False,
              labelspacing=0.001,
              borderaxespad=0.1)
    return _finish(fig, saveDir, 'convergence.png', showFlag)


def plotMonitorHistories(result, reference=None, saveDir=None,
                         showFlag=True):
    r"""
    Monitor heads against time.

    result : FieldResult
        Transient result.

    reference : numpy.ndarray
        (nTimes, nMonitors) reference heads drawn as dashed lines.
        Default is None.

    saveDir : str
        Directory to save 'monitors.png' to. Default is None.

    showFlag : bool
        Flag for showing the plot. Default is True.
    """
    fig, ax = plt.subplots()
    for j, label in enumerate(result.monitorLabels):
        line, = ax.plot(result.times, result.monitors[:, j], label=label)
        if reference is not None:
            ax.plot(result.times, np.asarray(reference)[:, j], '--',
                    color=line.get_color())
    ax.set_xlabel('Time')
    ax.set_ylabel('Head')
    ax.legend(frameon=False,
              labelspacing=0.001,
              borderaxespad=0.1)
    return _finish(fig, saveDir, 'monitors.png', showFlag)


def plotFreeSurface(state, yIndex=0, history=True, saveDir=None,
                    showFlag=True):
    r"""
    Free-surface profile along x at one column row in y, with the
    iteration history in light lines.

    state : FreeSurfaceState
        Result of iterateFreeSurface().

    yIndex : int
        Column row to plot. Default is 0.

    history : bool
        Also draw earlier iterations. Default is True.

    saveDir : str
        Directory to save 'free_surface.png' to. Default is None.

    showFlag : bool
        Flag for showing the plot. Default is True.
    """
    fig, ax = plt.subplots()
    xs = state.phi.xs
    if history:
        for iteration, values, *_ in state.history[:-1]:
            ax.plot(xs, values[:, yIndex], color='lightgray', lw=1)
    ax.plot(xs, state.phi.values[:, yIndex], color='C0',
            label=f'iteration {state.iteration}')
    ax.axhline(state.exitElevation, color='red', ls='--', lw=1,
               label='exit point')
    ax.set_xlabel('x')
    ax.set_ylabel('Surface elevation')
    ax.legend(frameon=False,
              labelspacing=0.001,
              borderaxespad=0.1)
    return _finish(fig, saveDir, 'free_surface.png', showFlag)
