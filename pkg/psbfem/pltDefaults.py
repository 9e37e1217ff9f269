#!/usr/bin/env python3
# -*- coding: utf-8 -*-
"""
Created on Mon Sep 28 11:05:19 2026

Default plotting parameters

@author: PSBFEM developers
"""

# importing Python modules
import logging
from itertools import cycle
import numpy as np
import matplotlib
import matplotlib.pyplot as plt


logger = logging.getLogger(__name__)

# listing all functions declared in this file so that sphinx-automodapi
# correctly documents them and doesn't document imported functions.
__all__ = ["plotSlopeTriangle",
           "lineCycler",
           ]


# setting default plot properties
plotFont = {'family' : 'serif',
            'weight' : 'normal',
            'size'   : 16}
plt.rc('font', **plotFont)
plt.rc('lines', linewidth=2)
plt.rc('lines', markersize=8)
# setting default figure size
matplotlib.rcParams['figure.figsize'] = 10, 6

# setting latex rendered fonts to be same as regular fonts
try:
    matplotlib.rcParams['mathtext.fontset'] = 'dejavuserif'
    matplotlib.rcParams['mathtext.rm'] = 'DejaVu Serif'
    matplotlib.rcParams['mathtext.it'] = 'DejaVu Serif:italic'
    matplotlib.rcParams['mathtext.bf'] = 'DejaVu Serif:bold'
except (KeyError, ValueError):
    logger.debug("dejavuserif math fonts unavailable, using stix")
    matplotlib.rcParams['mathtext.fontset'] = 'stix'


#%% convenience functions for plotting

def plotSlopeTriangle(ax, x, y, slope, size=0.5, label=True):
    r"""
    Draw a reference slope triangle on log-log axes, anchored at (x, y)
    and spanning a factor 10**size in x.

    ax : matplotlib.axes.Axes
        Log-log axes.

    x, y : float
        Lower-left anchor point.

    slope : float
        Convergence order to display.

    size : float
        Width in decades. Default is 0.5.

    label : bool
        Write the slope next to the triangle. Default is True.
    """
    if not (x > 0 and y > 0):
        raise ValueError("slope triangle anchor must be positive")
    x2 = x * 10 ** size
    y2 = y * 10 ** (size * slope)
    ax.plot([x, x2, x2, x], [y, y, y2, y], color='gray', lw=1)
    if label:
        ax.text(x2 * 1.05, np.sqrt(y * y2), f"{slope:g}", color='gray',
                va='center')
    return


#%% style cycling
# custom list of linestyles (excluding blank line styles)
lines = ["-", "--", "-.", ":"]


def lineCycler():
    """Fresh cycle over the solid, dashed, dash-dot and dotted styles."""
    return cycle(lines)
