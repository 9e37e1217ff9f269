# -*- coding: utf-8 -*-
"""
Created on Mon Sep 21 09:02:37 2026

Polyhedral scaled boundary finite element method for three-dimensional
Darcy seepage: mesh handling, element operators, steady and transient
solvers, free-surface iteration and verification tools.

@author: PSBFEM developers
"""

__version__ = "0.1.0"
