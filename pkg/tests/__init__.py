# -*- coding: utf-8 -*-
"""
Created on Mon Sep 21 09:02:51 2026

@author: PSBFEM developers
"""
