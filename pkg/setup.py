#!/usr/bin/env python3
# -*- coding: utf-8 -*-
"""
Created on Mon Sep 28 09:30:12 2026

PSBFEM setup script.

@author: PSBFEM developers
"""

from setuptools import setup

# Read the contents of the README file to include in the long
# description. The long description then becomes part of the pypi.org
# page.
from os import path
this_directory = path.abspath(path.dirname(__file__))
with open(path.join(this_directory, 'README.md'), encoding='utf-8') as f:
    long_description = f.read()

setup(name='psbfem',
      version='0.1.0',
      description='Polyhedral scaled boundary finite element seepage '
                  'analysis',
      long_description=long_description,
      long_description_content_type='text/markdown',
      author='PSBFEM developers',
      license='BSD',
      classifiers=['Intended Audience :: Science/Research',
                   'License :: OSI Approved :: BSD License',
                   'Development Status :: 3 - Alpha',
                   'Operating System :: OS Independent',
                   'Programming Language :: Python :: 3',
                   'Topic :: Scientific/Engineering :: Physics',
                   'Topic :: Scientific/Engineering :: Hydrology',
                   'Natural Language :: English'],
      packages=['psbfem'],
      python_requires='>=3.9',
      install_requires=['numpy>=1.22',
                        'scipy>=1.12',
                        'matplotlib>=3.5',
                        'h5py>=3.6'],
      extras_require={'test': ['pytest>=7']},
      entry_points={'console_scripts': ['psbfem=psbfem.cli:main']},
      zip_safe=False)
