#!/usr/bin/env python
# encoding: utf-8
"""
pymsdem.demhelpers

Exception hierarchy and small helper functions shared by all modules.
"""

from __future__ import division, print_function, absolute_import
import os
import logging
import numpy as np

LOGLEVEL_ENV = 'PYMSDEM_LOGLEVEL'
DEFAULT_LOGLEVEL = 'WARNING'


def loglevel():
    """Log level from the PYMSDEM_LOGLEVEL environment variable.

    Accepts level names (DEBUG, INFO, ...) or integers. Unknown values fall
    back to WARNING."""
    value = os.environ.get(LOGLEVEL_ENV, DEFAULT_LOGLEVEL).strip()
    if value.isdigit():
        return int(value)
    level = logging.getLevelName(value.upper())
    if isinstance(level, int):
        return level
    return logging.WARNING


logging.basicConfig(level=loglevel())
LOGGER = logging.getLogger('pymsdem.demhelpers')


# custom exceptions
class PymsdemError(Exception):
    """Base exception for errors raised by pymsdem"""
    pass


class ShapeError(PymsdemError):
    """Invalid shape parameters or multi-sphere models"""
    pass


class MeshError(PymsdemError):
    """Invalid surface or cell meshes, mesh file errors"""
    pass


class WorldError(PymsdemError):
    """Invalid scene objects: poses, materials, walls, insert regions"""
    pass


class NeighborConfigError(PymsdemError):
    """Cell size or skin settings that cannot guarantee complete pair lists"""
    pass


class ContactError(PymsdemError):
    """Pathological contact geometry, e.g. coincident sphere centers"""
    pass


class ForceError(PymsdemError):
    """Invalid contact force parameters"""
    pass


class AnalysisError(PymsdemError):
    """Measurements that cannot be taken on the given bed"""
    pass


class SimulationError(PymsdemError):
    """Aborted runs: numerical blow-up and similar"""
    pass


class OutputError(PymsdemError):
    """Unreadable snapshots and output files"""
    pass


class SceneParseError(PymsdemError):
    """Syntax errors in scene files. Carries the offending line number."""
    def __init__(self, message, lineno=None):
        if lineno is not None:
            message = "line %d: %s" % (lineno, message)
        super(SceneParseError, self).__init__(message)
        self.lineno = lineno


class SceneConfigError(PymsdemError):
    """Validation errors in scene configurations"""
    pass


# helper functions
def _test_outside(testx, lower, upper):
    """
    True if testx, or any element of it is outside [lower, upper].

    Both lower bound and upper bound included
    Input: Integer or floating point scalar or Numpy array.
    """
    test = np.array(testx)
    return np.any(test < lower) or np.any(test > upper)


def as_vector(value, name='vector'):
    """Returns value as a float numpy 3-vector, or raises ValueError"""
    vec = np.asarray(value, dtype=float)
    if vec.shape != (3,):
        raise ValueError("%s must have 3 components, got %r" % (name, value))
    return vec


def unit(vec, name='vector'):
    """Returns vec normalized to unit length. Zero vectors raise ValueError."""
    vec = np.asarray(vec, dtype=float)
    norm = np.linalg.norm(vec)
    if norm == 0.0:
        raise ValueError("%s must not be the zero vector" % name)
    return vec / norm


def rowdot(a, b):
    """Row-wise dot product of two (..., 3) arrays"""
    return np.einsum('...i,...i->...', a, b)


def rownorm(a):
    """Row-wise euclidean norm of a (..., 3) array"""
    return np.sqrt(rowdot(a, a))
