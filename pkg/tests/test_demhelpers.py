#!/usr/bin/env python
# encoding: utf-8
"""
test_demhelpers.py
"""

from __future__ import division, print_function, absolute_import
import logging
import pytest
import numpy as np
from pymsdem import demhelpers as dh


def test_loglevel_default(monkeypatch):
    monkeypatch.delenv(dh.LOGLEVEL_ENV, raising=False)
    assert dh.loglevel() == logging.WARNING


def test_loglevel_names_and_numbers(monkeypatch):
    monkeypatch.setenv(dh.LOGLEVEL_ENV, 'debug')
    assert dh.loglevel() == logging.DEBUG
    monkeypatch.setenv(dh.LOGLEVEL_ENV, '20')
    assert dh.loglevel() == 20
    monkeypatch.setenv(dh.LOGLEVEL_ENV, 'chatty')
    assert dh.loglevel() == logging.WARNING


def test_exception_hierarchy():
    for exc in (dh.ShapeError, dh.MeshError, dh.WorldError,
                dh.NeighborConfigError, dh.ContactError, dh.ForceError,
                dh.AnalysisError, dh.SimulationError, dh.OutputError,
                dh.SceneParseError, dh.SceneConfigError):
        assert issubclass(exc, dh.PymsdemError)


def test_sceneparseerror_carries_line_number():
    err = dh.SceneParseError("bad value", 12)
    assert err.lineno == 12
    assert str(err).startswith("line 12:")
    assert dh.SceneParseError("no line").lineno is None


def test_test_outside():
    assert dh._test_outside(3, 0, 2)
    assert not dh._test_outside(np.array([0, 1, 2]), 0, 2)
    assert dh._test_outside(np.array([0, -0.1]), 0, 2)


def test_as_vector_and_unit():
    vec = dh.as_vector([1, 2, 2])
    assert vec.dtype == float
    assert np.allclose(dh.unit(vec), [1 / 3., 2 / 3., 2 / 3.])
    with pytest.raises(ValueError):
        dh.as_vector([1, 2])
    with pytest.raises(ValueError):
        dh.unit([0, 0, 0])


def test_rowdot_rownorm():
    a = np.array([[3.0, 4.0, 0.0], [1.0, 0.0, 0.0]])
    assert np.allclose(dh.rownorm(a), [5.0, 1.0])
    assert np.allclose(dh.rowdot(a, a), [25.0, 1.0])
