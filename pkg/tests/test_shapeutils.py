#!/usr/bin/env python
# encoding: utf-8
"""
test_shapeutils.py
"""

from __future__ import division, print_function, absolute_import
import pytest
import numpy as np
from pymsdem import shapeutils as su
from pymsdem.demhelpers import ShapeError


@pytest.fixture(scope='module')
def ellipse():
    return su.EllipseProfile(0.005, 0.0025)


@pytest.fixture(scope='module')
def cassini():
    return su.CassiniProfile(1.0, 1.1)


def test_ellipse_inscribed_radius_at_centre(ellipse):
    assert np.isclose(su.inscribed_radius(ellipse, 0.0), 0.0025, rtol=1e-9)


def test_ellipse_vertex_curvature(ellipse):
    assert np.isclose(ellipse.vertex_curvature_radius, 0.0025 ** 2 / 0.005)


def test_end_sphere_tangent_at_vertex(ellipse):
    xend = su.axial_centers(ellipse, 15)[-1]
    rad = su.inscribed_radius(ellipse, xend)
    assert np.isclose(xend + rad, 0.005, rtol=1e-6)


def test_axial_centers_uniform(ellipse):
    xs = su.axial_centers(ellipse, 5)
    assert np.allclose(np.diff(xs), np.diff(xs)[0])
    assert np.isclose(xs[0], -xs[-1])
    assert np.array_equal(su.axial_centers(ellipse, 1), [0.0])


def test_centre_outside_solid(ellipse):
    with pytest.raises(ShapeError):
        su.inscribed_radius(ellipse, 0.006)


def test_cassini_closes_at_vertex(cassini):
    assert np.isclose(cassini.xvertex, np.sqrt(1.0 + 1.21))
    assert np.isclose(cassini.y2(cassini.xvertex), 0.0, atol=1e-12)
    assert np.isclose(cassini.y2(0.0), 1.21 - 1.0)


def test_cassini_needs_single_oval():
    with pytest.raises(ShapeError):
        su.CassiniProfile(1.0, 0.9)


def test_revolution_properties_of_spheroid(ellipse):
    volume, i_ax, i_tr = su.revolution_properties(ellipse)
    a, b = 0.005, 0.0025
    vref = su.ellipsoid_volume(a, b)
    assert np.isclose(volume, vref, rtol=1e-6)
    assert np.isclose(i_ax, 0.4 * vref * b ** 2, rtol=1e-5)
    assert np.isclose(i_tr, 0.2 * vref * (a ** 2 + b ** 2), rtol=1e-5)


def test_contains(ellipse):
    pts = np.array([[0.0, 0.0, 0.0], [0.0049, 0.0, 0.0],
                    [0.0, 0.0026, 0.0], [0.006, 0.0, 0.0]])
    assert list(ellipse.contains(pts)) == [True, True, False, False]


@pytest.mark.parametrize('kind', ['sphere', 'ellipsoid', 'spherocylinder',
                                  'torus'])
def test_equal_volume_size_closed_forms(kind):
    volume = 1.309e-7
    par = su.equal_volume_size(kind, volume)
    if kind == 'sphere':
        got = su.sphere_volume(par['r'])
    elif kind == 'ellipsoid':
        got = su.ellipsoid_volume(par['a'], par['b'])
        assert np.isclose(par['a'], 2.0 * par['b'])
    elif kind == 'spherocylinder':
        got = su.spherocylinder_volume(par['R'], par['L'])
        assert np.isclose(par['L'], 3.0 * par['R'])
    else:
        got = su.torus_volume(par['R'], par['r'])
        assert np.isclose(par['R'], 2.5 * par['r'])
    assert np.isclose(got, volume)


def test_equal_volume_cassini():
    par = su.equal_volume_size('cassini', 2.0e-7)
    assert np.isclose(par['b'], 1.1 * par['a'])
    volume, _, _ = su.revolution_properties(
        su.CassiniProfile(par['a'], par['b']))
    assert np.isclose(volume, 2.0e-7, rtol=1e-5)


def test_equal_volume_rejects_bad_input():
    with pytest.raises(ShapeError):
        su.equal_volume_size('sphere', 0.0)
    with pytest.raises(ShapeError):
        su.equal_volume_size('cube', 1.0)
