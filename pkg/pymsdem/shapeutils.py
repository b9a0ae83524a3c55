# coding: utf-8
"""
pymsdem.shapeutils

Generating curves of the axisymmetric shapes and the helper math used to
fill them with maximal inscribed spheres: vertex curvature, inscribed radius
by 1-D minimisation, sphere-centre placement and quadrature of the solid of
revolution.

All shapes are solids of revolution about the body x axis, described by the
squared profile radius y^2(x) on [-x_v, x_v].
"""

from __future__ import division, print_function, absolute_import
from builtins import object
import logging

import numpy as np
from scipy import optimize, integrate

from pymsdem.demhelpers import ShapeError, loglevel

logging.basicConfig(level=loglevel())
LOGGER = logging.getLogger('pymsdem.shapeutils')

# coarse sampling of the generating curve before bounded refinement
NCOARSE = 2049
XATOL_REL = 1e-12


class Profile(object):
    """Generating curve of a solid of revolution about the x axis.

    Subclasses implement y2 (squared profile radius) and dy2dx, and set
    the vertex abscissa xvertex and a length scale."""
    xvertex = None
    scale = None

    def y2(self, x):
        raise NotImplementedError

    def dy2dx(self, x):
        raise NotImplementedError

    def radius(self, x):
        """Profile radius y(x), zero outside the solid"""
        return np.sqrt(np.clip(self.y2(x), 0.0, None))

    @property
    def vertex_curvature_radius(self):
        """Radius of curvature of the profile at the axis vertex"""
        return -0.5 * self.dy2dx(self.xvertex)

    def contains(self, points, tol=0.0):
        """True for points (n, 3) inside the solid (boundary within tol)"""
        points = np.atleast_2d(points)
        xabs = np.abs(points[:, 0])
        rho = np.hypot(points[:, 1], points[:, 2])
        inside = xabs <= self.xvertex + tol
        y = self.radius(np.clip(xabs, 0.0, self.xvertex))
        return inside & (rho <= y + tol)


class EllipseProfile(Profile):
    """Prolate spheroid x^2/a^2 + (y^2 + z^2)/b^2 = 1"""
    def __init__(self, a, b):
        self.a = a
        self.b = b
        self.xvertex = a
        self.scale = a

    def y2(self, x):
        x = np.asarray(x, dtype=float)
        return self.b ** 2 * (1.0 - (x / self.a) ** 2)

    def dy2dx(self, x):
        return -2.0 * self.b ** 2 * np.asarray(x, dtype=float) / self.a ** 2


class CassiniProfile(Profile):
    """Cassini oval ((x-a)^2 + y^2)((x+a)^2 + y^2) = b^4 revolved about x.

    Only the single-oval regime b > a is valid."""
    def __init__(self, a, b):
        if not b > a > 0:
            raise ShapeError(
                "Cassini oval needs b > a > 0, got a=%g, b=%g" % (a, b))
        self.a = a
        self.b = b
        self.xvertex = np.sqrt(a ** 2 + b ** 2)
        self.scale = self.xvertex

    def y2(self, x):
        x = np.asarray(x, dtype=float)
        return (np.sqrt(self.b ** 4 + 4.0 * self.a ** 2 * x ** 2)
                - x ** 2 - self.a ** 2)

    def dy2dx(self, x):
        x = np.asarray(x, dtype=float)
        return (4.0 * self.a ** 2 * x
                / np.sqrt(self.b ** 4 + 4.0 * self.a ** 2 * x ** 2) - 2.0 * x)


def inscribed_radius(profile, xcenter, ncoarse=NCOARSE):
    """Radius of the maximal sphere centred at (xcenter, 0, 0) inside the
    solid: the minimum distance from the centre to the generating curve.

    The global minimum is bracketed on a coarse sample of the curve, then
    refined with bounded Brent minimisation."""
    xv = profile.xvertex
    if abs(xcenter) >= xv:
        raise ShapeError(
            "Sphere centre x=%g is not inside the solid" % xcenter)

    def dist2(x):
        return (x - xcenter) ** 2 + profile.y2(x)

    xs = np.linspace(-xv, xv, ncoarse)
    d2 = dist2(xs)
    k = int(np.argmin(d2))
    lo = xs[max(k - 1, 0)]
    hi = xs[min(k + 1, ncoarse - 1)]
    res = optimize.minimize_scalar(
        dist2, bounds=(lo, hi), method='bounded',
        options={'xatol': XATOL_REL * profile.scale})
    best = min(float(res.fun), float(d2[k]))
    return np.sqrt(max(best, 0.0))


def axial_centers(profile, nspheres):
    """Sphere-centre abscissas for an axial MIS model.

    The end centres sit at the vertex curvature centres, so the end spheres
    are internally tangent at the vertices; interior centres are spaced
    uniformly between them."""
    if nspheres == 1:
        return np.zeros(1)
    xend = profile.xvertex - profile.vertex_curvature_radius
    if xend < 0:
        raise ShapeError(
            "Profile is too blunt for an axial multi-sphere model")
    return np.linspace(-xend, xend, nspheres)


def revolution_properties(profile, epsrel_volume=1e-6):
    """Unit-density volume and principal moments of the solid of revolution.

    Returns (volume, i_axial, i_transverse) from adaptive quadrature of
    pi y^2, pi y^4 / 2 and pi y^2 (y^2/4 + x^2) over the profile. The
    absolute tolerance is epsrel_volume times a bounding-cylinder volume
    estimate, scaled by the matching length powers for the moments."""
    xv = profile.xvertex
    y2 = profile.y2
    ymax2 = max(float(np.max(y2(np.linspace(-xv, xv, NCOARSE)))), 0.0)
    vest = np.pi * ymax2 * 2.0 * xv
    epsabs = epsrel_volume * vest

    def area(x):
        return np.pi * max(float(y2(x)), 0.0)

    def axial(x):
        return 0.5 * np.pi * max(float(y2(x)), 0.0) ** 2

    def transverse(x):
        yy = max(float(y2(x)), 0.0)
        return np.pi * yy * (0.25 * yy + x * x)

    volume, _ = integrate.quad(area, -xv, xv, epsabs=epsabs, limit=200)
    i_axial, _ = integrate.quad(
        axial, -xv, xv, epsabs=epsabs * ymax2, limit=200)
    i_trans, _ = integrate.quad(
        transverse, -xv, xv, epsabs=epsabs * xv * xv, limit=200)
    LOGGER.debug(
        "Solid of revolution: V=%g, I_ax=%g, I_tr=%g" %
        (volume, i_axial, i_trans))
    return volume, i_axial, i_trans


# closed-form volumes for the Table-style sizing rules
def sphere_volume(r):
    return 4.0 / 3.0 * np.pi * r ** 3


def ellipsoid_volume(a, b):
    return 4.0 / 3.0 * np.pi * a * b * b


def spherocylinder_volume(rad, length):
    return np.pi * rad ** 2 * length + sphere_volume(rad)


def torus_volume(rmajor, rminor):
    return 2.0 * np.pi ** 2 * rmajor * rminor ** 2


def equal_volume_size(kind, volume, aspect=None):
    """Parameters of a shape of the given kind with the given volume.

    Sizing follows the fixed shape ratios used by the packing scenes:
    ellipsoid a = 2b (or a = aspect*b), spherocylinder L = 3R, torus
    R = 2.5r, Cassini oval b = 1.1a. Returns a parameter dict."""
    if volume <= 0:
        raise ShapeError("Volume must be positive, got %g" % volume)
    if kind == 'sphere':
        return {'r': (volume / sphere_volume(1.0)) ** (1.0 / 3.0)}
    elif kind == 'ellipsoid':
        ratio = 2.0 if aspect is None else aspect
        b = (volume / ellipsoid_volume(ratio, 1.0)) ** (1.0 / 3.0)
        return {'a': ratio * b, 'b': b}
    elif kind == 'spherocylinder':
        ratio = 3.0 if aspect is None else aspect
        rad = (volume / spherocylinder_volume(1.0, ratio)) ** (1.0 / 3.0)
        return {'R': rad, 'L': ratio * rad}
    elif kind == 'torus':
        ratio = 2.5 if aspect is None else aspect
        rminor = (volume / torus_volume(ratio, 1.0)) ** (1.0 / 3.0)
        return {'R': ratio * rminor, 'r': rminor}
    elif kind == 'cassini':
        ratio = 1.1 if aspect is None else aspect
        unitvol, _, _ = revolution_properties(CassiniProfile(1.0, ratio))
        a = (volume / unitvol) ** (1.0 / 3.0)
        return {'a': a, 'b': ratio * a}
    raise ShapeError("Unsupported shape kind '%s'" % kind)
