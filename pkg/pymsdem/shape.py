# coding: utf-8
"""
pymsdem.shape

Multi-sphere (MS) particle models: the primary spheres fixed in the body
frame, builders for the analytic shapes (sphere, prolate ellipsoid,
spherocylinder, torus and the Cassini oval solid), rigid-body mass
properties of the exact analytic solid and the immutable ShapeTemplate
that bundles everything a particle class needs.

Body frame conventions: the centre of mass is the origin and the body axes
are principal axes. Axisymmetric elongated shapes lie along x, the torus
lies in the xy plane.
"""

from __future__ import division, print_function, absolute_import
from builtins import object, range
import logging

import numpy as np
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import connected_components

from pymsdem import shapeutils
from pymsdem.demhelpers import ShapeError, loglevel
from pymsdem.quatutils import IDENTITY

logging.basicConfig(level=loglevel())
LOGGER = logging.getLogger('pymsdem.shape')

SHAPEKINDS = ('sphere', 'ellipsoid', 'spherocylinder', 'torus', 'cassini')
PARAMNAMES = {
    'sphere': ('r',),
    'ellipsoid': ('a', 'b'),
    'spherocylinder': ('R', 'L'),
    'torus': ('R', 'r'),
    'cassini': ('a', 'b'),
}
CURVATURE_MODELS = ('eq', 'sph')


class SphereElement(object):
    """A primary sphere of an MS model: body-frame centre and radius"""
    def __init__(self, center, radius):
        if not radius > 0:
            raise ShapeError("Sphere radius must be positive, got %r" % radius)
        self.center = np.array(center, dtype=float)
        self.radius = float(radius)

    def __repr__(self):
        return "SphereElement(center=%r, radius=%r)" % (
            self.center.tolist(), self.radius)


class MSModel(object):
    """
    A multi-sphere clump: an ordered, non-empty list of overlapping primary
    spheres in the body frame.

    Arguments:
        spheres: list of SphereElement
    """
    def __init__(self, spheres):
        spheres = list(spheres)
        if not spheres:
            raise ShapeError("A multi-sphere model needs at least one sphere")
        self.spheres = tuple(spheres)
        self.centers = np.array([sph.center for sph in spheres])
        self.radii = np.array([sph.radius for sph in spheres])
        self.centers.flags.writeable = False
        self.radii.flags.writeable = False
        if not self.is_connected():
            raise ShapeError(
                "Primary spheres do not form a connected clump")

    @classmethod
    def from_arrays(cls, centers, radii):
        return cls([SphereElement(cen, rad)
                    for cen, rad in zip(np.atleast_2d(centers), radii)])

    @property
    def nspheres(self):
        return len(self.spheres)

    @property
    def mbs_radius(self):
        """Radius of the bounding sphere about the body origin"""
        return float(np.max(
            np.linalg.norm(self.centers, axis=1) + self.radii))

    @property
    def max_diameter(self):
        return 2.0 * float(self.radii.max())

    def overlap_graph(self):
        """Sparse adjacency of strictly overlapping sphere pairs"""
        diff = self.centers[:, None, :] - self.centers[None, :, :]
        dist = np.linalg.norm(diff, axis=2)
        touch = dist < self.radii[:, None] + self.radii[None, :]
        np.fill_diagonal(touch, False)
        return csr_matrix(touch)

    def is_connected(self):
        if self.nspheres == 1:
            return True
        ncomp, _ = connected_components(self.overlap_graph(), directed=False)
        return ncomp == 1

    def scaled(self, factor):
        return MSModel.from_arrays(self.centers * factor, self.radii * factor)


class ShapeDescriptor(object):
    """
    Shape generator: kind, parameters (SI) and primary sphere count.

    Arguments:
        kind: one of SHAPEKINDS
        params: dict of shape parameters, see PARAMNAMES
        nspheres: number of primary spheres
    """
    def __init__(self, kind, params, nspheres=1):
        if kind not in SHAPEKINDS:
            raise ShapeError(
                "Unsupported shape kind '%s'. Supported: %s"
                % (kind, ", ".join(SHAPEKINDS)))
        missing = [key for key in PARAMNAMES[kind] if key not in params]
        if missing:
            raise ShapeError(
                "Shape '%s' needs parameter(s) %s"
                % (kind, ", ".join(missing)))
        self.kind = kind
        self.params = dict(
            (key, float(params[key])) for key in PARAMNAMES[kind])
        self.nspheres = int(nspheres)

    def __eq__(self, other):
        return (isinstance(other, ShapeDescriptor) and
                self.kind == other.kind and self.params == other.params and
                self.nspheres == other.nspheres)

    def __ne__(self, other):
        return not self == other

    def __repr__(self):
        return "ShapeDescriptor(%r, %r, %d)" % (
            self.kind, self.params, self.nspheres)

    def scaled(self, factor):
        return ShapeDescriptor(
            self.kind,
            dict((key, val * factor) for key, val in self.params.items()),
            self.nspheres)


class MassProperties(object):
    """
    Rigid-body mass properties in the body frame.

    Arguments:
        volume: m^3
        mass: kg
        inertia_principal: principal moments, kg m^2
        principal_axes: quaternion rotating the body frame to the principal
            frame (identity for all built-in shapes)
    """
    def __init__(self, volume, mass, inertia_principal,
                 principal_axes=IDENTITY):
        inertia = np.array(inertia_principal, dtype=float)
        if not volume > 0:
            raise ShapeError("Volume must be positive, got %r" % volume)
        if not np.all(inertia > 0):
            raise ShapeError(
                "Principal moments must be positive, got %r" % inertia)
        ixx, iyy, izz = inertia
        tol = 1e-12 * inertia.sum()
        if ixx + iyy < izz - tol or iyy + izz < ixx - tol or \
                izz + ixx < iyy - tol:
            raise ShapeError(
                "Principal moments %r violate the triangle inequality"
                % inertia)
        self.volume = float(volume)
        self.mass = float(mass)
        self.com = np.zeros(3)
        self.inertia_principal = inertia
        self.principal_axes = np.array(principal_axes, dtype=float)

    @property
    def density(self):
        return self.mass / self.volume


# ==================================================================
# = multi-sphere builders
# ==================================================================
def _axial_model(profile, nspheres):
    centers = shapeutils.axial_centers(profile, nspheres)
    spheres = []
    for xcen in centers:
        rad = shapeutils.inscribed_radius(profile, xcen)
        spheres.append(SphereElement((xcen, 0.0, 0.0), rad))
    return MSModel(spheres)


def _check_odd(nspheres):
    if nspheres < 1 or nspheres % 2 != 1:
        raise ShapeError(
            "Axial MIS models need an odd sphere count, got %r" % nspheres)


def build_sphere_ms(r):
    """Single-sphere model"""
    if not r > 0:
        raise ShapeError("Sphere radius must be positive, got %r" % r)
    return MSModel([SphereElement((0.0, 0.0, 0.0), r)])


def build_ellipsoid_ms(a, b, nspheres):
    """Maximal inscribed spheres of the prolate spheroid with semi-axes
    (a, b, b), centres on the major (x) axis.

    The end spheres are tangent at the vertices (radius b^2/a) and the
    centre sphere, present for every odd count, has radius b."""
    if not (a > 0 and b > 0):
        raise ShapeError(
            "Ellipsoid semi-axes must be positive, got a=%r, b=%r" % (a, b))
    if a < b:
        raise ShapeError(
            "Ellipsoid needs a >= b (major axis along x), got a=%r, b=%r"
            % (a, b))
    _check_odd(nspheres)
    return _axial_model(shapeutils.EllipseProfile(a, b), nspheres)


def build_spherocylinder_ms(R, L, nspheres):
    """Equal spheres of radius R, centres uniformly spaced on the segment
    [-L/2, L/2] of the x axis"""
    if not R > 0 or L < 0:
        raise ShapeError(
            "Spherocylinder needs R > 0 and L >= 0, got R=%r, L=%r" % (R, L))
    if nspheres < 2:
        raise ShapeError(
            "Spherocylinder needs at least 2 spheres, got %r" % nspheres)
    xs = np.linspace(-0.5 * L, 0.5 * L, nspheres)
    return MSModel([SphereElement((xcen, 0.0, 0.0), R) for xcen in xs])


def build_torus_ms(R_major, r_minor, nspheres):
    """Spheres of radius r_minor centred on the circle of radius R_major in
    the xy plane"""
    if not R_major > r_minor > 0:
        raise ShapeError(
            "Torus needs R_major > r_minor > 0, got R=%r, r=%r"
            % (R_major, r_minor))
    if nspheres < 3:
        raise ShapeError("Torus needs at least 3 spheres, got %r" % nspheres)
    if 2.0 * R_major * np.sin(np.pi / nspheres) >= 2.0 * r_minor:
        raise ShapeError(
            "%d spheres of radius %g on a circle of radius %g do not overlap"
            % (nspheres, r_minor, R_major))
    phi = 2.0 * np.pi * np.arange(nspheres) / nspheres
    centers = np.column_stack(
        [R_major * np.cos(phi), R_major * np.sin(phi), np.zeros(nspheres)])
    return MSModel.from_arrays(centers, np.full(nspheres, r_minor))


def build_cassini_ms(a, b, nspheres):
    """Maximal inscribed spheres of the Cassini oval solid (revolved about
    its major x axis), single-oval regime b > a only"""
    if nspheres < 3:
        raise ShapeError(
            "Cassini model needs at least 3 spheres, got %r" % nspheres)
    _check_odd(nspheres)
    return _axial_model(shapeutils.CassiniProfile(a, b), nspheres)


def build_ms(descriptor):
    """Builds the MS model of a ShapeDescriptor"""
    par = descriptor.params
    kind = descriptor.kind
    if kind == 'sphere':
        return build_sphere_ms(par['r'])
    elif kind == 'ellipsoid':
        return build_ellipsoid_ms(par['a'], par['b'], descriptor.nspheres)
    elif kind == 'spherocylinder':
        return build_spherocylinder_ms(
            par['R'], par['L'], descriptor.nspheres)
    elif kind == 'torus':
        return build_torus_ms(par['R'], par['r'], descriptor.nspheres)
    elif kind == 'cassini':
        return build_cassini_ms(par['a'], par['b'], descriptor.nspheres)
    raise ShapeError("Unsupported shape kind '%s'" % kind)


# ==================================================================
# = mass properties of the analytic solids
# ==================================================================
def mass_properties(generator, density):
    """Volume, mass and principal inertia of the exact analytic solid of a
    shape descriptor (not of the sphere union)."""
    if not density > 0:
        raise ShapeError("Density must be positive, got %r" % density)
    if not isinstance(generator, ShapeDescriptor):
        raise ShapeError("Unsupported generator %r" % (generator,))
    par = generator.params
    kind = generator.kind
    if kind == 'sphere':
        rad = par['r']
        volume = shapeutils.sphere_volume(rad)
        mass = density * volume
        inertia = np.full(3, 0.4 * mass * rad ** 2)
    elif kind == 'ellipsoid':
        a, b = par['a'], par['b']
        volume = shapeutils.ellipsoid_volume(a, b)
        mass = density * volume
        inertia = np.array([
            0.4 * mass * b ** 2,
            0.2 * mass * (a ** 2 + b ** 2),
            0.2 * mass * (a ** 2 + b ** 2)])
    elif kind == 'spherocylinder':
        rad, length = par['R'], par['L']
        mcyl = density * np.pi * rad ** 2 * length
        msph = density * shapeutils.sphere_volume(rad)
        volume = shapeutils.spherocylinder_volume(rad, length)
        mass = mcyl + msph
        axial = 0.5 * mcyl * rad ** 2 + 0.4 * msph * rad ** 2
        transverse = (
            mcyl * (length ** 2 / 12.0 + rad ** 2 / 4.0) +
            msph * (0.4 * rad ** 2 + length ** 2 / 4.0 +
                    3.0 * length * rad / 8.0))
        inertia = np.array([axial, transverse, transverse])
    elif kind == 'torus':
        rmaj, rmin = par['R'], par['r']
        volume = shapeutils.torus_volume(rmaj, rmin)
        mass = density * volume
        inplane = mass * (0.5 * rmaj ** 2 + 0.625 * rmin ** 2)
        inertia = np.array(
            [inplane, inplane, mass * (rmaj ** 2 + 0.75 * rmin ** 2)])
    elif kind == 'cassini':
        profile = shapeutils.CassiniProfile(par['a'], par['b'])
        volume, i_axial, i_trans = shapeutils.revolution_properties(profile)
        mass = density * volume
        inertia = density * np.array([i_axial, i_trans, i_trans])
    else:
        raise ShapeError("Unsupported shape kind '%s'" % kind)
    return MassProperties(volume, mass, inertia)


def equal_volume_descriptor(kind, volume, nspheres, aspect=None):
    """ShapeDescriptor of the given kind scaled to the given volume, using
    the fixed shape ratios of the packing scenes"""
    return ShapeDescriptor(
        kind, shapeutils.equal_volume_size(kind, volume, aspect), nspheres)


# ==================================================================
# = templates
# ==================================================================
class ShapeTemplate(object):
    """
    Immutable shape definition shared by all particles of a class.

    Arguments:
        name (str): template name used in scene files and snapshots
        generator: ShapeDescriptor
        density: kg/m^3, for the mass properties
        surface: optional SurfaceMesh (body frame)
        cells: optional CellMesh (body frame)
        curvature_model: 'eq' (equal-volume sphere radius) or 'sph'
            (contacting primary sphere radius) for the Hertz radius
    """
    def __init__(self, name, generator, density, surface=None, cells=None,
                 curvature_model='eq'):
        if curvature_model not in CURVATURE_MODELS:
            raise ShapeError(
                "Unknown curvature model '%s', use one of %s"
                % (curvature_model, CURVATURE_MODELS))
        self.name = name
        self.generator = generator
        self.ms = build_ms(generator)
        self.props = mass_properties(generator, density)
        self.surface = surface
        self.cells = cells
        self.curvature_model = curvature_model
        LOGGER.debug(
            "Template %s: %d spheres, R_MBS=%g, m=%g"
            % (name, self.ms.nspheres, self.ms.mbs_radius, self.props.mass))

    @property
    def equivalent_radius(self):
        """Radius of the sphere with the same volume"""
        return (3.0 * self.props.volume / (4.0 * np.pi)) ** (1.0 / 3.0)

    @property
    def mbs_radius(self):
        return self.ms.mbs_radius

    @property
    def mass(self):
        return self.props.mass

    @property
    def nspheres(self):
        return self.ms.nspheres

    def contact_radii(self):
        """Per-sphere radius entering the effective Hertz radius"""
        if self.curvature_model == 'sph':
            return np.array(self.ms.radii)
        return np.full(self.ms.nspheres, self.equivalent_radius)
