# coding: utf-8
"""
pymsdem.world

The simulated scene: particle state, materials, boundary walls, insert
regions and particle streams.

Particle state is held as arrays in a ParticleSystem (one row per particle,
one row per primary sphere for the sphere tables); a Particle is a light
view on one row. Particles are only ever appended, so particle ids and
global sphere ids (gids) stay stable for the whole run.

Walls follow a base class / variant pattern: PlaneWall, CylinderWall and
MeshWall share the rigid-rotation kinematics of Wall.
"""

from __future__ import division, print_function, absolute_import
from builtins import object, range
import logging

import numpy as np
from scipy.spatial import cKDTree

from pymsdem import quatutils
from pymsdem.demhelpers import WorldError, loglevel, as_vector, unit

logging.basicConfig(level=loglevel())
LOGGER = logging.getLogger('pymsdem.world')

UNIT_TOL = 1e-9
REJECTION_BUDGET = 10000
SPIN_MODES = ('always', 'release')


class Pose(object):
    """Position (m) and unit orientation quaternion (w, x, y, z)"""
    def __init__(self, position=(0.0, 0.0, 0.0),
                 orientation=(1.0, 0.0, 0.0, 0.0)):
        self.position = as_vector(position, 'position')
        self.orientation = np.array(orientation, dtype=float)
        if self.orientation.shape != (4,) or \
                not quatutils.is_unit(self.orientation, UNIT_TOL):
            raise WorldError(
                "Pose orientation must be a unit quaternion, got %r"
                % (orientation,))

    def apply(self, points):
        """Maps body-frame points to the world frame"""
        return quatutils.rotate(self.orientation, points) + self.position


class Material(object):
    """
    Contact material of a particle class or a wall.

    Arguments:
        young: Young's modulus, Pa
        poisson: Poisson's ratio, [0, 0.5)
        density: kg/m^3 (irrelevant for walls)
        restitution: coefficient of restitution, (0, 1]
        mu_pp: sliding friction against particles
        mu_pw: sliding friction against walls
        mu_roll: rolling friction coefficient
    """
    def __init__(self, name, young, poisson, density=1.0, restitution=0.6,
                 mu_pp=0.0, mu_pw=0.0, mu_roll=0.001):
        if not young > 0:
            raise WorldError("%s: Young's modulus must be positive" % name)
        if not 0.0 <= poisson < 0.5:
            raise WorldError("%s: Poisson's ratio must be in [0, 0.5)" % name)
        if not density > 0:
            raise WorldError("%s: density must be positive" % name)
        if not 0.0 < restitution <= 1.0:
            raise WorldError(
                "%s: restitution must be in (0, 1], got %r"
                % (name, restitution))
        if min(mu_pp, mu_pw, mu_roll) < 0:
            raise WorldError("%s: friction coefficients must be >= 0" % name)
        self.name = name
        self.young = float(young)
        self.poisson = float(poisson)
        self.density = float(density)
        self.restitution = float(restitution)
        self.mu_pp = float(mu_pp)
        self.mu_pw = float(mu_pw)
        self.mu_roll = float(mu_roll)

    @property
    def shear_modulus(self):
        return self.young / (2.0 * (1.0 + self.poisson))


# ==================================================================
# = particles
# ==================================================================
class Particle(object):
    """View on one particle row of a ParticleSystem. Vector attributes are
    numpy views: writing to them updates the system."""
    def __init__(self, system, index):
        self._system = system
        self.index = index

    @property
    def id(self):
        return int(self._system.ids[self.index])

    @property
    def template(self):
        return self._system.templates[self._system.cls[self.index]]

    @property
    def material(self):
        return self._system.materials[self._system.cls[self.index]]

    @property
    def pose(self):
        return Pose(self._system.pos[self.index],
                    self._system.quat[self.index])

    @property
    def position(self):
        return self._system.pos[self.index]

    @property
    def orientation(self):
        return self._system.quat[self.index]

    @property
    def v(self):
        return self._system.vel[self.index]

    @property
    def w(self):
        return self._system.omega[self.index]

    @property
    def f_acc(self):
        return self._system.force[self.index]

    @property
    def t_acc(self):
        return self._system.torque[self.index]

    @property
    def mass(self):
        return float(self._system.mass[self.index])

    @property
    def tag(self):
        return self._system.tags[self.index]

    @property
    def fixed(self):
        return bool(self._system.fixed[self.index])

    def sphere_gids(self):
        start = self._system.sphere_start[self.index]
        return np.arange(start, start + self.template.nspheres)

    def __repr__(self):
        return "Particle(id=%d, template=%s)" % (self.id, self.template.name)


class ParticleSystem(object):
    """
    Array storage of all particles and their primary spheres.

    Particle classes pair a ShapeTemplate with a Material and are registered
    with add_class before particles of that class are added.
    """
    def __init__(self):
        self.templates = []
        self.materials = []
        self.ids = np.zeros(0, dtype=np.int64)
        self.cls = np.zeros(0, dtype=np.int64)
        self.pos = np.zeros((0, 3))
        self.quat = np.zeros((0, 4))
        self.vel = np.zeros((0, 3))
        self.omega = np.zeros((0, 3))
        self.force = np.zeros((0, 3))
        self.torque = np.zeros((0, 3))
        self.acc = np.zeros((0, 3))
        self.mass = np.zeros(0)
        self.inertia = np.zeros((0, 3))
        self.fixed = np.zeros(0, dtype=bool)
        self.tags = []
        self.sphere_start = np.zeros(0, dtype=np.int64)
        # per primary sphere, indexed by gid
        self.sphere_owner = np.zeros(0, dtype=np.int64)
        self.sphere_local = np.zeros(0, dtype=np.int64)
        self.sphere_body = np.zeros((0, 3))
        self.sphere_radius = np.zeros(0)
        self.sphere_rcontact = np.zeros(0)

    def add_class(self, template, material):
        """Registers a particle class, returns its index"""
        self.templates.append(template)
        self.materials.append(material)
        return len(self.templates) - 1

    def class_index(self, name):
        for idx, tmpl in enumerate(self.templates):
            if tmpl.name == name:
                return idx
        raise WorldError("No particle class with template '%s'" % name)

    @property
    def count(self):
        return len(self.ids)

    @property
    def nspheres(self):
        return len(self.sphere_owner)

    def __len__(self):
        return self.count

    def add_particles(self, cls, positions, orientations, velocities=None,
                      omegas=None, tag='', fixed=False):
        """Appends particles of class cls; returns their Particle views"""
        positions = np.atleast_2d(np.asarray(positions, dtype=float))
        num = len(positions)
        if num == 0:
            return []
        orientations = np.atleast_2d(np.asarray(orientations, dtype=float))
        if not quatutils.is_unit(orientations, UNIT_TOL):
            raise WorldError("Particle orientations must be unit quaternions")
        if velocities is None:
            velocities = np.zeros((num, 3))
        if omegas is None:
            omegas = np.zeros((num, 3))
        velocities = np.broadcast_to(
            np.asarray(velocities, dtype=float), (num, 3))
        omegas = np.broadcast_to(np.asarray(omegas, dtype=float), (num, 3))
        tmpl = self.templates[cls]
        first = self.count
        nsph = tmpl.nspheres

        self.ids = np.concatenate(
            [self.ids, np.arange(first, first + num, dtype=np.int64)])
        self.cls = np.concatenate([self.cls, np.full(num, cls, np.int64)])
        self.pos = np.vstack([self.pos, positions])
        self.quat = np.vstack([self.quat, orientations])
        self.vel = np.vstack([self.vel, velocities])
        self.omega = np.vstack([self.omega, omegas])
        self.force = np.vstack([self.force, np.zeros((num, 3))])
        self.torque = np.vstack([self.torque, np.zeros((num, 3))])
        self.acc = np.vstack([self.acc, np.zeros((num, 3))])
        self.mass = np.concatenate([self.mass, np.full(num, tmpl.mass)])
        self.inertia = np.vstack(
            [self.inertia, np.tile(tmpl.props.inertia_principal, (num, 1))])
        self.fixed = np.concatenate([self.fixed, np.full(num, bool(fixed))])
        self.tags.extend([tag] * num)

        start = self.nspheres
        self.sphere_start = np.concatenate(
            [self.sphere_start, start + nsph * np.arange(num, dtype=np.int64)])
        self.sphere_owner = np.concatenate(
            [self.sphere_owner,
             np.repeat(np.arange(first, first + num), nsph)])
        self.sphere_local = np.concatenate(
            [self.sphere_local, np.tile(np.arange(nsph), num)])
        self.sphere_body = np.vstack(
            [self.sphere_body, np.tile(tmpl.ms.centers, (num, 1))])
        self.sphere_radius = np.concatenate(
            [self.sphere_radius, np.tile(tmpl.ms.radii, num)])
        self.sphere_rcontact = np.concatenate(
            [self.sphere_rcontact, np.tile(tmpl.contact_radii(), num)])
        return [Particle(self, idx) for idx in range(first, first + num)]

    def particle(self, index):
        if not 0 <= index < self.count:
            raise WorldError("No particle with id %r" % index)
        return Particle(self, index)

    def __iter__(self):
        for idx in range(self.count):
            yield Particle(self, idx)

    def rotation_matrices(self):
        return quatutils.to_matrix(self.quat)

    def sphere_centers(self):
        """World-frame centres of all primary spheres, indexed by gid"""
        if self.nspheres == 0:
            return np.zeros((0, 3))
        rot = self.rotation_matrices()[self.sphere_owner]
        return self.pos[self.sphere_owner] + np.einsum(
            'nij,nj->ni', rot, self.sphere_body)

    def mbs_radii(self):
        return np.array([self.templates[c].mbs_radius for c in self.cls])

    def volumes(self):
        return np.array([self.templates[c].props.volume for c in self.cls])

    def world_inertia(self):
        """World-frame inertia tensors (n, 3, 3)"""
        rot = self.rotation_matrices()
        return np.einsum('nij,nj,nkj->nik', rot, self.inertia, rot)

    def clear_accumulators(self):
        self.force[:] = 0.0
        self.torque[:] = 0.0


# ==================================================================
# = walls
# ==================================================================
class Wall(object):
    """
    Base class of boundary walls: rigid rotation about a fixed axis.

    Arguments:
        material: Material of the wall surface
        omega: angular velocity vector, rad/s (zero for static walls)
        center: point on the rotation axis
        spin: 'always' (spins from t=0) or 'release' (spins after the
            release event)
        barrier (bool): removed at the release event
        name (str): label used in logs
    """
    kind = None

    def __init__(self, material, omega=(0.0, 0.0, 0.0),
                 center=(0.0, 0.0, 0.0), spin='always', barrier=False,
                 name=None):
        if spin not in SPIN_MODES:
            raise WorldError("Unknown spin mode '%s'" % spin)
        self.material = material
        self.omega = as_vector(omega, 'omega')
        self.center = as_vector(center, 'center')
        self.spin = spin
        self.barrier = bool(barrier)
        self.name = name or self.kind
        self.id = None
        self.active = True
        self.spinning = spin == 'always'
        self.spin_time = 0.0

    @property
    def rotating(self):
        return self.spinning and np.any(self.omega != 0.0)

    def release(self):
        """Release event: barriers disappear, 'release' walls start"""
        if self.barrier and self.active:
            self.active = False
            LOGGER.info("Barrier wall %s removed" % self.name)
        if self.spin == 'release' and not self.spinning:
            self.spinning = True
            LOGGER.info("Wall %s starts spinning" % self.name)

    def advance(self, dt):
        """Advances the rotation by dt and updates the geometry"""
        if not self.rotating:
            return
        self.spin_time += dt
        quat = quatutils.from_rotation_vector(self.omega * self.spin_time)
        self._set_rotation(quat)

    def _rotate_points(self, quat, points):
        return quatutils.rotate(quat, np.asarray(points) - self.center) + \
            self.center

    def _set_rotation(self, quat):
        raise NotImplementedError

    def velocity_at(self, points):
        """Rigid-motion velocity of the wall surface at points (n, 3)"""
        points = np.atleast_2d(points)
        if not self.rotating:
            return np.zeros_like(points)
        return np.cross(self.omega, points - self.center)

    def distance(self, points):
        """Unsigned distance from points (n, 3) to the wall surface"""
        raise NotImplementedError

    def clearance(self, points):
        """Distance from points to the wall measured into the particle
        side; negative behind the wall. Two-sided walls return the
        unsigned distance."""
        return self.distance(points)


class PlaneWall(Wall):
    """Infinite plane through point with unit normal"""
    kind = 'plane'

    def __init__(self, point, normal, material, **kwargs):
        super(PlaneWall, self).__init__(material, **kwargs)
        try:
            self.ref_normal = unit(as_vector(normal, 'normal'), 'normal')
        except ValueError as err:
            raise WorldError(str(err))
        self.ref_point = as_vector(point, 'point')
        self.point = self.ref_point.copy()
        self.normal = self.ref_normal.copy()

    def _set_rotation(self, quat):
        self.point = self._rotate_points(quat, self.ref_point)
        self.normal = quatutils.rotate(quat, self.ref_normal)

    def signed_distance(self, points):
        return np.dot(np.atleast_2d(points) - self.point, self.normal)

    def distance(self, points):
        return np.abs(self.signed_distance(points))

    def clearance(self, points):
        return self.signed_distance(points)


class CylinderWall(Wall):
    """Infinite cylinder of radius r about the axis line through p1, p2.

    inside=True: particles live inside (drum, container); the contact
    normal points from the surface towards the axis."""
    kind = 'cylinder'

    def __init__(self, radius, p1, p2, material, inside=True, **kwargs):
        super(CylinderWall, self).__init__(material, **kwargs)
        if not radius > 0:
            raise WorldError("Cylinder radius must be positive")
        self.radius = float(radius)
        self.ref_p1 = as_vector(p1, 'p1')
        self.ref_p2 = as_vector(p2, 'p2')
        if np.allclose(self.ref_p1, self.ref_p2, rtol=0.0, atol=0.0):
            raise WorldError("Cylinder axis points p1 and p2 coincide")
        self.inside = bool(inside)
        self.p1 = self.ref_p1.copy()
        self.p2 = self.ref_p2.copy()

    @property
    def axis(self):
        return unit(self.p2 - self.p1)

    def _set_rotation(self, quat):
        self.p1 = self._rotate_points(quat, self.ref_p1)
        self.p2 = self._rotate_points(quat, self.ref_p2)

    def radial(self, points):
        """Radial vectors from the axis to points and their lengths"""
        points = np.atleast_2d(points)
        rel = points - self.p1
        axis = self.axis
        radial = rel - np.outer(rel.dot(axis), axis)
        return radial, np.linalg.norm(radial, axis=1)

    def distance(self, points):
        _, rho = self.radial(points)
        return np.abs(self.radius - rho)

    def clearance(self, points):
        _, rho = self.radial(points)
        if self.inside:
            return self.radius - rho
        return rho - self.radius


class MeshWall(Wall):
    """
    Triangle-mesh wall. Each triangle carries a minimum bounding sphere for
    the broad phase, and global feature ids for contact history:
    faces [0, m), unique edges [m, m + n_e), vertices [m + n_e, ...).

    Arguments:
        mesh: SurfaceMesh in world coordinates
    """
    kind = 'mesh'

    def __init__(self, mesh, material, **kwargs):
        super(MeshWall, self).__init__(material, **kwargs)
        self.mesh = mesh
        self.ref_vertices = mesh.vertices.copy()
        self.vertices = mesh.vertices.copy()
        self.triangles = mesh.triangles.copy()
        ntri = len(self.triangles)
        tri = self.triangles
        # edge k of a triangle joins corner k and corner k+1
        edges = np.stack([tri[:, [0, 1]], tri[:, [1, 2]], tri[:, [2, 0]]],
                         axis=1).reshape(-1, 2)
        edges = np.sort(edges, axis=1)
        self.edges, inverse = np.unique(edges, axis=0, return_inverse=True)
        self.tri_edges = np.asarray(inverse).reshape(ntri, 3)
        self.nedges = len(self.edges)
        self._update_bounds()

    def _set_rotation(self, quat):
        self.vertices = self._rotate_points(quat, self.ref_vertices)
        self._update_bounds()

    @property
    def corners(self):
        return self.vertices[self.triangles]

    def _update_bounds(self):
        self.mbs_center, self.mbs_radius = triangle_mbs(self.corners)
        self._tree = cKDTree(self.mbs_center)
        self._max_mbs = float(self.mbs_radius.max()) if len(
            self.mbs_radius) else 0.0

    def triangle_candidates(self, points, reach):
        """Triangle indices whose bounding sphere is within reach of each
        point: list of sorted index arrays"""
        points = np.atleast_2d(points)
        reach = np.broadcast_to(np.asarray(reach, dtype=float), len(points))
        out = []
        for pnt, rch in zip(points, reach):
            cand = np.array(
                self._tree.query_ball_point(pnt, rch + self._max_mbs),
                dtype=np.int64)
            if cand.size:
                dist = np.linalg.norm(self.mbs_center[cand] - pnt, axis=1)
                cand = np.sort(cand[dist <= rch + self.mbs_radius[cand]])
            out.append(cand)
        return out

    def global_feature(self, tri_index, local_feature):
        """Global feature ids of (triangle, local feature) pairs. Local
        features: 0 face, 1-3 edges, 4-6 vertices."""
        tri_index = np.asarray(tri_index, dtype=np.int64)
        local_feature = np.asarray(local_feature, dtype=np.int64)
        ntri = len(self.triangles)
        out = tri_index.copy()
        is_edge = (local_feature >= 1) & (local_feature <= 3)
        is_vert = local_feature >= 4
        out[is_edge] = ntri + self.tri_edges[
            tri_index[is_edge], local_feature[is_edge] - 1]
        out[is_vert] = ntri + self.nedges + self.triangles[
            tri_index[is_vert], local_feature[is_vert] - 4]
        return out

    def distance(self, points):
        from pymsdem.contact import closest_point_on_triangles
        points = np.atleast_2d(points)
        corners = self.corners
        out = np.empty(len(points))
        for k, pnt in enumerate(points):
            qpts, _ = closest_point_on_triangles(
                np.broadcast_to(pnt, (len(corners), 3)), corners)
            out[k] = np.min(np.linalg.norm(qpts - pnt, axis=1))
        return out


def triangle_mbs(corners):
    """Minimum bounding spheres of triangles (m, 3, 3): centres, radii.

    Obtuse or right triangles are bounded by the sphere on their longest
    edge, acute triangles by their circumsphere."""
    corners = np.asarray(corners, dtype=float)
    if len(corners) == 0:
        return np.zeros((0, 3)), np.zeros(0)
    a = corners[:, 0]
    b = corners[:, 1]
    c = corners[:, 2]
    edge_len2 = np.stack([
        np.sum((b - c) ** 2, axis=1),  # opposite a
        np.sum((c - a) ** 2, axis=1),  # opposite b
        np.sum((a - b) ** 2, axis=1)], axis=1)  # opposite c
    longest = np.argmax(edge_len2, axis=1)
    lmax = edge_len2[np.arange(len(corners)), longest]
    others = edge_len2.sum(axis=1) - lmax
    obtuse = lmax >= others
    mid = np.stack([0.5 * (b + c), 0.5 * (c + a), 0.5 * (a + b)], axis=1)
    centers = mid[np.arange(len(corners)), longest]
    radii = 0.5 * np.sqrt(lmax)
    acute = ~obtuse
    if np.any(acute):
        ab = b[acute] - a[acute]
        ac = c[acute] - a[acute]
        nrm = np.cross(ab, ac)
        denom = 2.0 * np.sum(nrm * nrm, axis=1)
        rel = (np.cross(nrm, ab) * np.sum(ac * ac, axis=1)[:, None] +
               np.cross(ac, nrm) * np.sum(ab * ab, axis=1)[:, None]) / \
            denom[:, None]
        centers[acute] = a[acute] + rel
        radii[acute] = np.linalg.norm(rel, axis=1)
    return centers, radii


# ==================================================================
# = insertion
# ==================================================================
class BoxRegion(object):
    """Axis-aligned box [lo, hi]"""
    kind = 'box'

    def __init__(self, lo, hi):
        self.lo = as_vector(lo, 'lo')
        self.hi = as_vector(hi, 'hi')
        if np.any(self.hi <= self.lo):
            raise WorldError("Box region needs hi > lo componentwise")

    def can_hold(self, margin):
        return bool(np.all(self.hi - self.lo >= 2.0 * margin))

    def sample(self, rng, margin):
        """Uniform point whose ball of radius margin fits in the region"""
        return self.lo + margin + rng.random(3) * (
            self.hi - self.lo - 2.0 * margin)


class CylinderRegion(object):
    """Upright cylinder: axis parallel to z through center (x, y)"""
    kind = 'cylinder'

    def __init__(self, center, radius, zmin, zmax):
        self.center = np.asarray(center, dtype=float)[:2]
        self.radius = float(radius)
        self.zmin = float(zmin)
        self.zmax = float(zmax)
        if not self.radius > 0 or self.zmax <= self.zmin:
            raise WorldError(
                "Cylinder region needs radius > 0 and zmax > zmin")

    def can_hold(self, margin):
        return self.radius >= margin and self.zmax - self.zmin >= 2.0 * margin

    def sample(self, rng, margin):
        u1, u2, u3 = rng.random(3)
        rad = (self.radius - margin) * np.sqrt(u1)
        phi = 2.0 * np.pi * u2
        zpos = self.zmin + margin + u3 * (self.zmax - self.zmin - 2.0 * margin)
        return np.array([self.center[0] + rad * np.cos(phi),
                         self.center[1] + rad * np.sin(phi), zpos])


def uniform_random_quaternion(rng):
    """Unit quaternion uniformly distributed on the rotation group"""
    u1, u2, u3 = rng.random(3)
    return quatutils.from_uniform(u1, u2, u3)


def insert_batch(region, cls, system, walls, rng, count,
                 velocity=(0.0, 0.0, 0.0), tag='',
                 budget=REJECTION_BUDGET):
    """
    Inserts up to count particles of class cls at uniformly random
    positions in region with uniformly random orientations.

    A candidate is accepted only if its bounding sphere lies inside the
    region, lies on the particle side of every active wall (clear of it) and
    intersects no bounding sphere of an existing
    or newly inserted particle. After budget consecutive rejections the
    region is considered full and the batch ends early.

    Returns the list of inserted Particle views.
    """
    template = system.templates[cls]
    rmbs = template.mbs_radius
    if count <= 0 or not region.can_hold(rmbs):
        return []
    if system.count:
        old_centers = system.pos.copy()
        old_radii = system.mbs_radii()
        tree = cKDTree(old_centers)
        reach = rmbs + float(old_radii.max())
    else:
        tree = None
    active = [wall for wall in walls if wall.active]
    new_pos = []
    new_quat = []
    failures = 0
    while len(new_pos) < count and failures < budget:
        cand = region.sample(rng, rmbs)
        quat = uniform_random_quaternion(rng)
        ok = True
        for wall in active:
            if wall.clearance(cand)[0] < rmbs:
                ok = False
                break
        if ok and tree is not None:
            near = tree.query_ball_point(cand, reach)
            if near:
                near = np.array(near)
                dist = np.linalg.norm(old_centers[near] - cand, axis=1)
                if np.any(dist < rmbs + old_radii[near]):
                    ok = False
        if ok and new_pos:
            dist = np.linalg.norm(np.array(new_pos) - cand, axis=1)
            if np.any(dist < 2.0 * rmbs):
                ok = False
        if ok:
            new_pos.append(cand)
            new_quat.append(quat)
            failures = 0
        else:
            failures += 1
    if len(new_pos) < count:
        LOGGER.info(
            "Insert region full: %d of %d particles of %s inserted"
            % (len(new_pos), count, template.name))
    if not new_pos:
        return []
    return system.add_particles(
        cls, np.array(new_pos), np.array(new_quat), velocities=velocity,
        tag=tag)


class Stream(object):
    """
    A particle stream: batches of particles inserted into a region every
    interval steps until a stop condition holds.

    Arguments:
        name (str): stream name, referenced by other streams' after
        cls (int): particle class index
        region: BoxRegion or CylinderRegion
        velocity: initial velocity of inserted particles, m/s
        interval (int): steps between triggers, >= 1
        batch: (lo, hi) particles per trigger, drawn uniformly
        count: stop after this many particles (or None)
        mass: stop after this inserted mass, kg (or None)
        after: name of a stream that must finish before this one starts
        tag (str): tag given to the inserted particles
        seed (int): seed of the stream's random generator
    """
    def __init__(self, name, cls, region, velocity=(0.0, 0.0, 0.0),
                 interval=1, batch=(1, 1), count=None, mass=None, after=None,
                 tag='', seed=0):
        if int(interval) < 1:
            raise WorldError("Stream %s: interval must be >= 1" % name)
        lo, hi = int(batch[0]), int(batch[1])
        if lo < 1 or hi < lo:
            raise WorldError(
                "Stream %s: invalid batch range %r" % (name, batch))
        self.name = name
        self.cls = cls
        self.region = region
        self.velocity = as_vector(velocity, 'velocity')
        self.interval = int(interval)
        self.batch = (lo, hi)
        self.count = count
        self.mass = mass
        self.after = after
        self.tag = tag
        self.seed = seed
        self.rng = np.random.Generator(np.random.PCG64(seed))
        self.inserted = 0
        self.inserted_mass = 0.0
        self.finished = False
        self.start_step = None

    def is_due(self, step, finished):
        """True if the stream triggers at step; finished is the set of
        names of finished streams"""
        if self.finished:
            return False
        if self.start_step is None:
            if self.after is not None and self.after not in finished:
                return False
            self.start_step = step
        return (step - self.start_step) % self.interval == 0

    def trigger(self, system, walls, step):
        """Inserts one batch. Returns the inserted particles."""
        lo, hi = self.batch
        request = int(self.rng.integers(lo, hi + 1))
        if self.count is not None:
            request = min(request, self.count - self.inserted)
        unit_mass = system.templates[self.cls].mass
        if self.mass is not None:
            left = int(np.ceil((self.mass - self.inserted_mass) / unit_mass))
            request = min(request, max(left, 0))
        new = insert_batch(self.region, self.cls, system, walls, self.rng,
                           request, velocity=self.velocity, tag=self.tag)
        self.inserted += len(new)
        self.inserted_mass += len(new) * unit_mass
        LOGGER.info(
            "step %d: stream %s inserted %d of %d (total %d)"
            % (step, self.name, len(new), request, self.inserted))
        if self.count is not None and self.inserted >= self.count:
            self.finished = True
        elif self.mass is not None and self.inserted_mass >= self.mass:
            self.finished = True
        elif self.count is None and self.mass is None and len(new) < request:
            self.finished = True
        if self.finished:
            LOGGER.info("step %d: stream %s finished" % (step, self.name))
        return new


class Scene(object):
    """Particles, walls and streams of one simulation"""
    def __init__(self, system=None, walls=None, streams=None):
        self.system = system if system is not None else ParticleSystem()
        self.walls = []
        for wall in walls or []:
            self.add_wall(wall)
        self.streams = list(streams or [])
        self.released = False

    def add_wall(self, wall):
        wall.id = len(self.walls)
        self.walls.append(wall)
        return wall

    @property
    def active_walls(self):
        return [wall for wall in self.walls if wall.active]

    @property
    def streams_finished(self):
        return all(stream.finished for stream in self.streams)

    @property
    def release_pending(self):
        return not self.released and any(
            wall.barrier or wall.spin == 'release' for wall in self.walls)

    def release(self):
        for wall in self.walls:
            wall.release()
        self.released = True

    def run_streams(self, step):
        """Triggers all due streams in declaration order"""
        finished = set(s.name for s in self.streams if s.finished)
        inserted = []
        for stream in self.streams:
            if stream.is_due(step, finished):
                inserted.extend(stream.trigger(
                    self.system, self.active_walls, step))
                if stream.finished:
                    finished.add(stream.name)
        return inserted
