# coding: utf-8
"""
pymsdem.contact

Narrow-phase contact geometry between primary spheres and between primary
spheres and walls: signed gap d_n (negative while penetrating), unit normal
n pointing from body j / the wall towards sphere i, and the contact point
p_c = O_i - R_i n on the surface of sphere i.

Every operation comes as a batch routine over numpy arrays; the scalar
functions wrap the batch routines and return a ContactGeom or None.

Triangle features: 0 face, 1-3 edges (edge k joins corner k-1 and corner
k modulo 3), 4-6 vertices (corner 0, 1, 2).
"""

from __future__ import division, print_function, absolute_import
from builtins import object
import logging

import numpy as np

from pymsdem.demhelpers import ContactError, loglevel, rowdot

logging.basicConfig(level=loglevel())
LOGGER = logging.getLogger('pymsdem.contact')

FACE = 0
EDGE_AB, EDGE_BC, EDGE_CA = 1, 2, 3
VERT_A, VERT_B, VERT_C = 4, 5, 6

# history key layout for wall contacts: gid | wall | feature
WALL_BITS = 8
FEATURE_BITS = 24


class ContactGeom(object):
    """
    Contact geometry of one sphere pair or sphere-wall feature pair.

    Attributes:
        d_n: signed gap, m (negative while penetrating)
        normal: unit normal, from j (or the wall) towards i
        point: contact point on the surface of sphere i
        key: pair identity, (gid_i, gid_j) or (gid, wall id, feature id)
        feature: local triangle feature for sphere-triangle contacts
    """
    def __init__(self, d_n, normal, point, key=None, feature=None):
        self.d_n = float(d_n)
        self.normal = np.asarray(normal, dtype=float)
        self.point = np.asarray(point, dtype=float)
        self.key = key
        self.feature = feature

    def __repr__(self):
        return "ContactGeom(d_n=%g, normal=%r, point=%r, key=%r)" % (
            self.d_n, self.normal.tolist(), self.point.tolist(), self.key)


# ==================================================================
# = batch routines
# ==================================================================
def batch_sphere_sphere(c_i, r_i, c_j, r_j):
    """Gap, normal and contact point for arrays of sphere pairs"""
    c_i = np.atleast_2d(c_i)
    c_j = np.atleast_2d(c_j)
    diff = c_i - c_j
    dist = np.sqrt(rowdot(diff, diff))
    if np.any(dist == 0.0):
        bad = int(np.nonzero(dist == 0.0)[0][0])
        raise ContactError(
            "Coincident sphere centres at %r" % (c_i[bad].tolist(),))
    normal = diff / dist[:, None]
    d_n = dist - (r_i + r_j)
    point = c_i - np.asarray(r_i)[..., None] * normal
    return d_n, normal, point


def batch_sphere_plane(centers, radii, point, normal):
    """Two-sided sphere-plane contact: the normal points from the foot of
    the perpendicular towards the sphere centre"""
    centers = np.atleast_2d(centers)
    normal = np.asarray(normal, dtype=float)
    height = np.dot(centers - point, normal)
    foot = centers - height[:, None] * normal
    rel = centers - foot
    dist = np.abs(height)
    with np.errstate(invalid='ignore', divide='ignore'):
        nrm = np.where(dist[:, None] > 0.0,
                       rel / np.where(dist > 0.0, dist, 1.0)[:, None],
                       normal)
    d_n = dist - radii
    contact = centers - np.asarray(radii)[..., None] * nrm
    return d_n, nrm, contact


def batch_sphere_cylinder(centers, radii, radius, p1, p2, inside=True):
    """Sphere contact with the infinite cylinder of the given radius about
    the axis line through p1 and p2"""
    centers = np.atleast_2d(centers)
    radii = np.broadcast_to(np.asarray(radii, dtype=float), len(centers))
    axis = np.asarray(p2, dtype=float) - np.asarray(p1, dtype=float)
    axis = axis / np.linalg.norm(axis)
    rel = centers - p1
    radial = rel - np.outer(rel.dot(axis), axis)
    rho = np.sqrt(rowdot(radial, radial))
    on_axis = rho == 0.0
    if np.any(on_axis):
        if not inside:
            raise ContactError("Sphere centre on the axis of an outer "
                               "cylinder wall")
        if np.any(radius - radii[on_axis] <= 0.0):
            raise ContactError(
                "Sphere centred on a cylinder axis fills the cylinder")
    unit = radial / np.where(on_axis, 1.0, rho)[:, None]
    if inside:
        d_n = (radius - rho) - radii
        nrm = -unit
    else:
        d_n = (rho - radius) - radii
        nrm = unit
    # centre on the axis of an inside wall: positive gap, arbitrary normal
    if np.any(on_axis):
        fallback = np.cross(axis, [1.0, 0.0, 0.0])
        if np.linalg.norm(fallback) < 1e-6:
            fallback = np.cross(axis, [0.0, 1.0, 0.0])
        nrm[on_axis] = fallback / np.linalg.norm(fallback)
    contact = centers - radii[:, None] * nrm
    return d_n, nrm, contact


def closest_point_on_triangles(points, corners):
    """Closest points on triangles (n, 3, 3) to points (n, 3) by Voronoi
    region classification. Returns (q, feature)."""
    points = np.atleast_2d(points)
    corners = np.asarray(corners, dtype=float).reshape(-1, 3, 3)
    a = corners[:, 0]
    b = corners[:, 1]
    c = corners[:, 2]
    ab = b - a
    ac = c - a
    ap = points - a
    bp = points - b
    cp = points - c
    d1 = rowdot(ab, ap)
    d2 = rowdot(ac, ap)
    d3 = rowdot(ab, bp)
    d4 = rowdot(ac, bp)
    d5 = rowdot(ab, cp)
    d6 = rowdot(ac, cp)
    vc = d1 * d4 - d3 * d2
    vb = d5 * d2 - d1 * d6
    va = d3 * d6 - d5 * d4

    num = len(points)
    q = np.empty((num, 3))
    feature = np.full(num, -1, dtype=np.int64)
    open_ = np.ones(num, dtype=bool)

    def assign(mask, value, feat):
        mask = mask & open_
        q[mask] = value[mask]
        feature[mask] = feat
        open_[mask] = False

    with np.errstate(invalid='ignore', divide='ignore'):
        assign((d1 <= 0) & (d2 <= 0), a, VERT_A)
        assign((d3 >= 0) & (d4 <= d3), b, VERT_B)
        t_ab = d1 / (d1 - d3)
        assign((vc <= 0) & (d1 >= 0) & (d3 <= 0),
               a + t_ab[:, None] * ab, EDGE_AB)
        assign((d6 >= 0) & (d5 <= d6), c, VERT_C)
        t_ac = d2 / (d2 - d6)
        assign((vb <= 0) & (d2 >= 0) & (d6 <= 0),
               a + t_ac[:, None] * ac, EDGE_CA)
        t_bc = (d4 - d3) / ((d4 - d3) + (d5 - d6))
        assign((va <= 0) & ((d4 - d3) >= 0) & ((d5 - d6) >= 0),
               b + t_bc[:, None] * (c - b), EDGE_BC)
        denom = 1.0 / (va + vb + vc)
        face = a + (vb * denom)[:, None] * ab + (vc * denom)[:, None] * ac
    assign(np.ones(num, dtype=bool), face, FACE)
    return q, feature


def batch_sphere_triangle(centers, radii, corners, prior=None):
    """Sphere-triangle contacts via the closest point on each triangle.
    Returns (d_n, normal, point, feature)."""
    centers = np.atleast_2d(centers)
    corners = np.asarray(corners, dtype=float).reshape(-1, 3, 3)
    radii = np.broadcast_to(np.asarray(radii, dtype=float), len(centers))
    q, feature = closest_point_on_triangles(centers, corners)
    rel = centers - q
    dist = np.sqrt(rowdot(rel, rel))
    degenerate = dist == 0.0
    nrm = rel / np.where(degenerate, 1.0, dist)[:, None]
    if np.any(degenerate):
        face = np.cross(corners[:, 1] - corners[:, 0],
                        corners[:, 2] - corners[:, 0])
        face = face / np.sqrt(rowdot(face, face))[:, None]
        if prior is not None:
            side = rowdot(np.atleast_2d(prior) - q, face)
            face = np.where((side < 0)[:, None], -face, face)
        nrm[degenerate] = face[degenerate]
    d_n = dist - radii
    contact = centers - radii[:, None] * nrm
    return d_n, nrm, contact, feature


# ==================================================================
# = scalar operations
# ==================================================================
def _emit(d_n, normal, point, key=None, feature=None):
    if d_n[0] < 0.0:
        return ContactGeom(d_n[0], normal[0], point[0], key, feature)
    return None


def sphere_sphere(O_i, R_i, O_j, R_j, key=None):
    """Contact of sphere i with sphere j, None if they do not overlap"""
    d_n, nrm, pnt = batch_sphere_sphere(
        np.asarray(O_i, dtype=float), np.atleast_1d(float(R_i)),
        np.asarray(O_j, dtype=float), np.atleast_1d(float(R_j)))
    return _emit(d_n, nrm, pnt, key)


def sphere_plane(O, R, point, normal, key=None):
    """Contact of a sphere with the plane (point, unit normal)"""
    normal = np.asarray(normal, dtype=float)
    if abs(np.linalg.norm(normal) - 1.0) > 1e-9:
        raise ContactError("Plane normal must be a unit vector")
    d_n, nrm, pnt = batch_sphere_plane(
        np.asarray(O, dtype=float), np.atleast_1d(float(R)),
        np.asarray(point, dtype=float), normal)
    return _emit(d_n, nrm, pnt, key)


def sphere_cylinder(O, R, radius, p1, p2, inside=True, key=None):
    """Contact of a sphere with an infinite cylinder wall"""
    p1 = np.asarray(p1, dtype=float)
    p2 = np.asarray(p2, dtype=float)
    if np.array_equal(p1, p2):
        raise ContactError("Cylinder axis points coincide")
    d_n, nrm, pnt = batch_sphere_cylinder(
        np.asarray(O, dtype=float), np.atleast_1d(float(R)), radius, p1, p2,
        inside)
    return _emit(d_n, nrm, pnt, key)


def sphere_triangle(O, R, v0, v1, v2, prior=None, key=None):
    """Contact of a sphere with the triangle (v0, v1, v2). The returned
    geometry carries the local feature owning the closest point."""
    corners = np.array([v0, v1, v2], dtype=float)
    area2 = np.linalg.norm(np.cross(corners[1] - corners[0],
                                    corners[2] - corners[0]))
    if area2 == 0.0:
        raise ContactError("Degenerate triangle")
    d_n, nrm, pnt, feat = batch_sphere_triangle(
        np.asarray(O, dtype=float), np.atleast_1d(float(R)), corners[None],
        None if prior is None else np.asarray(prior, dtype=float))
    return _emit(d_n, nrm, pnt, key, int(feat[0]))


# ==================================================================
# = narrow phase over a neighbor list
# ==================================================================
class ContactSet(object):
    """
    All contacts of one step as arrays.

    Particle-particle: pp_i, pp_j (gids), pp_dn, pp_normal, pp_point,
    pp_key. Sphere-wall: pw_gid, pw_wall, pw_feature (global feature id,
    0 for implicit walls), pw_dn, pw_normal, pw_point, pw_key.
    """
    def __init__(self):
        self.pp_i = np.zeros(0, dtype=np.int64)
        self.pp_j = np.zeros(0, dtype=np.int64)
        self.pp_dn = np.zeros(0)
        self.pp_normal = np.zeros((0, 3))
        self.pp_point = np.zeros((0, 3))
        self.pw_gid = np.zeros(0, dtype=np.int64)
        self.pw_wall = np.zeros(0, dtype=np.int64)
        self.pw_feature = np.zeros(0, dtype=np.int64)
        self.pw_dn = np.zeros(0)
        self.pw_normal = np.zeros((0, 3))
        self.pw_point = np.zeros((0, 3))

    @property
    def pp_key(self):
        return pair_key(self.pp_i, self.pp_j)

    @property
    def pw_key(self):
        return wall_key(self.pw_gid, self.pw_wall, self.pw_feature)

    @property
    def npp(self):
        return len(self.pp_i)

    @property
    def npw(self):
        return len(self.pw_gid)

    def __len__(self):
        return self.npp + self.npw


def pair_key(gid_i, gid_j):
    """History keys of sphere pairs, ordered like (gid_i, gid_j)"""
    return (np.asarray(gid_i, dtype=np.int64) << 31) | np.asarray(
        gid_j, dtype=np.int64)


def wall_key(gid, wall, feature):
    """History keys of sphere-wall contacts, ordered like
    (gid, wall, feature)"""
    wall = np.asarray(wall, dtype=np.int64)
    feature = np.asarray(feature, dtype=np.int64)
    if wall.size and (wall.max() >= 1 << WALL_BITS or
                      feature.max() >= 1 << FEATURE_BITS):
        raise ContactError("Too many walls or mesh features for history keys")
    return (np.asarray(gid, dtype=np.int64) << (WALL_BITS + FEATURE_BITS)) | \
        (wall << FEATURE_BITS) | feature


def _mesh_ownership(gid, tri, feat, gfeat, wall):
    """Indices of mesh contacts to keep for one wall.

    Edge and vertex contacts on the boundary of a triangle already touched
    through its face are dropped, vertex contacts at the end of a kept edge
    contact are dropped, and of several contacts with the same global
    feature only the one from the lowest triangle index is kept."""
    keep = []
    for sphere in np.unique(gid):
        idx = np.nonzero(gid == sphere)[0]
        face_tris = tri[idx][feat[idx] == FACE]
        blocked_edges = set(wall.tri_edges[face_tris].ravel().tolist())
        blocked_verts = set(wall.triangles[face_tris].ravel().tolist())
        nface = len(wall.triangles)
        kept_edges = []
        for k in idx:
            if EDGE_AB <= feat[k] <= EDGE_CA:
                if gfeat[k] - nface not in blocked_edges:
                    kept_edges.append(k)
        for k in kept_edges:
            blocked_verts.update(wall.edges[gfeat[k] - nface].tolist())
        seen = set()
        for k in idx[np.lexsort((tri[idx], gfeat[idx]))]:
            if feat[k] == FACE:
                pass
            elif EDGE_AB <= feat[k] <= EDGE_CA:
                if k not in kept_edges:
                    continue
            else:
                vert = gfeat[k] - nface - wall.nedges
                if vert in blocked_verts:
                    continue
            if gfeat[k] in seen:
                continue
            seen.add(gfeat[k])
            keep.append(k)
    return np.array(sorted(keep), dtype=np.int64)


def narrow_phase(system, walls, nlist, centers=None):
    """Resolves all candidate pairs of a NeighborList into a ContactSet"""
    out = ContactSet()
    if centers is None:
        centers = system.sphere_centers()
    radii = system.sphere_radius
    if len(nlist.pairs):
        gi = nlist.pairs[:, 0]
        gj = nlist.pairs[:, 1]
        d_n, nrm, pnt = batch_sphere_sphere(
            centers[gi], radii[gi], centers[gj], radii[gj])
        hit = d_n < 0.0
        out.pp_i = gi[hit]
        out.pp_j = gj[hit]
        out.pp_dn = d_n[hit]
        out.pp_normal = nrm[hit]
        out.pp_point = pnt[hit]

    cand = nlist.walls
    parts = []
    for wall in walls:
        if not wall.active:
            continue
        sel = np.nonzero(cand.wall == wall.id)[0]
        if sel.size == 0:
            continue
        gid = cand.gid[sel]
        if wall.kind == 'plane':
            d_n, nrm, pnt = batch_sphere_plane(
                centers[gid], radii[gid], wall.point, wall.normal)
            gfeat = np.zeros(len(gid), dtype=np.int64)
            hit = np.nonzero(d_n < 0.0)[0]
        elif wall.kind == 'cylinder':
            d_n, nrm, pnt = batch_sphere_cylinder(
                centers[gid], radii[gid], wall.radius, wall.p1, wall.p2,
                wall.inside)
            gfeat = np.zeros(len(gid), dtype=np.int64)
            hit = np.nonzero(d_n < 0.0)[0]
        else:
            tri = cand.tri[sel]
            d_n, nrm, pnt, feat = batch_sphere_triangle(
                centers[gid], radii[gid], wall.corners[tri],
                prior=system.pos[system.sphere_owner[gid]])
            gfeat = wall.global_feature(tri, feat)
            touching = np.nonzero(d_n < 0.0)[0]
            owned = _mesh_ownership(gid[touching], tri[touching],
                                    feat[touching], gfeat[touching], wall)
            hit = touching[owned] if owned.size else owned
        if hit.size == 0:
            continue
        parts.append((gid[hit], np.full(hit.size, wall.id, np.int64),
                      gfeat[hit], d_n[hit], nrm[hit], pnt[hit]))
    if parts:
        gid, wid, gfeat, d_n, nrm, pnt = [np.concatenate(col) for col in
                                          zip(*parts)]
        order = np.lexsort((gfeat, wid, gid))
        out.pw_gid = gid[order]
        out.pw_wall = wid[order]
        out.pw_feature = gfeat[order]
        out.pw_dn = d_n[order]
        out.pw_normal = nrm[order]
        out.pw_point = pnt[order]
    return out
