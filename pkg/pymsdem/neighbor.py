# coding: utf-8
"""
pymsdem.neighbor

Broad-phase contact detection over primary spheres: a cell list sized from
the largest sphere diameter, a Verlet pair list built over the 27-cell
stencil with a skin margin, the displacement guard that decides when the
list must be rebuilt, and bounding-sphere pre-filtering against walls.

Pair lists are sorted by (gid_i, gid_j) so that everything downstream runs
in a reproducible order.
"""

from __future__ import division, print_function, absolute_import
from builtins import object
import itertools
import logging

import numpy as np

from pymsdem.demhelpers import NeighborConfigError, loglevel

logging.basicConfig(level=loglevel())
LOGGER = logging.getLogger('pymsdem.neighbor')

DEFAULT_CELL_FACTOR = 2.0
DEFAULT_INTERVAL = 20
SKIN_MIN_FRACTION = 0.05
STENCIL = np.array(list(itertools.product((-1, 0, 1), repeat=3)),
                   dtype=np.int64)


class GlobalSpheres(object):
    """
    Snapshot of all primary spheres in the world frame.

    Arguments:
        centers: (n, 3) world centres, indexed by gid
        radii: (n,) radii
        owner: (n,) particle index of each sphere
        local: (n,) index of the sphere within its particle (optional)
    """
    def __init__(self, centers, radii, owner, local=None):
        self.centers = np.asarray(centers, dtype=float).reshape(-1, 3)
        self.radii = np.asarray(radii, dtype=float)
        self.owner = np.asarray(owner, dtype=np.int64)
        self.local = (np.zeros(len(self.radii), dtype=np.int64)
                      if local is None else np.asarray(local, dtype=np.int64))

    @classmethod
    def from_system(cls, system):
        return cls(system.sphere_centers(), system.sphere_radius,
                   system.sphere_owner, system.sphere_local)

    @property
    def gids(self):
        return np.arange(len(self.radii), dtype=np.int64)

    def __len__(self):
        return len(self.radii)

    @property
    def max_diameter(self):
        return 2.0 * float(self.radii.max()) if len(self.radii) else 0.0


class CellGrid(object):
    """
    Uniform cell list. Spheres are sorted by linear cell key; the members
    of a cell are a contiguous slice of the sorted order.

    Attributes:
        d_cell: cell edge length, m
        origin: world coordinates of the corner of cell (0, 0, 0)
        coords: (n, 3) integer cell coordinates of every sphere
        keys: (n,) linear cell key of every sphere
        order: gids sorted by key
        ops: number of elementary assignment operations used to build
    """
    def __init__(self, d_cell, origin, coords):
        self.d_cell = float(d_cell)
        self.origin = np.asarray(origin, dtype=float)
        self.coords = np.asarray(coords, dtype=np.int64).reshape(-1, 3)
        # padded dimensions so that stencil offsets never wrap
        self.dims = (self.coords.max(axis=0) + 3 if len(self.coords)
                     else np.ones(3, dtype=np.int64))
        self.keys = self.linear_key(self.coords)
        self.order = np.argsort(self.keys, kind='stable')
        self.sorted_keys = self.keys[self.order]
        self.ops = len(self.coords)

    def linear_key(self, coords):
        shifted = np.asarray(coords, dtype=np.int64) + 1
        return shifted[..., 0] + self.dims[0] * (
            shifted[..., 1] + self.dims[1] * shifted[..., 2])

    def members(self, cell):
        """gids in the cell with integer coordinates cell"""
        key = self.linear_key(np.asarray(cell))
        lo = np.searchsorted(self.sorted_keys, key, side='left')
        hi = np.searchsorted(self.sorted_keys, key, side='right')
        return np.sort(self.order[lo:hi])

    @property
    def occupied(self):
        """Dictionary of occupied cell coordinates to gid arrays"""
        out = {}
        for key in np.unique(self.sorted_keys):
            lo = np.searchsorted(self.sorted_keys, key, side='left')
            hi = np.searchsorted(self.sorted_keys, key, side='right')
            gids = np.sort(self.order[lo:hi])
            out[tuple(self.coords[gids[0]])] = gids
        return out

    def __len__(self):
        return len(self.coords)


class WallCandidates(object):
    """Sphere-wall candidate triples (gid, wall id, triangle index); the
    triangle index is -1 for implicit walls"""
    def __init__(self, gid=None, wall=None, tri=None):
        self.gid = np.zeros(0, np.int64) if gid is None else np.asarray(
            gid, dtype=np.int64)
        self.wall = np.zeros(0, np.int64) if wall is None else np.asarray(
            wall, dtype=np.int64)
        self.tri = np.zeros(0, np.int64) if tri is None else np.asarray(
            tri, dtype=np.int64)

    def __len__(self):
        return len(self.gid)

    def as_tuples(self):
        return list(zip(self.gid.tolist(), self.wall.tolist(),
                        self.tri.tolist()))


class NeighborList(object):
    """
    Verlet pair list over primary spheres.

    Attributes:
        pairs: (p, 2) gid pairs, i < j, sorted, never within one particle
        walls: WallCandidates
        d_skin: skin distance the list was built with, m
        r_cut: cut-off distance, m
        reference: (n, 3) sphere centres at build time
    """
    def __init__(self, pairs, d_skin, r_cut, reference, walls=None, ops=0):
        self.pairs = np.asarray(pairs, dtype=np.int64).reshape(-1, 2)
        self.d_skin = float(d_skin)
        self.r_cut = float(r_cut)
        self.reference = np.array(reference, dtype=float).reshape(-1, 3)
        self.walls = walls if walls is not None else WallCandidates()
        self.ops = ops

    def __len__(self):
        return len(self.pairs)


def build_cell_list(spheres, k=DEFAULT_CELL_FACTOR):
    """Assigns every sphere to the cell containing its centre.

    Cell size d_cell = k * D_max, with D_max the largest sphere diameter."""
    if not 1.0 <= k <= 3.0:
        raise NeighborConfigError(
            "Cell factor k must be in [1, 3], got %r" % k)
    if len(spheres) == 0:
        return CellGrid(1.0, np.zeros(3), np.zeros((0, 3), dtype=np.int64))
    d_cell = k * spheres.max_diameter
    origin = spheres.centers.min(axis=0)
    coords = np.floor((spheres.centers - origin) / d_cell).astype(np.int64)
    return CellGrid(d_cell, origin, coords)


def _expand_ranges(starts, counts):
    """Flattened indices of the ranges [start, start + count)"""
    total = int(counts.sum())
    if total == 0:
        return np.zeros(0, dtype=np.int64)
    offsets = np.repeat(np.cumsum(counts) - counts, counts)
    return np.repeat(starts, counts) + np.arange(total) - offsets


def build_verlet(grid, spheres, d_skin, r_cut=0.0):
    """
    Builds the pair list: (i, j), i < j, of spheres of different particles
    with |c_i - c_j| <= r_i + r_j + r_cut + d_skin, searching only the
    27-cell stencil of each sphere.
    """
    if d_skin < 0:
        raise NeighborConfigError(
            "Skin distance must be >= 0, got %r" % d_skin)
    nsph = len(spheres)
    if nsph == 0:
        return NeighborList(np.zeros((0, 2)), d_skin, r_cut,
                            np.zeros((0, 3)))
    reach = spheres.max_diameter + r_cut + d_skin
    if grid.d_cell < reach * (1.0 - 1e-12):
        raise NeighborConfigError(
            "Cell size %g cannot cover the search radius %g "
            "(D_max + r_cut + d_skin); raise the cell factor or lower the "
            "skin" % (grid.d_cell, reach))
    centers = spheres.centers
    radii = spheres.radii
    owner = spheres.owner
    found_i = []
    found_j = []
    ops = 0
    for offset in STENCIL:
        keys = grid.linear_key(grid.coords + offset)
        lo = np.searchsorted(grid.sorted_keys, keys, side='left')
        hi = np.searchsorted(grid.sorted_keys, keys, side='right')
        counts = hi - lo
        cand_i = np.repeat(np.arange(nsph, dtype=np.int64), counts)
        cand_j = grid.order[_expand_ranges(lo, counts)]
        ops += len(cand_i)
        keep = (cand_i < cand_j) & (owner[cand_i] != owner[cand_j])
        cand_i = cand_i[keep]
        cand_j = cand_j[keep]
        dist = np.linalg.norm(centers[cand_i] - centers[cand_j], axis=1)
        near = dist <= radii[cand_i] + radii[cand_j] + r_cut + d_skin
        found_i.append(cand_i[near])
        found_j.append(cand_j[near])
    pairs = np.column_stack(
        [np.concatenate(found_i), np.concatenate(found_j)])
    order = np.lexsort((pairs[:, 1], pairs[:, 0]))
    return NeighborList(pairs[order], d_skin, r_cut, centers, ops=ops)


def needs_rebuild(current, reference, d_skin):
    """True iff some sphere moved at least d_skin/2 since the list build"""
    current = np.asarray(current, dtype=float).reshape(-1, 3)
    reference = np.asarray(reference, dtype=float).reshape(-1, 3)
    if current.shape != reference.shape:
        raise NeighborConfigError(
            "Position lists differ in length: %d vs %d"
            % (len(current), len(reference)))
    if len(current) == 0:
        return False
    disp = np.sqrt(np.max(np.sum((current - reference) ** 2, axis=1)))
    return bool(disp >= 0.5 * d_skin)


def wall_candidates(spheres, walls, d_skin):
    """
    Sphere-wall candidates: implicit walls by signed distance within
    r + d_skin, mesh walls by the inflated sphere against each triangle's
    bounding sphere. Inactive walls are skipped.
    """
    gids = spheres.gids
    out_gid = []
    out_wall = []
    out_tri = []
    for wall in walls:
        if not wall.active or len(gids) == 0:
            continue
        reach = spheres.radii + d_skin
        if wall.kind == 'plane':
            gap = np.abs(wall.signed_distance(spheres.centers))
            hit = gids[gap <= reach]
            tris = np.full(len(hit), -1, dtype=np.int64)
        elif wall.kind == 'cylinder':
            _, rho = wall.radial(spheres.centers)
            gap = wall.radius - rho if wall.inside else rho - wall.radius
            hit = gids[gap <= reach]
            tris = np.full(len(hit), -1, dtype=np.int64)
        elif wall.kind == 'mesh':
            cands = wall.triangle_candidates(spheres.centers, reach)
            counts = np.array([len(c) for c in cands], dtype=np.int64)
            hit = np.repeat(gids, counts)
            tris = (np.concatenate(cands).astype(np.int64) if counts.sum()
                    else np.zeros(0, dtype=np.int64))
        else:
            raise NeighborConfigError("Unknown wall kind %r" % wall.kind)
        out_gid.append(hit)
        out_wall.append(np.full(len(hit), wall.id, dtype=np.int64))
        out_tri.append(tris)
    if not out_gid:
        return WallCandidates()
    gid = np.concatenate(out_gid)
    wal = np.concatenate(out_wall)
    tri = np.concatenate(out_tri)
    order = np.lexsort((tri, wal, gid))
    return WallCandidates(gid[order], wal[order], tri[order])


class NeighborManager(object):
    """
    Keeps the Verlet list of a running simulation valid.

    The skin follows d_skin = n * V_max * dt, clipped to
    [skin_min, (k - 1) D_max - r_cut]; the list is rebuilt after n steps,
    when the sphere count changes, or when the half-skin displacement guard
    fires. Wall candidates are refreshed every step while a wall rotates.

    Arguments:
        k: cell factor in [1, 3]
        interval: target rebuild interval n, steps
        r_cut: long-range cut-off, m
        skin_min: lower bound of the skin (default 5% of the smallest
            sphere diameter)
    """
    def __init__(self, k=DEFAULT_CELL_FACTOR, interval=DEFAULT_INTERVAL,
                 r_cut=0.0, skin_min=None):
        if not 1.0 <= k <= 3.0:
            raise NeighborConfigError(
                "Cell factor k must be in [1, 3], got %r" % k)
        if int(interval) < 1:
            raise NeighborConfigError("Rebuild interval must be >= 1")
        self.k = float(k)
        self.interval = int(interval)
        self.r_cut = float(r_cut)
        self.skin_min = skin_min
        self.nlist = None
        self.built_step = None
        self.rebuilds = 0
        self.last_cause = None

    def skin(self, spheres, system, dt):
        dmax = spheres.max_diameter
        upper = (self.k - 1.0) * dmax - self.r_cut
        if upper < 0:
            raise NeighborConfigError(
                "Cell factor %g leaves no room for r_cut=%g" %
                (self.k, self.r_cut))
        skin_min = self.skin_min
        if skin_min is None:
            skin_min = SKIN_MIN_FRACTION * 2.0 * float(spheres.radii.min())
        vmax = 0.0
        if system.count:
            speed = np.linalg.norm(system.vel, axis=1) + \
                np.linalg.norm(system.omega, axis=1) * system.mbs_radii()
            vmax = float(speed.max())
        return min(max(self.interval * vmax * dt, skin_min), upper)

    def update(self, system, walls, dt, step):
        """Returns the current NeighborList, rebuilding it if needed"""
        spheres = GlobalSpheres.from_system(system)
        cause = None
        if self.nlist is None:
            cause = 'initial'
        elif len(spheres) != len(self.nlist.reference):
            cause = 'count'
        elif step - self.built_step >= self.interval:
            cause = 'interval'
        elif needs_rebuild(spheres.centers, self.nlist.reference,
                           self.nlist.d_skin):
            cause = 'displacement'
        if cause is None:
            if any(wall.rotating and wall.active for wall in walls):
                self.nlist.walls = wall_candidates(
                    spheres, walls, self.nlist.d_skin)
            return self.nlist
        if len(spheres) == 0:
            self.nlist = NeighborList(np.zeros((0, 2)), 0.0, self.r_cut,
                                      np.zeros((0, 3)))
        else:
            d_skin = self.skin(spheres, system, dt)
            grid = build_cell_list(spheres, self.k)
            self.nlist = build_verlet(grid, spheres, d_skin, self.r_cut)
            self.nlist.walls = wall_candidates(spheres, walls, d_skin)
        self.built_step = step
        self.rebuilds += 1
        self.last_cause = cause
        LOGGER.info(
            "step %d: neighbor rebuild (%s): %d pairs, %d wall candidates, "
            "skin %.6g" % (step, cause, len(self.nlist),
                           len(self.nlist.walls), self.nlist.d_skin))
        return self.nlist
