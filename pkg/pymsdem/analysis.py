# coding: utf-8
"""
pymsdem.analysis

Measurements on settled particle beds: free-surface profiles seen from the
side, mean fill height, packing porosity and angle of repose, plus kinetic
energy based settlement detection and a tag-mixing contact count.

Side views are taken by geometric binning of primary spheres. The lateral
extent is cut into N equal segments, giving N + 1 stations; station k at
x_k = lo + k w has the window [x_k - w/2, x_k + w/2], and every sphere whose
projected interval [c - r, c + r] overlaps the window raises the station
height to at least c_z + r - floor.
"""

from __future__ import division, print_function, absolute_import
from builtins import object, range
import logging

import numpy as np

from pymsdem import quatutils
from pymsdem.demhelpers import AnalysisError, loglevel

logging.basicConfig(level=loglevel())
LOGGER = logging.getLogger('pymsdem.analysis')

MIN_SEGMENTS = 100
DEFAULT_SEGMENTS = 100
SETTLE_THRESHOLD = 1e-8
SETTLE_CHECKS = 3
SLOPE_BAND = (0.1, 0.9)
AXES = {'x': 0, 'y': 1}


def _axis_index(axis):
    if axis in AXES:
        return AXES[axis]
    if axis in (0, 1):
        return int(axis)
    raise AnalysisError("Station axis must be 'x' or 'y', got %r" % (axis,))


class SurfaceProfile(object):
    """
    Free-surface heights of a bed seen from one side.

    Arguments:
        axis: horizontal axis along which the stations run ('x' or 'y')
        stations: station abscissas, m (N + 1 values)
        heights: surface height above the floor per station, m
        occupied: True where some sphere reached the station window
    """
    def __init__(self, axis, stations, heights, occupied=None):
        self.axis = axis
        self.stations = np.asarray(stations, dtype=float)
        self.heights = np.asarray(heights, dtype=float)
        if occupied is None:
            occupied = np.ones(len(self.stations), dtype=bool)
        self.occupied = np.asarray(occupied, dtype=bool)
        if self.stations.shape != self.heights.shape:
            raise AnalysisError("Stations and heights differ in length")

    @property
    def nsegments(self):
        return len(self.stations) - 1

    @property
    def mean(self):
        return float(np.mean(self.heights))

    @property
    def sd(self):
        return float(np.std(self.heights))

    def simpleplot(self):
        """Quick plot of the profile. Requires Matplotlib."""
        import matplotlib.pyplot as plt
        plt.figure(figsize=(10, 4))
        plt.plot(self.stations, self.heights, 'k-')
        plt.plot(self.stations[self.occupied], self.heights[self.occupied],
                 'r.')
        plt.xlabel('%s (m)' % self.axis)
        plt.ylabel('height (m)')
        return True


class CylinderContainer(object):
    """Upright cylindrical container: axis along z through (x, y) center,
    floor at height floor"""
    def __init__(self, center, radius, floor=0.0):
        self.center = np.asarray(center, dtype=float)[:2]
        self.radius = float(radius)
        self.floor = float(floor)
        if not self.radius > 0:
            raise AnalysisError("Container radius must be positive")

    @property
    def base_area(self):
        return np.pi * self.radius ** 2

    def extent(self, axis):
        idx = _axis_index(axis)
        return (self.center[idx] - self.radius, self.center[idx] + self.radius)


class BoxContainer(object):
    """Box container with base [lo, hi] in x and y, floor at lo z"""
    def __init__(self, lo, hi):
        self.lo = np.asarray(lo, dtype=float)
        self.hi = np.asarray(hi, dtype=float)
        if np.any(self.hi[:2] <= self.lo[:2]):
            raise AnalysisError("Box container needs hi > lo in x and y")
        self.floor = float(self.lo[2])

    @property
    def base_area(self):
        return float((self.hi[0] - self.lo[0]) * (self.hi[1] - self.lo[1]))

    def extent(self, axis):
        idx = _axis_index(axis)
        return (self.lo[idx], self.hi[idx])


def sphere_tops(system):
    """World centres and radii of all primary spheres"""
    return system.sphere_centers(), system.sphere_radius


def free_surface(system, axis, extent, n=DEFAULT_SEGMENTS, floor=0.0,
                 depth=None):
    """
    Free-surface profile of the bed seen along the horizontal axis
    perpendicular to axis.

    Arguments:
        system: ParticleSystem
        axis: 'x' or 'y', the direction along which stations run
        extent: (lo, hi) of the stations
        n: number of segments (n + 1 stations), at least 100
        floor: height of the container floor
        depth: optional (lo, hi) range of the other horizontal coordinate;
            only spheres with their centre inside it are seen
    Returns:
        SurfaceProfile. Stations no sphere reaches are interpolated
        linearly from their neighbours.
    """
    if int(n) < MIN_SEGMENTS:
        raise AnalysisError(
            "Need at least %d segments, got %r" % (MIN_SEGMENTS, n))
    idx = _axis_index(axis)
    lo, hi = float(extent[0]), float(extent[1])
    if not hi > lo:
        raise AnalysisError("Empty station extent %r" % (extent,))
    centers, radii = sphere_tops(system)
    if depth is not None and len(centers):
        other = centers[:, 1 - idx]
        sel = (other >= depth[0]) & (other <= depth[1])
        centers, radii = centers[sel], radii[sel]
    width = (hi - lo) / int(n)
    stations = lo + width * np.arange(int(n) + 1)
    heights = np.full(len(stations), -np.inf)
    if len(centers):
        pos = centers[:, idx]
        top = centers[:, 2] + radii - floor
        first = np.ceil((pos - radii - lo) / width - 0.5).astype(np.int64)
        last = np.floor((pos + radii - lo) / width + 0.5).astype(np.int64)
        first = np.clip(first, 0, int(n))
        last = np.clip(last, -1, int(n))
        for k in range(len(pos)):
            if last[k] >= first[k]:
                seg = slice(first[k], last[k] + 1)
                heights[seg] = np.maximum(heights[seg], top[k])
    occupied = np.isfinite(heights)
    if not np.any(occupied):
        raise AnalysisError("No particles in the viewed extent")
    if not np.all(occupied):
        heights[~occupied] = np.interp(
            stations[~occupied], stations[occupied], heights[occupied])
    return SurfaceProfile(axis, stations, heights, occupied)


def fill_height(system, container, n=DEFAULT_SEGMENTS):
    """Mean and standard deviation of the station heights pooled over two
    perpendicular side views (stations along x and along y)"""
    views = [free_surface(system, axis, container.extent(axis), n,
                          floor=container.floor) for axis in ('x', 'y')]
    heights = np.concatenate([view.heights for view in views])
    LOGGER.info("Fill height: views %s"
                % ", ".join("%.6g" % view.mean for view in views))
    return float(np.mean(heights)), float(np.std(heights))


def porosity(system, height, base_area):
    """1 - sum(V_i) / (A h) with analytic particle volumes"""
    if not height > 0 or not base_area > 0:
        raise AnalysisError(
            "Fill height and base area must be positive, got %r, %r"
            % (height, base_area))
    solid = float(np.sum(system.volumes())) if system.count else 0.0
    value = 1.0 - solid / (base_area * height)
    if value < 0.0 or value > 1.0:
        LOGGER.warning("Porosity %g outside [0, 1], clamped" % value)
        value = min(max(value, 0.0), 1.0)
    return value


def slope_angle(profile, band=SLOPE_BAND):
    """Angle (degrees) of the least-squares line through the stations whose
    height lies within band of the maximum; 0 when fewer than two
    stations qualify or the heights are all equal"""
    heights = profile.heights
    hmax = float(np.max(heights))
    if not hmax > 0:
        return 0.0
    sel = (heights >= band[0] * hmax) & (heights <= band[1] * hmax)
    if np.count_nonzero(sel) < 2:
        return 0.0
    if np.max(heights[sel]) == np.min(heights[sel]):
        return 0.0
    slope, _ = np.polyfit(profile.stations[sel], heights[sel], 1)
    return float(np.degrees(np.arctan(abs(slope))))


def angle_of_repose(system, axis, extent, depth_extent, n=DEFAULT_SEGMENTS,
                    floor=0.0):
    """
    Angle of repose of a heap, degrees: mean of the slope angles seen from
    the front (near half of the channel depth) and from the rear (far
    half).

    Arguments:
        axis: flow direction 'x' or 'y'
        extent: (lo, hi) of the channel along the flow direction
        depth_extent: (lo, hi) of the channel across the flow direction
    """
    mid = 0.5 * (depth_extent[0] + depth_extent[1])
    angles = []
    for depth in ((depth_extent[0], mid), (mid, depth_extent[1])):
        profile = free_surface(system, axis, extent, n, floor=floor,
                               depth=depth)
        angles.append(slope_angle(profile))
    LOGGER.info("Angle of repose: front %.4g, rear %.4g" % tuple(angles))
    return float(np.mean(angles))


# ==================================================================
# = motion state
# ==================================================================
def kinetic_energy(system):
    """Translational plus rotational kinetic energy per particle, J"""
    if system.count == 0:
        return np.zeros(0)
    trans = 0.5 * system.mass * np.sum(system.vel ** 2, axis=1)
    omega_b = quatutils.rotate_inverse(system.quat, system.omega)
    rot = 0.5 * np.sum(system.inertia * omega_b ** 2, axis=1)
    return trans + rot


def mean_speed(system):
    if system.count == 0:
        return 0.0
    return float(np.mean(np.linalg.norm(system.vel, axis=1)))


def is_settled(system, threshold=SETTLE_THRESHOLD):
    """True iff the mean kinetic energy per particle is below threshold"""
    if system.count == 0:
        return True
    return bool(np.mean(kinetic_energy(system)) < threshold)


class SettlementMonitor(object):
    """Reports settlement after `checks` consecutive settled checks"""
    def __init__(self, threshold=SETTLE_THRESHOLD, checks=SETTLE_CHECKS):
        self.threshold = float(threshold)
        self.checks = int(checks)
        self.streak = 0

    def update(self, system):
        if is_settled(system, self.threshold):
            self.streak += 1
        else:
            self.streak = 0
        return self.streak >= self.checks

    def reset(self):
        self.streak = 0


def interfacial_contacts(system, contacts, tags=('red', 'blue')):
    """Number of touching particle pairs with one particle of each tag"""
    if contacts is None or contacts.npp == 0:
        return 0
    tag_arr = np.array(system.tags, dtype=object)
    oi = system.sphere_owner[contacts.pp_i]
    oj = system.sphere_owner[contacts.pp_j]
    ti = tag_arr[oi]
    tj = tag_arr[oj]
    mixed = ((ti == tags[0]) & (tj == tags[1])) | \
        ((ti == tags[1]) & (tj == tags[0]))
    if not np.any(mixed):
        return 0
    pairs = np.unique(np.stack([np.minimum(oi, oj), np.maximum(oi, oj)],
                               axis=1)[mixed], axis=0)
    return len(pairs)
