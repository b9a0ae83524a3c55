# coding: utf-8
"""
pymsdem.output

Snapshots of the particle state and the files they are written to:

    snapshots/snapshot_<step>.csv   one file per output step
    trajectory.csv                  all snapshots, appended as the run goes
    trajectory.h5                   optional HDF5 archive (needs h5py)

CSV files have a header row and the fixed column order of COLUMNS. Floats
are written with 17 significant digits so that they read back exactly.
"""

from __future__ import division, print_function, absolute_import
from builtins import object, range
import os
import csv
import logging

import numpy as np

from pymsdem.demhelpers import OutputError, loglevel
from pymsdem.meshes import SurfaceMesh, CellMesh, sync_mesh, write_obj, \
    write_vtk
from pymsdem.world import Pose

logging.basicConfig(level=loglevel())
LOGGER = logging.getLogger('pymsdem.output')

try:
    import h5py
except ImportError:
    h5py = None
    LOGGER.warning(
        "The h5py library couldn't be imported, "
        "so HDF5 trajectory archives aren't supported")

COLUMNS = ('id', 't', 'x', 'y', 'z', 'qw', 'qx', 'qy', 'qz',
           'vx', 'vy', 'vz', 'wx', 'wy', 'wz', 'template', 'tag')
FLOATFMT = '%.17g'
SNAPSHOTDIR = 'snapshots'
SNAPSHOTPATTERN = 'snapshot_%010d.csv'
TRAJECTORY = 'trajectory.csv'
ARCHIVE = 'trajectory.h5'
MESHKINDS = ('surface', 'cells')


class Snapshot(object):
    """
    Immutable copy of the particle state at one step.

    Arguments:
        step (int): step number
        time (float): simulated time, s
        ids: particle ids (n,)
        pos, quat, vel, omega: state arrays (n, 3), (n, 4), (n, 3), (n, 3)
        templates: template name per particle
        tags: tag per particle
    """
    def __init__(self, step, time, ids, pos, quat, vel, omega, templates,
                 tags):
        self.step = int(step)
        self.time = time
        self.ids = np.array(ids, dtype=np.int64)
        self.pos = np.array(pos, dtype=float).reshape(-1, 3)
        self.quat = np.array(quat, dtype=float).reshape(-1, 4)
        self.vel = np.array(vel, dtype=float).reshape(-1, 3)
        self.omega = np.array(omega, dtype=float).reshape(-1, 3)
        self.templates = list(templates)
        self.tags = list(tags)
        for arr in (self.ids, self.pos, self.quat, self.vel, self.omega):
            arr.flags.writeable = False

    @classmethod
    def from_system(cls, system, step, time):
        names = [system.templates[c].name for c in system.cls]
        return cls(step, time, system.ids, system.pos, system.quat,
                   system.vel, system.omega, names, system.tags)

    def __len__(self):
        return len(self.ids)

    def rows(self):
        """Snapshot records as lists of strings in COLUMNS order"""
        for idx in range(len(self)):
            floats = np.concatenate([
                [self.time], self.pos[idx], self.quat[idx], self.vel[idx],
                self.omega[idx]])
            yield ([str(self.ids[idx])] +
                   [FLOATFMT % val for val in floats] +
                   [self.templates[idx], self.tags[idx]])


def _checkheader(header, filepath):
    if tuple(header) != COLUMNS:
        raise OutputError("%s: unexpected columns %s" % (filepath, header))


def _records_to_snapshot(records, step, filepath):
    if not records:
        return Snapshot(step, None, [], [], [], [], [], [], [])
    try:
        ids = [int(rec[0]) for rec in records]
        floats = np.array([[float(val) for val in rec[1:15]]
                           for rec in records])
    except (ValueError, IndexError) as err:
        raise OutputError("%s: malformed record (%s)" % (filepath, err))
    return Snapshot(step, float(floats[0, 0]), ids, floats[:, 1:4],
                    floats[:, 4:8], floats[:, 8:11], floats[:, 11:14],
                    [rec[15] for rec in records],
                    [rec[16] for rec in records])


def snapshot_path(outdir, step):
    return os.path.join(outdir, SNAPSHOTDIR, SNAPSHOTPATTERN % step)


def step_from_path(filepath):
    """Step number encoded in a snapshot file name, or 0"""
    base = os.path.splitext(os.path.basename(filepath))[0]
    try:
        return int(base.rsplit('_', 1)[-1])
    except ValueError:
        return 0


def write_snapshot(snapshot, filepath):
    with open(filepath, 'w') as target:
        writer = csv.writer(target, lineterminator='\n')
        writer.writerow(COLUMNS)
        writer.writerows(snapshot.rows())


def read_snapshot(filepath):
    """Reads a snapshot CSV file. Empty snapshots have time None."""
    if not os.path.isfile(filepath):
        raise OutputError("No snapshot file %s" % filepath)
    with open(filepath, 'r') as source:
        reader = csv.reader(source)
        try:
            header = next(reader)
        except StopIteration:
            raise OutputError("%s is empty" % filepath)
        _checkheader(header, filepath)
        records = [rec for rec in reader if rec]
    for rec in records:
        if len(rec) != len(COLUMNS):
            raise OutputError("%s: record with %d fields" %
                              (filepath, len(rec)))
    return _records_to_snapshot(records, step_from_path(filepath), filepath)


def read_trajectory(filepath):
    """Reads trajectory.csv back into a list of snapshots, one per distinct
    time. Trajectories of runs without particles read as []."""
    snapshots = []
    with open(filepath, 'r') as source:
        reader = csv.reader(source)
        try:
            _checkheader(next(reader), filepath)
        except StopIteration:
            return snapshots
        current = []
        for rec in reader:
            if not rec:
                continue
            if current and rec[1] != current[0][1]:
                snapshots.append(_records_to_snapshot(
                    current, len(snapshots), filepath))
                current = []
            current.append(rec)
        if current:
            snapshots.append(_records_to_snapshot(current, len(snapshots),
                                                  filepath))
    return snapshots


class TrajectoryWriter(object):
    """Append-only CSV of all snapshots; flushed after every snapshot so
    the file can be read while the run goes on"""
    def __init__(self, filepath):
        self.filepath = filepath
        fresh = not os.path.exists(filepath) or \
            os.path.getsize(filepath) == 0
        self._handle = open(filepath, 'a')
        self._writer = csv.writer(self._handle, lineterminator='\n')
        if fresh:
            self._writer.writerow(COLUMNS)
            self._handle.flush()

    def write(self, snapshot):
        self._writer.writerows(snapshot.rows())
        self._handle.flush()

    def close(self):
        if not self._handle.closed:
            self._handle.close()


class HDF5Archive(object):
    """
    HDF5 archive of snapshots: one group per step named step_<step> with
    datasets ids, pos, quat, vel, omega and attributes time, templates,
    tags.
    """
    def __init__(self, filepath):
        if h5py is None:
            raise OutputError(
                "HDF5 output requested but h5py is not installed")
        self.filepath = filepath
        self.dataobj = h5py.File(filepath, 'a')

    def write(self, snapshot):
        name = 'step_%010d' % snapshot.step
        if name in self.dataobj:
            del self.dataobj[name]
        grp = self.dataobj.create_group(name)
        for key in ('ids', 'pos', 'quat', 'vel', 'omega'):
            grp.create_dataset(key, data=getattr(snapshot, key))
        grp.attrs['time'] = np.nan if snapshot.time is None else \
            snapshot.time
        grp.attrs['templates'] = ','.join(snapshot.templates)
        grp.attrs['tags'] = ','.join(snapshot.tags)
        self.dataobj.flush()

    def close(self):
        self.dataobj.close()


class OutputManager(object):
    """
    Writes snapshots of a run according to the OUTPUT settings.

    Arguments:
        outdir: output directory (created if missing)
        every (int): snapshot interval in steps
        snapshots (bool): write snapshot_<step>.csv files
        trajectory (bool): append to trajectory.csv
        hdf5 (bool): append to trajectory.h5
    """
    def __init__(self, outdir, every=10000, snapshots=True, trajectory=True,
                 hdf5=False):
        self.outdir = outdir
        self.every = int(every)
        self.snapshots = snapshots
        if not os.path.isdir(outdir):
            os.makedirs(outdir)
        if snapshots and not os.path.isdir(os.path.join(outdir, SNAPSHOTDIR)):
            os.makedirs(os.path.join(outdir, SNAPSHOTDIR))
        self.trajectory = TrajectoryWriter(
            os.path.join(outdir, TRAJECTORY)) if trajectory else None
        self.archive = HDF5Archive(
            os.path.join(outdir, ARCHIVE)) if hdf5 else None
        self.last_step = None

    def due(self, step):
        return step % self.every == 0

    def write(self, system, step, time):
        if step == self.last_step:
            return None
        snapshot = Snapshot.from_system(system, step, time)
        if self.snapshots:
            write_snapshot(snapshot, snapshot_path(self.outdir, step))
        if self.trajectory is not None:
            self.trajectory.write(snapshot)
        if self.archive is not None:
            self.archive.write(snapshot)
        self.last_step = step
        LOGGER.debug("step %d: snapshot of %d particles"
                     % (step, len(snapshot)))
        return snapshot

    def close(self):
        if self.trajectory is not None:
            self.trajectory.close()
        if self.archive is not None:
            self.archive.close()


# ==================================================================
# = mesh export
# ==================================================================
def export_meshes(snapshot, templates, which, outdir, combined=False):
    """
    Writes the world-frame surface (OBJ) or cell (VTK) mesh of every
    particle of a snapshot.

    Arguments:
        snapshot: Snapshot
        templates: dict of ShapeTemplate by name
        which: 'surface' or 'cells'
        outdir: target directory
        combined (bool): write one file holding all particles instead of
            one file per particle
    Returns:
        list of written file paths. Particles whose template lacks the
        mesh are skipped with a warning.
    """
    if which not in MESHKINDS:
        raise OutputError("Mesh kind must be one of %s, got %r"
                          % (", ".join(MESHKINDS), which))
    if not os.path.isdir(outdir):
        os.makedirs(outdir)
    ext = 'obj' if which == 'surface' else 'vtk'
    written = []
    parts = []
    for idx in range(len(snapshot)):
        name = snapshot.templates[idx]
        tmpl = templates.get(name)
        mesh = getattr(tmpl, which, None) if tmpl is not None else None
        if mesh is None:
            LOGGER.warning("Particle %d: template %s has no %s mesh, skipped"
                           % (snapshot.ids[idx], name, which))
            continue
        world_mesh = sync_mesh(mesh, Pose(snapshot.pos[idx],
                                          snapshot.quat[idx]))
        if combined:
            parts.append(world_mesh)
            continue
        path = os.path.join(outdir, '%s_%010d_%06d.%s'
                            % (which, snapshot.step, snapshot.ids[idx], ext))
        _write_mesh(world_mesh, path, "particle %d" % snapshot.ids[idx])
        written.append(path)
    if combined and parts:
        path = os.path.join(outdir, '%s_%010d.%s'
                            % (which, snapshot.step, ext))
        _write_mesh(merge_meshes(parts), path,
                    "%d particles" % len(parts))
        written.append(path)
    LOGGER.info("Exported %d %s mesh files" % (len(written), which))
    return written


def merge_meshes(meshes):
    """Concatenates meshes of one type into a single mesh"""
    offset = 0
    coords = []
    elems = []
    surface = isinstance(meshes[0], SurfaceMesh)
    for mesh in meshes:
        pts = mesh.vertices if surface else mesh.points
        conn = mesh.triangles if surface else mesh.tets
        coords.append(pts)
        elems.append(conn + offset)
        offset += len(pts)
    if surface:
        return SurfaceMesh(np.vstack(coords), np.vstack(elems))
    return CellMesh(np.vstack(coords), np.vstack(elems))


def _write_mesh(mesh, path, label):
    if isinstance(mesh, SurfaceMesh):
        write_obj(mesh, path, comment=label)
    else:
        write_vtk(mesh, path)
