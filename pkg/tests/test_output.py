#!/usr/bin/env python
# encoding: utf-8
"""
test_output.py
"""

from __future__ import division, print_function, absolute_import
import os
import pytest
import numpy as np
from pymsdem import output, meshes, world, shape, quatutils
from pymsdem.demhelpers import OutputError

DATADIR = "tests/data"


def setup_module(module):
    global objpath, vtkpath
    objpath = os.path.join(DATADIR, "tetra.obj")
    vtkpath = os.path.join(DATADIR, "tetra.vtk")


@pytest.fixture
def system():
    glass = world.Material('glass', 1e10, 0.3, density=2500.0)
    desc = shape.ShapeDescriptor('sphere', {'r': 0.001}, 1)
    tmpl = shape.ShapeTemplate('bead', desc, 2500.0,
                               surface=meshes.read_obj(objpath))
    system = world.ParticleSystem()
    system.add_class(tmpl, glass)
    quat = quatutils.from_axis_angle([[0.0, 0.0, 1.0]], 0.3)[0]
    system.add_particles(0, [[0.1, 0.2, 0.3], [1.0 / 3.0, 0.0, 2e-7]],
                         [quatutils.IDENTITY, quat],
                         velocities=[[0.5, 0.0, -1.0], [0.0, 0.0, 0.0]],
                         omegas=[[0.0, 0.0, 0.0], [1.0, 2.0, 3.0]],
                         tag='red')
    return system


def test_snapshot_roundtrip(system, tmpdir):
    snapshot = output.Snapshot.from_system(system, 1500, 0.015)
    path = output.snapshot_path(str(tmpdir), 1500)
    os.makedirs(os.path.dirname(path))
    output.write_snapshot(snapshot, path)
    back = output.read_snapshot(path)
    assert back.step == 1500
    assert back.time == 0.015
    assert np.array_equal(back.ids, system.ids)
    # 17 significant digits read back exactly
    assert np.array_equal(back.pos, system.pos)
    assert np.array_equal(back.quat, system.quat)
    assert np.array_equal(back.vel, system.vel)
    assert np.array_equal(back.omega, system.omega)
    assert back.templates == ['bead', 'bead']
    assert back.tags == ['red', 'red']


def test_snapshot_is_a_copy(system):
    snapshot = output.Snapshot.from_system(system, 0, 0.0)
    system.pos[0, 0] = 9.0
    assert snapshot.pos[0, 0] == 0.1
    with pytest.raises(ValueError):
        snapshot.pos[0, 0] = 1.0


def test_snapshot_header(system, tmpdir):
    path = str(tmpdir.join('snapshot_0000000000.csv'))
    output.write_snapshot(output.Snapshot.from_system(system, 0, 0.0), path)
    with open(path) as source:
        header = source.readline().strip()
    assert header == ','.join(output.COLUMNS)


def test_empty_snapshot(tmpdir):
    path = str(tmpdir.join('snapshot_0000000010.csv'))
    empty = output.Snapshot(10, 0.0, [], [], [], [], [], [], [])
    output.write_snapshot(empty, path)
    back = output.read_snapshot(path)
    assert len(back) == 0
    assert back.time is None
    assert back.step == 10


@pytest.mark.parametrize('content', [
    '',
    'id,t,x\n',
    ','.join(output.COLUMNS) + '\n1,0.0,0.0\n',
    ','.join(output.COLUMNS) + '\n' + ','.join(['x'] * 17) + '\n',
])
def test_read_snapshot_errors(tmpdir, content):
    path = tmpdir.join('snapshot_0000000000.csv')
    path.write(content)
    with pytest.raises(OutputError):
        output.read_snapshot(str(path))


def test_missing_snapshot(tmpdir):
    with pytest.raises(OutputError):
        output.read_snapshot(str(tmpdir.join('nothing.csv')))


def test_step_from_path():
    assert output.step_from_path(
        output.snapshot_path('run', 12345)) == 12345
    assert output.step_from_path('final.csv') == 0


def test_output_manager(system, tmpdir):
    outdir = str(tmpdir.join('run'))
    manager = output.OutputManager(outdir, every=100)
    assert manager.due(0) and manager.due(300)
    assert not manager.due(150)
    assert manager.write(system, 0, 0.0) is not None
    assert manager.write(system, 0, 0.0) is None
    system.pos[:, 2] += 0.01
    manager.write(system, 100, 1e-3)
    manager.close()
    assert os.path.isfile(output.snapshot_path(outdir, 0))
    assert os.path.isfile(output.snapshot_path(outdir, 100))
    trajectory = output.read_trajectory(
        os.path.join(outdir, output.TRAJECTORY))
    assert len(trajectory) == 2
    assert [snap.time for snap in trajectory] == [0.0, 1e-3]
    assert np.allclose(trajectory[1].pos[:, 2] - trajectory[0].pos[:, 2],
                       0.01)


def test_trajectory_appends(system, tmpdir):
    outdir = str(tmpdir)
    first = output.OutputManager(outdir, snapshots=False)
    first.write(system, 0, 0.0)
    first.close()
    second = output.OutputManager(outdir, snapshots=False)
    second.write(system, 10, 0.5)
    second.close()
    assert not os.path.isdir(os.path.join(outdir, output.SNAPSHOTDIR))
    path = os.path.join(outdir, output.TRAJECTORY)
    with open(path) as source:
        lines = source.read().splitlines()
    assert len(lines) == 1 + 2 * system.count
    assert len(output.read_trajectory(path)) == 2


def test_empty_trajectory(tmpdir):
    path = tmpdir.join(output.TRAJECTORY)
    path.write('')
    assert output.read_trajectory(str(path)) == []
    path.write(','.join(output.COLUMNS) + '\n')
    assert output.read_trajectory(str(path)) == []


def test_hdf5_archive(system, tmpdir):
    h5py = pytest.importorskip('h5py')
    manager = output.OutputManager(str(tmpdir), trajectory=False, hdf5=True)
    manager.write(system, 0, 0.0)
    manager.write(system, 100, 1e-3)
    manager.close()
    with h5py.File(str(tmpdir.join(output.ARCHIVE)), 'r') as archive:
        assert sorted(archive.keys()) == ['step_0000000000',
                                          'step_0000000100']
        grp = archive['step_0000000100']
        assert np.array_equal(grp['pos'][()], system.pos)
        assert grp.attrs['time'] == 1e-3
        assert grp.attrs['tags'] == 'red,red'


def test_export_meshes(system, tmpdir):
    snapshot = output.Snapshot.from_system(system, 200, 2e-3)
    templates = {'bead': system.templates[0]}
    written = output.export_meshes(snapshot, templates, 'surface',
                                   str(tmpdir))
    assert len(written) == 2
    assert all(path.endswith('.obj') for path in written)
    tetra = meshes.read_obj(objpath)
    moved = meshes.read_obj(written[0])
    assert np.allclose(moved.vertices, tetra.vertices + system.pos[0])
    turned = meshes.read_obj(written[1])
    expected = quatutils.rotate(system.quat[1], tetra.vertices) + \
        system.pos[1]
    assert np.allclose(turned.vertices, expected)


def test_export_combined(system, tmpdir):
    snapshot = output.Snapshot.from_system(system, 200, 2e-3)
    written = output.export_meshes(snapshot, {'bead': system.templates[0]},
                                   'surface', str(tmpdir), combined=True)
    assert len(written) == 1
    merged = meshes.read_obj(written[0])
    assert len(merged.vertices) == 8
    assert len(merged.triangles) == 8
    assert merged.triangles.max() == 7


def test_export_skips_missing_meshes(system, tmpdir):
    snapshot = output.Snapshot.from_system(system, 0, 0.0)
    templates = {'bead': system.templates[0]}
    assert output.export_meshes(snapshot, templates, 'cells',
                                str(tmpdir)) == []
    assert output.export_meshes(snapshot, {}, 'surface', str(tmpdir)) == []
    with pytest.raises(OutputError):
        output.export_meshes(snapshot, templates, 'volume', str(tmpdir))


def test_merge_cell_meshes():
    cells = meshes.read_vtk(vtkpath)
    merged = output.merge_meshes([cells, cells, cells])
    assert len(merged.points) == 3 * len(cells.points)
    assert np.array_equal(merged.tets[-1], cells.tets[-1] + 2 *
                          len(cells.points))
