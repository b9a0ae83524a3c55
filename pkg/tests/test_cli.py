#!/usr/bin/env python
# encoding: utf-8
"""
test_cli.py
"""

from __future__ import division, print_function, absolute_import
import os
import csv
import pytest
import numpy as np
from pymsdem import cli, meshes, output, presets, simulation
from pymsdem import scene as scenemod
from pymsdem.demhelpers import SceneConfigError

DATADIR = "tests/data"


def setup_module(module):
    global scenepath
    scenepath = os.path.join(DATADIR, "drop.cfg")


@pytest.fixture(scope='module')
def rundir(tmpdir_factory):
    outdir = str(tmpdir_factory.mktemp('clirun'))
    status = cli.main(['run', scenepath, '--out', outdir,
                       '--set', 'SCENE.STEPS=200'])
    assert status == 0
    return outdir


def read_report(path):
    with open(path) as source:
        rows = list(csv.reader(source))
    assert rows[0] == ['measure', 'value', 'sd']
    return dict((row[0], row[1:]) for row in rows[1:])


def test_usage_errors(capsys):
    assert cli.main([]) == 2
    with pytest.raises(SystemExit) as excinfo:
        cli.main(['simulate', scenepath])
    assert excinfo.value.code == 2
    with pytest.raises(SystemExit):
        cli.main(['export-mesh', 'snapshot.csv'])


def test_preset_list(capsys):
    assert cli.main(['preset', '--list']) == 0
    names = capsys.readouterr().out.split()
    assert names == presets.preset_names()


def test_preset_written(tmpdir):
    target = str(tmpdir.join('drum.cfg'))
    assert cli.main(['preset', 'drum', '--out', target]) == 0
    assert scenemod.load_scene(target) == presets.make_preset('drum')
    assert cli.main(['preset', 'drum-42']) == 1
    assert cli.main(['preset']) == 1


def test_estimate_dt(capsys):
    assert cli.main(['estimate-dt', scenepath]) == 0
    lines = capsys.readouterr().out.splitlines()
    assert [line.split()[0] for line in lines] == ['T_R', 'T_H', 'dt_c',
                                                   'dt']
    assert lines[3] == 'dt   1e-05 s'


def test_bad_scene_fails(tmpdir):
    target = tmpdir.join('bad.cfg')
    target.write(u"GROUP = SCENE\n  STEPS = -4\nEND_GROUP = SCENE\nEND\n")
    assert cli.main(['estimate-dt', str(target)]) == 1
    assert cli.main(['run', str(tmpdir.join('missing.cfg'))]) == 1
    assert cli.main(['run', scenepath, '--set', 'STEPS=3']) == 1


def test_run(rundir):
    stored = scenemod.load_scene(os.path.join(rundir, simulation.SCENEFILE))
    assert stored.scene['STEPS'] == 200
    assert os.path.isfile(output.snapshot_path(rundir, 200))
    assert not os.path.isfile(output.snapshot_path(rundir, 300))


def test_analyze(rundir):
    snapshot = output.snapshot_path(rundir, 200)
    report = os.path.join(rundir, 'report.csv')
    assert cli.main(['analyze', snapshot, '--report', report]) == 0
    results = read_report(report)
    assert sorted(results) == ['fill-height', 'porosity']
    height = float(results['fill-height'][0])
    assert 0.0 < height < 0.05
    assert 0.0 <= float(results['porosity'][0]) <= 1.0
    assert results['porosity'][1] == ''


def test_analyze_needs_scene(tmpdir):
    lonely = str(tmpdir.join('snapshot_0000000000.csv'))
    output.write_snapshot(output.Snapshot(0, 0.0, [], [], [], [], [], [], []),
                          lonely)
    assert cli.main(['analyze', lonely]) == 1


def test_export_mesh(rundir, tmpdir):
    snapshot = output.snapshot_path(rundir, 200)
    assert cli.main(['export-mesh', snapshot, '--kind', 'surface',
                     '--out', str(tmpdir.join('each'))]) == 0
    assert len(tmpdir.join('each').listdir()) == 21
    assert cli.main(['export-mesh', snapshot, '--kind', 'cells',
                     '--out', str(tmpdir.join('all')), '--combined']) == 0
    files = tmpdir.join('all').listdir()
    assert len(files) == 1
    cells = meshes.read_vtk(str(files[0]))
    assert len(cells.tets) == 21


def test_measure_bed():
    config = scenemod.load_scene(scenepath)
    system, _ = scenemod.build_classes(config, DATADIR)
    coords = 0.002 + 0.004 * np.arange(5)
    xx, yy = np.meshgrid(coords, coords)
    system.add_particles(0, np.column_stack([xx.ravel(), yy.ravel(),
                                             np.full(25, 0.002)]),
                         np.tile([1.0, 0.0, 0.0, 0.0], (25, 1)))
    results = cli.measure_bed(config, system, ['fill-height', 'porosity'])
    assert results[0][0] == 'fill-height'
    assert np.isclose(results[0][1], 0.004)
    volume = 25 * 4.0 / 3.0 * np.pi * 0.002 ** 3
    assert np.isclose(results[1][1], 1.0 - volume / (0.02 * 0.02 * 0.004))
    with pytest.raises(SceneConfigError):
        cli.measure_bed(config, system, ['aor'])
