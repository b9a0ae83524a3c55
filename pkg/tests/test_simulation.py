#!/usr/bin/env python
# encoding: utf-8
"""
test_simulation.py
"""

from __future__ import division, print_function, absolute_import
import os
import filecmp
from collections import OrderedDict
import pytest
import numpy as np
from pymsdem import simulation, presets, output
from pymsdem import scene as scenemod
from pymsdem.demhelpers import SimulationError

DATADIR = "tests/data"
BARRIER_SCENE = u"""
GROUP = SCENE
  STEPS = 1000
  SETTLE_INTERVAL = 50
  STOP_ON_SETTLE = True
END_GROUP = SCENE
GROUP = STEP
  DT = 1e-5
END_GROUP = STEP
GROUP = MATERIAL
  NAME = "glass"
  YOUNG = 1e6
  POISSON = 0.3
  DENSITY = 2500.0
END_GROUP = MATERIAL
GROUP = SHAPE
  NAME = "bead"
  KIND = "sphere"
  MATERIAL = "glass"
  RADIUS = 0.002
END_GROUP = SHAPE
GROUP = WALL
  NAME = "floor"
  KIND = "plane"
  MATERIAL = "glass"
  POINT = (0.0, 0.0, 0.0)
  NORMAL = (0.0, 0.0, 1.0)
END_GROUP = WALL
GROUP = WALL
  NAME = "gate"
  KIND = "plane"
  MATERIAL = "glass"
  POINT = (0.01, 0.0, 0.0)
  NORMAL = (-1.0, 0.0, 0.0)
  BARRIER = True
END_GROUP = WALL
GROUP = PARTICLE
  SHAPE = "bead"
  POSITION = (0.005, 0.0, 0.002)
END_GROUP = PARTICLE
END
"""


def setup_module(module):
    module.DATADIR = DATADIR


def impact_scene(partner, young=1e10, restitution=0.6, sphere=True,
                 n_div=None):
    """Head-on impact preset, optionally with a single-sphere bead of the
    ellipsoid's half thickness instead of the ellipsoid"""
    raw = presets.preset_raw('impact-' + partner)
    raw['MATERIAL'][0]['YOUNG'] = young
    raw['MATERIAL'][0]['RESTITUTION'] = restitution
    if sphere:
        raw['SHAPE'] = [OrderedDict([
            ('NAME', 'bead'), ('KIND', 'sphere'), ('MATERIAL', 'glass'),
            ('RADIUS', presets.IMPACT_B)])]
        for grp in raw['PARTICLE']:
            grp['SHAPE'] = 'bead'
    if n_div is not None:
        raw['STEP']['DT'] = None
        raw['STEP']['N_DIV'] = n_div
    return scenemod.SceneConfig(raw)


def rebound(config):
    sim = simulation.Simulation(config)
    sim.run()
    mover = sim.system.tags.index('mover')
    vel = sim.system.vel[mover]
    assert np.allclose(vel[:2], 0.0, atol=1e-9)
    return vel[2] / presets.IMPACT_SPEED


@pytest.fixture(scope='module')
def drop():
    return scenemod.load_scene(os.path.join(DATADIR, 'drop.cfg'))


@pytest.fixture(scope='module')
def droprun(drop, tmpdir_factory):
    outdir = str(tmpdir_factory.mktemp('drop'))
    status = simulation.run(drop, outdir, base_dir=DATADIR)
    assert status == 0
    return outdir


def test_elastic_rebound():
    # e = 1: no damping, the sphere leaves with its impact speed
    config = impact_scene('wall', restitution=1.0, n_div=50)
    assert np.isclose(rebound(config), 1.0, rtol=5e-3)


def test_sphere_wall_rebound_matches_restitution():
    assert np.isclose(rebound(impact_scene('wall')), 0.6, atol=0.02)


def test_sphere_pair_rebound_is_independent_of_young():
    soft = rebound(impact_scene('pp', young=1e9))
    stiff = rebound(impact_scene('pp', young=1e10))
    assert np.isclose(soft, stiff, rtol=0.01)
    # the fixed twin halves the effective mass and the damping with it
    assert np.isclose(stiff, 0.70, atol=0.03)


def test_ellipsoid_impacts():
    wall = rebound(impact_scene('wall', sphere=False))
    pair = rebound(impact_scene('pp', sphere=False))
    assert 0.55 < wall < 0.68
    assert wall < pair < 0.8


def test_empty_scene_needs_dt():
    config = scenemod.parse_scene(u"""GROUP = SCENE
  STEPS = 5
END_GROUP = SCENE
END
""")
    with pytest.raises(SimulationError):
        simulation.Simulation(config)
    config = scenemod.override(config, 'STEP', 'DT', 1e-5)
    sim = simulation.Simulation(config)
    assert sim.run() == 5
    assert np.isclose(sim.time, 5e-5)


def test_duration_sets_step_count(drop):
    config = scenemod.override(drop, 'SCENE', 'STEPS', None)
    config = scenemod.override(config, 'SCENE', 'DURATION', 1.05e-4)
    sim = simulation.Simulation(config, base_dir=DATADIR)
    assert sim.nsteps == 11


def test_estimate_dt(drop):
    t_r, t_h, dt_c, dt = simulation.estimate_dt(drop, DATADIR)
    assert t_h is not None
    assert dt_c == min(t_r, t_h)
    assert dt == 1e-5
    assert dt < dt_c / 10
    auto = scenemod.override(drop, 'STEP', 'DT', None)
    assert np.isclose(simulation.estimate_dt(auto, DATADIR)[3], dt_c / 20)


def test_blowup(drop):
    config = scenemod.override(drop, 'SCENE', 'VMAX', 0.1)
    sim = simulation.Simulation(config, base_dir=DATADIR)
    with pytest.raises(SimulationError) as excinfo:
        sim.run()
    assert 'step 1 ' in str(excinfo.value)


def test_settlement_releases_barrier():
    config = scenemod.parse_scene(BARRIER_SCENE)
    sim = simulation.Simulation(config)
    gate = sim.scene.walls[1]
    assert sim.scene.release_pending
    assert sim.run() == 300
    assert not gate.active
    assert not sim.scene.release_pending
    assert sim.stopped


def test_run_files(droprun):
    assert os.path.isfile(os.path.join(droprun, simulation.SCENEFILE))
    assert os.path.isfile(os.path.join(droprun, simulation.STEPLOG))
    for step in range(0, 401, 100):
        assert os.path.isfile(output.snapshot_path(droprun, step))
    trajectory = output.read_trajectory(
        os.path.join(droprun, output.TRAJECTORY))
    assert len(trajectory) == 5
    assert len(trajectory[0]) == 1
    assert len(trajectory[-1]) == 21


def test_run_log(droprun):
    with open(os.path.join(droprun, simulation.STEPLOG)) as source:
        text = source.read()
    assert 'Scene drop, seed 7' in text
    assert 'Run finished at step 400' in text
    # deterministic runs carry no time stamps
    assert text.startswith('pymsdem.')


def test_stored_scene_is_standalone(droprun, drop):
    stored = scenemod.load_scene(os.path.join(droprun, simulation.SCENEFILE))
    assert os.path.isabs(stored.shapes[0]['SURFACE'])
    assert stored.scene == drop.scene
    assert stored.streams == drop.streams


def test_falling_beads(droprun):
    first = output.read_snapshot(output.snapshot_path(droprun, 100))
    last = output.read_snapshot(output.snapshot_path(droprun, 400))
    assert np.array_equal(first.ids, last.ids[:len(first.ids)])
    probe = last.tags.index('probe')
    # free fall from rest: z = z0 - g t^2 / 2
    assert np.isclose(last.pos[probe, 2], 0.04 - 0.5 * 9.81 * 0.004 ** 2,
                      rtol=1e-6)
    assert np.all(last.pos[:, 2] > 0.0)


def test_deterministic_runs_are_identical(drop, droprun, tmpdir):
    again = str(tmpdir)
    simulation.run(drop, again, base_dir=DATADIR)
    names = [os.path.join(output.SNAPSHOTDIR, os.path.basename(
        output.snapshot_path(again, step))) for step in range(0, 401, 100)]
    names += [output.TRAJECTORY, simulation.STEPLOG, simulation.SCENEFILE]
    match, mismatch, errors = filecmp.cmpfiles(droprun, again, names,
                                               shallow=False)
    assert mismatch == [] and errors == []
    assert len(match) == len(names)


def test_seed_changes_insertion(drop, droprun, tmpdir):
    simulation.run(drop, str(tmpdir), seed=8, base_dir=DATADIR)
    base = output.read_snapshot(output.snapshot_path(droprun, 100))
    other = output.read_snapshot(output.snapshot_path(str(tmpdir), 100))
    assert len(base) == len(other)
    assert not np.allclose(base.pos, other.pos)


def test_load_state(drop, droprun):
    snapshot = output.read_snapshot(output.snapshot_path(droprun, 400))
    system = simulation.load_state(drop, snapshot, DATADIR)
    assert system.count == len(snapshot)
    assert np.array_equal(system.pos, snapshot.pos)
    assert np.array_equal(system.vel, snapshot.vel)
    assert system.tags == snapshot.tags
