#!/usr/bin/env python
# encoding: utf-8
"""
test_scene.py
"""

from __future__ import division, print_function, absolute_import
import os
import pytest
from collections import OrderedDict
import numpy as np
from pymsdem import odlutils, scene, world
from pymsdem.demhelpers import SceneConfigError

DATADIR = "tests/data"
MINIMAL = u"""
GROUP = SCENE
  STEPS = 10
END_GROUP = SCENE
GROUP = MATERIAL
  NAME = "glass"
  YOUNG = 1e10
  POISSON = 0.3
  DENSITY = 2500.0
END_GROUP = MATERIAL
GROUP = SHAPE
  NAME = "pill"
  KIND = "spherocylinder"
  MATERIAL = "glass"
  RADIUS = 0.001
  LENGTH = 0.002
END_GROUP = SHAPE
END
"""


def setup_module(module):
    module.DATADIR = DATADIR


def minimal_raw():
    return odlutils.parse(MINIMAL)


def with_group(name, **items):
    raw = minimal_raw()
    grp = raw.setdefault(name, OrderedDict())
    if isinstance(grp, list):
        grp = grp[0]
    grp.update(items)
    return raw


@pytest.fixture(scope='module')
def drop():
    return scene.load_scene(os.path.join(DATADIR, 'drop.cfg'))


def test_defaults():
    config = scene.parse_scene(MINIMAL)
    assert config.scene['NAME'] == 'scene'
    assert config.scene['STEPS'] == 10
    assert config.scene['DURATION'] is None
    assert config.scene['SETTLE_THRESHOLD'] == 1e-8
    assert config.step['N_DIV'] == 20
    assert config.step['GRAVITY'] == (0.0, 0.0, -9.81)
    assert config.step['CELL_FACTOR'] == 2.0
    assert config.output['EVERY'] == 10000
    assert config.analysis is None
    assert config.materials[0]['RESTITUTION'] == 0.6
    assert config.shapes[0]['NSPHERES'] == 17
    assert config.shapes[0]['CURVATURE'] == 'eq'
    assert config.walls == [] and config.streams == []


def test_values_are_converted():
    config = scene.SceneConfig(with_group('STEP', GRAVITY=(0, 0, -10),
                                          N_DIV=50))
    assert config.step['GRAVITY'] == (0.0, 0.0, -10.0)
    assert isinstance(config.step['GRAVITY'][2], float)
    config = scene.SceneConfig(with_group(
        'ANALYSIS', MEASURES='porosity', RADIUS=0.05))
    assert config.analysis['MEASURES'] == ('porosity',)


def test_drop_scene(drop):
    assert drop.scene['NAME'] == 'drop'
    assert drop.step['DT'] == 1e-5
    assert drop.step['DETERMINISTIC'] is True
    assert drop.analysis['CONTAINER'] == 'box'
    assert drop.streams[0]['BATCH'] == (10, 10)
    assert drop.particles[0]['ORIENTATION'] == (1.0, 0.0, 0.0, 0.0)
    assert drop.particles[0]['TAG'] == 'probe'


@pytest.mark.parametrize('group,items', [
    ('SCENE', {'STEPS': None}),
    ('SCENE', {'STEPS': -1}),
    ('SCENE', {'STEPS': 1.5}),
    ('SCENE', {'SEED': True}),
    ('SCENE', {'COLOR': 'red'}),
    ('SCENE', {'DURATION': 0.0}),
    ('STEP', {'N_DIV': 9}),
    ('STEP', {'N_DIV': 101}),
    ('STEP', {'CELL_FACTOR': 3.5}),
    ('STEP', {'GRAVITY': (0.0, -9.81)}),
    ('STEP', {'DT': -1e-6}),
    ('STEP', {'R_CUT': -0.001}),
    ('OUTPUT', {'EVERY': 0}),
    ('MATERIAL', {'POISSON': 0.5}),
    ('MATERIAL', {'RESTITUTION': 0.0}),
    ('MATERIAL', {'RESTITUTION': 1.2}),
    ('MATERIAL', {'MU_PP': -0.1}),
    ('MATERIAL', {'DENSITY': None}),
    ('SHAPE', {'KIND': 'cube'}),
    ('SHAPE', {'A': 0.003}),
    ('SHAPE', {'VOLUME': 1e-9}),
    ('SHAPE', {'LENGTH': None}),
    ('SHAPE', {'ASPECT': 2.0}),
    ('SHAPE', {'NSPHERES': 0}),
    ('SHAPE', {'CURVATURE': 'sharp'}),
    ('SHAPE', {'MATERIAL': 'steel'}),
    ('ANALYSIS', {'RADIUS': 0.05, 'N': 99}),
    ('ANALYSIS', {'RADIUS': 0.05, 'MEASURES': ('aor',)}),
    ('ANALYSIS', {'RADIUS': 0.05, 'MEASURES': ('volume',)}),
    ('ANALYSIS', {'RADIUS': 0.05, 'AXIS': 'z'}),
    ('ANALYSIS', {'CONTAINER': 'box', 'LO': (0, 0, 0)}),
    ('ANALYSIS', {}),
    ('COLOR', {'RED': 1}),
])
def test_invalid_scenes(group, items):
    with pytest.raises(SceneConfigError):
        scene.SceneConfig(with_group(group, **items))


@pytest.mark.parametrize('value', ['"1 mm"', '1 mm', '(1, "mm")'])
def test_values_carry_no_units(value):
    text = MINIMAL.replace("RADIUS = 0.001", "RADIUS = %s" % value)
    with pytest.raises(SceneConfigError):
        scene.parse_scene(text)


def test_single_group_given_twice():
    raw = minimal_raw()
    raw['SCENE'] = [raw['SCENE'], raw['SCENE']]
    with pytest.raises(SceneConfigError):
        scene.SceneConfig(raw)


def test_equal_volume_shape():
    raw = with_group('SHAPE', RADIUS=None, LENGTH=None, VOLUME=1e-9,
                     ASPECT=3.0)
    config = scene.SceneConfig(raw)
    tmpl = scene.make_template(config.shapes[0], 2500.0)
    assert np.isclose(tmpl.props.volume, 1e-9, rtol=0.05)


@pytest.mark.parametrize('text', [
    # wall with an undefined material
    u"""GROUP = WALL
  KIND = "plane"
  MATERIAL = "steel"
  POINT = (0, 0, 0)
  NORMAL = (0, 0, 1)
END_GROUP = WALL
""",
    # plane without a normal
    u"""GROUP = WALL
  KIND = "plane"
  MATERIAL = "glass"
  POINT = (0, 0, 0)
END_GROUP = WALL
""",
    # unknown spin mode
    u"""GROUP = WALL
  KIND = "cylinder"
  MATERIAL = "glass"
  RADIUS = 0.1
  P1 = (0, 0, 0)
  P2 = (0, 0, 1)
  SPIN = "sometimes"
END_GROUP = WALL
""",
    # stream of an undefined shape
    u"""GROUP = STREAM
  NAME = "feed"
  SHAPE = "cube"
  REGION = "box"
  LO = (0, 0, 0)
  HI = (1, 1, 1)
END_GROUP = STREAM
""",
    # stream following itself
    u"""GROUP = STREAM
  NAME = "feed"
  SHAPE = "pill"
  REGION = "box"
  LO = (0, 0, 0)
  HI = (1, 1, 1)
  AFTER = "feed"
END_GROUP = STREAM
""",
    # stream following an unknown stream
    u"""GROUP = STREAM
  NAME = "feed"
  SHAPE = "pill"
  REGION = "cylinder"
  CENTER = (0, 0, 0)
  RADIUS = 0.1
  ZMIN = 0.0
  ZMAX = 0.1
  AFTER = "hopper"
END_GROUP = STREAM
""",
    # inverted batch range
    u"""GROUP = STREAM
  NAME = "feed"
  SHAPE = "pill"
  REGION = "box"
  LO = (0, 0, 0)
  HI = (1, 1, 1)
  BATCH = (5, 2)
END_GROUP = STREAM
""",
    # cylinder region without its height range
    u"""GROUP = STREAM
  NAME = "feed"
  SHAPE = "pill"
  REGION = "cylinder"
  CENTER = (0, 0, 0)
  RADIUS = 0.1
END_GROUP = STREAM
""",
    # particle of an undefined shape
    u"""GROUP = PARTICLE
  SHAPE = "cube"
  POSITION = (0, 0, 0)
END_GROUP = PARTICLE
""",
    # zero orientation quaternion
    u"""GROUP = PARTICLE
  SHAPE = "pill"
  POSITION = (0, 0, 0)
  ORIENTATION = (0, 0, 0, 0)
END_GROUP = PARTICLE
""",
    # material defined twice
    u"""GROUP = MATERIAL
  NAME = "glass"
  YOUNG = 1e9
  POISSON = 0.2
END_GROUP = MATERIAL
""",
])
def test_invalid_references(text):
    with pytest.raises(SceneConfigError):
        scene.parse_scene(MINIMAL.replace(u"END\n", text + u"END\n"))


def test_serialize_roundtrip(drop):
    text = drop.serialize()
    assert scene.parse_scene(text) == drop
    assert drop.copy() == drop
    assert drop.copy() is not drop
    # normalized defaults are written out
    assert 'N_DIV = 20' in text


def test_override(drop):
    changed = scene.override(drop, 'material', 'young', 2e6)
    assert changed.materials[0]['YOUNG'] == 2e6
    assert drop.materials[0]['YOUNG'] == 1e6
    assert changed != drop
    seeded = scene.override(drop, 'SCENE', 'SEED', 11)
    assert seeded.scene['SEED'] == 11
    analysis = scene.override(scene.parse_scene(MINIMAL), 'ANALYSIS',
                              'RADIUS', 0.05)
    assert analysis.analysis['RADIUS'] == 0.05
    with pytest.raises(SceneConfigError):
        scene.override(drop, 'STEP', 'N_DIV', 5)
    with pytest.raises(SceneConfigError):
        scene.override(drop, 'COLOR', 'RED', 1)
    with pytest.raises(SceneConfigError):
        scene.override(scene.parse_scene(MINIMAL), 'WALL', 'KIND', 'plane')


def test_build_world(drop):
    built = scene.build_world(drop, DATADIR)
    system = built.system
    assert [tmpl.name for tmpl in system.templates] == ['bead']
    assert system.templates[0].surface is not None
    assert system.templates[0].cells is not None
    assert np.isclose(system.materials[0].young, 1e6)
    assert len(built.walls) == 1
    assert isinstance(built.walls[0], world.PlaneWall)
    assert built.walls[0].name == 'floor'
    assert len(built.streams) == 1
    assert built.streams[0].seed == 7
    assert system.count == 1
    assert system.tags[0] == 'probe'
    assert np.allclose(system.pos[0], [0.01, 0.01, 0.04])
    assert scene.build_world(drop, DATADIR, seed=3).streams[0].seed == 3


def test_relative_mesh_paths(drop, tmpdir):
    absolute = scene.resolve_paths(drop, DATADIR)
    assert os.path.isabs(absolute.shapes[0]['SURFACE'])
    assert os.path.isfile(absolute.shapes[0]['SURFACE'])
    # a copy stored elsewhere still finds its meshes
    target = tmpdir.join('scene.cfg')
    target.write(absolute.serialize())
    moved = scene.load_scene(str(target))
    built = scene.build_world(moved, str(tmpdir))
    assert built.system.templates[0].surface is not None
    assert scene.resolve_paths(drop, None) is drop


def test_orientation_is_normalized():
    text = MINIMAL.replace(u"END\n", u"""GROUP = PARTICLE
  SHAPE = "pill"
  POSITION = (0, 0, 0)
  ORIENTATION = (2, 0, 0, 2)
END_GROUP = PARTICLE
END
""")
    system = scene.build_world(scene.parse_scene(text)).system
    assert np.allclose(system.quat[0], [np.sqrt(0.5), 0, 0, np.sqrt(0.5)])
