#!/usr/bin/env python
# encoding: utf-8
"""
test_presets.py
"""

from __future__ import division, print_function, absolute_import
import pytest
import numpy as np
from pymsdem import presets, scene
from pymsdem.demhelpers import SceneConfigError


def test_preset_names():
    names = presets.preset_names()
    assert len(names) == 13
    assert len(set(names)) == 13
    assert 'impact-wall' in names
    assert 'dam-break-torus' in names


@pytest.mark.parametrize('name', presets.preset_names())
def test_presets_validate(name):
    config = presets.make_preset(name)
    assert config.scene['NAME'] == name
    assert scene.parse_scene(config.serialize()) == config


def test_unknown_preset():
    with pytest.raises(SceneConfigError):
        presets.make_preset('pack-shapes-cube')
    with pytest.raises(SceneConfigError):
        presets.make_preset('avalanche')


@pytest.mark.parametrize('partner', ['wall', 'pp'])
def test_impact_gap(partner):
    built = scene.build_world(presets.make_preset('impact-' + partner))
    system = built.system
    mover = system.tags.index('mover')
    assert np.allclose(system.vel[mover], [0, 0, -presets.IMPACT_SPEED])
    lowest = system.pos[mover, 2] - presets.IMPACT_B
    if partner == 'wall':
        assert np.isclose(lowest, presets.IMPACT_GAP)
    else:
        target = system.tags.index('target')
        assert system.fixed[target]
        assert np.isclose(lowest - (system.pos[target, 2] + presets.IMPACT_B),
                          presets.IMPACT_GAP)


@pytest.mark.parametrize('kind', presets.SHAPE_KINDS)
def test_packing_shapes_share_volume(kind):
    config = presets.make_preset('pack-shapes-%s' % kind)
    system, _ = scene.build_classes(config)
    assert system.templates[0].nspheres == scene.DEFAULT_NSPHERES[kind]
    assert np.isclose(system.templates[0].props.volume,
                      presets.SHAPE_VOLUME, rtol=1e-3)


def test_dam_break_barrier():
    config = presets.make_preset('dam-break-ellipsoid')
    barriers = [grp for grp in config.walls if grp['BARRIER']]
    assert len(barriers) == 1
    assert barriers[0]['POINT'][0] == presets.BOX[0]
    assert config.step['ROLLING'] is True
    assert config.analysis['MEASURES'] == ('aor',)


def test_drum_layers():
    config = presets.make_preset('drum')
    blue, red = config.streams
    assert (blue['TAG'], red['TAG']) == ('blue', 'red')
    assert red['AFTER'] == 'blue'
    assert all(grp['SPIN'] == 'release' for grp in config.walls)
    assert np.isclose(config.walls[0]['OMEGA'][1], 2 * np.pi / 3.0)
    assert config.materials[0]['DENSITY'] == presets.DRUM_DENSITY
