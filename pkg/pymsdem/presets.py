# coding: utf-8
"""
pymsdem.presets

Built-in validation scenes:

    impact-wall          ellipsoid dropped head-on onto a plane wall
    impact-pp            ellipsoid dropped head-on onto a fixed twin
    pack-capsules        600 capsules poured into a cylindrical container
    pack-shapes-<kind>   300 equal-volume particles poured into a box
    dam-break-<kind>     300 particles released from behind a barrier
    drum                 1000 ellipsoids in two colored layers, 20 rpm

<kind> is one of sphere, ellipsoid, spherocylinder, cassini, torus.
"""

from __future__ import division, print_function, absolute_import
from collections import OrderedDict
import logging

import numpy as np

from pymsdem.demhelpers import SceneConfigError, loglevel
from pymsdem.scene import SceneConfig, DEFAULT_NSPHERES

logging.basicConfig(level=loglevel())
LOGGER = logging.getLogger('pymsdem.presets')

# impact scenes
IMPACT_A = 0.005
IMPACT_B = 0.0025
IMPACT_SPEED = 1.0
IMPACT_GAP = 5e-5
IMPACT_DT = 1e-7

# packing scenes
CAPSULE_DIAMETER = 0.0076
CAPSULE_HEIGHT = 0.0214
CAPSULE_SPHERES = 21
CONTAINER_DIAMETER = 0.0935
CONTAINER_HEIGHT = 0.195
PACKING_DT = 5e-7
PACKING_INTERVAL = 100000
BOX = (0.035, 0.035, 0.120)
CHANNEL = (0.120, 0.035, 0.080)
# all shapes of the box scenes share the volume of the 5 x 2.5 x 2.5 mm
# ellipsoid
SHAPE_VOLUME = 4.0 / 3.0 * np.pi * IMPACT_A * IMPACT_B ** 2

# drum scene
DRUM_RADIUS = 0.1
DRUM_THICKNESS = 0.02
DRUM_RPM = 20.0
DRUM_DENSITY = 1150.0

SHAPE_KINDS = ('sphere', 'ellipsoid', 'spherocylinder', 'cassini', 'torus')


def preset_names():
    names = ['impact-wall', 'impact-pp', 'pack-capsules']
    names += ['pack-shapes-%s' % kind for kind in SHAPE_KINDS]
    names += ['dam-break-%s' % kind for kind in SHAPE_KINDS]
    names.append('drum')
    return names


def _group(**items):
    return OrderedDict(sorted(items.items()))


def _glass():
    return _group(NAME='glass', YOUNG=1.0e10, POISSON=0.3, DENSITY=2500.0,
                  RESTITUTION=0.6, MU_PP=0.0, MU_PW=0.0)


def _gelatin(density=917.0):
    return _group(NAME='gelatin', YOUNG=5.0e7, POISSON=0.3, DENSITY=density,
                  RESTITUTION=0.6, MU_PP=0.4, MU_PW=0.3)


def _wall_material():
    return _group(NAME='steel', YOUNG=5.0e7, POISSON=0.3, RESTITUTION=0.6,
                  MU_PP=0.4, MU_PW=0.3)


def _plane(name, point, normal, **extra):
    return _group(NAME=name, KIND='plane', MATERIAL='steel', POINT=point,
                  NORMAL=normal, **extra)


def _box_walls(size, prefix=''):
    """Floor and four side walls of an open box [0, size]"""
    return [
        _plane(prefix + 'floor', (0.0, 0.0, 0.0), (0.0, 0.0, 1.0)),
        _plane(prefix + 'left', (0.0, 0.0, 0.0), (1.0, 0.0, 0.0)),
        _plane(prefix + 'right', (size[0], 0.0, 0.0), (-1.0, 0.0, 0.0)),
        _plane(prefix + 'front', (0.0, 0.0, 0.0), (0.0, 1.0, 0.0)),
        _plane(prefix + 'back', (0.0, size[1], 0.0), (0.0, -1.0, 0.0)),
    ]


def _equal_volume_shape(kind, material):
    return _group(NAME=kind, KIND=kind, MATERIAL=material,
                  VOLUME=SHAPE_VOLUME, NSPHERES=DEFAULT_NSPHERES[kind])


def _impact(partner):
    """Head-on impact of a horizontal ellipsoid moving down the z axis"""
    raw = OrderedDict()
    raw['SCENE'] = _group(NAME='impact-%s' % partner, SEED=0, STEPS=2000)
    raw['STEP'] = _group(DT=IMPACT_DT, GRAVITY=(0.0, 0.0, 0.0),
                         DETERMINISTIC=True)
    raw['OUTPUT'] = _group(EVERY=100)
    raw['MATERIAL'] = [_glass()]
    raw['SHAPE'] = [_group(NAME='ellipsoid', KIND='ellipsoid',
                           MATERIAL='glass', A=IMPACT_A, B=IMPACT_B,
                           NSPHERES=15)]
    mover = _group(SHAPE='ellipsoid', VELOCITY=(0.0, 0.0, -IMPACT_SPEED),
                   TAG='mover')
    if partner == 'wall':
        raw['WALL'] = [_group(NAME='floor', KIND='plane', MATERIAL='glass',
                              POINT=(0.0, 0.0, 0.0),
                              NORMAL=(0.0, 0.0, 1.0))]
        mover['POSITION'] = (0.0, 0.0, IMPACT_B + IMPACT_GAP)
        raw['PARTICLE'] = [mover]
    else:
        mover['POSITION'] = (0.0, 0.0, 2.0 * IMPACT_B + IMPACT_GAP)
        raw['PARTICLE'] = [
            _group(SHAPE='ellipsoid', POSITION=(0.0, 0.0, 0.0), FIXED=True,
                   TAG='target'),
            mover]
    return raw


def _pack_capsules():
    radius = 0.5 * CONTAINER_DIAMETER
    raw = OrderedDict()
    raw['SCENE'] = _group(NAME='pack-capsules', SEED=0, DURATION=6.0,
                          STOP_ON_SETTLE=True)
    raw['STEP'] = _group(DT=PACKING_DT)
    raw['OUTPUT'] = _group(EVERY=10000)
    raw['ANALYSIS'] = _group(MEASURES=('fill-height', 'porosity'),
                             CONTAINER='cylinder', CENTER=(0.0, 0.0, 0.0),
                             RADIUS=radius, FLOOR=0.0, N=200)
    raw['MATERIAL'] = [_gelatin(), _wall_material()]
    raw['SHAPE'] = [_group(
        NAME='capsule', KIND='spherocylinder', MATERIAL='gelatin',
        RADIUS=0.5 * CAPSULE_DIAMETER,
        LENGTH=CAPSULE_HEIGHT - CAPSULE_DIAMETER, NSPHERES=CAPSULE_SPHERES)]
    raw['WALL'] = [
        _plane('floor', (0.0, 0.0, 0.0), (0.0, 0.0, 1.0)),
        _group(NAME='container', KIND='cylinder', MATERIAL='steel',
               RADIUS=radius, P1=(0.0, 0.0, 0.0),
               P2=(0.0, 0.0, CONTAINER_HEIGHT), INSIDE=True)]
    raw['STREAM'] = [_group(
        NAME='feed', SHAPE='capsule', REGION='cylinder',
        CENTER=(0.0, 0.0, 0.0), RADIUS=radius,
        ZMIN=CONTAINER_HEIGHT - 0.045, ZMAX=CONTAINER_HEIGHT - 0.005,
        INTERVAL=PACKING_INTERVAL, BATCH=(6, 10), COUNT=600)]
    return raw


def _pack_shapes(kind):
    raw = OrderedDict()
    raw['SCENE'] = _group(NAME='pack-shapes-%s' % kind, SEED=0,
                          DURATION=20.0, STOP_ON_SETTLE=True)
    raw['STEP'] = _group(DT=PACKING_DT)
    raw['OUTPUT'] = _group(EVERY=10000)
    raw['ANALYSIS'] = _group(MEASURES=('fill-height', 'porosity'),
                             CONTAINER='box', LO=(0.0, 0.0, 0.0), HI=BOX,
                             N=200)
    raw['MATERIAL'] = [_gelatin(), _wall_material()]
    raw['SHAPE'] = [_equal_volume_shape(kind, 'gelatin')]
    raw['WALL'] = _box_walls(BOX)
    raw['STREAM'] = [_group(
        NAME='feed', SHAPE=kind, REGION='box',
        LO=(0.0, 0.0, BOX[2] - 0.03), HI=(BOX[0], BOX[1], BOX[2] - 0.005),
        INTERVAL=PACKING_INTERVAL, BATCH=(5, 10), COUNT=300)]
    return raw


def _dam_break(kind):
    """Column poured behind a barrier at x = 35 mm, released once it has
    settled"""
    raw = OrderedDict()
    raw['SCENE'] = _group(NAME='dam-break-%s' % kind, SEED=0, DURATION=25.0,
                          STOP_ON_SETTLE=True)
    raw['STEP'] = _group(DT=PACKING_DT, ROLLING=True)
    raw['OUTPUT'] = _group(EVERY=10000)
    raw['ANALYSIS'] = _group(MEASURES=('aor',), CONTAINER='box',
                             LO=(0.0, 0.0, 0.0), HI=CHANNEL, AXIS='x',
                             EXTENT=(0.0, CHANNEL[0]),
                             DEPTH=(0.0, CHANNEL[1]), FLOOR=0.0, N=200)
    raw['MATERIAL'] = [_gelatin(), _wall_material()]
    raw['SHAPE'] = [_equal_volume_shape(kind, 'gelatin')]
    raw['WALL'] = _box_walls(CHANNEL) + [
        _plane('barrier', (BOX[0], 0.0, 0.0), (-1.0, 0.0, 0.0),
               BARRIER=True)]
    raw['STREAM'] = [_group(
        NAME='column', SHAPE=kind, REGION='box',
        LO=(0.0, 0.0, CHANNEL[2] - 0.02), HI=(BOX[0], BOX[1], CHANNEL[2]),
        INTERVAL=PACKING_INTERVAL, BATCH=(5, 10), COUNT=300)]
    return raw


def _drum():
    """Drum with its axis along y, filled with a blue layer and a red
    layer on top; it starts turning once the fill has settled"""
    omega = (0.0, 2.0 * np.pi * DRUM_RPM / 60.0, 0.0)
    spin = dict(OMEGA=omega, CENTER=(0.0, 0.0, 0.0), SPIN='release')
    region = dict(REGION='box', LO=(-0.07, 0.0, -0.03),
                  HI=(0.07, DRUM_THICKNESS, 0.07), INTERVAL=20000,
                  BATCH=(20, 40), COUNT=500)
    raw = OrderedDict()
    raw['SCENE'] = _group(NAME='drum', SEED=0, DURATION=10.0)
    raw['STEP'] = _group(DT=PACKING_DT)
    raw['OUTPUT'] = _group(EVERY=10000)
    raw['MATERIAL'] = [_gelatin(DRUM_DENSITY), _wall_material()]
    raw['SHAPE'] = [_equal_volume_shape('ellipsoid', 'gelatin')]
    raw['WALL'] = [
        _group(NAME='drum', KIND='cylinder', MATERIAL='steel',
               RADIUS=DRUM_RADIUS, P1=(0.0, 0.0, 0.0),
               P2=(0.0, DRUM_THICKNESS, 0.0), INSIDE=True, **spin),
        _plane('front', (0.0, 0.0, 0.0), (0.0, 1.0, 0.0), **spin),
        _plane('back', (0.0, DRUM_THICKNESS, 0.0), (0.0, -1.0, 0.0),
               **spin)]
    raw['STREAM'] = [
        _group(NAME='blue', SHAPE='ellipsoid', TAG='blue', **region),
        _group(NAME='red', SHAPE='ellipsoid', TAG='red', AFTER='blue',
               **region)]
    return raw


def preset_raw(name):
    """Unvalidated group dict of a built-in scene"""
    if name == 'impact-wall':
        return _impact('wall')
    elif name == 'impact-pp':
        return _impact('pp')
    elif name == 'pack-capsules':
        return _pack_capsules()
    elif name == 'drum':
        return _drum()
    for prefix, builder in (('pack-shapes-', _pack_shapes),
                            ('dam-break-', _dam_break)):
        if name.startswith(prefix) and name[len(prefix):] in SHAPE_KINDS:
            return builder(name[len(prefix):])
    raise SceneConfigError("Unknown preset '%s' (use one of %s)"
                           % (name, ", ".join(preset_names())))


def make_preset(name):
    """Validated SceneConfig of a built-in scene"""
    LOGGER.debug("Building preset %s" % name)
    return SceneConfig(preset_raw(name))
