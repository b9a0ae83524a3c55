# coding: utf-8
"""
pymsdem.scene

Scene configuration: validation of parsed scene files into a normalized
SceneConfig, serialization back to text, and construction of the world
(particle classes, walls, streams, initial particles) from a config.

All values are SI units. Groups:

    SCENE      name, seed, run length, settlement and blow-up settings
    STEP       time step policy, gravity, neighbor list and force options
    OUTPUT     snapshot schedule and output files
    ANALYSIS   (optional) measurements taken by the analyze command
    MATERIAL   (repeated) contact materials
    SHAPE      (repeated) particle classes
    WALL       (repeated) plane, cylinder and mesh walls
    STREAM     (repeated) particle streams
    PARTICLE   (repeated) individually placed particles
"""

from __future__ import division, print_function, absolute_import
from builtins import object
from collections import OrderedDict
import copy
import os
import logging

import numpy as np

from pymsdem import odlutils, world
from pymsdem.demhelpers import SceneConfigError, loglevel
from pymsdem.meshes import read_mesh
from pymsdem.shape import (SHAPEKINDS, CURVATURE_MODELS, ShapeDescriptor,
                           ShapeTemplate, equal_volume_descriptor)

logging.basicConfig(level=loglevel())
LOGGER = logging.getLogger('pymsdem.scene')

REQUIRED = object()

SINGLE_GROUPS = ('SCENE', 'STEP', 'OUTPUT', 'ANALYSIS')
LIST_GROUPS = ('MATERIAL', 'SHAPE', 'WALL', 'STREAM', 'PARTICLE')
OPTIONAL_GROUPS = ('ANALYSIS',)

SCHEMA = {
    'SCENE': [
        ('NAME', 'str', 'scene'),
        ('SEED', 'int', 0),
        ('STEPS', 'int', None),
        ('DURATION', 'float', None),
        ('STOP_ON_SETTLE', 'bool', False),
        ('SETTLE_THRESHOLD', 'float', 1e-8),
        ('SETTLE_INTERVAL', 'int', 1000),
        ('VMAX', 'float', 100.0),
    ],
    'STEP': [
        ('DT', 'float', None),
        ('N_DIV', 'int', 20),
        ('GRAVITY', 'vec3', (0.0, 0.0, -9.81)),
        ('DETERMINISTIC', 'bool', False),
        ('CELL_FACTOR', 'float', 2.0),
        ('REBUILD_INTERVAL', 'int', 20),
        ('R_CUT', 'float', 0.0),
        ('SKIN_MIN', 'float', None),
        ('ROLLING', 'bool', False),
    ],
    'OUTPUT': [
        ('EVERY', 'int', 10000),
        ('SNAPSHOTS', 'bool', True),
        ('TRAJECTORY', 'bool', True),
        ('HDF5', 'bool', False),
    ],
    'ANALYSIS': [
        ('MEASURES', 'strs', ('fill-height', 'porosity')),
        ('CONTAINER', 'str', 'cylinder'),
        ('CENTER', 'vec3', (0.0, 0.0, 0.0)),
        ('RADIUS', 'float', None),
        ('LO', 'vec3', None),
        ('HI', 'vec3', None),
        ('FLOOR', 'float', 0.0),
        ('AXIS', 'str', 'x'),
        ('EXTENT', 'vec2', None),
        ('DEPTH', 'vec2', None),
        ('N', 'int', 100),
    ],
    'MATERIAL': [
        ('NAME', 'str', REQUIRED),
        ('YOUNG', 'float', REQUIRED),
        ('POISSON', 'float', REQUIRED),
        ('DENSITY', 'float', None),
        ('RESTITUTION', 'float', 0.6),
        ('MU_PP', 'float', 0.0),
        ('MU_PW', 'float', 0.0),
        ('MU_ROLL', 'float', 0.001),
    ],
    'SHAPE': [
        ('NAME', 'str', REQUIRED),
        ('KIND', 'str', REQUIRED),
        ('MATERIAL', 'str', REQUIRED),
        ('NSPHERES', 'int', None),
        ('RADIUS', 'float', None),
        ('A', 'float', None),
        ('B', 'float', None),
        ('LENGTH', 'float', None),
        ('R_MAJOR', 'float', None),
        ('R_MINOR', 'float', None),
        ('VOLUME', 'float', None),
        ('ASPECT', 'float', None),
        ('CURVATURE', 'str', 'eq'),
        ('SURFACE', 'str', None),
        ('CELLS', 'str', None),
    ],
    'WALL': [
        ('NAME', 'str', None),
        ('KIND', 'str', REQUIRED),
        ('MATERIAL', 'str', REQUIRED),
        ('POINT', 'vec3', None),
        ('NORMAL', 'vec3', None),
        ('RADIUS', 'float', None),
        ('P1', 'vec3', None),
        ('P2', 'vec3', None),
        ('INSIDE', 'bool', True),
        ('MESH', 'str', None),
        ('OMEGA', 'vec3', (0.0, 0.0, 0.0)),
        ('CENTER', 'vec3', (0.0, 0.0, 0.0)),
        ('SPIN', 'str', 'always'),
        ('BARRIER', 'bool', False),
    ],
    'STREAM': [
        ('NAME', 'str', REQUIRED),
        ('SHAPE', 'str', REQUIRED),
        ('REGION', 'str', REQUIRED),
        ('LO', 'vec3', None),
        ('HI', 'vec3', None),
        ('CENTER', 'vec3', None),
        ('RADIUS', 'float', None),
        ('ZMIN', 'float', None),
        ('ZMAX', 'float', None),
        ('VELOCITY', 'vec3', (0.0, 0.0, 0.0)),
        ('INTERVAL', 'int', 1),
        ('BATCH', 'ipair', (1, 1)),
        ('COUNT', 'int', None),
        ('MASS', 'float', None),
        ('AFTER', 'str', None),
        ('TAG', 'str', ''),
        ('SEED', 'int', None),
    ],
    'PARTICLE': [
        ('SHAPE', 'str', REQUIRED),
        ('POSITION', 'vec3', REQUIRED),
        ('ORIENTATION', 'vec4', (1.0, 0.0, 0.0, 0.0)),
        ('VELOCITY', 'vec3', (0.0, 0.0, 0.0)),
        ('OMEGA', 'vec3', (0.0, 0.0, 0.0)),
        ('TAG', 'str', ''),
        ('FIXED', 'bool', False),
    ],
}

# shape parameter keys in scene files -> ShapeDescriptor parameter names
SHAPE_PARAMKEYS = {
    'sphere': OrderedDict([('RADIUS', 'r')]),
    'ellipsoid': OrderedDict([('A', 'a'), ('B', 'b')]),
    'spherocylinder': OrderedDict([('RADIUS', 'R'), ('LENGTH', 'L')]),
    'torus': OrderedDict([('R_MAJOR', 'R'), ('R_MINOR', 'r')]),
    'cassini': OrderedDict([('A', 'a'), ('B', 'b')]),
}
DEFAULT_NSPHERES = {
    'sphere': 1,
    'ellipsoid': 15,
    'spherocylinder': 17,
    'torus': 64,
    'cassini': 29,
}
WALLKINDS = ('plane', 'cylinder', 'mesh')
REGIONKINDS = ('box', 'cylinder')
MEASURES = ('fill-height', 'porosity', 'aor')
CONTAINERS = ('cylinder', 'box')


# ==================================================================
# = value conversion
# ==================================================================
def _isnumber(value):
    return isinstance(value, (int, float)) and not isinstance(value, bool)


def _convert(value, kind, where):
    """Checks and converts a parsed value to the schema type"""
    if kind == 'str':
        if not isinstance(value, str):
            raise SceneConfigError("%s: expected a string, got %r"
                                   % (where, value))
        return value
    if kind == 'bool':
        if not isinstance(value, bool):
            raise SceneConfigError("%s: expected True or False, got %r"
                                   % (where, value))
        return value
    if kind == 'int':
        if isinstance(value, bool) or not isinstance(value, int):
            raise SceneConfigError("%s: expected an integer, got %r"
                                   % (where, value))
        return int(value)
    if kind == 'float':
        if not _isnumber(value):
            raise SceneConfigError("%s: expected a number, got %r"
                                   % (where, value))
        return float(value)
    if kind == 'strs':
        if isinstance(value, str):
            value = (value,)
        if not isinstance(value, (tuple, list)) or \
                not all(isinstance(item, str) for item in value):
            raise SceneConfigError("%s: expected strings, got %r"
                                   % (where, value))
        return tuple(value)
    size = {'vec2': 2, 'vec3': 3, 'vec4': 4, 'ipair': 2}[kind]
    if not isinstance(value, (tuple, list)) or len(value) != size or \
            not all(_isnumber(item) for item in value):
        raise SceneConfigError("%s: expected %d numbers, got %r"
                               % (where, size, value))
    if kind == 'ipair':
        if not all(isinstance(item, int) for item in value):
            raise SceneConfigError("%s: expected integers, got %r"
                                   % (where, value))
        return tuple(int(item) for item in value)
    return tuple(float(item) for item in value)


def _normalize_group(name, raw, label):
    """Fills defaults and converts the values of one group"""
    if not isinstance(raw, dict):
        raise SceneConfigError("%s must be a group" % label)
    schema = SCHEMA[name]
    known = [key for key, _, _ in schema]
    for key in raw:
        if key not in known:
            raise SceneConfigError("%s: unknown key '%s'" % (label, key))
    out = OrderedDict()
    for key, kind, default in schema:
        if raw.get(key) is not None:
            out[key] = _convert(raw[key], kind, "%s.%s" % (label, key))
        elif default is REQUIRED:
            raise SceneConfigError("%s: %s is required" % (label, key))
        else:
            out[key] = default
    return out


def _aslist(value):
    if value is None:
        return []
    if isinstance(value, list):
        return value
    return [value]


def _require(group, keys, label):
    missing = [key for key in keys if group[key] is None]
    if missing:
        raise SceneConfigError("%s: %s required" % (label, ", ".join(missing)))


def _positive(group, keys, label):
    for key in keys:
        if group[key] is not None and not group[key] > 0:
            raise SceneConfigError("%s: %s must be positive, got %r"
                                   % (label, key, group[key]))


# ==================================================================
# = per-group checks
# ==================================================================
def _check_scene(grp):
    if grp['STEPS'] is None and grp['DURATION'] is None:
        raise SceneConfigError("SCENE: STEPS or DURATION is required")
    if grp['STEPS'] is not None and grp['STEPS'] < 0:
        raise SceneConfigError("SCENE: STEPS must be >= 0")
    _positive(grp, ('DURATION', 'SETTLE_THRESHOLD', 'SETTLE_INTERVAL',
                    'VMAX'), 'SCENE')


def _check_step(grp):
    _positive(grp, ('DT', 'REBUILD_INTERVAL', 'SKIN_MIN'), 'STEP')
    if not 10 <= grp['N_DIV'] <= 100:
        raise SceneConfigError("STEP: N_DIV must be in [10, 100]")
    if not 1.0 <= grp['CELL_FACTOR'] <= 3.0:
        raise SceneConfigError("STEP: CELL_FACTOR must be in [1, 3]")
    if grp['R_CUT'] < 0:
        raise SceneConfigError("STEP: R_CUT must be >= 0")


def _check_material(grp, label):
    _positive(grp, ('YOUNG', 'DENSITY'), label)
    if not 0.0 <= grp['POISSON'] < 0.5:
        raise SceneConfigError("%s: POISSON must be in [0, 0.5)" % label)
    if not 0.0 < grp['RESTITUTION'] <= 1.0:
        raise SceneConfigError("%s: RESTITUTION must be in (0, 1]" % label)
    for key in ('MU_PP', 'MU_PW', 'MU_ROLL'):
        if grp[key] < 0:
            raise SceneConfigError("%s: %s must be >= 0" % (label, key))


def _check_shape(grp, label):
    kind = grp['KIND']
    if kind not in SHAPEKINDS:
        raise SceneConfigError("%s: unknown KIND '%s' (use one of %s)"
                               % (label, kind, ", ".join(SHAPEKINDS)))
    if grp['CURVATURE'] not in CURVATURE_MODELS:
        raise SceneConfigError("%s: CURVATURE must be one of %s"
                               % (label, ", ".join(CURVATURE_MODELS)))
    own = list(SHAPE_PARAMKEYS[kind])
    others = set(key for keys in SHAPE_PARAMKEYS.values() for key in keys)
    for key in sorted(others - set(own)):
        if grp[key] is not None:
            raise SceneConfigError("%s: %s does not apply to a %s"
                                   % (label, key, kind))
    if grp['VOLUME'] is None:
        _require(grp, own, label)
        if grp['ASPECT'] is not None:
            raise SceneConfigError("%s: ASPECT needs VOLUME" % label)
    elif any(grp[key] is not None for key in own):
        raise SceneConfigError("%s: give either VOLUME or %s"
                               % (label, ", ".join(own)))
    _positive(grp, own + ['VOLUME', 'ASPECT', 'NSPHERES'], label)
    if grp['NSPHERES'] is None:
        grp['NSPHERES'] = DEFAULT_NSPHERES[kind]


def _check_wall(grp, label):
    kind = grp['KIND']
    if kind not in WALLKINDS:
        raise SceneConfigError("%s: unknown KIND '%s' (use one of %s)"
                               % (label, kind, ", ".join(WALLKINDS)))
    if kind == 'plane':
        _require(grp, ('POINT', 'NORMAL'), label)
    elif kind == 'cylinder':
        _require(grp, ('RADIUS', 'P1', 'P2'), label)
        _positive(grp, ('RADIUS',), label)
    else:
        _require(grp, ('MESH',), label)
    if grp['SPIN'] not in world.SPIN_MODES:
        raise SceneConfigError("%s: SPIN must be one of %s"
                               % (label, ", ".join(world.SPIN_MODES)))


def _check_stream(grp, label):
    if grp['REGION'] not in REGIONKINDS:
        raise SceneConfigError("%s: REGION must be one of %s"
                               % (label, ", ".join(REGIONKINDS)))
    if grp['REGION'] == 'box':
        _require(grp, ('LO', 'HI'), label)
    else:
        _require(grp, ('CENTER', 'RADIUS', 'ZMIN', 'ZMAX'), label)
        _positive(grp, ('RADIUS',), label)
    _positive(grp, ('INTERVAL', 'COUNT', 'MASS'), label)
    lo, hi = grp['BATCH']
    if lo < 1 or hi < lo:
        raise SceneConfigError("%s: BATCH must satisfy 1 <= lo <= hi" % label)


def _check_analysis(grp):
    for measure in grp['MEASURES']:
        if measure not in MEASURES:
            raise SceneConfigError("ANALYSIS: unknown measure '%s'" % measure)
    if grp['CONTAINER'] not in CONTAINERS:
        raise SceneConfigError("ANALYSIS: CONTAINER must be one of %s"
                               % ", ".join(CONTAINERS))
    if grp['CONTAINER'] == 'cylinder':
        _require(grp, ('RADIUS',), 'ANALYSIS')
    else:
        _require(grp, ('LO', 'HI'), 'ANALYSIS')
    if 'aor' in grp['MEASURES']:
        _require(grp, ('EXTENT', 'DEPTH'), 'ANALYSIS')
    if grp['AXIS'] not in ('x', 'y'):
        raise SceneConfigError("ANALYSIS: AXIS must be 'x' or 'y'")
    if grp['N'] < 100:
        raise SceneConfigError("ANALYSIS: N must be >= 100")


def _unique(groups, label):
    names = [grp['NAME'] for grp in groups]
    for name in names:
        if names.count(name) > 1:
            raise SceneConfigError("%s '%s' defined twice" % (label, name))
    return set(names)


# ==================================================================
# = SceneConfig
# ==================================================================
class SceneConfig(object):
    """
    A validated, normalized scene configuration.

    The groups are available as attributes: scene, step, output, analysis
    (None if absent) are dicts, materials, shapes, walls, streams,
    particles are lists of dicts. Missing optional values are None.
    """
    def __init__(self, raw):
        self.data = self._normalize(raw)

    @staticmethod
    def _normalize(raw):
        for name in raw:
            if name not in SINGLE_GROUPS + LIST_GROUPS:
                raise SceneConfigError("Unknown group '%s'" % name)
        data = OrderedDict()
        for name in SINGLE_GROUPS:
            value = raw.get(name)
            if isinstance(value, list):
                raise SceneConfigError("Group %s given more than once" % name)
            if value is None and name in OPTIONAL_GROUPS:
                continue
            data[name] = _normalize_group(name, value or OrderedDict(), name)
        for name in LIST_GROUPS:
            data[name] = [
                _normalize_group(name, grp, "%s %d" % (name, idx + 1))
                for idx, grp in enumerate(_aslist(raw.get(name)))]

        _check_scene(data['SCENE'])
        _check_step(data['STEP'])
        _positive(data['OUTPUT'], ('EVERY',), 'OUTPUT')
        if 'ANALYSIS' in data:
            _check_analysis(data['ANALYSIS'])
        materials = _unique(data['MATERIAL'], 'MATERIAL')
        for grp in data['MATERIAL']:
            _check_material(grp, "MATERIAL %s" % grp['NAME'])
        shapes = _unique(data['SHAPE'], 'SHAPE')
        particle_materials = set()
        for grp in data['SHAPE']:
            label = "SHAPE %s" % grp['NAME']
            _check_shape(grp, label)
            if grp['MATERIAL'] not in materials:
                raise SceneConfigError("%s: undefined MATERIAL '%s'"
                                       % (label, grp['MATERIAL']))
            particle_materials.add(grp['MATERIAL'])
        for grp in data['MATERIAL']:
            if grp['NAME'] in particle_materials and grp['DENSITY'] is None:
                raise SceneConfigError(
                    "MATERIAL %s: DENSITY is required for particle "
                    "materials" % grp['NAME'])
        for idx, grp in enumerate(data['WALL']):
            label = "WALL %s" % (grp['NAME'] or idx + 1)
            _check_wall(grp, label)
            if grp['MATERIAL'] not in materials:
                raise SceneConfigError("%s: undefined MATERIAL '%s'"
                                       % (label, grp['MATERIAL']))
        streams = _unique(data['STREAM'], 'STREAM')
        for grp in data['STREAM']:
            label = "STREAM %s" % grp['NAME']
            _check_stream(grp, label)
            if grp['SHAPE'] not in shapes:
                raise SceneConfigError("%s: undefined SHAPE '%s'"
                                       % (label, grp['SHAPE']))
            if grp['AFTER'] is not None and (grp['AFTER'] not in streams or
                                             grp['AFTER'] == grp['NAME']):
                raise SceneConfigError("%s: AFTER names no other stream"
                                       % label)
        for idx, grp in enumerate(data['PARTICLE']):
            if grp['SHAPE'] not in shapes:
                raise SceneConfigError("PARTICLE %d: undefined SHAPE '%s'"
                                       % (idx + 1, grp['SHAPE']))
            if not any(grp['ORIENTATION']):
                raise SceneConfigError("PARTICLE %d: zero ORIENTATION"
                                       % (idx + 1))
        return data

    def __eq__(self, other):
        return isinstance(other, SceneConfig) and self.data == other.data

    def __ne__(self, other):
        return not self == other

    @property
    def scene(self):
        return self.data['SCENE']

    @property
    def step(self):
        return self.data['STEP']

    @property
    def output(self):
        return self.data['OUTPUT']

    @property
    def analysis(self):
        return self.data.get('ANALYSIS')

    @property
    def materials(self):
        return self.data['MATERIAL']

    @property
    def shapes(self):
        return self.data['SHAPE']

    @property
    def walls(self):
        return self.data['WALL']

    @property
    def streams(self):
        return self.data['STREAM']

    @property
    def particles(self):
        return self.data['PARTICLE']

    def serialize(self):
        return serialize(self)

    def copy(self):
        return parse_scene(serialize(self))


def parse_scene(text):
    """Parses and validates a scene document. Returns a SceneConfig."""
    return SceneConfig(odlutils.parse(text))


def load_scene(filepath):
    return SceneConfig(odlutils.parsefile(filepath))


def serialize(config):
    """Scene document text of a SceneConfig"""
    return odlutils.dumps(config.data)


# ==================================================================
# = building the world
# ==================================================================
def make_material(grp):
    return world.Material(
        grp['NAME'], grp['YOUNG'], grp['POISSON'],
        density=grp['DENSITY'] if grp['DENSITY'] is not None else 1.0,
        restitution=grp['RESTITUTION'], mu_pp=grp['MU_PP'],
        mu_pw=grp['MU_PW'], mu_roll=grp['MU_ROLL'])


def _resolve(path, base_dir):
    if path is None or os.path.isabs(path) or base_dir is None:
        return path
    return os.path.join(base_dir, path)


def make_template(grp, density, base_dir=None):
    """ShapeTemplate of a SHAPE group"""
    kind = grp['KIND']
    if grp['VOLUME'] is not None:
        descriptor = equal_volume_descriptor(
            kind, grp['VOLUME'], grp['NSPHERES'], grp['ASPECT'])
    else:
        params = dict((pname, grp[key]) for key, pname in
                      SHAPE_PARAMKEYS[kind].items())
        descriptor = ShapeDescriptor(kind, params, grp['NSPHERES'])
    surface = cells = None
    if grp['SURFACE'] is not None:
        surface = read_mesh(_resolve(grp['SURFACE'], base_dir))
    if grp['CELLS'] is not None:
        cells = read_mesh(_resolve(grp['CELLS'], base_dir))
    return ShapeTemplate(grp['NAME'], descriptor, density, surface=surface,
                         cells=cells, curvature_model=grp['CURVATURE'])


def make_wall(grp, material, base_dir=None):
    kwargs = dict(omega=grp['OMEGA'], center=grp['CENTER'], spin=grp['SPIN'],
                  barrier=grp['BARRIER'], name=grp['NAME'])
    if grp['KIND'] == 'plane':
        return world.PlaneWall(grp['POINT'], grp['NORMAL'], material,
                               **kwargs)
    elif grp['KIND'] == 'cylinder':
        return world.CylinderWall(grp['RADIUS'], grp['P1'], grp['P2'],
                                  material, inside=grp['INSIDE'], **kwargs)
    return world.MeshWall(read_mesh(_resolve(grp['MESH'], base_dir)),
                          material, **kwargs)


def make_region(grp):
    if grp['REGION'] == 'box':
        return world.BoxRegion(grp['LO'], grp['HI'])
    return world.CylinderRegion(grp['CENTER'], grp['RADIUS'], grp['ZMIN'],
                                grp['ZMAX'])


def build_classes(config, base_dir=None):
    """A ParticleSystem with one particle class per SHAPE group"""
    materials = dict((grp['NAME'], make_material(grp))
                     for grp in config.materials)
    system = world.ParticleSystem()
    for grp in config.shapes:
        mat = materials[grp['MATERIAL']]
        system.add_class(make_template(grp, mat.density, base_dir), mat)
    return system, materials


def build_world(config, base_dir=None, seed=None):
    """
    Builds the scene of a SceneConfig.

    Arguments:
        config: SceneConfig
        base_dir: directory against which relative mesh paths resolve
        seed: overrides SCENE.SEED
    Returns:
        world.Scene with particle classes, walls, streams and the
        individually placed particles
    """
    seed = config.scene['SEED'] if seed is None else int(seed)
    system, materials = build_classes(config, base_dir)
    scene = world.Scene(system)
    for grp in config.walls:
        scene.add_wall(make_wall(grp, materials[grp['MATERIAL']], base_dir))
    for idx, grp in enumerate(config.streams):
        stream_seed = grp['SEED'] if grp['SEED'] is not None else seed + idx
        scene.streams.append(world.Stream(
            grp['NAME'], system.class_index(grp['SHAPE']), make_region(grp),
            velocity=grp['VELOCITY'], interval=grp['INTERVAL'],
            batch=grp['BATCH'], count=grp['COUNT'], mass=grp['MASS'],
            after=grp['AFTER'], tag=grp['TAG'], seed=stream_seed))
    for grp in config.particles:
        quat = np.asarray(grp['ORIENTATION'])
        system.add_particles(
            system.class_index(grp['SHAPE']), [grp['POSITION']],
            [quat / np.linalg.norm(quat)], velocities=[grp['VELOCITY']],
            omegas=[grp['OMEGA']], tag=grp['TAG'], fixed=grp['FIXED'])
    LOGGER.info("Scene %s: %d classes, %d walls, %d streams, %d particles"
                % (config.scene['NAME'], len(system.templates),
                   len(scene.walls), len(scene.streams), system.count))
    return scene


def resolve_paths(config, base_dir):
    """Copy of config with relative mesh paths made absolute against
    base_dir, so that the scene can be stored elsewhere"""
    if base_dir is None:
        return config
    raw = copy.deepcopy(config.data)
    for grp in raw['SHAPE']:
        for key in ('SURFACE', 'CELLS'):
            if grp[key] is not None:
                grp[key] = os.path.abspath(_resolve(grp[key], base_dir))
    for grp in raw['WALL']:
        if grp['MESH'] is not None:
            grp['MESH'] = os.path.abspath(_resolve(grp['MESH'], base_dir))
    return SceneConfig(raw)


def override(config, group, key, value):
    """
    Returns a new SceneConfig with key set to value in every instance of
    group (all MATERIAL groups, say). The result is validated again.
    """
    group = group.upper()
    key = key.upper()
    if group not in SCHEMA:
        raise SceneConfigError("Unknown group '%s'" % group)
    raw = copy.deepcopy(config.data)
    if group not in raw:
        raw[group] = OrderedDict()
    targets = raw[group] if isinstance(raw[group], list) else [raw[group]]
    if not targets:
        raise SceneConfigError("Scene has no %s group to set %s in"
                               % (group, key))
    for grp in targets:
        grp[key] = value
    LOGGER.debug("Override %s.%s = %r" % (group, key, value))
    return SceneConfig(raw)
