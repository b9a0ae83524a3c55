#!/usr/bin/env python
# encoding: utf-8
"""
test_contact.py
"""

from __future__ import division, print_function, absolute_import
import pytest
import numpy as np
from pymsdem import contact, neighbor, world, shape, quatutils
from pymsdem.meshes import SurfaceMesh
from pymsdem.demhelpers import ContactError

TRIANGLE = ([0, 0, 0], [1, 0, 0], [0, 1, 0])
SQUARE_VERTICES = [[0, 0, 0], [1, 0, 0], [1, 1, 0], [0, 1, 0]]
SQUARE_TRIANGLES = [[0, 1, 2], [0, 2, 3]]


@pytest.fixture
def scene():
    glass = world.Material('glass', 1e10, 0.3, density=2500.0)
    desc = shape.ShapeDescriptor('sphere', {'r': 0.001}, 1)
    system = world.ParticleSystem()
    system.add_class(shape.ShapeTemplate('bead', desc, 2500.0), glass)
    return world.Scene(system)


def resolve(scene):
    manager = neighbor.NeighborManager(k=2.0)
    nlist = manager.update(scene.system, scene.walls, 1e-7, 0)
    return contact.narrow_phase(scene.system, scene.walls, nlist)


def test_sphere_sphere():
    geom = contact.sphere_sphere([0, 0, 0], 1.0, [1.5, 0, 0], 1.0,
                                 key=(0, 1))
    assert np.isclose(geom.d_n, -0.5)
    assert np.allclose(geom.normal, [-1, 0, 0])
    assert np.allclose(geom.point, [1, 0, 0])
    assert geom.key == (0, 1)
    assert contact.sphere_sphere([0, 0, 0], 1.0, [2.5, 0, 0], 1.0) is None
    # touching is not a contact
    assert contact.sphere_sphere([0, 0, 0], 1.0, [2.0, 0, 0], 1.0) is None
    with pytest.raises(ContactError):
        contact.sphere_sphere([1, 1, 1], 1.0, [1, 1, 1], 0.5)


def test_sphere_sphere_is_antisymmetric():
    rng = np.random.Generator(np.random.PCG64(2))
    c_i = rng.random((50, 3))
    c_j = c_i + 0.1 * (rng.random((50, 3)) - 0.5)
    r_i = np.full(50, 0.05)
    r_j = np.full(50, 0.04)
    dn_ij, n_ij, _ = contact.batch_sphere_sphere(c_i, r_i, c_j, r_j)
    dn_ji, n_ji, _ = contact.batch_sphere_sphere(c_j, r_j, c_i, r_i)
    assert np.allclose(dn_ij, dn_ji)
    assert np.allclose(n_ij, -n_ji)
    assert np.allclose(np.linalg.norm(n_ij, axis=1), 1.0)


def test_sphere_plane():
    geom = contact.sphere_plane([0, 0, 0.5], 1.0, [0, 0, 0], [0, 0, 1])
    assert np.isclose(geom.d_n, -0.5)
    assert np.allclose(geom.normal, [0, 0, 1])
    assert np.allclose(geom.point, [0, 0, -0.5])
    below = contact.sphere_plane([0, 0, -0.5], 1.0, [0, 0, 0], [0, 0, 1])
    assert np.allclose(below.normal, [0, 0, -1])
    assert contact.sphere_plane([0, 0, 2.0], 1.0, [0, 0, 0],
                                [0, 0, 1]) is None
    with pytest.raises(ContactError):
        contact.sphere_plane([0, 0, 0.5], 1.0, [0, 0, 0], [0, 0, 2])


def test_sphere_cylinder():
    inner = contact.sphere_cylinder([0.8, 0, 3.0], 0.3, 1.0, [0, 0, 0],
                                    [0, 0, 1])
    assert np.isclose(inner.d_n, -0.1)
    assert np.allclose(inner.normal, [-1, 0, 0])
    assert np.allclose(inner.point, [1.1, 0, 3.0])
    outer = contact.sphere_cylinder([1.2, 0, 0], 0.3, 1.0, [0, 0, 0],
                                    [0, 0, 1], inside=False)
    assert np.isclose(outer.d_n, -0.1)
    assert np.allclose(outer.normal, [1, 0, 0])
    assert contact.sphere_cylinder([0, 0, 0], 0.3, 1.0, [0, 0, 0],
                                   [0, 0, 1]) is None
    with pytest.raises(ContactError):
        contact.sphere_cylinder([0, 0, 0], 0.3, 1.0, [0, 0, 0], [0, 0, 1],
                                inside=False)
    with pytest.raises(ContactError):
        contact.sphere_cylinder([0, 0, 0], 0.3, 1.0, [0, 0, 1], [0, 0, 1])


@pytest.mark.parametrize('center,closest,feature', [
    ([0.2, 0.2, 0.5], [0.2, 0.2, 0], contact.FACE),
    ([-0.3, -0.3, 0], [0, 0, 0], contact.VERT_A),
    ([1.5, -0.2, 0], [1, 0, 0], contact.VERT_B),
    ([-0.2, 1.5, 0], [0, 1, 0], contact.VERT_C),
    ([0.5, -0.5, 0], [0.5, 0, 0], contact.EDGE_AB),
    ([1.0, 1.0, 0], [0.5, 0.5, 0], contact.EDGE_BC),
    ([-0.5, 0.5, 0], [0, 0.5, 0], contact.EDGE_CA),
])
def test_closest_point_features(center, closest, feature):
    q, feat = contact.closest_point_on_triangles([center], [TRIANGLE])
    assert np.allclose(q[0], closest)
    assert feat[0] == feature


def test_closest_point_beats_samples():
    rng = np.random.Generator(np.random.PCG64(9))
    corners = np.array(TRIANGLE, dtype=float)
    uv = rng.random((4000, 2))
    uv[uv.sum(axis=1) > 1] = 1 - uv[uv.sum(axis=1) > 1]
    samples = corners[0] + uv[:, :1] * (corners[1] - corners[0]) + \
        uv[:, 1:] * (corners[2] - corners[0])
    points = 3.0 * (rng.random((100, 3)) - 0.3)
    q, _ = contact.closest_point_on_triangles(
        points, np.broadcast_to(corners, (100, 3, 3)))
    best = np.linalg.norm(q - points, axis=1)
    for pnt, dist in zip(points, best):
        assert dist <= np.min(np.linalg.norm(samples - pnt, axis=1)) + 1e-12


def test_sphere_triangle():
    geom = contact.sphere_triangle([0.2, 0.2, 0.5], 1.0, *TRIANGLE)
    assert np.isclose(geom.d_n, -0.5)
    assert np.allclose(geom.normal, [0, 0, 1])
    assert geom.feature == contact.FACE
    edge = contact.sphere_triangle([0.5, -0.5, 0], 1.0, *TRIANGLE)
    assert np.isclose(edge.d_n, -0.5)
    assert np.allclose(edge.normal, [0, -1, 0])
    assert edge.feature == contact.EDGE_AB
    assert contact.sphere_triangle([0.2, 0.2, 2.0], 1.0, *TRIANGLE) is None
    with pytest.raises(ContactError):
        contact.sphere_triangle([0, 0, 1], 1.0, [0, 0, 0], [1, 0, 0],
                                [2, 0, 0])


def test_sphere_on_triangle_uses_prior_side():
    geom = contact.sphere_triangle([0.2, 0.2, 0], 0.1, *TRIANGLE,
                                   prior=[0.2, 0.2, -1.0])
    assert np.isclose(geom.d_n, -0.1)
    assert np.allclose(geom.normal, [0, 0, -1])


def test_keys_are_ordered():
    keys = contact.pair_key([1, 1, 2], [2, 3, 0])
    assert np.all(np.diff(keys) > 0)
    wkeys = contact.wall_key([0, 0, 1], [0, 1, 0], [5, 0, 0])
    assert np.all(np.diff(wkeys) > 0)
    with pytest.raises(ContactError):
        contact.wall_key([0], [256], [0])


def test_narrow_phase_particles_and_plane(scene):
    system = scene.system
    scene.add_wall(world.PlaneWall((0, 0, 0), (0, 0, 1),
                                   system.materials[0]))
    system.add_particles(0, [[0, 0, 0.0008], [0.0015, 0, 0.01],
                             [0, 0, 0.01]], [quatutils.IDENTITY] * 3)
    contacts = resolve(scene)
    assert contacts.npp == 1
    assert (contacts.pp_i[0], contacts.pp_j[0]) == (1, 2)
    assert np.isclose(contacts.pp_dn[0], -0.0005)
    assert np.allclose(contacts.pp_normal[0], [1, 0, 0])
    assert contacts.npw == 1
    assert contacts.pw_gid[0] == 0
    assert np.isclose(contacts.pw_dn[0], -0.0002)
    assert len(contacts) == 2


def test_narrow_phase_skips_inactive_walls(scene):
    system = scene.system
    gate = scene.add_wall(world.PlaneWall(
        (0, 0, 0), (0, 0, 1), system.materials[0], barrier=True))
    system.add_particles(0, [[0, 0, 0.0008]], [quatutils.IDENTITY])
    manager = neighbor.NeighborManager(k=2.0)
    nlist = manager.update(system, scene.walls, 1e-7, 0)
    gate.release()
    assert contact.narrow_phase(system, scene.walls, nlist).npw == 0


@pytest.mark.parametrize('center,nfound,feature', [
    ([0.25, 0.1, 0.0005], 1, 0),
    ([0.5, 0.5, 0.0005], 1, None),
    ([-0.0003, -0.0003, 0.0005], 1, None),
])
def test_mesh_contacts_are_unique(scene, center, nfound, feature):
    system = scene.system
    wall = scene.add_wall(world.MeshWall(
        SurfaceMesh(SQUARE_VERTICES, SQUARE_TRIANGLES),
        system.materials[0]))
    system.add_particles(0, [center], [quatutils.IDENTITY])
    contacts = resolve(scene)
    assert contacts.npw == nfound
    assert np.allclose(contacts.pw_normal[0], [0, 0, 1], atol=0.5)
    if feature is not None:
        assert contacts.pw_feature[0] == feature
    else:
        assert contacts.pw_feature[0] >= len(wall.triangles)
