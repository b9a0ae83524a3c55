# coding: utf-8
"""
pymsdem.quatutils

Quaternion algebra for rigid-body orientations. Quaternions are numpy arrays
(w, x, y, z) with the scalar part first; all functions accept a single
quaternion of shape (4,) or a stack of shape (n, 4).
"""

from __future__ import division, print_function, absolute_import
import logging
import numpy as np

from pymsdem.demhelpers import loglevel

logging.basicConfig(level=loglevel())
LOGGER = logging.getLogger('pymsdem.quatutils')

UNIT_TOL = 1e-9
IDENTITY = np.array([1.0, 0.0, 0.0, 0.0])


def multiply(p, q):
    """Hamilton product p ⊗ q: rotation q applied first, then p"""
    p = np.asarray(p, dtype=float)
    q = np.asarray(q, dtype=float)
    pw, px, py, pz = np.moveaxis(p, -1, 0)
    qw, qx, qy, qz = np.moveaxis(q, -1, 0)
    return np.stack([
        pw * qw - px * qx - py * qy - pz * qz,
        pw * qx + px * qw + py * qz - pz * qy,
        pw * qy - px * qz + py * qw + pz * qx,
        pw * qz + px * qy - py * qx + pz * qw], axis=-1)


def conjugate(q):
    """Inverse rotation of a unit quaternion"""
    q = np.array(q, dtype=float)
    q[..., 1:] *= -1.0
    return q


def norm(q):
    """Quaternion norm"""
    q = np.asarray(q, dtype=float)
    return np.sqrt(np.einsum('...i,...i->...', q, q))


def normalize(q):
    """Returns q scaled to unit norm"""
    q = np.asarray(q, dtype=float)
    return q / norm(q)[..., None]


def is_unit(q, tol=UNIT_TOL):
    """True if every quaternion in q has unit norm within tol"""
    return bool(np.all(np.abs(norm(q) - 1.0) <= tol))


def to_matrix(q):
    """Rotation matrix (body to world) of unit quaternion(s).

    Returns shape (3, 3) for a single quaternion, (n, 3, 3) for a stack."""
    q = np.asarray(q, dtype=float)
    w, x, y, z = np.moveaxis(q, -1, 0)
    mat = np.empty(q.shape[:-1] + (3, 3))
    mat[..., 0, 0] = w * w + x * x - y * y - z * z
    mat[..., 0, 1] = 2.0 * (x * y - w * z)
    mat[..., 0, 2] = 2.0 * (x * z + w * y)
    mat[..., 1, 0] = 2.0 * (x * y + w * z)
    mat[..., 1, 1] = w * w - x * x + y * y - z * z
    mat[..., 1, 2] = 2.0 * (y * z - w * x)
    mat[..., 2, 0] = 2.0 * (x * z - w * y)
    mat[..., 2, 1] = 2.0 * (y * z + w * x)
    mat[..., 2, 2] = w * w - x * x - y * y + z * z
    return mat


def rotate(q, v):
    """Rotates vector(s) v from the body frame into the world frame.

    q (4,) with v (3,) or (m, 3); or q (n, 4) with v (n, 3)."""
    mat = to_matrix(q)
    v = np.asarray(v, dtype=float)
    if mat.ndim == 2:
        return v.dot(mat.T)
    return np.einsum('nij,nj->ni', mat, v)


def rotate_inverse(q, v):
    """Rotates vector(s) v from the world frame into the body frame"""
    return rotate(conjugate(q), v)


def from_rotation_vector(phi):
    """Exponential map: quaternion of the rotation by |phi| about phi/|phi|"""
    phi = np.asarray(phi, dtype=float)
    angle = np.sqrt(np.einsum('...i,...i->...', phi, phi))
    half = 0.5 * angle
    # sin(x/2)/x, with its series near zero
    with np.errstate(invalid='ignore', divide='ignore'):
        safe = np.where(angle > 0, angle, 1.0)
        scale = np.where(angle > 1e-8, np.sin(half) / safe,
                         0.5 - angle * angle / 48.0)
    return np.concatenate(
        [np.cos(half)[..., None], scale[..., None] * phi], axis=-1)


def from_axis_angle(axis, angle):
    """Quaternion of the rotation by angle (rad) about axis"""
    axis = np.asarray(axis, dtype=float)
    axis = axis / np.linalg.norm(axis)
    return from_rotation_vector(axis * angle)


def from_uniform(u1, u2, u3):
    """Quaternion from three uniform variates in [0, 1) by the subgroup
    algorithm; uniform on the rotation group if the variates are."""
    s1 = np.sqrt(1.0 - u1)
    s2 = np.sqrt(u1)
    t1 = 2.0 * np.pi * u2
    t2 = 2.0 * np.pi * u3
    return np.stack([s2 * np.cos(t2), s1 * np.sin(t1),
                     s1 * np.cos(t1), s2 * np.sin(t2)], axis=-1)
