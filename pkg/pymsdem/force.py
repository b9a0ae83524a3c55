# coding: utf-8
"""
pymsdem.force

Hertz-Mindlin contact forces between primary spheres and between primary
spheres and walls.

The normal force is a nonlinear spring with viscous damping:

    k_n = 4/3 Y* sqrt(R* |d_n|),   gamma_n = sqrt(5) |beta| sqrt(m* k_n)
    F_n = k_n |d_n| n - gamma_n V_n

The tangential force is a spring on the accumulated tangential displacement
delta_t (the contact history) with k_t = 2/7 k_n, gamma_t = gamma_n / 2,
truncated at the Coulomb limit mu |F_n|. An optional rolling resistance
torque -mu_roll |F_n| R* omega_rel/|omega_rel| acts on both bodies.

Each touching primary-sphere pair (or sphere-wall feature pair) carries its
own force and history entry.
"""

from __future__ import division, print_function, absolute_import
from builtins import object
import logging

import numpy as np

from pymsdem.contact import pair_key, wall_key
from pymsdem.demhelpers import ForceError, loglevel, rowdot, rownorm

logging.basicConfig(level=loglevel())
LOGGER = logging.getLogger('pymsdem.force')

TANGENTIAL_STIFFNESS_RATIO = 2.0 / 7.0
TANGENTIAL_DAMPING_RATIO = 0.5


def damping_beta(restitution):
    """beta = ln e / sqrt(ln^2 e + pi^2), zero for e = 1"""
    restitution = np.asarray(restitution, dtype=float)
    if np.any(restitution <= 0.0):
        raise ForceError(
            "Coefficient of restitution must be positive, got %r"
            % (restitution,))
    lne = np.log(restitution)
    return lne / np.sqrt(lne * lne + np.pi * np.pi)


class EffectivePair(object):
    """
    Effective properties of one contact.

    Arguments:
        Y_star: effective Young's modulus, Pa
        R_star: effective radius, m
        m_star: effective mass, kg
        beta: damping parameter from the restitution coefficient (<= 0)
        mu_fric: sliding friction coefficient
        mu_roll: rolling friction coefficient
    """
    def __init__(self, Y_star, R_star, m_star, beta, mu_fric=0.0,
                 mu_roll=0.0):
        if not (Y_star > 0 and R_star > 0 and m_star > 0):
            raise ForceError(
                "Effective modulus, radius and mass must be positive: "
                "Y*=%r, R*=%r, m*=%r" % (Y_star, R_star, m_star))
        if beta > 0:
            raise ForceError("beta must be <= 0, got %r" % beta)
        if mu_fric < 0 or mu_roll < 0:
            raise ForceError("Friction coefficients must be >= 0")
        self.Y_star = float(Y_star)
        self.R_star = float(R_star)
        self.m_star = float(m_star)
        self.beta = float(beta)
        self.mu_fric = float(mu_fric)
        self.mu_roll = float(mu_roll)

    def __repr__(self):
        return ("EffectivePair(Y*=%g, R*=%g, m*=%g, beta=%g, mu=%g, "
                "mu_roll=%g)" % (self.Y_star, self.R_star, self.m_star,
                                 self.beta, self.mu_fric, self.mu_roll))


def _harmonic(a, b):
    """1 / (1/a + 1/b), with infinite b dropping out"""
    return 1.0 / (1.0 / a + 1.0 / b)


def effective_pair(mat_i, mat_j, R_i, R_j, m_i, m_j, pairing='pp'):
    """
    Effective contact properties of body i against body j.

    For a wall pass the wall material as mat_j and numpy.inf for R_j and
    m_j. R_i and R_j are the contact radii of the touching primary
    spheres as chosen by the template's curvature model (see
    contact_radius). Restitution and friction coefficients of the two
    materials are averaged; pairing 'pp' uses mu_pp, 'pw' uses mu_pw.
    """
    if pairing not in ('pp', 'pw'):
        raise ForceError("Unknown pairing '%s'" % pairing)
    inv_y = ((1.0 - mat_i.poisson ** 2) / mat_i.young +
             (1.0 - mat_j.poisson ** 2) / mat_j.young)
    restitution = 0.5 * (mat_i.restitution + mat_j.restitution)
    if pairing == 'pp':
        mu = 0.5 * (mat_i.mu_pp + mat_j.mu_pp)
    else:
        mu = 0.5 * (mat_i.mu_pw + mat_j.mu_pw)
    return EffectivePair(
        1.0 / inv_y, _harmonic(R_i, R_j), _harmonic(m_i, m_j),
        float(damping_beta(restitution)), mu,
        0.5 * (mat_i.mu_roll + mat_j.mu_roll))


def contact_radius(template, local_index):
    """Contact radius of a template's primary sphere: the sphere radius
    under the 'sph' curvature model, the equal-volume radius under 'eq'"""
    return float(template.contact_radii()[local_index])


# ==================================================================
# = contact history
# ==================================================================
class ContactHistory(object):
    """
    Accumulated tangential displacement per contact, keyed by int64 pair
    keys (see contact.pair_key and contact.wall_key).

    Entries written with touch during a step replace the store at
    end_step; entries not touched are purged, so a pair that separates
    starts again from zero.
    """
    def __init__(self):
        self.keys = np.zeros(0, dtype=np.int64)
        self.delta = np.zeros((0, 3))
        self._pending = []

    def __len__(self):
        return len(self.keys)

    def __contains__(self, key):
        idx = np.searchsorted(self.keys, key)
        return bool(idx < len(self.keys) and self.keys[idx] == key)

    def lookup(self, keys):
        """delta_t of the given keys, zero for unknown keys"""
        keys = np.atleast_1d(np.asarray(keys, dtype=np.int64))
        out = np.zeros((len(keys), 3))
        if len(self.keys) == 0 or len(keys) == 0:
            return out
        idx = np.clip(np.searchsorted(self.keys, keys), 0,
                      len(self.keys) - 1)
        found = self.keys[idx] == keys
        out[found] = self.delta[idx[found]]
        return out

    def get(self, key):
        return self.lookup([key])[0]

    def touch(self, keys, delta):
        """Records updated delta_t for contacts active this step"""
        keys = np.atleast_1d(np.asarray(keys, dtype=np.int64))
        if len(keys):
            self._pending.append(
                (keys, np.asarray(delta, dtype=float).reshape(-1, 3)))

    def end_step(self):
        """Replaces the store by the entries touched this step"""
        if self._pending:
            keys = np.concatenate([k for k, _ in self._pending])
            delta = np.concatenate([d for _, d in self._pending])
            order = np.argsort(keys, kind='stable')
            self.keys = keys[order]
            self.delta = delta[order]
        else:
            self.keys = np.zeros(0, dtype=np.int64)
            self.delta = np.zeros((0, 3))
        self._pending = []

    def discard(self):
        """Drops this step's updates and keeps the stored history"""
        self._pending = []


def history_key(key):
    """int64 history key from (gid_i, gid_j) or (gid, wall, feature)"""
    if np.ndim(key) == 0:
        return int(key)
    if len(key) == 2:
        return int(pair_key(key[0], key[1]))
    if len(key) == 3:
        return int(wall_key(key[0], key[1], key[2]))
    raise ForceError("Cannot build a history key from %r" % (key,))


# ==================================================================
# = force kernels (arrays of contacts)
# ==================================================================
def rotate_history(delta, normal):
    """Projects delta_t onto the plane normal to n and rescales it to its
    previous length"""
    delta = np.atleast_2d(delta)
    normal = np.atleast_2d(normal)
    proj = delta - rowdot(delta, normal)[:, None] * normal
    old = rownorm(delta)
    new = rownorm(proj)
    scale = np.where(new > 0.0, old / np.where(new > 0.0, new, 1.0), 0.0)
    return proj * scale[:, None]


def split_velocity(v_rel, normal):
    """Normal and tangential parts of relative velocities"""
    v_rel = np.atleast_2d(v_rel)
    normal = np.atleast_2d(normal)
    v_n = rowdot(v_rel, normal)[:, None] * normal
    return v_n, v_rel - v_n


def normal_kernel(d_n, normal, v_n, y_star, r_star, m_star, beta):
    """Normal forces, stiffness and damping coefficients"""
    overlap = -np.asarray(d_n, dtype=float)
    k_n = 4.0 / 3.0 * y_star * np.sqrt(r_star * overlap)
    g_n = np.sqrt(5.0) * np.abs(beta) * np.sqrt(m_star * k_n)
    f_n = (k_n * overlap)[:, None] * normal - g_n[:, None] * v_n
    return f_n, k_n, g_n


def tangential_kernel(normal, v_t, delta, k_n, g_n, f_n_mag, mu, dt):
    """Tangential forces with Coulomb truncation and the updated
    tangential displacements"""
    k_t = TANGENTIAL_STIFFNESS_RATIO * k_n
    g_t = TANGENTIAL_DAMPING_RATIO * g_n
    delta = rotate_history(delta, normal) - v_t * dt
    f_t = k_t[:, None] * delta - g_t[:, None] * v_t
    cap = mu * f_n_mag
    slide = rownorm(f_t) >= cap
    if np.any(slide):
        vt_mag = rownorm(v_t[slide])
        d_mag = rownorm(delta[slide])
        with np.errstate(invalid='ignore', divide='ignore'):
            vt_dir = v_t[slide] / np.where(vt_mag > 0, vt_mag, 1.0)[:, None]
            d_dir = delta[slide] / np.where(d_mag > 0, d_mag, 1.0)[:, None]
        csl = cap[slide][:, None]
        # opposite to the sliding velocity, along delta_t when it vanishes
        f_t[slide] = np.where((vt_mag > 0)[:, None], -csl * vt_dir,
                              csl * d_dir)
        delta[slide] = csl / k_t[slide][:, None] * d_dir
    return f_t, delta


def rolling_kernel(w_rel, f_n_mag, r_star, mu_roll):
    """Rolling resistance torques on body i"""
    w_rel = np.atleast_2d(w_rel)
    w_mag = rownorm(w_rel)
    w_dir = w_rel / np.where(w_mag > 0, w_mag, 1.0)[:, None]
    return -(mu_roll * f_n_mag * r_star)[:, None] * w_dir


# ==================================================================
# = single-contact operations
# ==================================================================
def normal_force(geom, V_n, pair):
    """Hertz normal force of one contact on body i"""
    if not geom.d_n < 0:
        raise ForceError("Normal force needs an overlapping contact")
    f_n, _, _ = normal_kernel(
        np.atleast_1d(geom.d_n), np.atleast_2d(geom.normal),
        np.atleast_2d(V_n), pair.Y_star, pair.R_star, pair.m_star, pair.beta)
    return f_n[0]


def tangential_force(geom, V_t, history, pair, dt, f_n):
    """
    Tangential force of one contact and its history update.

    f_n is the normal force vector (or its magnitude) of the same contact.
    The previous delta_t of geom.key is read from history (zero when
    absent), and the updated value is recorded with history.touch.
    Returns (F_t, history).
    """
    if not geom.d_n < 0:
        raise ForceError("Tangential force needs an overlapping contact")
    key = history_key(geom.key)
    overlap = -geom.d_n
    k_n = 4.0 / 3.0 * pair.Y_star * np.sqrt(pair.R_star * overlap)
    g_n = np.sqrt(5.0) * abs(pair.beta) * np.sqrt(pair.m_star * k_n)
    f_n_mag = float(np.linalg.norm(f_n))
    f_t, delta = tangential_kernel(
        np.atleast_2d(geom.normal), np.atleast_2d(V_t),
        history.lookup([key]), np.atleast_1d(k_n), np.atleast_1d(g_n),
        np.atleast_1d(f_n_mag), pair.mu_fric, dt)
    history.touch([key], delta)
    return f_t[0], history


def relative_velocity(v_i, w_i, c_i, point, normal, v_j=None, w_j=None,
                      c_j=None, wall_velocity=None):
    """
    Velocity of body i relative to body j at the contact point(s).

    Body j is either a particle (v_j, w_j, c_j) or a wall whose surface
    velocity at the contact point is wall_velocity (zero if omitted).
    Returns (V_rel, V_n, V_t).
    """
    point = np.atleast_2d(point)
    vel = np.atleast_2d(v_i) + np.cross(np.atleast_2d(w_i),
                                        point - np.atleast_2d(c_i))
    if v_j is not None:
        vel = vel - (np.atleast_2d(v_j) + np.cross(
            np.atleast_2d(w_j), point - np.atleast_2d(c_j)))
    elif wall_velocity is not None:
        vel = vel - np.atleast_2d(wall_velocity)
    v_n, v_t = split_velocity(vel, normal)
    return vel, v_n, v_t


def accumulate(system, owner_i, force, point, owner_j=None, torque=None):
    """
    Adds contact forces (and optional extra torques) to the accumulators.

    Body i receives force and (p_c - C_i) x force; body j, if given,
    receives -force and (p_c - C_j) x (-force). Walls absorb the reaction.
    Contributions are added in array order, so sorted contacts give
    reproducible sums.
    """
    owner_i = np.atleast_1d(owner_i)
    force = np.atleast_2d(force)
    point = np.atleast_2d(point)
    if torque is not None:
        torque = np.atleast_2d(torque)
    np.add.at(system.force, owner_i, force)
    np.add.at(system.torque, owner_i,
              np.cross(point - system.pos[owner_i], force))
    if torque is not None:
        np.add.at(system.torque, owner_i, torque)
    if owner_j is not None:
        owner_j = np.atleast_1d(owner_j)
        np.add.at(system.force, owner_j, -force)
        np.add.at(system.torque, owner_j,
                  np.cross(point - system.pos[owner_j], -force))
        if torque is not None:
            np.add.at(system.torque, owner_j, -torque)


def rolling_resistance(w_rel, f_n_mag, pair):
    """Rolling resistance torque on body i (zero for mu_roll = 0 or
    omega_rel = 0)"""
    return rolling_kernel(np.atleast_2d(w_rel), np.atleast_1d(f_n_mag),
                          np.atleast_1d(pair.R_star), pair.mu_roll)[0]


# ==================================================================
# = all contacts of a step
# ==================================================================
class ContactForces(object):
    """Forces of one step: normal and tangential force on body i for
    every particle-particle (pp_*) and sphere-wall (pw_*) contact"""
    def __init__(self, contacts, pp_fn, pp_ft, pw_fn, pw_ft):
        self.contacts = contacts
        self.pp_fn = pp_fn
        self.pp_ft = pp_ft
        self.pw_fn = pw_fn
        self.pw_ft = pw_ft


class ForceModel(object):
    """
    Hertz-Mindlin force evaluation over a contact.ContactSet.

    Arguments:
        rolling (bool): apply rolling resistance torques
    """
    def __init__(self, rolling=False):
        self.rolling = bool(rolling)
        self.pp_history = ContactHistory()
        self.pw_history = ContactHistory()

    @staticmethod
    def _class_table(system):
        mats = system.materials
        return {
            'yterm': np.array([(1.0 - m.poisson ** 2) / m.young
                               for m in mats]),
            'e': np.array([m.restitution for m in mats]),
            'mu_pp': np.array([m.mu_pp for m in mats]),
            'mu_pw': np.array([m.mu_pw for m in mats]),
            'mu_roll': np.array([m.mu_roll for m in mats]),
        }

    def compute(self, system, walls, contacts, dt, commit=True):
        """
        Zeroes the accumulators and adds all contact forces and torques.

        With commit=False the contact histories are left unchanged (used
        for the initial force evaluation of a run). Returns ContactForces.
        """
        system.clear_accumulators()
        empty = np.zeros((0, 3))
        pp_fn = pp_ft = pw_fn = pw_ft = empty
        if system.count == 0:
            return ContactForces(contacts, pp_fn, pp_ft, pw_fn, pw_ft)
        table = self._class_table(system)
        if contacts.npp:
            pp_fn, pp_ft = self._particle_particle(system, contacts, table,
                                                   dt)
        if contacts.npw:
            pw_fn, pw_ft = self._particle_wall(system, walls, contacts,
                                               table, dt)
        if commit:
            self.pp_history.end_step()
            self.pw_history.end_step()
        else:
            self.pp_history.discard()
            self.pw_history.discard()
        return ContactForces(contacts, pp_fn, pp_ft, pw_fn, pw_ft)

    def _particle_particle(self, system, contacts, table, dt):
        gi, gj = contacts.pp_i, contacts.pp_j
        oi = system.sphere_owner[gi]
        oj = system.sphere_owner[gj]
        ci = system.cls[oi]
        cj = system.cls[oj]
        y_star = 1.0 / (table['yterm'][ci] + table['yterm'][cj])
        r_star = _harmonic(system.sphere_rcontact[gi],
                           system.sphere_rcontact[gj])
        m_star = _harmonic(system.mass[oi], system.mass[oj])
        beta = damping_beta(0.5 * (table['e'][ci] + table['e'][cj]))
        mu = 0.5 * (table['mu_pp'][ci] + table['mu_pp'][cj])
        normal = contacts.pp_normal
        point = contacts.pp_point
        _, v_n, v_t = relative_velocity(
            system.vel[oi], system.omega[oi], system.pos[oi], point, normal,
            v_j=system.vel[oj], w_j=system.omega[oj], c_j=system.pos[oj])
        f_n, k_n, g_n = normal_kernel(contacts.pp_dn, normal, v_n, y_star,
                                      r_star, m_star, beta)
        f_n_mag = rownorm(f_n)
        keys = contacts.pp_key
        f_t, delta = tangential_kernel(
            normal, v_t, self.pp_history.lookup(keys), k_n, g_n, f_n_mag, mu,
            dt)
        self.pp_history.touch(keys, delta)
        torque = None
        if self.rolling:
            mu_roll = 0.5 * (table['mu_roll'][ci] + table['mu_roll'][cj])
            torque = rolling_kernel(system.omega[oi] - system.omega[oj],
                                    f_n_mag, r_star, mu_roll)
        accumulate(system, oi, f_n + f_t, point, owner_j=oj, torque=torque)
        return f_n, f_t

    def _particle_wall(self, system, walls, contacts, table, dt):
        byid = dict((wall.id, wall) for wall in walls)
        gid = contacts.pw_gid
        oi = system.sphere_owner[gid]
        ci = system.cls[oi]
        wids = contacts.pw_wall
        nwall = len(gid)
        w_yterm = np.empty(nwall)
        w_e = np.empty(nwall)
        w_mu = np.empty(nwall)
        w_roll = np.empty(nwall)
        w_vel = np.zeros((nwall, 3))
        w_omega = np.zeros((nwall, 3))
        for wid in np.unique(wids):
            wall = byid[int(wid)]
            sel = wids == wid
            mat = wall.material
            w_yterm[sel] = (1.0 - mat.poisson ** 2) / mat.young
            w_e[sel] = mat.restitution
            w_mu[sel] = mat.mu_pw
            w_roll[sel] = mat.mu_roll
            if wall.rotating:
                w_vel[sel] = wall.velocity_at(contacts.pw_point[sel])
                w_omega[sel] = wall.omega
        y_star = 1.0 / (table['yterm'][ci] + w_yterm)
        r_star = system.sphere_rcontact[gid]
        m_star = system.mass[oi]
        beta = damping_beta(0.5 * (table['e'][ci] + w_e))
        mu = 0.5 * (table['mu_pw'][ci] + w_mu)
        normal = contacts.pw_normal
        point = contacts.pw_point
        _, v_n, v_t = relative_velocity(
            system.vel[oi], system.omega[oi], system.pos[oi], point, normal,
            wall_velocity=w_vel)
        f_n, k_n, g_n = normal_kernel(contacts.pw_dn, normal, v_n, y_star,
                                      r_star, m_star, beta)
        f_n_mag = rownorm(f_n)
        keys = contacts.pw_key
        f_t, delta = tangential_kernel(
            normal, v_t, self.pw_history.lookup(keys), k_n, g_n, f_n_mag, mu,
            dt)
        self.pw_history.touch(keys, delta)
        torque = None
        if self.rolling:
            mu_roll = 0.5 * (table['mu_roll'][ci] + w_roll)
            torque = rolling_kernel(system.omega[oi] - w_omega, f_n_mag,
                                    r_star, mu_roll)
        accumulate(system, oi, f_n + f_t, point, torque=torque)
        return f_n, f_t
