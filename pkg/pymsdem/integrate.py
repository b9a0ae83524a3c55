# coding: utf-8
"""
pymsdem.integrate

Time stepping of the particle system, critical time step estimation and
rotating-wall kinematics.

Translation uses velocity-Verlet:

    X(t+dt) = X + V dt + a(t) dt^2 / 2
    V(t+dt) = V + (a(t) + a(t+dt)) dt / 2

with a(t) cached in ParticleSystem.acc. Rotation uses the same kick-drift-
kick split on the world angular momentum L: a half kick with the old
torque, an orientation update q <- q (x) exp(omega_b dt) with the body
angular velocity taken at the midpoint of the step (implicit, fixed-point
iterations), and a second half kick with the new torque. Expressed in the
body frame this integrates I w' = T_b - w x (I w), gyroscopic term
included.

A step is split in two halves around the force evaluation: predict moves
positions and orientations and sets provisional velocities, correct
completes the velocities once the new forces are known.
"""

from __future__ import division, print_function, absolute_import
from builtins import object, range
import logging

import numpy as np

from pymsdem import quatutils
from pymsdem.demhelpers import SimulationError, as_vector, loglevel

logging.basicConfig(level=loglevel())
LOGGER = logging.getLogger('pymsdem.integrate')

DEFAULT_DIVISOR = 20
DIVISOR_RANGE = (10, 100)
MIDPOINT_ITERATIONS = 3
HERTZ_CONSTANT = 2.8683


class StepPolicy(object):
    """
    Time step and gravity of a run.

    Arguments:
        dt: explicit time step, s (None: derive from the critical step)
        n_div: divisor applied to the critical time step, in [10, 100]
        gravity: gravitational acceleration, m/s^2
        deterministic (bool): reproducible output (no timestamps in logs)
    """
    def __init__(self, dt=None, n_div=DEFAULT_DIVISOR,
                 gravity=(0.0, 0.0, -9.81), deterministic=False):
        if dt is not None and not dt > 0:
            raise SimulationError("Time step must be positive, got %r" % dt)
        if not DIVISOR_RANGE[0] <= int(n_div) <= DIVISOR_RANGE[1]:
            raise SimulationError(
                "Time step divisor must be in [%d, %d], got %r"
                % (DIVISOR_RANGE + (n_div,)))
        self.dt = None if dt is None else float(dt)
        self.n_div = int(n_div)
        self.gravity = as_vector(gravity, 'gravity')
        self.deterministic = bool(deterministic)

    def resolve(self, system, speed=None):
        """The time step to use: explicit dt, or dt_c / n_div"""
        if self.dt is not None:
            return self.dt
        _, _, dt_c = critical_timestep(system, speed)
        return dt_c / self.n_div


# ==================================================================
# = critical time step
# ==================================================================
def rayleigh_time(radius, density, young, poisson):
    """T_R = pi R / K sqrt(rho / G), K = 0.8766 + 0.1631 nu"""
    shear = young / (2.0 * (1.0 + poisson))
    kfac = 0.8766 + 0.1631 * poisson
    return np.pi * radius / kfac * np.sqrt(density / shear)


def hertz_time(m_star, r_star, y_star, speed):
    """T_H = 2.8683 (m*^2 / (R* Y*^2 V))^(1/5); None for V = 0"""
    if not speed > 0:
        return None
    return HERTZ_CONSTANT * (m_star ** 2 / (r_star * y_star ** 2 * speed)) \
        ** 0.2


def critical_timestep(system, speed=None):
    """
    Rayleigh and Hertz time estimates and the critical time step.

    R is the smallest primary-sphere radius over all particle classes of
    the system. T_H is evaluated for two identical particles of the class
    owning that sphere, colliding at speed (default: the largest particle
    speed in the system). Returns (T_R, T_H, dt_c); T_H is None when the
    speed is zero and dt_c is then T_R alone.
    """
    if not system.templates:
        raise SimulationError("No particle classes to estimate a time step")
    best = None
    for tmpl, mat in zip(system.templates, system.materials):
        rmin = float(tmpl.ms.radii.min())
        t_r = rayleigh_time(rmin, mat.density, mat.young, mat.poisson)
        if best is None or rmin < best[0] or (rmin == best[0] and
                                              t_r < best[1]):
            best = (rmin, t_r, tmpl, mat)
    rmin, t_r, tmpl, mat = best
    if speed is None:
        speed = float(np.max(np.linalg.norm(system.vel, axis=1))) \
            if system.count else 0.0
    y_star = mat.young / (2.0 * (1.0 - mat.poisson ** 2))
    t_h = hertz_time(0.5 * tmpl.mass, 0.5 * rmin, y_star, speed)
    dt_c = t_r if t_h is None else min(t_r, t_h)
    LOGGER.debug("Critical time step: T_R=%g, T_H=%r, dt_c=%g"
                 % (t_r, t_h, dt_c))
    return t_r, t_h, dt_c


# ==================================================================
# = walls
# ==================================================================
def advance_walls(walls, t, dt):
    """Rotates spinning walls over [t, t + dt]. Wall geometry is
    recomputed from its reference pose, so full periods close exactly."""
    for wall in walls:
        if wall.active:
            wall.advance(dt)
    LOGGER.debug("Walls advanced to t=%g" % (t + dt))


# ==================================================================
# = particle integration
# ==================================================================
def body_angular_velocity(quat, inertia, momentum):
    """omega_b = I^-1 R(q)^T L"""
    return quatutils.rotate_inverse(quat, momentum) / inertia


def world_momentum(quat, inertia, omega):
    """L = R diag(I) R^T omega"""
    return quatutils.rotate(quat, quatutils.rotate_inverse(quat, omega) *
                            inertia)


def world_angular_velocity(quat, inertia, momentum):
    return quatutils.rotate(quat, body_angular_velocity(quat, inertia,
                                                        momentum))


class VerletIntegrator(object):
    """
    Velocity-Verlet translation and kick-drift-kick rotation of all free
    (non-fixed) particles of a system. Fixed particles are held at rest.

    Arguments:
        gravity: gravitational acceleration, m/s^2
    """
    def __init__(self, gravity=(0.0, 0.0, -9.81)):
        self.gravity = as_vector(gravity, 'gravity')
        self._momentum = None

    def accelerations(self, system):
        """f_acc / m + g for free particles, zero for fixed ones"""
        acc = system.force / system.mass[:, None] + self.gravity
        acc[system.fixed] = 0.0
        return acc

    def initialize(self, system, start=0):
        """Sets a(t) of particles start.. from their current accumulators"""
        if system.count > start:
            system.acc[start:] = self.accelerations(system)[start:]

    def predict_translation(self, system, dt):
        free = ~system.fixed
        acc = system.acc[free]
        system.pos[free] += system.vel[free] * dt + 0.5 * acc * dt * dt
        system.vel[free] += 0.5 * acc * dt
        system.vel[system.fixed] = 0.0

    def correct_translation(self, system, dt):
        free = ~system.fixed
        acc = self.accelerations(system)
        system.vel[free] += 0.5 * acc[free] * dt
        system.acc[:] = acc

    def predict_rotation(self, system, dt):
        free = ~system.fixed
        quat = system.quat[free]
        inertia = system.inertia[free]
        momentum = world_momentum(quat, inertia, system.omega[free]) + \
            0.5 * dt * system.torque[free]
        omega_b = body_angular_velocity(quat, inertia, momentum)
        for _ in range(MIDPOINT_ITERATIONS):
            q_mid = quatutils.multiply(
                quat, quatutils.from_rotation_vector(0.5 * dt * omega_b))
            omega_b = body_angular_velocity(q_mid, inertia, momentum)
        q_new = quatutils.normalize(quatutils.multiply(
            quat, quatutils.from_rotation_vector(dt * omega_b)))
        system.quat[free] = q_new
        system.omega[free] = world_angular_velocity(q_new, inertia, momentum)
        system.omega[system.fixed] = 0.0
        self._momentum = momentum

    def correct_rotation(self, system, dt):
        if self._momentum is None:
            raise SimulationError("Rotation corrected without a prediction")
        free = ~system.fixed
        momentum = self._momentum + 0.5 * dt * system.torque[free]
        system.omega[free] = world_angular_velocity(
            system.quat[free], system.inertia[free], momentum)
        self._momentum = None

    def predict(self, system, dt):
        """First half of a step: positions and orientations at t + dt,
        provisional velocities for the force evaluation"""
        if system.count == 0:
            return
        self.predict_translation(system, dt)
        self.predict_rotation(system, dt)

    def correct(self, system, dt):
        """Second half of a step, after the forces at t + dt are known"""
        if system.count == 0:
            return
        self.correct_translation(system, dt)
        self.correct_rotation(system, dt)


def step_translation(system, dt, gravity=(0.0, 0.0, 0.0), force_fn=None):
    """One velocity-Verlet step of the translational state. force_fn
    (system) refills the force accumulators at the new positions; without
    it the forces are held constant."""
    integ = VerletIntegrator(gravity)
    integ.predict_translation(system, dt)
    if force_fn is not None:
        force_fn(system)
    integ.correct_translation(system, dt)


def step_rotation(system, dt, torque_fn=None):
    """One kick-drift-kick step of the rotational state. torque_fn
    (system) refills the torque accumulators at the new orientations;
    without it the torques are held constant."""
    integ = VerletIntegrator()
    integ.predict_rotation(system, dt)
    if torque_fn is not None:
        torque_fn(system)
    integ.correct_rotation(system, dt)
