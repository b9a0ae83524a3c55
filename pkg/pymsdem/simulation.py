# coding: utf-8
"""
pymsdem.simulation

The driver loop. Every step runs, in this order:

    advance walls -> stream insertion -> predict positions and orientations
    -> neighbor maintenance -> narrow phase -> forces -> velocity correction
    -> blow-up check -> settlement / release check -> output

A run writes into its output directory the normalized scene (scene.cfg),
the step log (steplog.txt) and the snapshot files of pymsdem.output.
"""

from __future__ import division, print_function, absolute_import
from builtins import object, range
import os
import logging

import numpy as np

from pymsdem import scene as scenemod
from pymsdem.analysis import SettlementMonitor, mean_speed
from pymsdem.contact import narrow_phase
from pymsdem.demhelpers import SimulationError, loglevel
from pymsdem.force import ForceModel
from pymsdem.integrate import (StepPolicy, VerletIntegrator, advance_walls,
                               critical_timestep)
from pymsdem.neighbor import NeighborManager
from pymsdem.output import OutputManager

logging.basicConfig(level=loglevel())
LOGGER = logging.getLogger('pymsdem.simulation')

STEPLOG = 'steplog.txt'
SCENEFILE = 'scene.cfg'
LOGFORMAT = '%(asctime)s %(name)s %(levelname)s: %(message)s'
DETERMINISTIC_LOGFORMAT = '%(name)s %(levelname)s: %(message)s'


def _stream_speed(config):
    speeds = [np.linalg.norm(grp['VELOCITY']) for grp in config.streams]
    speeds += [np.linalg.norm(grp['VELOCITY']) for grp in config.particles]
    return float(max(speeds)) if speeds else 0.0


def step_policy(config):
    step = config.step
    return StepPolicy(dt=step['DT'], n_div=step['N_DIV'],
                      gravity=step['GRAVITY'],
                      deterministic=step['DETERMINISTIC'])


def estimate_dt(config, base_dir=None):
    """
    Critical time step of a scene.

    Returns (T_R, T_H, dt_c, dt) where dt is the step the run would use.
    T_H uses the largest initial particle or stream speed; it is None when
    everything starts at rest.
    """
    system, _ = scenemod.build_classes(config, base_dir)
    speed = _stream_speed(config)
    t_r, t_h, dt_c = critical_timestep(system, speed)
    return t_r, t_h, dt_c, step_policy(config).resolve(system, speed)


class Simulation(object):
    """
    One run of a scene.

    Arguments:
        config: SceneConfig
        outdir: output directory (None: no files are written)
        base_dir: directory against which relative mesh paths resolve
    """
    def __init__(self, config, outdir=None, base_dir=None):
        self.config = config
        self.outdir = outdir
        self.scene = scenemod.build_world(config, base_dir)
        self.system = self.scene.system
        self.policy = step_policy(config)
        stepcfg = config.step
        self.integrator = VerletIntegrator(self.policy.gravity)
        self.neighbors = NeighborManager(
            k=stepcfg['CELL_FACTOR'], interval=stepcfg['REBUILD_INTERVAL'],
            r_cut=stepcfg['R_CUT'], skin_min=stepcfg['SKIN_MIN'])
        self.forces = ForceModel(rolling=stepcfg['ROLLING'])
        self.monitor = SettlementMonitor(config.scene['SETTLE_THRESHOLD'])
        self.vmax = config.scene['VMAX']
        if self.policy.dt is None and not self.system.templates:
            raise SimulationError(
                "Scene has no particle classes; STEP.DT must be given")
        speed = max(_stream_speed(config), self._particle_speed())
        self.dt = self.policy.resolve(self.system, speed)
        self.nsteps = self._step_count()
        self.step = 0
        self.time = 0.0
        self.contacts = None
        self.stopped = False
        self.output = None
        if outdir is not None:
            out = config.output
            self.output = OutputManager(
                outdir, every=out['EVERY'], snapshots=out['SNAPSHOTS'],
                trajectory=out['TRAJECTORY'], hdf5=out['HDF5'])
        LOGGER.info("dt = %.6g s, %d steps" % (self.dt, self.nsteps))

    def _particle_speed(self):
        if self.system.count == 0:
            return 0.0
        return float(np.max(np.linalg.norm(self.system.vel, axis=1)))

    def _step_count(self):
        """SCENE.STEPS if given, otherwise DURATION / dt rounded up"""
        scn = self.config.scene
        if scn['STEPS'] is not None:
            return scn['STEPS']
        return int(np.ceil(scn['DURATION'] / self.dt - 1e-9))

    def _interact(self, commit=True):
        nlist = self.neighbors.update(self.system, self.scene.walls, self.dt,
                                      self.step)
        self.contacts = narrow_phase(self.system, self.scene.walls, nlist)
        self.forces.compute(self.system, self.scene.walls, self.contacts,
                            self.dt, commit=commit)

    def initialize(self):
        """Forces and accelerations at t = 0, first snapshot"""
        self._interact(commit=False)
        self.integrator.initialize(self.system)
        self._write()

    def advance(self):
        """Advances the scene by one time step"""
        system = self.system
        dt = self.dt
        self.step += 1
        advance_walls(self.scene.walls, self.time, dt)
        before = system.count
        self.scene.run_streams(self.step)
        if system.count > before:
            self.integrator.initialize(system, start=before)
        self.integrator.predict(system, dt)
        self._interact()
        self.integrator.correct(system, dt)
        self.time = self.step * dt
        self.check_blowup()
        if self.step % self.config.scene['SETTLE_INTERVAL'] == 0:
            self.check_settlement()
        if self.output is not None and self.output.due(self.step):
            self._write()

    def check_blowup(self):
        """Aborts when any particle moves faster than SCENE.VMAX"""
        if self.system.count == 0:
            return
        speed = np.linalg.norm(self.system.vel, axis=1)
        fast = np.nonzero(~(speed <= self.vmax))[0]
        if fast.size == 0:
            return
        worst = fast[np.argmax(np.nan_to_num(speed[fast], nan=np.inf))]
        msg = ("step %d (t=%.6g): %d particles faster than %g m/s; "
               "particle %d at %s moves with %s m/s, %d contacts"
               % (self.step, self.time, fast.size, self.vmax, worst,
                  np.array2string(self.system.pos[worst]), speed[worst],
                  len(self.contacts) if self.contacts is not None else 0))
        LOGGER.critical("Numerical blow-up: " + msg)
        raise SimulationError("Numerical blow-up at " + msg)

    def check_settlement(self):
        """Settlement check: triggers the release event, or stops the run
        when STOP_ON_SETTLE is set"""
        if not self.scene.streams_finished:
            self.monitor.reset()
            return
        if not self.monitor.update(self.system):
            return
        LOGGER.info("step %d: settled, mean speed %.3g m/s"
                    % (self.step, mean_speed(self.system)))
        if self.scene.release_pending:
            LOGGER.info("step %d: release" % self.step)
            self.scene.release()
            self.monitor.reset()
        elif self.config.scene['STOP_ON_SETTLE']:
            self.stopped = True

    def _write(self):
        if self.output is not None:
            self.output.write(self.system, self.step, self.time)

    def run(self):
        """Runs to the end of the scene. Returns the final step."""
        try:
            if self.step == 0:
                self.initialize()
            while self.step < self.nsteps and not self.stopped:
                self.advance()
            self._write()
        finally:
            if self.output is not None:
                self.output.close()
        LOGGER.info("Run finished at step %d, t=%.6g s, %d particles, "
                    "%d neighbor rebuilds" % (self.step, self.time,
                                              self.system.count,
                                              self.neighbors.rebuilds))
        return self.step


class StepLog(object):
    """
    Routes the records of all pymsdem loggers at INFO and above to
    steplog.txt for the duration of a run, next to a console handler at
    the usual level. Usable as a context manager.
    """
    def __init__(self, outdir, deterministic=False, console_level=None):
        self.filepath = os.path.join(outdir, STEPLOG)
        self.deterministic = deterministic
        self.console_level = loglevel() if console_level is None \
            else console_level
        self.logger = logging.getLogger('pymsdem')
        self._saved = None
        self._handlers = []

    def __enter__(self):
        fmt = DETERMINISTIC_LOGFORMAT if self.deterministic else LOGFORMAT
        filehandler = logging.FileHandler(self.filepath, mode='w')
        filehandler.setLevel(logging.INFO)
        filehandler.setFormatter(logging.Formatter(fmt))
        console = logging.StreamHandler()
        console.setLevel(self.console_level)
        console.setFormatter(logging.Formatter(LOGFORMAT))
        self._handlers = [filehandler, console]
        self._saved = (self.logger.level, self.logger.propagate)
        self.logger.setLevel(min(logging.INFO, self.console_level))
        self.logger.propagate = False
        for handler in self._handlers:
            self.logger.addHandler(handler)
        return self

    def __exit__(self, *exc):
        for handler in self._handlers:
            self.logger.removeHandler(handler)
            handler.close()
        self.logger.setLevel(self._saved[0])
        self.logger.propagate = self._saved[1]
        return False


def run(config, outdir, seed=None, deterministic=None, base_dir=None,
        console_level=None):
    """
    Runs a scene, writing scene.cfg, steplog.txt and snapshots to outdir.

    Arguments:
        config: SceneConfig
        outdir: output directory
        seed: overrides SCENE.SEED
        deterministic: overrides STEP.DETERMINISTIC
        base_dir: directory against which relative mesh paths resolve
        console_level: log level of console messages during the run
    Returns:
        exit status 0; failures raise PymsdemError subclasses
    """
    if seed is not None:
        config = scenemod.override(config, 'SCENE', 'SEED', int(seed))
    if deterministic is not None:
        config = scenemod.override(config, 'STEP', 'DETERMINISTIC',
                                   bool(deterministic))
    config = scenemod.resolve_paths(config, base_dir)
    if not os.path.isdir(outdir):
        os.makedirs(outdir)
    with open(os.path.join(outdir, SCENEFILE), 'w') as target:
        target.write(scenemod.serialize(config))
    with StepLog(outdir, config.step['DETERMINISTIC'], console_level):
        LOGGER.info("Scene %s, seed %d" % (config.scene['NAME'],
                                           config.scene['SEED']))
        sim = Simulation(config, outdir, base_dir)
        sim.run()
    return 0


def load_state(config, snapshot, base_dir=None):
    """ParticleSystem of a scene's classes holding the particles of a
    snapshot, for analysis of saved runs"""
    system, _ = scenemod.build_classes(config, base_dir)
    for idx in range(len(snapshot)):
        system.add_particles(
            system.class_index(snapshot.templates[idx]),
            [snapshot.pos[idx]], [snapshot.quat[idx]],
            velocities=[snapshot.vel[idx]], omegas=[snapshot.omega[idx]],
            tag=snapshot.tags[idx])
    return system
