# coding: utf-8
"""
pymsdem.cli

Command line interface::

    pymsdem run SCENE [--seed S] [--deterministic] [--out DIR]
                      [--set GROUP.KEY=VALUE ...]
    pymsdem estimate-dt SCENE
    pymsdem analyze SNAPSHOT [--measure fill-height|porosity|aor ...]
                             [--scene SCENE] [--report FILE]
    pymsdem export-mesh SNAPSHOT --kind surface|cells [--scene SCENE]
                                 [--out DIR] [--combined]
    pymsdem preset NAME [--out FILE] | --list

Exit status is 0 on success, 1 on errors raised by pymsdem and 2 on usage
errors. Log verbosity follows PYMSDEM_LOGLEVEL; -v and -vv raise it to INFO
and DEBUG.
"""

from __future__ import division, print_function, absolute_import
import os
import sys
import csv
import argparse
import logging

from pymsdem import analysis, output, presets, simulation
from pymsdem import scene as scenemod
from pymsdem.demhelpers import PymsdemError, SceneConfigError, loglevel
from pymsdem.odlutils import parse_value

logging.basicConfig(level=loglevel())
LOGGER = logging.getLogger('pymsdem.cli')


# ==================================================================
# = helpers
# ==================================================================
def _load(path, assignments=()):
    config = scenemod.load_scene(path)
    for assignment in assignments:
        target, sep, value = assignment.partition('=')
        group, dot, key = target.partition('.')
        if not sep or not dot:
            raise SceneConfigError(
                "--set expects GROUP.KEY=VALUE, got '%s'" % assignment)
        config = scenemod.override(config, group.strip(), key.strip(),
                                   parse_value(value.strip()))
    return config


def _scene_for_snapshot(snapshot_path, scene_path=None):
    """The scene of a snapshot: --scene, or scene.cfg in the run directory
    that holds the snapshots directory"""
    if scene_path is not None:
        return scene_path
    snapdir = os.path.dirname(os.path.abspath(snapshot_path))
    for folder in (os.path.dirname(snapdir), snapdir):
        candidate = os.path.join(folder, simulation.SCENEFILE)
        if os.path.isfile(candidate):
            return candidate
    raise SceneConfigError(
        "No %s found next to %s; use --scene" %
        (simulation.SCENEFILE, snapshot_path))


def measure_bed(config, system, measures):
    """
    Takes the requested measurements on a settled bed as directed by the
    ANALYSIS group. Returns a list of (measure, value, sd) with sd None
    where it does not apply. Heights in m, porosity as a fraction, angles
    in degrees.
    """
    settings = config.analysis
    if settings is None:
        raise SceneConfigError("Scene has no ANALYSIS group")
    if settings['CONTAINER'] == 'cylinder':
        container = analysis.CylinderContainer(
            settings['CENTER'], settings['RADIUS'], settings['FLOOR'])
    else:
        container = analysis.BoxContainer(settings['LO'], settings['HI'])
    results = []
    height = None
    for measure in measures:
        if measure in ('fill-height', 'porosity') and height is None:
            height, height_sd = analysis.fill_height(system, container,
                                                     settings['N'])
        if measure == 'fill-height':
            results.append((measure, height, height_sd))
        elif measure == 'porosity':
            results.append((measure, analysis.porosity(
                system, height, container.base_area), None))
        elif measure == 'aor':
            if settings['EXTENT'] is None or settings['DEPTH'] is None:
                raise SceneConfigError("ANALYSIS: aor needs EXTENT and DEPTH")
            results.append((measure, analysis.angle_of_repose(
                system, settings['AXIS'], settings['EXTENT'],
                settings['DEPTH'], settings['N'], settings['FLOOR']), None))
        else:
            raise SceneConfigError("Unknown measure '%s'" % measure)
    return results


def write_report(results, target):
    writer = csv.writer(target, lineterminator='\n')
    writer.writerow(('measure', 'value', 'sd'))
    for measure, value, spread in results:
        writer.writerow((measure, '%.10g' % value,
                         '' if spread is None else '%.10g' % spread))


# ==================================================================
# = commands
# ==================================================================
def cmd_run(args):
    config = _load(args.scene, args.set)
    return simulation.run(
        config, args.out, seed=args.seed,
        deterministic=True if args.deterministic else None,
        base_dir=os.path.dirname(os.path.abspath(args.scene)),
        console_level=args.loglevel)


def cmd_estimate_dt(args):
    config = _load(args.scene, args.set)
    t_r, t_h, dt_c, dt = simulation.estimate_dt(
        config, os.path.dirname(os.path.abspath(args.scene)))
    print("T_R  %.6g s" % t_r)
    print("T_H  %s" % ("n/a (no initial speed)" if t_h is None
                       else "%.6g s" % t_h))
    print("dt_c %.6g s" % dt_c)
    print("dt   %.6g s" % dt)
    return 0


def cmd_analyze(args):
    scene_path = _scene_for_snapshot(args.snapshot, args.scene)
    config = scenemod.load_scene(scene_path)
    snapshot = output.read_snapshot(args.snapshot)
    system = simulation.load_state(
        config, snapshot, os.path.dirname(os.path.abspath(scene_path)))
    measures = args.measure
    if not measures:
        if config.analysis is None:
            raise SceneConfigError("Scene has no ANALYSIS group")
        measures = config.analysis['MEASURES']
    results = measure_bed(config, system, measures)
    if args.report:
        with open(args.report, 'w') as target:
            write_report(results, target)
    else:
        write_report(results, sys.stdout)
    return 0


def cmd_export_mesh(args):
    scene_path = _scene_for_snapshot(args.snapshot, args.scene)
    config = scenemod.load_scene(scene_path)
    system, _ = scenemod.build_classes(
        config, os.path.dirname(os.path.abspath(scene_path)))
    templates = dict((tmpl.name, tmpl) for tmpl in system.templates)
    snapshot = output.read_snapshot(args.snapshot)
    outdir = args.out or os.path.join(
        os.path.dirname(os.path.abspath(args.snapshot)), 'meshes')
    written = output.export_meshes(snapshot, templates, args.kind, outdir,
                                   combined=args.combined)
    print("%d files written to %s" % (len(written), outdir))
    return 0


def cmd_preset(args):
    if args.list:
        for name in presets.preset_names():
            print(name)
        return 0
    if not args.name:
        raise SceneConfigError("Give a preset name or --list")
    text = scenemod.serialize(presets.make_preset(args.name))
    if args.out:
        with open(args.out, 'w') as target:
            target.write(text)
    else:
        sys.stdout.write(text)
    return 0


def build_parser():
    parser = argparse.ArgumentParser(
        prog='pymsdem',
        description="Multi-sphere discrete element simulations")
    parser.add_argument('-v', '--verbose', action='count', default=0,
                        help="more log output (-v INFO, -vv DEBUG)")
    sub = parser.add_subparsers(dest='command')

    prun = sub.add_parser('run', help="run a scene")
    prun.add_argument('scene', help="scene file")
    prun.add_argument('--seed', type=int, help="overrides SCENE.SEED")
    prun.add_argument('--deterministic', action='store_true',
                      help="byte-identical output for identical input")
    prun.add_argument('--out', default='output', help="output directory")
    prun.add_argument('--set', action='append', default=[],
                      metavar='GROUP.KEY=VALUE',
                      help="override a scene value (repeatable)")
    prun.set_defaults(func=cmd_run)

    pdt = sub.add_parser('estimate-dt', help="critical time step of a scene")
    pdt.add_argument('scene', help="scene file")
    pdt.add_argument('--set', action='append', default=[],
                     metavar='GROUP.KEY=VALUE')
    pdt.set_defaults(func=cmd_estimate_dt)

    pana = sub.add_parser('analyze', help="measure a snapshot")
    pana.add_argument('snapshot', help="snapshot CSV file")
    pana.add_argument('--measure', action='append',
                      choices=scenemod.MEASURES,
                      help="measurement (repeatable; default: ANALYSIS)")
    pana.add_argument('--scene', help="scene file of the run")
    pana.add_argument('--report', help="CSV report file (default stdout)")
    pana.set_defaults(func=cmd_analyze)

    pexp = sub.add_parser('export-mesh', help="world-frame particle meshes")
    pexp.add_argument('snapshot', help="snapshot CSV file")
    pexp.add_argument('--kind', required=True, choices=output.MESHKINDS)
    pexp.add_argument('--scene', help="scene file of the run")
    pexp.add_argument('--out', help="target directory")
    pexp.add_argument('--combined', action='store_true',
                      help="one file for all particles")
    pexp.set_defaults(func=cmd_export_mesh)

    ppre = sub.add_parser('preset', help="write a built-in scene file")
    ppre.add_argument('name', nargs='?', help="preset name")
    ppre.add_argument('--out', help="target file (default stdout)")
    ppre.add_argument('--list', action='store_true',
                      help="list the preset names")
    ppre.set_defaults(func=cmd_preset)
    return parser


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.command is None:
        parser.print_usage(sys.stderr)
        return 2
    level = loglevel()
    if args.verbose:
        level = min(level, logging.DEBUG if args.verbose > 1 else
                    logging.INFO)
    args.loglevel = level
    logging.getLogger('pymsdem').setLevel(level)
    try:
        return args.func(args)
    except PymsdemError as err:
        LOGGER.critical("%s" % err)
        return 1
    except (IOError, OSError) as err:
        LOGGER.critical("%s" % err)
        return 1


if __name__ == '__main__':
    sys.exit(main())
