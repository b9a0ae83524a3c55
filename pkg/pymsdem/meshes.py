# coding: utf-8
"""
pymsdem.meshes

Surface (triangle) and cell (tetrahedron) companion meshes of a particle
shape, their ASCII file formats and the pose synchronisation that maps
body-frame meshes to the world frame.

File formats:
    - surface meshes: Wavefront OBJ, read and written with trimesh.
      Polygonal faces are triangulated on reading.
    - cell meshes: legacy VTK unstructured grids of tetrahedra, read and
      written with meshio (ASCII, file format version 4.2).
"""

from __future__ import division, print_function, absolute_import
from builtins import object
import os
import logging

import numpy as np
import trimesh
import meshio

from pymsdem import quatutils
from pymsdem.demhelpers import MeshError, loglevel

logging.basicConfig(level=loglevel())
LOGGER = logging.getLogger('pymsdem.meshes')

OBJ_DIGITS = 17
VTK_VERSION = "4.2"
AREA_TOL = 0.0


class SurfaceMesh(object):
    """
    A triangle surface mesh.

    Arguments:
        vertices: (n, 3) array-like of vertex coordinates
        triangles: (m, 3) array-like of vertex indices, 0-based
    """
    def __init__(self, vertices, triangles):
        self.vertices = np.array(vertices, dtype=float).reshape(-1, 3)
        self.triangles = np.array(triangles, dtype=np.int64).reshape(-1, 3)
        self._validate()

    def _validate(self):
        nvert = len(self.vertices)
        if self.triangles.size and (
                self.triangles.min() < 0 or self.triangles.max() >= nvert):
            raise MeshError(
                "Triangle vertex index out of range [0, %d)" % nvert)
        bad = np.nonzero(self.areas <= AREA_TOL)[0]
        if bad.size:
            raise MeshError(
                "Degenerate triangle(s) with zero area: %s"
                % bad[:10].tolist())

    @property
    def corners(self):
        """(m, 3, 3) array of triangle corner coordinates"""
        return self.vertices[self.triangles]

    @property
    def areas(self):
        tri = self.corners
        cross = np.cross(tri[:, 1] - tri[:, 0], tri[:, 2] - tri[:, 0])
        return 0.5 * np.linalg.norm(cross, axis=1)

    @property
    def normals(self):
        """Unit face normals, counter-clockwise orientation"""
        tri = self.corners
        cross = np.cross(tri[:, 1] - tri[:, 0], tri[:, 2] - tri[:, 0])
        return cross / np.linalg.norm(cross, axis=1)[:, None]

    @property
    def ntriangles(self):
        return len(self.triangles)

    def copy_with(self, vertices):
        return SurfaceMesh(vertices, self.triangles)


class CellMesh(object):
    """
    A tetrahedral cell mesh. Every tetrahedron (p0, p1, p2, p3) must have
    positive signed volume det(p1-p0, p2-p0, p3-p0)/6.

    Arguments:
        points: (n, 3) array-like of point coordinates
        tets: (m, 4) array-like of point indices, 0-based
    """
    def __init__(self, points, tets):
        self.points = np.array(points, dtype=float).reshape(-1, 3)
        self.tets = np.array(tets, dtype=np.int64).reshape(-1, 4)
        self._validate()

    def _validate(self):
        npts = len(self.points)
        if self.tets.size and (
                self.tets.min() < 0 or self.tets.max() >= npts):
            raise MeshError(
                "Tetrahedron point index out of range [0, %d)" % npts)
        bad = np.nonzero(self.volumes <= 0.0)[0]
        if bad.size:
            raise MeshError(
                "Tetrahedra with non-positive volume: %s" % bad[:10].tolist())

    @property
    def volumes(self):
        """Signed volumes of all tetrahedra"""
        pts = self.points[self.tets]
        return np.linalg.det(
            np.stack([pts[:, 1] - pts[:, 0], pts[:, 2] - pts[:, 0],
                      pts[:, 3] - pts[:, 0]], axis=1)) / 6.0

    @property
    def ncells(self):
        return len(self.tets)

    def copy_with(self, points):
        return CellMesh(points, self.tets)


def _mesh_coordinates(mesh):
    if isinstance(mesh, SurfaceMesh):
        return mesh.vertices
    elif isinstance(mesh, CellMesh):
        return mesh.points
    raise MeshError("Not a mesh: %r" % (mesh,))


def sync_mesh(mesh, pose):
    """Maps a body-frame mesh to the world frame of a particle pose.

    Arguments:
        mesh: SurfaceMesh or CellMesh in the body frame
        pose: object with ``position`` (3-vector) and ``orientation``
            (unit quaternion w, x, y, z)
    Returns a new mesh of the same type with identical topology.
    """
    quat = np.asarray(pose.orientation, dtype=float)
    if not quatutils.is_unit(quat):
        raise MeshError(
            "Cannot sync mesh to a non-unit quaternion (|q| = %.17g)"
            % quatutils.norm(quat))
    coords = _mesh_coordinates(mesh)
    world = quatutils.rotate(quat, coords) + np.asarray(
        pose.position, dtype=float)
    return mesh.copy_with(world)




def _check_readable(filepath):
    if not os.path.isfile(filepath):
        raise MeshError("Mesh file %s not found" % filepath)


# ==================================================================
# = OBJ surface meshes
# ==================================================================
def read_obj(filepath):
    """Reads a triangle surface mesh from an OBJ file"""
    _check_readable(filepath)
    try:
        loaded = trimesh.load(filepath, file_type='obj', force='mesh',
                              process=False, maintain_order=True)
    except Exception as err:
        raise MeshError("%s: malformed OBJ file (%s)" % (filepath, err))
    if not isinstance(loaded, trimesh.Trimesh) or len(loaded.faces) == 0:
        raise MeshError("%s contains no triangles" % filepath)
    return SurfaceMesh(loaded.vertices, loaded.faces)


def write_obj(mesh, filepath, comment=None):
    """Writes a SurfaceMesh as an OBJ file"""
    tmesh = trimesh.Trimesh(vertices=mesh.vertices, faces=mesh.triangles,
                            process=False)
    tmesh.export(filepath, file_type='obj', include_normals=False,
                 include_color=False, include_texture=False,
                 digits=OBJ_DIGITS, header=comment)


# ==================================================================
# = legacy VTK cell meshes
# ==================================================================
def read_vtk(filepath):
    """Reads a tetrahedral CellMesh from a legacy VTK file"""
    _check_readable(filepath)
    try:
        loaded = meshio.read(filepath, file_format='vtk')
    except Exception as err:
        raise MeshError("%s: malformed VTK file (%s)" % (filepath, err))
    kinds = set(block.type for block in loaded.cells)
    if kinds != set(['tetra']):
        raise MeshError("%s: only tetrahedral cells are supported, found %s"
                        % (filepath, sorted(kinds)))
    tets = np.vstack([block.data for block in loaded.cells])
    return CellMesh(loaded.points, tets)


def write_vtk(mesh, filepath):
    """Writes a CellMesh as a legacy ASCII VTK unstructured grid"""
    meshio.write_points_cells(filepath, mesh.points, [('tetra', mesh.tets)],
                              file_format='vtk' + VTK_VERSION.replace('.', ''),
                              binary=False)


def read_mesh(filepath):
    """Reads a surface (.obj) or cell (.vtk) mesh by file extension"""
    lower = filepath.lower()
    if lower.endswith('.obj'):
        return read_obj(filepath)
    elif lower.endswith('.vtk'):
        return read_vtk(filepath)
    raise MeshError("Unknown mesh file type: %s" % filepath)
