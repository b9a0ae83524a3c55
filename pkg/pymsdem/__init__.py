"""Multi-sphere discrete element simulation toolkit"""

__all__ = [
    "analysis",
    "cli",
    "contact",
    "demhelpers",
    "force",
    "integrate",
    "meshes",
    "neighbor",
    "odlutils",
    "output",
    "presets",
    "quatutils",
    "scene",
    "shape",
    "shapeutils",
    "simulation",
    "world",
    ]
