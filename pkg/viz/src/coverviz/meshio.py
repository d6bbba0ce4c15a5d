"""Minimal reader for the simulator's mesh format: ``v x y z`` and
``f i j k`` lines (1-based indices), nothing else."""

from __future__ import annotations

import numpy as np


class MeshError(ValueError):
    pass


def load_mesh(path) -> tuple[np.ndarray, np.ndarray]:
    """Returns (vertices (V,3) float, facets (F,3) int 0-based)."""
    vertices, facets = [], []
    with open(path, "r", encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, start=1):
            tokens = raw.split()
            if not tokens:
                continue
            if tokens[0] == "v" and len(tokens) == 4:
                vertices.append([float(x) for x in tokens[1:]])
            elif tokens[0] == "f" and len(tokens) == 4:
                facets.append([int(x) - 1 for x in tokens[1:]])
            else:
                raise MeshError(f"{path}:{lineno}: unsupported line")
    if not vertices or not facets:
        raise MeshError(f"{path}: mesh needs vertices and faces")
    verts = np.array(vertices)
    faces = np.array(facets, dtype=np.int64)
    if faces.max() >= len(verts) or faces.min() < 0:
        raise MeshError(f"{path}: face index out of range")
    return verts, faces
