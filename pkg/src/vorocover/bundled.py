"""Bundled large-structure demonstration scenario.

Five agents inspect a 156 x 78 x 26 m box-like structure centered on the
floor of a 180 x 180 x 40 m flight region. The structure mesh is generated:
five exposed faces (the bottom rests on the ground and is not inspectable),
each face its own vertex grid, subdivided so that vertices + facets add up
to exactly the required target count. The subdivision counts are solved for,
not hard-coded; generation fails loudly if no subdivision hits the count.

The standoff distance must keep projected points inside the region; the
lateral margin between structure and region boundary is only 12 m, so
d_proj = 11.5 m is used. With these density parameters the centroid pull
saturates the acceleration bound whenever a cell carries mass, so flight is
energetic; u_max = 24 m/s^2 was chosen empirically for the fastest reliable
completion. Setting ``v_max`` (e.g. 12-15 m/s) makes flight gentle and
keeps agents ~3 m clear of the structure, but the mission then parks at
coverage equilibria before every target is inspected; the bundled config
prioritizes completing the inspection.
"""

from __future__ import annotations

import dataclasses
import os

import numpy as np

from . import geometry, sim
from .config import emit_config
from .control import Gains
from .geometry import InspectionRegion
from .sim import Scenario

TARGET_COUNT = 132

REGION_LO = (0.0, 0.0, 0.0)
REGION_HI = (180.0, 180.0, 40.0)
OBJECT_SIZE = (156.0, 78.0, 26.0)

STARTS = [
    (10.0, 20.0, 15.0),
    (30.0, 9.0, 14.0),
    (40.0, 17.0, 10.0),
    (15.0, 30.0, 5.0),
    (25.0, 20.0, 10.0),
]

MESH_FILENAME = "structure.obj"
CONFIG_FILENAME = "scenario.cfg"

__all__ = ["TARGET_COUNT", "bundled_scenario", "generate_mesh_text",
           "write_scenario"]


def _face_count(m: int, n: int) -> int:
    # (m+1)(n+1) grid vertices + 2mn triangles
    return 3 * m * n + m + n + 1


def solve_subdivision(n_points: int, max_cells: int = 16
                      ) -> tuple[tuple[int, int], tuple[int, int], tuple[int, int]]:
    """Per-face cell counts (top, y-face, x-face) such that the five-face
    mesh has exactly ``n_points`` vertices + facets.

    Opposite side faces share a subdivision. Among all exact solutions the
    one with the most uniform target spacing wins (smallest worst cell edge,
    then smallest total squared edge length): uniform spacing keeps the gaps
    between inspection sites comparable everywhere, which the coverage
    cascade needs.
    """
    lx, ly, lz = OBJECT_SIZE
    best = None
    for a in range(1, max_cells):
        for b in range(1, max_cells):
            for m in range(1, max_cells):
                for n in range(1, max_cells):
                    rest = n_points - _face_count(a, b) - 2 * _face_count(m, n)
                    if rest <= 0 or rest % 2:
                        continue
                    for p in range(1, max_cells):
                        for q in range(1, max_cells):
                            if _face_count(p, q) != rest // 2:
                                continue
                            dims = (lx / a, ly / b, lx / m, lz / n, ly / p, lz / q)
                            score = (max(dims), sum(d * d for d in dims))
                            if best is None or score < best[0]:
                                best = (score, ((a, b), (m, n), (p, q)))
    if best is None:
        raise ValueError(
            f"no five-face box subdivision yields exactly {n_points} target points")
    return best[1]


def _face_grid(origin, e1, n1, e2, n2, vertices, facets):
    """Append one face as an (n1+1) x (n2+1) vertex grid of triangles.

    e1 x e2 must point along the face's outward normal; both triangle
    windings then inherit it.
    """
    base = len(vertices)
    for i in range(n1 + 1):
        for j in range(n2 + 1):
            vertices.append(origin + (i / n1) * e1 + (j / n2) * e2)

    def v(i, j):
        return base + i * (n2 + 1) + j

    for i in range(n1):
        for j in range(n2):
            facets.append((v(i, j), v(i + 1, j), v(i + 1, j + 1)))
            facets.append((v(i, j), v(i + 1, j + 1), v(i, j + 1)))


def generate_mesh_text(n_points: int = TARGET_COUNT, subdivision=None) -> str:
    """Mesh file content for the bundled structure."""
    if subdivision is None:
        subdivision = solve_subdivision(n_points)
    (a, b), (m, n), (p, q) = subdivision
    size = np.array(OBJECT_SIZE)
    lo = np.array([(REGION_HI[0] - size[0]) / 2.0,
                   (REGION_HI[1] - size[1]) / 2.0,
                   0.0])
    hi = lo + size
    ex = np.array([size[0], 0.0, 0.0])
    ey = np.array([0.0, size[1], 0.0])
    ez = np.array([0.0, 0.0, size[2]])
    top = np.array([lo[0], lo[1], hi[2]])

    vertices: list[np.ndarray] = []
    facets: list[tuple[int, int, int]] = []
    _face_grid(top, ex, a, ey, b, vertices, facets)                      # +z
    _face_grid(lo, ex, m, ez, n, vertices, facets)                       # -y
    _face_grid(np.array([lo[0], hi[1], lo[2]]), ez, n, ex, m, vertices, facets)  # +y
    _face_grid(lo, ez, q, ey, p, vertices, facets)                       # -x
    _face_grid(np.array([hi[0], lo[1], lo[2]]), ey, p, ez, q, vertices, facets)  # +x

    if len(vertices) + len(facets) != n_points:
        raise AssertionError(
            f"subdivision {subdivision} produced {len(vertices)} + {len(facets)} "
            f"points, expected {n_points}")

    lines = [f"v {float(v[0])!r} {float(v[1])!r} {float(v[2])!r}" for v in vertices]
    lines += [f"f {i + 1} {j + 1} {k + 1}" for i, j, k in facets]
    return "\n".join(lines) + "\n"


def bundled_scenario(out_dir: str) -> Scenario:
    """Scenario object for the bundled mission, mesh expected in ``out_dir``."""
    return Scenario(
        region=InspectionRegion(np.array(REGION_LO), np.array(REGION_HI)),
        mesh_path=os.path.join(out_dir, MESH_FILENAME),
        d_proj=11.5,
        n_agents=len(STARTS),
        starts=np.array(STARTS),
        gains=Gains(k_p=0.32, k_d=0.86, mu_o=1000.0, d_o=12.0, r=10.0),
        alpha=1.0,
        beta=0.0075,
        dt=0.05,
        t_max=300.0,
        grid_h=2.0,
        u_max=24.0,
        v_max=None,
        log_path="run.jsonl",
    )


def write_scenario(out_dir: str) -> tuple[str, str]:
    """Generate mesh + config into ``out_dir``; validate before writing.

    Returns (mesh path, config path).
    """
    os.makedirs(out_dir, exist_ok=True)
    mesh_text = generate_mesh_text()
    mesh = geometry.parse_mesh(mesh_text, name=MESH_FILENAME)

    scenario = bundled_scenario(out_dir)
    targets = geometry.build_target_set(mesh, scenario.d_proj)
    if len(targets) != TARGET_COUNT:
        raise AssertionError(f"generated {len(targets)} targets, need {TARGET_COUNT}")
    sim.validate_scenario(scenario, targets)

    mesh_path = os.path.join(out_dir, MESH_FILENAME)
    with open(mesh_path, "w", encoding="utf-8") as fh:
        fh.write(mesh_text)

    # The emitted file references the mesh by name so the directory is
    # relocatable; parse_config resolves it against the config location.
    portable = dataclasses.replace(scenario, mesh_path=MESH_FILENAME)
    config_path = os.path.join(out_dir, CONFIG_FILENAME)
    with open(config_path, "w", encoding="utf-8") as fh:
        fh.write(emit_config(portable))
    return mesh_path, config_path
