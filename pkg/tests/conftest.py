import numpy as np
import pytest

from vorocover.geometry import InspectionRegion, parse_mesh

# Closed unit-scale box: 8 shared vertices, 12 facets.
BOX_MESH = """\
v 0 0 0
v 4 0 0
v 4 4 0
v 0 4 0
v 0 0 4
v 4 0 4
v 4 4 4
v 0 4 4
f 1 3 2
f 1 4 3
f 5 6 7
f 5 7 8
f 1 2 6
f 1 6 5
f 2 3 7
f 2 7 6
f 3 4 8
f 3 8 7
f 4 1 5
f 4 5 8
"""

# One facet in the z=0 plane, wound so the normal is +z.
SINGLE_FACET_MESH = """\
v 0 0 0
v 3 0 0
v 0 3 0
f 1 2 3
"""


@pytest.fixture
def box_mesh():
    return parse_mesh(BOX_MESH, name="box")


@pytest.fixture
def single_facet_mesh():
    return parse_mesh(SINGLE_FACET_MESH, name="single")


@pytest.fixture
def unit_region():
    return InspectionRegion(np.zeros(3), np.array([60.0, 60.0, 60.0]))


def write_mesh(tmp_path, text, name="mesh.obj"):
    path = tmp_path / name
    path.write_text(text)
    return path
