import math

import numpy as np
import pytest
from hypothesis import strategies as st

from jointsig.geom import GroupId
from jointsig.oracle import FixtureSpec, make_symmetric_polygon

ALL_GROUPS = list(GroupId)

UNIT_SQUARE = [(0.0, 0.0), (1.0, 0.0), (1.0, 1.0), (0.0, 1.0)]
RECT_2x1 = [(0.0, 0.0), (2.0, 0.0), (2.0, 1.0), (0.0, 1.0)]
# no two sides or diagonals equal, no symmetry
SCALENE_QUAD = [(0.0, 0.0), (4.0, 0.3), (3.1, 2.2), (0.7, 1.5)]
SCALENE_TRIANGLE = [(0.0, 0.0), (3.0, 0.0), (0.4, 1.7)]
STAR_MOTIF = [(3.0, 0.0), (1.0, 1.0)]
SHEAR = np.array([[1.0, 1.0], [0.0, 1.0]])


def centered(points):
    pts = np.asarray(points, dtype=float)
    return pts - pts.mean(axis=0)


@pytest.fixture
def star():
    return make_symmetric_polygon(FixtureSpec(4, STAR_MOTIF))


coords = st.floats(min_value=-100, max_value=100, allow_nan=False, allow_infinity=False)
points = st.tuples(coords, coords)


def approx_point(p, q, tol=1e-9):
    return math.hypot(p[0] - q[0], p[1] - q[1]) <= tol
