import math

import pytest

from v2xpos.scenario import Point2D, reference_delays, trace_path

ANCHOR = Point2D(0.0, 0.0)
VEHICLE = Point2D(100.0, 0.0)
WORKED_SCATTERERS = [(50.0, 50.0), (50.0, -30.0), (120.0, 40.0)]


@pytest.fixture
def worked_paths():
    """Three single-bounce paths of the worked scenario, path 1 via (50, 50)."""
    return reference_delays([trace_path(ANCHOR, VEHICLE, [s]) for s in WORKED_SCATTERERS])


def dist(p, q):
    return math.hypot(p[0] - q[0], p[1] - q[1])
