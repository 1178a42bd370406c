"""Positioning a vehicle that never sees the anchor.

Each single-bounce path gives an angle at each end and a flight time
relative to path 1. Sliding the unknown path-1 length moves every path's
locus line, and only the true length makes them all meet. The linear solver
finds that length in one least-squares step. The trajectory method walks the
meeting gap instead. Both land on the same point.

    python3 demos/hidden_vehicle.py
"""

import math

import numpy as np

from v2xpos.hvp import locus_line, solve_linear, solve_multi_epoch, solve_trajectory
from v2xpos.scenario import EpochObservation, reference_delays, trace_path

anchor, vehicle = (0.0, 0.0), (100.0, 0.0)
scatterers = [(50.0, 50.0), (50.0, -30.0), (120.0, 40.0)]
paths = reference_delays([trace_path(anchor, vehicle, [s]) for s in scatterers])

for i, p in enumerate(paths, 1):
    print(f"path {i}: AoD {math.degrees(p.aod_rad):8.3f} deg  AoA {math.degrees(p.aoa_rad):8.3f} deg  "
          f"dTau {p.rel_delay_s * 1e9:8.3f} ns")

# a wrong guess for d1 leaves the loci crossing in different places; the
# right one makes every crossing coincide
def crossing(a, b):
    t = np.linalg.solve(np.column_stack([a.direction, -np.asarray(b.direction)]),
                        np.subtract(b.origin, a.origin))
    return np.add(a.origin, t[0] * np.asarray(a.direction))


for d1 in (120.0, 135.0, 141.42135623730951, 150.0):
    lines = [locus_line(p, anchor, d1 + 3e8 * p.rel_delay_s) for p in paths]
    # loci 1 and 2 are parallel here (both scatterers sit on the bisector),
    # so compare where each of them crosses locus 3
    gap = np.linalg.norm(crossing(lines[0], lines[2]) - crossing(lines[1], lines[2]))
    print(f"d1 = {d1:7.3f} m: crossings {gap:8.3f} m apart")

lin = solve_linear(paths, anchor)
traj = solve_trajectory(paths, anchor)
print(f"\nlinear     -> ({lin.position.x:.6f}, {lin.position.y:.6f}), d1 {lin.d1_m:.5f} m, "
      f"condition {lin.condition:.1f}")
print(f"trajectory -> ({traj.position.x:.6f}, {traj.position.y:.6f})")

# two paths now plus two seen four metres back: still enough once the
# odometry closes the gap between epochs
step = (4.0, 0.0)
before = (vehicle[0] - step[0], vehicle[1] - step[1])
extra = [(30.0, 60.0), (80.0, -50.0)]
old = EpochObservation(tuple(reference_delays([trace_path(anchor, before, [s]) for s in extra])), step)
new = EpochObservation(tuple(reference_delays([trace_path(anchor, vehicle, [s]) for s in scatterers[:2]])))
fix = solve_multi_epoch([old, new], anchor)
print(f"2 + 2 paths over two epochs -> ({fix.position.x:.6f}, {fix.position.y:.6f})")
