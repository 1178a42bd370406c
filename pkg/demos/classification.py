"""Telling single-bounce paths from the rest.

Double-bounce paths break the single-bounce geometry, so any three-path
subset containing one solves to a wrong place. Subsets of true single-bounce
paths all agree. Clustering the subset fixes and checking the implied
scatterers against a wall map picks out the consistent set.

    python3 demos/classification.py [--seed 4] [--plot classify.svg]
"""

import argparse
import math

from v2xpos.hvp import ClassifyConfig, classify_and_solve, implied_scatterer, solve_linear
from v2xpos.plotting import scatter_plot
from v2xpos.scenario import RandomScenarioParams, random_scenario, reference_delays, trace_path

ap = argparse.ArgumentParser()
ap.add_argument("--seed", type=int, default=4)
ap.add_argument("--plot")
args = ap.parse_args()

s = random_scenario(args.seed, RandomScenarioParams(n_scatterers=7, wall_length_m=4.0))
sc = s.scatterers
raw = [trace_path(s.anchor, s.vehicle, [x]) for x in sc[:3]]
raw += [trace_path(s.anchor, s.vehicle, sc[3:5]), trace_path(s.anchor, s.vehicle, sc[5:7])]
paths = reference_delays(raw)
print(f"anchor {tuple(round(v, 1) for v in s.anchor)}, vehicle {tuple(round(v, 1) for v in s.vehicle)}")
print("paths 1-3 bounce once, paths 4-5 twice\n")

naive = solve_linear(paths, s.anchor)
print(f"all five in one solve: error {math.dist(naive.position, s.vehicle):.2f} m, "
      f"residual {naive.residual_m:.2f} m")

fix = classify_and_solve(paths, s.anchor, ClassifyConfig(obstacles=s.obstacles))
print(f"classified:            error {math.dist(fix.position, s.vehicle):.2e} m")
implied = []
for i, (p, label) in enumerate(zip(paths, fix.labels), 1):
    r = implied_scatterer(p, s.anchor, fix.position, fix.d1_m, obstacles=s.obstacles)
    implied.append(r.point)
    print(f"  path {i}: {label:13}  length mismatch {r.residual_m:9.3f} m  "
          f"nearest wall {r.obstacle_distance_m:8.3f} m")

if args.plot:
    scatter_plot(args.plot, {"anchor": [s.anchor], "vehicle": [s.vehicle], "fix": [fix.position],
                             "implied scatterers": implied}, s.obstacles)
    print(f"wrote {args.plot}")
