"""Beam-scanned received power at 5.9 and 60 GHz.

Going from 5.9 to 60 GHz costs about 20 dB of free-space loss. A 64-element
array buys 18 dB of it back, and the narrow beam it forms also shows each
path as its own peak in the scan.

    python3 demos/rss_scan.py [--plot rss.svg]
"""

import argparse
import math

import numpy as np

from v2xpos.channel import ArrayConfig, ChannelTap, LinkBudget, pathloss_db, rss_scan
from v2xpos.plotting import line_plot

ap = argparse.ArgumentParser()
ap.add_argument("--plot")
args = ap.parse_args()

budget = LinkBudget()
grid = np.radians(np.arange(-900, 901) / 10)
paths = [(-60.0, 40.0), (60.0, 70.0)]  # (arrival direction deg, length m)

print(f"noise floor {budget.noise_floor_dbm:.1f} dBm over {budget.bandwidth_hz / 1e6:g} MHz")
series = {}
for freq, n in ((5.9e9, 1), (60e9, 1), (60e9, 64)):
    taps = [ChannelTap(0.0, 10 ** (-pathloss_db("free_space", freq, d) / 20), math.radians(a))
            for a, d in paths]
    scan = rss_scan(taps, ArrayConfig(n_elements=n), budget, grid)
    label = f"{freq / 1e9:g} GHz, {n} element{'s' if n > 1 else ''}"
    series[label] = (np.degrees(grid).tolist(), scan.rss_db.tolist())
    r = scan.rss_db
    peaks = [i for i in range(1, len(r) - 1) if r[i] > r[i - 1] and r[i] > r[i + 1] and r[i] > r.max() - 10]
    where = ", ".join(f"{math.degrees(grid[i]):.1f} deg" for i in peaks) or "flat"
    print(f"{label:22} best {r.max():7.2f} dBm  peaks: {where}")

if args.plot:
    line_plot(args.plot, series, "arrival direction [deg]", "RSS [dBm]")
    print(f"wrote {args.plot}")
