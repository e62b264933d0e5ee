#!/usr/bin/env python3
"""Generate a synthetic hourly load/solar CSV for trying the ingest pipeline.

Households follow an evening-peaked profile with day-to-day noise; solar is a
midday bell. Output columns: day,entity,h0..h23,s0..s23 (MWh).
"""

import argparse
import csv
from pathlib import Path

import numpy as np


def household_profile(rng, hours):
    base = 0.4 + 0.25 * np.exp(-((hours - 20) % 24 - 0.0) ** 2 / 8.0)
    base += 0.1 * np.exp(-(hours - 8.0) ** 2 / 6.0)
    return base * rng.uniform(0.7, 1.3)


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--users", type=int, default=16)
    parser.add_argument("--days", type=int, default=361)
    parser.add_argument("--seed", type=int, default=0)
    parser.add_argument("--out", type=Path, default=Path("sample_loads.csv"))
    args = parser.parse_args()

    rng = np.random.default_rng(args.seed)
    hours = np.arange(24, dtype=float)
    scales = rng.uniform(0.6, 1.6, args.users)
    with open(args.out, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(
            ["day", "entity"]
            + [f"h{i}" for i in range(24)]
            + [f"s{i}" for i in range(24)]
        )
        for day in range(args.days):
            season = 1.0 + 0.2 * np.sin(2 * np.pi * day / 361.0)
            sun = np.clip(np.cos((hours - 13.0) / 24.0 * 2 * np.pi), 0.0, None)
            for u in range(args.users):
                load = household_profile(rng, hours) * scales[u] * season
                load *= rng.uniform(0.85, 1.15, 24)
                solar = 0.5 * sun * scales[u] * rng.uniform(0.5, 1.2)
                writer.writerow(
                    [f"d{day:03d}", f"user{u:02d}"]
                    + [f"{v:.6f}" for v in load]
                    + [f"{v:.6f}" for v in solar]
                )
    print(f"wrote {args.out} ({args.days} days x {args.users} users)")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
