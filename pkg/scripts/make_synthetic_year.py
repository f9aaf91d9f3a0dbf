"""Write a seeded synthetic year on a 15-min grid, with magnitudes like a large national grid.

Usage: python scripts/make_synthetic_year.py out.csv [--seed 0] [--days 365]
"""

import argparse

import numpy as np

from wsvol import ChannelSpec, SyntheticSpec, export_dataset, synthesize

DAY = 96  # 15-min steps per day


def year_spec(days=365, seed=0):
    return SyntheticSpec(
        days * DAY,
        load=ChannelSpec("sinusoid", 56_400.0, 8_000.0, DAY),
        solar=ChannelSpec("sinusoid", 5_300.0, 5_300.0, DAY, -0.5 * np.pi),
        # multi-day periods stand in for weather-driven lulls
        wind_onshore=ChannelSpec("sinusoid", 11_000.0, 10_500.0, 6 * DAY),
        wind_offshore=ChannelSpec("square", 2_700.0, 2_000.0, 11 * DAY),
        seed=seed,
    )


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("out")
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--days", type=int, default=365)
    args = ap.parse_args()
    d = synthesize(year_spec(args.days, args.seed))
    export_dataset(d, args.out, comments=[f"synthetic year seed={args.seed} days={args.days}"])
    means = ", ".join(f"{k}={v:.1f}" for k, v in d.channel_means().items())
    print(f"wrote {args.out}: {means}")


if __name__ == "__main__":
    main()
