"""Storage requirement against delay time for several surplus strengths.

Prints one table per surplus model: rows are delays in days, columns are
alphas, entries are the storage requirement in GWh. With --csv the raw
surfaces are written next to the table.

Usage: python scripts/storage_surface.py data.csv [--models constant low_tanh offshore]
"""

import argparse
from pathlib import Path

from wsvol import parse_dataset, prepare_inputs, sweep_surface
from wsvol.decomposition import decompose, format_energy, passive_storage_requirement, storage_fluctuation


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("data")
    ap.add_argument("--models", nargs="+", default=["constant", "low_tanh", "offshore"])
    ap.add_argument("--alphas", type=float, nargs="+", default=[0.3, 0.5, 0.7, 1.0])
    ap.add_argument("--max-days", type=float, default=2.0)
    ap.add_argument("--step-hours", type=float, default=3.0)
    ap.add_argument("--workers", type=int, default=1)
    ap.add_argument("--csv", type=Path, default=None, help="directory for surface CSVs")
    args = ap.parse_args()

    inputs = prepare_inputs(parse_dataset(args.data))
    passive = passive_storage_requirement(
        storage_fluctuation(decompose(inputs.volatile), decompose(inputs.demand))
    )
    print(f"passive requirement (no surplus, no delay): {format_energy(passive)}")

    step = int(round(args.step_hours * 60))
    taus = list(range(0, int(args.max_days * 1440) + 1, step))
    for name in args.models:
        grid = sweep_surface(inputs, name, args.alphas, taus, workers=args.workers)
        print(f"\n{name}: storage in GWh")
        print("tau_days " + " ".join(f"a={a:<8g}" for a in grid.alphas))
        for j, t in enumerate(grid.taus_days):
            print(f"{t:8.3f} " + " ".join(f"{grid.surface[i, j] / 1e3:10.1f}" for i in range(len(grid.alphas))))
        if grid.non_monotone():
            print(f"warning: {len(grid.non_monotone())} non-monotone grid points")
        if args.csv is not None:
            args.csv.mkdir(parents=True, exist_ok=True)
            (args.csv / f"surface_{name}.csv").write_text(grid.to_csv())


if __name__ == "__main__":
    main()
