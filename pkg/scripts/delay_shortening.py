"""Delay needed by each surplus model to reach the constant-model storage at a reference delay.

For every alpha the target is the constant-model requirement at
--reference-days; the script inverts the tau curve of every model at that
target and prints the delays side by side.

Usage: python scripts/delay_shortening.py data.csv [--reference-days 1]
"""

import argparse

from wsvol import invert_tau, parse_dataset, prepare_inputs, sweep_surface


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("data")
    ap.add_argument("--alphas", type=float, nargs="+", default=[0.3, 0.5, 0.7, 1.0])
    ap.add_argument("--reference-days", type=float, default=1.0)
    ap.add_argument("--grid-minutes", type=int, default=60)
    args = ap.parse_args()

    inputs = prepare_inputs(parse_dataset(args.data))
    ref = int(round(args.reference_days * 1440))
    taus = list(range(0, ref + 1, args.grid_minutes))
    if taus[-1] != ref:
        taus.append(ref)
    grids = {name: sweep_surface(inputs, name, args.alphas, taus) for name in ("constant", "low_tanh", "offshore")}

    print("alpha,target_gwh," + ",".join(f"tau_days_{n}" for n in grids))
    for i, a in enumerate(args.alphas):
        target = grids["constant"].surface[i, -1]
        cells = []
        for g in grids.values():
            inv = invert_tau(g, a, target)
            cells.append("unreachable" if inv.tau_minutes is None else f"{inv.tau_days:.4f}")
        print(f"{a:g},{target / 1e3:.1f}," + ",".join(cells))


if __name__ == "__main__":
    main()
