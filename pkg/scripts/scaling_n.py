"""Basis depth against N for ER, WS and BA at t=1, with power-law fits."""

from __future__ import annotations

import argparse
from pathlib import Path

from qwalknet.analysis import PUBLISHED_N_FITS, run_n_scaling, write_fit_summary_csv, write_scaling_csv
from qwalknet.graph import GraphParams

MODELS = {
    "ER": GraphParams("ER", 8, 0, p=0.4),
    "WS": GraphParams("WS", 8, 0, k=4, beta=0.5),
    "BA": GraphParams("BA", 8, 0, m=4),
}


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--n-values", default="8,16,24,32,48,64")
    ap.add_argument("--seeds", type=int, default=3)
    ap.add_argument("--jobs", type=int, default=1)
    ap.add_argument("--out", type=Path, default=Path("results/scaling_n"))
    args = ap.parse_args()

    n_values = [int(v) for v in args.n_values.split(",")]
    args.out.mkdir(parents=True, exist_ok=True)
    fits = []
    for model, params in MODELS.items():
        res = run_n_scaling(params, n_values, t=1, seeds_per_point=args.seeds, n_jobs=args.jobs)
        write_scaling_csv(res.records, args.out / f"{model.lower()}.csv")
        fits.append((model, res.fit))
        a, sa, b, sb = PUBLISHED_N_FITS[model]
        print(f"{model}: ours {res.fit.describe()}")
        print(f"{model}: published {a}({sa}) N^{b:.2f}({round(sb * 100)})")
    write_fit_summary_csv(fits, args.out / "fits.csv")
    print("published prefactors come from a vendor optimizer; only exponents are comparable")


if __name__ == "__main__":
    main()
