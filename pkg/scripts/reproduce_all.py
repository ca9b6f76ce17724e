"""Write every reproduction dataset (fig2, fig3, fig4, table-p) under one directory."""
import argparse
import time

from qbattery.runner import FIGURES, reproduce_figure


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--out", default="out")
    ap.add_argument("--n-points", type=int, default=2000)
    ap.add_argument("--workers", type=int, default=None)
    args = ap.parse_args()
    for fig in FIGURES:
        start = time.perf_counter()
        paths = reproduce_figure(fig, args.out, n_points=args.n_points, workers=args.workers)
        print(f"{fig:8s} {len(paths):3d} file(s)  {time.perf_counter() - start:6.2f} s")


if __name__ == "__main__":
    main()
