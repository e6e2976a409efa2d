"""Per-pair and network rates of FDMA and CDMA as the number of user pairs grows.

    python demos/capacity_table.py [--eta 0.9] [--M 0.01]
"""

import argparse

from qcdma.capacity import ChannelModel, cdma_rates, fdma_rates, single_pair_rates


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--eta", type=float, default=0.9, help="line-center transmissivity")
    ap.add_argument("--M", type=float, default=0.01, help="CDMA correction factor")
    ap.add_argument("--n-mean", type=float, default=1.0, help="photons per use")
    args = ap.parse_args()

    single = single_pair_rates(args.eta, args.n_mean)
    print(f"single pair: classical {single.classical:.4f}  quantum {single.quantum:.4f}")
    print(f"{'N':>2} | {'FDMA c':>8} {'FDMA q':>8} | {'CDMA c':>8} {'CDMA q':>8} | "
          f"{'net gap c':>9} {'net gap q':>9}")
    for N in range(1, 9):
        f = fdma_rates(ChannelModel(kind="FDMA", eta=args.eta, n_mean=args.n_mean, N=N))
        c = cdma_rates(ChannelModel(kind="CDMA", eta=args.eta, n_mean=args.n_mean, N=N, M=args.M))
        print(f"{N:>2} | {f.classical:8.4f} {f.quantum:8.4f} | {c.classical:8.4f} {c.quantum:8.4f} | "
              f"{c.aggregate_classical - f.aggregate_classical:9.4f} "
              f"{c.aggregate_quantum - f.aggregate_quantum:9.4f}")

    print("\nCDMA per-pair rates across loss (N = 2):")
    for eta in (0.1, 0.3, 0.5, 0.7, 1.0):
        c = cdma_rates(ChannelModel(kind="CDMA", eta=eta, n_mean=args.n_mean, N=2, M=args.M))
        s = single_pair_rates(eta, args.n_mean)
        print(f"  eta = {eta:.1f}: CDMA {c.classical:.4f} / {c.quantum:.4f}   "
              f"single {s.classical:.4f} / {s.quantum:.4f}")


if __name__ == "__main__":
    main()
