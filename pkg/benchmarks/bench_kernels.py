"""Compare numba and numpy kernel implementations on desk-scale problem sizes.

    python benchmarks/bench_kernels.py [--n-x 63] [--n-z 401] [--repeat 3]
"""
import argparse

from cylspec.bench import compare, format_table


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--n-x", type=int, default=63)
    ap.add_argument("--n-z", type=int, default=401)
    ap.add_argument("--n-tri", type=int, default=400)
    ap.add_argument("--n-dense", type=int, default=120)
    ap.add_argument("--repeat", type=int, default=3)
    args = ap.parse_args()
    rows = compare(args.n_x, args.n_z, args.n_tri, args.n_dense, args.repeat)
    print(format_table(rows))


if __name__ == "__main__":
    main()
