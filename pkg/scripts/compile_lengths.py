"""Sequence length and wall time of exchange-only compilation versus target accuracy."""

import argparse
import time

import numpy as np

from dfs_forge import basis as bs
from dfs_forge.compiler import compile_unitary, exchange_primitives
from dfs_forge.linalg import random_special_unitary


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--n", type=int, default=3)
    ap.add_argument("--twoj", type=int, default=1)
    ap.add_argument("--targets", type=int, default=5)
    ap.add_argument("--seed", type=int, default=7)
    ap.add_argument("--eps", type=float, nargs="+", default=[1e-1, 1e-2, 1e-3])
    args = ap.parse_args(argv)

    blk = bs.block(bs.STRONG, args.n, args.twoj)
    prims = exchange_primitives(args.n)
    rng = np.random.default_rng(args.seed)
    targets = [random_special_unitary(blk.n_J, rng) for _ in range(args.targets)]
    print("epsilon,target,length,error,leakage,seconds")
    for eps in args.eps:
        for k, u in enumerate(targets):
            t0 = time.perf_counter()
            res = compile_unitary(u, blk, prims, epsilon=eps)
            dt = time.perf_counter() - t0
            print(f"{eps:g},{k},{res.sequence.length},{res.sequence.achieved_error:.3e},{res.leakage:.1e},{dt:.3f}")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
