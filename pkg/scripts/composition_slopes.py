"""Log-log error slopes of the Trotter and group-commutator product formulas on DFS3(1/2)."""

import math

import numpy as np

from dfs_forge import basis as bs
from dfs_forge.compiler import commutator_compose, trotter_compose
from dfs_forge.lie import restrict
from dfs_forge.operators import exchange


def main():
    blk = bs.block(bs.STRONG, 3, 1)
    ex = {p: restrict(exchange(*p, 3), [blk])[1] for p in ((1, 2), (1, 3), (2, 3))}
    lib = {"X": (ex[1, 3] - ex[2, 3]) / math.sqrt(3), "Z": (-ex[1, 2] + ex[1, 3] + ex[2, 3]) / 2}
    ns = np.array([2**k for k in range(3, 12)])
    trot = np.array([trotter_compose([("X", 0.9), ("Z", 0.6)], lib, int(n)).achieved_error for n in ns])
    comm = np.array([commutator_compose("X", "Z", 0.8, lib, int(n)).achieved_error for n in ns])
    print("steps,trotter_error,commutator_error")
    for n, a, b in zip(ns, trot, comm):
        print(f"{n},{a:.4e},{b:.4e}")
    print(f"# trotter slope {np.polyfit(np.log(ns), np.log(trot), 1)[0]:.3f}")
    print(f"# commutator slope {np.polyfit(np.log(ns), np.log(comm), 1)[0]:.3f}")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
