"""Print the strong-model degeneracy triangle and the encoding-rate curve as CSV."""

import argparse
import sys

from dfs_forge.reports import EFFICIENCY_COLUMNS, TABLE_COLUMNS, efficiency_curve, table_degeneracies, to_csv


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--max-n", type=int, default=10)
    ap.add_argument("--n-list", type=int, nargs="+", default=[10, 20, 40, 60, 100])
    args = ap.parse_args(argv)

    table = table_degeneracies(args.max_n)
    sys.stdout.write(to_csv(table.details["rows"], TABLE_COLUMNS))
    print(f"# table pass={table.passed} {table.metrics}\n")

    curve = efficiency_curve(args.n_list)
    sys.stdout.write(to_csv(curve.details["points"], EFFICIENCY_COLUMNS))
    print(f"# efficiency pass={curve.passed} {curve.metrics}")
    return 0 if table.passed and curve.passed else 1


if __name__ == "__main__":
    raise SystemExit(main())
