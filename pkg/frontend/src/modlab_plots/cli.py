"""Script entry point: one figure per invocation.

    modlab-plots --in sweep.csv --in fits.csv --kind convergence --out fig.svg

Exit 0 on success, 2 on schema/usage problems.
"""

from __future__ import annotations

import argparse
import sys

from .render import KINDS, PlotJob, SchemaError, render


def main(argv: list[str] | None = None) -> int:
    parser = argparse.ArgumentParser(prog="modlab-plots")
    parser.add_argument("--in", dest="inputs", action="append", required=True,
                        help="input CSV; repeat to pass the fits CSV second")
    parser.add_argument("--kind", required=True, choices=KINDS)
    parser.add_argument("--out", required=True, help="output image path")
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return 2 if exc.code not in (0, None) else 0
    try:
        out = render(PlotJob(tuple(args.inputs), args.kind, args.out))
    except SchemaError as exc:
        sys.stderr.write(f"error: schema: {exc}\n")
        return 2
    except OSError as exc:
        sys.stderr.write(f"error: io: {exc}\n")
        return 2
    print(out)
    return 0


if __name__ == "__main__":
    sys.exit(main())
