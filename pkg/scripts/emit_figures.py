"""Write the geometry data behind the standard illustrations as CSV files.

Usage: python3 scripts/emit_figures.py [OUTDIR]
"""

import contextlib
import pathlib
import sys

from psibranches.cli import main

JOBS = [
    ("1/2", "xi"), ("1/4", "xi"), ("1/3", "xi"),
    ("1/2", "gamma"), ("1/4", "gamma"),
    ("1/2", "regions"), ("1/4", "regions"),
    ("1/2", "critical-points"), ("1/4", "critical-points"),
]


def _emit(target: pathlib.Path, argv: list[str]) -> int:
    with open(target, "w") as fh, contextlib.redirect_stdout(fh):
        return main(argv)


def run(outdir: pathlib.Path) -> int:
    outdir.mkdir(parents=True, exist_ok=True)
    for a, what in JOBS:
        target = outdir / f"{what}_a{a.replace('/', '-')}.csv"
        code = _emit(target, ["geometry", "--a", a, "--what", what, "--format", "csv"])
        if code:
            return code
        print(target)
    for xi0 in ("-1.5", "-0.5", "0.5"):
        target = outdir / f"gcurve_a1-4_xi{xi0}.csv"
        code = _emit(target, ["geometry", "--a", "1/4", "--what", "gcurve", f"--xi0={xi0}", "--format", "csv"])
        if code:
            return code
        print(target)
    return 0


if __name__ == "__main__":
    sys.exit(run(pathlib.Path(sys.argv[1] if len(sys.argv) > 1 else "figures")))
