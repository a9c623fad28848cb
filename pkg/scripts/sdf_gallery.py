"""Render the signed distance field of every gallery footprint to SVG.

    python scripts/sdf_gallery.py --res 0.02
"""
from __future__ import annotations

import argparse
from pathlib import Path

from footprint_mppi.cli import main as cli_main

GALLERY = ["t_shape", "f_shape", "l_shape", "star", "arrow", "diamond", "trapezoid", "cart"]


def main() -> None:
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    p.add_argument("--res", type=float, default=0.02)
    p.add_argument("--out", type=Path, default=Path("results/sdf"))
    args = p.parse_args()
    for name in GALLERY:
        code = cli_main(["sdf", "--footprint", name, "--res", str(args.res), "--out", str(args.out)])
        if code:
            raise SystemExit(code)


if __name__ == "__main__":
    main()
