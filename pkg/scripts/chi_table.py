"""Rio Negro chi for every geometry class, noiseless and noisy, merged into one report.

    python3 scripts/chi_table.py --out results/chi --shots 10000
"""
import argparse
from pathlib import Path

from contextuality import cli

GEOMETRIES = ["w52", "square", "doily", "elliptic:YYY", "hyperbolic:IXI"]


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--out", type=Path, default=Path("results/chi"))
    ap.add_argument("--shots", type=int, default=10_000)
    ap.add_argument("--noise", default="0.005,0.01", help="p_depolarize,p_readout for the noisy column")
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()
    for noise in ("0,0", args.noise):
        for g in GEOMETRIES:
            extra = ["--extract", "squares,doilies,elliptic,hyperbolic"] if g == "w52" else []
            code = cli.main(["rio-negro", "--geometry", g, "--shots", str(args.shots), "--noise", noise,
                             "--seed", str(args.seed), "--out", str(args.out), *extra])
            if code:
                return code
    return cli.main(["report", str(args.out), "--out", str(args.out / "report")])


if __name__ == "__main__":
    raise SystemExit(main())
