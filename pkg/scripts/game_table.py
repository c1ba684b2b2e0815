"""Win rates of the six games: quantum (noiseless and noisy) plus exact classical values."""
import argparse
from pathlib import Path

from contextuality import cli

GAMES = [("pl", "square"), ("pl", "doily"), ("ll", "square"), ("ll", "doily"), ("ll", "elliptic:YYY"),
         ("llll", "elliptic:YYY")]


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--out", type=Path, default=Path("results/games"))
    ap.add_argument("--rounds", type=int, default=10_000)
    ap.add_argument("--noise", default="0.005,0.01")
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()
    common = ["--seed", str(args.seed), "--out", str(args.out)]
    for kind, geom in GAMES:
        base = ["game", "--geometry", geom, "--kind", kind]
        runs = [
            [*base, "--exhaustive"],
            [*base, "--rounds", str(args.rounds), "--noise", args.noise],
            [*base, "--strategy", "classical-optimal", "--exhaustive"],
        ]
        for argv in runs:
            if cli.main([*argv, *common]):
                return 1
    return cli.main(["report", str(args.out), "--out", str(args.out / "report")])


if __name__ == "__main__":
    raise SystemExit(main())
