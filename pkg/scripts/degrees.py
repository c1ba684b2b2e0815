"""Degree of contextuality of each geometry class, with the W(5,2) hexagon check.

Exhaustive Gray-code search where it is cheap, the coset search for the
hyperbolic quadric and annealing for W(5,2).
"""
import argparse
import time

from contextuality.degree import SolverConfig, solve_degree, verify_hexagon_shape
from contextuality.geometry import build_doily, build_mermin_square, build_quadric, build_symplectic_space


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--seeds", type=int, default=10, help="annealing seeds for W(5,2)")
    args = ap.parse_args()
    w52 = build_symplectic_space(3)
    cases = [
        (build_mermin_square(), SolverConfig()),
        (build_doily(), SolverConfig()),
        (build_quadric("YYY", w52), SolverConfig()),
        (build_quadric("IXI", w52), SolverConfig("rank_reduced")),
    ]
    cases += [(w52, SolverConfig("heuristic", seed=s)) for s in range(args.seeds)]
    for geom, cfg in cases:
        t0 = time.perf_counter()
        res = solve_degree(geom, cfg)
        line = f"{geom.name:8s} {cfg.method:12s} seed={cfg.seed} d={res.degree:3d} exact={res.exact} {time.perf_counter() - t0:7.2f}s"
        if geom is w52:
            line += f" hexagon={verify_hexagon_shape(geom, res.unsatisfied).passed}"
        print(line)


if __name__ == "__main__":
    main()
