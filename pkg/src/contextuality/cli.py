"""Command-line entry point: geometry, degree, rio-negro, game and report subcommands.

Exit codes: 0 success, 1 configuration error, 2 internal invariant violation.
"""
from __future__ import annotations

import argparse
import json
import sys
from fractions import Fraction
from pathlib import Path

from . import __version__
from .config import (
    OUT_ENV,
    RunConfig,
    provenance,
    resolve_geometry,
    slug,
    write_csv,
    write_json,
)
from .degree import SolverConfig, SolverRefused, solve_degree, verify_hexagon_shape
from .experiments import (
    REFERENCE_DEGREES,
    InvariantViolation,
    degree_for,
    extract_subgeometry_chi,
    histogram_svg,
    rio_negro_run,
)
from .games import (
    GAME_KINDS,
    StrategyIntractable,
    classical_from_assignment,
    optimal_classical,
    play_classical,
    play_quantum,
)
from .geometry import ConfigurationError, enumerate_quadrics, enumerate_subgeometries
from .quantum import NoiseParams
from .report import build_report

EXTRACT_FAMILIES = ("squares", "doilies", "elliptic", "hyperbolic")


def _answers_text(answers) -> str:
    def one(a):
        if isinstance(a, tuple):
            return " ".join(f"{v:+d}" for v in a)
        return f"{a:+d}"

    return "|".join(one(a) for a in answers)


def _noise_tag(noise: NoiseParams) -> str:
    return "" if noise.is_zero else f"-dep{noise.p_depolarize:g}-ro{noise.p_readout:g}"


def cmd_geometry(config: RunConfig) -> dict:
    geom = resolve_geometry(config.geometry)
    stem = f"geometry-{slug(geom.name)}"
    dump = config.out_dir / f"{stem}.json"
    dump.parent.mkdir(parents=True, exist_ok=True)
    geom.save(dump)
    counts = {
        "artifact": "geometry",
        "geometry": geom.name,
        "points": geom.n_points,
        "lines": geom.n_lines,
        "negative_lines": geom.n_negative,
        "dump": dump.name,
        "provenance": provenance(config, geom),
    }
    if config.options.get("subgeometries"):
        if not geom.name.startswith("W("):
            raise ConfigurationError("subgeometry counts need a symplectic space (e.g. w52)")
        quadrics = enumerate_quadrics(geom)
        counts["elliptic_quadrics"] = sum(q.name.startswith("E_") for q in quadrics)
        counts["hyperbolic_quadrics"] = sum(q.name.startswith("H_") for q in quadrics)
        counts["squares"] = len(enumerate_subgeometries(geom, "square"))
        counts["doilies"] = len(enumerate_subgeometries(geom, "doily"))
    write_json(config.out_dir / f"{stem}-counts.json", counts)
    return counts


def cmd_degree(config: RunConfig) -> dict:
    geom = resolve_geometry(config.geometry)
    opts = config.options
    solver = SolverConfig(
        method=opts.get("method", "exhaustive"),
        budget=opts.get("budget") or SolverConfig().budget,
        seed=config.seed,
        long_running=opts.get("long_running", False),
    )
    res = solve_degree(geom, solver)
    out = {"artifact": "degree", **res.to_dict(geom), "provenance": provenance(config, geom)}
    if geom.name == "W(5,2)":
        rep = verify_hexagon_shape(geom, res.unsatisfied)
        out["hexagon_check"] = {
            "lines": rep.n_lines,
            "count_ok": rep.count_ok,
            "covers_all_points": rep.covers_all_points,
            "three_per_point": rep.three_per_point,
        }
    write_json(config.out_dir / f"degree-{slug(geom.name)}-{solver.method}.json", out)
    return out


def _families(geom, names):
    for name in names:
        if name == "squares":
            yield "square", enumerate_subgeometries(geom, "square")
        elif name == "doilies":
            yield "doily", enumerate_subgeometries(geom, "doily")
        else:
            prefix = "E_" if name == "elliptic" else "H_"
            yield name, [q.points for q in enumerate_quadrics(geom) if q.name.startswith(prefix)]


def cmd_rio_negro(config: RunConfig) -> dict:
    geom = resolve_geometry(config.geometry)
    extract = config.options.get("extract") or []
    if extract and not geom.name.startswith("W("):
        raise ConfigurationError("--extract needs a symplectic space run (e.g. --geometry w52)")
    run = rio_negro_run(
        geom, shots=config.shots, noise=config.noise, state=config.options.get("state", "zeros"), seed=config.seed
    )
    stem = f"rio-negro-{slug(geom.name)}{_noise_tag(config.noise)}"
    write_csv(
        config.out_dir / f"{stem}-contexts.csv",
        ["line", "operators", "sign", "mean", "stderr"],
        [
            (e.line, " ".join(geom.label(p) for p in geom.lines[e.line].points), geom.lines[e.line].sign,
             f"{e.mean_product:.6f}", f"{e.stderr:.6f}")
            for e in run.estimates
        ],
    )
    subs = []
    for family, point_sets in _families(geom, extract):
        hist = extract_subgeometry_chi(run, point_sets, family, REFERENCE_DEGREES[family])
        subs.append(hist.summary())
        write_csv(
            config.out_dir / f"{stem}-{family}-histogram.csv",
            ["bin_lo", "bin_hi", "count"],
            [(f"{hist.edges[i]:.6f}", f"{hist.edges[i + 1]:.6f}", int(c)) for i, c in enumerate(hist.counts)],
        )
        (config.out_dir / f"{stem}-{family}-histogram.svg").write_text(histogram_svg(hist))
    out = {
        "artifact": "rio-negro",
        "geometry": geom.name,
        "shots": config.shots,
        "noise": {"p_depolarize": config.noise.p_depolarize, "p_readout": config.noise.p_readout},
        "state": config.options.get("state", "zeros"),
        "report": run.report.to_dict(),
        "subgeometries": subs,
        "provenance": provenance(config, geom),
    }
    write_json(config.out_dir / f"{stem}.json", out)
    return out


def cmd_game(config: RunConfig) -> dict:
    geom = resolve_geometry(config.geometry)
    opts = config.options
    kind = opts["kind"]
    strategy = opts.get("strategy", "quantum")
    rounds = None if opts.get("exhaustive") else config.rounds
    stem = f"game-{kind}-{slug(geom.name)}-{strategy}{_noise_tag(config.noise)}"
    out = {
        "artifact": "game",
        "geometry": geom.name,
        "kind": kind,
        "strategy": strategy,
        "noise": {"p_depolarize": config.noise.p_depolarize, "p_readout": config.noise.p_readout},
        "provenance": provenance(config, geom),
    }
    if strategy == "quantum":
        result = play_quantum(geom, kind, config.noise, rounds=rounds, seed=config.seed, transcript=True)
    elif strategy == "classical-optimal":
        try:
            value, table = optimal_classical(geom, kind, long_running=opts.get("long_running", False))
        except StrategyIntractable as exc:
            out.update(status="refused", reason=str(exc),
                       reference_omega=None if exc.reference is None else str(exc.reference))
            write_json(config.out_dir / f"{stem}.json", out)
            return out
        out["classical_value"] = str(value)
        result = play_classical(geom, kind, table, rounds=rounds, seed=config.seed, transcript=True)
    elif strategy == "classical-assignment":
        d, _ = degree_for(geom)
        from .degree import heuristic_degree, incidence_rank, rank_reduced_degree

        if incidence_rank(geom) <= 24:
            witness = rank_reduced_degree(geom).witness
        else:
            witness = heuristic_degree(geom, SolverConfig("heuristic", seed=config.seed)).witness
        result = play_classical(geom, kind, classical_from_assignment(geom, witness), rounds=rounds,
                                seed=config.seed, transcript=True)
        out["assignment_hex"] = witness.to_hex()
    else:
        raise ConfigurationError(f"unknown strategy {strategy!r}")
    out.update(result.to_dict())
    out["status"] = "ok"
    write_csv(
        config.out_dir / f"{stem}-transcript.csv",
        ["round", "question", "answers", "win"],
        [(r, q, _answers_text(a), int(w)) for r, q, a, w in result.transcript],
    )
    write_json(config.out_dir / f"{stem}.json", out)
    return out


def cmd_report(config: RunConfig) -> dict:
    paths = config.options.get("paths") or []
    bundle = build_report(paths)
    out = {"artifact": "report", **bundle.to_dict()}
    write_json(config.out_dir / "report.json", out)
    (config.out_dir / "report.md").write_text(bundle.markdown())
    return out


COMMAND_FUNCS = {
    "geometry": cmd_geometry,
    "degree": cmd_degree,
    "rio-negro": cmd_rio_negro,
    "game": cmd_game,
    "report": cmd_report,
}


def run(config: RunConfig) -> tuple[int, dict | None]:
    """Execute one command; returns ``(exit_code, summary)``."""
    try:
        return 0, COMMAND_FUNCS[config.command](config)
    except InvariantViolation as exc:
        print(f"internal invariant violated: {exc}", file=sys.stderr)
        return 2, None
    except (ConfigurationError, SolverRefused, ValueError, KeyError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1, None


def _version_text() -> str:
    import platform

    import numba
    import numpy

    return (
        f"contextuality {__version__} (python {platform.python_version()}, "
        f"numpy {numpy.__version__}, numba {numba.__version__})"
    )


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="contextuality", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=_version_text())
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, noise=False):
        p.add_argument("--geometry", required=True, help="square | doily | w52 | elliptic:<op> | hyperbolic:<op> | file.json")
        p.add_argument("--seed", type=int, default=0)
        p.add_argument("--out", type=Path, default=None, help=f"output directory (default ${OUT_ENV} or ./results)")
        if noise:
            p.add_argument("--noise", default="0,0", help="p_depolarize,p_readout")

    p = sub.add_parser("geometry", help="build a geometry, print counts and write its JSON dump")
    common(p)
    p.add_argument("--subgeometries", action="store_true", help="also count quadrics, squares and doilies")

    p = sub.add_parser("degree", help="contextuality degree with a witness valuation")
    common(p)
    p.add_argument("--method", choices=["exhaustive", "rank_reduced", "heuristic"], default="exhaustive")
    p.add_argument("--budget", type=int, default=None)
    p.add_argument("--long-running", action="store_true")

    p = sub.add_parser("rio-negro", help="simulate the Rio Negro inequality")
    common(p, noise=True)
    p.add_argument("--shots", type=int, default=10_000)
    p.add_argument("--state", choices=["zeros", "random"], default="zeros")
    p.add_argument("--extract", default="", help=f"comma list from {','.join(EXTRACT_FAMILIES)}")

    p = sub.add_parser("game", help="play a pseudotelepathy game")
    common(p, noise=True)
    p.add_argument("--kind", choices=GAME_KINDS, required=True)
    p.add_argument("--strategy", choices=["quantum", "classical-optimal", "classical-assignment"], default="quantum")
    p.add_argument("--rounds", type=int, default=10_000)
    p.add_argument("--exhaustive", action="store_true", help="play every question once instead of sampling")
    p.add_argument("--long-running", action="store_true")

    p = sub.add_parser("report", help="merge artifacts into summary tables")
    p.add_argument("paths", nargs="*", type=Path)
    p.add_argument("--out", type=Path, default=None)
    return parser


def config_from_args(args) -> RunConfig:
    kwargs = {"command": args.command, "options": {}}
    if args.out is not None:
        kwargs["out_dir"] = args.out
    if args.command == "report":
        kwargs["options"]["paths"] = [str(p) for p in args.paths]
        return RunConfig(**kwargs)
    kwargs["geometry"] = args.geometry
    kwargs["seed"] = args.seed
    if hasattr(args, "noise"):
        kwargs["noise"] = NoiseParams.parse(args.noise)
    opts = kwargs["options"]
    if args.command == "geometry":
        opts["subgeometries"] = args.subgeometries
    elif args.command == "degree":
        opts.update(method=args.method, budget=args.budget, long_running=args.long_running)
    elif args.command == "rio-negro":
        kwargs["shots"] = args.shots
        extract = [e for e in args.extract.split(",") if e]
        bad = set(extract) - set(EXTRACT_FAMILIES)
        if bad:
            raise ConfigurationError(f"unknown --extract families {sorted(bad)}")
        opts.update(state=args.state, extract=extract)
    elif args.command == "game":
        kwargs["rounds"] = args.rounds
        opts.update(kind=args.kind, strategy=args.strategy, exhaustive=args.exhaustive,
                    long_running=args.long_running)
    return RunConfig(**kwargs)


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        config = config_from_args(args)
    except (ConfigurationError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    code, summary = run(config)
    if summary is not None and config.command == "report":
        print((config.out_dir / "report.md").read_text(), end="")
    elif summary is not None:
        print(json.dumps(summary, indent=2, sort_keys=True, default=str))
    return code


if __name__ == "__main__":
    sys.exit(main())
