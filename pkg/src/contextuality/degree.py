"""Contextuality degree: fewest line constraints any +-1 valuation must break.

A valuation is stored as bits (1 means the value -1). A line is unsatisfied
when the XOR of its three bits differs from its sign bit (1 for a negative
line). Exact values come from a Gray-code walk over all valuations or over
the GF(2) column space of the line-point incidence matrix; large spaces use
a seeded annealing search that only gives an upper bound.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import _kernels
from .geometry import IncidenceGeometry

METHODS = ("exhaustive", "rank_reduced", "heuristic")
DEFAULT_BUDGET = 2_000_000


class SolverRefused(RuntimeError):
    """The requested exact search exceeds the configured size cap."""


@dataclass(frozen=True)
class Assignment:
    bits: np.ndarray = field(compare=False)

    def __post_init__(self):
        object.__setattr__(self, "bits", np.asarray(self.bits, dtype=np.uint8) & 1)

    def __len__(self):
        return len(self.bits)

    def __eq__(self, other):
        return isinstance(other, Assignment) and np.array_equal(self.bits, other.bits)

    @property
    def values(self) -> np.ndarray:
        """The +-1 values."""
        return 1 - 2 * self.bits.astype(int)

    def to_int(self) -> int:
        return sum(1 << i for i, b in enumerate(self.bits) if b)

    def to_hex(self) -> str:
        return format(self.to_int(), "x")

    @classmethod
    def from_int(cls, value: int, length: int) -> "Assignment":
        return cls(np.array([(value >> i) & 1 for i in range(length)], dtype=np.uint8))

    @classmethod
    def from_hex(cls, text: str, length: int) -> "Assignment":
        return cls.from_int(int(text, 16), length)

    @classmethod
    def ones(cls, length: int) -> "Assignment":
        """The all +1 valuation."""
        return cls(np.zeros(length, dtype=np.uint8))


@dataclass(frozen=True)
class DegreeResult:
    degree: int
    witness: Assignment
    unsatisfied: tuple[int, ...]
    exact: bool
    method: str

    def to_dict(self, geom: IncidenceGeometry | None = None) -> dict:
        out = {
            "degree": self.degree,
            "exact": self.exact,
            "method": self.method,
            "witness_hex": self.witness.to_hex(),
            "unsatisfied": list(self.unsatisfied),
        }
        if geom is not None:
            out["geometry"] = geom.name
            out["n_points"] = geom.n_points
            out["n_lines"] = geom.n_lines
            out["nchv_bound"] = geom.n_lines - 2 * self.degree
        return out


@dataclass
class SolverConfig:
    method: str = "exhaustive"
    point_cap: int = 30
    budget: int = DEFAULT_BUDGET
    seed: int = 0
    long_running: bool = False

    def __post_init__(self):
        if self.method not in METHODS:
            raise ValueError(f"unknown method {self.method!r}")
        if self.budget <= 0:
            raise ValueError("budget must be positive")


def violated_lines(geom: IncidenceGeometry, a: Assignment) -> np.ndarray:
    """Boolean flag per line: True when the valuation breaks it."""
    if len(a) != geom.n_points:
        raise ValueError(f"assignment has {len(a)} bits, geometry has {geom.n_points} points")
    if geom.n_lines == 0:
        return np.zeros(0, dtype=bool)
    parity = (geom.incidence.astype(np.uint8) @ a.bits.astype(np.uint8)) & 1
    return parity != geom.sign_bits


def unsatisfied_count(geom: IncidenceGeometry, a: Assignment) -> int:
    return int(violated_lines(geom, a).sum())


def _to_words(bits: np.ndarray) -> np.ndarray:
    """Pack a 0/1 vector (or rows of them) into uint64 words, bit i of word i//64."""
    bits = np.atleast_2d(np.asarray(bits, dtype=np.uint64))
    n_words = max(1, math.ceil(bits.shape[1] / 64))
    out = np.zeros((bits.shape[0], n_words), dtype=np.uint64)
    for i in range(bits.shape[1]):
        out[:, i // 64] |= bits[:, i] << np.uint64(i % 64)
    return out


def line_masks(geom: IncidenceGeometry) -> tuple[np.ndarray, np.ndarray]:
    """Per-point incident-line masks and the negative-line mask, as uint64 words."""
    masks = _to_words(geom.incidence.T.astype(np.uint8))
    start = _to_words(geom.sign_bits)[0]
    return masks, start


def _result(geom, bits, method, exact) -> DegreeResult:
    a = Assignment(bits)
    bad = np.flatnonzero(violated_lines(geom, a))
    return DegreeResult(len(bad), a, tuple(int(i) for i in bad), exact, method)


def _n_high(k: int) -> int:
    # partitions of the search space, each walked by its own Gray code
    return min(4, max(0, k - 8))


def exhaustive_degree(geom: IncidenceGeometry, config: SolverConfig | None = None) -> DegreeResult:
    """Exact degree by a Gray-code walk over all 2^|P| valuations."""
    config = config or SolverConfig()
    P = geom.n_points
    if P > config.point_cap and not config.long_running:
        raise SolverRefused(
            f"{geom.name} has {P} points > point_cap {config.point_cap}; "
            "use rank_reduced or heuristic, or pass long_running"
        )
    if geom.n_lines == 0:
        return _result(geom, np.zeros(P, dtype=np.uint8), "exhaustive", True)
    masks, start = line_masks(geom)
    best, subset = _kernels.gray_min_weight(masks, start, _n_high(P))
    bits = np.array([(int(subset) >> i) & 1 for i in range(P)], dtype=np.uint8)
    res = _result(geom, bits, "exhaustive", True)
    assert res.degree == best
    return res


def column_space_basis(geom: IncidenceGeometry) -> tuple[list[int], list[int]]:
    """GF(2) basis of the incidence column space.

    Returns ``(vectors, point_sets)``: each basis vector is a line mask
    (bit i = line i) and ``point_sets`` holds the valuation bits (bit j =
    point j) whose flip toggles exactly those lines.
    """
    pivots: dict[int, tuple[int, int]] = {}
    for j in range(geom.n_points):
        vec = sum(1 << i for i in geom.lines_through[j])
        pts = 1 << j
        while vec:
            h = vec.bit_length() - 1
            if h not in pivots:
                pivots[h] = (vec, pts)
                break
            pv, pp = pivots[h]
            vec ^= pv
            pts ^= pp
    ordered = [pivots[h] for h in sorted(pivots)]
    return [v for v, _ in ordered], [p for _, p in ordered]


def incidence_rank(geom: IncidenceGeometry) -> int:
    return len(column_space_basis(geom)[0])


def rank_reduced_degree(geom: IncidenceGeometry, config: SolverConfig | None = None) -> DegreeResult:
    """Exact degree as the minimum weight of the coset ``signs + image(incidence)``.

    Walks the 2^rank column-space combinations instead of all 2^|P|
    valuations; rank is at most |P| minus the dimension of valuations that
    break no line parity.
    """
    config = config or SolverConfig(method="rank_reduced")
    P = geom.n_points
    if geom.n_lines == 0:
        return _result(geom, np.zeros(P, dtype=np.uint8), "rank_reduced", True)
    vectors, point_sets = column_space_basis(geom)
    rank = len(vectors)
    if rank > config.point_cap and not config.long_running:
        raise SolverRefused(f"incidence rank {rank} of {geom.name} exceeds point_cap {config.point_cap}")
    L = geom.n_lines
    rows = np.array([[(v >> i) & 1 for i in range(L)] for v in vectors], dtype=np.uint8)
    masks = _to_words(rows)
    start = _to_words(geom.sign_bits)[0]
    best, subset = _kernels.gray_min_weight(masks, start, _n_high(rank))
    chosen = 0
    for i, pts in enumerate(point_sets):
        if (int(subset) >> i) & 1:
            chosen ^= pts
    bits = np.array([(chosen >> j) & 1 for j in range(P)], dtype=np.uint8)
    res = _result(geom, bits, "rank_reduced", True)
    assert res.degree == best
    return res


def _heuristic_arrays(geom: IncidenceGeometry):
    line_pts = np.array(
        [[geom.point_index(p) for p in l.points] for l in geom.lines], dtype=np.int64
    ).reshape(-1, 3)
    deg = np.array([len(t) for t in geom.lines_through], dtype=np.int64)
    through = np.zeros((geom.n_points, max(1, deg.max(initial=0))), dtype=np.int64)
    for j, t in enumerate(geom.lines_through):
        through[j, : len(t)] = t
    return line_pts, geom.sign_bits.astype(np.uint8), through, deg


def heuristic_degree(geom: IncidenceGeometry, config: SolverConfig | None = None) -> DegreeResult:
    """Upper bound on the degree from restarted simulated annealing.

    ``config.budget`` flips are split into ``budget // 10000`` restarts
    (at least one); restart ``r`` draws from RNG seed ``config.seed + r``
    and starts from a random valuation. Cooling is geometric from 2.0 to
    0.05. The first restart reaching the overall minimum supplies the
    witness.
    """
    config = config or SolverConfig(method="heuristic")
    P = geom.n_points
    if geom.n_lines == 0:
        return _result(geom, np.zeros(P, dtype=np.uint8), "heuristic", False)
    arrays = _heuristic_arrays(geom)
    restarts = max(1, config.budget // 10_000)
    per = config.budget // restarts
    best, best_x = None, None
    for r in range(restarts):
        rng = np.random.default_rng(config.seed + r)
        x0 = rng.integers(0, 2, size=P).astype(np.uint8)
        count, x = _kernels.anneal(*arrays, x0, per, 2.0, 0.05, (config.seed + r) % 2**32)
        if best is None or count < best:
            best, best_x = count, x
    return _result(geom, best_x, "heuristic", False)


def solve_degree(geom: IncidenceGeometry, config: SolverConfig | None = None) -> DegreeResult:
    config = config or SolverConfig()
    return {
        "exhaustive": exhaustive_degree,
        "rank_reduced": rank_reduced_degree,
        "heuristic": heuristic_degree,
    }[config.method](geom, config)


@dataclass(frozen=True)
class HexagonReport:
    n_lines: int
    count_ok: bool
    covers_all_points: bool
    three_per_point: bool

    @property
    def passed(self) -> bool:
        return self.count_ok and self.covers_all_points and self.three_per_point


def verify_hexagon_shape(geom: IncidenceGeometry, unsatisfied) -> HexagonReport:
    """Structural checks expected of a split Cayley hexagon of order 2.

    63 lines, every point covered, every point on exactly three of them.
    This does not test full hexagon isomorphism.
    """
    unsatisfied = list(unsatisfied)
    per_point = np.zeros(geom.n_points, dtype=int)
    for i in unsatisfied:
        for p in geom.lines[i].points:
            per_point[geom.point_index(p)] += 1
    return HexagonReport(
        n_lines=len(unsatisfied),
        count_ok=len(unsatisfied) == 63,
        covers_all_points=bool((per_point > 0).all()),
        three_per_point=bool((per_point == 3).all()),
    )
