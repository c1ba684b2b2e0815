"""Point-line geometries of N-qubit Pauli operators.

Points are nontrivial operators (stored by point id), lines are commuting
triples closing to the identity, each carrying the sign of its product.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from functools import cached_property
from pathlib import Path

import numpy as np

from .pauli import PauliOperator, is_symmetric, line_sign, symplectic_form

MAX_QUBITS = 4


class ConfigurationError(ValueError):
    """Unsupported or inconsistent geometry request."""


@dataclass(frozen=True, order=True)
class LineRecord:
    points: tuple[int, int, int]
    sign: int

    def __post_init__(self):
        if len(self.points) != 3 or len(set(self.points)) != 3:
            raise ConfigurationError(f"a line needs three distinct points, got {self.points}")
        if tuple(sorted(self.points)) != tuple(self.points):
            object.__setattr__(self, "points", tuple(sorted(self.points)))
        if self.sign not in (1, -1):
            raise ConfigurationError(f"line sign must be +1 or -1, got {self.sign}")

    @classmethod
    def from_ids(cls, ids, n_qubits: int) -> "LineRecord":
        ops = [PauliOperator.from_id(i, n_qubits) for i in ids]
        return cls(tuple(sorted(ids)), line_sign(*ops))

    @property
    def negative(self) -> bool:
        return self.sign == -1


@dataclass(frozen=True)
class IncidenceGeometry:
    """Sign-labelled point-line geometry.

    ``points`` is sorted by point id; ``lines`` is sorted by point triple.
    Use :meth:`point_index` and :attr:`line_index` to go from ids to positions.
    """

    name: str
    n_qubits: int
    points: tuple[int, ...]
    lines: tuple[LineRecord, ...]
    _index: dict = field(default=None, init=False, repr=False, compare=False)

    def __post_init__(self):
        pts = tuple(sorted(self.points))
        if len(set(pts)) != len(pts):
            raise ConfigurationError("duplicate points")
        if 0 in pts:
            raise ConfigurationError("the identity is not a point")
        lines = tuple(sorted(self.lines))
        if len(set(l.points for l in lines)) != len(lines):
            raise ConfigurationError("duplicate lines")
        pset = set(pts)
        for line in lines:
            if not pset.issuperset(line.points):
                raise ConfigurationError(f"line {line.points} leaves the point set")
            a, b, c = line.points
            if a ^ b ^ c:
                raise ConfigurationError(f"line {line.points} does not close to the identity")
        object.__setattr__(self, "points", pts)
        object.__setattr__(self, "lines", lines)
        object.__setattr__(self, "_index", {p: i for i, p in enumerate(pts)})

    @property
    def n_points(self) -> int:
        return len(self.points)

    @property
    def n_lines(self) -> int:
        return len(self.lines)

    @property
    def n_negative(self) -> int:
        return sum(line.negative for line in self.lines)

    def point_index(self, pid: int) -> int:
        return self._index[pid]

    def operator(self, pid: int) -> PauliOperator:
        return PauliOperator.from_id(pid, self.n_qubits)

    def label(self, pid: int) -> str:
        return str(self.operator(pid))

    @cached_property
    def line_index(self) -> dict[tuple[int, int, int], int]:
        return {line.points: i for i, line in enumerate(self.lines)}

    @cached_property
    def incidence(self) -> np.ndarray:
        """Boolean line-by-point incidence matrix."""
        m = np.zeros((self.n_lines, self.n_points), dtype=bool)
        for i, line in enumerate(self.lines):
            for p in line.points:
                m[i, self._index[p]] = True
        return m

    @cached_property
    def lines_through(self) -> tuple[tuple[int, ...], ...]:
        """Line indices incident with each point (by point index)."""
        out = [[] for _ in self.points]
        for i, line in enumerate(self.lines):
            for p in line.points:
                out[self._index[p]].append(i)
        return tuple(tuple(v) for v in out)

    @cached_property
    def sign_bits(self) -> np.ndarray:
        return np.array([line.negative for line in self.lines], dtype=np.uint8)

    def restrict(self, point_ids, name: str) -> "IncidenceGeometry":
        """Subgeometry on ``point_ids`` with every line wholly inside it."""
        keep = set(point_ids)
        lines = tuple(l for l in self.lines if keep.issuperset(l.points))
        return IncidenceGeometry(name, self.n_qubits, tuple(sorted(keep)), lines)

    def to_dict(self) -> dict:
        return {
            "name": self.name,
            "n_qubits": self.n_qubits,
            "points": [self.label(p) for p in self.points],
            "lines": [
                {"points": [self._index[p] for p in l.points], "sign": l.sign} for l in self.lines
            ],
        }

    @classmethod
    def from_dict(cls, data: dict) -> "IncidenceGeometry":
        n = int(data["n_qubits"])
        ops = [PauliOperator.from_string(s) for s in data["points"]]
        if any(op.n_qubits != n for op in ops):
            raise ConfigurationError("point label length differs from n_qubits")
        ids = [op.id for op in ops]
        lines = []
        for entry in data["lines"]:
            rec = LineRecord.from_ids([ids[i] for i in entry["points"]], n)
            if "sign" in entry and int(entry["sign"]) != rec.sign:
                raise ConfigurationError(f"stored sign of line {entry['points']} is wrong")
            lines.append(rec)
        return cls(data["name"], n, tuple(ids), tuple(lines))

    def dumps(self) -> str:
        return json.dumps(self.to_dict(), indent=1)

    def save(self, path) -> None:
        Path(path).write_text(self.dumps() + "\n")

    @classmethod
    def load(cls, path) -> "IncidenceGeometry":
        return cls.from_dict(json.loads(Path(path).read_text()))


def _commute_ids(a: int, b: int, n: int) -> bool:
    mask = (1 << n) - 1
    return bin(((a >> n) & b) ^ ((b >> n) & a & mask)).count("1") % 2 == 0


def commutation_table(n_qubits: int) -> np.ndarray:
    """``table[a, b]`` is True when point ids ``a`` and ``b`` commute."""
    ids = np.arange(4**n_qubits)
    mask = (1 << n_qubits) - 1
    x, z = ids >> n_qubits, ids & mask
    overlap = (x[:, None] & z[None, :]) ^ (z[:, None] & x[None, :])
    parity = np.zeros_like(overlap)
    for s in range(n_qubits):
        parity ^= (overlap >> s) & 1
    return parity == 0


def build_symplectic_space(n_qubits: int) -> IncidenceGeometry:
    """W(2N-1, 2): all nontrivial N-qubit operators, lines = commuting closing triples."""
    if not 1 <= n_qubits <= MAX_QUBITS:
        raise ConfigurationError(f"n_qubits must lie in 1..{MAX_QUBITS}, got {n_qubits}")
    size = 4**n_qubits
    table = commutation_table(n_qubits)
    lines = []
    for a in range(1, size):
        for b in np.flatnonzero(table[a, a + 1 :]) + a + 1:
            c = a ^ int(b)
            if c > b:
                lines.append(LineRecord.from_ids((a, int(b), c), n_qubits))
    name = f"W({2 * n_qubits - 1},2)"
    return IncidenceGeometry(name, n_qubits, tuple(range(1, size)), tuple(lines))


def build_doily() -> IncidenceGeometry:
    g = build_symplectic_space(2)
    return IncidenceGeometry("doily", 2, g.points, g.lines)


MERMIN_SQUARE_LABELS = (
    ("ZI", "IX", "ZX"),
    ("IY", "XI", "XY"),
    ("ZY", "XX", "YZ"),
)


def build_mermin_square() -> IncidenceGeometry:
    """The Peres-Mermin square; the hyperbolic quadric H_IX of the doily..

    Rows and columns of ``MERMIN_SQUARE_LABELS`` are the six contexts; the
    only negative one is the last column {ZX, XY, YZ}.
    """
    grid = [[PauliOperator.from_string(s).id for s in row] for row in MERMIN_SQUARE_LABELS]
    triples = [tuple(row) for row in grid] + [tuple(col) for col in zip(*grid)]
    lines = tuple(LineRecord.from_ids(t, 2) for t in triples)
    points = tuple(p for row in grid for p in row)
    return IncidenceGeometry("square", 2, points, lines)


@dataclass(frozen=True)
class QuadricSpec:
    center: PauliOperator

    @property
    def kind(self) -> str:
        return "hyperbolic" if is_symmetric(self.center) else "elliptic"

    @property
    def name(self) -> str:
        return ("H_" if self.kind == "hyperbolic" else "E_") + str(self.center)


def quadric_points(center: PauliOperator, ambient: IncidenceGeometry) -> tuple[int, ...]:
    n = ambient.n_qubits
    if center.n_qubits != n:
        from .pauli import DimensionError

        raise DimensionError(f"center {center} does not act on {n} qubits")
    out = []
    for pid in ambient.points:
        q = PauliOperator.from_id(pid, n)
        if (symplectic_form(center, q) == 0) == is_symmetric(q):
            out.append(pid)
    return tuple(out)


def build_quadric(spec: QuadricSpec | PauliOperator | str, ambient: IncidenceGeometry) -> IncidenceGeometry:
    """Quadric centred on ``spec.center`` together with every ambient line inside it.

    Members commute with the center and are symmetric, or anticommute with
    it and are skew.
    """
    if isinstance(spec, str):
        spec = PauliOperator.from_string(spec)
    if isinstance(spec, PauliOperator):
        spec = QuadricSpec(spec)
    return ambient.restrict(quadric_points(spec.center, ambient), spec.name)


def enumerate_quadrics(ambient: IncidenceGeometry) -> list[IncidenceGeometry]:
    """All distinct quadrics of ``ambient``, one per center, identity included."""
    n = ambient.n_qubits
    seen: dict[tuple[int, ...], str] = {}
    out = []
    for pid in (0,) + ambient.points:
        spec = QuadricSpec(PauliOperator.from_id(pid, n))
        pts = quadric_points(spec.center, ambient)
        if pts in seen:
            # centers are expected to give distinct quadrics
            raise ConfigurationError(f"{spec.name} repeats {seen[pts]}")
        seen[pts] = spec.name
        out.append(ambient.restrict(pts, spec.name))
    return out


def _collinearity(model: IncidenceGeometry) -> list[set[int]]:
    col = [set() for _ in model.points]
    for line in model.lines:
        idx = [model.point_index(p) for p in line.points]
        for i in idx:
            col[i].update(j for j in idx if j != i)
    return col


def _embedding_order(col: list[set[int]]) -> list[int]:
    order, seen = [0], {0}
    while len(order) < len(col):
        nxt = max((v for v in range(len(col)) if v not in seen), key=lambda v: (len(col[v] & seen), -v))
        order.append(nxt)
        seen.add(nxt)
    return order


def _embeddings(model, ambient, table, min_root: bool):
    """Yield point-id images of every embedding of ``model`` into ``ambient``.

    Collinear model points map to commuting (collinear) ambient points and
    non-collinear ones to anticommuting points; the third point of a line
    is forced by the first two. With ``min_root`` the image of model point 0
    must be the smallest image, valid when the model is point-transitive.
    """
    P = model.n_points
    col = _collinearity(model)
    order = _embedding_order(col)
    line_pts = [[model.point_index(p) for p in l.points] for l in model.lines]
    lines_of = [[[u for u in l if u != v] for l in line_pts if v in l] for v in range(P)]
    amb = np.array(ambient.points)
    img = [-1] * P
    used = set()

    def rec(k):
        if k == P:
            yield tuple(img)
            return
        v = order[k]
        root = img[order[0]] if k else -1
        forced = None
        for a, b in lines_of[v]:
            if img[a] >= 0 and img[b] >= 0:
                c = img[a] ^ img[b]
                if forced is not None and forced != c:
                    return
                forced = c
        if forced is not None:
            cands = [forced]
        else:
            mask = np.ones(len(amb), dtype=bool)
            for u in range(P):
                if img[u] >= 0:
                    mask &= table[img[u], amb] if u in col[v] else ~table[img[u], amb]
            cands = amb[mask].tolist()
        for c in cands:
            if c in used or (min_root and k and c <= root):
                continue
            if forced is not None and not all(
                table[img[u], c] == (u in col[v]) for u in range(P) if img[u] >= 0
            ):
                continue
            if c not in ambient._index:
                continue
            img[v] = c
            used.add(c)
            yield from rec(k + 1)
            used.discard(c)
            img[v] = -1

    yield from rec(0)


def is_point_transitive(model: IncidenceGeometry) -> bool:
    """Whether the automorphism group of ``model`` moves point 0 everywhere."""
    table = commutation_table(model.n_qubits)
    orbit = {img[0] for img in _embeddings(model, model, table, min_root=False)}
    return orbit == set(model.points)


SUBGEOMETRY_MODELS = {"square": build_mermin_square, "doily": build_doily}


def enumerate_subgeometries(ambient: IncidenceGeometry, model: IncidenceGeometry | str) -> list[tuple[int, ...]]:
    """Sorted point sets of every copy of ``model`` embedded in ``ambient``.

    Copies are found by depth-first embedding search and deduplicated on
    their point sets; each copy's lines are ambient lines by construction.
    """
    if isinstance(model, str):
        if model not in SUBGEOMETRY_MODELS:
            raise ConfigurationError(f"unsupported model {model!r}; choose from {sorted(SUBGEOMETRY_MODELS)}")
        model = SUBGEOMETRY_MODELS[model]()
    if model.name not in SUBGEOMETRY_MODELS:
        raise ConfigurationError(f"unsupported model {model.name!r}")
    table = commutation_table(ambient.n_qubits)
    transitive = is_point_transitive(model)
    found = {tuple(sorted(img)) for img in _embeddings(model, ambient, table, min_root=transitive)}
    return sorted(found)


def subgeometry_line_indices(ambient: IncidenceGeometry, point_set) -> list[int]:
    keep = set(point_set)
    return [i for i, l in enumerate(ambient.lines) if keep.issuperset(l.points)]
