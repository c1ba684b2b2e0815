import itertools
import json
from collections import Counter

import numpy as np
import pytest

from conftest import all_labels, matrix, matrix_scalar
from contextuality.degree import exhaustive_degree
from contextuality.geometry import (
    ConfigurationError,
    IncidenceGeometry,
    LineRecord,
    QuadricSpec,
    build_quadric,
    build_symplectic_space,
    enumerate_quadrics,
    enumerate_subgeometries,
    is_point_transitive,
    subgeometry_line_indices,
)
from contextuality.pauli import DimensionError, PauliOperator, multiply

P = PauliOperator.from_string


def _commute(a: str, b: str) -> bool:
    ma, mb = matrix(a), matrix(b)
    return np.allclose(ma @ mb, mb @ ma)


def brute_lines(n):
    """Commuting closing triples by explicit matrices: {frozenset(labels): sign}."""
    labels = [l for l in all_labels(n) if set(l) != {"I"}]
    out = {}
    for a, b in itertools.combinations(labels, 2):
        if not _commute(a, b):
            continue
        for c in labels:
            if c in (a, b) or not (_commute(a, c) and _commute(b, c)):
                continue
            s = matrix_scalar(matrix(a) @ matrix(b) @ matrix(c))
            if s is not None:
                out[frozenset((a, b, c))] = round(s.real)
    return out


@pytest.mark.parametrize("n, points, lines", [(1, 3, 0), (2, 15, 15), (3, 63, 315)])
def test_symplectic_space_counts(n, points, lines):
    g = build_symplectic_space(n)
    assert (g.n_points, g.n_lines) == (points, lines)


def test_w52_negative_lines(w52):
    assert w52.n_negative == 90


def test_doily_lines_match_matrix_oracle(doily):
    oracle = brute_lines(2)
    ours = {frozenset(doily.label(p) for p in l.points): l.sign for l in doily.lines}
    assert ours == oracle
    # the canonical labelling has three negative lines
    assert sum(s == -1 for s in oracle.values()) == 3 == doily.n_negative


def test_symplectic_space_range():
    with pytest.raises(ConfigurationError):
        build_symplectic_space(0)
    with pytest.raises(ConfigurationError):
        build_symplectic_space(5)
    assert build_symplectic_space(4).n_points == 255


def test_mermin_square(square, doily):
    assert square.n_points == 9
    assert square.n_lines == 6
    negative = [l for l in square.lines if l.negative]
    assert len(negative) == 1
    assert sorted(square.label(p) for p in negative[0].points) == ["XY", "YZ", "ZX"]
    assert Counter(len(t) for t in square.lines_through) == {2: 9}
    key = tuple(sorted(P(s).id for s in ("XI", "IX", "XX")))
    assert square.lines[square.line_index[key]].sign == 1
    h = build_quadric("IX", doily)
    assert (h.points, h.lines) == (square.points, square.lines)


def test_line_closure(w52):
    for line in w52.lines:
        a, b, c = (w52.operator(p) for p in line.points)
        assert multiply(a, b).op == c


def test_w52_regularity(w52):
    assert all(len(t) == 15 for t in w52.lines_through)
    labels = [w52.label(p) for p in w52.points]
    for a in labels[:10]:
        assert sum(_commute(a, b) for b in labels if b != a) == 30
    for j, p in enumerate(w52.points):
        collinear = {q for i in w52.lines_through[j] for q in w52.lines[i].points} - {p}
        assert len(collinear) == 30


def test_quadric_kind():
    assert QuadricSpec(P("YYY")).kind == "elliptic"
    assert QuadricSpec(P("IXZ")).kind == "hyperbolic"
    assert QuadricSpec(P("III")).kind == "hyperbolic"


def test_quadric_examples(elliptic, hyperbolic, w52):
    assert (elliptic.n_points, elliptic.n_lines) == (27, 45)
    assert (hyperbolic.n_points, hyperbolic.n_lines) == (35, 105)
    assert build_quadric("III", w52).n_points == 35


def _quadric_oracle(center: str, n: int):
    """Membership by explicit matrix commutation and string Y counts."""
    out = set()
    for q in all_labels(n):
        if set(q) == {"I"}:
            continue
        sym = q.count("Y") % 2 == 0
        if _commute(center, q) == sym:
            out.add(q)
    return out


@pytest.mark.parametrize("center", ["YYY", "IXI", "XYZ", "III", "YII"])
def test_quadric_points_match_oracle(center, w52):
    q = build_quadric(center, w52)
    assert {q.label(p) for p in q.points} == _quadric_oracle(center, 3)


def test_quadric_dimension_error(w52):
    with pytest.raises(DimensionError):
        build_quadric("XY", w52)


def test_enumerate_quadrics(quadrics, doily):
    kinds = Counter((q.name[:2], q.n_points, q.n_lines) for q in quadrics)
    assert kinds == {("E_", 27, 45): 28, ("H_", 35, 105): 36}
    # 35 symmetric nontrivial centers plus the identity
    assert sum(q.name.startswith("H_") and set(q.name[2:]) != {"I"} for q in quadrics) == 35
    small = Counter((q.name[:2], q.n_points, q.n_lines) for q in enumerate_quadrics(doily))
    assert small == {("H_", 9, 6): 10, ("E_", 5, 0): 6}


def test_quadrics_are_hyperplanes(quadrics, w52):
    for q in quadrics:
        pts = set(q.points)
        assert all(len(pts.intersection(l.points)) in (1, 3) for l in w52.lines)


def test_subgeometry_counts(w52_squares, w52_doilies, doily):
    assert len(w52_squares) == 3360
    assert len(w52_doilies) == 1344
    assert enumerate_subgeometries(doily, "doily") == [doily.points]
    assert len(enumerate_subgeometries(doily, "square")) == 10


def test_models_are_point_transitive(square, doily):
    assert is_point_transitive(square)
    assert is_point_transitive(doily)


def test_unsupported_model(w52):
    with pytest.raises(ConfigurationError):
        enumerate_subgeometries(w52, "hexagon")


@pytest.mark.parametrize("family, size, n_lines, degree", [("squares", 9, 6, 1), ("doilies", 15, 15, 3)])
def test_embedded_copies_keep_their_degree(request, w52, family, size, n_lines, degree):
    copies = request.getfixturevalue(f"w52_{family}")
    rng = np.random.default_rng(0)
    picks = rng.choice(len(copies), size=40, replace=False)
    for i in picks:
        pts = copies[i]
        assert len(pts) == size
        assert len(subgeometry_line_indices(w52, pts)) == n_lines
        assert exhaustive_degree(w52.restrict(pts, "copy")).degree == degree


def test_json_round_trip(elliptic, tmp_path):
    path = tmp_path / "e.json"
    elliptic.save(path)
    data = json.loads(path.read_text())
    assert set(data) == {"name", "n_qubits", "points", "lines"}
    assert data["points"][0] == elliptic.label(elliptic.points[0])
    again = IncidenceGeometry.load(path)
    assert again == elliptic


def test_json_rejects_wrong_sign(square):
    data = square.to_dict()
    data["lines"][0]["sign"] *= -1
    with pytest.raises(ConfigurationError):
        IncidenceGeometry.from_dict(data)


def test_geometry_validation():
    a, b, c = (P(s).id for s in ("XI", "IX", "XX"))
    with pytest.raises(ConfigurationError):
        IncidenceGeometry("bad", 2, (a, b), (LineRecord((a, b, c), 1),))
    with pytest.raises(ConfigurationError):
        IncidenceGeometry("dup", 2, (a, b, c), (LineRecord((a, b, c), 1), LineRecord((c, b, a), 1)))
