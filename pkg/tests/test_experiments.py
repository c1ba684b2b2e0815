import math

import numpy as np
import pytest

from contextuality.experiments import (
    ConsistencyError,
    ContextEstimate,
    InvariantViolation,
    bound_check,
    chi_from_estimates,
    degree_for,
    extract_subgeometry_chi,
    histogram_edges,
    histogram_svg,
    rio_negro_run,
)
from contextuality.quantum import NoiseParams, ZERO_NOISE


@pytest.mark.parametrize(
    "name,L", [("w52", 315), ("square", 6), ("doily", 15), ("elliptic", 45), ("hyperbolic", 105)]
)
@pytest.mark.parametrize("state", ["zeros", "random"])
def test_noiseless_chi_equals_L(request, name, L, state):
    geom = request.getfixturevalue(name)
    run = rio_negro_run(geom, shots=200, state=state, seed=1)
    assert run.report.chi == L and run.report.stderr == 0
    assert all(e.stderr == 0 and abs(e.mean_product) == 1 for e in run.estimates)
    assert run.report.violated


def test_full_readout_noise_gives_zero(doily):
    run = rio_negro_run(doily, shots=4000, noise=NoiseParams(0, 0.5), seed=2, d=3)
    assert abs(run.report.chi) < 5 * run.report.stderr
    assert not run.report.violated


@pytest.mark.parametrize(
    "chi,L,d,se,verdict",
    [(264.22, 315, 63, 0.5, "violates_nchv"), (5.3076, 6, 1, 0.01, "violates_nchv"),
     (188.0, 315, 63, 0.5, "consistent_with_nchv"), (4.0, 6, 1, 0.0, "consistent_with_nchv")],
)
def test_bound_check_examples(chi, L, d, se, verdict):
    assert bound_check(chi, L, d, se)[0] == verdict


def test_bound_check_sigma():
    verdict, sigma = bound_check(200.0, 315, 63, 2.0)
    assert verdict == "violates_nchv" and sigma == pytest.approx(5.5)
    assert bound_check(15.0, 15, 3, 0.0)[1] == math.inf


def test_bound_check_rejects_super_quantum():
    with pytest.raises(InvariantViolation):
        bound_check(16.0, 15, 3, 0.1)
    bound_check(15.3, 15, 3, 0.1)  # within 5 SE


def test_degree_for(square, doily, w52):
    assert degree_for(square) == (1, "exact")
    assert degree_for(doily) == (3, "exact")
    assert degree_for(w52) == (63, "reference")


def test_chi_additivity(doily):
    run = rio_negro_run(doily, shots=500, noise=NoiseParams(0.02, 0.02), seed=3, d=3)
    total, _ = chi_from_estimates(doily, run.estimates)
    a, _ = chi_from_estimates(doily, run.estimates, range(0, 7))
    b, _ = chi_from_estimates(doily, run.estimates, range(7, 15))
    assert total == pytest.approx(a + b)
    assert total == pytest.approx(run.report.chi)


def test_missing_line_raises(doily):
    est = [ContextEstimate(i, 10, 1.0, 0.0) for i in range(14)]
    with pytest.raises(ConsistencyError):
        chi_from_estimates(doily, est)


def test_noise_lowers_chi_monotonically(doily):
    chis = [rio_negro_run(doily, shots=5000, noise=NoiseParams(p, p), seed=4, d=3).report for p in (0, 0.02, 0.05, 0.1)]
    for a, b in zip(chis, chis[1:]):
        assert b.chi <= a.chi + 5 * math.hypot(a.stderr, b.stderr)
    assert chis[-1].chi < 15


def test_same_seed_same_run(square):
    noise = NoiseParams(0.01, 0.01)
    a = rio_negro_run(square, shots=1000, noise=noise, seed=7, d=1)
    b = rio_negro_run(square, shots=1000, noise=noise, seed=7, d=1)
    assert a.estimates == b.estimates
    c = rio_negro_run(square, shots=1000, noise=noise, seed=8, d=1)
    assert a.estimates != c.estimates


def test_shots_validation(square):
    with pytest.raises(ValueError):
        rio_negro_run(square, shots=0)
    with pytest.raises(ValueError):
        rio_negro_run(square, shots=10, state="plus")


def test_extraction_noiseless(w52, w52_squares, w52_doilies, quadrics):
    run = rio_negro_run(w52, shots=10, seed=0, d=63)
    sq = extract_subgeometry_chi(run, w52_squares, "square", 1)
    dl = extract_subgeometry_chi(run, w52_doilies, "doily", 3)
    ell = [q.points for q in quadrics if q.name.startswith("E_")]
    hyp = [q.points for q in quadrics if q.name.startswith("H_")]
    el = extract_subgeometry_chi(run, ell, "elliptic", 9)
    hy = extract_subgeometry_chi(run, hyp, "hyperbolic", 21)
    for h, L, count in ((sq, 6, 3360), (dl, 15, 1344), (el, 45, 28), (hy, 105, 36)):
        assert h.L == L and h.chis.size == count
        assert np.all(h.chis == L) and h.violation_fraction == 1.0
        assert h.counts.sum() == count and h.counts[-1] == count


def test_extraction_matches_line_sums(w52):
    noise = NoiseParams(0.01, 0.01)
    run = rio_negro_run(w52, shots=300, noise=noise, seed=5, d=63)
    from contextuality.geometry import enumerate_subgeometries, subgeometry_line_indices

    pts = enumerate_subgeometries(w52, "square")[:5]
    h = extract_subgeometry_chi(run, pts, "square", 1)
    for chi, p in zip(h.chis, pts):
        lines = subgeometry_line_indices(w52, p)
        assert len(lines) == 6
        ref = sum(w52.lines[i].sign * run.estimates[i].mean_product for i in lines)
        assert chi == pytest.approx(ref)


def test_extraction_rejects_mixed_sizes(w52, w52_squares, w52_doilies):
    run = rio_negro_run(w52, shots=5, seed=0, d=63)
    with pytest.raises(ConsistencyError):
        extract_subgeometry_chi(run, [w52_squares[0], w52_doilies[0]], "mixed", 1)


def test_histogram_edges_and_svg(w52, w52_squares):
    edges = histogram_edges(15, 3)
    assert edges[0] == 8 and edges[-1] == 15 and edges.size == 21
    run = rio_negro_run(w52, shots=50, noise=NoiseParams(0.01, 0.01), seed=0, d=63)
    svg = histogram_svg(extract_subgeometry_chi(run, w52_squares, "square", 1))
    assert svg.startswith("<svg") and svg.rstrip().endswith("</svg>")


def test_zero_noise_report_dict(square):
    d = rio_negro_run(square, shots=10, noise=ZERO_NOISE).report.to_dict()
    assert d["chi"] == 6 and d["nchv_bound"] == 4 and d["qm_bound"] == 6 and d["sigma"] == "inf"
