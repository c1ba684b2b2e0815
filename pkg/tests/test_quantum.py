import itertools

import numpy as np
import pytest

from conftest import matrix
from contextuality.pauli import DimensionError, NotALineError, PauliOperator
from contextuality.quantum import (
    NoiseParams,
    StateVector,
    ZERO_NOISE,
    bell_resource,
    context_products,
    embed,
    expectation,
    ghz_resource,
    measure_context,
    measure_observable,
    mirror_op,
)

P = PauliOperator.from_string


def plus_state():
    return StateVector(np.array([1, 1]) / np.sqrt(2))


def test_expectation_examples():
    zero = StateVector.zeros(1)
    assert expectation(zero, P("Z")) == 1
    assert expectation(zero, P("X")) == 0
    assert expectation(bell_resource(1), P("XX")) == pytest.approx(1)
    with pytest.raises(DimensionError):
        expectation(zero, P("ZZ"))


def test_expectation_matches_matrices():
    rng = np.random.default_rng(0)
    state = StateVector.random(3, rng)
    for label in ("XYZ", "ZZI", "YIY", "IXX"):
        ref = np.vdot(state.amplitudes, matrix(label) @ state.amplitudes).real
        assert expectation(state, P(label)) == pytest.approx(ref, abs=1e-12)


def test_bell_resource():
    b1 = bell_resource(1)
    np.testing.assert_allclose(b1.amplitudes, np.array([1, 0, 0, 1]) / np.sqrt(2))
    b2 = bell_resource(2)
    assert b2.n_qubits == 4 and b2.norm == pytest.approx(1)
    # X on qubit 0 (player A) and qubit 2 (player B) share a pair
    assert expectation(b2, P("XIXI")) == pytest.approx(1)
    assert expectation(b2, P("XIIX")) == pytest.approx(0)


def test_measure_deterministic_and_random():
    rng = np.random.default_rng(1)
    rec, post = measure_observable(StateVector.zeros(1), P("Z"), rng)
    assert rec.outcome == 1 and post.norm == pytest.approx(1)
    outcomes = [measure_observable(plus_state(), P("Z"), rng)[0].outcome for _ in range(4000)]
    frac = np.mean(np.array(outcomes) == 1)
    assert abs(frac - 0.5) < 5 * np.sqrt(0.25 / 4000)
    with pytest.raises(ValueError):
        measure_observable(plus_state(), P("I"), rng)


def test_repeated_measurement_is_stable():
    rng = np.random.default_rng(2)
    for _ in range(50):
        state = StateVector.random(2, rng)
        first, post = measure_observable(state, P("XY"), rng)
        second, post2 = measure_observable(post, P("XY"), rng)
        assert first.outcome == second.outcome
        assert abs(post2.norm - 1) < 1e-10


def test_context_product_is_state_independent(w52):
    rng = np.random.default_rng(3)
    lines = [w52.lines[i] for i in rng.choice(w52.n_lines, size=30, replace=False)]
    for _ in range(100):
        state = StateVector.random(3, rng)
        for line in lines:
            recs = measure_context(state, line, ZERO_NOISE, rng)
            assert np.prod([r.outcome for r in recs]) == line.sign


def test_context_products_zero_noise_exact(w52):
    rng = np.random.default_rng(4)
    for line in w52.lines[::20]:
        ops = [w52.operator(p) for p in line.points]
        prods = context_products(StateVector.zeros(3), ops, ZERO_NOISE, 10_000, rng)
        assert prods.mean() == line.sign and prods.var() == 0


def test_measure_context_rejects_non_commuting():
    with pytest.raises(NotALineError):
        measure_context(StateVector.zeros(2), [P("XI"), P("ZI"), P("YI")], ZERO_NOISE, np.random.default_rng())


def test_order_independence(doily):
    rng = np.random.default_rng(5)
    state = StateVector.random(2, rng)
    line = next(l for l in doily.lines if l.negative)
    ops = [doily.operator(p) for p in line.points]
    hists = []
    for perm in itertools.permutations(range(3)):
        seq = [ops[i] for i in perm]
        counts = {}
        for _ in range(1500):
            recs = measure_context(state, seq, ZERO_NOISE, rng)
            vals = {r.observable: r.outcome for r in recs}
            key = tuple(vals[o] for o in ops)
            counts[key] = counts.get(key, 0) + 1
            assert np.prod(key) == line.sign
        hists.append(counts)
    # joint distribution is the same for every order (chi-square style tolerance)
    keys = set().union(*hists)
    for k in keys:
        freqs = np.array([h.get(k, 0) / 1500 for h in hists])
        p = freqs.mean()
        assert np.all(np.abs(freqs - p) < 5 * np.sqrt(max(p * (1 - p), 1e-4) / 1500) + 1e-9)


def test_mirror_op_examples():
    assert mirror_op(P("X")) == (P("X"), 1)
    assert mirror_op(P("Y")) == (P("Y"), -1)
    assert mirror_op(P("Z")) == (P("Z"), 1)
    b = bell_resource(1)
    assert expectation(b, P("YY")) == pytest.approx(-1)
    assert expectation(b, P("ZZ")) == pytest.approx(1)


def test_mirror_correlation_two_qubits():
    rng = np.random.default_rng(6)
    res = bell_resource(2)
    for label in (l for l in map("".join, itertools.product("IXYZ", repeat=2)) if l != "II"):
        op = P(label)
        mirror, sign = mirror_op(op)
        a, b = embed(op, 0, 4), embed(mirror, 2, 4)
        for _ in range(1000 // 50):
            state = res
            for _ in range(50):
                ra, post = measure_observable(state, a, rng)
                rb, _ = measure_observable(post, b, rng)
                assert ra.outcome == sign * rb.outcome


def test_ghz_resource_four_parties():
    g = ghz_resource(3, 4)
    assert g.n_qubits == 12 and g.norm == pytest.approx(1)
    for label in ("YYY", "XYZ", "ZZI"):
        op = P(label)
        full = PauliOperator(12, 0, 0)
        for k in range(4):
            e = embed(op, 3 * k, 12)
            full = PauliOperator(12, full.x ^ e.x, full.z ^ e.z)
        assert expectation(g, full) == pytest.approx(1)


def test_noise_params_validation():
    with pytest.raises(ValueError):
        NoiseParams(1.5, 0)
    assert NoiseParams.parse("0.1,0.2") == NoiseParams(0.1, 0.2)
    with pytest.raises(ValueError):
        NoiseParams.parse("0.1")


def test_full_readout_noise_decorrelates(doily):
    rng = np.random.default_rng(7)
    line = doily.lines[0]
    prods = context_products(StateVector.zeros(2), [doily.operator(p) for p in line.points], NoiseParams(0, 0.5), 10_000, rng)
    assert abs(prods.mean()) < 5 / np.sqrt(10_000)


def test_noise_monotone_in_readout(w52):
    line = w52.lines[10]
    ops = [w52.operator(p) for p in line.points]
    means = []
    for p in (0.0, 0.02, 0.05, 0.1, 0.2):
        prods = context_products(StateVector.zeros(3), ops, NoiseParams(0.0, p), 10_000, np.random.default_rng(8))
        means.append(abs(prods.mean()))
    se = 1 / np.sqrt(10_000)
    assert all(b <= a + 5 * se for a, b in zip(means, means[1:]))
    assert means[0] == 1 and means[-1] < means[0]


def test_depolarizing_degrades_but_keeps_norm(w52):
    line = w52.lines[3]
    ops = [w52.operator(p) for p in line.points]
    prods = context_products(StateVector.zeros(3), ops, NoiseParams(0.05, 0), 10_000, np.random.default_rng(9))
    assert 0.3 < abs(prods.mean()) < 1
