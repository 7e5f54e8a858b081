import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from generators import random_oca as _random_oca
from generators import random_zero_run as _random_zero_run
from oracles import PI0, woca_reach_weights

from tvass import Tvass, UsageError, apply_trace, conf, oracle_reach
from tvass.smallsol import Inconclusive
from tvass.woca import (
    ConstructionError,
    Woca,
    check_weight_certificate,
    cut_short_cycles,
    hill_cut,
    lps_weight_certificate,
    run_weight_mod,
    short_run,
    short_signed_run,
    tvass_to_woca,
    weight,
)

O1 = Tvass.build(1, ["p"], [("t+", "p", (1,), "p"), ("t-", "p", (-1,), "p")])
W1 = Woca.build(["p"], [("t0", "p", 0, "p", 1)])


def test_conversion_shapes(ex):
    w, tm = tvass_to_woca(ex)
    assert len(tm.chains["dAA"]) == 7
    assert [w.base.transition(t).action for t in tm.chains["dAA"]] == [(-1,)] * 3 + [(0,)] * 4
    assert [w.weights[t] for t in tm.chains["dAA"]] == [0] * 3 + [1] * 4
    assert tm.chains["dAB"] == ("dAB",) and w.base.transition("dAB").is_test and w.weights["dAB"] == 0
    assert [(w.base.transition(t).action, w.weights[t]) for t in tm.chains["dBB"]] == [((1,), 0), ((0,), -1)]
    assert tm.to_tvass(tm.to_woca(PI0)) == PI0
    assert weight(w, tm.to_woca(PI0)) == 2
    with pytest.raises(UsageError):
        tm.to_tvass(tm.to_woca(PI0)[:2])


def test_conversion_round_trip_replays(ex):
    w, tm = tvass_to_woca(ex)
    end = apply_trace(w.base, conf("A", 0), tm.to_woca(PI0))
    assert end == conf("A", 0)


def test_conversion_disambiguates_colliding_steps():
    m = Tvass.build(2, ["p", "q"], [("u", "p", (0, 1), "q"), ("d", "p", (0, -1), "q")])
    w, tm = tvass_to_woca(m)
    lengths = sorted(len(c) for c in tm.chains.values())
    assert lengths == [2, 2]
    triples = {}
    for t in w.base.transitions:
        key = (t.source, t.action, t.target)
        assert triples.setdefault(key, w.weights[t.id]) == w.weights[t.id]


def test_conversion_rejects_wrong_dimension():
    with pytest.raises(UsageError):
        tvass_to_woca(O1)


def test_weight_examples():
    assert weight(W1, ()) == 0
    assert weight(W1, ("t0",) * 5) == 5


def test_woca_validation():
    with pytest.raises(UsageError):
        Woca.build(["p"], [("t", "p", 2, "p", 0)])
    with pytest.raises(UsageError):
        Woca.build(["p"], [("t", "p", 1, "p", 3)])


def test_hill_cut_examples():
    pi = ("t+",) * 4 + ("t-",) * 4
    f = hill_cut(O1, "p", pi, 1)
    assert not f.low and f.beta == (("t+",),) and f.theta == (("t-",),)
    assert f.concatenation() == pi
    for n in range(4):
        assert apply_trace(O1, conf("p", 0), f.pump([n])) == conf("p", 0)
    f = hill_cut(O1, "p", ("t+", "t-") * 4, 2)
    assert f.low and f.theta == ((), ()) and f.gamma == ()
    assert f.concatenation() == ("t+", "t-") * 4
    with pytest.raises(UsageError):
        hill_cut(O1, "p", (), 1)


def test_cut_short_cycles_examples():
    pi = ("t+",) * 4 + ("t-",) * 4
    f = cut_short_cycles(O1, "p", pi)
    assert (f.x, f.d) == (1, 1) and f.beta == ("t+",) and f.theta == ("t-",)
    assert f.pump(1) == pi
    for n in range(4):
        assert apply_trace(O1, conf("p", 0), f.pump(n)) == conf("p", 0)
    g = cut_short_cycles(O1, "p", ("t+", "t-") * 3)
    assert g.d == 0 and g.theta == () and g.beta
    with pytest.raises(UsageError):
        cut_short_cycles(O1, "p", ("t+",))


def test_short_run_examples():
    assert short_run(O1, "p", 0, "p", 2) == ("t+", "t+")
    assert short_run(O1, "p", 0, "p", 0) == ()
    only_down = Tvass.build(1, ["p"], [("t-", "p", (-1,), "p")])
    assert short_run(only_down, "p", 0, "p", 1) is None


def test_short_run_cap_is_inconclusive():
    chain = Tvass.build(1, ["p"], [("t+", "p", (1,), "p")])
    with pytest.raises(Inconclusive):
        short_run(chain, "p", 0, "p", 5, cap=3)


def test_short_signed_run_examples(ex):
    r = short_signed_run(W1, "p", "p", +1)
    assert r.trace == ("t0",)
    r = short_signed_run(W1, "p", "p", -1, cap=539)
    assert r.trace is None and r.complete
    w, tm = tvass_to_woca(ex)
    r = short_signed_run(w, "A", "A", +1)
    assert weight(w, r.trace) == 2 and tm.to_tvass(r.trace) == PI0


def test_run_weight_mod_examples():
    assert run_weight_mod(W1, "p", "p", 5, 3) == ("t0", "t0")
    assert run_weight_mod(W1, "p", "p", 0, 1) == ()
    two = Woca.build(["p", "q"], [("t0", "p", 0, "p", 1)])
    assert run_weight_mod(two, "p", "q", 1, 2) is None


def test_lps_weight_certificate_examples(ex):
    c = lps_weight_certificate(W1, "p", "p", 7)
    assert c.w == 7 and weight(W1, c.trace()) == 7 and check_weight_certificate(W1, "p", "p", c)
    c = lps_weight_certificate(W1, "p", "p", 0)
    assert c.n == 0 and c.alpha == ()
    w, tm = tvass_to_woca(ex)
    c = lps_weight_certificate(w, "A", "A", 4)
    assert c.n == 2 and tm.to_tvass(c.beta) == PI0 and check_weight_certificate(w, "A", "A", c)


def test_lps_weight_certificate_detects_bad_precondition():
    with pytest.raises(ConstructionError):
        lps_weight_certificate(W1, "p", "p", -3)
    two = Woca.build(["p", "q"], [("t0", "p", 0, "p", 1)])
    assert lps_weight_certificate(two, "p", "q", 0) is None


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 10**6))
def test_extractors_on_random_runs(seed):
    rng = random.Random(seed)
    w = _random_oca(rng, rng.randint(1, 2))
    Q = w.num_states
    m = rng.randint(1, 2)
    found = _random_zero_run(w, rng, max(m * m * Q**3, 2 * Q**3))
    if found is None:
        return
    p, pi = found
    end = apply_trace(w.base, conf(p, 0), pi)
    f = hill_cut(w, p, pi, m)
    assert f.concatenation() == pi
    assert all(b + t for b, t in zip(f.beta, f.theta))
    for ns in [(0,) * m, (3,) * m, tuple(rng.randint(0, 3) for _ in range(m))]:
        assert apply_trace(w.base, conf(p, 0), f.pump(ns)) == end
    g = cut_short_cycles(w, p, pi)
    assert g.pump(1) == pi and g.beta + g.theta
    assert len(g.beta + g.theta) <= 2 * Q**3 and g.x + g.d <= 2 * Q * Q
    assert not any(w.base.transition(t).is_test for t in g.gamma)
    for n in range(4):
        assert apply_trace(w.base, conf(p, 0), g.pump(n)) == end


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 10**6))
def test_weight_certificates_on_random_wocas(seed):
    rng = random.Random(seed)
    w = _random_oca(rng, rng.randint(1, 3))
    p, q = rng.choice(w.base.states), rng.choice(w.base.states)
    if short_run(w, q, 0, p, 0) is None:
        return
    weights = sorted(v for v in woca_reach_weights(w, p, q, 12, counter_cap=8) if abs(v) <= 10)
    for target in weights[:3]:
        c = lps_weight_certificate(w, p, q, target)
        assert check_weight_certificate(w, p, q, c)


def test_conversion_direction_on_example(ex):
    w, tm = tvass_to_woca(ex)
    for x in range(8):
        for y in range(8):
            v = oracle_reach(ex, conf("A", 0, x), conf("A", 0, y))
            if v.certificate is not None:
                pi = tm.to_woca(v.certificate)
                assert apply_trace(w.base, conf("A", 0), pi) == conf("A", 0)
                assert weight(w, pi) == y - x


def test_conversion_size_on_example(ex):
    w, _ = tvass_to_woca(ex)
    assert w.num_states == 9 and len(w.base.transitions) == 11
