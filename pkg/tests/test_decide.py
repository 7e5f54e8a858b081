import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from oracles import PI0, ex_condition, has_cycle, reachable_set, table

from tvass import Configuration, Tvass, UsageError, conf, run_of
from tvass.decide import (
    CertificateError,
    Lasso,
    Options,
    Outcome,
    UnboundedWitness,
    bounded,
    boundedness_bound,
    check_certificate,
    check_lasso,
    check_unbounded_witness,
    compute_Dx,
    conjectured_threshold,
    extract_lps,
    find_increasing_cycle,
    oracle_reach,
    reach,
    shortpath_bound,
    terminates,
    vloop_decompose,
)
from tvass.formats import random_instance
from tvass.lps import CountedLps, LinearPathScheme

L_EX = LinearPathScheme((("dAA",), ("dAB",), ("dBA",)), (PI0, ("dBB",)))
EX_RUN = ("dAA",) + PI0 + ("dAB",) + ("dBB",) * 6 + ("dBA",)


def test_oracle_reach_examples(ex):
    v = oracle_reach(ex, conf("A", 3, 5), conf("A", 7, 5))
    assert v.outcome is Outcome.YES
    assert run_of(ex, conf("A", 3, 5), v.certificate).target == conf("A", 7, 5)
    assert len(v.certificate) == len(EX_RUN)
    assert oracle_reach(ex, conf("A", 0, 1), conf("A", 0, 4)).outcome is Outcome.NO
    v = oracle_reach(ex, conf("B", 4, 4), conf("B", 4, 4))
    assert v.outcome is Outcome.YES and v.certificate == ()


def test_oracle_reach_unknown_when_capped():
    # counter 2 never changes, but both search directions are infinite in counter 1
    walk = Tvass.build(2, ["p"], [("u", "p", (1, 0), "p"), ("d", "p", (-1, 0), "p")])
    v = oracle_reach(walk, conf("p", 0, 0), conf("p", 0, 1), cap_norm=10)
    assert v.outcome is Outcome.UNKNOWN and v.stats["explored"] > 0


def test_reach_examples(ex):
    v = reach(ex, conf("A", 3, 5), conf("A", 5, 5))
    assert v.label == "REACHABLE" and isinstance(v.certificate, CountedLps)
    assert check_certificate(ex, conf("A", 3, 5), conf("A", 5, 5), v.certificate)
    assert reach(ex, conf("A", 0, 2), conf("A", 0, 5)).label == "UNREACHABLE"
    v = reach(ex, conf("A", 0, 3), conf("A", 0, 8))
    assert v.label == "REACHABLE"
    with pytest.raises(UsageError):
        reach(Tvass.build(1, ["p"], []), conf("p", 0), conf("p", 0))


def test_reach_with_constant_closes_unknowns():
    walk = Tvass.build(2, ["p"], [("u", "p", (1, 0), "p"), ("d", "p", (-1, 0), "p")])
    opts = Options(cap_norm=3, cap_steps=1000)
    assert reach(walk, conf("p", 0, 0), conf("p", 0, 1), opts).outcome is Outcome.UNKNOWN
    v = reach(walk, conf("p", 0, 0), conf("p", 0, 1), Options(cap_norm=3, cap_steps=1000, const_c=1))
    assert v.outcome is Outcome.NO and v.caps["const_c"] == 1


def test_bounds():
    ex_like = Tvass.build(2, ["A", "B"], [("a", "A", (-3, 4), "A"), ("b", "B", (0, 0), "A")])
    assert shortpath_bound(ex_like, (3, 5), (5, 5), 1) == (2 + 5 + 5 + 4) ** 8
    assert shortpath_bound(ex_like, (3, 5), (5, 5), 0) == 1
    one = Tvass.build(2, ["p"], [("a", "p", (1, 0), "p")])
    assert shortpath_bound(one, (0, 0), (0, 0), 1) == 2
    assert boundedness_bound(ex_like, (3, 5), 1) == 6 * 6**8
    assert boundedness_bound(one, (0, 0), 1) == 2
    assert boundedness_bound(ex_like, (3, 5), 0) == 6


def test_check_certificate_examples(ex):
    cert = CountedLps(L_EX, (1, 6))
    assert check_certificate(ex, conf("A", 3, 5), conf("A", 7, 5), cert)
    assert not check_certificate(ex, conf("A", 3, 5), conf("A", 9, 5), cert)
    assert not check_certificate(ex, conf("A", 3, 5), conf("A", 7, 5), CountedLps(L_EX, (1, 5)))
    assert check_certificate(ex, conf("A", 3, 5), conf("A", 7, 5), EX_RUN)
    assert not check_certificate(ex, conf("B", 3, 5), conf("A", 7, 5), EX_RUN)
    with pytest.raises(CertificateError):
        check_certificate(ex, conf("A", 3, 5), conf("A", 7, 5), ("dAB", "dAA"))
    with pytest.raises(CertificateError):
        check_certificate(ex, conf("A", 3, 5), conf("A", 7, 5), "dAA")
    with pytest.raises(CertificateError):
        bad = CountedLps(LinearPathScheme(((), ()), (("dAA", "dAB"),)), (1,))
        check_certificate(ex, conf("A", 3, 5), conf("A", 7, 5), bad)


def test_extract_lps_examples(ex):
    run = run_of(ex, conf("A", 3, 5), EX_RUN)
    cert = extract_lps(ex, run)
    assert check_certificate(ex, conf("A", 3, 5), conf("A", 7, 5), cert)
    assert ("dBB",) in cert.scheme.beta and 6 in cert.counts
    flat = run_of(ex, conf("A", 3, 5), ("dAA", "dAB"))
    assert extract_lps(ex, flat).scheme.star_length == 0
    loop = extract_lps(ex, run_of(ex, conf("B", 0, 9), ("dBB",) * 4))
    assert loop.scheme.beta == (("dBB",),) and loop.counts == (4,)


def test_vloop_decompose_examples(ex):
    run = run_of(ex, conf("A", 3, 5), ("dAA", "dAB") + ("dBB",) * 4 + ("dBA",))
    assert [f.kind for f in vloop_decompose(ex, run)] == ["A*", "T", "A*"]
    free = run_of(ex, conf("B", 0, 5), ("dBB", "dBB"))
    assert [f.kind for f in vloop_decompose(ex, free)] == ["A*"]
    loops = run_of(ex, conf("A", 0, 2), PI0 + PI0)
    fs = vloop_decompose(ex, loops)
    assert [f.kind for f in fs] == ["vloop"] and fs[0].target == conf("A", 0, 6)


def test_compute_dx_examples(ex):
    assert compute_Dx(ex, "A", 2, 8).members == {0, 2, 4, 6, 7, 8}
    assert compute_Dx(ex, "A", 0, 8).members == {0}
    r = compute_Dx(ex, "A", 5, 8)
    assert r.members == {0, 2, 3, 4, 5, 6, 7, 8} and r.conclusive
    assert conjectured_threshold([frozenset({0}), frozenset({0, 2}), frozenset({0, 2})]) == 1


def test_find_increasing_cycle_examples(ex):
    c = find_increasing_cycle(ex, "A")
    assert (c.h, c.beta, c.m) == (2, PI0, 2)
    b = find_increasing_cycle(ex, "B")
    assert run_of(ex, conf("B", 0, b.h), b.beta).target == conf("B", 0, b.h + b.m)
    down = Tvass.build(2, ["p"], [("d", "p", (0, -1), "p")])
    assert find_increasing_cycle(down, "p", cap_h=5) is None


def test_bounded_examples(ex):
    v = bounded(ex, conf("A", 3, 5))
    assert v.label == "UNBOUNDED" and check_unbounded_witness(ex, conf("A", 3, 5), v.certificate)
    empty = Tvass.build(2, ["p"], [])
    v = bounded(empty, conf("p", 0, 0))
    assert v.label == "BOUNDED" and v.stats["reachable"] == 1
    dec = Tvass.build(2, ["p"], [("d", "p", (0, -1), "p")])
    v = bounded(dec, conf("p", 0, 5))
    assert v.label == "BOUNDED" and v.stats["reachable"] == 6


def test_bounded_with_constant_flags_large_configurations():
    up = Tvass.build(2, ["p"], [("u", "p", (1, 0), "p"), ("z", "p", "tst", "p")])
    # the only pump is test-free, so it is found either way; check the constant path runs
    v = bounded(up, conf("p", 0, 0), Options(const_c=1))
    assert v.label == "UNBOUNDED"


def test_terminates_examples(ex):
    loop = Tvass.build(2, ["p"], [("l", "p", (0, 0), "p")])
    v = terminates(loop, conf("p", 0, 0))
    assert v.label == "NONTERMINATING" and v.certificate == Lasso((), ("l",))
    down = Tvass.build(2, ["p"], [("d", "p", (-1, 0), "p")])
    assert terminates(down, conf("p", 5, 0)).label == "TERMINATING"
    v = terminates(ex, conf("A", 3, 5))
    assert v.label == "NONTERMINATING"


def test_witness_validators(ex):
    w = UnboundedWitness(("dAA",), PI0)
    assert check_unbounded_witness(ex, conf("A", 3, 5), w)
    swap = Tvass.build(2, ["p"], [("s", "p", (1, -1), "p"), ("l", "p", (0, 0), "p")])
    assert not check_unbounded_witness(swap, conf("p", 0, 5), UnboundedWitness((), ("s",)))
    assert not check_lasso(swap, conf("p", 0, 5), Lasso((), ("s",)))
    assert check_lasso(swap, conf("p", 0, 5), Lasso(("s",), ("l",)))
    with pytest.raises(CertificateError):
        check_lasso(swap, conf("p", 0, 5), Lasso((), ()))
    with pytest.raises(CertificateError):
        check_unbounded_witness(swap, conf("p", 0, 5), UnboundedWitness((), ("nope",)))


def test_verdict_json(ex):
    doc = reach(ex, conf("A", 3, 5), conf("A", 7, 5)).to_json()
    assert doc["schema"] == "tvr/1" and doc["verdict"] == "REACHABLE"
    assert doc["certificate"]["type"] == "lps" and "explored" in doc["stats"]


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 10**6))
def test_no_verdicts_are_sound(seed):
    rng = random.Random(seed)
    model = random_instance(seed, rng.randint(1, 3), 2, 0.3, 0.5)
    tab = table(model)
    src = Configuration(rng.choice(model.states), (rng.randint(0, 3), rng.randint(0, 3)))
    dst = Configuration(rng.choice(model.states), (rng.randint(0, 3), rng.randint(0, 3)))
    v = oracle_reach(model, src, dst, cap_norm=12, cap_steps=5000)
    seen, closed = reachable_set(tab, (src.state, src.counters), 10**9, 5000)
    if v.outcome is Outcome.YES:
        assert check_certificate(model, src, dst, v.certificate)
    if closed:
        assert v.outcome is (Outcome.YES if (dst.state, dst.counters) in seen else Outcome.NO)


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 10**6))
def test_bounded_and_terminates_against_enumeration(seed):
    rng = random.Random(seed)
    model = random_instance(seed, rng.randint(1, 3), 2, 0.3, 0.5)
    tab = table(model)
    src = Configuration(rng.choice(model.states), (rng.randint(0, 3), rng.randint(0, 3)))
    b = bounded(model, src, Options(cap_norm=40, cap_steps=20_000))
    t = terminates(model, src, Options(cap_norm=40, cap_steps=20_000))
    seen, closed = reachable_set(tab, (src.state, src.counters), 10**9, 20_000)
    if closed:
        assert b.label == "BOUNDED" and b.stats["reachable"] == len(seen)
        assert t.label == ("NONTERMINATING" if has_cycle(tab, seen) else "TERMINATING")
    if b.label == "UNBOUNDED":
        assert check_unbounded_witness(model, src, b.certificate)
    if t.label == "NONTERMINATING":
        cert = t.certificate
        ok = check_lasso(model, src, cert) if isinstance(cert, Lasso) else check_unbounded_witness(model, src, cert)
        assert ok


def test_golden_grid_small(ex):
    for x in range(12):
        for y in range(12):
            v = oracle_reach(ex, conf("A", 0, x), conf("A", 0, y))
            assert v.conclusive and (v.outcome is Outcome.YES) == ex_condition(x, y)


def test_example_trace_length(ex):
    from tvass.decide import reach

    v = reach(ex, conf("A", 3, 5), conf("A", 7, 5))
    assert v.stats["trace_length"] == 14 == len(("dAA",) + PI0 + ("dAB",) + ("dBB",) * 6 + ("dBA",))
