import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from sessprog.gen import gen_finite, gen_subst_pair
from sessprog.measure import (
    InfiniteIndex,
    check_decrease,
    emeasure,
    longest_path,
    state_measure,
    vcount,
)
from sessprog.semantics import canonicalize, reachable, state_to_process, step
from sessprog.syntax import Par, parse_process, subst_name, subst_proc


def P(s):
    return parse_process(s)


def test_emeasure_nested_rec():
    assert emeasure(P("rec[3]X.(rec[6]Y.Y|X)")) == 21


def test_emeasure_comm_pair():
    assert emeasure(P("a+!1.0 | a-?(x).0")) == 2


def test_vcount_duplicating_body():
    assert vcount(P("rec[3]Y.(0|X|X)"), "X") == 2


def test_vcount_shadowing():
    assert vcount(P("rec[2]X.X"), "X") == 0


def test_empty_sum_convention():
    assert emeasure(P("rec[0]X.a+!1.X")) == 0
    assert vcount(P("rec[0]Y.X"), "X") == 0


def test_zero_to_zero_power():
    # body without the variable: geometric sum over v = 0 with 0^0 = 1
    assert emeasure(P("rec[2]X.a+!1.0")) == 2


def test_restriction_and_idle_are_transparent():
    assert emeasure(P("new a.(a+!1.0 | 0)")) == 1
    assert vcount(P("new a.(X | 0)"), "X") == 1


def test_infinite_index_rejected():
    with pytest.raises(InfiniteIndex):
        emeasure(P("rec[inf]X.X"))
    with pytest.raises(InfiniteIndex):
        vcount(P("rec[inf]Y.X"), "X")


def test_big_integers():
    p = P("rec[30]A.(rec[30]B.(rec[30]C.(C|C)|B|B)|A|A)")
    assert emeasure(p) > 2**64


def test_decrease_exact_amounts():
    s = canonicalize(P("rec[2]X.new a.(a+!1.0 | a-?(x).X)"))
    for label, succ in step(s):
        drop = state_measure(s) - state_measure(succ)
        assert drop == (2 if label.kind == "comm" else 1)


def test_check_decrease_vacuous():
    ok, fails, truncated = check_decrease(P("rec[0]X.X"))
    assert ok and not fails and not truncated


def test_longest_path_bounded_by_e():
    p = P("rec[2]X.new a.(a+!1.0 | a-?(x).X)")
    assert longest_path(p) <= emeasure(p)


@settings(max_examples=100, deadline=None)
@given(st.integers(0, 10**9))
def test_decrease_on_random_processes(seed):
    p = gen_finite(random.Random(seed), depth=5, max_index=3)
    ok, fails, _ = check_decrease(p, max_states=800)
    assert ok, fails[:1]


@settings(max_examples=100, deadline=None)
@given(st.integers(0, 10**9))
def test_substitution_law(seed):
    p, x, q = gen_subst_pair(random.Random(seed))
    pq = subst_proc(p, x, q)
    assert pq is not None
    assert emeasure(pq) == emeasure(p) + emeasure(q) * vcount(p, x)


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 10**9))
def test_measure_invariant_under_canonicalization(seed):
    p = gen_finite(random.Random(seed), depth=5, max_index=3)
    assert emeasure(state_to_process(canonicalize(p))) == emeasure(p)


def test_name_substitution_preserves_measure():
    from sessprog.syntax import Endpoint

    p = P("b-!x.a+?(y).b-!y.0")
    q = subst_name(p, "x", Endpoint("c", "+"))
    assert emeasure(q) == emeasure(p)
    r = subst_name(p, "x", 7)
    assert emeasure(r) == emeasure(p)


def test_positive_measure_when_reducible():
    p = P("a+!1.0 | a-?(x).0")
    assert step(canonicalize(p)) and emeasure(p) > 0
