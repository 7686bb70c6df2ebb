import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from oracles import brute_complete, covered_words, point_prefix
from vlab.cantor import (
    NodeSet,
    antichain_problem,
    canonical_point,
    complement_leaves,
    format_address,
    format_nodeset,
    format_point,
    is_complete_antichain,
    parse_address,
    parse_nodeset,
    parse_point,
)
from vlab.element import random_antichain
from vlab.errors import ParseError

bits = st.text(alphabet="01", max_size=6)
node_sets = st.lists(st.text(alphabet="01", max_size=5), max_size=6).map(NodeSet)


@pytest.mark.parametrize("leaves, expected", [
    ({""}, True),
    ({"0", "10", "11"}, True),
    ({"0", "1", "11"}, False),
    ({"0"}, False),
    ({"00", "01", "10", "110", "111"}, True),
])
def test_complete_antichain_examples(leaves, expected):
    assert is_complete_antichain(leaves) is expected


def test_antichain_problem_names_the_address():
    assert "11" in antichain_problem(["0", "1", "11"])
    assert antichain_problem(["0", "10"]) is not None
    assert antichain_problem(["0", "1"]) is None


@settings(max_examples=200)
@given(st.integers(1, 10), st.integers(0, 2**31))
def test_random_antichains_are_complete(n, seed):
    leaves = random_antichain(n, random.Random(seed))
    assert len(leaves) == n
    assert brute_complete(leaves)
    assert is_complete_antichain(leaves)


@settings(max_examples=300)
@given(st.lists(st.text(alphabet="01", min_size=1, max_size=4), min_size=1, max_size=6))
def test_completeness_matches_brute_force(leaves):
    assert is_complete_antichain(set(leaves)) == brute_complete(set(leaves))


@pytest.mark.parametrize("addr", ["0", "1", "0110", "111"])
def test_complement_leaves_partition(addr):
    assert brute_complete(complement_leaves(addr) + [addr])


@pytest.mark.parametrize("pre, per, out", [
    ("", "11", ("", "1")),
    ("0", "0", ("", "0")),
    ("01", "10", ("01", "10")),
    ("10", "0", ("1", "0")),
    ("0101", "01", ("", "01")),
    ("1", "0101", ("", "10")),
])
def test_canonical_point_examples(pre, per, out):
    p = canonical_point(pre, per)
    assert (p.pre, p.per) == out
    assert p.expand(40) == point_prefix(pre, per, 40)


def test_canonical_point_rejects_empty_period():
    with pytest.raises(ValueError):
        canonical_point("0", "")


@settings(max_examples=300)
@given(bits, st.text(alphabet="01", min_size=1, max_size=6))
def test_canonical_point_idempotent_and_faithful(pre, per):
    p = canonical_point(pre, per)
    assert canonical_point(p.pre, p.per) == p
    assert p.expand(60) == point_prefix(pre, per, 60)


@settings(max_examples=300)
@given(bits, st.text(alphabet="01", min_size=1, max_size=4),
       bits, st.text(alphabet="01", min_size=1, max_size=4))
def test_point_equality_is_sequence_equality(p1, q1, p2, q2):
    same = point_prefix(p1, q1, 80) == point_prefix(p2, q2, 80)
    assert (canonical_point(p1, q1) == canonical_point(p2, q2)) == same


def test_nodeset_examples():
    assert (NodeSet(["00"]) | NodeSet(["01"])) == NodeSet(["0"])
    assert (NodeSet(["0"]) & NodeSet(["01", "1"])) == NodeSet(["01"])
    assert NodeSet(["10"]).contains_point(canonical_point("1", "0"))
    assert NodeSet(["0", "1"]) == NodeSet.full()
    assert NodeSet(["0"]).complement() == NodeSet(["1"])


@settings(max_examples=300)
@given(node_sets, node_sets, node_sets)
def test_nodeset_algebra_laws(a, b, c):
    n = 1 + max(a.max_depth(), b.max_depth(), c.max_depth())
    assert covered_words((a | b).nodes, n) == covered_words(a.nodes, n) | covered_words(b.nodes, n)
    assert covered_words((a & b).nodes, n) == covered_words(a.nodes, n) & covered_words(b.nodes, n)
    assert covered_words((a - b).nodes, n) == covered_words(a.nodes, n) - covered_words(b.nodes, n)
    assert a | b == b | a and a & b == b & a
    assert (a | b) | c == a | (b | c)
    assert (a & b) & c == a & (b & c)
    assert ((a & b) | (a - b)) == a
    assert (a & b).isdisjoint(a - b)
    assert a.isdisjoint(b) == (not (a & b))
    assert a.issubset(b) == ((a - b) == NodeSet())


@settings(max_examples=200)
@given(node_sets, bits, st.text(alphabet="01", min_size=1, max_size=4))
def test_contains_point_by_expansion(a, pre, per):
    p = canonical_point(pre, per)
    n = a.max_depth()
    assert a.contains_point(p) == any(point_prefix(pre, per, n).startswith(x) for x in a.nodes)


def test_nodeset_canonical_form_merges_siblings():
    ns = NodeSet(["000", "001", "01", "1"])
    assert ns.nodes == ("",)
    assert NodeSet(["0", "01"]).nodes == ("0",)


def test_text_forms_round_trip():
    assert parse_address("e") == "" and format_address("") == "e"
    p = parse_point("1101(10)")
    assert format_point(p) == "1101(10)"
    assert parse_point("(11)") == canonical_point("", "1")
    ns = parse_nodeset("{0, 10}")
    assert format_nodeset(ns) == "{0,10}"
    assert parse_nodeset("{}") == NodeSet()
    assert parse_nodeset(format_nodeset(ns)) == ns


@pytest.mark.parametrize("text", ["", "2", "01x"])
def test_bad_address(text):
    with pytest.raises(ParseError):
        parse_address(text)


@pytest.mark.parametrize("text", ["110", "1(", "(2)", "1()"])
def test_bad_point(text):
    with pytest.raises(ParseError):
        parse_point(text)


def test_bad_nodeset_reports_position():
    with pytest.raises(ParseError) as e:
        parse_nodeset("{0,1x}")
    assert "position" in str(e.value)
