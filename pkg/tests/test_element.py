import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from oracles import act_on_word, element_from, elements, point_prefix, same_map, seeds
from vlab.cantor import NodeSet, canonical_point
from vlab.element import (
    G_DEMO,
    SWAP,
    X0,
    Element,
    apply,
    commutator,
    compose,
    conjugate,
    equals,
    expand_at,
    format_element,
    image_nodeset,
    invert,
    node_image,
    parse_element,
    power,
    relabel,
    support_closure,
)
from vlab.errors import ParseError

ID = Element.identity()
points = st.builds(canonical_point, st.text(alphabet="01", max_size=6),
                   st.text(alphabet="01", min_size=1, max_size=5))


def act_on_point(u, pre, per, n=80):
    """Image of the first n symbols of a point, via plain prefix replacement."""
    s = point_prefix(pre, per, n + u.depth)
    return act_on_word(u.pairs, s)


def test_parse_examples():
    assert parse_element("[e->e]") == ID
    assert parse_element("[0->00, 10->01, 11->1]").pairs == (("0", "00"), ("10", "01"), ("11", "1"))
    assert parse_element("[0->0, 10->10, 11->11]") == ID
    assert parse_element(" [ 1 -> 0 ,0->1 ] ") == SWAP


@pytest.mark.parametrize("text, needle", [
    ("[0->1, 1->1]", "duplicate address 1"),
    ("[0->0, 11->1]", "node 10 is not covered"),
    ("[0->0, 1->1, 11->10]", "1 is a prefix of 11"),
])
def test_antichain_errors_name_the_address(text, needle):
    with pytest.raises(ValueError) as e:
        parse_element(text)
    assert needle in str(e.value)


@pytest.mark.parametrize("text, needle", [
    ("0->1, 1->0]", "["),
    ("[0->1; 1->0]", "position"),
    ("[0->2, 1->0]", "position"),
])
def test_parse_errors_are_specific(text, needle):
    with pytest.raises(ParseError) as e:
        parse_element(text)
    assert needle in str(e.value)


def test_format_round_trip_examples():
    for u in (ID, X0, SWAP, G_DEMO):
        assert parse_element(format_element(u)) == u
    assert format_element(ID) == "[e->e]"


@settings(max_examples=200)
@given(elements)
def test_format_round_trip(u):
    assert parse_element(format_element(u)) == u


def test_compose_x0_squared():
    sq = compose(X0, X0)
    assert sq == parse_element("[0->000, 10->001, 110->01, 111->1]")
    rng = random.Random(7)
    for _ in range(50):
        pre = "".join(rng.choice("01") for _ in range(rng.randint(0, 5)))
        per = "".join(rng.choice("01") for _ in range(rng.randint(1, 4)))
        once = act_on_point(X0, pre, per, 120)
        twice = act_on_word(X0.pairs, once)
        assert act_on_point(sq, pre, per, 80)[:60] == twice[:60]


def test_invert_examples():
    assert invert(ID) == ID
    assert invert(SWAP) == SWAP
    assert invert(X0) == parse_element("[00->0, 01->10, 1->11]")
    assert compose(X0, invert(X0)) == ID


def test_conjugate_by_swap():
    # SWAP exchanges the two halves, so x0 is transported to the mirrored tree
    m = conjugate(X0, SWAP)
    assert m == parse_element("[00->11, 01->0, 1->10]")
    rng = random.Random(3)
    for _ in range(50):
        s = "".join(rng.choice("01") for _ in range(40))
        chained = act_on_word(SWAP.pairs, act_on_word(X0.pairs, act_on_word(SWAP.pairs, s)))
        assert act_on_word(m.pairs, s)[:30] == chained[:30]


def test_derived_ops_examples():
    rng = random.Random(11)
    for _ in range(20):
        u = element_from(rng.getrandbits(32))
        assert power(u, 0) == ID
        assert commutator(u, u) == ID
        assert power(u, -1) == invert(u)
        assert power(u, 3) == compose(compose(u, u), u)
    assert equals(power(SWAP, 2), ID)
    assert equals(ID, parse_element("[0->0,1->1]"))


def test_equals_after_expansion():
    expanded = Element(expand_at(X0, ["0"]))
    assert equals(X0, expanded)


def test_apply_examples():
    x = canonical_point("", "1")
    assert apply(ID, x) == x
    assert apply(X0, x) == x
    assert apply(X0, canonical_point("", "10")) == canonical_point("01", "10")


def test_node_image_examples():
    assert node_image(X0, "110") == "10"
    assert node_image(X0, "1") is None
    assert node_image(X0, "") is None
    for n in ["", "0", "101", "1111"]:
        assert node_image(ID, n) == n


def test_support_closure_examples():
    assert support_closure(ID) == NodeSet()
    assert support_closure(X0) == NodeSet.full()
    assert support_closure(parse_element("[00->01, 01->00, 1->1]")) == NodeSet(["0"])
    assert support_closure(relabel(X0, "10")) == NodeSet(["10"])


@settings(max_examples=300)
@given(elements, elements, elements)
def test_group_axioms(u, v, w):
    assert compose(compose(u, v), w) == compose(u, compose(v, w))
    assert compose(ID, u) == u == compose(u, ID)
    assert compose(u, invert(u)) == ID == compose(invert(u), u)


@settings(max_examples=200)
@given(elements, elements)
def test_compose_matches_brute_force(u, v):
    w = compose(u, v)
    n = u.depth + v.depth
    rng = random.Random(hash((u, v)))
    for _ in range(20):
        s = "".join(rng.choice("01") for _ in range(n + 8))
        assert act_on_word(w.pairs, s) == act_on_word(v.pairs, act_on_word(u.pairs, s))


@settings(max_examples=200)
@given(elements, seeds)
def test_reduction_confluence(u, seed):
    rng = random.Random(seed)
    m = dict(u.items())
    for _ in range(5):
        leaf = rng.choice(sorted(m))
        r = m.pop(leaf)
        m[leaf + "0"], m[leaf + "1"] = r + "0", r + "1"
    items = list(m.items())
    rng.shuffle(items)
    assert Element(items) == u
    assert same_map(items, u.pairs)


@settings(max_examples=300)
@given(elements, elements, points)
def test_action_compatibility(u, v, x):
    assert apply(compose(u, v), x) == apply(v, apply(u, x))


@settings(max_examples=300)
@given(elements, points)
def test_apply_agrees_with_prefix_replacement(u, x):
    y = apply(u, x)
    assert y.expand(50) == act_on_point(u, x.pre, x.per, 50)[:50]


@settings(max_examples=200)
@given(elements, elements)
def test_support_transport(u, v):
    assert support_closure(conjugate(u, v)) == image_nodeset(v, support_closure(u))


@settings(max_examples=200)
@given(elements)
def test_support_closure_is_moved_leaves(u):
    moved = {d for d, r in u.pairs if d != r}
    assert support_closure(u) == NodeSet(moved)


@settings(max_examples=200)
@given(elements, st.text(alphabet="01", max_size=8))
def test_node_image_definition(u, n):
    img = node_image(u, n)
    leaf = next((d for d, _ in u.pairs if n.startswith(d)), None)
    if leaf is None:
        assert img is None
    else:
        assert img == u[leaf] + n[len(leaf):]


def test_relabel_acts_only_below_prefix():
    r = relabel(X0, "01")
    assert support_closure(r) == NodeSet(["01"])
    assert node_image(r, "0100") == "01000"
    assert node_image(r, "1") == "1"
