import itertools
import json
import random

import pytest

from vlab.cantor import NodeSet
from vlab.demonstrative import (
    DemonstrativeGroup,
    check_demonstrative,
    direct_product,
    free_product_embed,
    make_cyclic,
    make_symmetric,
    move_node,
    pingpong_check,
    relocate,
    sample_alternating_words,
    subgroup,
    z2_star_z2_example,
)
from vlab.element import G_DEMO, SWAP, X0, Element, commutator, compose, node_image, power
from vlab.errors import PreconditionError
from vlab.revealing import make_revealing, order_of

ID = Element.identity()


def _table_matches(G, op):
    """The labels multiply like the elements, with ``op`` on labels."""
    index = {lab: i for i, lab in enumerate(G.labels)}
    for i, j in itertools.product(range(len(G.elements)), repeat=2):
        prod = compose(G.elements[i], G.elements[j])
        if prod != G.elements[index[op(G.labels[i], G.labels[j])]]:
            return False
    return True


def _perm_then(p, q):
    return tuple(q[p[i]] for i in range(len(p)))


def test_check_examples():
    assert check_demonstrative(make_cyclic(2))
    assert make_cyclic(2).elements == (ID, SWAP)
    assert check_demonstrative(make_cyclic(None))
    assert make_cyclic(None).generator == G_DEMO
    v = check_demonstrative(DemonstrativeGroup((ID,), "0", X0))
    assert not v and "00" in v.diagnostic


def test_check_rejects_non_groups():
    assert not check_demonstrative(DemonstrativeGroup((SWAP,), "0"))
    three = make_cyclic(3)
    assert not check_demonstrative(DemonstrativeGroup(three.elements[:2], "0"))
    assert not check_demonstrative(DemonstrativeGroup(three.elements, "1"))


@pytest.mark.parametrize("k", [2, 3, 4, 5, 7])
def test_make_cyclic_orders(k):
    G = make_cyclic(k)
    assert check_demonstrative(G)
    assert order_of(G.elements[1]) == k
    assert len(G.elements) == k
    assert G.node == "0"


def test_make_cyclic_infinite():
    G = make_cyclic(None)
    assert order_of(G.generator) is None
    assert make_revealing(G.generator).rep_components
    with pytest.raises(PreconditionError):
        make_cyclic(1)


def test_make_symmetric():
    assert make_symmetric(1).elements == (ID,)
    for n in (2, 3, 4):
        G = make_symmetric(n)
        assert len(G.elements) == len(set(G.elements)) == [1, 1, 2, 6, 24][n]
        assert _table_matches(G, _perm_then)
        assert check_demonstrative(G)
        for g in G.elements[1:]:
            assert all(d != r for d, r in g.pairs)
    S3 = make_symmetric(3)
    orders = sorted(order_of(g) for g in S3.elements)
    assert orders == [1, 2, 2, 2, 3, 3]


def test_direct_product_examples():
    Z2 = make_cyclic(2)
    P = direct_product(Z2, Z2)
    assert P.node == "00" and len(P.elements) == 4
    assert check_demonstrative(P)
    assert all(commutator(u, v).is_identity for u in P.elements for v in P.elements)
    Q = direct_product(make_symmetric(2), make_cyclic(None))
    assert Q.node == "00" and Q.kind == "product"
    assert check_demonstrative(Q)
    assert all(commutator(f, Q.generator).is_identity for f in Q.elements)
    T = direct_product(make_symmetric(1), make_cyclic(3))
    assert T.node == "00" and check_demonstrative(T)
    with pytest.raises(PreconditionError):
        direct_product(make_cyclic(None), Z2)


def test_direct_product_of_z2_is_klein():
    P = direct_product(make_cyclic(2), make_cyclic(2))
    assert sorted(order_of(g) for g in P.elements) == [1, 2, 2, 2]


def test_direct_product_with_symmetric_labels():
    P = direct_product(make_symmetric(2), make_symmetric(3))
    assert len(P.elements) == 12
    assert _table_matches(P, lambda x, y: (_perm_then(x[0], y[0]), _perm_then(x[1], y[1])))
    assert check_demonstrative(P)


def test_subgroups_keep_the_node():
    S4 = make_symmetric(4)
    rng = random.Random(4)
    for _ in range(12):
        gens = rng.sample(S4.elements[1:], rng.randint(1, 2))
        H = subgroup(S4, gens)
        assert 24 % len(H.elements) == 0
        assert check_demonstrative(H)
    with pytest.raises(PreconditionError):
        subgroup(S4, [X0])
    with pytest.raises(PreconditionError):
        subgroup(make_cyclic(None), [])


def test_move_node_examples():
    Z2 = make_cyclic(2)
    assert move_node(Z2, "0") is Z2
    # the two images of node 0 under the swap tile the whole space,
    # and the complement of 01 is not a single node
    with pytest.raises(PreconditionError):
        move_node(Z2, "01")
    assert check_demonstrative(move_node(Z2, "1"))
    assert move_node(direct_product(Z2, Z2), "01").node == "01"
    with pytest.raises(PreconditionError):
        move_node(make_cyclic(3), "110")
    for G in (make_cyclic(3), make_cyclic(None), make_symmetric(3),
              direct_product(make_cyclic(3), make_cyclic(None))):
        for target in ("1", "01", "110")[:2 if G.name == "Z3" else 3]:
            M = move_node(G, target)
            assert M.node == target
            assert check_demonstrative(M)
            assert [order_of(g) for g in M.elements] == [order_of(g) for g in G.elements]


def test_relocate_copies_into_each_place():
    r = relocate(X0, ["0", "10"])
    assert node_image(r, "000") == "0000" and node_image(r, "1000") == "10000"
    assert node_image(r, "11") == "11"


def _family():
    base = [make_cyclic(2), make_cyclic(3), make_cyclic(5), make_cyclic(None),
            make_symmetric(2), make_symmetric(3)]
    fam = list(base)
    fam.append(direct_product(make_cyclic(2), make_cyclic(None)))
    fam.append(direct_product(make_cyclic(3), make_cyclic(None)))
    fam.append(direct_product(make_symmetric(3), make_cyclic(None)))
    fam.append(direct_product(make_cyclic(2), make_cyclic(3)))
    fam.append(direct_product(make_cyclic(2), fam[7]))
    fam.append(subgroup(make_symmetric(3), [make_symmetric(3).elements[1]]))
    fam.append(subgroup(make_symmetric(4), [make_symmetric(4).elements[5]]))
    fam.append(direct_product(fam[-1], make_cyclic(None)))
    fam.append(direct_product(make_cyclic(4), make_cyclic(2)))
    fam.append(move_node(fam[6], "1"))
    fam.append(move_node(fam[8], "10"))
    fam.append(direct_product(make_symmetric(1), fam[3]))
    fam.append(move_node(direct_product(make_cyclic(2), make_symmetric(3)), "01"))
    fam.append(direct_product(fam[9], make_cyclic(None)))
    return fam


def test_generated_family_is_demonstrative():
    fam = _family()
    assert len(fam) == 20
    for G in fam:
        v = check_demonstrative(G)
        assert v, (G.name, v.diagnostic)


def test_pingpong_examples():
    Z3 = make_cyclic(3)
    Z2 = move_node(make_cyclic(2), "1")
    X1, X2 = NodeSet(["1"]), NodeSet(["0"])
    cert = pingpong_check(Z3, Z2, X1, X2)
    assert cert.verdict and cert.witness is None
    Z = make_cyclic(None)
    cert = pingpong_check(Z, Z2, X1, X2)
    assert cert.verdict and cert.basin_argument[0]
    with pytest.raises(PreconditionError):
        pingpong_check(Z3, Z2, X2, X2)
    with pytest.raises(PreconditionError):
        pingpong_check(make_cyclic(2), Z2, X1, X2)


def test_pingpong_failure_carries_a_witness():
    Z3 = make_cyclic(3)
    cert = pingpong_check(Z3, make_cyclic(2), NodeSet(["1"]), NodeSet(["00"]))
    assert not cert.verdict and "outside {00}" in cert.witness
    data = json.loads(cert.to_json())
    assert data["schema"] == 1 and data["verdict"] is False
    assert data["X1"] == "{1}" and data["X2"] == "{00}"


@pytest.mark.parametrize("G, H", [
    (make_cyclic(3), make_cyclic(2)),
    (make_cyclic(None), make_cyclic(None)),
    (make_symmetric(3), make_cyclic(None)),
    (make_cyclic(2), make_cyclic(3)),
])
def test_free_products(G, H):
    fp = free_product_embed(G, H, samples=200)
    assert fp.route == "ping-pong"
    assert fp.certificate.verdict
    assert fp.left.node == "0" and fp.right.node == "1"
    assert fp.sampled_words == 200 and fp.failures == []
    assert fp.certificate.X1 == NodeSet(["1"]) and fp.certificate.X2 == NodeSet(["0"])


def test_alternating_words_are_nontrivial_with_other_seeds():
    left = move_node(make_cyclic(3), "0")
    right = move_node(make_cyclic(None), "1")
    for seed in (1, 2):
        words = sample_alternating_words(left, right, 100, 8, seed)
        assert all(not w.is_identity for w in words)


def test_z2_star_z2():
    g, h = z2_star_z2_example()
    assert power(g, 2).is_identity and power(h, 2).is_identity
    assert not g.is_identity and not h.is_identity
    gh = compose(g, h)
    assert all(not power(gh, k).is_identity for k in range(1, 13))
    assert make_revealing(gh).rep_components
    fp = free_product_embed(make_cyclic(2), make_cyclic(2))
    assert fp.route == "dihedral-search" and fp.generators == (g, h)
