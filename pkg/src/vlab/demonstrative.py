"""Demonstrative subgroups of V and ping-pong free products built from them.

A subgroup is demonstrative at a node ``n`` when every nontrivial element
carries the whole Cantor set of ``n`` affinely onto a node disjoint from it.
Copies of two such groups demonstrative at ``0`` and at ``1`` play ping-pong
on the sets ``{1}`` and ``{0}`` and so generate their free product.
"""

from __future__ import annotations

import itertools
import json
import random
from dataclasses import dataclass, field
from math import factorial

from .cantor import NodeSet, comparable, complement_leaves, format_address, format_nodeset
from .element import (
    G_DEMO,
    Element,
    commutator,
    compose,
    conjugate,
    format_element,
    image_nodeset,
    invert,
    node_image,
    power,
)
from .errors import PreconditionError
from .revealing import make_revealing, order_of

CHECK_RADIUS = 20
ESCAPE_STEPS = 256


@dataclass(frozen=True)
class DemonstrativeGroup:
    """A finite group ``elements``, optionally times the cyclic group of ``generator``.

    ``elements`` lists every element of the finite part, identity first.  When
    ``generator`` is set it has infinite order and commutes with the finite part.
    ``blocks`` are generator-invariant clopen sets around the node, used to
    show that ``f g^k`` moves the node off itself for every ``k``.
    """

    elements: tuple[Element, ...]
    node: str
    generator: Element | None = None
    name: str = ""
    labels: tuple | None = None
    blocks: tuple[NodeSet, ...] = ()

    @property
    def kind(self) -> str:
        if self.generator is None:
            return "finite"
        return "cyclic-infinite" if len(self.elements) == 1 else "product"

    @property
    def order(self) -> int | None:
        return len(self.elements) if self.generator is None else None

    def members(self, radius: int = CHECK_RADIUS) -> list[Element]:
        """The nontrivial elements, with generator powers limited to ``|k| <= radius``."""
        if self.generator is None:
            return [g for g in self.elements if not g.is_identity]
        out = []
        for k in sorted(range(-radius, radius + 1), key=lambda k: (abs(k), k < 0)):
            gk = power(self.generator, k)
            for f in self.elements:
                if k or not f.is_identity:
                    out.append(compose(f, gk))
        return out

    def summary(self) -> dict:
        return {
            "name": self.name,
            "kind": self.kind,
            "node": format_address(self.node),
            "order": "infinite" if self.order is None else self.order,
            "generator": None if self.generator is None else format_element(self.generator),
        }


@dataclass(frozen=True)
class Verdict:
    ok: bool
    diagnostic: str = ""

    def __bool__(self) -> bool:
        return self.ok


# --------------------------------------------------------------------- checking

def _forward_traps(g: Element) -> list[NodeSet]:
    """Clopen sets around the attracting orbits of ``g`` that ``g`` maps into themselves."""
    traps = []
    for c in make_revealing(g).att_components:
        nodes, n = [], c.root
        for _ in range(c.return_length):
            nodes.append(n)
            n = node_image(g, n)
        traps.append(NodeSet(nodes))
    return traps


def _escapes(g: Element, start: NodeSet, allowed: NodeSet) -> str | None:
    """Show ``start g^k`` stays inside ``allowed`` for every ``k >= 1``.

    Iterates the image until it falls into a union of forward traps that is
    itself inside ``allowed``; returns a diagnostic on failure.
    """
    # the image of a trap is a smaller trap, so push traps along until they fit
    pending = _forward_traps(g)
    safe = NodeSet()
    cur = start
    for step in range(1, ESCAPE_STEPS + 1):
        still = []
        for T in pending:
            if T.issubset(allowed):
                safe = safe | T
            else:
                still.append(image_nodeset(g, T))
        pending = still
        cur = image_nodeset(g, cur)
        if not cur.issubset(allowed):
            return f"step {step} of the orbit leaves {format_nodeset(allowed)}"
        if cur.issubset(safe):
            return None
    return f"orbit not trapped after {ESCAPE_STEPS} steps"


def check_demonstrative(G: DemonstrativeGroup, radius: int = CHECK_RADIUS) -> Verdict:
    """Every nontrivial element must move the demonstration node off itself."""
    node = G.node
    finite = G.elements
    if not finite or not finite[0].is_identity:
        return Verdict(False, "element list must start with the identity")
    members = set(finite)
    if len(members) != len(finite):
        return Verdict(False, "duplicate elements")
    for u, v in itertools.product(finite, repeat=2):
        if compose(u, v) not in members:
            return Verdict(False, f"not closed: {u} * {v}")
    for u in G.members(radius):
        img = node_image(u, node)
        if img is None:
            return Verdict(False, f"{u} splits node {format_address(node)}")
        if comparable(img, node):
            return Verdict(False, f"{u} maps node {format_address(node)} to {format_address(img)}")
    g = G.generator
    if g is None:
        return Verdict(True)
    for u in finite:
        if not commutator(u, g).is_identity:
            return Verdict(False, f"{u} does not commute with the generator")
    # powers g^k for all k: the orbit of the node falls into traps away from it
    outside = NodeSet([node]).complement()
    for label, h in (("forward", g), ("backward", invert(g))):
        why = _escapes(h, NodeSet([node]), outside)
        if why is not None:
            return Verdict(False, f"{label} orbit of the node: {why}")
    # f g^k with f != 1: a set W around the node with W g = W and W f off the node
    candidates = list(G.blocks) + [NodeSet([node[:i]]) for i in range(len(node), -1, -1)]
    for f in finite[1:]:
        if not any(_invariant_block(g, f, W, node) for W in candidates):
            return Verdict(False, f"no invariant block separates {f} from the node")
    return Verdict(True)


def _invariant_block(g: Element, f: Element, W: NodeSet, node: str) -> bool:
    return (W.contains_node(node) and image_nodeset(g, W) == W
            and not image_nodeset(f, W).meets_node(node))


# ------------------------------------------------------------------ factories

def _cycle_leaves(k: int) -> list[str]:
    return ["1" * i + "0" for i in range(k - 1)] + ["1" * (k - 1)]


def make_cyclic(order: int | None) -> DemonstrativeGroup:
    """Cyclic group at node ``0``; ``order=None`` means infinite."""
    if order is None:
        return DemonstrativeGroup((Element.identity(),), "0", G_DEMO, name="Z")
    if order < 2:
        raise PreconditionError("cyclic order must be at least 2")
    leaves = _cycle_leaves(order)
    g = Element({leaves[i]: leaves[(i + 1) % order] for i in range(order)})
    elems = tuple(power(g, i) for i in range(order))
    assert order_of(g) == order
    return DemonstrativeGroup(elems, "0", name=f"Z{order}")


def _perm_mul(p: tuple, q: tuple) -> tuple:
    """``p`` then ``q``, matching the right action of V."""
    return tuple(q[p[i]] for i in range(len(p)))


def _balanced_leaves(root: str, count: int) -> list[str]:
    leaves = [root]
    while len(leaves) < count:
        leaves.sort(key=lambda a: (len(a), a))
        a = leaves.pop(0)
        leaves += [a + "0", a + "1"]
    return sorted(leaves)


def make_symmetric(n: int) -> DemonstrativeGroup:
    """S_n acting by right multiplication on n! leaves; leaf ``0`` carries the identity."""
    if n < 1:
        raise PreconditionError("n must be positive")
    perms = sorted(itertools.permutations(range(n)))
    ident = tuple(range(n))
    if len(perms) == 1:
        return DemonstrativeGroup((Element.identity(),), "0", name="S1", labels=(ident,))
    others = [p for p in perms if p != ident]
    leaf = {ident: "0"}
    leaf.update(zip(others, _balanced_leaves("1", factorial(n) - 1)))
    elems, labels = [], []
    for a in [ident] + others:
        elems.append(Element({leaf[m]: leaf[_perm_mul(m, a)] for m in perms}))
        labels.append(a)
    return DemonstrativeGroup(tuple(elems), "0", name=f"S{n}", labels=tuple(labels))


def relocate(h: Element, places: list[str]) -> Element:
    """Copy ``h`` into each node of ``places`` (pairwise disjoint); identity elsewhere."""
    if h.is_identity:
        return h
    m = {}
    for p in places:
        for d, r in h.pairs:
            m[p + d] = p + r
    for c in NodeSet(places).complement():
        m[c] = c
    return Element.from_leaf_map(m)


def direct_product(G: DemonstrativeGroup, H: DemonstrativeGroup) -> DemonstrativeGroup:
    """G x H, demonstrative at the concatenated node ``m n``."""
    if G.generator is not None:
        raise PreconditionError("the first factor must be finite")
    m, n = G.node, H.node
    orbit = []
    for g in G.elements:
        img = node_image(g, m)
        if img is None:
            raise PreconditionError(f"{g} splits node {format_address(m)}")
        orbit.append(img)
    orbit = sorted(set(orbit))
    bar = {h: relocate(h, orbit) for h in H.elements}
    gen = None if H.generator is None else relocate(H.generator, orbit)
    # factors commute and the copy of H is faithful
    hs = list(H.elements) + ([H.generator] if gen is not None else [])
    hbar = list(bar.values()) + ([gen] if gen is not None else [])
    for g in G.elements:
        for hb in hbar:
            if not commutator(g, hb).is_identity:
                raise AssertionError(f"{g} and {hb} do not commute")
    for h1, h2 in itertools.product(H.elements, repeat=2):
        if bar[h1] * bar[h2] != bar[compose(h1, h2)]:
            raise AssertionError("relocation is not a homomorphism")
    if len(set(hbar)) != len(hs):
        raise AssertionError("relocation is not injective")
    elems = tuple(compose(g, bar[h]) for g in G.elements for h in H.elements)
    if len(set(elems)) != len(elems):
        raise AssertionError("G x H map is not injective")
    labels = None
    if G.labels is not None and H.labels is not None:
        labels = tuple((a, b) for a in G.labels for b in H.labels)
    blocks = ()
    if gen is not None:
        blocks = (NodeSet([m]),) + tuple(NodeSet(m + a for a in B) for B in H.blocks)
    return DemonstrativeGroup(elems, m + n, gen, name=f"{G.name}x{H.name}", labels=labels,
                              blocks=blocks)


def subgroup(G: DemonstrativeGroup, gens: list[Element], limit: int = 5040) -> DemonstrativeGroup:
    """The finite subgroup generated by ``gens``, at the same node."""
    if G.generator is not None:
        raise PreconditionError("subgroup generation needs a finite group")
    for g in gens:
        if order_of(g) is None:
            raise PreconditionError(f"{g} has infinite order")
    elems = [Element.identity()]
    seen = set(elems)
    frontier = list(elems)
    while frontier:
        nxt = []
        for u in frontier:
            for g in gens:
                v = compose(u, g)
                if v not in seen:
                    if len(seen) >= limit:
                        raise PreconditionError(f"generated group has more than {limit} elements")
                    seen.add(v)
                    elems.append(v)
                    nxt.append(v)
        frontier = nxt
    return DemonstrativeGroup(tuple(elems), G.node, name=f"<{len(elems)}<{G.name}>")


def _orbit_images(G: DemonstrativeGroup, radius: int) -> set[str]:
    out = set()
    for u in G.members(radius):
        img = node_image(u, G.node)
        if img is not None:
            out.add(img)
    return out


def _conjugator(node: str, target: str, avoid: set[str]) -> Element:
    dom = complement_leaves(node)
    ran = complement_leaves(target)

    def grow(leaves, blocked):
        leaves.sort(key=lambda a: (len(a), a))
        for i, a in enumerate(leaves):
            if a not in blocked:
                leaves[i:i + 1] = [a + "0", a + "1"]
                return
        # the orbit tiles the rest of the space with fewer nodes than target needs
        raise PreconditionError(
            f"the orbit of node {format_address(node)} cannot be carried to {format_address(target)}")

    while len(dom) < len(ran):
        grow(dom, avoid)
    while len(ran) < len(dom):
        grow(ran, set())
    pairs = dict(zip(sorted(dom), sorted(ran)))
    pairs[node] = target
    return Element(pairs)


def move_node(G: DemonstrativeGroup, target: str, radius: int = CHECK_RADIUS) -> DemonstrativeGroup:
    """Conjugate G so that it becomes demonstrative at ``target``."""
    if target == G.node:
        return G
    theta = _conjugator(G.node, target, _orbit_images(G, radius))
    elems = tuple(conjugate(g, theta) for g in G.elements)
    gen = None if G.generator is None else conjugate(G.generator, theta)
    blocks = tuple(image_nodeset(theta, B) for B in G.blocks)
    moved = DemonstrativeGroup(elems, target, gen, name=G.name, labels=G.labels, blocks=blocks)
    verdict = check_demonstrative(moved, radius)
    if not verdict:
        raise AssertionError(f"moved group is not demonstrative: {verdict.diagnostic}")
    return moved


# ------------------------------------------------------------------ ping-pong

@dataclass(frozen=True)
class PingPongCertificate:
    factors: tuple[dict, dict]
    X1: NodeSet
    X2: NodeSet
    checked_radius: int
    verdict: bool
    witness: str | None = None
    basin_argument: tuple[bool, bool] = (False, False)

    def to_dict(self) -> dict:
        return {
            "schema": 1,
            "factors": list(self.factors),
            "X1": format_nodeset(self.X1),
            "X2": format_nodeset(self.X2),
            "checked_radius": self.checked_radius,
            "verdict": self.verdict,
            "witness": self.witness,
            "basin_argument": list(self.basin_argument),
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2)


def _size(G: DemonstrativeGroup) -> float:
    return float("inf") if G.order is None else G.order


def _tosses(G: DemonstrativeGroup, src: NodeSet, dst: NodeSet, radius: int):
    """Check ``src h`` is inside ``dst`` for the nontrivial elements of G.

    Returns (witness or None, whether all powers of the generator are covered).
    """
    for u in G.members(radius):
        if not image_nodeset(u, src).issubset(dst):
            return f"{u} maps {format_nodeset(src)} outside {format_nodeset(dst)}", False
    if G.generator is None:
        return None, True
    if G.kind != "cyclic-infinite":
        return None, False
    g = G.generator
    covered = all(_escapes(h, src, dst) is None for h in (g, invert(g)))
    return None, covered


def pingpong_check(H1: DemonstrativeGroup, H2: DemonstrativeGroup, X1: NodeSet, X2: NodeSet,
                   radius: int = CHECK_RADIUS) -> PingPongCertificate:
    """Verify ``X2 h ⊆ X1`` for h in H1 and ``X1 h ⊆ X2`` for h in H2."""
    if _size(H1) < 3 or _size(H2) < 2:
        raise PreconditionError("ping-pong needs |H1| >= 3 and |H2| >= 2")
    if X1.issubset(X2):
        raise PreconditionError("X1 must not be contained in X2")
    w1, cov1 = _tosses(H1, X2, X1, radius)
    w2, cov2 = (None, False) if w1 else _tosses(H2, X1, X2, radius)
    witness = w1 or w2
    return PingPongCertificate(
        factors=(H1.summary(), H2.summary()),
        X1=X1, X2=X2, checked_radius=radius,
        verdict=witness is None, witness=witness, basin_argument=(cov1, cov2),
    )


@dataclass(frozen=True)
class FreeProduct:
    generators: tuple[Element, ...]
    left: DemonstrativeGroup | None
    right: DemonstrativeGroup | None
    certificate: PingPongCertificate | None
    sampled_words: int
    route: str = "ping-pong"
    failures: list = field(default_factory=list)


def _syllable(G: DemonstrativeGroup, rng: random.Random) -> Element:
    while True:
        f = rng.choice(G.elements)
        if G.generator is None:
            u = f
        else:
            k = rng.choice([k for k in range(-5, 6)])
            u = compose(f, power(G.generator, k))
        if not u.is_identity:
            return u


def sample_alternating_words(G: DemonstrativeGroup, H: DemonstrativeGroup, count: int,
                             max_syllables: int, seed: int = 0) -> list[Element]:
    """Products of nontrivial syllables alternating between G and H."""
    rng = random.Random(seed)
    words = []
    for _ in range(count):
        length = rng.randint(1, max_syllables)
        side = rng.randrange(2)
        w = Element.identity()
        for i in range(length):
            w = compose(w, _syllable((G, H)[(side + i) % 2], rng))
        words.append(w)
    return words


def free_product_embed(G: DemonstrativeGroup, H: DemonstrativeGroup, samples: int = 500,
                       max_syllables: int = 8, seed: int = 0) -> FreeProduct:
    """Copies of G and H generating G * H, with a ping-pong certificate."""
    if _size(G) < 2 or _size(H) < 2:
        raise PreconditionError("both factors must be nontrivial")
    if _size(G) == 2 and _size(H) == 2:
        g, h = z2_star_z2_example()
        return FreeProduct((g, h), None, None, None, 0, route="dihedral-search")
    if _size(G) == 2:
        G, H = H, G  # the factor at node 0 must have at least three elements
    left = move_node(G, "0")
    right = move_node(H, "1")
    cert = pingpong_check(left, right, NodeSet(["1"]), NodeSet(["0"]))
    if not cert.verdict:
        raise AssertionError(f"ping-pong failed: {cert.witness}")
    words = sample_alternating_words(left, right, samples, max_syllables, seed)
    bad = [w for w in words if w.is_identity]
    gens = (tuple(left.elements[1:]) + ((left.generator,) if left.generator else ())
            + tuple(right.elements[1:]) + ((right.generator,) if right.generator else ()))
    return FreeProduct(gens, left, right, cert, len(words), failures=bad)


# ------------------------------------------------------------- dihedral pair

def _small_elements(max_leaves: int):
    def antichains(k):
        if k == 1:
            yield [""]
            return
        seen = set()
        for a in antichains(k - 1):
            for i, leaf in enumerate(a):
                b = tuple(sorted(a[:i] + a[i + 1:] + [leaf + "0", leaf + "1"]))
                if b not in seen:
                    seen.add(b)
                    yield list(b)

    for k in range(1, max_leaves + 1):
        trees = list(antichains(k))
        for d in trees:
            for r in trees:
                for perm in itertools.permutations(r):
                    yield Element(dict(zip(d, perm)))


def z2_star_z2_example(max_leaves: int = 4) -> tuple[Element, Element]:
    """Two involutions whose product has infinite order, found by search."""
    invols = []
    seen = set()
    for u in _small_elements(max_leaves):
        if u in seen or u.is_identity:
            continue
        seen.add(u)
        if power(u, 2).is_identity:
            invols.append(u)
    for g, h in itertools.combinations(invols, 2):
        gh = compose(g, h)
        p = make_revealing(gh)
        if p.rep_components and all(not power(gh, k).is_identity for k in range(1, 13)):
            return g, h
    raise AssertionError("no involution pair with product of infinite order")  # pragma: no cover
