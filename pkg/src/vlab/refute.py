"""Turn a triple (alpha, beta, gamma) with [alpha, beta] = 1 into torsion.

The pipeline keeps, next to the current elements, words in ``a, b, c`` that
produce them from the original triple.  Each step replaces gamma by a
commutator (or a power) so that its support moves away from the important
points of alpha and beta.  Once gamma is clear of them, a conjugate of gamma
by ``alpha^x beta^y`` is pushed past gamma inside the supports of alpha and
beta and the commutator ``omega = [gamma, gamma^(alpha^x beta^y)]`` is
returned together with its word.  The word is nontrivial in ``Z^2 * Z`` and
``omega**6`` is checked to be the identity.
"""

from __future__ import annotations

import json
import random
from dataclasses import dataclass, field, replace
from functools import lru_cache

from .cantor import CantorPoint, NodeSet, format_point
from .element import (
    G_DEMO,
    SWAP,
    X0,
    Element,
    apply,
    commutator,
    compose,
    conjugate,
    format_element,
    image_nodeset,
    invert,
    node_image,
    power,
    random_element,
    relabel,
    support_closure,
)
from .errors import IterationCapError, PreconditionError, iteration_cap
from .revealing import (
    common_powers,
    components_of_support,
    important_points,
    kill_finite_orbits,
    order_of,
)
from . import zz_words as zz
from .zz_words import ZZWord

DISPLACE_CAP = 10_000
PAIR_RADIUS = 4
NEIGHBORHOOD_DEPTH = 64  # levels below the deepest important point
SETTLE_CAP = 512
FLAT_BUDGET = 200_000  # node images per letterwise evaluation before falling back


class ProgressError(RuntimeError):
    """A monotone-progress invariant of the pipeline was violated."""


@dataclass(frozen=True)
class Triple:
    alpha: Element
    beta: Element
    gamma: Element
    shadow_a: ZZWord = zz.A_WORD
    shadow_b: ZZWord = zz.B_WORD
    shadow_c: ZZWord = zz.C_WORD
    origin: tuple[Element, Element, Element] | None = None
    transcript: tuple[dict, ...] = ()
    book: ShadowBook | None = field(default=None, compare=False, repr=False)

    @classmethod
    def start(cls, alpha: Element, beta: Element, gamma: Element) -> Triple:
        if not commutator(alpha, beta).is_identity:
            raise PreconditionError("alpha and beta do not commute")
        origin = (alpha, beta, gamma)
        return cls(alpha, beta, gamma, origin=origin, book=ShadowBook(origin))

    def logged(self, op: str, **info) -> Triple:
        entry = {
            "op": op,
            "shadow_c": str(self.shadow_c),
            "sizes": [len(self.alpha), len(self.beta), len(self.gamma)],
            "cleared": [format_point(p) for p in cleared_points(self)],
        }
        entry.update(info)
        return replace(self, transcript=self.transcript + (entry,))


@dataclass(frozen=True)
class Certificate:
    witness_word: ZZWord
    witness_element: Element
    order: int | None
    kind: str  # "omega" or "trivialized-at-<step>"
    transcript: tuple[dict, ...] = ()
    exponents: dict = field(default_factory=dict)
    evaluation: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {
            "schema": 1,
            "kind": self.kind,
            "witness_word": str(self.witness_word),
            "witness_element": format_element(self.witness_element),
            "order": "infinite" if self.order is None else self.order,
            "exponents": self.exponents,
            "evaluation": self.evaluation,
            "transcript": list(self.transcript),
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2)


class Trivialized(Exception):
    """Gamma became the identity although its word is nontrivial."""

    def __init__(self, triple: Triple, stage: str, word: ZZWord):
        super().__init__(f"gamma trivialized at {stage}")
        self.triple = triple
        self.stage = stage
        self.word = word


# ---------------------------------------------------------------- bookkeeping

def evaluate_shadow(w: ZZWord, origin: tuple[Element, Element, Element],
                    budget: int | None = None) -> Element | None:
    """The element ``w(alpha, beta, gamma)`` of the original triple.

    Leaves are pushed through the letters one at a time and split only where
    a letter splits them, so no intermediate products are formed.  Returns
    None once more than ``budget`` node images have been taken.
    """
    a, b, c = origin
    cache: dict[tuple[int, int], Element] = {}

    def pw(i: int, k: int) -> Element:
        if (i, k) not in cache:
            cache[i, k] = power(origin[i], k)
        return cache[i, k]

    seq = []
    for blk in w.blocks:
        if isinstance(blk, zz.AB):
            seq += [pw(0, blk.x)] if blk.x else []
            seq += [pw(1, blk.y)] if blk.y else []
        else:
            seq.append(pw(2, blk.z))
    seq = [u for u in seq if not u.is_identity]
    out: dict[str, str] = {}
    stack = [("", "", 0)]
    work = 0
    while stack:
        start, node, i = stack.pop()
        while i < len(seq):
            work += 1
            if budget is not None and work > budget:
                return None
            img = node_image(seq[i], node)
            if img is None:
                break
            node, i = img, i + 1
        if i == len(seq):
            out[start] = node
        else:
            stack.append((start + "1", node + "1", i))
            stack.append((start + "0", node + "0", i))
    return Element.from_leaf_map(out)


class ShadowBook:
    """Values of words at the original triple.

    Short words are evaluated letter by letter.  A long word is valued from
    the values of the words it was built from (see :meth:`derive`), and the
    letter-by-letter evaluation is still run on it while that stays within
    ``FLAT_BUDGET``.
    """

    def __init__(self, origin: tuple[Element, Element, Element]):
        self.origin = origin
        self.values: dict[ZZWord, Element] = {}
        self.flat = 0
        self.derived = 0

    def value(self, w: ZZWord) -> Element:
        if w not in self.values:
            v = evaluate_shadow(w, self.origin, FLAT_BUDGET)
            if v is None:
                raise ProgressError(f"no value recorded for a word with {len(w.blocks)} blocks")
            self.values[w] = v
            self.flat += 1
        return self.values[w]

    def derive(self, w: ZZWord, v: Element) -> Element:
        """Record ``v`` as the value of ``w``, cross-checking when affordable."""
        if w in self.values:
            if self.values[w] != v:
                raise ProgressError("two values recorded for one word")
            return v
        flat = evaluate_shadow(w, self.origin, FLAT_BUDGET)
        if flat is None:
            self.derived += 1
        elif flat != v:
            raise ProgressError("word does not evaluate to the value built from its parts")
        else:
            self.flat += 1
        self.values[w] = v
        return v

    def power(self, w: ZZWord, k: int) -> ZZWord:
        return self._made(w ** k, lambda: power(self.value(w), k))

    def mul(self, u: ZZWord, v: ZZWord) -> ZZWord:
        return self._made(u * v, lambda: compose(self.value(u), self.value(v)))

    def comm(self, u: ZZWord, v: ZZWord) -> ZZWord:
        return self._made(zz.commutator(u, v), lambda: commutator(self.value(u), self.value(v)))

    def conj(self, u: ZZWord, v: ZZWord) -> ZZWord:
        return self._made(zz.conjugate(u, v), lambda: conjugate(self.value(u), self.value(v)))

    def _made(self, w: ZZWord, build) -> ZZWord:
        if w not in self.values:
            self.derive(w, build())
        return w


def _book(t: Triple) -> ShadowBook:
    if t.book is None:
        raise PreconditionError("triple has no original elements to evaluate words at")
    return t.book


def check_shadows(t: Triple) -> None:
    """Assert that the shadow words reproduce the current elements."""
    if t.origin is None:
        return
    book = _book(t)
    for name, w, u in (("alpha", t.shadow_a, t.alpha), ("beta", t.shadow_b, t.beta),
                       ("gamma", t.shadow_c, t.gamma)):
        if book.value(w) != u:
            raise ProgressError(f"shadow word for {name} no longer evaluates to it")


@dataclass(frozen=True)
class Layout:
    """Components of support of alpha and beta and their important points."""

    alpha_only: tuple[NodeSet, ...]
    beta_only: tuple[NodeSet, ...]
    common: tuple[NodeSet, ...]
    common_powers: tuple[tuple[int, int], ...]
    important: tuple[CantorPoint, ...]
    support: NodeSet


@lru_cache(maxsize=64)
def layout(alpha: Element, beta: Element) -> Layout:
    ca = components_of_support(alpha) if not alpha.is_identity else []
    cb = components_of_support(beta) if not beta.is_identity else []
    common = [X for X in ca if X in cb]
    for X in ca:
        for Y in cb:
            if X != Y and not X.isdisjoint(Y):
                raise PreconditionError("components of alpha and beta overlap without agreeing")
    powers = tuple(common_powers(alpha, beta, X) for X in common)
    imp = set()
    for u in (alpha, beta):
        if not u.is_identity:
            imp.update(ip.point for ip in important_points(u))
    return Layout(
        alpha_only=tuple(X for X in ca if X not in common),
        beta_only=tuple(Y for Y in cb if Y not in common),
        common=tuple(common),
        common_powers=powers,
        important=tuple(sorted(imp)),
        support=support_closure(alpha) | support_closure(beta),
    )


def _imp(t: Triple) -> tuple[CantorPoint, ...]:
    return layout(t.alpha, t.beta).important


def _gamma_points(t: Triple) -> set[CantorPoint]:
    if t.gamma.is_identity:
        return set()
    return {ip.point for ip in important_points(t.gamma)}


def cleared_points(t: Triple) -> list[CantorPoint]:
    """Important points of alpha and beta near which gamma is the identity."""
    cs = support_closure(t.gamma)
    return [p for p in _imp(t) if not cs.contains_point(p)]


def _set_gamma(t: Triple, gamma: Element, word: ZZWord, stage: str, op: str, **info) -> Triple:
    t = replace(t, gamma=gamma, shadow_c=word)
    check_shadows(t)
    if gamma.is_identity:
        raise Trivialized(t.logged(op, power=1, trivialized=True, **info), stage, word)
    k, g = kill_finite_orbits(gamma)
    if k > 1:
        t = replace(t, gamma=g, shadow_c=_book(t).power(word, k))
        check_shadows(t)
        if g.is_identity:
            raise Trivialized(t.logged(op, power=k, trivialized=True, **info), stage, t.shadow_c)
    return t.logged(op, power=k, **info)


# ----------------------------------------------------------------- the steps

def step1_kill_orbits(t: Triple) -> Triple:
    """Pass to powers of alpha, beta, gamma without nontrivial finite orbits."""
    ka, a = kill_finite_orbits(t.alpha)
    kb, b = kill_finite_orbits(t.beta)
    kc, c = kill_finite_orbits(t.gamma)
    book = _book(t)
    t = replace(t, alpha=a, beta=b, gamma=c, shadow_a=book.power(t.shadow_a, ka),
                shadow_b=book.power(t.shadow_b, kb), shadow_c=book.power(t.shadow_c, kc))
    check_shadows(t)
    lay = layout(a, b)
    t = t.logged(
        "kill-orbits",
        exponents=[ka, kb, kc],
        components={"alpha_only": len(lay.alpha_only), "beta_only": len(lay.beta_only),
                    "common": len(lay.common)},
        common_powers=[list(mn) for mn in lay.common_powers],
    )
    if c.is_identity:
        raise Trivialized(t, "step1", t.shadow_c)
    return t


def step2_separate_important(t: Triple) -> Triple:
    """Replace gamma by [alpha beta, gamma] until I(gamma) misses I(alpha) u I(beta)."""
    imp = set(_imp(t))
    cap = iteration_cap(len(imp) + 4)
    cleared = set(cleared_points(t))
    ab = compose(t.alpha, t.beta)
    book = _book(t)
    for _ in range(cap):
        if not (_gamma_points(t) & imp):
            return t
        t = _set_gamma(t, commutator(ab, t.gamma),
                       book.comm(book.mul(t.shadow_a, t.shadow_b), t.shadow_c),
                       "step2", "separate-important")
        now = set(cleared_points(t))
        if not cleared <= now:
            raise ProgressError("an important point re-entered the support of gamma")
        cleared = now
    if _gamma_points(t) & imp:
        raise IterationCapError(f"step2 exceeded {cap} iterations", state=t)
    return t


def _choose_pq(t: Triple, y: CantorPoint) -> tuple[int, int, str]:
    lay = layout(t.alpha, t.beta)
    if apply(t.alpha, y) == y:
        return 1, 0, "alpha-fixes-y"
    for X, (m, n) in zip(lay.common, lay.common_powers):
        if X.contains_point(y):
            return m, -n, "common-component"
    for X in lay.alpha_only:
        if X.contains_point(y):
            return 0, 1, "alpha-only-component"
    raise AssertionError("y moved by alpha but outside its components")  # pragma: no cover


def step3_clear_supports(t: Triple) -> Triple:
    """Replace gamma by commutators until csupp(gamma) misses I(alpha) u I(beta)."""
    imp = _imp(t)
    cap = iteration_cap(len(imp) + 4)

    def inside(t):
        cs = support_closure(t.gamma)
        return [p for p in imp if cs.contains_point(p)]

    for _ in range(cap):
        hits = inside(t)
        if not hits:
            return t
        x = hits[0]
        y = apply(invert(t.gamma), x)
        p, q, branch = _choose_pq(t, y)
        mover = compose(power(t.alpha, p), power(t.beta, q))
        book = _book(t)
        shadow = book.mul(book.power(t.shadow_a, p), book.power(t.shadow_b, q))
        t = _set_gamma(t, commutator(mover, t.gamma), book.comm(shadow, t.shadow_c),
                       "step3", "clear-support", x=format_point(x), y=format_point(y),
                       branch=branch, pq=[p, q])
        if _gamma_points(t) & set(imp):
            t = step2_separate_important(t)
        if len(inside(t)) >= len(hits):
            raise ProgressError("step3 did not shrink csupp(gamma) on important points")
    if inside(t):
        raise IterationCapError(f"step3 exceeded {cap} iterations", state=t)
    return t


def _nontrivial_everywhere(t: Triple, i: int, j: int) -> bool:
    lay = layout(t.alpha, t.beta)
    sup = support_closure(compose(power(t.alpha, i), power(t.beta, j)))
    return all(not sup.isdisjoint(X) for X in lay.alpha_only + lay.beta_only + lay.common)


def find_displacing_pair(t: Triple) -> tuple[int, int]:
    """Nonzero (x, y) with csupp(gamma^(a^x b^y)) & csupp(gamma) & csupp(a, b) empty."""
    lay = layout(t.alpha, t.beta)
    cs = support_closure(t.gamma)
    inner = cs & lay.support
    if not inner:
        return 1, 1
    pairs = sorted(
        ((i, j) for i in range(-PAIR_RADIUS, PAIR_RADIUS + 1)
         for j in range(-PAIR_RADIUS, PAIR_RADIUS + 1) if i and j),
        key=lambda ij: (abs(ij[0]) + abs(ij[1]), -ij[0], -ij[1]),
    )
    cap = iteration_cap(DISPLACE_CAP)
    for i, j in pairs:
        if not _nontrivial_everywhere(t, i, j):
            continue
        step = compose(power(t.alpha, i), power(t.beta, j))
        moved = inner
        for n in range(1, cap + 1):
            moved = image_nodeset(step, moved)
            if moved.isdisjoint(inner):
                return n * i, n * j
        raise IterationCapError(f"no displacement for ({i}, {j}) within n <= {cap}")
    raise IterationCapError("no (i, j) acts nontrivially on every component")


def _neighborhoods(gamma: Element, theta: Element, delta: Element):
    """Disjoint nodes around the important points of gamma and theta.

    A repelling node is mapped into itself by the inverse of each element it
    belongs to, an attracting node by the element itself; every node lies in
    the closed support of its element and is either moved off itself by
    delta or disjoint from the support of delta.
    """
    owners: dict[CantorPoint, list[tuple[str, Element]]] = {}
    for u in (gamma, theta):
        for ip in important_points(u):
            owners.setdefault(ip.point, []).append((ip.kind, u))
    ds = support_closure(delta)
    sup = {id(u): support_closure(u) for u in (gamma, theta)}
    inv = {id(u): invert(u) for u in (gamma, theta)}
    limit = max(len(p.pre) + len(p.per) for p in owners) + NEIGHBORHOOD_DEPTH
    for depth in range(1, limit + 1):
        nodes = {p: p.expand(depth) for p in owners}
        if len(set(nodes.values())) < len(nodes):
            continue
        ok = True
        for p, n in nodes.items():
            single = NodeSet([n])
            if ds.meets_node(n) and not image_nodeset(delta, single).isdisjoint(single):
                ok = False
            for kind, u in owners[p]:
                if not sup[id(u)].contains_node(n):
                    ok = False
                f = inv[id(u)] if kind == "repelling" else u
                if not image_nodeset(f, single).issubset(single):
                    ok = False
            if not ok:
                break
        if ok:
            rep = NodeSet(n for p, n in nodes.items() if owners[p][0][0] == "repelling")
            att = NodeSet(n for p, n in nodes.items() if owners[p][0][0] == "attracting")
            return rep, att
    raise IterationCapError(f"no separating neighborhoods above depth {limit}")


def settle_power(gamma: Element, delta: Element) -> int:
    """Least K with N_r gamma^K u N_r theta^K u N_a covering both closed supports.

    Here theta = gamma^delta, N_r and N_a are the repelling and attracting
    neighborhoods from :func:`_neighborhoods`.
    """
    theta = conjugate(gamma, delta)
    rep, att = _neighborhoods(gamma, theta, delta)
    target = support_closure(gamma) | support_closure(theta)
    by_gamma, by_theta = rep, rep
    for k in range(1, SETTLE_CAP + 1):
        by_gamma = image_nodeset(gamma, by_gamma)
        by_theta = image_nodeset(theta, by_theta)
        if target.issubset(by_gamma | by_theta | att):
            return k
    raise IterationCapError(f"neighborhoods do not cover the supports within {SETTLE_CAP}")


@dataclass(frozen=True)
class Omega:
    omega: Element
    shadow: ZZWord
    power: int


def build_omega(t: Triple, x: int, y: int) -> Omega:
    """``omega = [g, g^(alpha^x beta^y)]`` for ``g = gamma^K``, K from :func:`settle_power`."""
    delta = compose(power(t.alpha, x), power(t.beta, y))
    if t.gamma.is_identity:
        return Omega(Element.identity(), zz.commutator(t.shadow_c, t.shadow_c), 1)
    k = settle_power(t.gamma, delta)
    g = power(t.gamma, k)
    omega = commutator(g, conjugate(g, delta))
    if t.book is None:
        wg = t.shadow_c ** k
        shadow = zz.commutator(wg, zz.conjugate(wg, t.shadow_a ** x * t.shadow_b ** y))
    else:
        b = t.book
        wg = b.power(t.shadow_c, k)
        mover = b.mul(b.power(t.shadow_a, x), b.power(t.shadow_b, y))
        shadow = b.comm(wg, b.conj(wg, mover))
    return Omega(omega, shadow, k)


# --------------------------------------------------------------- orchestration

def run_refutation(alpha: Element, beta: Element, gamma: Element) -> Certificate:
    t = Triple.start(alpha, beta, gamma)
    try:
        t = step1_kill_orbits(t)
        t = step2_separate_important(t)
        t = t.logged("step2-done")
        t = step3_clear_supports(t)
        t = t.logged("step3-done")
    except Trivialized as e:
        return _certificate(e.triple, e.word, Element.identity(), f"trivialized-at-{e.stage}")
    x, y = find_displacing_pair(t)
    om = build_omega(t, x, y)
    t = t.logged("omega", xy=[x, y], settle_power=om.power, omega_size=len(om.omega))
    if om.shadow.is_identity:  # pragma: no cover - the word is an (a,b,c)-commutator
        raise ProgressError("omega word is trivial in Z^2 * Z")
    if t.book is not None and t.book.value(om.shadow) != om.omega:
        raise ProgressError("omega word does not evaluate to omega")
    return _certificate(t, om.shadow, om.omega, "omega")


def _certificate(t: Triple, word: ZZWord, element: Element, kind: str) -> Certificate:
    if word.is_identity:  # pragma: no cover
        raise ProgressError("witness word is trivial in Z^2 * Z")
    exps = next((e["exponents"] for e in t.transcript if e["op"] == "kill-orbits"), None)
    return Certificate(
        witness_word=word,
        witness_element=element,
        order=order_of(element),
        kind=kind,
        transcript=t.transcript,
        exponents={"kill_orbits": exps},
        evaluation=({"letterwise": t.book.flat, "from_parts": t.book.derived}
                    if t.book is not None else {}),
    )


# ------------------------------------------------------------------ instances

def _orbit_free(rng: random.Random, max_leaves: int) -> Element:
    while True:
        u = random_element(rng, max_leaves)
        k, w = kill_finite_orbits(u)
        if not w.is_identity and len(w) <= 3 * max_leaves:
            return w


def _infinite_order(rng: random.Random, max_leaves: int) -> Element:
    while True:
        u = random_element(rng, max_leaves)
        if order_of(u) is None:
            return u


def random_instance(seed: int) -> tuple[str, Element, Element, Element]:
    """A commuting pair and a third element, of one of several flavours."""
    rng = random.Random(seed)
    flavour = ["disjoint", "powers", "product", "finite-gamma", "overlap", "trivial-beta"][seed % 6]
    if flavour == "disjoint":
        a = relabel(_orbit_free(rng, 6), "0")
        b = relabel(_orbit_free(rng, 6), "1")
        c = _infinite_order(rng, 8)
    elif flavour == "powers":
        u = _orbit_free(rng, 6)
        a, b = power(u, rng.choice([1, 2, -1])), power(u, rng.choice([1, 2, 3, -2]))
        c = _infinite_order(rng, 8)
    elif flavour == "product":
        u = relabel(_orbit_free(rng, 5), "00")
        v = relabel(_orbit_free(rng, 5), "1")
        a, b = compose(u, v), power(v, rng.choice([1, 2]))
        c = _infinite_order(rng, 8)
    elif flavour == "finite-gamma":
        a = relabel(_orbit_free(rng, 6), "0")
        b = relabel(X0, "1")
        c = rng.choice([SWAP, relabel(SWAP, "1"), relabel(SWAP, "01")])
    elif flavour == "overlap":
        a = relabel(X0, "0")
        b = relabel(_orbit_free(rng, 6), "1")
        c = conjugate(G_DEMO, random_element(rng, 5))
    else:
        a = _orbit_free(rng, 6)
        b = Element.identity()
        c = _infinite_order(rng, 8)
    return flavour, a, b, c
