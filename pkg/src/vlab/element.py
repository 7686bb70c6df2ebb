"""Elements of Thompson's group V as canonical prefix-replacement maps.

An element is a bijection between two complete antichains: the domain leaf
``d`` sends every point ``d + s`` to ``r + s``.  Elements act on the right,
so ``u * v`` means "apply ``u``, then ``v``".
"""

from __future__ import annotations

import random
import re
from bisect import bisect_left
from functools import cached_property
from typing import Iterable

from .cantor import (
    CantorPoint,
    NodeSet,
    antichain_problem,
    canonical_point,
    complement_leaves,
    format_address,
)
from .errors import ParseError

Pair = tuple[str, str]


def _reduce(mapping: dict[str, str]) -> dict[str, str]:
    """Merge sibling leaves d0->r0, d1->r1 into d->r until none remain."""
    m = dict(mapping)
    stack = list(m)
    while stack:
        d = stack.pop()
        if not d or d not in m:
            continue
        parent = d[:-1]
        d0, d1 = parent + "0", parent + "1"
        if d0 not in m or d1 not in m:
            continue
        r0, r1 = m[d0], m[d1]
        if r0 and r1 and r0[-1] == "0" and r1[-1] == "1" and r0[:-1] == r1[:-1]:
            del m[d0], m[d1]
            m[parent] = r0[:-1]
            stack.append(parent)
    return m


class Element:
    """A canonical reduced element of V.

    ``Element(pairs)`` validates both antichains and reduces; equality of
    canonical forms is the word problem.
    """

    def __init__(self, pairs: Iterable[Pair] | dict[str, str], *, check: bool = True):
        mapping = dict(pairs.items() if isinstance(pairs, dict) else pairs)
        if check:
            for side, leaves in (("domain", mapping.keys()), ("range", mapping.values())):
                problem = antichain_problem(list(leaves))
                if problem is not None:
                    raise ValueError(f"{side} {problem}")
            if len(set(mapping.values())) != len(mapping):
                raise ValueError("range addresses are not distinct")
        mapping = _reduce(mapping)
        self._domain = tuple(sorted(mapping))
        self._map = mapping
        self.pairs: tuple[Pair, ...] = tuple((d, mapping[d]) for d in self._domain)

    @classmethod
    def identity(cls) -> Element:
        return _IDENTITY

    @classmethod
    def from_leaf_map(cls, mapping: dict[str, str]) -> Element:
        """Build from a trusted (already valid) leaf bijection."""
        return cls(mapping, check=False)

    # -- basic protocol -------------------------------------------------------

    def __eq__(self, other):
        return isinstance(other, Element) and self.pairs == other.pairs

    def __hash__(self):
        return hash(self.pairs)

    def __repr__(self):
        return f"Element({format_element(self)!r})"

    def __str__(self):
        return format_element(self)

    def __len__(self):
        return len(self.pairs)

    def __mul__(self, other: Element) -> Element:
        return compose(self, other)

    def __pow__(self, k: int) -> Element:
        return power(self, k)

    def __invert__(self) -> Element:
        return invert(self)

    @property
    def is_identity(self) -> bool:
        return self.pairs == (("", ""),)

    @property
    def domain(self) -> tuple[str, ...]:
        return self._domain

    @property
    def range(self) -> tuple[str, ...]:
        return tuple(sorted(self._map.values()))

    @cached_property
    def depth(self) -> int:
        return max(max(len(d), len(r)) for d, r in self.pairs)

    def leaf_of(self, addr: str) -> str | None:
        """The domain leaf at or above ``addr``, or None if ``addr`` is split."""
        dom = self._domain
        i = bisect_left(dom, addr)
        if i < len(dom) and dom[i] == addr:
            return addr
        if i > 0 and addr.startswith(dom[i - 1]):
            return dom[i - 1]
        return None

    def __getitem__(self, leaf: str) -> str:
        return self._map[leaf]

    def items(self):
        return self._map.items()


_IDENTITY = Element([("", "")], check=False)


# ------------------------------------------------------------------ arithmetic

def compose(u: Element, v: Element) -> Element:
    """The element ``x -> (x u) v``."""
    if u.is_identity:
        return v
    if v.is_identity:
        return u
    vdom = v.domain
    out: dict[str, str] = {}
    for d, r in u.pairs:
        leaf = v.leaf_of(r)
        if leaf is not None:
            out[d] = v[leaf] + r[len(leaf):]
            continue
        # r is strictly above some domain leaves of v
        i = bisect_left(vdom, r)
        while i < len(vdom) and vdom[i].startswith(r):
            d2 = vdom[i]
            out[d + d2[len(r):]] = v[d2]
            i += 1
    return Element.from_leaf_map(out)


def invert(u: Element) -> Element:
    return Element.from_leaf_map({r: d for d, r in u.pairs})


def power(u: Element, k: int) -> Element:
    if k < 0:
        u, k = invert(u), -k
    result = _IDENTITY
    base = u
    while k:
        if k & 1:
            result = compose(result, base)
        k >>= 1
        if k:
            base = compose(base, base)
    return result


def conjugate(u: Element, v: Element) -> Element:
    """``u^v = v^-1 u v``."""
    return compose(compose(invert(v), u), v)


def commutator(u: Element, v: Element) -> Element:
    """``[u, v] = u^-1 v^-1 u v``."""
    return compose(compose(invert(u), invert(v)), compose(u, v))


def equals(u: Element, v: Element) -> bool:
    return u.pairs == v.pairs


# ----------------------------------------------------------------------- action

def apply(u: Element, x: CantorPoint) -> CantorPoint:
    """The image ``x u`` of a Cantor point."""
    leaf = u.leaf_of(x.expand(u.depth))
    if leaf is None:  # pragma: no cover - domain is complete
        raise AssertionError("domain antichain does not cover point")
    rest = x.tail(len(leaf))
    return canonical_point(u[leaf] + rest.pre, rest.per)


def node_image(u: Element, n: str) -> str | None:
    """The node ``n u``, or None when ``n`` lies above the domain leaves (split)."""
    leaf = u.leaf_of(n)
    if leaf is None:
        return None
    return u[leaf] + n[len(leaf):]


def image_nodeset(u: Element, ns: NodeSet) -> NodeSet:
    """The clopen set ``ns u``, refining split nodes into children first."""
    out = []
    stack = list(ns.nodes)
    while stack:
        n = stack.pop()
        img = node_image(u, n)
        if img is None:
            stack.extend((n + "0", n + "1"))
        else:
            out.append(img)
    return NodeSet(out)


def support_closure(u: Element) -> NodeSet:
    """The topological closure of the support: all leaves the reduced map moves."""
    return NodeSet(d for d, r in u.pairs if d != r)


def expand_at(u: Element, leaves: Iterable[str]) -> dict[str, str]:
    """An unreduced leaf map of ``u`` with the given domain leaves split once."""
    m = dict(u.items())
    for leaf in leaves:
        r = m.pop(leaf)
        m[leaf + "0"] = r + "0"
        m[leaf + "1"] = r + "1"
    return m


# ------------------------------------------------------------------ text format

_MAPPING_RE = re.compile(r"\s*([01]+|e)\s*->\s*([01]+|e)\s*")


def parse_element(text: str) -> Element:
    """Parse ``[d1->r1, d2->r2, ...]``; addresses are bit strings or ``e``."""
    s = text.strip()
    if not s.startswith("["):
        raise ParseError("expected '['", text, text.find(s[:1]) if s else 0)
    if not s.endswith("]"):
        raise ParseError("expected ']'", text, len(text))
    body = s[1:-1]
    base = text.index("[") + 1
    pairs: list[Pair] = []
    offset = 0
    for piece in body.split(","):
        m = _MAPPING_RE.fullmatch(piece)
        if not m:
            raise ParseError("expected mapping 'address->address'", text, base + offset)
        d, r = (("" if g == "e" else g) for g in m.groups())
        pairs.append((d, r))
        offset += len(piece) + 1
    doms = [d for d, _ in pairs]
    rans = [r for _, r in pairs]
    for side, leaves in (("domain", doms), ("range", rans)):
        problem = antichain_problem(leaves)
        if problem is not None:
            raise ValueError(f"{side} {problem}")
    return Element(pairs, check=False)


def format_element(u: Element) -> str:
    return "[" + ", ".join(f"{format_address(d)}->{format_address(r)}" for d, r in u.pairs) + "]"


# ----------------------------------------------------------------- constructors

def random_antichain(n_leaves: int, rng: random.Random) -> list[str]:
    leaves = [""]
    while len(leaves) < n_leaves:
        a = leaves.pop(rng.randrange(len(leaves)))
        leaves += [a + "0", a + "1"]
    return leaves


def random_element(rng: random.Random, max_leaves: int = 12) -> Element:
    n = rng.randint(1, max_leaves)
    dom = random_antichain(n, rng)
    ran = random_antichain(n, rng)
    rng.shuffle(ran)
    return Element.from_leaf_map(dict(zip(dom, ran)))


def relabel(u: Element, prefix: str) -> Element:
    """The copy of ``u`` acting inside the node ``prefix`` and trivially elsewhere."""
    m = {prefix + d: prefix + r for d, r in u.pairs}
    for c in complement_leaves(prefix):
        m[c] = c
    return Element.from_leaf_map(m)


X0 = parse_element("[0->00, 10->01, 11->1]")
SWAP = parse_element("[0->1, 1->0]")
G_DEMO = parse_element("[0->110, 100->10, 101->0, 11->111]")
