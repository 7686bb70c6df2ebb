"""Binary addresses, eventually periodic Cantor points and clopen node sets.

Addresses are plain ``str`` objects over ``'0'``/``'1'``; the empty string is
the root of the infinite binary tree (written ``e`` in text form).  A node
``n`` stands for the Cantor set of all infinite sequences beginning with ``n``.
"""

from __future__ import annotations

import re
from bisect import bisect_left
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Iterator

from .errors import ParseError

ROOT = ""

_ADDRESS_RE = re.compile(r"[01]+|e")
_POINT_RE = re.compile(r"([01]*)\(([01]+)\)")


# --------------------------------------------------------------------- addresses

def parse_address(text: str) -> str:
    text = text.strip()
    if not _ADDRESS_RE.fullmatch(text):
        raise ParseError("bad address", text, 0)
    return ROOT if text == "e" else text


def format_address(addr: str) -> str:
    return addr if addr else "e"


def is_prefix(a: str, b: str) -> bool:
    """True when node ``b`` lies at or below node ``a``."""
    return b.startswith(a)


def comparable(a: str, b: str) -> bool:
    return a.startswith(b) or b.startswith(a)


def sibling(addr: str) -> str:
    if not addr:
        raise ValueError("the root has no sibling")
    return addr[:-1] + ("1" if addr[-1] == "0" else "0")


def complement_leaves(addr: str) -> list[str]:
    """The minimal antichain covering everything outside ``addr``."""
    return [addr[:i] + ("1" if addr[i] == "0" else "0") for i in range(len(addr))]


def is_prefix_free(leaves: Iterable[str]) -> bool:
    ordered = sorted(set(leaves))
    # in lexicographic order a prefix sorts immediately before some extension of it
    return all(not ordered[i + 1].startswith(ordered[i]) for i in range(len(ordered) - 1))


def is_complete_antichain(leaves: Iterable[str]) -> bool:
    """Prefix-free and covering the whole Cantor set (Kraft sum exactly one)."""
    leaves = list(leaves)
    if not leaves or len(set(leaves)) != len(leaves):
        return False
    if any(set(a) - {"0", "1"} for a in leaves):
        return False
    if not is_prefix_free(leaves):
        return False
    return sum(Fraction(1, 2 ** len(a)) for a in leaves) == 1


def antichain_problem(leaves: Iterable[str]) -> str | None:
    """Describe why ``leaves`` is not a complete antichain, or ``None`` if it is."""
    leaves = list(leaves)
    if not leaves:
        return "empty antichain"
    seen = set()
    for a in leaves:
        if a in seen:
            return f"duplicate address {format_address(a)}"
        seen.add(a)
    ordered = sorted(seen)
    for a, b in zip(ordered, ordered[1:]):
        if b.startswith(a):
            return f"address {format_address(a)} is a prefix of {format_address(b)}"
    total = sum(Fraction(1, 2 ** len(a)) for a in leaves)
    if total != 1:
        hole = _first_uncovered(ordered)
        return f"antichain is incomplete: node {format_address(hole)} is not covered"
    return None


def _first_uncovered(ordered: list[str]) -> str:
    ns = NodeSet.full() - NodeSet(ordered)
    return ns.nodes[0] if ns.nodes else ROOT


# ------------------------------------------------------------------------ points

def _primitive_root(word: str) -> str:
    n = len(word)
    for d in range(1, n + 1):
        if n % d == 0 and word[:d] * (n // d) == word:
            return word[:d]
    return word


@dataclass(frozen=True, order=True)
class CantorPoint:
    """An eventually periodic point ``pre + per + per + ...`` in canonical form.

    Build instances with :func:`canonical_point`; the constructor does not
    canonicalize.
    """

    pre: str
    per: str

    def expand(self, n: int) -> str:
        """The first ``n`` symbols."""
        if n <= len(self.pre):
            return self.pre[:n]
        k = n - len(self.pre)
        reps = -(-k // len(self.per))
        return (self.pre + self.per * reps)[:n]

    def tail(self, k: int) -> CantorPoint:
        """The point with its first ``k`` symbols removed."""
        if k <= len(self.pre):
            return canonical_point(self.pre[k:], self.per)
        shift = (k - len(self.pre)) % len(self.per)
        return canonical_point("", self.per[shift:] + self.per[:shift])

    def prepend(self, word: str) -> CantorPoint:
        return canonical_point(word + self.pre, self.per)

    def under(self, node: str) -> bool:
        """True when the point lies in the Cantor set of ``node``."""
        return self.expand(len(node)) == node

    def __str__(self) -> str:
        return format_point(self)


def canonical_point(pre: str, per: str) -> CantorPoint:
    if not per:
        raise ValueError("period must be nonempty")
    per = _primitive_root(per)
    while pre and pre[-1] == per[-1]:
        pre = pre[:-1]
        per = per[-1] + per[:-1]
    return CantorPoint(pre, per)


def parse_point(text: str) -> CantorPoint:
    text = text.strip()
    m = _POINT_RE.fullmatch(text)
    if not m:
        raise ParseError("bad point, expected pre(period)", text, 0)
    return canonical_point(m.group(1), m.group(2))


def format_point(p: CantorPoint) -> str:
    return f"{p.pre}({p.per})"


# ---------------------------------------------------------------------- node sets

def _canonical_nodes(nodes: Iterable[str]) -> tuple[str, ...]:
    work = set(nodes)
    # drop nodes lying under another member
    ordered = sorted(work)
    kept: list[str] = []
    for a in ordered:
        if kept and a.startswith(kept[-1]):
            continue
        kept.append(a)
    work = set(kept)
    # merge siblings bottom-up
    changed = True
    while changed:
        changed = False
        for a in sorted(work, key=len, reverse=True):
            if a and a in work:
                s = sibling(a)
                if s in work:
                    work.discard(a)
                    work.discard(s)
                    work.add(a[:-1])
                    changed = True
    return tuple(sorted(work))


class NodeSet:
    """A clopen subset of the Cantor set, as a canonical finite set of nodes.

    Canonical means prefix-free with no two siblings present; equal sets have
    equal node tuples, so ``==`` and ``hash`` are exact set equality.
    """

    __slots__ = ("nodes",)

    def __init__(self, nodes: Iterable[str] = ()):
        self.nodes = _canonical_nodes(nodes)

    @classmethod
    def full(cls) -> NodeSet:
        return cls([ROOT])

    @classmethod
    def _trusted(cls, nodes: tuple[str, ...]) -> NodeSet:
        ns = cls.__new__(cls)
        ns.nodes = nodes
        return ns

    def __eq__(self, other):
        return isinstance(other, NodeSet) and self.nodes == other.nodes

    def __hash__(self):
        return hash(self.nodes)

    def __iter__(self) -> Iterator[str]:
        return iter(self.nodes)

    def __len__(self) -> int:
        return len(self.nodes)

    def __bool__(self) -> bool:
        return bool(self.nodes)

    def __repr__(self) -> str:
        return f"NodeSet({format_nodeset(self)})"

    def _covering(self, addr: str) -> str | None:
        """The member at or above ``addr``, if any."""
        i = bisect_left(self.nodes, addr)
        if i < len(self.nodes) and self.nodes[i] == addr:
            return addr
        if i > 0 and addr.startswith(self.nodes[i - 1]):
            return self.nodes[i - 1]
        return None

    def _below(self, addr: str) -> list[str]:
        """Members strictly below ``addr``."""
        i = bisect_left(self.nodes, addr)
        out = []
        while i < len(self.nodes) and self.nodes[i].startswith(addr):
            if self.nodes[i] != addr:
                out.append(self.nodes[i])
            i += 1
        return out

    def union(self, other: NodeSet) -> NodeSet:
        return NodeSet(self.nodes + other.nodes)

    def intersection(self, other: NodeSet) -> NodeSet:
        out = []
        for a in self.nodes:
            if other._covering(a) is not None:
                out.append(a)
            else:
                out.extend(other._below(a))
        return NodeSet(out)

    def difference(self, other: NodeSet) -> NodeSet:
        out: list[str] = []

        def carve(a: str) -> None:
            if other._covering(a) is not None:
                return
            if not other._below(a):
                out.append(a)
                return
            carve(a + "0")
            carve(a + "1")

        for a in self.nodes:
            carve(a)
        return NodeSet(out)

    __or__ = union
    __and__ = intersection
    __sub__ = difference

    def complement(self) -> NodeSet:
        return NodeSet.full() - self

    def isdisjoint(self, other: NodeSet) -> bool:
        return not any(
            other._covering(a) is not None or other._below(a) for a in self.nodes
        )

    def issubset(self, other: NodeSet) -> bool:
        return all(other._covering(a) is not None for a in self.nodes)

    def contains_node(self, addr: str) -> bool:
        """True when the whole Cantor set of ``addr`` lies in this set."""
        return self._covering(addr) is not None

    def meets_node(self, addr: str) -> bool:
        return self._covering(addr) is not None or bool(self._below(addr))

    def contains_point(self, p: CantorPoint) -> bool:
        depth = max((len(a) for a in self.nodes), default=0)
        return self._covering(p.expand(depth)) is not None

    __contains__ = contains_point

    def max_depth(self) -> int:
        return max((len(a) for a in self.nodes), default=0)


def parse_nodeset(text: str) -> NodeSet:
    text = text.strip()
    if not (text.startswith("{") and text.endswith("}")):
        raise ParseError("node set must be written {n1,n2,...}", text, 0)
    body = text[1:-1].strip()
    if not body:
        return NodeSet()
    nodes = []
    offset = 1
    for piece in body.split(","):
        item = piece.strip()
        if not _ADDRESS_RE.fullmatch(item):
            raise ParseError("bad address in node set", text, offset)
        nodes.append(ROOT if item == "e" else item)
        offset += len(piece) + 1
    return NodeSet(nodes)


def format_nodeset(ns: NodeSet) -> str:
    return "{" + ",".join(format_address(a) for a in ns.nodes) + "}"
