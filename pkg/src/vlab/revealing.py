"""Revealing pairs and the dynamics they expose.

A tree pair is stored as its leaf map (domain leaf -> range leaf), which may
be an unreduced expansion of an element.  The common tree ``C = D & R`` has
three kinds of leaves: neutral leaves (leaves of both trees), roots of
repelling components (range leaves that are internal in the domain tree) and
roots of attracting components (domain leaves that are internal in the range
tree).
"""

from __future__ import annotations

from bisect import bisect_right
from dataclasses import dataclass
from functools import lru_cache
from math import gcd, lcm
from typing import Mapping

import networkx as nx

from .cantor import CantorPoint, NodeSet, canonical_point, format_address
from .element import (
    Element,
    apply,
    commutator,
    compose,
    invert,
    node_image,
    power,
    support_closure,
)
from .errors import IterationCapError, PreconditionError, iteration_cap

REVEAL_CAP = 10_000


@dataclass(frozen=True)
class RepComponent:
    root: str
    leaves: tuple[str, ...]
    repeller: str
    return_length: int


@dataclass(frozen=True)
class AttComponent:
    root: str
    leaves: tuple[str, ...]
    attractor: str
    return_length: int


@dataclass(frozen=True)
class Chain:
    source: str
    neutrals: tuple[str, ...]
    sink: str


@dataclass(frozen=True)
class RevealingPair:
    element: Element
    pairs: tuple[tuple[str, str], ...]
    common_tree_leaves: tuple[str, ...]
    neutral: tuple[str, ...]
    rep_components: tuple[RepComponent, ...]
    att_components: tuple[AttComponent, ...]
    chains: tuple[Chain, ...]
    cycles: tuple[tuple[str, ...], ...]

    @property
    def leaf_map(self) -> dict[str, str]:
        return dict(self.pairs)


@dataclass(frozen=True, order=True)
class ImportantPoint:
    point: CantorPoint
    kind: str  # "repelling" | "attracting"
    basin: str
    log2_slope: int


class FiniteOrbitError(PreconditionError):
    """The element has nontrivial finite orbits."""


# ----------------------------------------------------------------- tree helpers

def _tree_nodes(leaves) -> set[str]:
    nodes = set()
    for leaf in leaves:
        for i in range(len(leaf) + 1):
            nodes.add(leaf[:i])
    return nodes


def _strictly_above(node: str, leaves: list[str]) -> bool:
    """Whether ``node`` is a proper prefix of some entry of sorted ``leaves``."""
    i = bisect_right(leaves, node)
    return i < len(leaves) and leaves[i].startswith(node)


def _classify(m: Mapping[str, str]):
    dom = sorted(m)
    ran = sorted(m.values())
    neutral = set(dom) & set(ran)
    rep_roots = [r for r in ran if r not in neutral and _strictly_above(r, dom)]
    att_roots = [d for d in dom if d not in neutral and _strictly_above(d, ran)]
    return neutral, rep_roots, att_roots


def _defects(m: Mapping[str, str]) -> list[list[str]]:
    """Domain leaves along each orbit path that breaks the revealing conditions."""
    neutral, rep_roots, att_roots = _classify(m)
    inv = {r: d for d, r in m.items()}
    out = []
    for n in rep_roots:
        path = [inv[n]]
        while path[-1] in neutral:
            path.append(inv[path[-1]])
        if not path[-1].startswith(n):
            out.append(path)
    for n in att_roots:
        path = [n]
        x = m[n]
        while x in neutral:
            path.append(x)
            x = m[x]
        if not x.startswith(n):
            out.append(path)
    return out


def _split(m: dict[str, str], leaves) -> None:
    for leaf in leaves:
        r = m.pop(leaf)
        m[leaf + "0"] = r + "0"
        m[leaf + "1"] = r + "1"


# ----------------------------------------------------------------- construction

@lru_cache(maxsize=256)
def make_revealing(u: Element) -> RevealingPair:
    """Expand the reduced pair of ``u`` until it is revealing.

    Each round picks one component whose root violates the repeller or
    attractor condition and splits every pair along the orbit path from that
    root, which pushes the offending component deeper until it dissolves.
    """
    m = dict(u.items())
    cap = iteration_cap(REVEAL_CAP)
    for _ in range(cap):
        bad = _defects(m)
        if not bad:
            break
        _split(m, bad[0])
    else:
        raise IterationCapError(
            f"no revealing pair for {u} within {cap} expansions", state=dict(m)
        )
    return describe_pair(u, m)


def describe_pair(u: Element, m: Mapping[str, str]) -> RevealingPair:
    """Read components, chains and cycles off a revealing leaf map."""
    neutral, rep_roots, att_roots = _classify(m)
    inv = {r: d for d, r in m.items()}
    dom = sorted(m)

    def leaves_under(root):
        return tuple(d for d in dom if d.startswith(root) and d != root)

    def ranges_under(root):
        return tuple(sorted(r for r in m.values() if r.startswith(root) and r != root))

    on_path: set[str] = set()
    reps = []
    for n in rep_roots:
        x, t = inv[n], 1
        while x in neutral:
            on_path.add(x)
            x, t = inv[x], t + 1
        reps.append(RepComponent(n, leaves_under(n), x, t))
    atts = []
    for n in att_roots:
        x, t = m[n], 1
        while x in neutral:
            on_path.add(x)
            x, t = m[x], t + 1
        atts.append(AttComponent(n, ranges_under(n), x, t))
    repellers = {c.repeller for c in reps}
    chains = []
    for c in reps:
        for s in c.leaves:
            if s in repellers:
                continue
            mids = []
            x = m[s]
            while x in neutral:
                mids.append(x)
                on_path.add(x)
                x = m[x]
            chains.append(Chain(s, tuple(mids), x))
    cycles = []
    seen = set(on_path)
    for n in sorted(neutral):
        if n in seen:
            continue
        cyc = [n]
        seen.add(n)
        x = m[n]
        while x != n:
            cyc.append(x)
            seen.add(x)
            x = m[x]
        cycles.append(tuple(cyc))
    return RevealingPair(
        element=u,
        pairs=tuple(sorted(m.items())),
        common_tree_leaves=tuple(sorted(neutral | set(rep_roots) | set(att_roots))),
        neutral=tuple(sorted(neutral)),
        rep_components=tuple(reps),
        att_components=tuple(atts),
        chains=tuple(sorted(chains, key=lambda c: c.source)),
        cycles=tuple(cycles),
    )


def verify_revealing(p: RevealingPair) -> bool:
    """Check every structural claim of ``p`` against the action of ``p.element``."""
    u = p.element
    m = dict(p.pairs)
    try:
        if Element(m) != u:
            return False
    except ValueError:
        return False
    # each pair must be the induced node action of u
    if any(node_image(u, d) != r for d, r in m.items()):
        return False
    dom, ran = set(m), set(m.values())
    dnodes, rnodes = _tree_nodes(dom), _tree_nodes(ran)
    common = dnodes & rnodes
    c_leaves = {n for n in common if n in dom or n in ran}
    if set(p.common_tree_leaves) != c_leaves:
        return False
    if set(p.neutral) != dom & ran & common:
        return False
    roots_seen = set(p.neutral)
    for c in p.rep_components:
        if c.root not in ran or c.root in dom or c.root not in common:
            return False
        if set(c.leaves) != {d for d in dom if d.startswith(c.root) and d != c.root}:
            return False
        if c.repeller not in c.leaves:
            return False
        x, t = node_image(u, c.repeller), 1
        while x != c.root:
            if x not in p.neutral or t > len(m):
                return False
            x, t = node_image(u, x), t + 1
        if t != c.return_length:
            return False
        roots_seen.add(c.root)
    for c in p.att_components:
        if c.root not in dom or c.root in ran or c.root not in common:
            return False
        if set(c.leaves) != {r for r in ran if r.startswith(c.root) and r != c.root}:
            return False
        if c.attractor not in c.leaves:
            return False
        x, t = node_image(u, c.root), 1
        while x != c.attractor:
            if x not in p.neutral or t > len(m):
                return False
            x, t = node_image(u, x), t + 1
        if t != c.return_length:
            return False
        roots_seen.add(c.root)
    if roots_seen != c_leaves:
        return False
    repellers = {c.repeller for c in p.rep_components}
    attractors = {c.attractor for c in p.att_components}
    sources = {s for c in p.rep_components for s in c.leaves} - repellers
    sinks = {s for c in p.att_components for s in c.leaves} - attractors
    if {ch.source for ch in p.chains} != sources or len(p.chains) != len(sources):
        return False
    for ch in p.chains:
        x = node_image(u, ch.source)
        for n in ch.neutrals:
            if x != n or n not in p.neutral:
                return False
            x = node_image(u, n)
        if x != ch.sink or x not in sinks:
            return False
    for cyc in p.cycles:
        for i, n in enumerate(cyc):
            if n not in p.neutral or node_image(u, n) != cyc[(i + 1) % len(cyc)]:
                return False
    return True


# ------------------------------------------------------------------ finite orbits

def has_nontrivial_finite_orbits(u: Element) -> bool:
    return _finite_orbit_witness(make_revealing(u)) is not None


def _finite_orbit_witness(p: RevealingPair) -> str | None:
    for cyc in p.cycles:
        if len(cyc) >= 2:
            return f"neutral cycle {' -> '.join(format_address(n) for n in cyc)}"
    for c in p.rep_components:
        if c.return_length >= 2:
            return f"repeller {format_address(c.repeller)} returns after {c.return_length} steps"
    for c in p.att_components:
        if c.return_length >= 2:
            return f"attractor root {format_address(c.root)} returns after {c.return_length} steps"
    return None


def _periods(p: RevealingPair) -> list[int]:
    lengths = [len(c) for c in p.cycles]
    lengths += [c.return_length for c in p.rep_components]
    lengths += [c.return_length for c in p.att_components]
    return lengths


def kill_finite_orbits(u: Element) -> tuple[int, Element]:
    """The least ``k >= 1`` such that ``u**k`` has no nontrivial finite orbits.

    Periodic points of ``u`` fill the neutral cycles (period the cycle length)
    or are the repellers and attractors (period the return length).  A point
    of period ``t`` is fixed by ``u**d`` exactly when ``t`` divides ``d``, so
    the divisors of the lcm are tried in increasing order against the periods.
    """
    periods = _periods(make_revealing(u))
    candidate = lcm(1, *periods)
    for k in range(1, candidate + 1):
        if candidate % k == 0 and all(k % t == 0 for t in periods):
            return k, power(u, k)
    raise AssertionError("period lcm failed to clear finite orbits")  # pragma: no cover


def order_of(u: Element) -> int | None:
    """The order of ``u``; None means infinite."""
    p = make_revealing(u)
    if p.rep_components or p.att_components:
        return None
    k = lcm(1, *(len(c) for c in p.cycles))
    if not power(u, k).is_identity:  # pragma: no cover - structural guarantee
        raise AssertionError("cycle lcm is not an exponent")
    for q in _prime_factors(k):
        if power(u, k // q).is_identity:  # pragma: no cover
            raise AssertionError("cycle lcm is not the order")
    return k


def _prime_factors(n: int) -> list[int]:
    out, q = [], 2
    while q * q <= n:
        if n % q == 0:
            out.append(q)
            while n % q == 0:
                n //= q
        q += 1
    if n > 1:
        out.append(n)
    return out


# ------------------------------------------------------------- important points

def _require_orbit_free(u: Element) -> RevealingPair:
    p = make_revealing(u)
    why = _finite_orbit_witness(p)
    if why is not None:
        raise FiniteOrbitError(f"{u} has a nontrivial finite orbit: {why}")
    return p


def important_points(u: Element) -> tuple[ImportantPoint, ...]:
    """Repelling and attracting fixed points, sorted by point."""
    p = _require_orbit_free(u)
    out = []
    for c in p.rep_components:
        w = c.repeller[len(c.root):]
        out.append(ImportantPoint(canonical_point(c.root, w), "repelling", c.root, len(w)))
    for c in p.att_components:
        w = c.attractor[len(c.root):]
        out.append(ImportantPoint(canonical_point(c.root, w), "attracting", c.root, -len(w)))
    return tuple(sorted(out))


def important_point_set(u: Element) -> frozenset[CantorPoint]:
    return frozenset(ip.point for ip in important_points(u))


def slope_at(u: Element, x: CantorPoint) -> int:
    """log2 of the slope of ``u`` at a point it fixes."""
    leaf = u.leaf_of(x.expand(u.depth))
    if apply(u, x) != x:
        raise PreconditionError(f"{x} is not fixed by {u}")
    return len(leaf) - len(u[leaf])


# ------------------------------------------------------------------- flow graphs

@dataclass(frozen=True)
class FlowGraph:
    rep_basins: tuple[str, ...]
    att_basins: tuple[str, ...]
    edges: tuple[tuple[str, str, Chain], ...]
    components: tuple[tuple[tuple[str, ...], NodeSet], ...]

    def to_dot(self) -> str:
        return flow_graph_dot(self)


def flow_graph(u: Element) -> FlowGraph:
    p = _require_orbit_free(u)
    rep_of = {}
    for c in p.rep_components:
        for leaf in c.leaves:
            rep_of[leaf] = c.root
    att_of = {}
    for c in p.att_components:
        for leaf in c.leaves:
            att_of[leaf] = c.root
    edges = tuple(sorted(
        ((rep_of[ch.source], att_of[ch.sink], ch) for ch in p.chains),
        key=lambda e: (e[0], e[1], e[2].source),
    ))
    g = nx.Graph()
    for c in p.rep_components:
        g.add_node(("rep", c.root))
    for c in p.att_components:
        g.add_node(("att", c.root))
    for r, a, _ in edges:
        g.add_edge(("rep", r), ("att", a))
    comps = []
    for part in nx.connected_components(g):
        basins = tuple(sorted(root for _, root in part))
        nodes = [root for _, root in part]
        for r, a, ch in edges:
            if ("rep", r) in part:
                nodes.extend(ch.neutrals)
        comps.append((basins, NodeSet(nodes)))
    comps.sort(key=lambda c: c[1].nodes)
    return FlowGraph(
        rep_basins=tuple(c.root for c in p.rep_components),
        att_basins=tuple(c.root for c in p.att_components),
        edges=edges,
        components=tuple(comps),
    )


def components_of_support(u: Element) -> list[NodeSet]:
    return [ns for _, ns in flow_graph(u).components]


def flow_graph_dot(fg: FlowGraph) -> str:
    lines = ["digraph flow {", "  rankdir=LR;"]
    for root in fg.rep_basins:
        a = format_address(root)
        lines.append(f'  "rep:{a}" [label="{a}", shape=box];')
    for root in fg.att_basins:
        a = format_address(root)
        lines.append(f'  "att:{a}" [label="{a}", shape=ellipse];')
    for r, a, ch in fg.edges:
        label = " - ".join(format_address(n) for n in (ch.source, *ch.neutrals, ch.sink))
        lines.append(f'  "rep:{format_address(r)}" -> "att:{format_address(a)}" [label="{label}"];')
    lines.append("}")
    return "\n".join(lines) + "\n"


# -------------------------------------------------------------- commuting pairs

def shared_fixed_node(g: Element, h: Element, p: CantorPoint, max_depth: int = 64) -> str:
    """A node over ``p`` inside both closed supports where ``[g, h]`` is trivial."""
    if p not in important_point_set(g) or p not in important_point_set(h):
        raise PreconditionError(f"{p} is not an important point of both elements")
    both = support_closure(g) & support_closure(h)
    comm = support_closure(commutator(g, h))
    for depth in range(1, max_depth + 1):
        n = p.expand(depth)
        if both.contains_node(n) and not comm.meets_node(n):
            return n
    raise PreconditionError(f"no shared fixed node above depth {max_depth}")


def common_powers(g: Element, h: Element, X: NodeSet) -> tuple[int, int]:
    """Least nonzero ``(m, n)`` with ``g**m == h**n`` on the common component X."""
    if X not in components_of_support(g) or X not in components_of_support(h):
        raise PreconditionError("X is not a common component of support")
    shared = sorted(
        p for p in important_point_set(g) & important_point_set(h) if X.contains_point(p)
    )
    if not shared:
        raise PreconditionError("no shared important point in X")
    p = shared[0]
    sg, sh = slope_at(g, p), slope_at(h, p)
    d = gcd(sg, sh)
    m, n = sh // d, sg // d
    if m < 0:
        m, n = -m, -n
    residue = compose(power(g, m), power(h, -n))
    if not support_closure(residue).isdisjoint(X):
        raise PreconditionError(f"g^{m} and h^{n} disagree on X")
    return m, n
