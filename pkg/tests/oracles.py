"""Brute-force reference computations used to check the library.

None of these call into the code under test beyond reading plain data
(leaf maps, node tuples, point fields), so agreement is evidence rather than
a tautology.
"""

import random
from collections import deque
from itertools import product

from hypothesis import strategies as st

from vlab.element import random_element


def words(n):
    """All binary words of length n."""
    return ["".join(w) for w in product("01", repeat=n)]


def act_on_word(pairs, s):
    """Image of the finite word ``s`` under a leaf map; None if too short."""
    for d, r in pairs:
        if s.startswith(d):
            return r + s[len(d):]
    return None


def same_map(pairs1, pairs2):
    """Two leaf maps define the same homeomorphism of the Cantor set."""
    n = max(len(d) for d, _ in list(pairs1) + list(pairs2))
    return all(act_on_word(pairs1, s) == act_on_word(pairs2, s) for s in words(n))


def point_prefix(pre, per, n):
    s = pre
    while len(s) < n:
        s += per
    return s[:n]


def covered_words(nodes, n):
    """Words of length n lying under some node."""
    return {s for s in words(n) if any(s.startswith(x) for x in nodes)}


def brute_complete(leaves):
    n = max(len(x) for x in leaves)
    return all(sum(s.startswith(x) for x in leaves) == 1 for s in words(n))


# -------------------------------------------------------------- Z^2 * Z words

INV = {"a": "A", "A": "a", "b": "B", "B": "b", "c": "C", "C": "c"}
_AB = set("aAbB")


def rewrite_class(w):
    """Least-length words reachable from ``w`` by swaps and cancellations.

    Swaps exchange adjacent letters from different generators among a and b;
    cancellations delete ``x X``.  In this right-angled Artin group reduced
    words for one element differ only by swaps, so the lexicographically
    least shortest reachable word is a normal form.
    """
    seen = {w}
    todo = deque([w])
    while todo:
        u = todo.popleft()
        for i in range(len(u) - 1):
            x, y = u[i], u[i + 1]
            nxt = []
            if INV[x] == y:
                nxt.append(u[:i] + u[i + 2:])
            if x in _AB and y in _AB and x.lower() != y.lower():
                nxt.append(u[:i] + y + x + u[i + 2:])
            for v in nxt:
                if v not in seen:
                    seen.add(v)
                    todo.append(v)
    m = min(len(v) for v in seen)
    return min(v for v in seen if len(v) == m)


# ------------------------------------------------------------- strategies

seeds = st.integers(min_value=0, max_value=2**32 - 1)


def element_from(seed, max_leaves=12):
    return random_element(random.Random(seed), max_leaves)


elements = st.builds(element_from, seeds, st.integers(min_value=1, max_value=12))
