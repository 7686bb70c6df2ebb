"""Commuting pairs without nontrivial finite orbits, of three shapes."""

import random

from vlab.demonstrative import direct_product, make_cyclic, make_symmetric
from vlab.element import compose, power, random_element, relabel
from vlab.revealing import kill_finite_orbits

KINDS = ("powers", "disjoint", "product", "demonstrative")

_DEMO_GENERATORS = []


def orbit_free(rng, max_leaves):
    while True:
        _, w = kill_finite_orbits(random_element(rng, max_leaves))
        if not w.is_identity:
            return w


def _demo_generator(i):
    if not _DEMO_GENERATORS:
        for G in (make_cyclic(2), make_cyclic(3), make_symmetric(3)):
            _DEMO_GENERATORS.append(direct_product(G, make_cyclic(None)).generator)
    return _DEMO_GENERATORS[i % len(_DEMO_GENERATORS)]


def commuting_pair(seed):
    """``(kind, g, h)`` with ``[g, h] = 1``; the kind cycles with the seed."""
    rng = random.Random(seed)
    kind = KINDS[seed % len(KINDS)]
    if kind == "powers":
        u = orbit_free(rng, 8)
        g, h = power(u, rng.choice([1, 2, -1, 3])), power(u, rng.choice([1, 2, -2, 3]))
    elif kind == "disjoint":
        pg, ph = rng.choice([("0", "1"), ("00", "01"), ("00", "1"), ("10", "0")])
        g = relabel(orbit_free(rng, 6), pg)
        h = relabel(orbit_free(rng, 6), ph)
    elif kind == "product":
        u = relabel(orbit_free(rng, 5), "00")
        v = relabel(orbit_free(rng, 5), "1")
        g, h = compose(u, v), power(v, rng.choice([1, 2, -1]))
    else:
        hbar = _demo_generator(seed)
        g, h = hbar, power(hbar, rng.choice([2, -1, 3]))
    return kind, g, h
