"""
Seeded generators: random connected graphs, small-graph enumeration, random polynomials
"""

import logging
import random
from collections.abc import Iterator
from fractions import Fraction

from app.analyzers.graph_core import SerreGraph, from_edges, isomorphism, refinement_signature
from app.analyzers.polynomial import Polynomial
from app.analyzers.valuations import IteratedOrderSpec, Weights

logger = logging.getLogger(__name__)


def random_connected_graph(
    rng: random.Random,
    max_vertices: int = 12,
    max_extra_edges: int = 4,
    loops: bool = True,
    labelled: bool = False,
) -> SerreGraph:
    """Random spanning tree plus extra edges (possibly loops and parallel edges)"""
    n = rng.randint(1, max_vertices)
    vertices = [f"v{i}" for i in range(n)]
    declared = [(f"e{i - 1}", vertices[rng.randrange(i)], vertices[i]) for i in range(1, n)]
    for _ in range(rng.randint(0, max_extra_edges)):
        u, v = rng.choice(vertices), rng.choice(vertices)
        if u == v and not loops:
            continue
        declared.append((f"e{len(declared)}", u, v))
    if labelled:
        return from_edges({v: f"E_{v}" for v in vertices}, declared)
    return from_edges(vertices, declared)


def random_tree(rng: random.Random, max_vertices: int = 12) -> SerreGraph:
    return random_connected_graph(rng, max_vertices, max_extra_edges=0)


def random_cycle(rng: random.Random, max_vertices: int = 8) -> SerreGraph:
    """Labelled cycle whose vertex names are shuffled around it"""
    n = rng.randint(1, max_vertices)
    vertices = [f"v{i}" for i in range(n)]
    rng.shuffle(vertices)
    declared = [(f"e{i}", vertices[i], vertices[(i + 1) % n]) for i in range(n)]
    return from_edges({v: f"E_{v}" for v in vertices}, declared)


class IsomorphismClasses:
    """Assigns class ids to graphs up to isomorphism, bucketed by refinement signature"""

    def __init__(self) -> None:
        self._buckets: dict[tuple, list[tuple[SerreGraph, int]]] = {}
        self.representatives: list[SerreGraph] = []

    def classify(self, g: SerreGraph) -> tuple[int, bool]:
        """Class id of g, and whether the class is new"""
        bucket = self._buckets.setdefault(refinement_signature(g), [])
        for representative, ident in bucket:
            if isomorphism(g, representative) is not None:
                return ident, False
        ident = len(self.representatives)
        self.representatives.append(g)
        bucket.append((g, ident))
        return ident, True

    def __len__(self) -> int:
        return len(self.representatives)


def _extensions(g: SerreGraph) -> Iterator[SerreGraph]:
    """Every graph obtained by adding one edge: a loop, an edge between old vertices, or a pendant edge"""
    vertices = list(g.vertex_ids)
    declared = [(d[:-1], g.endpoint[d], g.terminus(d)) for d in g.sorted_darts if d.endswith("+")]
    edge = f"e{len(declared)}"
    for i, u in enumerate(vertices):
        for v in vertices[i:]:
            yield from_edges(vertices, [*declared, (edge, u, v)])
        fresh = f"v{len(vertices)}"
        yield from_edges([*vertices, fresh], [*declared, (edge, u, fresh)])


def enumerate_connected_graphs(max_edges: int) -> list[SerreGraph]:
    """
    One representative per isomorphism class of connected graphs (loops and
    parallel edges allowed) with at most max_edges edges.

    Every connected graph with an edge loses a cycle edge, or a leaf with its
    edge, and stays connected, so extending by one edge at a time reaches all.
    """
    classes = IsomorphismClasses()
    level = [from_edges(["v0"], [])]
    classes.classify(level[0])
    for _ in range(max_edges):
        following = []
        for g in level:
            for h in _extensions(g):
                _, new = classes.classify(h)
                if new:
                    following.append(h)
        level = following
    logger.debug("enumerated %d connected graphs with <= %d edges", len(classes), max_edges)
    return classes.representatives


def random_rational(rng: random.Random, low: int = -9, high: int = 9) -> Fraction:
    value = Fraction(0)
    while value == 0:
        value = Fraction(rng.randint(low, high), rng.randint(1, 5))
    return value


def random_polynomial(
    rng: random.Random,
    arity: int = 3,
    max_degree: int = 6,
    max_terms: int = 5,
    zero_chance: float = 0.02,
) -> Polynomial:
    if rng.random() < zero_chance:
        return Polynomial.zero(arity)
    terms: dict[tuple[int, ...], Fraction] = {}
    for _ in range(rng.randint(1, max_terms)):
        budget = rng.randint(0, max_degree)
        exponent = [0] * arity
        for _ in range(budget):
            exponent[rng.randrange(arity)] += 1
        terms[tuple(exponent)] = random_rational(rng)
    return Polynomial.from_terms(terms, arity)


def random_ideal_member(rng: random.Random, arity: int, stage_variables: int) -> Polynomial:
    """Random element of the ideal generated by the first stage_variables coordinates"""
    total = Polynomial.zero(arity)
    for i in range(stage_variables):
        if rng.random() < 0.7:
            total = total + Polynomial.variable(i, arity) * random_polynomial(rng, arity, zero_chance=0)
    return total


def random_weights(rng: random.Random, arity: int = 3) -> Weights:
    return Weights(tuple(Fraction(rng.randint(0, 6), rng.randint(1, 4)) for _ in range(arity)))


def random_order(rng: random.Random, arity: int = 3) -> IteratedOrderSpec:
    order = list(range(arity))
    rng.shuffle(order)
    return IteratedOrderSpec(tuple(order[: rng.randint(1, arity)]), arity)
