"""
Topological realization up to homeomorphism: smoothing, reduced forms, equivalence
"""

import logging
import random
from collections import Counter
from dataclasses import dataclass

from app.analyzers.graph_core import (
    DartId,
    SerreGraph,
    VertexId,
    betti,
    core,
    dart_pair,
    degree,
    from_edges,
    ident_key,
    isomorphism,
    require_connected,
    sorted_ids,
)
from app.models.schemas import RealizationSummary

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class ReducedForm:
    """Graph with no smoothable vertex, canonically relabelled (vertices r0.., edges s0..)"""

    graph: SerreGraph

    __hash__ = None  # type: ignore[assignment]


@dataclass(frozen=True)
class Chain:
    """A maximal path whose interior vertices have degree 2"""

    chain_id: str
    start: VertexId
    end: VertexId
    darts: tuple[DartId, ...]

    @property
    def interior(self) -> int:
        return len(self.darts) - 1


@dataclass(frozen=True)
class BranchDecomposition:
    branches: tuple[VertexId, ...]
    chains: tuple[Chain, ...]

    def chain_graph(self) -> SerreGraph:
        """The reduced multigraph: one edge per chain"""
        return from_edges(self.branches, [(c.chain_id, c.start, c.end) for c in self.chains])


class _Smoother:
    """Mutable working copy used while suppressing degree-2 vertices"""

    def __init__(self, g: SerreGraph) -> None:
        self.labels = dict(g.vertices)
        self.reverse = dict(g.reverse)
        self.endpoint = dict(g.endpoint)
        self.at: dict[VertexId, set[DartId]] = {v: set() for v in g.vertices}
        for d, v in g.endpoint.items():
            self.at[v].add(d)
        self.fresh = 0

    def smoothable(self, v: VertexId) -> bool:
        darts = self.at[v]
        if len(darts) != 2:
            return False
        d1, d2 = darts
        return self.reverse[d1] != d2

    def smooth(self, v: VertexId) -> tuple[VertexId, VertexId]:
        d1, d2 = sorted_ids(self.at[v])
        r1, r2 = self.reverse[d1], self.reverse[d2]
        a, b = self.endpoint[r1], self.endpoint[r2]
        for d in (d1, d2, r1, r2):
            del self.reverse[d]
            origin = self.endpoint.pop(d)
            self.at[origin].discard(d)
        del self.at[v]
        del self.labels[v]
        p, q = dart_pair(f"~s{self.fresh}")
        self.fresh += 1
        self.reverse[p], self.reverse[q] = q, p
        self.endpoint[p], self.endpoint[q] = a, b
        self.at[a].add(p)
        self.at[b].add(q)
        return a, b


def _canonical(labels: dict[VertexId, str | None], reverse: dict, endpoint: dict) -> SerreGraph:
    index = {v: i for i, v in enumerate(sorted_ids(labels))}
    oriented = []
    for d in sorted_ids(reverse):
        r = reverse[d]
        o, t = index[endpoint[d]], index[endpoint[r]]
        if (o, t) < (t, o) or ((o, t) == (t, o) and ident_key(d) < ident_key(r)):
            oriented.append((o, t))
    oriented.sort()
    return from_edges(
        {f"r{index[v]}": labels[v] for v in labels},
        [(f"s{j}", f"r{o}", f"r{t}") for j, (o, t) in enumerate(oriented)],
    )


def reduce(g: SerreGraph, *, rng: random.Random | None = None) -> ReducedForm:
    """
    Suppress every degree-2 vertex whose two darts lie on distinct edges.

    The vertex and its two edges are replaced by one edge joining the far
    endpoints (a loop when they coincide), so a cycle collapses to a single
    vertex carrying one loop.

    Args:
        g: connected, nonempty graph
        rng: optional random smoothing order; the result does not depend on it
    """
    require_connected(g)
    work = _Smoother(g)
    pending = {v for v in work.at if work.smoothable(v)}
    # a cycle keeps its least vertex as the one carrying the loop
    keep = {min(pending, key=ident_key)} if len(pending) == g.vertex_count else set()
    pending -= keep
    smoothed = 0
    while pending:
        v = rng.choice(sorted_ids(pending)) if rng else min(pending, key=ident_key)
        pending.discard(v)
        a, b = work.smooth(v)
        smoothed += 1
        for w in (a, b):
            if w not in keep and work.smoothable(w):
                pending.add(w)
            else:
                pending.discard(w)
    logger.debug("reduce: smoothed %d of %d vertices", smoothed, g.vertex_count)
    return ReducedForm(graph=_canonical(work.labels, work.reverse, work.endpoint))


def homeomorphic(g1: SerreGraph, g2: SerreGraph) -> bool:
    """True iff the realizations |g1| and |g2| are homeomorphic"""
    return isomorphism(reduce(g1).graph, reduce(g2).graph) is not None


def equivalent(g1: SerreGraph, g2: SerreGraph) -> bool:
    """Graphs are equivalent when their cores are both empty or have homeomorphic realizations"""
    c1, c2 = core(g1), core(g2)
    if c1 is None or c2 is None:
        return c1 is None and c2 is None
    return homeomorphic(c1, c2)


def branch_decomposition(g: SerreGraph) -> BranchDecomposition:
    """
    Split a connected graph into branch vertices and the chains joining them.

    Branch vertices are those a smoothing pass keeps; a cycle gets its least
    vertex as the only branch vertex.
    """
    require_connected(g)

    def is_branch(v: VertexId) -> bool:
        darts = g.incidence[v]
        return len(darts) != 2 or g.reverse[darts[0]] == darts[1]

    branches = [v for v in g.vertex_ids if is_branch(v)] or [g.vertex_ids[0]]
    branch_set = set(branches)
    used: set[DartId] = set()
    chains: list[Chain] = []
    for b in branches:
        for first in g.incidence[b]:
            if first in used:
                continue
            walk = [first]
            at = g.terminus(first)
            while at not in branch_set:
                back = g.reverse[walk[-1]]
                walk.append(next(d for d in g.incidence[at] if d != back))
                at = g.terminus(walk[-1])
            for d in walk:
                used.add(d)
                used.add(g.reverse[d])
            chains.append(Chain(f"c{len(chains)}", b, at, tuple(walk)))
    return BranchDecomposition(branches=tuple(branches), chains=tuple(chains))


def realization_summary(g: SerreGraph) -> RealizationSummary:
    require_connected(g)
    c = core(g)
    reduced = reduce(g).graph
    profile = Counter(degree(reduced, v) for v in reduced.vertices)
    return RealizationSummary(
        betti=betti(g),
        is_tree=c is None,
        core_vertices=0 if c is None else c.vertex_count,
        core_edges=0 if c is None else c.edge_count,
        reduced_vertices=reduced.vertex_count,
        reduced_edges=reduced.edge_count,
        reduced_degrees={str(k): n for k, n in sorted(profile.items())},
    )
