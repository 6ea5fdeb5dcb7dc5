"""
Elementary modifications (expansion, subdivision, isomorphism) and equivalence certificates
"""

import logging
import random
from collections.abc import Iterable, Mapping, Sequence
from dataclasses import dataclass, field

from app.analyzers.graph_core import (
    DartId,
    GraphIsomorphism,
    SerreGraph,
    VertexId,
    core,
    dart_pair,
    edge_name,
    edges,
    ident_key,
    is_isomorphism,
    isomorphism,
    relabel,
    require_connected,
    sorted_ids,
)
from app.analyzers.topo import branch_decomposition
from app.core.errors import (
    DanglingReferenceError,
    DualGraphError,
    FreshIdentifierError,
    MalformedCertificateError,
)

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class Expansion:
    """Add ``new_vertex`` and an edge from ``at`` to it (darts ``edge+`` at ``at``, ``edge-`` at the new vertex)"""

    at: VertexId
    new_vertex: VertexId
    edge: str


@dataclass(frozen=True)
class Subdivision:
    """Replace ``edge`` = (d, reverse d) by origin(d) -e1- new_vertex -e2- terminus(d)"""

    edge: tuple[DartId, DartId]
    new_vertex: VertexId
    new_edges: tuple[str, str]


@dataclass(frozen=True)
class IsomorphismStep:
    relabeling: GraphIsomorphism

    __hash__ = None  # type: ignore[assignment]


Modification = Expansion | Subdivision | IsomorphismStep


@dataclass(frozen=True)
class EquivalenceCertificate:
    seq1: tuple[Modification, ...] = ()
    seq2: tuple[Modification, ...] = ()
    final_iso: GraphIsomorphism = field(default_factory=GraphIsomorphism)

    __hash__ = None  # type: ignore[assignment]

    @property
    def length(self) -> int:
        return len(self.seq1) + len(self.seq2)


# Fresh identifiers


def fresh_vertex(g: SerreGraph, prefix: str = "n", taken: Iterable[str] = ()) -> VertexId:
    blocked = set(taken)
    k = 0
    while f"{prefix}{k}" in g.vertices or f"{prefix}{k}" in blocked:
        k += 1
    return f"{prefix}{k}"


def fresh_edge(g: SerreGraph, prefix: str = "m", taken: Iterable[str] = ()) -> str:
    blocked = set(taken)
    k = 0
    while any(d in g.darts for d in dart_pair(f"{prefix}{k}")) or f"{prefix}{k}" in blocked:
        k += 1
    return f"{prefix}{k}"


# Applying modifications


def _require_fresh_darts(g: SerreGraph, edge_ids: Sequence[str]) -> None:
    new_darts = [d for e in edge_ids for d in dart_pair(e)]
    if len(set(new_darts)) != len(new_darts):
        raise FreshIdentifierError(f"new edges {list(edge_ids)} are not distinct")
    for d in new_darts:
        if d in g.darts:
            raise FreshIdentifierError(f"dart {d} already exists")


def _require_fresh_vertex(g: SerreGraph, v: VertexId) -> None:
    if v in g.vertices:
        raise FreshIdentifierError(f"vertex {v} already exists")


def apply(g: SerreGraph, m: Modification) -> SerreGraph:
    """
    Apply one elementary modification.

    Raises:
        DanglingReferenceError: the step names a vertex or edge missing from g
        FreshIdentifierError: a new identifier is already in use
    """
    vertices = dict(g.vertices)
    reverse = dict(g.reverse)
    endpoint = dict(g.endpoint)

    if isinstance(m, Expansion):
        if m.at not in g.vertices:
            raise DanglingReferenceError(f"expansion at unknown vertex {m.at}")
        _require_fresh_vertex(g, m.new_vertex)
        _require_fresh_darts(g, [m.edge])
        plus, minus = dart_pair(m.edge)
        vertices[m.new_vertex] = None
        reverse[plus], reverse[minus] = minus, plus
        endpoint[plus], endpoint[minus] = m.at, m.new_vertex

    elif isinstance(m, Subdivision):
        d, r = m.edge
        if d not in g.darts or g.reverse.get(d) != r:
            raise DanglingReferenceError(f"subdivision of unknown edge ({d}, {r})")
        _require_fresh_vertex(g, m.new_vertex)
        _require_fresh_darts(g, m.new_edges)
        a, b = g.endpoint[d], g.endpoint[r]
        for old in (d, r):
            del reverse[old]
            del endpoint[old]
        vertices[m.new_vertex] = None
        for edge_id, origin, terminus in (
            (m.new_edges[0], a, m.new_vertex),
            (m.new_edges[1], m.new_vertex, b),
        ):
            plus, minus = dart_pair(edge_id)
            reverse[plus], reverse[minus] = minus, plus
            endpoint[plus], endpoint[minus] = origin, terminus

    elif isinstance(m, IsomorphismStep):
        vmap, dmap = m.relabeling.vertices, m.relabeling.darts
        if set(vmap) != set(g.vertices) or set(dmap) != g.darts:
            raise DanglingReferenceError("relabeling is not total on the graph")
        if len(set(vmap.values())) != len(vmap) or len(set(dmap.values())) != len(dmap):
            raise FreshIdentifierError("relabeling is not injective")
        return relabel(g, m.relabeling)

    else:  # pragma: no cover
        raise TypeError(f"not a modification: {m!r}")

    return SerreGraph(vertices=vertices, reverse=reverse, endpoint=endpoint)


def replay(g: SerreGraph, steps: Iterable[Modification]) -> SerreGraph:
    """Apply steps in order; a failure names the index of the offending step"""
    for i, step in enumerate(steps):
        try:
            g = apply(g, step)
        except (DanglingReferenceError, FreshIdentifierError) as e:
            raise type(e)(f"step {i}: {e}") from e
    return g


def subdivide_edges(g: SerreGraph, counts: Mapping[DartId, int]) -> SerreGraph:
    """Subdivide each edge, named by either of its darts, the given number of times"""
    for dart in sorted_ids(counts):
        current = dart
        for _ in range(counts[dart]):
            w = fresh_vertex(g, "t")
            e1 = fresh_edge(g, "u")
            e2 = fresh_edge(g, "u", taken=[e1])
            g = apply(g, Subdivision((current, g.reverse[current]), w, (e1, e2)))
            current = dart_pair(e2)[0]
    return g


def random_modifications(
    g: SerreGraph, n: int, seed: int
) -> tuple[SerreGraph, list[Modification]]:
    """
    Apply n random valid modifications; identical (g, n, seed) give identical output.
    """
    require_connected(g)
    rng = random.Random(seed)
    steps: list[Modification] = []
    for _ in range(n):
        kind = rng.choices(["expand", "subdivide", "relabel"], weights=[5, 4, 1])[0]
        if kind == "subdivide" and g.edge_count == 0:
            kind = "expand"
        step: Modification
        if kind == "expand":
            step = Expansion(rng.choice(g.vertex_ids), fresh_vertex(g, "x"), fresh_edge(g, "y"))
        elif kind == "subdivide":
            d, r = rng.choice(edges(g))
            e1 = fresh_edge(g, "y")
            step = Subdivision((d, r), fresh_vertex(g, "x"), (e1, fresh_edge(g, "y", taken=[e1])))
        else:
            step = IsomorphismStep(_random_relabeling(g, rng))
        g = apply(g, step)
        steps.append(step)
    return g, steps


def _random_relabeling(g: SerreGraph, rng: random.Random) -> GraphIsomorphism:
    vertices = {v: v for v in g.vertices}
    darts = {d: d for d in g.darts}
    renamed = rng.choice(g.vertex_ids)
    vertices[renamed] = fresh_vertex(g, "x")
    if g.edge_count:
        d, r = rng.choice(edges(g))
        plus, minus = dart_pair(fresh_edge(g, "y"))
        darts[d], darts[r] = plus, minus
    return GraphIsomorphism(vertices=vertices, darts=darts)


# Certificates


class _Side:
    """One side of a certificate under construction"""

    def __init__(self, g: SerreGraph, prefix: str) -> None:
        self.original = g
        self.graph = g
        self.prefix = prefix
        self.steps: list[Modification] = []

    def _push(self, step: Modification) -> None:
        self.graph = apply(self.graph, step)
        self.steps.append(step)

    def expand(self, at: VertexId) -> tuple[VertexId, DartId, DartId]:
        w = fresh_vertex(self.graph, f"{self.prefix}v")
        e = fresh_edge(self.graph, f"{self.prefix}e")
        self._push(Expansion(at, w, e))
        plus, minus = dart_pair(e)
        return w, plus, minus

    def subdivide_last(self, walk: list[DartId]) -> None:
        """Subdivide the final dart of a chain walk, keeping the walk's orientation"""
        d = walk.pop()
        w = fresh_vertex(self.graph, f"{self.prefix}v")
        e1 = fresh_edge(self.graph, f"{self.prefix}e")
        e2 = fresh_edge(self.graph, f"{self.prefix}e", taken=[e1])
        self._push(Subdivision((d, self.graph.reverse[d]), w, (e1, e2)))
        walk.extend([dart_pair(e1)[0], dart_pair(e2)[0]])


class _CertificateBuilder:
    def __init__(self, g1: SerreGraph, g2: SerreGraph) -> None:
        self.side1 = _Side(g1, "p")
        self.side2 = _Side(g2, "q")
        self.vertices: dict[VertexId, VertexId] = {}
        self.darts: dict[DartId, DartId] = {}

    def match_cores(self, c1: SerreGraph, c2: SerreGraph) -> bool:
        """Subdivide chains so the cores become isomorphic; record the core part of the map"""
        deco1, deco2 = branch_decomposition(c1), branch_decomposition(c2)
        phi = isomorphism(deco1.chain_graph(), deco2.chain_graph())
        if phi is None:
            return False
        self.vertices.update(phi.vertices)
        chains2 = {c.chain_id: c for c in deco2.chains}
        for chain in deco1.chains:
            image = phi.darts[dart_pair(chain.chain_id)[0]]
            target = chains2[edge_name(image)]
            walk1 = list(chain.darts)
            if image.endswith("+"):
                walk2 = list(target.darts)
            else:
                walk2 = [c2.reverse[d] for d in reversed(target.darts)]
            while len(walk1) < len(walk2):
                self.side1.subdivide_last(walk1)
            while len(walk2) < len(walk1):
                self.side2.subdivide_last(walk2)
            g1, g2 = self.side1.graph, self.side2.graph
            for i, (d1, d2) in enumerate(zip(walk1, walk2, strict=True)):
                self.darts[d1] = d2
                self.darts[g1.reverse[d1]] = g2.reverse[d2]
                if i:
                    self.vertices[g1.endpoint[d1]] = g2.endpoint[d2]
        return True

    def _children(
        self, side: _Side, v: VertexId, parent: VertexId | None, core_set: set[VertexId]
    ) -> list[tuple[DartId, VertexId]]:
        g = side.original
        if v not in g.vertices:
            return []
        result = []
        for d in g.incidence[v]:
            w = g.terminus(d)
            if w == parent or (parent is None and w in core_set):
                continue
            result.append((d, w))
        return sorted(result, key=lambda item: ident_key(item[1]))

    def merge_trees(self, core1: set[VertexId], core2: set[VertexId]) -> None:
        for a, b in sorted(self.vertices.items(), key=lambda item: ident_key(item[0])):
            self._merge(a, b, None, None, core1, core2)

    def _merge(
        self,
        a: VertexId,
        b: VertexId,
        parent1: VertexId | None,
        parent2: VertexId | None,
        core1: set[VertexId],
        core2: set[VertexId],
    ) -> None:
        ch1 = self._children(self.side1, a, parent1, core1)
        ch2 = self._children(self.side2, b, parent2, core2)
        g1, g2 = self.side1.original, self.side2.original
        for (d1, c1), (d2, c2) in zip(ch1, ch2, strict=False):
            self.vertices[c1] = c2
            self.darts[d1], self.darts[g1.reverse[d1]] = d2, g2.reverse[d2]
            self._merge(c1, c2, a, b, core1, core2)
        for d1, c1 in ch1[len(ch2):]:
            self._graft(self.side1, self.side2, d1, c1, a, b, forward=True)
        for d2, c2 in ch2[len(ch1):]:
            self._graft(self.side2, self.side1, d2, c2, b, a, forward=False)

    def _graft(
        self,
        source: _Side,
        target: _Side,
        dart: DartId,
        child: VertexId,
        parent: VertexId,
        attach_at: VertexId,
        *,
        forward: bool,
    ) -> None:
        """Copy the subtree of ``source`` below ``child`` onto ``target`` at ``attach_at``"""
        w, plus, minus = target.expand(attach_at)
        rev = source.original.reverse[dart]
        if forward:
            self.vertices[child] = w
            self.darts[dart], self.darts[rev] = plus, minus
        else:
            self.vertices[w] = child
            self.darts[plus], self.darts[minus] = dart, rev
        g = source.original
        grand = [(d, g.terminus(d)) for d in g.incidence[child] if g.terminus(d) != parent]
        for d, c in sorted(grand, key=lambda item: ident_key(item[1])):
            self._graft(source, target, d, c, child, w, forward=forward)

    def certificate(self) -> EquivalenceCertificate:
        return EquivalenceCertificate(
            seq1=tuple(self.side1.steps),
            seq2=tuple(self.side2.steps),
            final_iso=GraphIsomorphism(vertices=self.vertices, darts=self.darts),
        )


def certify(g1: SerreGraph, g2: SerreGraph) -> EquivalenceCertificate | None:
    """
    Build two modification sequences and an isomorphism of their end graphs.

    Trees are grown to a common supertree rooted at their least vertices; otherwise
    the cores' chains are subdivided until the cores are isomorphic, and the trees
    hanging from matched core vertices are paired child by child, with unmatched
    subtrees copied across by expansions.

    Returns:
        The certificate, or None when the graphs are not equivalent
    """
    c1, c2 = core(g1), core(g2)
    if (c1 is None) != (c2 is None):
        return None
    builder = _CertificateBuilder(g1, g2)
    if c1 is None or c2 is None:
        r1, r2 = g1.vertex_ids[0], g2.vertex_ids[0]
        builder.vertices[r1] = r2
        core1, core2 = {r1}, {r2}
    else:
        if not builder.match_cores(c1, c2):
            return None
        core1, core2 = set(c1.vertices), set(c2.vertices)
    builder.merge_trees(core1, core2)
    cert = builder.certificate()
    logger.debug("certify: %d + %d steps", len(cert.seq1), len(cert.seq2))
    return cert


def verify(g1: SerreGraph, g2: SerreGraph, cert: EquivalenceCertificate) -> bool:
    """
    Replay both sequences and check the final isomorphism structurally.

    Raises:
        MalformedCertificateError: a step references something that does not exist
            or reuses an identifier
    """
    ends = []
    for side, (g, steps) in enumerate(((g1, cert.seq1), (g2, cert.seq2)), start=1):
        for i, step in enumerate(steps):
            try:
                g = apply(g, step)
            except DualGraphError as exc:
                raise MalformedCertificateError(side, i, str(exc)) from exc
        ends.append(g)
    return is_isomorphism(ends[0], ends[1], cert.final_iso)
