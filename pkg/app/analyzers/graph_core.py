"""
Finite Serre graphs: darts with a reverse involution and an origin map.

Edges are the orbits {d, reverse(d)}. Graphs built by this package name the
two darts of edge ``e`` as ``e+`` (origin u) and ``e-`` (origin v), but the
structure itself accepts any identifiers, so malformed graphs can be
represented and reported by :func:`validate`.
"""

import logging
import random
import re
from collections import Counter, deque
from collections.abc import Iterable, Iterator, Mapping
from dataclasses import dataclass, field
from functools import cached_property
from types import MappingProxyType

from app.core.config import settings
from app.core.errors import (
    DisconnectedGraphError,
    EmptyGraphError,
    GraphTooLargeError,
    UnknownVertexError,
)

logger = logging.getLogger(__name__)

VertexId = str
DartId = str
Path = tuple[DartId, ...]

_DIGITS = re.compile(r"(\d+)")


def ident_key(ident: str) -> tuple[int | str, ...]:
    """Natural-order sort key: ``v2`` sorts before ``v10``; ties broken by the raw text"""
    parts = _DIGITS.split(ident)
    return (*(int(p) if i % 2 else p for i, p in enumerate(parts)), ident)


def sorted_ids(ids: Iterable[str]) -> list[str]:
    return sorted(ids, key=ident_key)


def dart_pair(edge_id: str) -> tuple[DartId, DartId]:
    return f"{edge_id}+", f"{edge_id}-"


def edge_name(dart: DartId) -> str:
    return dart[:-1] if dart[-1:] in ("+", "-") else dart


@dataclass(frozen=True)
class SerreGraph:
    """Immutable Serre graph; ``endpoint`` is the origin map"""

    vertices: Mapping[VertexId, str | None]
    reverse: Mapping[DartId, DartId]
    endpoint: Mapping[DartId, VertexId]

    def __post_init__(self) -> None:
        object.__setattr__(self, "vertices", MappingProxyType(dict(self.vertices)))
        object.__setattr__(self, "reverse", MappingProxyType(dict(self.reverse)))
        object.__setattr__(self, "endpoint", MappingProxyType(dict(self.endpoint)))

    __hash__ = None  # type: ignore[assignment]

    @cached_property
    def darts(self) -> frozenset[DartId]:
        return frozenset(self.reverse) | frozenset(self.reverse.values()) | frozenset(self.endpoint)

    @cached_property
    def vertex_ids(self) -> tuple[VertexId, ...]:
        return tuple(sorted_ids(self.vertices))

    @cached_property
    def sorted_darts(self) -> tuple[DartId, ...]:
        return tuple(sorted_ids(self.darts))

    @cached_property
    def incidence(self) -> Mapping[VertexId, tuple[DartId, ...]]:
        """Darts grouped by origin, each group in identifier order"""
        grouped: dict[VertexId, list[DartId]] = {v: [] for v in self.vertices}
        for d in self.sorted_darts:
            origin = self.endpoint.get(d)
            if origin in grouped:
                grouped[origin].append(d)
        return MappingProxyType({v: tuple(ds) for v, ds in grouped.items()})

    @property
    def vertex_count(self) -> int:
        return len(self.vertices)

    @property
    def edge_count(self) -> int:
        return len(self.darts) // 2

    def terminus(self, dart: DartId) -> VertexId:
        return self.endpoint[self.reverse[dart]]

    def label(self, v: VertexId) -> str | None:
        return self.vertices[v]

    def is_loop(self, dart: DartId) -> bool:
        return self.endpoint[dart] == self.terminus(dart)


@dataclass(frozen=True)
class GraphIsomorphism:
    """Vertex bijection plus dart bijection"""

    vertices: Mapping[VertexId, VertexId] = field(default_factory=dict)
    darts: Mapping[DartId, DartId] = field(default_factory=dict)

    def __post_init__(self) -> None:
        object.__setattr__(self, "vertices", MappingProxyType(dict(self.vertices)))
        object.__setattr__(self, "darts", MappingProxyType(dict(self.darts)))

    __hash__ = None  # type: ignore[assignment]

    def inverse(self) -> "GraphIsomorphism":
        return GraphIsomorphism(
            vertices={b: a for a, b in self.vertices.items()},
            darts={b: a for a, b in self.darts.items()},
        )

    def is_identity(self) -> bool:
        return all(a == b for a, b in self.vertices.items()) and all(
            a == b for a, b in self.darts.items()
        )


# Construction


def from_edges(
    vertices: Iterable[VertexId] | Mapping[VertexId, str | None],
    edges: Iterable[tuple[str, VertexId, VertexId]],
) -> SerreGraph:
    """
    Build a graph from edge declarations ``(edge_id, u, v)``.

    Args:
        vertices: vertex identifiers, or a mapping identifier -> label
        edges: triples; edge ``e`` contributes darts ``e+`` at u and ``e-`` at v

    Returns:
        The SerreGraph (not validated; endpoints may be dangling)
    """
    labels: dict[VertexId, str | None] = (
        dict(vertices) if isinstance(vertices, Mapping) else dict.fromkeys(vertices)
    )
    reverse: dict[DartId, DartId] = {}
    endpoint: dict[DartId, VertexId] = {}
    for edge_id, u, v in edges:
        plus, minus = dart_pair(edge_id)
        reverse[plus], reverse[minus] = minus, plus
        endpoint[plus], endpoint[minus] = u, v
    return SerreGraph(vertices=labels, reverse=reverse, endpoint=endpoint)


def subgraph(g: SerreGraph, keep: Iterable[VertexId]) -> SerreGraph:
    """Induced subgraph on ``keep``"""
    kept = set(keep)
    darts = [d for d in g.darts if g.endpoint[d] in kept and g.terminus(d) in kept]
    return SerreGraph(
        vertices={v: g.vertices[v] for v in kept},
        reverse={d: g.reverse[d] for d in darts},
        endpoint={d: g.endpoint[d] for d in darts},
    )


def relabel(g: SerreGraph, mapping: GraphIsomorphism) -> SerreGraph:
    return SerreGraph(
        vertices={mapping.vertices[v]: label for v, label in g.vertices.items()},
        reverse={mapping.darts[d]: mapping.darts[r] for d, r in g.reverse.items()},
        endpoint={mapping.darts[d]: mapping.vertices[v] for d, v in g.endpoint.items()},
    )


# Structural checks


def validate(g: SerreGraph) -> list[str]:
    """
    List every violated structural invariant; an empty list means well formed.

    Violations are data, never exceptions.
    """
    violations: list[str] = []
    if not g.vertices:
        violations.append("graph has no vertices")
    for d in g.sorted_darts:
        rev = g.reverse.get(d)
        if rev is None:
            violations.append(f"dart {d}: no reverse")
        elif rev == d:
            violations.append(f"dart {d}: reverse is the dart itself")
        elif g.reverse.get(rev) != d:
            violations.append(f"dart {d}: reverse of reverse is not {d}")
        origin = g.endpoint.get(d)
        if origin is None:
            violations.append(f"dart {d}: no endpoint")
        elif origin not in g.vertices:
            violations.append(f"dart {d}: endpoint {origin} is not a vertex")
    if len(g.darts) % 2:
        violations.append(f"odd number of darts ({len(g.darts)})")
    return violations


def edges(g: SerreGraph) -> list[tuple[DartId, DartId]]:
    """Edges as (dart, reverse) with the smaller dart first, in identifier order"""
    return [(d, g.reverse[d]) for d in g.sorted_darts if ident_key(d) < ident_key(g.reverse[d])]


def degree(g: SerreGraph, v: VertexId) -> int:
    if v not in g.vertices:
        raise UnknownVertexError(v)
    return len(g.incidence[v])


def loop_count(g: SerreGraph, v: VertexId) -> int:
    return sum(1 for d in g.incidence[v] if g.is_loop(d)) // 2


def neighbours(g: SerreGraph, v: VertexId) -> Iterator[VertexId]:
    for d in g.incidence[v]:
        yield g.terminus(d)


def components(g: SerreGraph) -> list[list[VertexId]]:
    seen: set[VertexId] = set()
    result: list[list[VertexId]] = []
    for start in g.vertex_ids:
        if start in seen:
            continue
        seen.add(start)
        queue = deque([start])
        component = []
        while queue:
            v = queue.popleft()
            component.append(v)
            for w in neighbours(g, v):
                if w not in seen:
                    seen.add(w)
                    queue.append(w)
        result.append(sorted_ids(component))
    return result


def is_connected(g: SerreGraph) -> bool:
    return len(components(g)) == 1


def betti(g: SerreGraph) -> int:
    return g.edge_count - g.vertex_count + len(components(g))


def require_connected(g: SerreGraph) -> None:
    if not g.vertices:
        raise EmptyGraphError("graph has no vertices")
    if not is_connected(g):
        raise DisconnectedGraphError(
            f"graph has {len(components(g))} connected components; a connected graph is required"
        )


def enumerate_reduced_paths(
    g: SerreGraph, u: VertexId, v: VertexId, max_len: int, limit: int | None = None
) -> list[Path]:
    """
    All reduced paths from u to v with at most ``max_len`` edges.

    A path is a dart sequence e_1..e_n with terminus(e_i) = origin(e_{i+1}); it is
    reduced when no e_{i+1} is the reverse of e_i. The length-0 path is ``()``.
    With ``limit``, the search stops once that many paths are found.
    """
    for w in (u, v):
        if w not in g.vertices:
            raise UnknownVertexError(w)
    found: list[Path] = []

    def extend(at: VertexId, path: list[DartId]) -> None:
        if at == v:
            found.append(tuple(path))
        if len(path) == max_len:
            return
        for d in g.incidence[at]:
            if limit is not None and len(found) >= limit:
                return
            if path and d == g.reverse[path[-1]]:
                continue
            path.append(d)
            extend(g.terminus(d), path)
            path.pop()

    extend(u, [])
    return found


def is_tree(g: SerreGraph) -> bool:
    return bool(g.vertices) and is_connected(g) and betti(g) == 0


def core(g: SerreGraph, *, rng: random.Random | None = None) -> SerreGraph | None:
    """
    Repeatedly delete a vertex of degree one until none remains.

    Args:
        g: a connected graph
        rng: when given, leaves are deleted in a random order (the result does not depend on it)

    Returns:
        The core as an induced subgraph of g, or None (the empty core) when g is a tree
    """
    require_connected(g)
    if is_tree(g):
        return None
    remaining = {v: degree(g, v) for v in g.vertices}
    leaves = {v for v, deg in remaining.items() if deg == 1}
    deleted = 0
    while leaves:
        leaf = rng.choice(sorted_ids(leaves)) if rng else min(leaves, key=ident_key)
        leaves.discard(leaf)
        del remaining[leaf]
        deleted += 1
        for w in neighbours(g, leaf):
            if w in remaining:
                remaining[w] -= 1
                if remaining[w] == 1:
                    leaves.add(w)
    logger.debug("core: deleted %d of %d vertices", deleted, g.vertex_count)
    return subgraph(g, remaining)


# Isomorphism


def _refine(graphs: list[SerreGraph], history: list[tuple] | None = None) -> list[dict[VertexId, int]]:
    """Joint colour refinement; colours are comparable across the given graphs"""

    def compress(signatures: list[dict[VertexId, tuple]]) -> list[dict[VertexId, int]]:
        palette = {s: i for i, s in enumerate(sorted({s for sig in signatures for s in sig.values()}))}
        if history is not None:
            history.append(tuple(sorted(Counter(s for sig in signatures for s in sig.values()).items())))
        return [{v: palette[s] for v, s in sig.items()} for sig in signatures]

    colours = compress(
        [{v: (len(g.incidence[v]), loop_count(g, v)) for v in g.vertices} for g in graphs]
    )
    classes = len({c for col in colours for c in col.values()})
    for _ in range(max((g.vertex_count for g in graphs), default=0)):
        signatures = [
            {
                v: (col[v], tuple(sorted(col[g.terminus(d)] for d in g.incidence[v])))
                for v in g.vertices
            }
            for g, col in zip(graphs, colours, strict=True)
        ]
        refined = compress(signatures)
        refined_classes = len({c for col in refined for c in col.values()})
        colours = refined
        if refined_classes == classes:
            break
        classes = refined_classes
    return colours


def refinement_signature(g: SerreGraph) -> tuple:
    """Isomorphism invariant from colour refinement (equal on isomorphic graphs)"""
    history: list[tuple] = []
    _refine([g], history)
    return (g.vertex_count, g.edge_count, tuple(history))


def _pair_counts(g: SerreGraph) -> Counter[tuple[VertexId, VertexId]]:
    counts: Counter[tuple[VertexId, VertexId]] = Counter()
    for d in g.darts:
        counts[(g.endpoint[d], g.terminus(d))] += 1
    return counts


def isomorphism(g1: SerreGraph, g2: SerreGraph) -> GraphIsomorphism | None:
    """
    Exact isomorphism search by backtracking.

    Vertices of g1 are assigned in identifier order and candidates tried in
    identifier order, so the witness returned is the lexicographically least
    vertex map; darts are then matched in identifier order per vertex pair.

    Returns:
        A GraphIsomorphism g1 -> g2, or None when the graphs are not isomorphic
    """
    if g1.vertex_count != g2.vertex_count or len(g1.darts) != len(g2.darts):
        return None
    if g1.vertex_count > settings.ISOMORPHISM_MAX_VERTICES:
        raise GraphTooLargeError(
            f"isomorphism search is limited to {settings.ISOMORPHISM_MAX_VERTICES} vertices"
        )
    degrees1 = sorted((len(g1.incidence[v]), loop_count(g1, v)) for v in g1.vertices)
    degrees2 = sorted((len(g2.incidence[v]), loop_count(g2, v)) for v in g2.vertices)
    if degrees1 != degrees2:
        return None

    colours1, colours2 = _refine([g1, g2])
    if Counter(colours1.values()) != Counter(colours2.values()):
        return None

    counts1, counts2 = _pair_counts(g1), _pair_counts(g2)
    order = list(g1.vertex_ids)
    candidates = {
        a: [x for x in g2.vertex_ids if colours2[x] == colours1[a]] for a in order
    }
    assignment: dict[VertexId, VertexId] = {}
    used: set[VertexId] = set()
    steps = 0

    def consistent(a: VertexId, x: VertexId) -> bool:
        if counts1[(a, a)] != counts2[(x, x)]:
            return False
        return all(counts1[(a, b)] == counts2[(x, y)] for b, y in assignment.items())

    def search(i: int) -> bool:
        nonlocal steps
        if i == len(order):
            return True
        a = order[i]
        for x in candidates[a]:
            if x in used or not consistent(a, x):
                continue
            steps += 1
            assignment[a] = x
            used.add(x)
            if search(i + 1):
                return True
            del assignment[a]
            used.discard(x)
        return False

    found = search(0)
    logger.debug("isomorphism: %d assignments tried, found=%s", steps, found)
    if not found:
        return None
    return GraphIsomorphism(vertices=assignment, darts=_match_darts(g1, g2, assignment))


def _match_darts(
    g1: SerreGraph, g2: SerreGraph, vertex_map: Mapping[VertexId, VertexId]
) -> dict[DartId, DartId]:
    def grouped(g: SerreGraph) -> dict[tuple[VertexId, VertexId], list[DartId]]:
        # one representative dart per edge, keyed by its (origin, terminus)
        groups: dict[tuple[VertexId, VertexId], list[DartId]] = {}
        for d in g.sorted_darts:
            a, b = g.endpoint[d], g.terminus(d)
            if a == b and ident_key(g.reverse[d]) < ident_key(d):
                continue
            groups.setdefault((a, b), []).append(d)
        return groups

    groups1, groups2 = grouped(g1), grouped(g2)
    darts: dict[DartId, DartId] = {}
    for (a, b), ds in groups1.items():
        if a != b and ident_key(b) < ident_key(a):
            continue
        targets = groups2[(vertex_map[a], vertex_map[b])]
        for d, t in zip(ds, targets, strict=True):
            darts[d] = t
            darts[g1.reverse[d]] = g2.reverse[t]
    return darts


def is_isomorphism(g1: SerreGraph, g2: SerreGraph, mapping: GraphIsomorphism) -> bool:
    """Check a claimed isomorphism directly against both structures"""
    vmap, dmap = mapping.vertices, mapping.darts
    if set(vmap) != set(g1.vertices) or set(vmap.values()) != set(g2.vertices):
        return False
    if len(set(vmap.values())) != len(vmap):
        return False
    if set(dmap) != g1.darts or set(dmap.values()) != g2.darts or len(set(dmap.values())) != len(dmap):
        return False
    for d in g1.darts:
        image = dmap[d]
        if g2.reverse.get(image) != dmap.get(g1.reverse[d]):
            return False
        if g2.endpoint.get(image) != vmap[g1.endpoint[d]]:
            return False
    return True
