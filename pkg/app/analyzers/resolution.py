"""
Blow-up calculus on weighted dual graphs of good resolutions.

A DivisorConfig is the dual graph of the exceptional divisor together with
the multiplicities b_v of the pulled-back maximal ideal along each E_v.
Free blow-ups expand the graph, satellite blow-ups subdivide it.
"""

import logging
from collections import Counter
from collections.abc import Iterator, Mapping, Sequence
from dataclasses import dataclass
from fractions import Fraction
from types import MappingProxyType

from app.analyzers.graph_core import (
    DartId,
    SerreGraph,
    VertexId,
    edges,
    from_edges,
    is_connected,
    is_tree,
    sorted_ids,
    validate,
)
from app.analyzers.modifications import Expansion, Subdivision, apply, fresh_edge, fresh_vertex
from app.analyzers.polynomial import Polynomial
from app.analyzers.topo import equivalent
from app.analyzers.valuations import Weights, eval_monomial, ord_var, retract_to_skeleton
from app.core.errors import (
    DualGraphInvariantError,
    SkeletonParameterError,
    UnknownEdgeError,
    UnknownVertexError,
)

logger = logging.getLogger(__name__)

VERTEX_PREFIX = "E"
EDGE_PREFIX = "e"


@dataclass(frozen=True)
class DivisorConfig:
    """Dual graph plus multiplicities; connected, no loops, no multiple edges, every b_v >= 1"""

    graph: SerreGraph
    multiplicity: Mapping[VertexId, int]

    def __post_init__(self) -> None:
        object.__setattr__(self, "multiplicity", MappingProxyType(dict(self.multiplicity)))
        problems = validate(self.graph)
        if problems:
            raise DualGraphInvariantError("; ".join(problems))
        if not is_connected(self.graph):
            raise DualGraphInvariantError("dual graph is not connected")
        loops = sorted_ids(d for d in self.graph.darts if self.graph.is_loop(d))
        if loops:
            raise DualGraphInvariantError(f"dual graph has a loop at dart {loops[0]}")
        pairs = Counter(frozenset((self.graph.endpoint[d], self.graph.terminus(d))) for d, _ in edges(self.graph))
        multi = [sorted_ids(p) for p, n in pairs.items() if n > 1]
        if multi:
            raise DualGraphInvariantError(f"multiple edges between {' and '.join(min(multi))}")
        missing = set(self.graph.vertices) - set(self.multiplicity)
        if missing:
            raise DualGraphInvariantError(f"no multiplicity for vertex {sorted_ids(missing)[0]}")
        extra = set(self.multiplicity) - set(self.graph.vertices)
        if extra:
            raise DualGraphInvariantError(f"multiplicity given for unknown vertex {sorted_ids(extra)[0]}")
        for v, b in self.multiplicity.items():
            if not isinstance(b, int) or b < 1:
                raise DualGraphInvariantError(f"multiplicity of {v} must be a positive integer, got {b!r}")

    def b(self, v: VertexId) -> int:
        if v not in self.multiplicity:
            raise UnknownVertexError(v)
        return self.multiplicity[v]

    def dart_between(self, u: VertexId, v: VertexId) -> DartId:
        """The dart with origin u and terminus v"""
        for w in (u, v):
            if w not in self.graph.vertices:
                raise UnknownVertexError(w)
        for d in self.graph.incidence[u]:
            if self.graph.terminus(d) == v:
                return d
        raise UnknownEdgeError(f"{u} -- {v}")

    def edge_pairs(self) -> list[tuple[VertexId, VertexId]]:
        """Edges as (origin, terminus) of their smaller dart, in identifier order"""
        return [(self.graph.endpoint[d], self.graph.terminus(d)) for d, _ in edges(self.graph)]


@dataclass(frozen=True)
class FreeBlowup:
    vertex: VertexId

    def __str__(self) -> str:
        return f"free {self.vertex}"


@dataclass(frozen=True)
class SatelliteBlowup:
    u: VertexId
    v: VertexId

    def __str__(self) -> str:
        return f"satellite {self.u} {self.v}"


BlowupStep = FreeBlowup | SatelliteBlowup


@dataclass(frozen=True)
class SkeletonPoint:
    """Point of the embedded dual graph: a vertex, or the parameter t on the edge u -- v"""

    vertex: VertexId | None = None
    edge: tuple[VertexId, VertexId] | None = None
    t: Fraction | None = None

    @property
    def nearest_vertex(self) -> VertexId | None:
        """The vertex the point coincides with, if any (t = 1 is u, t = 0 is v)"""
        if self.vertex is not None:
            return self.vertex
        if self.edge is not None and self.t in (0, 1):
            return self.edge[0] if self.t == 1 else self.edge[1]
        return None

    def __str__(self) -> str:
        if self.vertex is not None:
            return f"vertex {self.vertex}"
        assert self.edge is not None
        return f"edge {self.edge[0]} {self.edge[1]} t={self.t}"


# Blow-ups


def initial_config() -> DivisorConfig:
    """Blow-up of a smooth surface point: one divisor, multiplicity 1"""
    v0 = f"{VERTEX_PREFIX}0"
    return DivisorConfig(from_edges([v0], []), {v0: 1})


def blow_up_free(cfg: DivisorConfig, v: VertexId) -> DivisorConfig:
    if v not in cfg.graph.vertices:
        raise UnknownVertexError(v)
    new = fresh_vertex(cfg.graph, VERTEX_PREFIX)
    graph = apply(cfg.graph, Expansion(v, new, fresh_edge(cfg.graph, EDGE_PREFIX)))
    logger.debug("free blow-up on %s creates %s (b=%d)", v, new, cfg.multiplicity[v])
    return DivisorConfig(graph, {**cfg.multiplicity, new: cfg.multiplicity[v]})


def blow_up_satellite(cfg: DivisorConfig, u: VertexId, v: VertexId) -> DivisorConfig:
    """Blow up the intersection point of E_u and E_v; the new divisor sits between them"""
    d = cfg.dart_between(u, v)
    new = fresh_vertex(cfg.graph, VERTEX_PREFIX)
    e1 = fresh_edge(cfg.graph, EDGE_PREFIX)
    e2 = fresh_edge(cfg.graph, EDGE_PREFIX, taken=[e1])
    graph = apply(cfg.graph, Subdivision((d, cfg.graph.reverse[d]), new, (e1, e2)))
    b_new = cfg.multiplicity[u] + cfg.multiplicity[v]
    logger.debug("satellite blow-up on %s -- %s creates %s (b=%d)", u, v, new, b_new)
    return DivisorConfig(graph, {**cfg.multiplicity, new: b_new})


def apply_step(cfg: DivisorConfig, step: BlowupStep) -> DivisorConfig:
    if isinstance(step, FreeBlowup):
        return blow_up_free(cfg, step.vertex)
    return blow_up_satellite(cfg, step.u, step.v)


def apply_script(cfg: DivisorConfig | None, steps: Sequence[BlowupStep]) -> DivisorConfig:
    """Run a blow-up script, starting from the initial configuration when cfg is None"""
    current = cfg if cfg is not None else initial_config()
    for step in steps:
        current = apply_step(current, step)
    return current


def possible_steps(cfg: DivisorConfig) -> list[BlowupStep]:
    """Every free and satellite blow-up available on cfg, in identifier order"""
    steps: list[BlowupStep] = [FreeBlowup(v) for v in cfg.graph.vertex_ids]
    steps.extend(SatelliteBlowup(u, v) for u, v in cfg.edge_pairs())
    return steps


def enumerate_scripts(max_len: int) -> Iterator[tuple[tuple[BlowupStep, ...], DivisorConfig]]:
    """All scripts of length <= max_len over the initial configuration, depth first"""

    def walk(script: tuple[BlowupStep, ...], cfg: DivisorConfig) -> Iterator[tuple[tuple[BlowupStep, ...], DivisorConfig]]:
        yield script, cfg
        if len(script) < max_len:
            for step in possible_steps(cfg):
                yield from walk((*script, step), apply_step(cfg, step))

    yield from walk((), initial_config())


# Skeleton


def edge_skeleton_point(cfg: DivisorConfig, u: VertexId, v: VertexId, t: Fraction) -> Weights:
    """Weights (t/b_u, (1-t)/b_v) of the monomial valuation at parameter t on the edge u -- v"""
    cfg.dart_between(u, v)
    t = Fraction(t)
    if not 0 <= t <= 1:
        raise SkeletonParameterError(f"t must lie in [0, 1], got {t}")
    return Weights((t / cfg.multiplicity[u], (1 - t) / cfg.multiplicity[v]))


def simplex_point(b: Sequence[int], y: Sequence[Fraction]) -> Weights:
    """Weights y_i / b_i of a point y of the standard simplex; sum beta_i b_i = 1"""
    if len(b) != len(y):
        raise SkeletonParameterError(f"{len(b)} multiplicities for a point with {len(y)} coordinates")
    coords = [Fraction(c) for c in y]
    if any(c < 0 for c in coords) or sum(coords) != 1:
        raise SkeletonParameterError(f"{[str(c) for c in coords]} is not a point of the simplex")
    if any(bi < 1 for bi in b):
        raise SkeletonParameterError(f"multiplicities must be positive: {list(b)}")
    return Weights(tuple(c / bi for c, bi in zip(coords, b, strict=True)))


def divisorial_point(cfg: DivisorConfig, v: VertexId) -> Fraction:
    """Normalized divisorial valuation of E_v: value 1/b_v on its local equation"""
    return Fraction(1, cfg.b(v))


def satellite_position(cfg: DivisorConfig, u: VertexId, v: VertexId) -> Fraction:
    """Parameter on u -- v of the divisor a satellite blow-up there would create"""
    cfg.dart_between(u, v)
    b_u, b_v = cfg.multiplicity[u], cfg.multiplicity[v]
    return Fraction(b_u, b_u + b_v)


def retract(
    cfg: DivisorConfig,
    center: Sequence[VertexId],
    values: tuple[Fraction, Fraction] | None = None,
) -> SkeletonPoint:
    """
    Retraction onto the embedded dual graph.

    A free center on E_v lands on the vertex v. A satellite center on E_u and E_v
    with values (nu(z1), nu(z2)) of the local equations of E_u and E_v lands on the
    edge point t with t/b_u = nu(z1).
    """
    if len(center) == 1:
        v = center[0]
        cfg.b(v)
        return SkeletonPoint(vertex=v)
    if len(center) != 2:
        raise SkeletonParameterError(f"a center lies on one or two divisors, got {list(center)}")
    u, v = center
    cfg.dart_between(u, v)
    if values is None:
        raise SkeletonParameterError("a satellite center needs the values of both local equations")
    t = retract_to_skeleton(cfg.multiplicity[u], cfg.multiplicity[v], *values)
    return SkeletonPoint(edge=(u, v), t=t)


# Topology of the link


def links_equivalent(cfg1: DivisorConfig, cfg2: DivisorConfig) -> bool:
    """Normalized links are homeomorphic exactly when the dual graphs are equivalent"""
    return equivalent(cfg1.graph, cfg2.graph)


def link_is_tree(cfg: DivisorConfig) -> bool:
    return is_tree(cfg.graph)


# Local chart model


UNIT_WEIGHTS = Weights.of(1, 1)


def _chart_a(g: Polynomial) -> Polynomial:
    """z -> (y1, y1*y2): the new divisor is y1 = 0"""
    y1, y2 = Polynomial.variable(0, 2), Polynomial.variable(1, 2)
    return g.compose([y1, y1 * y2])


def _chart_b(g: Polynomial) -> Polynomial:
    """z -> (y1*y2, y2): the new divisor is y2 = 0"""
    y1, y2 = Polynomial.variable(0, 2), Polynomial.variable(1, 2)
    return g.compose([y1 * y2, y2])


def _swap(g: Polynomial) -> Polynomial:
    return g.compose([Polynomial.variable(1, 2), Polynomial.variable(0, 2)])


@dataclass(frozen=True)
class LocalBlowupModel:
    """
    Blow-ups over the origin of the plane tracked through local monomial data.

    ``free[v]`` generates the pulled-back maximal ideal at a general point of E_v
    (E_v is z1 = 0). ``satellite[(a, b)]`` generates it at E_a meet E_b, with
    E_a = {z1 = 0} and E_b = {z2 = 0}. ``orders`` holds the multiplicities read
    off the chart transforms; ``config`` is advanced by the update rules.
    """

    config: DivisorConfig
    orders: Mapping[VertexId, int]
    free: Mapping[VertexId, Polynomial]
    satellite: Mapping[tuple[VertexId, VertexId], Polynomial]

    @classmethod
    def initial(cls) -> "LocalBlowupModel":
        cfg = initial_config()
        (v0,) = cfg.graph.vertex_ids
        return cls(cfg, {v0: 1}, {v0: Polynomial.variable(0, 2)}, {})

    def generator_at(self, step: BlowupStep) -> Polynomial:
        if isinstance(step, FreeBlowup):
            if step.vertex not in self.free:
                raise UnknownVertexError(step.vertex)
            return self.free[step.vertex]
        if (step.u, step.v) in self.satellite:
            return self.satellite[(step.u, step.v)]
        if (step.v, step.u) in self.satellite:
            return _swap(self.satellite[(step.v, step.u)])
        raise UnknownEdgeError(f"{step.u} -- {step.v}")

    def predict(self, step: BlowupStep) -> Fraction:
        """Order at the center of the pulled-back maximal ideal: the new divisor's multiplicity"""
        return Fraction(eval_monomial(UNIT_WEIGHTS, self.generator_at(step)))

    def apply(self, step: BlowupStep) -> "LocalBlowupModel":
        g = self.generator_at(step)
        config = apply_step(self.config, step)
        (new,) = set(config.graph.vertices) - set(self.config.graph.vertices)
        in_a, in_b = _chart_a(g), _chart_b(g)
        orders = dict(self.orders)
        free = dict(self.free)
        satellite = dict(self.satellite)
        if isinstance(step, FreeBlowup):
            # chart B origin: strict transform of E_v is y1 = 0, new divisor y2 = 0
            orders[new] = int(ord_var(in_b, 1))
            satellite[(step.vertex, new)] = in_b
        else:
            satellite.pop((step.u, step.v), None)
            satellite.pop((step.v, step.u), None)
            # chart A origin: new divisor y1 = 0 meets E_v at y2 = 0
            orders[new] = int(ord_var(in_a, 0))
            satellite[(new, step.v)] = in_a
            # chart B origin: E_u is y1 = 0 and meets the new divisor y2 = 0
            satellite[(step.u, new)] = in_b
        free[new] = Polynomial.monomial((int(ord_var(in_a, 0)), 0))
        return LocalBlowupModel(config, orders, free, satellite)

    def disagreements(self) -> list[str]:
        problems = []
        for v in self.config.graph.vertex_ids:
            if self.orders[v] != self.config.multiplicity[v]:
                problems.append(f"{v}: chart order {self.orders[v]}, update rule {self.config.multiplicity[v]}")
        for (a, b), g in self.satellite.items():
            expected = Polynomial.monomial((self.orders[a], self.orders[b]))
            if g != expected:
                problems.append(f"{a} -- {b}: generator {g}, expected {expected}")
        return problems


def check_multiplicity_rules(max_len: int = 5) -> tuple[int, list[str]]:
    """
    Compare the update rules with the chart model over every blow-up sequence of length <= max_len.

    Returns the number of blow-ups checked and the list of disagreements.
    """
    failures: list[str] = []
    checked = 0

    def walk(model: LocalBlowupModel, script: tuple[BlowupStep, ...]) -> None:
        nonlocal checked
        if len(script) == max_len:
            return
        for step in possible_steps(model.config):
            predicted = model.predict(step)
            after = model.apply(step)
            (new,) = set(after.config.graph.vertices) - set(model.config.graph.vertices)
            checked += 1
            label = "; ".join(str(s) for s in (*script, step))
            if predicted != after.config.multiplicity[new]:
                failures.append(f"[{label}] predicted {predicted}, rule gives {after.config.multiplicity[new]}")
            failures.extend(f"[{label}] {p}" for p in after.disagreements())
            walk(after, (*script, step))

    walk(LocalBlowupModel.initial(), ())
    logger.debug("multiplicity oracle: %d blow-ups, %d failures", checked, len(failures))
    return checked, failures
