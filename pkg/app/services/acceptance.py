"""
Acceptance suite behind ``corpus-check``: every criterion is a deterministic
check over the fixture corpus or seeded random instances.
"""

import asyncio
import itertools
import logging
import random
import time
from collections.abc import Callable
from dataclasses import dataclass, field
from fractions import Fraction

from app.analyzers.graph_core import (
    SerreGraph,
    betti,
    core,
    edges,
    from_edges,
    sorted_ids,
)
from app.analyzers.modifications import certify, random_modifications, subdivide_edges, verify
from app.analyzers.resolution import (
    apply_step,
    check_multiplicity_rules,
    divisorial_point,
    edge_skeleton_point,
    enumerate_scripts,
    possible_steps,
    retract,
)
from app.analyzers.topo import equivalent, homeomorphic, reduce
from app.analyzers.valuations import (
    INFINITY,
    IteratedOrderSpec,
    eval_iterated,
    eval_monomial,
    ord_var,
    pi_of_iterated,
)
from app.core.config import settings
from app.core.errors import UnknownCriterionError
from app.models.schemas import CorpusReport, CriterionResult
from app.services.fixtures import FixtureCorpus
from app.services.sampling import (
    IsomorphismClasses,
    enumerate_connected_graphs,
    random_connected_graph,
    random_cycle,
    random_ideal_member,
    random_order,
    random_polynomial,
    random_tree,
    random_weights,
)

logger = logging.getLogger(__name__)

MAX_REPORTED_FAILURES = 20


@dataclass
class _Tally:
    checked: int = 0
    failures: list[str] = field(default_factory=list)

    def check(self, ok: bool, message: str | Callable[[], str]) -> None:
        self.checked += 1
        if not ok and len(self.failures) < MAX_REPORTED_FAILURES:
            self.failures.append(message() if callable(message) else message)


class HomeomorphismOracle:
    """
    Decides homeomorphism by brute force: two graphs are homeomorphic when some
    subdivisions of them, each with a bounded number of new vertices, are isomorphic.

    Subdivision classes are explored level by level over isomorphism classes, so
    each class is subdivided once however many graphs reach it.
    """

    def __init__(self, max_subdivisions: int = 6) -> None:
        self.max_subdivisions = max_subdivisions
        self.classes = IsomorphismClasses()
        self._children: dict[int, set[int]] = {}

    def _subdivisions(self, ident: int) -> set[int]:
        if ident not in self._children:
            g = self.classes.representatives[ident]
            self._children[ident] = {
                self.classes.classify(subdivide_edges(g, {d: 1}))[0] for d, _ in edges(g)
            }
        return self._children[ident]

    def reachable(self, g: SerreGraph) -> set[int]:
        start, _ = self.classes.classify(g)
        seen = {start}
        level = {start}
        for _ in range(self.max_subdivisions):
            level = {c for ident in level for c in self._subdivisions(ident)} - seen
            seen |= level
        return seen

    def homeomorphic(self, reach1: set[int], reach2: set[int]) -> bool:
        return not reach1.isdisjoint(reach2)


class AcceptanceSuite:
    """Runs the acceptance criteria; results keep the criteria order"""

    def __init__(self, corpus: FixtureCorpus | None = None, seed: int | None = None) -> None:
        self.corpus = corpus or FixtureCorpus()
        self.seed = settings.DEFAULT_SEED if seed is None else seed
        self.criteria: dict[str, Callable[[_Tally, random.Random], None]] = {
            "stricter-trio": self.stricter_trio,
            "tree-collapse": self.tree_collapse,
            "equivalence-laws": self.equivalence_laws,
            "certificate-round-trip": self.certificate_round_trip,
            "homeomorphism-oracle": self.homeomorphism_oracle,
            "confluence": self.confluence,
            "blow-up-calculus": self.blow_up_calculus,
            "semivaluation-axioms": self.semivaluation_axioms,
            "pi-map": self.pi_map,
            "skeleton-normalization": self.skeleton_normalization,
            "homotopy-pair": self.homotopy_pair,
        }

    # Criteria

    def stricter_trio(self, tally: _Tally, rng: random.Random) -> None:
        trio = self.corpus.group("stricter")
        for fixture in trio:
            b = betti(fixture.loaded.graph)
            tally.check(b == 2, f"{fixture.name}: betti {b}, expected 2")
        for f1, f2 in itertools.combinations(trio, 2):
            tally.check(
                not equivalent(f1.loaded.graph, f2.loaded.graph),
                f"{f1.name} and {f2.name} are reported equivalent",
            )

    def tree_collapse(self, tally: _Tally, rng: random.Random) -> None:
        trees = self.corpus.group("trees")
        point = from_edges(["o"], [])
        for f1, f2 in itertools.combinations(trees, 2):
            tally.check(equivalent(f1.loaded.graph, f2.loaded.graph), f"{f1.name} !~ {f2.name}")
        for fixture in trees:
            tally.check(equivalent(fixture.loaded.graph, point), f"{fixture.name} !~ point")
        for k in range(50):
            tree = random_tree(rng)
            tally.check(core(tree) is None, f"random tree {k}: nonempty core")
            tally.check(equivalent(tree, point), f"random tree {k} !~ point")

    def equivalence_laws(self, tally: _Tally, rng: random.Random) -> None:
        graphs = [random_connected_graph(rng) for _ in range(200)]
        for g in graphs:
            tally.check(equivalent(g, g), "reflexivity failed")
        for g, h in zip(graphs, graphs[1:], strict=False):
            tally.check(equivalent(g, h) == equivalent(h, g), "symmetry failed")

        def modified(g: SerreGraph) -> SerreGraph:
            return random_modifications(g, rng.randint(0, 4), seed=rng.randrange(2**32))[0]

        # chains of modified copies satisfy both premises; unrelated triples test the rest
        premised = 0
        for k in range(300):
            a = rng.choice(graphs)
            if k < 200:
                b = modified(a)
                c = modified(b)
            else:
                b, c = rng.choice(graphs), rng.choice(graphs)
            if equivalent(a, b) and equivalent(b, c):
                premised += 1
                tally.check(equivalent(a, c), f"transitivity failed on triple {k}")
        tally.check(premised >= 200, f"only {premised} triples had both premises")

    def certificate_round_trip(self, tally: _Tally, rng: random.Random) -> None:
        for k in range(100):
            base = random_connected_graph(rng, max_vertices=8, max_extra_edges=3)
            g1, _ = random_modifications(base, rng.randint(0, 10), seed=rng.randrange(2**32))
            g2, _ = random_modifications(base, rng.randint(0, 10), seed=rng.randrange(2**32))
            tally.check(equivalent(g1, g2), f"pair {k}: modified copies not equivalent")
            cert = certify(g1, g2)
            tally.check(cert is not None, f"pair {k}: certify failed")
            if cert is not None:
                tally.check(verify(g1, g2, cert), f"pair {k}: verify rejected the certificate")
        for k in range(100):
            g1 = random_connected_graph(rng, max_vertices=8, max_extra_edges=3)
            # one more independent cycle changes betti, so the pair cannot be equivalent
            v = rng.choice(g1.vertex_ids)
            g2 = from_edges(
                dict(g1.vertices),
                [(d[:-1], g1.endpoint[d], g1.terminus(d)) for d, _ in edges(g1)] + [("extra", v, v)],
            )
            tally.check(certify(g1, g2) is None, f"negative pair {k}: certify produced a certificate")

    def homeomorphism_oracle(self, tally: _Tally, rng: random.Random) -> None:
        graphs = enumerate_connected_graphs(5)
        oracle = HomeomorphismOracle(max_subdivisions=6)
        reach = [oracle.reachable(g) for g in graphs]
        for i, j in itertools.combinations_with_replacement(range(len(graphs)), 2):
            expected = oracle.homeomorphic(reach[i], reach[j])
            tally.check(
                homeomorphic(graphs[i], graphs[j]) == expected,
                lambda i=i, j=j, expected=expected: f"graphs {i} and {j}: oracle says {expected}",
            )
        logger.info("homeomorphism oracle: %d graphs, %d subdivision classes", len(graphs), len(oracle.classes))

    def confluence(self, tally: _Tally, rng: random.Random) -> None:
        graphs = [random_connected_graph(rng, labelled=k % 2 == 1) for k in range(50)]
        graphs += [random_cycle(rng) for _ in range(10)]
        for k, g in enumerate(graphs):
            c0, r0 = core(g), reduce(g)
            for _ in range(10):
                order = random.Random(rng.randrange(2**32))
                tally.check(core(g, rng=order) == c0, f"graph {k}: core depends on the order")
                tally.check(reduce(g, rng=order) == r0, f"graph {k}: reduce depends on the order")

    def blow_up_calculus(self, tally: _Tally, rng: random.Random) -> None:
        checked, failures = check_multiplicity_rules(5)
        tally.checked += checked
        tally.failures.extend(failures[:MAX_REPORTED_FAILURES])
        for script, cfg in enumerate_scripts(4):
            for step in possible_steps(cfg):
                after = apply_step(cfg, step)
                tally.check(
                    equivalent(cfg.graph, after.graph),
                    lambda script=script, step=step: f"{'; '.join(map(str, (*script, step)))}: not equivalent",
                )

    def semivaluation_axioms(self, tally: _Tally, rng: random.Random) -> None:
        for k in range(1000):
            f, g = random_polynomial(rng), random_polynomial(rng)
            beta, spec = random_weights(rng), random_order(rng)
            product, total = f * g, f + g
            tally.check(
                eval_monomial(beta, product) == eval_monomial(beta, f) + eval_monomial(beta, g),
                f"pair {k}: monomial value not multiplicative",
            )
            tally.check(
                eval_monomial(beta, total) >= min(eval_monomial(beta, f), eval_monomial(beta, g)),
                f"pair {k}: monomial value breaks the ultrametric inequality",
            )
            tally.check(
                eval_iterated(spec, product) == eval_iterated(spec, f) + eval_iterated(spec, g),
                f"pair {k}: iterated value not multiplicative",
            )
            tally.check(
                eval_iterated(spec, total) >= min(eval_iterated(spec, f), eval_iterated(spec, g)),
                f"pair {k}: iterated value breaks the ultrametric inequality",
            )

    def pi_map(self, tally: _Tally, rng: random.Random) -> None:
        first, swapped = IteratedOrderSpec((0, 1, 2), 3), IteratedOrderSpec((1, 0, 2), 3)
        for k in range(100):
            f = random_ideal_member(rng, 3, 2) if k % 2 else random_polynomial(rng)
            restricted = f.substitute_zero(0).substitute_zero(1)
            expected = INFINITY if restricted.is_zero else ord_var(restricted, 2)
            a, b = pi_of_iterated(first, f), pi_of_iterated(swapped, f)
            tally.check(a == b, f"polynomial {k}: pi differs between stage orders ({a} vs {b})")
            tally.check(a == expected, f"polynomial {k}: pi = {a}, expected {expected}")

    def skeleton_normalization(self, tally: _Tally, rng: random.Random) -> None:
        for _, cfg in enumerate_scripts(4):
            for v in cfg.graph.vertex_ids:
                tally.check(divisorial_point(cfg, v) * cfg.multiplicity[v] == 1, f"vertex {v}: 1/b_v not normalized")
            for u, v in cfg.edge_pairs():
                b_u, b_v = cfg.multiplicity[u], cfg.multiplicity[v]
                for t in (Fraction(0), Fraction(1), Fraction(1, 2), Fraction(rng.randint(0, 12), 12)):
                    beta = edge_skeleton_point(cfg, u, v, t)
                    tally.check(beta.beta[0] * b_u + beta.beta[1] * b_v == 1, f"{u} -- {v} at t={t}: not normalized")
                    point = retract(cfg, (u, v), (beta.beta[0], beta.beta[1]))
                    tally.check(point.t == t, f"{u} -- {v} at t={t}: retraction gives {point.t}")

    def homotopy_pair(self, tally: _Tally, rng: random.Random) -> None:
        first, second = self.corpus.group("homotopy")
        g1, g2 = first.loaded.graph, second.loaded.graph
        tally.check(betti(g1) == betti(g2), f"{first.name} and {second.name} have different betti numbers")
        tally.check(not equivalent(g1, g2), f"{first.name} and {second.name} are reported equivalent")

    # Running

    def _run_one(self, index: int, name: str) -> CriterionResult:
        tally = _Tally()
        started = time.perf_counter()
        try:
            self.criteria[name](tally, random.Random(self.seed + index))
        except Exception as e:
            logger.exception("Criterion %s raised", name)
            tally.failures.append(f"raised {type(e).__name__}: {e}")
        seconds = time.perf_counter() - started
        passed = not tally.failures
        logger.info("%s: %s (%d checks, %.2fs)", name, "pass" if passed else "FAIL", tally.checked, seconds)
        return CriterionResult(
            name=name, passed=passed, checked=tally.checked, failures=tally.failures, seconds=seconds
        )

    async def run(self, only: list[str] | None = None) -> CorpusReport:
        names = [n for n in self.criteria if only is None or n in only]
        unknown = sorted_ids(set(only or ()) - set(self.criteria))
        if unknown:
            raise UnknownCriterionError(f"unknown criteria: {', '.join(unknown)}")
        semaphore = asyncio.Semaphore(max(1, settings.CORPUS_WORKERS))

        async def bounded(index: int, name: str) -> CriterionResult:
            async with semaphore:
                return await asyncio.to_thread(self._run_one, index, name)

        indices = {name: i for i, name in enumerate(self.criteria)}
        results = await asyncio.gather(*(bounded(indices[n], n) for n in names))
        return CorpusReport(passed=all(r.passed for r in results), seed=self.seed, results=list(results))
